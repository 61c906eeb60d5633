"""Integer lattices of coefficient relations mod p and lattice points in boxes.

No floating-point reduction is used anywhere: points are enumerated over an
echelon basis with exact rational box bounds, and successive minima are read
off from the enumerated candidates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from ._exact import bareiss_det, cyclic_convolve

MAX_POINTS = 10**7
MAX_DIM = 6
# Above this modulus the residue-convolution counter is slower than enumeration.
CONVOLUTION_MODULUS = 50_000

Vector = tuple[int, ...]


@dataclass(frozen=True)
class LatticeBasis:
    """Full-rank integer lattice given by basis rows.

    ``relation`` optionally records ``(c, m)`` with
    ``Gamma = {u : sum c_i u_i = 0 (mod m)}``; it enables exact counting
    without enumeration.
    """

    rows: tuple[Vector, ...]
    relation: tuple[Vector, int] | None = None
    determinant: int = field(init=False, compare=False)

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("basis must be a nonempty square matrix")
        det = bareiss_det(rows)
        if det == 0:
            raise ValueError("basis rows are linearly dependent")
        object.__setattr__(self, "determinant", det)

    @property
    def n(self) -> int:
        return len(self.rows)

    def contains(self, u: Sequence[int]) -> bool:
        if self.relation is not None:
            c, m = self.relation
            return sum(ci * ui for ci, ui in zip(c, u)) % m == 0
        adj_rows = _solve_coefficients(self.rows, u)
        return all(x.denominator == 1 for x in adj_rows)


def _solve_coefficients(rows, u) -> list[Fraction]:
    """Coefficients ``c`` with ``c @ rows = u`` (exact)."""
    n = len(rows)
    # Solve rows^T c = u by Gauss-Jordan on the augmented matrix.
    a = [[Fraction(rows[j][i]) for j in range(n)] + [Fraction(u[i])] for i in range(n)]
    for col in range(n):
        piv = next(i for i in range(col, n) if a[i][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [a[i][n] for i in range(n)]


@dataclass(frozen=True)
class Box:
    """Symmetric box ``|u_i| < w_i`` (open; dilates used for minima are closed)."""

    half_widths: tuple[Fraction, ...]

    def __post_init__(self):
        ws = tuple(Fraction(w) for w in self.half_widths)
        if not ws or any(w <= 0 for w in ws):
            raise ValueError("half widths must be positive")
        object.__setattr__(self, "half_widths", ws)

    @property
    def n(self) -> int:
        return len(self.half_widths)

    def scaled(self, t) -> "Box":
        t = Fraction(t)
        return Box(tuple(w * t for w in self.half_widths))

    def norm(self, v: Sequence[int]) -> Fraction:
        """Smallest ``lam`` with ``v`` in the closed dilate ``lam * box``."""
        return max(Fraction(abs(x)) / w for x, w in zip(v, self.half_widths))

    def volume(self) -> Fraction:
        return math.prod((2 * w for w in self.half_widths), start=Fraction(1))


@dataclass(frozen=True)
class SuccessiveMinima:
    minima: tuple[Fraction, ...]
    witnesses: tuple[Vector, ...]


def congruence_lattice(coeffs: Sequence[int], m: int) -> LatticeBasis:
    """Basis of ``{u in Z^n : sum c_i u_i = 0 (mod m)}``.

    The pivot is the last coordinate whose coefficient is a unit mod ``m``;
    row ``i != j`` is ``e_i - c_i c_j^{-1} e_j`` and row ``j`` is ``m e_j``.
    """
    c = tuple(int(x) % m for x in coeffs)
    n = len(c)
    units = [i for i in range(n) if math.gcd(c[i], m) == 1]
    if not units:
        raise ValueError("relation needs a coefficient invertible mod m")
    j = units[-1]
    inv = pow(c[j], -1, m)
    rows = []
    for i in range(n):
        row = [0] * n
        if i == j:
            row[j] = m
        else:
            row[i] = 1
            row[j] = -(c[i] * inv % m)
        rows.append(tuple(row))
    return LatticeBasis(tuple(rows), relation=(c, m))


def build_congruence_lattice(p: int, s: int, nu: int) -> LatticeBasis:
    """``{u : u_1 s^(nu-1) + ... + u_(nu-1) s + u_nu = 0 (mod p)}``."""
    if nu < 2:
        raise ValueError("nu must be >= 2")
    return congruence_lattice([pow(s, nu - i, p) for i in range(1, nu + 1)], p)


@lru_cache(maxsize=1024)
def _echelon(rows: tuple[Vector, ...], order: tuple[int, ...]) -> tuple[Vector, ...]:
    """Upper-triangular Hermite form of the basis with columns taken in ``order``."""
    n = len(rows)
    m = [[r[c] for c in order] for r in rows]
    for j in range(n):
        while True:
            live = [i for i in range(j, n) if m[i][j] != 0]
            piv = min(live, key=lambda i: abs(m[i][j]))
            m[j], m[piv] = m[piv], m[j]
            done = True
            for i in range(j + 1, n):
                if m[i][j]:
                    q = m[i][j] // m[j][j]
                    m[i] = [a - q * b for a, b in zip(m[i], m[j])]
                    done = done and m[i][j] == 0
            if done:
                break
        if m[j][j] < 0:
            m[j] = [-a for a in m[j]]
        for i in range(j):
            q = m[i][j] // m[j][j]
            if q:
                m[i] = [a - q * b for a, b in zip(m[i], m[j])]
    return tuple(tuple(r) for r in m)


def find_relation(basis: LatticeBasis) -> tuple[Vector, int] | None:
    """A single congruence ``(c, m)`` cutting out the lattice, if the quotient is cyclic."""
    if basis.relation is not None:
        return basis.relation
    n = basis.n
    for last in reversed(range(n)):
        order = tuple([i for i in range(n) if i != last] + [last])
        e = _echelon(basis.rows, order)
        if all(e[i][i] == 1 for i in range(n - 1)):
            m = e[n - 1][n - 1]
            c = [0] * n
            for i in range(n - 1):
                c[order[i]] = -e[i][n - 1] % m
            c[last] = 1 % m
            return tuple(c), m
    return None


def _int_bound(w: Fraction, closed: bool) -> int:
    return math.floor(w) if closed else math.ceil(w) - 1


def box_points_array(
    basis: LatticeBasis, box: Box, closed: bool = False, max_points: int = MAX_POINTS
) -> np.ndarray:
    """Lattice points of the box as rows of an integer array (unordered).

    Integer points only see the integer bounds ``|u_i| <= B_i``, so the search
    runs level by level over an echelon basis, expanding every partial vector
    by its whole admissible coefficient range at once.
    """
    n = basis.n
    if box.n != n:
        raise ValueError("box and lattice dimensions differ")
    expected = box.volume() / abs(basis.determinant)
    if expected > max_points:
        raise ValueError(f"box holds about {float(expected):.3g} lattice points (guard {max_points})")
    bounds = [_int_bound(w, closed) for w in box.half_widths]
    if any(b < 0 for b in bounds):
        return np.zeros((0, n), dtype=np.int64)
    order = tuple(sorted(range(n), key=lambda i: (bounds[i], i)))
    e = _echelon(basis.rows, order)
    big = max(abs(x) for r in e for x in r) * (max(bounds) + 1) * (n + 1)
    dtype = np.int64 if big < 2**62 else object
    node_budget = 50 * max_points + 1000
    nodes = 0
    acc = np.zeros((1, n), dtype=dtype)
    for k in range(n):
        b, B = e[k][k], bounds[order[k]]
        t = acc[:, k]
        lo = -((B + t) // b)
        hi = (B - t) // b
        cnt = np.maximum(hi - lo + 1, 0).astype(np.int64)
        total = int(cnt.sum())
        nodes += total
        if nodes > node_budget:
            raise ValueError("enumeration exceeded its node budget")
        parent = np.repeat(np.arange(len(acc)), cnt)
        offs = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        c = (lo[parent] + offs).astype(dtype)
        acc = acc[parent] + c[:, None] * np.array(e[k], dtype=dtype)[None, :]
    out = np.empty_like(acc)
    out[:, list(order)] = acc
    return out


def enumerate_box_points(
    basis: LatticeBasis, box: Box, closed: bool = False, max_points: int = MAX_POINTS
) -> list[Vector]:
    """All lattice points of the (open by default) box, lexicographically sorted."""
    pts = box_points_array(basis, box, closed, max_points)
    return sorted(tuple(int(x) for x in row) for row in pts)


def count_box_points(basis: LatticeBasis, box: Box, closed: bool = False) -> int:
    """``#(box ∩ Gamma)``; exact residue convolution when the quotient is cyclic."""
    rel = find_relation(basis)
    if rel is None or rel[1] > CONVOLUTION_MODULUS:
        return len(box_points_array(basis, box, closed))
    c, m = rel
    bounds = [_int_bound(w, closed) for w in box.half_widths]
    if any(b < 0 for b in bounds):
        return 0
    total = math.prod(2 * b + 1 for b in bounds)
    dtype = np.int64 if total < 2**62 else object
    t = np.arange(m, dtype=np.int64)
    acc = None
    for ci, b in zip(c, bounds):
        cnt = (b - t) // m - (-b - 1 - t) // m
        hist = np.zeros(m, dtype=np.int64)
        np.add.at(hist, t * ci % m, cnt)
        hist = hist.astype(dtype)
        acc = hist if acc is None else cyclic_convolve(acc, hist)
    return int(acc[0])


def _norm_keys(box: Box, pts: np.ndarray) -> tuple[np.ndarray, int]:
    """Integer keys ``K`` and a denominator ``L`` with ``box.norm(v) = K / L``."""
    inv = [1 / w for w in box.half_widths]
    L = math.lcm(*(q.denominator for q in inv))
    scale = [q.numerator * (L // q.denominator) for q in inv]
    big = max(scale) * (int(np.abs(pts).max()) if len(pts) else 0)
    dtype = np.int64 if big < 2**62 else object
    keys = np.abs(pts.astype(dtype)) * np.array(scale, dtype=dtype)[None, :]
    return keys.max(axis=1), L


def _complement(vectors: list[Vector], n: int) -> np.ndarray | None:
    """Integer rows spanning the orthogonal complement of ``vectors`` (None when they span)."""
    if len(vectors) == n:
        return None
    rows = [[Fraction(x) for x in v] for v in vectors]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    out = []
    for f in free:
        y = [Fraction(0)] * n
        y[f] = Fraction(1)
        for i, c in enumerate(pivots):
            y[c] = -rows[i][f]
        den = math.lcm(*(x.denominator for x in y))
        out.append([int(x * den) for x in y])
    return np.array(out, dtype=object)


def successive_minima(basis: LatticeBasis, box: Box) -> SuccessiveMinima:
    """Exact successive minima of ``box`` w.r.t. the lattice, with closed dilates.

    Dilates double from a volume-based guess until the enumerated points span
    the space. Candidates are taken in order of (box norm, l1 norm, lex) with
    the first nonzero entry positive; the greedy independent chain then
    attains every minimum.
    """
    n = basis.n
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds the desk-scale cap {MAX_DIM}")
    if box.n != n:
        raise ValueError("box and lattice dimensions differ")
    upper = max(box.norm(r) for r in basis.rows)
    guess = (abs(basis.determinant) / box.volume()) ** (1.0 / n)
    lam = min(upper, Fraction(2) ** math.floor(math.log2(max(guess, 1e-300))))
    while True:
        pts = box_points_array(basis, box.scaled(lam), closed=True)
        nz = pts != 0
        first = np.argmax(nz, axis=1)
        keep = nz.any(axis=1) & (pts[np.arange(len(pts)), first] > 0)
        pts = pts[keep]
        keys, L = _norm_keys(box, pts)
        l1 = np.abs(pts).sum(axis=1)
        perm = np.lexsort(tuple(pts[:, i] for i in reversed(range(n))) + (l1, keys))
        pts, keys = pts[perm], keys[perm]
        minima, witnesses = [], []
        start = 0
        while len(minima) < n:
            comp = _complement(witnesses, n)
            tail = pts[start:]
            if comp is None or len(tail) == 0:
                break
            if witnesses:
                cbig = max(abs(int(x)) for x in comp.ravel()) * int(np.abs(tail).max()) * n
                dt = np.int64 if cbig < 2**62 else object
                hit = np.flatnonzero((tail.astype(dt) @ comp.T.astype(dt) != 0).any(axis=1))
            else:
                hit = np.arange(len(tail))
            if len(hit) == 0:
                break
            i = start + int(hit[0])
            witnesses.append(tuple(int(x) for x in pts[i]))
            minima.append(Fraction(int(keys[i]), L))
            start = i + 1
        if len(minima) == n:
            return SuccessiveMinima(tuple(minima), tuple(witnesses))
        if lam >= upper:
            raise RuntimeError("basis rows failed to span inside their own dilate")
        lam = min(2 * lam, upper)


def double_factorial_odd(n: int) -> int:
    """``(2n + 1)!! = 1 * 3 * ... * (2n + 1)``."""
    return math.prod(range(1, 2 * n + 2, 2))


@dataclass(frozen=True)
class LatpCheck:
    count: int
    minima: tuple[Fraction, ...]
    bound: Fraction
    holds: bool
    corollary_lhs: Fraction
    corollary_rhs: Fraction
    corollary_holds: bool


def check_latp(basis: LatticeBasis, box: Box) -> LatpCheck:
    """Point count of the open box against ``prod (2i / lambda_i + 1)`` and its corollary."""
    count = count_box_points(basis, box)
    sm = successive_minima(basis, box)
    bound = math.prod((2 * i / lam + 1 for i, lam in enumerate(sm.minima, 1)), start=Fraction(1))
    lhs = math.prod((min(lam, Fraction(1)) for lam in sm.minima), start=Fraction(1))
    rhs = Fraction(double_factorial_odd(basis.n), count)
    return LatpCheck(count, sm.minima, bound, count <= bound, lhs, rhs, lhs <= rhs)


def commonsols_box(nu: int, h: int) -> Box:
    """The body ``|u_i| < 2^nu h^i`` built around the congruence lattice."""
    return Box(tuple(Fraction(2**nu * h**i) for i in range(1, nu + 1)))


def hypothesis_box(nu: int, h: int) -> Box:
    """``|A_i| < 2^i h^i``, the box holding the many relation vectors."""
    return Box(tuple(Fraction(2**i * h**i) for i in range(1, nu + 1)))


def _canonical_sign(v: Vector) -> Vector:
    lead = next(x for x in v if x)
    return v if lead > 0 else tuple(-x for x in v)


def _shortest_in_box(basis: LatticeBasis, box: Box, accept) -> Vector | None:
    """Nonzero accepted lattice vector of least box norm strictly inside ``box``."""
    n = basis.n
    guess = (abs(basis.determinant) / box.volume()) ** (1.0 / n)
    lam = Fraction(2) ** math.floor(math.log2(max(guess, 1e-300)))
    while True:
        final = lam >= 1
        pts = enumerate_box_points(basis, box if final else box.scaled(lam), closed=not final)
        found = [_canonical_sign(v) for v in pts if any(v) and accept(v)]
        if found:
            return min(found, key=lambda v: (box.norm(v), v))
        if final:
            return None
        lam *= 2


def rational_reconstruct(p: int, s: int, a_bound, b_bound) -> tuple[int, int] | None:
    """``(a, b)`` with ``s b = a (mod p)``, ``|a| <= a_bound``, ``0 < b <= b_bound``, coprime.

    Smallest ``b`` wins, then smallest ``|a|``, then positive ``a``.
    """
    a_bound, b_bound = Fraction(a_bound), Fraction(b_bound)
    if b_bound < 1 or a_bound < 0:
        return None
    s %= p
    if a_bound == 0:
        return (0, 1) if s == 0 else None
    basis = congruence_lattice([1, -s], p)
    pts = enumerate_box_points(basis, Box((a_bound, b_bound)), closed=True)
    good = [(b, abs(a), a < 0, a) for a, b in pts if b > 0 and math.gcd(a, b) == 1]
    if not good:
        return None
    b, _, _, a = min(good)
    return a, b


def relation_length(nu: int) -> int:
    """Length of the small relation promised for a given ``nu``."""
    if nu < 2:
        raise ValueError("nu must be >= 2")
    if nu <= 3:
        return 2
    if nu == 4:
        return 3
    return nu - 2


def find_small_relation(
    p: int, s: int, nu: int, bounds: Sequence, require_constant: bool = False
) -> Vector | None:
    """Nonzero ``B`` with ``sum B_i s^(k-i) = 0 (mod p)`` and ``|B_i| < bounds[i]``.

    ``k = len(bounds)``; among admissible vectors the one of least box-scaled
    sup-norm is returned (sign normalised so the first nonzero entry is
    positive). With ``require_constant`` the constant coefficient must be
    nonzero; for ``s = 0`` that forces ``|B_k| >= p``.
    """
    k = len(bounds)
    if k != relation_length(nu):
        raise ValueError(f"nu={nu} calls for {relation_length(nu)} coefficients, got {k}")
    basis = congruence_lattice([pow(s, k - i, p) for i in range(1, k + 1)], p)
    box = Box(tuple(Fraction(b) for b in bounds))
    accept = (lambda v: v[-1] != 0) if require_constant else (lambda v: True)
    return _shortest_in_box(basis, box, accept)


def conclusion_bounds(nu: int, h: int, C) -> tuple[Fraction, ...]:
    """Coefficient bounds of the small relation, scaled by the constant ``C``."""
    C = Fraction(C)
    if nu == 3:
        return (C * Fraction(h**0.5), C * Fraction(h**1.5))
    if nu == 4:
        return tuple(C * h ** (i - 2) for i in (2, 3, 4))
    if nu >= 5:
        return tuple(C * Fraction(h ** (i - 2 - 1 / (nu - 2))) for i in range(3, nu + 1))
    raise ValueError("the small-relation conclusion needs nu >= 3")


@dataclass(frozen=True)
class CommonSolsReport:
    p: int
    s: int
    nu: int
    h: int
    relation_count: int
    threshold: int
    hypothesis_met: bool
    fitted_C: int | None
    witness: tuple[int, ...] | None


def stress_commonsols(p: int, s: int, nu: int, h: int, max_points: int = MAX_POINTS) -> CommonSolsReport:
    """Count relation vectors in the hypothesis box and fit the conclusion constant.

    The count includes the zero vector. When it reaches ``h^(nu-1)`` the
    conclusion search runs with ``C = 1, 2, 4, ..., 2^10`` and keeps the first
    success; for ``nu = 3`` the witness is ``(a, b)`` with ``s = a/b``.
    """
    if nu < 3:
        raise ValueError("nu must be >= 3")
    s %= p
    basis = build_congruence_lattice(p, s, nu)
    box = hypothesis_box(nu, h)
    expected = box.volume() / p
    if expected > max_points:
        raise ValueError(f"hypothesis box holds about {float(expected):.3g} vectors (guard {max_points})")
    count = count_box_points(basis, box)
    threshold = h ** (nu - 1)
    met = count >= threshold
    fitted, witness = None, None
    if met:
        for e in range(11):
            C = 2**e
            bounds = conclusion_bounds(nu, h, C)
            if nu == 3:
                ab = rational_reconstruct(p, s, bounds[1], bounds[0])
                if ab is not None and (ab[1] * s - ab[0]) % p == 0:
                    fitted, witness = C, ab
                    break
            else:
                rel = find_small_relation(p, s, nu, bounds)
                if rel is not None:
                    fitted, witness = C, rel
                    break
    return CommonSolsReport(p, s, nu, h, count, threshold, met, fitted, witness)


def linear_congruence_hits(p: int, s: int, h: int, j_start: int, H: int) -> int:
    """``#{(x, y) : x in [1, h], y in [j_start, j_start + H), y = s x (mod p)}`` for ``H <= p``."""
    xs = np.arange(1, h + 1, dtype=np.int64)
    return int(np.count_nonzero((s * xs - j_start) % p < H))



def max_linear_congruence_hits(p: int, s: int, h: int, H: int) -> int:
    """Largest :func:`linear_congruence_hits` over every start ``j`` modulo ``p``."""
    if not 1 <= H <= p:
        raise ValueError("need 1 <= H <= p")
    hist = np.bincount(s * np.arange(1, h + 1, dtype=np.int64) % p, minlength=p)
    csum = np.concatenate(([0], np.cumsum(np.concatenate((hist, hist[: H - 1])))))
    return int(np.max(csum[H : H + p] - csum[:p]))
