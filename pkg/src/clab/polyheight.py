"""Integer polynomials: circulant selection sums, resultants, heights and Mahler measure."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from sympy import integer_nthroot

from ._exact import bareiss_det

SELECTION_GUARD = 10


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, leading coefficient first; ``()`` is the zero polynomial."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = [int(x) for x in self.coeffs]
        while c and c[0] == 0:
            c.pop(0)
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_roots(cls, roots: Iterable[int], lead: int = 1) -> "IntPolynomial":
        out = cls((lead,))
        for r in roots:
            out = out * cls((1, -r))
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> int:
        return self.coeffs[0] if self.coeffs else 0

    def padded(self, length: int) -> tuple[int, ...]:
        if len(self.coeffs) > length:
            raise ValueError("polynomial longer than requested padding")
        return (0,) * (length - len(self.coeffs)) + self.coeffs

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial(tuple(a + b for a, b in zip(self.padded(n), other.padded(n))))

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(tuple(-a for a in self.coeffs))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        if self.is_zero or other.is_zero:
            return IntPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPolynomial(tuple(out))

    def __call__(self, x):
        acc = 0
        for c in self.coeffs:
            acc = acc * x + c
        return acc

    def eval_mod(self, x: int, p: int) -> int:
        acc = 0
        for c in self.coeffs:
            acc = (acc * x + c) % p
        return acc

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        d = self.degree
        terms = []
        for i, c in enumerate(self.coeffs):
            e = d - i
            if c == 0:
                continue
            mono = "" if e == 0 else ("Z" if e == 1 else f"Z^{e}")
            mag = abs(c)
            body = f"{mag}" if not mono else (mono if mag == 1 else f"{mag}*{mono}")
            terms.append(("-" if c < 0 else "+", body))
        head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        return head + "".join(f" {s} {b}" for s, b in terms[1:])


# --- rational polynomial helpers (lists of Fractions, leading first) ---


def _strip(c: list) -> list:
    i = 0
    while i < len(c) and c[i] == 0:
        i += 1
    return c[i:]


def _divmod_q(num: Sequence, den: Sequence) -> tuple[list[Fraction], list[Fraction]]:
    num = _strip([Fraction(x) for x in num])
    den = _strip([Fraction(x) for x in den])
    if not den:
        raise ZeroDivisionError("division by the zero polynomial")
    if len(num) < len(den):
        return [], num
    q = [Fraction(0)] * (len(num) - len(den) + 1)
    r = list(num)
    for i in range(len(q)):
        f = r[i] / den[0]
        q[i] = f
        for j, d in enumerate(den):
            r[i + j] -= f * d
    return _strip(q), _strip(r[len(q):])


def _gcd_q(a: Sequence, b: Sequence) -> list[Fraction]:
    a = _strip([Fraction(x) for x in a])
    b = _strip([Fraction(x) for x in b])
    while b:
        a, b = b, _divmod_q(a, b)[1]
    return [x / a[0] for x in a] if a else []


def _derivative(c: Sequence) -> list:
    d = len(c) - 1
    return [x * (d - i) for i, x in enumerate(c[:-1])]


def squarefree_decomposition(P: IntPolynomial) -> list[tuple[list[Fraction], int]]:
    """Yun's algorithm over Q: monic squarefree ``f_k`` with ``P = lead * prod f_k^k``."""
    if P.degree < 1:
        return []
    f = [Fraction(x, P.lead) for x in P.coeffs]
    out = []
    a = _gcd_q(f, _derivative(f))
    b = _divmod_q(f, a)[0]
    c = _divmod_q(_derivative(f), a)[0]
    d = [x - y for x, y in zip(_pad(c, len(b) - 1), _pad(_derivative(b), len(b) - 1))]
    k = 1
    while len(b) > 1:
        g = _gcd_q(b, d)
        if len(g) > 1:
            out.append((g, k))
        b = _divmod_q(b, g)[0]
        c = _divmod_q(d, g)[0]
        d = [x - y for x, y in zip(_pad(c, len(b) - 1), _pad(_derivative(b), len(b) - 1))]
        k += 1
    return out


def _pad(c: Sequence, length: int) -> list:
    c = list(c)
    return [Fraction(0)] * (length - len(c)) + c


# --- circulant selections ---


def sigma_formula(m: int, n: int, sigma, theta) -> Fraction:
    """``(m - 1 + sigma)(n - 1 + theta) - sigma theta``."""
    if m < 2 or n < 2:
        raise ValueError("m and n must be >= 2")
    sigma, theta = Fraction(sigma), Fraction(theta)
    return (m - 1 + sigma) * (n - 1 + theta) - sigma * theta


@dataclass(frozen=True)
class CirculantStack:
    """The square stack of two banded blocks with their marked positions.

    The top block has ``n - 1`` rows, row ``i`` carrying ``sigma + (j - i)``
    in columns ``i <= j <= i + m - 1``; the bottom block has ``m - 1`` rows
    built the same way from ``(n, theta)``.
    """

    m: int
    n: int
    sigma: Fraction
    theta: Fraction

    def __post_init__(self):
        if self.m < 2 or self.n < 2:
            raise ValueError("m and n must be >= 2")
        object.__setattr__(self, "sigma", Fraction(self.sigma))
        object.__setattr__(self, "theta", Fraction(self.theta))

    @property
    def size(self) -> int:
        return self.m + self.n - 2

    def marks(self) -> list[list[int]]:
        """Marked column indices per row (0-based)."""
        rows = [list(range(i, i + self.m)) for i in range(self.n - 1)]
        rows += [list(range(i, i + self.n)) for i in range(self.m - 1)]
        return rows

    def entry(self, i: int, j: int) -> Fraction:
        if i < self.n - 1:
            off = j - i
            return self.sigma + off if 0 <= off < self.m else Fraction(0)
        k = i - (self.n - 1)
        off = j - k
        return self.theta + off if 0 <= off < self.n else Fraction(0)

    def matrix(self) -> list[list[Fraction]]:
        return [[self.entry(i, j) for j in range(self.size)] for i in range(self.size)]


def selection_sums(stack: CirculantStack) -> set[Fraction]:
    """Sums over every row/column-transversal that uses marked cells only."""
    if stack.size > SELECTION_GUARD:
        raise ValueError(f"stack of size {stack.size} exceeds the enumeration guard {SELECTION_GUARD}")
    marks = stack.marks()
    sums: set[Fraction] = set()
    used = [False] * stack.size

    def walk(i: int, acc: Fraction):
        if i == stack.size:
            sums.add(acc)
            return
        for j in marks[i]:
            if not used[j]:
                used[j] = True
                walk(i + 1, acc + stack.entry(i, j))
                used[j] = False

    walk(0, Fraction(0))
    return sums


def sigma_conditions(sigma, theta) -> tuple[bool, bool, bool]:
    """Which of ``sigma >= 0``, ``theta >= 0``, ``sigma + theta >= -1`` hold."""
    sigma, theta = Fraction(sigma), Fraction(theta)
    return sigma >= 0, theta >= 0, sigma + theta >= -1


@dataclass(frozen=True)
class SigmaComparison:
    big: Fraction
    small: Fraction
    applicable: bool
    holds: bool


def compare_sigma(M: int, N: int, m: int, n: int, sigma, theta) -> SigmaComparison:
    """``Sigma(M, N, sigma, theta)`` against ``Sigma(m, n, sigma + M - m, theta + N - n)``."""
    sigma, theta = Fraction(sigma), Fraction(theta)
    if not (M >= m >= 2 and N >= n >= 2):
        raise ValueError("need M >= m >= 2 and N >= n >= 2")
    big = sigma_formula(M, N, sigma, theta)
    small = sigma_formula(m, n, sigma + M - m, theta + N - n)
    applicable = sigma + M - m >= 0 and theta + N - n >= 0 and any(sigma_conditions(sigma, theta))
    return SigmaComparison(big, small, applicable, big >= small)


# --- resultants ---


def sylvester_matrix(P: IntPolynomial, Q: IntPolynomial) -> list[list[int]]:
    dp, dq = P.degree, Q.degree
    size = dp + dq
    rows = []
    for i in range(dq):
        rows.append([0] * i + list(P.coeffs) + [0] * (size - dp - 1 - i))
    for i in range(dp):
        rows.append([0] * i + list(Q.coeffs) + [0] * (size - dq - 1 - i))
    return rows


def sylvester_resultant(P: IntPolynomial, Q: IntPolynomial) -> int:
    if P.degree < 1 or Q.degree < 1:
        raise ValueError("resultant needs two nonconstant polynomials")
    return bareiss_det(sylvester_matrix(P, Q))


def _within_power(x: int, H: Fraction, e: Fraction) -> bool:
    """Exact test of ``|x| <= H^e`` for rational ``H >= 1`` and rational ``e``."""
    x = abs(x)
    if x == 0:
        return True
    if e < 0:
        return False
    u, q = e.numerator, e.denominator
    return Fraction(x) ** q <= H**u


def power_floor(H, e) -> int:
    """``floor(H^e)`` for rational ``H >= 1`` and rational ``e``, computed exactly."""
    H, e = Fraction(H), Fraction(e)
    if e < 0:
        return 1 if H == 1 else 0
    t = H**e.numerator
    return integer_nthroot(t.numerator // t.denominator, e.denominator)[0]


def random_bound_pair(rng: np.random.Generator, M: int, N: int, H, sigma, theta) -> tuple[IntPolynomial, IntPolynomial]:
    """Uniform coefficients in ``[-floor(H^(i+sigma)), floor(H^(i+sigma))]``, resampled until both are nonconstant."""
    caps_a = [power_floor(H, i + Fraction(sigma)) for i in range(M)]
    caps_b = [power_floor(H, i + Fraction(theta)) for i in range(N)]
    if not any(caps_a[:-1]) or not any(caps_b[:-1]):
        raise ValueError("the coefficient caps force a constant polynomial")

    def draw(caps):
        while True:
            P = IntPolynomial(tuple(int(rng.integers(-c, c + 1)) for c in caps))
            if P.degree >= 1:
                return P

    return draw(caps_a), draw(caps_b)


@dataclass(frozen=True)
class ResultantBound:
    resultant: int
    sigma_value: Fraction
    log_lhs: float
    log_rhs: float
    ratio: float


def resultant_bound_check(P1: IntPolynomial, P2: IntPolynomial, H, M: int, N: int, sigma, theta) -> ResultantBound:
    """|Res(P1, P2)| against ``H^Sigma(M, N, sigma, theta)``.

    ``P1`` and ``P2`` are read as length-``M`` and length-``N`` coefficient
    lists ``a``, ``b`` (leading first, padded with zeros) and must satisfy
    ``|a_i| <= H^(i + sigma)`` and ``|b_i| <= H^(i + theta)``.
    """
    H, sigma, theta = Fraction(H), Fraction(sigma), Fraction(theta)
    if H < 1:
        raise ValueError("H must be >= 1")
    a, b = P1.padded(M), P2.padded(N)
    if not any(sigma_conditions(sigma, theta)):
        raise ValueError("none of sigma >= 0, theta >= 0, sigma + theta >= -1 holds")
    for i, x in enumerate(a):
        if not _within_power(x, H, i + sigma):
            raise ValueError(f"|a_{i}| = {abs(x)} violates |a_i| <= H^(i + sigma)")
    for i, x in enumerate(b):
        if not _within_power(x, H, i + theta):
            raise ValueError(f"|b_{i}| = {abs(x)} violates |b_i| <= H^(i + theta)")
    res = sylvester_resultant(P1, P2)
    sig = sigma_formula(M, N, sigma, theta)
    log_rhs = float(sig) * math.log(H)
    log_lhs = math.log(abs(res)) if res else -math.inf
    return ResultantBound(res, sig, log_lhs, log_rhs, math.exp(log_lhs - log_rhs))


# --- heights and Mahler measure ---


def log_height(P: IntPolynomial) -> float:
    if P.is_zero:
        raise ValueError("the zero polynomial has no height")
    return math.log(max(abs(c) for c in P.coeffs))


class RootFindingError(ArithmeticError):
    pass


def aberth_roots(coeffs: Sequence[float], tol: float = 1e-8, max_iter: int = 200) -> np.ndarray:
    """All complex roots by Aberth-Ehrlich simultaneous iteration."""
    c = np.asarray(coeffs, dtype=complex)
    c = c / c[0]
    d = len(c) - 1
    if d < 1:
        return np.zeros(0, dtype=complex)
    if d == 1:
        return np.array([-c[1]])
    dc = c[:-1] * np.arange(d, 0, -1)
    radius = max(abs(c[-1]) ** (1.0 / d), 1e-3)
    z = radius * np.exp(1j * (2 * np.pi * np.arange(d) / d + 0.4))
    step = np.inf
    for _ in range(max_iter):
        pz = np.polyval(c, z)
        dpz = np.polyval(dc, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            w = ratio / (1.0 - ratio * inv.sum(axis=1))
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        step = float(np.max(np.abs(w) / np.maximum(1.0, np.abs(z))))
        if step < 1e-3 * tol:
            break
    scale = np.polyval(np.abs(c), np.maximum(1.0, np.abs(z)))
    resid = np.abs(np.polyval(c, z)) / np.maximum(scale, 1e-300)
    if step > tol or np.max(resid) > 1e3 * tol:
        raise RootFindingError(f"root iteration did not converge: step={step:.3g}, residuals={resid}")
    return z


def mahler_measure(P: IntPolynomial, tol: float = 1e-8) -> float:
    """``|lead| * prod max(1, |root|)``, roots counted with multiplicity.

    Roots are computed per squarefree factor, so the iteration only ever
    sees simple roots.
    """
    if P.is_zero:
        raise ValueError("the zero polynomial has no Mahler measure")
    log_m = 0.0
    for f, k in squarefree_decomposition(P):
        roots = aberth_roots([float(x) for x in f], tol)
        log_m += k * float(np.sum(np.log(np.maximum(1.0, np.abs(roots)))))
    return abs(P.lead) * math.exp(log_m)


@dataclass(frozen=True)
class HeightMahlerCheck:
    lower: float
    mahler: float
    upper: float
    holds: bool


def check_height_mahler(P: IntPolynomial, tol: float = 1e-8) -> HeightMahlerCheck:
    """``2^-d e^H(P) <= M(P) <= sqrt(d + 1) e^H(P)``."""
    d = P.degree
    eh = math.exp(log_height(P))
    m = mahler_measure(P, tol)
    lower, upper = eh / 2**d, math.sqrt(d + 1) * eh
    slack = 1 + 10 * tol
    return HeightMahlerCheck(lower, m, upper, lower <= m * slack and m <= upper * slack)


@dataclass(frozen=True)
class ProductHeightCheck:
    delta: float
    envelope: float
    within: bool


def product_height_envelope(d1: int, d2: int) -> float:
    """``ln((d1 + 1)(d2 + 1) 2^(d1 + d2 + 1))``.

    Chaining the height/Mahler inequalities through ``M(Q1 Q2) = M(Q1) M(Q2)``
    gives ``-(d1 + d2) ln 2 - ln(d1 + d2 + 1)/2 <= delta <= (d1 + d2) ln 2 +
    ln((d1 + 1)(d2 + 1))/2``; this envelope dominates both sides.
    """
    return math.log((d1 + 1) * (d2 + 1)) + (d1 + d2 + 1) * math.log(2)


def check_product_height(Q1: IntPolynomial, Q2: IntPolynomial) -> ProductHeightCheck:
    if Q1.is_zero or Q2.is_zero:
        raise ValueError("both polynomials must be nonzero")
    delta = log_height(Q1 * Q2) - log_height(Q1) - log_height(Q2)
    env = product_height_envelope(Q1.degree, Q2.degree)
    return ProductHeightCheck(delta, env, abs(delta) <= env)


@dataclass(frozen=True)
class FactorCoeffCheck:
    c_prime: Fraction
    cofactor: tuple[Fraction, ...]


def check_factor_coeffs(P: IntPolynomial, P1: IntPolynomial, A, h) -> FactorCoeffCheck:
    """Least ``C'`` with ``|v_j| <= C' A h^j`` for the coefficients ``v_j`` of a factor ``P1``.

    Requires ``P1 | P`` and ``|u_j| <= A h^j`` for the coefficients of ``P``.
    """
    A, h = Fraction(A), Fraction(h)
    if A <= 0 or h <= 0:
        raise ValueError("A and h must be positive")
    if P.is_zero or P1.is_zero:
        raise ValueError("polynomials must be nonzero")
    for j, u in enumerate(P.coeffs):
        if abs(u) > A * h**j:
            raise ValueError(f"|u_{j}| = {abs(u)} exceeds A h^{j} = {A * h**j}")
    q, r = _divmod_q(P.coeffs, P1.coeffs)
    if r:
        raise ValueError("P1 does not divide P")
    c = max(Fraction(abs(v)) / (A * h**j) for j, v in enumerate(P1.coeffs))
    return FactorCoeffCheck(c, tuple(q))


def poly_from_solution(xs: Sequence[int], ys: Sequence[int]) -> IntPolynomial:
    """``prod (Z + x_i) - prod (Z + y_i)``."""
    if len(xs) != len(ys):
        raise ValueError("tuples must have equal length")
    if not xs:
        raise ValueError("tuples must be nonempty")
    P = IntPolynomial.from_roots([-x for x in xs])
    Q = IntPolynomial.from_roots([-y for y in ys])
    return P - Q


def solution_poly_within_bounds(R: IntPolynomial, nu: int, h: int) -> bool:
    """``R = A_1 Z^(nu-1) + ... + A_nu`` with ``|A_i| <= 2^nu h^i``."""
    coeffs = R.padded(nu)
    return all(abs(a) <= 2**nu * h**i for i, a in enumerate(coeffs, 1))
