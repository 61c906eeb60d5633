"""Exact solution counts for multiplicative congruences with variables in short intervals.

Two independent exact routes are provided for ``K_nu(p, h, s)``:

* product hashing in the residue domain (:func:`count_K_bruteforce`), which
  tallies the multiset of products ``prod (x_i + s_i) mod p`` directly;
* convolution on the index group ``Z/(p-1)`` (:func:`count_K_convolution`),
  which pushes each interval through the discrete logarithm and convolves.

All counters return Python ints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from sympy import isprime

from ._exact import cyclic_convolve
from .modular import mult_order, prime_context, sieve_primes

# Above this many tuples the int64 accumulators could overflow.
_INT64_SAFE = 2**62
# Crossover from product hashing to index convolution (measured on desk primes).
CROSSOVER_FACTOR = 8
# Literal tuple enumeration is used while the tuple count stays below this.
_ENUM_LIMIT = 1 << 16
# Cap on the (factors x p) gather matrix built by one folding step.
_GATHER_CELLS = 1 << 20


@dataclass(frozen=True)
class Interval:
    """``length`` consecutive integers starting at ``start``."""

    start: int
    length: int

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("interval length must be >= 0")

    @classmethod
    def closed(cls, lo: int, hi: int) -> "Interval":
        return cls(lo, max(0, hi - lo + 1))

    @property
    def stop(self) -> int:
        return self.start + self.length

    def values(self) -> range:
        return range(self.start, self.stop)

    def residues(self, p: int) -> np.ndarray:
        if self.length > p:
            raise ValueError(f"interval of length {self.length} wraps modulo p={p}")
        return np.arange(self.start, self.stop, dtype=np.int64) % p

    def count_congruent(self, r: int, m: int) -> int:
        """How many members are ``= r (mod m)``."""
        if self.length == 0:
            return 0
        hi = self.stop - 1
        return (hi - r) // m - (self.start - 1 - r) // m


@dataclass(frozen=True)
class CongruenceInstance:
    p: int
    nu: int
    h: int
    shifts: tuple[int, ...]

    def __post_init__(self):
        if not isprime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.nu < 1:
            raise ValueError("nu must be >= 1")
        if not 1 <= self.h <= self.p - 1:
            raise ValueError(f"h={self.h} outside [1, p-1] for p={self.p}")
        if len(self.shifts) != self.nu:
            raise ValueError("need exactly nu shifts")
        if any(not 0 <= s < self.p for s in self.shifts):
            raise ValueError("shifts must lie in [0, p-1]")

    @classmethod
    def uniform(cls, p: int, nu: int, h: int, s: int) -> "CongruenceInstance":
        return cls(p, nu, h, (s % p,) * nu)

    @property
    def is_uniform(self) -> bool:
        return len(set(self.shifts)) == 1


def _shifted(p: int, h: int, s: int) -> np.ndarray:
    return (np.arange(1, h + 1, dtype=np.int64) + s) % p


def _dtype_for(total: int):
    return np.int64 if total < _INT64_SAFE else object


def _fold(hist: np.ndarray, factors: np.ndarray, p: int) -> np.ndarray:
    """Histogram of ``r * a`` for ``r ~ hist`` and ``a`` running over ``factors``."""
    inv = prime_context(p).inv
    nonzero = factors[factors != 0]
    zeros = len(factors) - len(nonzero)
    vals, mult = np.unique(nonzero, return_counts=True)
    lam = np.arange(p, dtype=np.int64)
    out = np.zeros(p, dtype=hist.dtype)
    chunk = max(1, _GATHER_CELLS // p)
    for lo in range(0, len(vals), chunk):
        inv_a = inv[vals[lo : lo + chunk]]
        idx = lam[None, :] * inv_a[:, None] % p
        block = hist[idx]
        m = mult[lo : lo + chunk]
        if np.all(m == 1):
            out += block.sum(axis=0)
        else:
            out += (block * m.astype(hist.dtype)[:, None]).sum(axis=0)
    if zeros:
        out[0] += zeros * hist.sum()
    return out


def product_histogram(p: int, factor_lists: Sequence[np.ndarray]) -> np.ndarray:
    """Residue histogram of ``prod_j a_j`` with ``a_j`` drawn from ``factor_lists[j]``.

    Entry ``0`` counts the tuples whose product vanishes mod ``p``.
    """
    sizes = [len(f) for f in factor_lists]
    total = math.prod(sizes)
    dtype = _dtype_for(total)
    if total <= _ENUM_LIMIT:
        prods = np.ones(1, dtype=np.int64)
        for f in factor_lists:
            prods = np.multiply.outer(prods, np.asarray(f, dtype=np.int64)).ravel() % p
        return np.bincount(prods, minlength=p).astype(dtype)
    hist = np.bincount(np.asarray(factor_lists[0], dtype=np.int64), minlength=p).astype(dtype)
    for f in factor_lists[1:]:
        hist = _fold(hist, np.asarray(f, dtype=np.int64), p)
    return hist


def _sum_squares(values: np.ndarray) -> int:
    if values.dtype == object or int(values.sum()) >= 1 << 31:
        return sum(int(v) * int(v) for v in values)
    return int(np.dot(values, values))


def count_K_bruteforce(inst: CongruenceInstance) -> int:
    """Number of ``2 nu``-tuples in ``[1, h]`` with equal nonzero shifted products."""
    hist = product_histogram(inst.p, [_shifted(inst.p, inst.h, s) for s in inst.shifts])
    return _sum_squares(hist[1:])


def index_histogram(p: int, h: int, s: int) -> np.ndarray:
    """``c[e] = #{x in [1, h] : x + s != 0, ind(x + s) = e}`` on ``Z/(p-1)``."""
    ctx = prime_context(p)
    idx = ctx.ind[_shifted(p, h, s)]
    return np.bincount(idx[idx >= 0], minlength=p - 1).astype(np.int64)


def count_K_convolution(inst: CongruenceInstance) -> int:
    """Same count as :func:`count_K_bruteforce` via convolution on the index group."""
    dtype = _dtype_for(inst.h**inst.nu)
    acc = None
    for s in inst.shifts:
        c = index_histogram(inst.p, inst.h, s).astype(dtype)
        acc = c if acc is None else cyclic_convolve(acc, c)
    return _sum_squares(acc)


def count_K(inst: CongruenceInstance) -> int:
    """Dispatching exact ``K``: hashing for small ``h^nu``, convolution otherwise."""
    if inst.h**inst.nu <= CROSSOVER_FACTOR * inst.p:
        return count_K_bruteforce(inst)
    return count_K_convolution(inst)


@lru_cache(maxsize=256)
def _prefix_histogram(p: int, h: int, shifts: tuple[int, ...]) -> np.ndarray:
    hist = product_histogram(p, [_shifted(p, h, s) for s in shifts])
    hist.setflags(write=False)
    return hist


def count_J(inst: CongruenceInstance, lam: int) -> int:
    """Number of ``nu``-tuples in ``[1, h]`` with ``prod (x_i + s_i) = lam (mod p)``."""
    p = inst.p
    lam %= p
    if lam == 0:
        raise ValueError("lambda must be a unit mod p")
    last = _shifted(p, inst.h, inst.shifts[-1])
    last = last[last != 0]
    if inst.nu == 1:
        return int(np.count_nonzero(last == lam))
    prefix = _prefix_histogram(p, inst.h, inst.shifts[:-1])
    inv = prime_context(p).inv
    return int(sum(int(prefix[lam * int(inv[a]) % p]) for a in last))


def J_distribution(inst: CongruenceInstance) -> np.ndarray:
    """``J(lam)`` for every residue ``lam`` (index 0 counts vanishing products)."""
    return product_histogram(inst.p, [_shifted(inst.p, inst.h, s) for s in inst.shifts])


@dataclass(frozen=True)
class HolderCheck:
    lhs: int
    rhs: float
    factors: tuple[int, ...]
    holds: bool


def check_kss_holder(inst: CongruenceInstance) -> HolderCheck:
    """Compare ``K(s_vec)`` with the geometric mean of the uniform-shift counts.

    ``holds`` is decided exactly as ``lhs^nu <= prod K(s_j)``.
    """
    lhs = count_K(inst)
    factors = tuple(_uniform_K(inst.p, inst.nu, inst.h, s) for s in inst.shifts)
    prod = math.prod(factors)
    if prod == 0:
        rhs = 0.0
    else:
        rhs = math.exp(sum(math.log(f) for f in factors) / inst.nu)
    return HolderCheck(lhs, rhs, factors, lhs**inst.nu <= prod)


@lru_cache(maxsize=4096)
def _uniform_K(p: int, nu: int, h: int, s: int) -> int:
    return count_K(CongruenceInstance.uniform(p, nu, h, s))


def count_subset_energy(p: int, xs: Iterable[int], s: int) -> int:
    """Quadruples in ``X^4`` with ``(x1+s)(x2+s) = (y1+s)(y2+s) != 0 (mod p)``."""
    xs = sorted(set(int(x) for x in xs))
    if not xs:
        raise ValueError("X must be nonempty")
    if xs[0] < 1 or xs[-1] > p - 1:
        raise ValueError("X must lie in [1, p-1]")
    f = (np.array(xs, dtype=np.int64) + s) % p
    hist = product_histogram(p, [f, f])
    return _sum_squares(hist[1:])


def count_interval_energy(p: int, interval: Interval, ys: Iterable[int]) -> int:
    """Solutions of ``x1 y1 = x2 y2 (mod p)`` with ``x`` in the interval, ``y`` in the set."""
    ys = np.array(sorted(set(int(y) for y in ys)), dtype=np.int64)
    if np.any(ys % p == 0):
        raise ValueError("the set Y must avoid 0 mod p")
    hist = product_histogram(p, [interval.residues(p), ys % p])
    return _sum_squares(hist)


def count_xyz(p: int, s: int, X: float, Y: float, Z: float, check_hypothesis: bool = True) -> int:
    """Solutions of ``x2 z2 (s + x1 y1) = x1 z1 (s + x2 y2) (mod p)``.

    Variables range over ``x in [1, X]``, ``y in [1, Y]`` and primes ``z`` in
    ``(Z/2, Z]``. Each triple ``(x, y, z)`` is mapped to the point
    ``(x z : s + x y)`` of the projective line; two triples solve the
    congruence iff their points agree or one of them is the zero vector.
    """
    s %= p
    if s == 0:
        raise ValueError("s must be nonzero mod p")
    if check_hypothesis and not (2 <= Z <= Y and X >= 1):
        raise ValueError("need X >= 1 and 2 <= Z <= Y")
    xs = np.arange(1, math.floor(X) + 1, dtype=np.int64)
    ys = np.arange(1, math.floor(Y) + 1, dtype=np.int64)
    zs = np.array([q for q in sieve_primes(math.floor(Z)) if q > Z / 2], dtype=np.int64)
    if len(xs) == 0 or len(ys) == 0 or len(zs) == 0:
        return 0
    inv = prime_context(p).inv
    u = (xs[:, None, None] * zs[None, None, :]) % p + 0 * ys[None, :, None]
    w = (s + xs[:, None, None] * ys[None, :, None]) % p + 0 * zs[None, None, :]
    u, w = u.ravel(), w.ravel()
    zero = (u == 0) & (w == 0)
    n_zero = int(zero.sum())
    u, w = u[~zero], w[~zero]
    key = np.where(u == 0, p, w * inv[u] % p)
    classes = np.bincount(key, minlength=p + 1)
    total = len(zero)
    return _sum_squares(classes) + 2 * n_zero * total - n_zero * n_zero


@dataclass(frozen=True)
class ExpCurveCount:
    by_z: int
    by_x: int


def count_exp_curve_paths(p: int, g: int, a: int, i1: Interval, i2: Interval) -> ExpCurveCount:
    """Both evaluations of ``#{(x, z) in I1 x I2 : x = a g^z (mod p)}``."""
    ctx = prime_context(p)
    a %= p
    g %= p
    if a == 0:
        raise ValueError("a must be a unit mod p")
    t = mult_order(g, p)
    if i2.length > t:
        raise ValueError(f"h2={i2.length} exceeds the order t={t} of g")
    if i1.length > p:
        raise ValueError(f"interval of length {i1.length} wraps modulo p={p}")

    by_z = sum(i1.count_congruent(a * pow(g, z, p) % p, p) for z in i2.values())

    n = p - 1
    ind_g = ctx.index(g)
    d = math.gcd(ind_g, n)
    step_inv = pow(ind_g // d, -1, t) if t > 1 else 0
    inv_a = pow(a, -1, p)
    by_x = 0
    for x in i1.values():
        r = x % p
        if r == 0:
            continue
        e = int(ctx.ind[r * inv_a % p])
        if e % d:
            continue
        z0 = (e // d) * step_inv % t
        by_x += i2.count_congruent(z0, t)
    return ExpCurveCount(by_z, by_x)


def count_exp_curve(p: int, g: int, a: int, i1: Interval, i2: Interval) -> int:
    paths = count_exp_curve_paths(p, g, a, i1, i2)
    if paths.by_z != paths.by_x:
        raise RuntimeError(f"exponential-curve loops disagree: {paths}")
    return paths.by_z


def product_set_size(p: int, h: int, s: int, nu: int) -> int:
    """``#{prod a_i mod p : a_i in {x + s : 1 <= x <= h}}``."""
    if nu < 1:
        raise ValueError("nu must be >= 1")
    if not 1 <= h <= p - 1:
        raise ValueError("need 1 <= h <= p - 1")
    base = np.unique(_shifted(p, h, s))
    reach = np.zeros(p, dtype=bool)
    reach[base] = True
    for _ in range(nu - 1):
        cur = np.flatnonzero(reach)
        nxt = np.zeros(p, dtype=bool)
        nxt[(cur[:, None] * base[None, :] % p).ravel()] = True
        reach = nxt
    return int(reach.sum())


def nu_distribution(p: int, a_interval: Interval, bs: Iterable[int]) -> np.ndarray:
    """``nu(u)`` for all ``u``: solutions of ``a (b1 - b2)^{-1} = u`` with ``b1 != b2 (mod p)``."""
    bs = np.array(sorted(set(int(b) for b in bs)), dtype=np.int64)
    if len(bs) < 2:
        raise ValueError("B needs at least two elements")
    diff = (bs[:, None] - bs[None, :]).ravel() % p
    diff = diff[diff != 0]
    if len(diff) == 0:
        raise ValueError("all elements of B are congruent mod p")
    inv = prime_context(p).inv
    a = np.arange(a_interval.start, a_interval.stop, dtype=np.int64) % p
    u = (a[:, None] * inv[diff][None, :]).ravel() % p
    return np.bincount(u, minlength=p).astype(np.int64)


def nu_statistic(p: int, a_interval: Interval, bs: Iterable[int], u: int) -> int:
    return int(nu_distribution(p, a_interval, bs)[u % p])


def nu_second_moment(p: int, a_interval: Interval, bs: Iterable[int]) -> int:
    return _sum_squares(nu_distribution(p, a_interval, bs))
