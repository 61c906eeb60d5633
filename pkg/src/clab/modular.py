"""Arithmetic modulo a prime: primitive roots, index tables, characters, divisor functions.

Everything downstream evaluates characters through exact exponents
``k * ind(x) mod (p - 1)``; complex values only appear at display time or in
the floating character sums.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from sympy import factorint, isprime

DESK_LIMIT = 2**31


def sieve_primes(limit: int) -> list[int]:
    """Primes ``<= limit`` in ascending order (empty for ``limit < 2``)."""
    if limit < 2:
        return []
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for q in range(2, math.isqrt(limit) + 1):
        if flags[q]:
            flags[q * q :: q] = False
    return np.flatnonzero(flags).tolist()


def _check_prime(p: int) -> None:
    if p >= DESK_LIMIT:
        raise ValueError(f"p={p} exceeds the desk-scale limit 2^31")
    if not isprime(p):
        raise ValueError(f"p={p} is not prime")


def mult_order(g: int, p: int) -> int:
    """Least ``t >= 1`` with ``g^t = 1 (mod p)``."""
    g %= p
    if g == 0:
        raise ValueError("g = 0 (mod p) has no multiplicative order")
    t = p - 1
    for q, e in factorint(p - 1).items():
        for _ in range(e):
            if pow(g, t // q, p) == 1:
                t //= q
            else:
                break
    return t


def smallest_primitive_root(p: int, factors: dict[int, int] | None = None) -> int:
    if p == 2:
        return 1
    factors = factors if factors is not None else factorint(p - 1)
    g = 2
    while any(pow(g, (p - 1) // q, p) == 1 for q in factors):
        g += 1
    return g


@dataclass(frozen=True)
class PrimeContext:
    """A prime together with its smallest primitive root and discrete-log tables.

    ``ind`` has length ``p`` with ``ind[0] = -1`` as a sentinel; ``exp`` has
    length ``p - 1`` and satisfies ``exp[ind[x]] == x``. Both are built on first
    use and never mutated afterwards.
    """

    p: int
    g: int
    factorization: tuple[tuple[int, int], ...] = field(repr=False)

    @property
    def order(self) -> int:
        return self.p - 1

    @cached_property
    def exp(self) -> np.ndarray:
        p, n = self.p, self.p - 1
        block = max(1, math.isqrt(n))
        head = np.empty(block, dtype=np.int64)
        acc = 1
        for i in range(block):
            head[i] = acc
            acc = acc * self.g % p
        step = acc  # g^block
        out = np.empty(n, dtype=np.int64)
        mult = 1
        for start in range(0, n, block):
            stop = min(n, start + block)
            out[start:stop] = head[: stop - start] * mult % p
            mult = mult * step % p
        out.setflags(write=False)
        return out

    @cached_property
    def ind(self) -> np.ndarray:
        out = np.full(self.p, -1, dtype=np.int64)
        out[self.exp] = np.arange(self.p - 1, dtype=np.int64)
        out.setflags(write=False)
        return out

    @cached_property
    def inv(self) -> np.ndarray:
        """Modular inverses, ``inv[0] = 0``."""
        n = self.p - 1
        out = np.zeros(self.p, dtype=np.int64)
        idx = self.ind[1:]
        out[1:] = self.exp[(n - idx) % n]
        out.setflags(write=False)
        return out

    def index(self, x: int) -> int:
        x %= self.p
        if x == 0:
            raise ValueError("0 has no index")
        return int(self.ind[x])


def build_prime_context(p: int) -> PrimeContext:
    _check_prime(p)
    factors = factorint(p - 1)
    g = smallest_primitive_root(p, factors)
    return PrimeContext(p=p, g=g, factorization=tuple(sorted(factors.items())))


_CONTEXTS: dict[int, PrimeContext] = {}


def prime_context(p: int) -> PrimeContext:
    """Memoised :func:`build_prime_context` (contexts are immutable)."""
    ctx = _CONTEXTS.get(p)
    if ctx is None:
        ctx = _CONTEXTS[p] = build_prime_context(p)
    return ctx


def quadratic_k(ctx: PrimeContext) -> int:
    if ctx.p == 2:
        raise ValueError("no quadratic character mod 2")
    return (ctx.p - 1) // 2


def character_exponent(ctx: PrimeContext, k: int, x: int) -> int | None:
    """Exponent ``e`` with ``chi_k(x) = exp(2 pi i e / (p - 1))``; ``None`` for ``x = 0``."""
    x %= ctx.p
    if x == 0:
        return None
    return k * int(ctx.ind[x]) % (ctx.p - 1)


def character_exponents(ctx: PrimeContext, k: int, xs) -> np.ndarray:
    """Vectorised :func:`character_exponent`; zero residues map to ``-1``."""
    xs = np.asarray(xs, dtype=np.int64) % ctx.p
    idx = ctx.ind[xs]
    return np.where(idx < 0, -1, (k % (ctx.p - 1)) * idx % (ctx.p - 1))


def root_of_unity(e: int, n: int) -> complex:
    return cmath.exp(2j * math.pi * e / n)


def character_value(ctx: PrimeContext, k: int, x: int) -> complex:
    e = character_exponent(ctx, k, x)
    return 0j if e is None else root_of_unity(e, ctx.p - 1)


def divisor_tau(n: int) -> int:
    if n <= 0:
        raise ValueError("tau is defined for positive integers")
    return math.prod(e + 1 for e in factorint(n).values())


def divisor_tau_k(n: int, k: int) -> int:
    """Number of ordered ``k``-tuples of positive integers with product ``n``."""
    if n <= 0:
        raise ValueError("tau_k is defined for positive integers")
    if k < 1:
        raise ValueError("k must be >= 1")
    return math.prod(math.comb(e + k - 1, k - 1) for e in factorint(n).values())


def tau_table(limit: int) -> np.ndarray:
    """``tau(n)`` for ``0 <= n <= limit`` (entry 0 is 0)."""
    out = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        out[d::d] += 1
    return out
