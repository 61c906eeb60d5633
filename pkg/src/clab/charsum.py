"""Multiplicative character sums: double sums over sets and divisor-weighted sums.

Sums are accumulated per residue first and only then weighted by the
character, so the quadratic and principal characters stay in exact integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._exact import cyclic_convolve
from .modular import PrimeContext, character_exponents, prime_context, tau_table


@dataclass(frozen=True)
class SumResult:
    """``value`` is an ``int`` for the principal or quadratic character, ``complex`` otherwise."""

    value: int | complex
    term_count: int
    trivial_bound: int
    principal: bool

    @property
    def saving(self) -> float:
        return abs(self.value) / self.trivial_bound if self.trivial_bound else 0.0


def _is_exact(ctx: PrimeContext, k: int) -> bool:
    n = ctx.p - 1
    return k % n == 0 or 2 * k % n == 0


def weighted_character_sum(ctx: PrimeContext, k: int, weights: np.ndarray):
    """``sum_r weights[r] chi_k(r)`` for a weight vector indexed by residues ``0..p-1``."""
    n = ctx.p - 1
    e = character_exponents(ctx, k, np.arange(ctx.p))
    nz = e >= 0
    w = weights[nz]
    e = e[nz]
    if _is_exact(ctx, k):
        w = [int(x) for x in w]
        return sum(x if ee == 0 else -x for x, ee in zip(w, e.tolist()))
    hist = np.bincount(e, weights=w.astype(float), minlength=n)
    ang = 2 * math.pi * np.arange(n) / n
    return complex(math.fsum(hist * np.cos(ang)), math.fsum(hist * np.sin(ang)))


def _residue_weights(p: int, values: Iterable[int], weights: Iterable[int] | None = None) -> np.ndarray:
    vals = np.fromiter(values, dtype=np.int64) % p
    if weights is None:
        return np.bincount(vals, minlength=p).astype(np.int64)
    w = np.fromiter(weights, dtype=np.int64)
    out = np.zeros(p, dtype=np.int64)
    np.add.at(out, vals, w)
    return out


def double_sum(ctx: PrimeContext, k: int, A: Sequence[int], B: Sequence[int]) -> SumResult:
    """``sum_{a in A, b in B} chi_k(a + b)``; pairs with ``a + b = 0`` contribute 0."""
    p = ctx.p
    conv = cyclic_convolve(_residue_weights(p, A), _residue_weights(p, B))
    n = len(A) * len(B)
    return SumResult(weighted_character_sum(ctx, k, conv), n, n, k % (p - 1) == 0)


def divisor_sum(ctx: PrimeContext, k: int, a: int, N: int) -> SumResult:
    """``sum_{1 <= n <= N} tau(n) chi_k(a + n)``."""
    if a % ctx.p == 0:
        raise ValueError("a must be coprime to p")
    if N < 1:
        raise ValueError("N must be >= 1")
    tau = tau_table(N)[1:]
    w = _residue_weights(ctx.p, range(a + 1, a + N + 1), tau)
    return SumResult(weighted_character_sum(ctx, k, w), N, int(tau.sum()), k % (ctx.p - 1) == 0)


@dataclass(frozen=True)
class HyperbolaSplit:
    square_part: int | complex
    sigma: int | complex
    recombined: int | complex
    direct: int | complex
    equal: bool


def hyperbola_decompose(ctx: PrimeContext, k: int, a: int, N: int) -> HyperbolaSplit:
    """Split the divisor sum into the diagonal ``n = x^2`` and twice the ``x < y`` triangle."""
    direct = divisor_sum(ctx, k, a, N).value
    p = ctx.p
    x0 = math.isqrt(N)
    sq = weighted_character_sum(ctx, k, _residue_weights(p, (a + x * x for x in range(1, x0 + 1))))
    tri = [a + x * y for x in range(1, x0 + 1) for y in range(x + 1, N // x + 1)]
    sigma = weighted_character_sum(ctx, k, _residue_weights(p, tri))
    recombined = sq + 2 * sigma
    if _is_exact(ctx, k):
        equal = recombined == direct
    else:
        equal = abs(recombined - direct) <= 1e-9 * max(1.0, abs(direct))
    return HyperbolaSplit(sq, sigma, recombined, direct, equal)


@dataclass(frozen=True)
class SavingRow:
    p: int
    regime: str
    param: int
    k: int
    argmax: int
    magnitude: float
    trivial_bound: int
    exponent: float
    principal: bool


def _exponent(mag: float, trivial: int) -> float:
    if mag <= 0:
        return -math.inf
    if trivial <= 1:
        return 0.0
    return math.log(mag) / math.log(trivial)


def double_regime_length(p: int) -> int:
    return math.ceil(p ** 0.45) + 1


def divisor_regime_length(p: int) -> int:
    return math.ceil(p ** (1 / 3)) + 1


def saving_report(
    p_list: Sequence[int],
    regime: str,
    characters: str = "quadratic",
    lengths: Sequence[int] | None = None,
) -> list[SavingRow]:
    """Worst-case savings per prime.

    ``regime="double"`` uses ``A = B = [1, L]`` and maximises over the chosen
    characters; ``regime="divisor"`` maximises over ``a`` in ``1..p-1`` for
    ``N = L``. ``L`` defaults to the regime length and can be swept via
    ``lengths``. ``characters`` is ``quadratic``, ``principal`` or ``all``
    (every non-principal character).
    """
    if regime not in ("double", "divisor"):
        raise ValueError(f"unknown regime {regime!r}")
    rows = []
    for p in sorted(p_list):
        ctx = prime_context(p)
        if characters == "quadratic":
            ks = [(p - 1) // 2]
        elif characters == "principal":
            ks = [0]
        elif characters == "all":
            ks = list(range(1, p - 1))
        else:
            raise ValueError(f"unknown character selection {characters!r}")
        default = double_regime_length(p) if regime == "double" else divisor_regime_length(p)
        for L in sorted(lengths) if lengths else [default]:
            best = None
            for k in ks:
                if regime == "double":
                    r = double_sum(ctx, k, range(1, L + 1), range(1, L + 1))
                    cand = (abs(r.value), k, k, r)
                    best = cand if best is None or cand[0] > best[0] else best
                else:
                    for a in range(1, p):
                        r = divisor_sum(ctx, k, a, L)
                        cand = (abs(r.value), k, a, r)
                        best = cand if best is None or cand[0] > best[0] else best
            mag, k, arg, r = best
            rows.append(SavingRow(p, regime, L, k, arg, float(mag), r.trivial_bound, _exponent(mag, r.trivial_bound), r.principal))
    return rows
