"""Self-check suites grouping the exact identities and effective inequalities."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from .. import charsum, counting, lattice, polyheight
from ..modular import character_exponents, mult_order, prime_context, root_of_unity, sieve_primes
from .sweep import DEFAULT_SIGMA_THETA

SUITES = ("identities", "lattice", "poly", "charsum", "all")


@dataclass
class CheckOutcome:
    name: str
    cases: int = 0
    counterexample: dict | None = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None


@dataclass
class VerifySummary:
    suite: str
    checks: list[CheckOutcome] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def first_counterexample(self) -> str | None:
        for c in self.checks:
            if not c.passed:
                return json.dumps({"check": c.name, **c.counterexample}, default=str)
        return None

    def lines(self) -> list[str]:
        return [f"{'PASS' if c.passed else 'FAIL'} {c.name} ({c.cases} cases)" for c in self.checks]


def _run(name: str, cases: Iterator[dict | None]) -> CheckOutcome:
    """Each yielded ``None`` is a passing case; a dict is the first counterexample."""
    out = CheckOutcome(name)
    for case in cases:
        out.cases += 1
        if case is not None:
            out.counterexample = case
            break
    return out


# --- identities ---


def _oracle_cases(p_max: int, nus=(1, 2, 3)):
    for p in sieve_primes(p_max):
        if p < 5:
            continue
        for nu in nus:
            for h in range(1, p):
                for s in range(p):
                    inst = counting.CongruenceInstance.uniform(p, nu, h, s)
                    a, b = counting.count_K_bruteforce(inst), counting.count_K_convolution(inst)
                    yield None if a == b else {"p": p, "nu": nu, "h": h, "s": s, "bruteforce": a, "convolution": b}


def _moment_cases(p_max: int, nus=(1, 2, 3)):
    for p in sieve_primes(p_max):
        if p < 5:
            continue
        for nu in nus:
            for h in range(1, p):
                for s in range(p):
                    inst = counting.CongruenceInstance.uniform(p, nu, h, s)
                    k = counting.count_K(inst)
                    jd = counting.J_distribution(inst)[1:]
                    m = int(sum(int(x) * int(x) for x in jd))
                    yield None if k == m else {"p": p, "nu": nu, "h": h, "s": s, "K": k, "moment": m}


def _holder_cases(p_max: int):
    for p in sieve_primes(p_max):
        if p < 5:
            continue
        for h in range(1, p):
            for s1 in range(p):
                for s2 in range(p):
                    chk = counting.check_kss_holder(counting.CongruenceInstance(p, 2, h, (s1, s2)))
                    yield None if chk.holds else {"p": p, "h": h, "shifts": (s1, s2), "lhs": chk.lhs, "rhs": chk.rhs}


def expcurve_dual_cases(p_max: int, per_g: int = 4, seed: int = 9):
    """Both summation orders of the exponential-curve count, for every ``g`` of order at least 2."""
    rng = np.random.default_rng(seed)
    for p in sieve_primes(p_max):
        for g in range(2, p):
            t = mult_order(g, p)
            if t < 2:
                continue
            for _ in range(per_g):
                a = int(rng.integers(1, p))
                i1 = counting.Interval(int(rng.integers(-p, p)), int(rng.integers(0, p + 1)))
                i2 = counting.Interval(int(rng.integers(-2 * t, 2 * t)), int(rng.integers(0, t + 1)))
                r = counting.count_exp_curve_paths(p, g, a, i1, i2)
                yield None if r.by_z == r.by_x else {"p": p, "g": g, "a": a, "I1": i1, "I2": i2,
                                                     "by_z": r.by_z, "by_x": r.by_x}


def identities_checks(scale: str = "quick") -> list[CheckOutcome]:
    big = scale == "full"
    return [
        _run("oracle equivalence", _oracle_cases(101 if big else 23)),
        _run("moment identity", _moment_cases(61 if big else 17)),
        _run("Holder bound", _holder_cases(31 if big else 11)),
        _run("exponential curve dual loops", expcurve_dual_cases(101 if big else 23, 20 if big else 4)),
    ]


# --- lattice ---


def random_lattice(rng: np.random.Generator, n: int, entry: int = 6) -> lattice.LatticeBasis:
    while True:
        rows = [tuple(int(x) for x in rng.integers(-entry, entry + 1, size=n)) for _ in range(n)]
        try:
            return lattice.LatticeBasis(tuple(rows))
        except ValueError:
            continue


def random_box(rng: np.random.Generator, n: int) -> lattice.Box:
    return lattice.Box(tuple(Fraction(int(rng.integers(1, 25)), int(rng.integers(1, 5))) for _ in range(n)))


def _latp_case(basis, box, tag: dict):
    chk = lattice.check_latp(basis, box)
    if chk.holds and chk.corollary_holds:
        return None
    return {**tag, "count": chk.count, "bound": chk.bound, "minima": chk.minima}


def latp_random_cases(n_lattices: int, seed: int):
    rng = np.random.default_rng(seed)
    for i in range(n_lattices):
        n = 2 + i % 3
        basis = random_lattice(rng, n)
        box = random_box(rng, n)
        yield _latp_case(basis, box, {"rows": basis.rows, "box": box.half_widths})


def latp_congruence_cases(p_max: int, nus=(2, 3, 4), hs=(2, 3, 4)):
    for p in sieve_primes(p_max):
        for nu in nus:
            for h in hs:
                box = lattice.commonsols_box(nu, h)
                for s in range(p):
                    basis = lattice.build_congruence_lattice(p, s, nu)
                    yield _latp_case(basis, box, {"p": p, "nu": nu, "h": h, "s": s})


def linear_congruence_cases(p_max: int, gammas=None):
    """Every instance meeting the hypothesis must reconstruct ``s = a/b`` within the stated bounds."""
    gammas = gammas or [Fraction(k, 20) for k in range(2, 19)]
    for p in sieve_primes(p_max):
        for s in range(p):
            hits = {}
            for g in gammas:
                H_max = math.ceil(g * p / 15) - 1
                for h in range(1, H_max + 1):
                    for H in range(h, H_max + 1):
                        if (h, H) not in hits:
                            hits[(h, H)] = lattice.max_linear_congruence_hits(p, s, h, H)
                        if hits[(h, H)] < g * h + 1:
                            continue
                        ab = lattice.rational_reconstruct(p, s, H / (g * h), 1 / g)
                        ok = ab is not None and ab[1] > 0 and (ab[1] * s - ab[0]) % p == 0
                        yield None if ok else {"p": p, "s": s, "h": h, "H": H, "gamma": g, "result": ab}


def lattice_checks(scale: str = "quick") -> list[CheckOutcome]:
    big = scale == "full"
    return [
        _run("latp random lattices", latp_random_cases(1000 if big else 60, 7)),
        _run("latp congruence lattices", latp_congruence_cases(101 if big else 13, hs=(2, 3, 4) if big else (2, 3))),
        _run("linear congruence reconstruction", linear_congruence_cases(199 if big else 101)),
    ]


# --- poly ---


def _selection_cases(samples: int, seed: int, max_mn: int = 5):
    rng = np.random.default_rng(seed)
    pairs = [(Fraction(int(rng.integers(-12, 13)), int(rng.integers(1, 5))),
              Fraction(int(rng.integers(-12, 13)), int(rng.integers(1, 5)))) for _ in range(samples)]
    for m in range(2, max_mn + 1):
        for n in range(2, max_mn + 1):
            for sg, th in pairs:
                got = polyheight.selection_sums(polyheight.CirculantStack(m, n, sg, th))
                want = {polyheight.sigma_formula(m, n, sg, th)}
                yield None if got == want else {"m": m, "n": n, "sigma": sg, "theta": th, "sums": sorted(got)}


def sample_condition(rng: np.random.Generator, which: int) -> tuple[Fraction, Fraction]:
    """A rational ``(sigma, theta)`` satisfying condition ``which`` (0, 1 or 2)."""
    while True:
        sg = Fraction(int(rng.integers(-16, 17)), int(rng.integers(1, 5)))
        th = Fraction(int(rng.integers(-16, 17)), int(rng.integers(1, 5)))
        if polyheight.sigma_conditions(sg, th)[which]:
            return sg, th


def _neq_sigma_cases(samples: int, seed: int):
    rng = np.random.default_rng(seed)
    draws = [sample_condition(rng, c) for c in range(3) for _ in range(samples)]
    for M, N in itertools.product(range(2, 6), repeat=2):
        for m in range(2, M + 1):
            for n in range(2, N + 1):
                for sg, th in draws:
                    cmp = polyheight.compare_sigma(M, N, m, n, sg, th)
                    if not cmp.applicable:
                        continue
                    yield None if cmp.holds else {"M": M, "N": N, "m": m, "n": n, "sigma": sg, "theta": th,
                                                  "big": cmp.big, "small": cmp.small}


def _resultant_symmetry_cases(samples: int, seed: int):
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        P = polyheight.IntPolynomial(tuple(int(x) for x in rng.integers(-4, 5, size=int(rng.integers(2, 6)))))
        Q = polyheight.IntPolynomial(tuple(int(x) for x in rng.integers(-4, 5, size=int(rng.integers(2, 6)))))
        if rng.random() < 0.3 and P.degree >= 1 and Q.degree >= 1:
            common = polyheight.IntPolynomial((1, int(rng.integers(-3, 4))))
            P, Q = P * common, Q * common
        if P.degree < 1 or Q.degree < 1:
            continue
        r1, r2 = polyheight.sylvester_resultant(P, Q), polyheight.sylvester_resultant(Q, P)
        shared = len(polyheight._gcd_q(P.coeffs, Q.coeffs)) > 1
        ok = r1 == (-1) ** (P.degree * Q.degree) * r2 and (r1 == 0) == shared
        yield None if ok else {"P": P.coeffs, "Q": Q.coeffs, "res": r1, "res_swapped": r2}


def _mahler_cases(samples: int, seed: int):
    rng = np.random.default_rng(seed)
    for d in range(1, 11):
        P = polyheight.IntPolynomial((1,) + (0,) * (d - 1) + (-1,))
        yield None if polyheight.check_height_mahler(P).holds else {"P": P.coeffs}
    for _ in range(samples):
        P = polyheight.IntPolynomial(tuple(int(x) for x in rng.integers(-50, 51, size=int(rng.integers(2, 7)))))
        Q = polyheight.IntPolynomial(tuple(int(x) for x in rng.integers(-50, 51, size=int(rng.integers(2, 7)))))
        if P.is_zero or Q.is_zero:
            continue
        mp, mq, mpq = (polyheight.mahler_measure(x) for x in (P, Q, P * Q))
        ok = abs(mpq - mp * mq) <= 1e-7 * mpq and polyheight.check_height_mahler(P).holds
        ok = ok and polyheight.check_product_height(P, Q).within
        yield None if ok else {"P": P.coeffs, "Q": Q.coeffs, "M(PQ)": mpq, "M(P)M(Q)": mp * mq}


@dataclass(frozen=True)
class ResultantGrowth:
    """Excess ``ln|Res| - Sigma ln H`` regressed on ``ln H``.

    A slope above zero would mean the resultant outgrows ``H^Sigma``; the
    per-shape constants are ``max |Res| / H^Sigma``.
    """

    pairs: int
    nonzero: int
    pooled_slope: float
    slopes: dict
    constants: dict

    @property
    def worst_slope(self) -> float:
        return max([self.pooled_slope, *self.slopes.values()])


def resultant_growth(pairs: int = 10_000, seed: int = 2024, H_values=range(2, 11),
                     shapes=None, sigma_theta=None) -> ResultantGrowth:
    """Random hypothesis-satisfying pairs; ``H`` cycles through ``H_values``, shape and exponents are drawn."""
    sigma_theta = [tuple(map(Fraction, x)) for x in (sigma_theta or DEFAULT_SIGMA_THETA)]
    shapes = shapes or [(M, N) for M in range(2, 6) for N in range(2, 6)]
    combos = [(M, N, sg, th) for M, N in shapes for sg, th in sigma_theta
              if not ((sg < 0 and M == 2) or (th < 0 and N == 2))]
    H_values = list(H_values)
    rng = np.random.default_rng(seed)
    data: dict[tuple[int, int], list[tuple[float, float]]] = {}
    nonzero = 0
    for i in range(pairs):
        H = H_values[i % len(H_values)]
        M, N, sg, th = combos[int(rng.integers(len(combos)))]
        P1, P2 = polyheight.random_bound_pair(rng, M, N, H, sg, th)
        rb = polyheight.resultant_bound_check(P1, P2, H, M, N, sg, th)
        if rb.resultant == 0:
            continue
        nonzero += 1
        data.setdefault((M, N), []).append((math.log(H), rb.log_lhs - rb.log_rhs))

    def slope(pts):
        x = np.array([a for a, _ in pts])
        y = np.array([b for _, b in pts])
        return float(np.polyfit(x, y, 1)[0]) if np.ptp(x) > 0 else math.nan

    everything = [pt for pts in data.values() for pt in pts]
    slopes = {k: slope(v) for k, v in sorted(data.items())}
    constants = {k: math.exp(max(e for _, e in v)) for k, v in sorted(data.items())}
    return ResultantGrowth(pairs, nonzero, slope(everything), slopes, constants)


def poly_checks(scale: str = "quick") -> list[CheckOutcome]:
    big = scale == "full"
    return [
        _run("selection sums singleton", _selection_cases(50 if big else 8, 11, 5 if big else 4)),
        _run("sigma monotonicity", _neq_sigma_cases(20 if big else 4, 12)),
        _run("resultant symmetry and vanishing", _resultant_symmetry_cases(400 if big else 100, 13)),
        _run("Mahler measure and heights", _mahler_cases(300 if big else 60, 14)),
    ]


# --- charsum ---


def _hyperbola_cases(p_max: int, n_max: int):
    for p in sieve_primes(p_max):
        if p < 3:
            continue
        ctx = prime_context(p)
        k = (p - 1) // 2
        for a in range(1, p):
            for N in range(1, n_max + 1):
                r = charsum.hyperbola_decompose(ctx, k, a, N)
                yield None if r.equal else {"p": p, "a": a, "N": N, "direct": r.direct, "recombined": r.recombined}


def orthogonality_deviation(p: int) -> float:
    """Largest deviation from both orthogonality relations and from conjugate symmetry."""
    ctx = prime_context(p)
    n = p - 1
    xs = np.arange(1, p)
    table = np.array([[root_of_unity(int(e), n) for e in character_exponents(ctx, k, xs)] for k in range(n)])
    dev = 0.0
    row_sums = table.sum(axis=1)
    dev = max(dev, abs(row_sums[0] - n), float(np.max(np.abs(row_sums[1:]), initial=0.0)))
    col_sums = table.sum(axis=0)
    dev = max(dev, abs(col_sums[0] - n), float(np.max(np.abs(col_sums[1:]), initial=0.0)))
    for k in range(1, n):
        dev = max(dev, float(np.max(np.abs(table[k] - np.conj(table[n - k])))))
    return dev


def _character_cases(p_max: int):
    for p in sieve_primes(p_max):
        if p < 3:
            continue
        dev = orthogonality_deviation(p)
        yield None if dev < 1e-9 else {"p": p, "deviation": dev}
        ctx = prime_context(p)
        A, B = range(1, 1 + p // 3), range(2, 2 + p // 4 + 1)
        for k in range(1, p - 1):
            s1 = charsum.double_sum(ctx, k, A, B).value
            s2 = charsum.double_sum(ctx, p - 1 - k, A, B).value
            a = 1 + k % (p - 1)
            d1 = charsum.divisor_sum(ctx, k, a, 12).value
            d2 = charsum.divisor_sum(ctx, p - 1 - k, a, 12).value
            gap = max(abs(complex(s1) - complex(s2).conjugate()), abs(complex(d1) - complex(d2).conjugate()))
            yield None if gap < 1e-9 else {"p": p, "k": k, "gap": gap}


def charsum_checks(scale: str = "quick") -> list[CheckOutcome]:
    big = scale == "full"
    return [
        _run("hyperbola identity", _hyperbola_cases(31 if big else 13, 30 if big else 15)),
        _run("orthogonality and conjugate symmetry", _character_cases(101 if big else 23)),
    ]


SUITE_FUNCS: dict[str, Callable[[str], list[CheckOutcome]]] = {
    "identities": identities_checks,
    "lattice": lattice_checks,
    "poly": poly_checks,
    "charsum": charsum_checks,
}


def verify_suite(name: str, scale: str = "quick") -> VerifySummary:
    """Run a named suite; ``scale="full"`` uses the exhaustive acceptance grids."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    summary = VerifySummary(name)
    for suite in (SUITE_FUNCS if name == "all" else [name]):
        summary.checks += SUITE_FUNCS[suite](scale)
    return summary
