"""Grid expansion, budgeting and (optionally parallel) evaluation of sweeps."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .. import charsum, counting, lattice, polyheight
from ..modular import prime_context, sieve_primes
from .config import SweepConfig, default_budget, log2_ceil, regime_cap
from .report import ReportRow


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class Instance:
    p: int | None
    nu: int | None
    h: int | None
    s: int | None
    key: tuple = ()

    @property
    def sort_key(self) -> tuple:
        return tuple(-1 if v is None else v for v in (self.p, self.nu, self.h, self.s)) + self.key


DEFAULT_SIGMA_THETA = ((0, 0), (1, 0), (0, 1), (1, 1), (2, -1), (-1, 2))


def expand(config: SweepConfig) -> list[Instance]:
    t = config.target
    out = []
    if t == "resultant_bound":
        Ms = config.params.get("M", [2, 3, 4, 5])
        Ns = config.params.get("N", [2, 3, 4, 5])
        st = [tuple(x) for x in config.params.get("sigma_theta", DEFAULT_SIGMA_THETA)]
        samples = int(config.params.get("samples", 10))
        for H in config.h_rule.get("fixed", [2]):
            for M in Ms:
                for N in Ns:
                    for j, (sg, th) in enumerate(st):
                        if (Fraction(sg) < 0 and M == 2) or (Fraction(th) < 0 and N == 2):
                            continue
                        for i in range(samples):
                            out.append(Instance(None, None, int(H), i, (M, N, j)))
        return sorted(out, key=lambda x: x.sort_key)
    for p in config.prime_list():
        if t == "charsum_saving":
            out += [Instance(p, None, L, None) for L in config.h_values(p, 1)]
            continue
        for nu in config.nu_list:
            if t == "commonsols" and nu < 3:
                raise ValueError("commonsols needs nu >= 3")
            for h in config.h_values(p, nu):
                for s in config.s_values(p):
                    if t in ("xyz", "expcurve") and s == 0:
                        continue
                    out.append(Instance(p, nu, h, s))
    return sorted(out, key=lambda x: x.sort_key)


def estimate_ops(target: str, inst: Instance, params: dict) -> float:
    p, nu, h = inst.p, inst.nu, inst.h
    if target == "K":
        if h**nu <= counting.CROSSOVER_FACTOR * p:
            return h**nu + p
        return nu * p * log2_ceil(p)
    if target == "J":
        return h ** (nu - 1) + p
    if target in ("subset_energy", "interval_energy"):
        return h * h + p
    if target == "xyz":
        return h * h * max(1, h // 2) + p
    if target == "expcurve":
        return 2 * h
    if target == "product_set":
        return nu * p * h
    if target in ("latp", "commonsols"):
        box = lattice.commonsols_box(nu, h) if target == "latp" else lattice.hypothesis_box(nu, h)
        # counts go through the residue convolution unless p is large
        if p <= lattice.CONVOLUTION_MODULUS:
            return nu * p * log2_ceil(p) + 2**nu * nu**3
        return float(box.volume()) / p + p * nu
    if target == "resultant_bound":
        M, N, _ = inst.key
        return (M + N) ** 3
    if target == "charsum_saving":
        return p * h if params.get("regime", "divisor") == "divisor" else h * h + p * log2_ceil(p)
    raise ValueError(target)


def check_budget(config: SweepConfig, insts: list[Instance], budget: float | None = None) -> float:
    budget = default_budget() if budget is None else budget
    est = [(estimate_ops(config.target, i, config.params), i) for i in insts]
    total = sum(e for e, _ in est)
    if total > budget:
        worst = sorted(est, key=lambda x: -x[0])[:5]
        listing = "; ".join(f"{i} ~{e:.3g} ops" for e, i in worst)
        raise BudgetExceeded(f"estimated {total:.3g} ops exceeds budget {budget:.3g}; largest instances: {listing}")
    return total


def check_regime(config: SweepConfig, insts: list[Instance]) -> None:
    if config.target != "K" or config.override:
        return
    bad = [i for i in insts if i.h > regime_cap(i.p, i.nu)]
    if bad:
        shown = ", ".join(f"(p={i.p}, nu={i.nu}, h={i.h})" for i in bad[:5])
        raise ValueError(
            f"{len(bad)} instances exceed h <= floor(p^(1/e_nu)); pass override to run them anyway: {shown}"
        )


def evaluate(target: str, params: dict, seed: int, inst: Instance) -> ReportRow:
    p, nu, h, s = inst.p, inst.nu, inst.h, inst.s
    extra: dict = {}
    if target == "K":
        count = counting.count_K(counting.CongruenceInstance.uniform(p, nu, h, s))
        ref = Fraction(h**nu)
    elif target == "J":
        lam = int(params.get("lambda", 1)) % p
        count = counting.count_J(counting.CongruenceInstance.uniform(p, nu, h, s), lam)
        ref = Fraction(h**nu, p - 1)
        extra = {"lambda": lam}
    elif target == "subset_energy":
        count = counting.count_subset_energy(p, range(1, h + 1), s)
        ref = Fraction(h**3)
    elif target == "interval_energy":
        ys = [y % p for y in params.get("ys", range(1, h + 1)) if y % p]
        count = counting.count_interval_energy(p, counting.Interval(s + 1, h), ys)
        ref = Fraction(h * len(ys) * min(h, len(ys)))
    elif target == "xyz":
        Z = params.get("Z", h)
        count = counting.count_xyz(p, s, h, h, Z)
        total = h * h * sum(1 for q in sieve_primes(math.floor(Z)) if q > Z / 2)
        ref = Fraction(total)
    elif target == "expcurve":
        g = int(params.get("g", prime_context(p).g))
        count = counting.count_exp_curve(p, g, s, counting.Interval(1, h), counting.Interval(1, h))
        ref = Fraction(h * h, p)
        extra = {"g": g}
    elif target == "product_set":
        count = counting.product_set_size(p, h, s, nu)
        ref = Fraction(min(h**nu, p))
    elif target == "latp":
        chk = lattice.check_latp(lattice.build_congruence_lattice(p, s, nu), lattice.commonsols_box(nu, h))
        count, ref = chk.count, chk.bound
        extra = {"holds": chk.holds, "corollary_holds": chk.corollary_holds}
    elif target == "commonsols":
        rep = lattice.stress_commonsols(p, s, nu, h)
        count, ref = rep.relation_count, Fraction(rep.threshold)
        witness = None if rep.witness is None else " ".join(map(str, rep.witness))
        extra = {"hypothesis_met": rep.hypothesis_met, "fitted_C": rep.fitted_C, "witness": witness}
    elif target == "resultant_bound":
        M, N, j = inst.key
        sg, th = map(Fraction, [tuple(x) for x in params.get("sigma_theta", DEFAULT_SIGMA_THETA)][j])
        rng = np.random.default_rng([seed, h, M, N, j, s])
        P1, P2 = polyheight.random_bound_pair(rng, M, N, h, sg, th)
        rb = polyheight.resultant_bound_check(P1, P2, h, M, N, sg, th)
        count = abs(rb.resultant)
        sig = rb.sigma_value
        ref = Fraction(h) ** sig if sig.denominator == 1 else Fraction(math.exp(rb.log_rhs))
        extra = {"M": M, "N": N, "sigma": str(sg), "theta": str(th), "Sigma": str(sig)}
    elif target == "charsum_saving":
        regime = params.get("regime", "divisor")
        chars = params.get("characters", "quadratic")
        if chars not in ("quadratic", "principal"):
            raise ValueError("charsum_saving sweeps support quadratic or principal characters")
        row = charsum.saving_report([p], regime, chars, lengths=[h])[0]
        count, ref = int(round(row.magnitude)), Fraction(row.trivial_bound)
        extra = {"regime": regime, "k": row.k, "argmax": row.argmax, "exponent": row.exponent}
    else:
        raise ValueError(f"unknown target {target!r}")
    return ReportRow(p, nu, h, s, int(count), ref, None, extra)


def _run_one(args) -> ReportRow:
    target, params, seed, timing, inst = args
    t0 = time.perf_counter()
    row = evaluate(target, params, seed, inst)
    if timing:
        row = ReportRow(row.p, row.nu, row.h, row.s, row.count, row.reference,
                        round(1000 * (time.perf_counter() - t0), 3), row.extra)
    return row


def run_sweep(config: SweepConfig, budget: float | None = None) -> list[ReportRow]:
    """Evaluate every instance; rows come back sorted by ``(p, nu, h, s)`` whatever ``jobs`` is."""
    insts = expand(config)
    check_regime(config, insts)
    check_budget(config, insts, budget)
    args = [(config.target, config.params, config.seed, config.timing, i) for i in insts]
    if config.jobs == 1 or len(args) < 2:
        return [_run_one(a) for a in args]
    chunk = max(1, len(args) // (config.jobs * 4))
    with ProcessPoolExecutor(max_workers=config.jobs) as ex:
        return list(ex.map(_run_one, args, chunksize=chunk))


def spot_verify(config: SweepConfig, rows: list[ReportRow], fraction: float = 0.01, seed: int = 0) -> list[str]:
    """Recompute a seeded sample of rows through an independent path; returns mismatch descriptions."""
    if not rows:
        return []
    rng = np.random.default_rng(seed)
    n = max(1, math.ceil(fraction * len(rows)))
    picks = sorted(rng.choice(len(rows), size=min(n, len(rows)), replace=False).tolist())
    bad = []
    for i in picks:
        r = rows[i]
        if config.target == "K":
            inst = counting.CongruenceInstance.uniform(r.p, r.nu, r.h, r.s)
            alt = {counting.count_K_bruteforce(inst), counting.count_K_convolution(inst)}
            ok = alt == {r.count}
        elif config.target == "J":
            inst = counting.CongruenceInstance.uniform(r.p, r.nu, r.h, r.s)
            ok = int(counting.J_distribution(inst)[r.extra["lambda"]]) == r.count
        else:
            key = ()
            if config.target == "resultant_bound":
                st = [tuple(map(Fraction, x)) for x in config.params.get("sigma_theta", DEFAULT_SIGMA_THETA)]
                j = st.index((Fraction(r.extra["sigma"]), Fraction(r.extra["theta"])))
                key = (r.extra["M"], r.extra["N"], j)
            inst = Instance(r.p, r.nu, r.h, r.s, key)
            ok = evaluate(config.target, config.params, config.seed, inst).count == r.count
        if not ok:
            bad.append(f"row {i}: p={r.p} nu={r.nu} h={r.h} s={r.s} count={r.count}")
    return bad
