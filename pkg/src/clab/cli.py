"""``clab`` command line: exact counts, lattice tools, polynomial checks, character sums, sweeps."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from fractions import Fraction

from . import charsum, counting, lattice, polyheight
from .harness import SUITES, SweepConfig, emit, run_sweep, spot_verify, verify_suite
from .modular import prime_context


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def _fracs(text: str) -> list[Fraction]:
    return [Fraction(x) for x in text.replace(" ", "").split(",") if x]


def _rows(text: str) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(_ints(r)) for r in text.split(";"))


def _interval(text: str) -> counting.Interval:
    start, length = text.split(":")
    return counting.Interval(int(start), int(length))


def _jsonable(obj):
    if dataclasses.is_dataclass(obj):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [_jsonable(x) for x in items]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, int) and not isinstance(obj, bool) and abs(obj) >= 2**53:
        return str(obj)
    return obj


def _print(obj) -> None:
    print(json.dumps(_jsonable(obj)))


# --- count ---


def _cmd_count(args) -> int:
    what = args.what
    if what in ("j", "k"):
        shifts = tuple(_ints(args.shifts)) if args.shifts else (args.s,) * args.nu
        inst = counting.CongruenceInstance(args.p, len(shifts), args.h, shifts)
        if what == "j":
            print(counting.count_J(inst, args.lam))
        else:
            fn = {"auto": counting.count_K, "bruteforce": counting.count_K_bruteforce,
                  "convolution": counting.count_K_convolution}[args.method]
            print(fn(inst))
    elif what == "subset-energy":
        print(counting.count_subset_energy(args.p, _ints(args.xs), args.s))
    elif what == "interval-energy":
        print(counting.count_interval_energy(args.p, _interval(args.interval), _ints(args.ys)))
    elif what == "xyz":
        print(counting.count_xyz(args.p, args.s, args.X, args.Y, args.Z, check_hypothesis=not args.no_check))
    elif what == "expcurve":
        g = args.g if args.g is not None else prime_context(args.p).g
        _print(counting.count_exp_curve_paths(args.p, g, args.a, _interval(args.i1), _interval(args.i2)))
    elif what == "product-set":
        print(counting.product_set_size(args.p, args.h, args.s, args.nu))
    return 0


# --- lattice ---


def _cmd_lattice(args) -> int:
    if args.what == "minima":
        basis = lattice.LatticeBasis(_rows(args.rows))
        box = lattice.Box(tuple(_fracs(args.box)))
        _print(lattice.check_latp(basis, box) if args.latp else lattice.successive_minima(basis, box))
    elif args.what == "reconstruct":
        ab = lattice.rational_reconstruct(args.p, args.s, Fraction(args.a_bound), Fraction(args.b_bound))
        _print({"a": ab[0], "b": ab[1]} if ab else None)
    elif args.what == "relation":
        _print(lattice.find_small_relation(args.p, args.s, args.nu, _fracs(args.bounds), args.require_constant))
    elif args.what == "stress":
        _print(lattice.stress_commonsols(args.p, args.s, args.nu, args.h))
    return 0


# --- poly ---


def _poly(text: str) -> polyheight.IntPolynomial:
    return polyheight.IntPolynomial(tuple(_ints(text)))


def _cmd_poly(args) -> int:
    what = args.what
    if what == "sigma":
        print(polyheight.sigma_formula(args.m, args.n, Fraction(args.sigma), Fraction(args.theta)))
    elif what == "selections":
        stack = polyheight.CirculantStack(args.m, args.n, Fraction(args.sigma), Fraction(args.theta))
        _print(polyheight.selection_sums(stack))
    elif what == "resultant":
        P, Q = _poly(args.P), _poly(args.Q)
        if args.H is None:
            print(polyheight.sylvester_resultant(P, Q))
        else:
            M = args.M if args.M is not None else P.degree + 1
            N = args.N if args.N is not None else Q.degree + 1
            _print(polyheight.resultant_bound_check(P, Q, Fraction(args.H), M, N,
                                                    Fraction(args.sigma), Fraction(args.theta)))
    elif what == "mahler":
        print(repr(polyheight.mahler_measure(_poly(args.P), args.tol)))
    elif what == "heights":
        P = _poly(args.P)
        out = {"log_height": polyheight.log_height(P), "mahler": polyheight.check_height_mahler(P, args.tol)}
        if args.Q:
            out["product"] = polyheight.check_product_height(P, _poly(args.Q))
        _print(out)
    elif what == "factor-check":
        _print(polyheight.check_factor_coeffs(_poly(args.P), _poly(args.P1), Fraction(args.A), Fraction(args.h)))
    return 0


# --- charsum ---


def _cmd_charsum(args) -> int:
    if args.what == "saving":
        rows = charsum.saving_report(_ints(args.primes), args.regime, args.characters,
                                     _ints(args.lengths) if args.lengths else None)
        _print(rows)
        return 0
    ctx = prime_context(args.p)
    k = (args.p - 1) // 2 if args.k is None else args.k
    if args.what == "double":
        r = charsum.double_sum(ctx, k, _ints(args.A), _ints(args.B))
        _print({**_jsonable(r), "saving": r.saving})
    elif args.what == "divisor":
        r = charsum.divisor_sum(ctx, k, args.a, args.N)
        _print({**_jsonable(r), "saving": r.saving})
    elif args.what == "hyperbola":
        _print(charsum.hyperbola_decompose(ctx, k, args.a, args.N))
    return 0


# --- sweep / verify ---


def _cmd_sweep(args) -> int:
    cfg = SweepConfig.load(args.config)
    if args.jobs is not None:
        cfg.jobs = args.jobs
    if args.seed is not None:
        cfg.seed = args.seed
    if args.format is not None:
        cfg.format = args.format
    if args.override:
        cfg.override = True
    if args.timing:
        cfg.timing = True
    out = args.out or cfg.output
    if not out:
        print("error: no output path (use --out or set output in the config)", file=sys.stderr)
        return 2
    rows = run_sweep(cfg)
    emit(rows, cfg.format, out)
    print(f"{len(rows)} rows -> {out}")
    if args.verify:
        bad = spot_verify(cfg, rows, seed=cfg.seed)
        for line in bad:
            print("MISMATCH", line)
        return 1 if bad else 0
    return 0


def _cmd_verify(args) -> int:
    summary = verify_suite(args.suite, "full" if args.full else "quick")
    for line in summary.lines():
        print(line)
    ce = summary.first_counterexample()
    if ce:
        print("counterexample:", ce)
    return 0 if summary.passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="clab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", help="exact solution counts")
    c.add_argument("what", choices=["j", "k", "subset-energy", "interval-energy", "xyz", "expcurve", "product-set"])
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--nu", type=int, default=2)
    c.add_argument("--h", type=int, default=1)
    c.add_argument("--s", type=int, default=0)
    c.add_argument("--shifts", help="comma-separated shifts (overrides --nu/--s)")
    c.add_argument("--lambda", dest="lam", type=int, default=1)
    c.add_argument("--method", choices=["auto", "bruteforce", "convolution"], default="auto")
    c.add_argument("--xs", default="")
    c.add_argument("--ys", default="")
    c.add_argument("--interval", default="1:1", help="START:LENGTH")
    c.add_argument("--X", type=float, default=1)
    c.add_argument("--Y", type=float, default=2)
    c.add_argument("--Z", type=float, default=2)
    c.add_argument("--no-check", action="store_true", help="skip the X >= 1, 2 <= Z <= Y test")
    c.add_argument("--g", type=int)
    c.add_argument("--a", type=int, default=1)
    c.add_argument("--i1", default="1:1", help="START:LENGTH")
    c.add_argument("--i2", default="1:1", help="START:LENGTH")
    c.set_defaults(func=_cmd_count)

    lt = sub.add_parser("lattice", help="lattice points, minima and small relations")
    lt.add_argument("what", choices=["minima", "reconstruct", "relation", "stress"])
    lt.add_argument("--rows", default="1,0;0,1", help="basis rows, e.g. '1,-3;0,7'")
    lt.add_argument("--box", default="1,1", help="half-widths, e.g. '3,3/2'")
    lt.add_argument("--latp", action="store_true", help="also count points and test the minima bound")
    lt.add_argument("--p", type=int)
    lt.add_argument("--s", type=int, default=0)
    lt.add_argument("--nu", type=int, default=3)
    lt.add_argument("--h", type=int, default=2)
    lt.add_argument("--a-bound", default="1")
    lt.add_argument("--b-bound", default="1")
    lt.add_argument("--bounds", default="")
    lt.add_argument("--require-constant", action="store_true")
    lt.set_defaults(func=_cmd_lattice)

    pl = sub.add_parser("poly", help="integer polynomial tools")
    pl.add_argument("what", choices=["sigma", "selections", "resultant", "mahler", "heights", "factor-check"])
    pl.add_argument("--m", type=int, default=2)
    pl.add_argument("--n", type=int, default=2)
    pl.add_argument("--sigma", default="0")
    pl.add_argument("--theta", default="0")
    pl.add_argument("--P", default="1,0", help="coefficients, leading first")
    pl.add_argument("--Q", default="")
    pl.add_argument("--P1", default="1")
    pl.add_argument("--H", help="switch resultant to the bound check with this H")
    pl.add_argument("--M", type=int)
    pl.add_argument("--N", type=int)
    pl.add_argument("--A", default="1")
    pl.add_argument("--h", default="1")
    pl.add_argument("--tol", type=float, default=1e-8)
    pl.set_defaults(func=_cmd_poly)

    cs = sub.add_parser("charsum", help="multiplicative character sums")
    cs.add_argument("what", choices=["double", "divisor", "hyperbola", "saving"])
    cs.add_argument("--p", type=int)
    cs.add_argument("--k", type=int, help="character index (default: quadratic)")
    cs.add_argument("--A", default="")
    cs.add_argument("--B", default="")
    cs.add_argument("--a", type=int, default=1)
    cs.add_argument("--N", type=int, default=1)
    cs.add_argument("--primes", default="")
    cs.add_argument("--regime", choices=["double", "divisor"], default="divisor")
    cs.add_argument("--characters", choices=["quadratic", "principal", "all"], default="quadratic")
    cs.add_argument("--lengths", default="")
    cs.set_defaults(func=_cmd_charsum)

    sw = sub.add_parser("sweep", help="run a configured sweep and write a report")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out")
    sw.add_argument("--format", choices=["csv", "json"])
    sw.add_argument("--jobs", type=int)
    sw.add_argument("--seed", type=int)
    sw.add_argument("--override", action="store_true", help="allow h above the regime cap")
    sw.add_argument("--timing", action="store_true", help="fill the ms column")
    sw.add_argument("--verify", action="store_true", help="spot-check 1%% of rows")
    sw.set_defaults(func=_cmd_sweep)

    vf = sub.add_parser("verify", help="run self-check suites")
    vf.add_argument("suite", choices=SUITES)
    vf.add_argument("--full", action="store_true", help="use the exhaustive grids")
    vf.set_defaults(func=_cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ZeroDivisionError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
