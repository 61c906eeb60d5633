"""Sweep configuration and the grid rules it is built from."""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from sympy import integer_nthroot

from ..modular import sieve_primes

TARGETS = (
    "K",
    "J",
    "subset_energy",
    "interval_energy",
    "xyz",
    "expcurve",
    "product_set",
    "latp",
    "resultant_bound",
    "commonsols",
    "charsum_saving",
)

EXHAUSTIVE_S_LIMIT = 256
DEFAULT_S_SAMPLE = 64


def e_nu(nu: int) -> int:
    return max(nu * nu - 2 * nu - 2, nu * nu - 3 * nu + 4)


def floor_power(p: int, alpha) -> int:
    """``floor(p^alpha)`` for rational ``alpha >= 0``, exact."""
    alpha = Fraction(alpha).limit_denominator(10**6)
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    return integer_nthroot(p**alpha.numerator, alpha.denominator)[0]


PRESETS = {
    "e_nu": lambda nu: Fraction(1, e_nu(nu)),
    "half_e_nu": lambda nu: Fraction(1, 2 * e_nu(nu)),
    "third": lambda nu: Fraction(1, 3),
}


def regime_cap(p: int, nu: int) -> int:
    """Largest ``h`` with ``h^(e_nu) <= p``."""
    return floor_power(p, Fraction(1, e_nu(nu)))


@dataclass
class SweepConfig:
    """A sweep over ``(p, nu, h, s)``.

    ``p_range`` is ``[lo, hi]`` (all primes in between) unless ``primes`` is
    given. ``h_rule`` is one of ``{"fixed": [...]}``, ``{"alpha": [...]}``
    (``h = floor(p^alpha)``) or ``{"preset": name}`` with ``name`` in
    :data:`PRESETS`. ``s_rule`` is ``"all"``, ``{"sample": n}`` or
    ``{"list": [...]}``. ``params`` carries target-specific knobs.
    """

    target: str
    p_range: list[int] = field(default_factory=lambda: [5, 31])
    primes: list[int] | None = None
    h_rule: dict = field(default_factory=lambda: {"fixed": [2]})
    nu_list: list[int] = field(default_factory=lambda: [2])
    s_rule: object = "all"
    output: str | None = None
    format: str = "csv"
    jobs: int = 1
    seed: int = 0
    timing: bool = False
    override: bool = False
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError(f"unknown target {self.target!r}; expected one of {', '.join(TARGETS)}")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if not self.nu_list or min(self.nu_list) < 1:
            raise ValueError("nu_list must hold integers >= 1")
        if len(self.h_rule) != 1 or next(iter(self.h_rule)) not in ("fixed", "alpha", "preset"):
            raise ValueError(f"bad h_rule {self.h_rule!r}")
        if "preset" in self.h_rule and self.h_rule["preset"] not in PRESETS:
            raise ValueError(f"unknown preset {self.h_rule['preset']!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        if not isinstance(data, dict):
            raise ValueError("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "SweepConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return asdict(self)

    def prime_list(self) -> list[int]:
        if self.primes is not None:
            return sorted(set(self.primes))
        lo, hi = self.p_range
        return [q for q in sieve_primes(hi) if q >= lo]

    def h_values(self, p: int, nu: int) -> list[int]:
        kind, val = next(iter(self.h_rule.items()))
        if kind == "fixed":
            hs = [int(h) for h in val]
        elif kind == "alpha":
            hs = [floor_power(p, a) for a in val]
        else:
            hs = [floor_power(p, PRESETS[val](nu))]
        return sorted({h for h in hs if 1 <= h <= p - 1})

    def s_values(self, p: int) -> list[int]:
        rule = self.s_rule
        if rule == "all":
            if p <= EXHAUSTIVE_S_LIMIT:
                return list(range(p))
            rule = {"sample": DEFAULT_S_SAMPLE}
        if isinstance(rule, dict) and "sample" in rule:
            n = min(int(rule["sample"]), p)
            rng = np.random.default_rng([self.seed, p])
            return sorted(int(s) for s in rng.choice(p, size=n, replace=False))
        if isinstance(rule, dict) and "list" in rule:
            return sorted({int(s) % p for s in rule["list"]})
        raise ValueError(f"bad s_rule {rule!r}")


def default_budget() -> float:
    return float(os.environ.get("CLAB_BUDGET_OPS", 2e10))


def log2_ceil(n: int) -> int:
    return max(1, math.ceil(math.log2(max(2, n))))
