"""Sweeps, reports, exponent fits and self-check suites."""

from .config import PRESETS, TARGETS, SweepConfig, e_nu, floor_power, regime_cap
from .report import (
    BASE_COLUMNS,
    ExponentFit,
    ReportRow,
    emit,
    fit_exponent,
    load,
    max_over_s,
    parse_csv,
    parse_json,
    to_csv,
    to_json,
)
from .sweep import BudgetExceeded, Instance, evaluate, expand, run_sweep, spot_verify
from .verify import SUITES, VerifySummary, verify_suite

__all__ = [
    "BASE_COLUMNS",
    "BudgetExceeded",
    "ExponentFit",
    "Instance",
    "PRESETS",
    "ReportRow",
    "SUITES",
    "SweepConfig",
    "TARGETS",
    "VerifySummary",
    "e_nu",
    "emit",
    "evaluate",
    "expand",
    "fit_exponent",
    "floor_power",
    "load",
    "max_over_s",
    "parse_csv",
    "parse_json",
    "regime_cap",
    "run_sweep",
    "spot_verify",
    "to_csv",
    "to_json",
    "verify_suite",
]
