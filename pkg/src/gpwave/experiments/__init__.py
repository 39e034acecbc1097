"""Scenario harness reproducing the quantitative claims at desk scale."""
from .families import PROFILES, DataFamily, data_norm
from .fitting import PowerLawFit, fit_powerlaw
from .report import CRITERIA, ExperimentReport, PlotSpec, Verdict, build_manifest
from .scenarios import (
    annulus_profile,
    conservation,
    decay_exponent,
    engine_equivalence,
    error_vs_leps,
    error_vs_wave,
    lp_suite,
    monitor_prop1,
    prop1_scan,
    soliton_shift,
    strang_order,
    strichartz_ratio,
    strichartz_scan,
    sweep_theorem1,
)

__all__ = [
    "PROFILES",
    "DataFamily",
    "data_norm",
    "PowerLawFit",
    "fit_powerlaw",
    "CRITERIA",
    "ExperimentReport",
    "PlotSpec",
    "Verdict",
    "build_manifest",
    "annulus_profile",
    "conservation",
    "decay_exponent",
    "engine_equivalence",
    "error_vs_leps",
    "error_vs_wave",
    "lp_suite",
    "monitor_prop1",
    "prop1_scan",
    "soliton_shift",
    "strang_order",
    "strichartz_ratio",
    "strichartz_scan",
    "sweep_theorem1",
]
