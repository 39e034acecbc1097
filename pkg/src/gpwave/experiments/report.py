"""Experiment reports: series, fits, constants, verdicts and the run manifest."""
from __future__ import annotations

import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .. import __version__
from ..io import Curve, config_hash, emit_plot, to_jsonable, write_json, write_series_csv
from .fitting import PowerLawFit

# named acceptance criteria a verdict may reference
CRITERIA = {
    "1": "integrator order",
    "2": "conservation",
    "3": "engine equivalence",
    "4": "wave approximation scaling",
    "5": "L_eps crossover",
    "6": "dispersive decay",
    "7": "soliton physics",
    "8": "Littlewood-Paley suite",
    "9": "estimate monitors",
    "10": "reproducibility",
}


@dataclass
class Verdict:
    criterion: str
    name: str
    passed: bool
    value: Any
    tolerance: str
    informational: bool = False

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValueError(f"verdict must reference a named criterion, got {self.criterion!r}")
        self.passed = bool(self.passed)

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "name": self.name,
            "passed": self.passed,
            "value": to_jsonable(self.value),
            "tolerance": self.tolerance,
            "informational": self.informational,
        }


@dataclass
class PlotSpec:
    name: str
    kind: str
    curves: list[Curve]
    xlabel: str = "t"
    ylabel: str = ""


@dataclass
class ExperimentReport:
    experiment: str
    parameters: dict = field(default_factory=dict)
    rows: list[dict] = field(default_factory=list)
    fits: dict[str, PowerLawFit] = field(default_factory=dict)
    constants: dict[str, Any] = field(default_factory=dict)
    verdicts: list[Verdict] = field(default_factory=list)
    plots: list[PlotSpec] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add_series(self, series: str, ts, values, dim=None, eps=None, param=None):
        for t, v in zip(ts, values):
            self.rows.append({"series": series, "dim": dim, "eps": eps, "param": param, "t": float(t), "value": float(v)})

    def verdict(self, criterion: str, name: str, passed: bool, value, tolerance: str, informational: bool = False):
        v = Verdict(criterion, name, passed, value, tolerance, informational)
        self.verdicts.append(v)
        return v

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts if not v.informational)

    def failures(self) -> list[dict]:
        return [v.to_dict() for v in self.verdicts if not v.passed and not v.informational]

    def series(self, name: str, eps=None) -> tuple[np.ndarray, np.ndarray]:
        rows = [r for r in self.rows if r["series"] == name and (eps is None or r["eps"] == eps)]
        return np.array([r["t"] for r in rows]), np.array([r["value"] for r in rows])

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "parameters": to_jsonable(self.parameters),
            "fits": {k: f.to_dict() for k, f in sorted(self.fits.items())},
            "constants": to_jsonable(self.constants),
            "verdicts": [v.to_dict() for v in self.verdicts],
            "passed": self.passed,
            "notes": list(self.notes),
        }

    def merge(self, other: "ExperimentReport") -> "ExperimentReport":
        """Append another report's content in order (single-writer reduction)."""
        self.rows.extend(other.rows)
        self.fits.update(other.fits)
        self.constants.update(other.constants)
        self.verdicts.extend(other.verdicts)
        self.plots.extend(other.plots)
        self.notes.extend(other.notes)
        return self

    def write(self, directory, manifest: dict | None = None) -> Path:
        """Write report.json, series.csv and plots/*.svg (plus manifest.json if given)."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        write_json(directory / "report.json", self.to_dict())
        write_series_csv(directory / "series.csv", self.rows)
        for p in self.plots:
            if any(len(c.x) for c in p.curves):
                emit_plot(p.curves, p.kind, directory / "plots" / f"{p.name}.svg",
                          title=p.name, xlabel=p.xlabel, ylabel=p.ylabel)
        if manifest is not None:
            write_json(directory / "manifest.json", manifest)
        return directory


def build_manifest(command: str, config: dict, wall_time: float) -> dict:
    """Config (canonical form), its hash and the code version; wall time is informational only."""
    return {
        "command": command,
        "config": to_jsonable(config),
        "config_hash": config_hash(config),
        "code_version": __version__,
        "numpy_version": np.__version__,
        "python_version": platform.python_version(),
        "wall_time_s": round(float(wall_time), 3),
    }
