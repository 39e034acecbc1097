"""Byte-stable writers: canonical JSON, long-format CSV and SVG plots."""
from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

CSV_COLUMNS = ("series", "dim", "eps", "param", "t", "value")

__all__ = [
    "CSV_COLUMNS",
    "Curve",
    "canonical_json",
    "config_hash",
    "format_float",
    "to_jsonable",
    "write_json",
    "write_series_csv",
    "emit_plot",
]


def format_float(x) -> str:
    """17 significant digits, enough to round-trip any double."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def to_jsonable(obj: Any):
    """Recursively convert numpy scalars/arrays and non-finite floats to JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return obj


def canonical_json(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"))


def config_hash(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def write_json(path, obj: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_jsonable(obj), sort_keys=True, indent=1) + "\n")
    return path


def write_series_csv(path, rows: Sequence[dict]) -> Path:
    """Long-format series table with a mandatory header row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(
            [
                r["series"],
                "" if r.get("dim") is None else int(r["dim"]),
                format_float(r.get("eps")),
                format_float(r.get("param")),
                format_float(r.get("t")),
                format_float(r.get("value")),
            ]
        )
    path.write_text(buf.getvalue())
    return path


@dataclass
class Curve:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    fit: Any = None  # object with exponent, intercept and window, or None
    extra: dict = field(default_factory=dict)


def emit_plot(series, kind: str, path, title: str = "", xlabel: str = "t", ylabel: str = "") -> Path:
    """Self-contained SVG of one or more curves; a fitted power law is overlaid with its slope label."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    curves = [series] if isinstance(series, Curve) else list(series)
    if not curves or all(len(c.x) == 0 for c in curves):
        raise ValueError("empty series")
    if kind not in ("loglog", "linear"):
        raise ValueError(f"unknown plot kind {kind!r}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context({"svg.hashsalt": "gpwave", "svg.fonttype": "none", "path.simplify": False}):
        fig, ax = plt.subplots(figsize=(6, 4))
        for c in curves:
            x = np.asarray(c.x, dtype=float)
            y = np.asarray(c.y, dtype=float)
            if kind == "loglog":
                keep = (x > 0) & (y > 0)
                x, y = x[keep], y[keep]
            ax.plot(x, y, "o-", ms=3, label=c.label)
            if c.fit is not None:
                lo, hi = c.fit.window if c.fit.window is not None else (x.min(), x.max())
                xf = np.geomspace(lo, hi, 32) if kind == "loglog" else np.linspace(lo, hi, 32)
                ax.plot(xf, np.exp(c.fit.intercept) * xf**c.fit.exponent, "--", lw=1,
                        label=f"{c.label} slope {c.fit.exponent:.2f}")
        if kind == "loglog":
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
    return path
