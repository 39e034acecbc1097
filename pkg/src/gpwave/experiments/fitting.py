"""Log-log power-law fits."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

from ..errors import FitDomainError


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    intercept: float
    r2: float
    stderr: float
    window: tuple[float, float]
    n_points: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window)
        return d

    def __call__(self, x):
        return np.exp(self.intercept) * np.asarray(x, dtype=float) ** self.exponent


def fit_powerlaw(xs, ys, window: tuple[float, float] | None = None) -> PowerLawFit:
    """Least squares on ``(log x, log y)`` restricted to ``window[0] <= x <= window[1]``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("xs and ys must be 1-D arrays of equal length")
    if window is None:
        window = (float(np.min(xs)), float(np.max(xs))) if xs.size else (0.0, 0.0)
    sel = (xs >= window[0]) & (xs <= window[1])
    x, y = xs[sel], ys[sel]
    if x.size < 4:
        raise FitDomainError(f"need at least 4 points in the fit window, got {x.size}")
    if np.any(x <= 0) or np.any(y <= 0) or not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise FitDomainError("power-law fits need finite positive data")
    lx, ly = np.log(x), np.log(y)
    if np.ptp(ly) == 0:
        return PowerLawFit(0.0, float(ly[0]), 1.0, 0.0, (float(window[0]), float(window[1])), int(x.size))
    res = stats.linregress(lx, ly)
    return PowerLawFit(
        float(res.slope), float(res.intercept), float(res.rvalue**2), float(res.stderr),
        (float(window[0]), float(window[1])), int(x.size),
    )
