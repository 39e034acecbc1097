"""Reproducible initial data ``(a0, u0)`` independent of ``eps``.

``u0 = 2 grad phi0`` is always a gradient.  Profiles are fixed functions of
the named parameters and the seed; only the grid they are sampled on varies.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..grid import SpectralField, TorusGrid, VectorField, grad_array

PROFILES = ("gaussian", "ring", "random-bandlimited", "soliton-perturbation")


@dataclass(frozen=True)
class DataFamily:
    name: str = "gaussian"
    amplitude: float = 1.0
    width: float = 1.0
    seed: int = 0
    norm_s: float = 4.0
    phase_amplitude: float = 0.0
    radius: float = 3.0
    kmax: float = 2.0

    def __post_init__(self):
        if self.name not in PROFILES:
            raise ValueError(f"unknown profile {self.name!r}; choose from {PROFILES}")
        if not self.width > 0:
            raise ValueError("width must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    def scaled(self, factor: float) -> "DataFamily":
        d = self.to_dict()
        d["amplitude"] *= factor
        d["phase_amplitude"] *= factor
        return DataFamily(**d)

    def profiles(self, grid: TorusGrid) -> tuple[np.ndarray, np.ndarray]:
        """Unit-amplitude ``a`` and ``phi`` shapes on ``grid``."""
        x = grid.mesh()
        r2 = sum(xi**2 for xi in x)
        w = self.width
        if self.name == "gaussian":
            shape = np.exp(-r2 / w**2)
            return shape, shape
        if self.name == "ring":
            r = np.sqrt(r2)
            shape = np.exp(-((r - self.radius) ** 2) / w**2)
            return shape, shape
        if self.name == "random-bandlimited":
            rng = np.random.default_rng(self.seed)
            window = np.exp(-r2 / (2 * w**2))
            out = []
            for _ in range(2):
                c = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
                c[grid.xi_abs > self.kmax] = 0
                f = grid.inverse(c).real * window
                out.append(f / np.max(np.abs(f)))
            return out[0], out[1]
        # soliton-perturbation: a localized dip with the matching one-way phase ramp
        shape = -1.0 / np.cosh(x[0] / w) ** 2
        phi = -np.tanh(x[0] / w) * w / np.sqrt(2)
        for xi in x[1:]:
            shape = shape * np.exp(-(xi**2) / (4 * w) ** 2)
            phi = phi * np.exp(-(xi**2) / (4 * w) ** 2)
        return shape, phi

    def generate(self, grid: TorusGrid) -> tuple[SpectralField, VectorField]:
        a_shape, phi_shape = self.profiles(grid)
        a = SpectralField(grid, self.amplitude * a_shape)
        phi = self.phase_amplitude * phi_shape
        u = 2.0 * grad_array(grid, grid.forward(phi)).real
        return a, VectorField.from_array(grid, u)


def data_norm(a: SpectralField, u: VectorField, s: float) -> float:
    """``||(a, u)||_{H^{s+1} x H^s}``."""
    from ..littlewood_paley import sobolev_norm

    return float(np.hypot(sobolev_norm(a, s + 1).value, sobolev_norm(u, s).value))
