"""Wavefunction <-> hydrodynamic / augmented variables.

For a nonvanishing field ``psi`` in the semiclassical scaling,

    a = sqrt(2) (|psi|^2 - 1) / eps,     u = 2 Im(grad psi / psi),

and the augmented pair is ``z = -2i grad psi / psi`` (so ``Re z = u`` and
``Im z = -grad log |psi|^2``) together with a density variable ``b``.  Phase
gradients are always formed as ``Im(grad psi / psi)``; no angle unwrapping.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotAdmissible, NotPotential, VortexEncountered
from .grid import SpectralField, TorusGrid, VectorField, grad_array

SQRT2 = np.sqrt(2.0)
VORTEX_THRESHOLD = 0.1
RHO_BAND = (0.5, 2.0)
CURL_TOL = 1e-8

NORMALIZATIONS = ("dynaslow", "parabolic")


def _curl_relative(grid: TorusGrid, u: np.ndarray) -> float:
    """||curl u|| / ||grad u|| (0 in one dimension)."""
    if grid.dim == 1:
        return 0.0
    uh = [grid.forward(u[j]) for j in range(grid.dim)]
    k = grid.xi_odd
    pairs = [(0, 1)] if grid.dim == 2 else [(0, 1), (1, 2), (0, 2)]
    curl2 = sum(np.sum(np.abs(k[i] * uh[j] - k[j] * uh[i]) ** 2) for i, j in pairs)
    grad2 = sum(np.sum(np.abs(k[i] * uh[j]) ** 2) for i in range(grid.dim) for j in range(grid.dim))
    if grad2 == 0:
        return 0.0
    return float(np.sqrt(curl2 / grad2))


@dataclass
class HydroState:
    """Scaled density perturbation ``a`` and velocity ``u`` at small parameter ``eps``."""

    a: SpectralField
    u: VectorField
    eps: float
    potential: bool = True

    @property
    def grid(self) -> TorusGrid:
        return self.a.grid

    @property
    def weight(self) -> np.ndarray:
        """``rho^2 = 1 + eps a / sqrt(2)`` at the nodes."""
        return 1.0 + self.eps / SQRT2 * self.a.values.real

    def is_admissible(self) -> bool:
        return bool(np.all(self.weight > 0))

    def in_band(self, band=RHO_BAND) -> bool:
        w = self.weight
        return bool(np.all(w >= band[0] ** 2) and np.all(w <= band[1] ** 2))

    def curl(self) -> float:
        return _curl_relative(self.grid, self.u.values.real)


@dataclass
class AugmentedState:
    """Density variable ``b`` and complex vector ``z = v + i w``."""

    b: SpectralField
    z: VectorField
    eps: float
    normalization: str = "dynaslow"

    @property
    def grid(self) -> TorusGrid:
        return self.b.grid

    @property
    def weight(self) -> np.ndarray:
        """``|psi|^2`` expressed through ``b``; ``1 + eps b / sqrt(2)`` in the dynaslow normalization."""
        b = self.b.values.real
        if self.normalization == "parabolic":
            return 1.0 + 0.5 * self.eps**2 * b
        return 1.0 + self.eps / SQRT2 * b

    def is_admissible(self, band=RHO_BAND) -> bool:
        """True when ``rho = sqrt(weight)`` stays inside ``band``."""
        w = self.weight
        return bool(np.all(w >= band[0] ** 2) and np.all(w <= band[1] ** 2))


def min_modulus(psi: SpectralField) -> tuple[float, tuple[int, ...]]:
    """Global minimum of ``|psi|`` and the first node (C order) where it is attained."""
    mod = np.abs(psi.values)
    flat = int(np.argmin(mod))
    return float(mod.flat[flat]), tuple(int(i) for i in np.unravel_index(flat, mod.shape))


def _check_vortex(psi: SpectralField, threshold: float):
    value, node = min_modulus(psi)
    if value < threshold:
        raise VortexEncountered(value, node)


def log_gradient(psi: SpectralField) -> np.ndarray:
    """``grad psi / psi`` at the nodes, shape ``(dim, *grid.shape)``."""
    return grad_array(psi.grid, psi.coeffs) / psi.values


def to_hydro(psi: SpectralField, eps: float, threshold: float = VORTEX_THRESHOLD) -> HydroState:
    _check_vortex(psi, threshold)
    g = psi.grid
    a = SQRT2 * (np.abs(psi.values) ** 2 - 1.0) / eps
    u = 2.0 * np.imag(log_gradient(psi))
    return HydroState(SpectralField(g, a), VectorField.from_array(g, u), eps, potential=True)


def to_augmented(
    psi: SpectralField, eps: float, normalization: str = "dynaslow", threshold: float = VORTEX_THRESHOLD
) -> AugmentedState:
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    _check_vortex(psi, threshold)
    g = psi.grid
    rho2 = np.abs(psi.values) ** 2
    if normalization == "parabolic":
        b = 2.0 * (rho2 - 1.0) / eps**2
    else:
        b = SQRT2 * (rho2 - 1.0) / eps
    z = -2j * log_gradient(psi)
    return AugmentedState(SpectralField(g, b), VectorField.from_array(g, z), eps, normalization)


def _phase_from_gradient(grid: TorusGrid, grad_phase: np.ndarray) -> np.ndarray:
    """Periodic phase with the given gradient, plus a winding term if the mean is on the lattice."""
    phi_hat = np.zeros(grid.shape, dtype=complex)
    xi2 = grid.xi2.copy()
    xi2.flat[0] = 1.0
    for j, k in enumerate(grid.xi_odd):
        phi_hat += -1j * k * grid.forward(grad_phase[j])
    phi_hat /= xi2
    phi_hat.flat[0] = 0.0
    phi = grid.inverse(phi_hat).real
    mean = np.array([float(np.mean(grad_phase[j])) for j in range(grid.dim)])
    if np.any(np.abs(mean) > 1e-12):
        winding = mean / grid.dk
        if np.any(np.abs(winding - np.round(winding)) > 1e-8):
            raise NotPotential(f"mean phase gradient {mean} is not a lattice wavevector")
        for j in range(grid.dim):
            phi = phi + np.round(winding[j]) * grid.dk * (grid.x[j] + 0.5 * grid.box_length)
    return phi


def from_hydro(state: HydroState, curl_tol: float = CURL_TOL) -> SpectralField:
    """Invert the Madelung map: ``psi = sqrt(1 + eps a / sqrt 2) exp(i phi)``, ``grad phi = u / 2``."""
    g = state.grid
    w = state.weight
    if np.any(w <= 0):
        raise NotAdmissible("1 + eps a / sqrt(2) must be positive")
    u = state.u.values.real
    if state.curl() > curl_tol:
        raise NotPotential(f"relative curl {state.curl():.2e} exceeds {curl_tol:.0e}")
    phi = _phase_from_gradient(g, 0.5 * u)
    return SpectralField(g, np.sqrt(w) * np.exp(1j * phi))


def from_augmented(state: AugmentedState) -> SpectralField:
    """Rebuild ``psi`` (up to a constant phase) from ``|psi|^2`` and ``Re z = 2 grad phi``."""
    g = state.grid
    w = state.weight
    if np.any(w <= 0):
        raise NotAdmissible("weight must be positive")
    phi = _phase_from_gradient(g, 0.5 * state.z.values.real)
    return SpectralField(g, np.sqrt(w) * np.exp(1j * phi))


def pota_residual(state: AugmentedState) -> float:
    """Relative L2 residual of ``-grad(weight) = weight * Im z``, scaled by ``||grad weight||``."""
    g = state.grid
    w = state.weight
    grad_w = grad_array(g, g.forward(w)).real
    im_z = state.z.values.imag
    num = g.l2(grad_w + w * im_z)
    den = g.l2(grad_w)
    if den == 0:
        return 0.0 if num == 0 else float("inf")
    return num / den
