"""Exact Fourier solvers for the linear acoustic models.

All propagators act mode by mode on a pair ``(a, u)``:

* the free wave system ``a_t + sqrt2 div u = 0, u_t + sqrt2 grad a = 0``;
* the dispersive operator ``L_eps``:
  ``a_t + sqrt2 div u = 0, u_t + sqrt2 grad a - sqrt2 kappa eps^2 grad lap a = 0``;
* the unitary groups ``V_eps`` and ``U_eps(t) = V_eps(eps t / sqrt2)``.

``kappa`` is the ``dispersion`` argument.  ``kappa = 1`` is the operator as
usually written; the linearization of the Gross-Pitaevskii flow about the
constant state has ``kappa = 1/2`` (see :data:`GP_DISPERSION`).

Only the potential part of ``u`` is acoustic.  The solenoidal part and the
zero mode are carried along unchanged (or integrated, for forcing).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import QuadratureTooCoarse
from .grid import SpectralField, TorusGrid, VectorField

SQRT2 = np.sqrt(2.0)
GP_DISPERSION = 0.5

__all__ = [
    "GP_DISPERSION",
    "LinearPair",
    "SymmetrizedPair",
    "omega",
    "wave_propagate",
    "leps_propagate",
    "leps_duhamel",
    "group_apply",
    "symmetrize",
    "desymmetrize",
]


@dataclass
class LinearPair:
    """Acoustic pair: real scalar ``a`` and real vector ``u`` on one grid."""

    a: SpectralField
    u: VectorField

    def __post_init__(self):
        if self.a.grid != self.u.grid:
            raise ValueError("a and u live on different grids")

    @property
    def grid(self) -> TorusGrid:
        return self.a.grid

    def split_u(self) -> tuple[np.ndarray, np.ndarray]:
        """Fourier coefficients of the potential and solenoidal parts of ``u``."""
        return _helmholtz(self.grid, self.u.coeffs)

    def energy(self) -> float:
        return self.a.norm() ** 2 + self.u.norm() ** 2

    def copy(self) -> "LinearPair":
        return LinearPair(self.a.copy(), VectorField([c.copy() for c in self.u]))


@dataclass
class SymmetrizedPair:
    """``c = (1 - kappa eps^2 lap)^(1/2) b`` and ``d = (-lap)^(-1/2) div v`` (Fourier coefficients)."""

    grid: TorusGrid
    c: np.ndarray
    d: np.ndarray
    eps: float
    dispersion: float = 1.0
    solenoidal: np.ndarray | None = None
    mean_v: np.ndarray | None = None

    def energy(self) -> np.ndarray:
        """Per-mode ``|c|^2 + |d|^2``."""
        return np.abs(self.c) ** 2 + np.abs(self.d) ** 2


def _unit(grid: TorusGrid) -> tuple[np.ndarray, ...]:
    """``xi / |xi|`` with 0 at the zero mode (odd-derivative convention at Nyquist)."""
    k = grid.xi_odd
    mag = np.sqrt(sum(kj**2 for kj in k))
    safe = np.where(mag > 0, mag, 1.0)
    return tuple(np.where(mag > 0, kj / safe, 0.0) for kj in k)


def _helmholtz(grid: TorusGrid, u_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    e = _unit(grid)
    along = sum(e[j] * u_hat[j] for j in range(grid.dim))
    pot = np.stack([e[j] * along for j in range(grid.dim)])
    return pot, u_hat - pot


def _stretch(grid: TorusGrid, eps: float, dispersion: float) -> np.ndarray:
    return np.sqrt(1.0 + dispersion * eps**2 * grid.xi2)


def _acoustic_abs(grid: TorusGrid) -> np.ndarray:
    # Nyquist components carry no divergence, so they do not enter |xi| here
    return np.sqrt(sum(k**2 for k in grid.xi_odd))


def omega(grid: TorusGrid, eps: float, dispersion: float = 1.0) -> np.ndarray:
    """Acoustic frequency ``sqrt2 |xi| sqrt(1 + kappa eps^2 |xi|^2)`` per mode (``eps = 0``: wave)."""
    return SQRT2 * _acoustic_abs(grid) * _stretch(grid, eps, dispersion)


def symmetrize(b: SpectralField, v: VectorField, eps: float, dispersion: float = 1.0) -> SymmetrizedPair:
    g = b.grid
    e = _unit(g)
    c = _stretch(g, eps, dispersion) * b.coeffs
    v_hat = v.coeffs
    d = 1j * sum(e[j] * v_hat[j] for j in range(g.dim))
    d.flat[0] = 0.0
    _, sol = _helmholtz(g, v_hat)
    mean_v = v_hat[(slice(None),) + (0,) * g.dim].copy()
    sol[(slice(None),) + (0,) * g.dim] = 0.0
    return SymmetrizedPair(g, c, d, eps, dispersion, sol, mean_v)


def desymmetrize(pair: SymmetrizedPair, include_solenoidal: bool = False) -> tuple[SpectralField, VectorField]:
    """Return ``(b, v)`` with ``v = -grad (-lap)^(-1/2) d``; optionally add back the stored solenoidal part and mean."""
    g = pair.grid
    e = _unit(g)
    b = SpectralField.from_coeffs(g, pair.c / _stretch(g, pair.eps, pair.dispersion))
    v_hat = np.stack([-1j * e[j] * pair.d for j in range(g.dim)])
    if include_solenoidal:
        if pair.solenoidal is not None:
            v_hat = v_hat + pair.solenoidal
        if pair.mean_v is not None:
            v_hat[(slice(None),) + (0,) * g.dim] += pair.mean_v
    v = VectorField([SpectralField.from_coeffs(g, v_hat[j]) for j in range(g.dim)])
    return b, v


def _rotate(c, d, wt):
    cos, sin = np.cos(wt), np.sin(wt)
    return c * cos - d * sin, c * sin + d * cos


def _evolve(pair: LinearPair, t: float, eps: float, dispersion: float) -> LinearPair:
    sym = symmetrize(pair.a, pair.u, eps, dispersion)
    c, d = _rotate(sym.c, sym.d, omega(pair.grid, eps, dispersion) * t)
    out = SymmetrizedPair(sym.grid, c, d, eps, dispersion, sym.solenoidal, sym.mean_v)
    a, u = desymmetrize(out, include_solenoidal=True)
    return LinearPair(_as_real(a), _as_real_vec(u))


def _as_real(f: SpectralField) -> SpectralField:
    return SpectralField(f.grid, f.values.real)


def _as_real_vec(v: VectorField) -> VectorField:
    return VectorField([_as_real(c) for c in v])


def wave_propagate(pair0: LinearPair, t: float) -> LinearPair:
    """Exact solution of the free wave system at time ``t``."""
    return _evolve(pair0, t, 0.0, 0.0)


def leps_propagate(pair0: LinearPair, t: float, eps: float, dispersion: float = 1.0) -> LinearPair:
    """Exact solution of ``L_eps(a, u) = 0`` at time ``t``."""
    return _evolve(pair0, t, eps, dispersion)


def leps_duhamel(
    pair0: LinearPair,
    times: np.ndarray,
    f: np.ndarray,
    g: np.ndarray,
    eps: float,
    dispersion: float = 1.0,
    max_phase_step: float = 1.0,
) -> LinearPair:
    """Solve ``L_eps(a, u) = (f, g)`` up to ``t = times[-1]`` by variation of constants.

    ``times`` is a uniform sample grid starting at 0; ``f`` has shape
    ``(len(times), *grid.shape)`` and ``g`` shape ``(len(times), dim, *grid.shape)``.
    The integral is composite Simpson over the samples.  If the spacing
    times the largest frequency carried by the forcing exceeds
    ``max_phase_step`` the samples cannot resolve the oscillating kernel and
    :class:`QuadratureTooCoarse` is raised.
    """
    grid = pair0.grid
    times = np.asarray(times, dtype=float)
    f = np.asarray(f)
    g = np.asarray(g)
    if times.ndim != 1 or len(times) < 3:
        raise QuadratureTooCoarse("need at least three forcing samples")
    if f.shape != (len(times), *grid.shape) or g.shape != (len(times), grid.dim, *grid.shape):
        raise ValueError("forcing samples do not match the time grid and spatial grid")
    h = np.diff(times)
    if abs(times[0]) > 1e-14 or np.ptp(h) > 1e-9 * max(h.max(), 1e-300):
        raise ValueError("forcing must be sampled on a uniform grid starting at t = 0")
    t = float(times[-1])
    f_hat = grid.forward(f)
    g_hat = grid.forward(g)

    w = omega(grid, eps, dispersion)
    carried = (np.max(np.abs(f_hat), axis=0) + np.max(np.sum(np.abs(g_hat), axis=1), axis=0)) > 1e-10 * (
        np.max(np.abs(f_hat)) + np.max(np.abs(g_hat)) + 1e-300
    )
    w_max = float(np.max(w[carried])) if np.any(carried) else 0.0
    if h[0] * w_max > max_phase_step:
        raise QuadratureTooCoarse(
            f"sample spacing {h[0]:.3e} too coarse for frequency {w_max:.3e} (limit {max_phase_step})"
        )

    stretch = _stretch(grid, eps, dispersion)
    e = _unit(grid)
    F = stretch * f_hat
    G = 1j * sum(e[j] * g_hat[:, j] for j in range(grid.dim))
    # R(t - s)(F, G)(s) integrated over s
    phase = w[None] * (t - times).reshape((-1,) + (1,) * grid.dim)
    cs, sn = np.cos(phase), np.sin(phase)
    ic = simpson(F * cs - G * sn, x=times, axis=0)
    id_ = simpson(F * sn + G * cs, x=times, axis=0)

    sym = symmetrize(pair0.a, pair0.u, eps, dispersion)
    c, d = _rotate(sym.c, sym.d, w * t)
    c = c + ic
    d = d + id_
    d.flat[0] = 0.0
    # the solenoidal part and the mean of v are integrated directly
    _, g_sol = _helmholtz(grid, np.moveaxis(g_hat, 1, 0))
    sol = sym.solenoidal + simpson(g_sol, x=times, axis=1)
    zero = (slice(None),) + (0,) * grid.dim
    sol[zero] = 0.0
    mean_v = sym.mean_v + simpson(g_hat[(slice(None), slice(None)) + (0,) * grid.dim], x=times, axis=0)
    out = SymmetrizedPair(grid, c, d, eps, dispersion, sol, mean_v)
    a, u = desymmetrize(out, include_solenoidal=True)
    return LinearPair(_as_real(a), _as_real_vec(u))


def group_apply(
    field: SpectralField, t: float, eps: float, slowed: bool = False, dispersion: float = 1.0
) -> SpectralField:
    """Apply ``V_eps(t)`` (multiplier ``exp(i t omega / eps)``) or the slowed group ``U_eps(t)``.

    ``U_eps(t) = V_eps(eps t / sqrt2)`` has multiplier
    ``exp(i t |xi| sqrt(1 + kappa eps^2 |xi|^2))`` and is defined at ``eps = 0``.
    """
    g = field.grid
    if slowed:
        phase = t * g.xi_abs * _stretch(g, eps, dispersion)
    else:
        if eps <= 0:
            raise ValueError("V_eps needs eps > 0")
        phase = (t / eps) * SQRT2 * g.xi_abs * _stretch(g, eps, dispersion)
    return SpectralField.from_coeffs(g, np.exp(1j * phase) * field.coeffs)
