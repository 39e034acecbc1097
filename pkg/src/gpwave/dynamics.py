"""Nonlinear time integration.

Two engines solve the same dynamics while ``psi`` does not vanish:

* :func:`evolve_gp` -- Strang split-step Fourier for the semiclassical
  Gross-Pitaevskii equation ``i eps psi_t + eps^2 lap psi = psi (|psi|^2 - 1)``
  (``eps = 1`` is the unscaled equation);
* :func:`evolve_hydro` -- classical RK4 for the scaled hydrodynamic system in
  ``(a, u)``, all derivatives spectral, quantum pressure kept exactly.

Times are those of the semiclassical equation, which coincide with the slow
time of the hydrodynamic system.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import NoTravellingWave, NonFinite, NotAdmissible
from .grid import SpectralField, TorusGrid, VectorField, write_snapshot
from .madelung import RHO_BAND, SQRT2, VORTEX_THRESHOLD, HydroState

__all__ = [
    "SolverConfig",
    "Trajectory",
    "default_dt",
    "strang_step",
    "evolve_gp",
    "evolve_hydro",
    "gl_energy",
    "hydro_energy",
    "mass",
    "DarkSoliton",
    "dark_soliton",
    "save_trajectory",
]


@dataclass
class SolverConfig:
    dt: float
    t_max: float
    log_every: int = 1
    dealias: bool = True
    stop_on_vortex: bool = False
    record_times: Sequence[float] | None = None
    vortex_threshold: float = VORTEX_THRESHOLD
    band: tuple[float, float] = RHO_BAND

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_max >= self.dt:
            raise ValueError(f"t_max must be >= dt, got t_max={self.t_max}, dt={self.dt}")
        if self.log_every < 1:
            raise ValueError("log_every must be >= 1")

    def schedule(self) -> list[tuple[float, bool]]:
        """Step sizes and record flags; record times are hit exactly."""
        steps: list[tuple[float, bool]] = []
        if self.record_times is not None:
            marks = sorted({float(t) for t in self.record_times if 0 < t <= self.t_max + 1e-12})
            if not marks or marks[-1] < self.t_max - 1e-12:
                marks.append(float(self.t_max))
            t_prev = 0.0
            for t in marks:
                m = max(1, math.ceil((t - t_prev) / self.dt - 1e-9))
                h = (t - t_prev) / m
                steps.extend((h, False) for _ in range(m - 1))
                steps.append((h, True))
                t_prev = t
            return steps
        m = max(1, math.ceil(self.t_max / self.dt - 1e-9))
        h = self.t_max / m
        return [(h, (i + 1) % self.log_every == 0 or i == m - 1) for i in range(m)]


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    logs: list[dict] = field(default_factory=list)
    stop_reason: str | None = None

    def append(self, t: float, state, log: dict):
        if self.times and not t > self.times[-1]:
            raise ValueError("trajectory times must be strictly increasing")
        self.times.append(float(t))
        self.snapshots.append(state)
        self.logs.append(log)

    def __len__(self):
        return len(self.times)

    def at(self, t: float, tol: float = 1e-9):
        for ti, s in zip(self.times, self.snapshots):
            if abs(ti - t) <= tol:
                return s
        raise KeyError(f"no snapshot at t={t}")


def default_dt(grid: TorusGrid, eps: float) -> float:
    """Dispersive and acoustic CFL-type guard ``min(0.2 dx^2 / eps, 0.1 dx / sqrt 2)``."""
    return min(0.2 * grid.dx**2 / eps, 0.1 * grid.dx / SQRT2)


def gl_energy(psi: SpectralField, eps: float = 1.0) -> float:
    """``int 1/2 |grad psi|^2 + (1 - |psi|^2)^2 / (4 eps^2)`` over the box."""
    g = psi.grid
    kinetic = 0.5 * float(np.sum(g.xi2 * np.abs(psi.coeffs) ** 2)) * g.cell_volume
    potential = g.integrate((1.0 - np.abs(psi.values) ** 2) ** 2) / (4.0 * eps**2)
    return kinetic + potential


def mass(psi: SpectralField) -> float:
    return psi.grid.integrate(np.abs(psi.values) ** 2 - 1.0)


def hydro_energy(state: HydroState) -> float:
    """Energy of the field reconstructed from ``(a, u)``, without building it."""
    g = state.grid
    rho2 = state.weight
    rho = np.sqrt(np.maximum(rho2, 0.0))
    grad_rho = np.stack([g.inverse(1j * k * g.forward(rho)).real for k in g.xi_odd])
    u = state.u.values.real
    dens = 0.5 * np.sum(grad_rho**2, axis=0) + rho2 * np.sum(u**2, axis=0) / 8.0
    dens = dens + state.a.values.real ** 2 / 8.0
    return g.integrate(dens)


class _StrangKernel:
    """Cached linear propagators for one grid and eps."""

    def __init__(self, grid: TorusGrid, eps: float, dealias: bool):
        self.grid = grid
        self.eps = eps
        self.mask = grid.dealias_mask if dealias else None
        self._lin: dict[float, np.ndarray] = {}

    def linear(self, dt: float) -> np.ndarray:
        key = float(dt)
        lin = self._lin.get(key)
        if lin is None:
            lin = np.exp(-1j * self.eps * dt * self.grid.xi2)
            if self.mask is not None:
                lin = np.where(self.mask, lin, 0.0)
            if len(self._lin) > 8:
                self._lin.clear()
            self._lin[key] = lin
        return lin

    def step(self, psi: np.ndarray, dt: float) -> np.ndarray:
        half = -0.5j * dt / self.eps
        psi = psi * np.exp(half * (psi.real**2 + psi.imag**2 - 1.0))
        psi = self.grid.inverse(self.grid.forward(psi) * self.linear(dt))
        return psi * np.exp(half * (psi.real**2 + psi.imag**2 - 1.0))


def strang_step(psi: SpectralField, eps: float, dt: float, dealias: bool = False) -> SpectralField:
    """One Strang step: half nonlinear phase, exact linear flow, half nonlinear phase.

    ``dt`` may be negative (time reversal).
    """
    kernel = _StrangKernel(psi.grid, eps, dealias)
    return SpectralField(psi.grid, kernel.step(psi.values, dt))


def _gp_log(psi: SpectralField, eps: float) -> dict:
    mn, node = _min_mod(psi.values)
    return {"energy": gl_energy(psi, eps), "min_modulus": mn, "mass": mass(psi)}


def _min_mod(values: np.ndarray):
    mod = np.abs(values)
    i = int(np.argmin(mod))
    return float(mod.flat[i]), np.unravel_index(i, mod.shape)


def evolve_gp(psi0: SpectralField, eps: float, config: SolverConfig) -> Trajectory:
    """Integrate the semiclassical GP equation with Strang splitting.

    Snapshots and logs (energy, min |psi|, mass) are taken at t = 0 and at
    every record point of ``config.schedule()``.  With ``stop_on_vortex`` the
    run ends early (``stop_reason = "vortex"``) once min |psi| drops below the
    threshold; non-finite values raise :class:`NonFinite`.
    """
    g = psi0.grid
    values = np.array(psi0.values, dtype=complex)
    if not np.all(np.isfinite(values)):
        raise NonFinite(0)
    kernel = _StrangKernel(g, eps, config.dealias)
    traj = Trajectory()
    traj.append(0.0, SpectralField(g, values), _gp_log(psi0, eps))
    t = 0.0
    for i, (h, record) in enumerate(config.schedule(), start=1):
        values = kernel.step(values, h)
        t += h
        if not np.all(np.isfinite(values)):
            raise NonFinite(i, traj)
        if config.stop_on_vortex:
            mn, node = _min_mod(values)
            if mn < config.vortex_threshold:
                psi = SpectralField(g, values)
                log = _gp_log(psi, eps)
                log["node"] = [int(j) for j in node]
                traj.append(t, psi, log)
                traj.stop_reason = "vortex"
                return traj
        if record:
            psi = SpectralField(g, values)
            traj.append(t, psi, _gp_log(psi, eps))
    return traj


class _HydroRHS:
    def __init__(self, grid: TorusGrid, eps: float, dealias: bool):
        self.g = grid
        self.eps = eps
        self.mask = grid.dealias_mask if dealias else np.ones(grid.shape, dtype=bool)
        self.ik = [1j * k for k in grid.xi_odd]

    def __call__(self, a_hat: np.ndarray, u_hat: np.ndarray):
        g, eps, ik = self.g, self.eps, self.ik
        a = g.inverse(a_hat).real
        u = np.stack([g.inverse(uh).real for uh in u_hat])
        base = SQRT2 + eps * a
        if np.any(base <= 0):
            raise NotAdmissible("sqrt(2) + eps a became non-positive")
        s = np.sqrt(base)
        q = g.inverse(-g.xi2 * g.forward(s)).real / s
        q_hat = g.forward(q)
        ke_hat = g.forward(0.5 * np.sum(u**2, axis=0))
        div_u = sum(ik[j] * u_hat[j] for j in range(g.dim))
        div_au = sum(ik[j] * g.forward(a * u[j]) for j in range(g.dim))
        da = -SQRT2 * div_u - eps * div_au
        du = np.stack([-SQRT2 * ik[j] * a_hat + eps * ik[j] * (2.0 * q_hat - ke_hat) for j in range(g.dim)])
        return da * self.mask, du * self.mask


def _hydro_state(g: TorusGrid, a_hat, u_hat, eps) -> HydroState:
    a = g.inverse(a_hat).real
    u = np.stack([g.inverse(uh).real for uh in u_hat])
    return HydroState(SpectralField(g, a), VectorField.from_array(g, u), eps)


def _hydro_log(state: HydroState) -> dict:
    w = state.weight
    return {
        "energy": hydro_energy(state),
        "rho_min": float(np.sqrt(max(w.min(), 0.0))),
        "rho_max": float(np.sqrt(w.max())),
        "curl": state.curl(),
    }


def evolve_hydro(state0: HydroState, config: SolverConfig) -> Trajectory:
    """RK4 integration of the scaled hydrodynamic system.

    The convective term uses ``grad(|u|^2 / 2)``, equal to ``u . grad u`` for
    potential flow, which keeps the solenoidal part of ``u`` frozen.  The run
    stops with ``stop_reason = "band"`` when ``rho`` leaves ``config.band``.
    """
    g = state0.grid
    eps = state0.eps
    if not state0.is_admissible():
        raise NotAdmissible("initial state has 1 + eps a / sqrt(2) <= 0")
    rhs = _HydroRHS(g, eps, config.dealias)
    a_hat = g.forward(state0.a.values.real) * rhs.mask
    u_hat = np.stack([g.forward(c.values.real) for c in state0.u]) * rhs.mask
    traj = Trajectory()
    s0 = _hydro_state(g, a_hat, u_hat, eps)
    traj.append(0.0, s0, _hydro_log(s0))
    if not s0.in_band(config.band):
        traj.stop_reason = "band"
        return traj
    t = 0.0
    for i, (h, record) in enumerate(config.schedule(), start=1):
        try:
            k1a, k1u = rhs(a_hat, u_hat)
            k2a, k2u = rhs(a_hat + 0.5 * h * k1a, u_hat + 0.5 * h * k1u)
            k3a, k3u = rhs(a_hat + 0.5 * h * k2a, u_hat + 0.5 * h * k2u)
            k4a, k4u = rhs(a_hat + h * k3a, u_hat + h * k3u)
        except NotAdmissible:
            traj.stop_reason = "band"
            return traj
        a_hat = a_hat + h / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a)
        u_hat = u_hat + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
        t += h
        if not (np.all(np.isfinite(a_hat)) and np.all(np.isfinite(u_hat))):
            raise NonFinite(i, traj)
        a_min = g.inverse(a_hat).real
        w = 1.0 + eps / SQRT2 * a_min
        lo, hi = config.band
        out_of_band = bool(w.min() < lo**2 or w.max() > hi**2)
        if record or out_of_band:
            st = _hydro_state(g, a_hat, u_hat, eps)
            traj.append(t, st, _hydro_log(st))
        if out_of_band:
            traj.stop_reason = "band"
            return traj
    return traj


@dataclass
class DarkSoliton:
    """One-dimensional GP travelling wave ``psi(x - c t)`` sampled on a periodic grid.

    ``field`` carries an extra winding ``exp(i k x)`` that cancels the phase
    jump of the kink so the sample is periodic; by Galilean invariance it
    travels at ``lab_speed = c + 2 k`` (with a uniform phase rotation).
    """

    grid: TorusGrid
    speed: float
    boost: float
    field: SpectralField

    @property
    def lab_speed(self) -> float:
        return self.speed + 2.0 * self.boost

    @property
    def depth(self) -> float:
        """``1 - min |psi|^2``."""
        return 1.0 - 0.5 * self.speed**2

    @property
    def width(self) -> float:
        """Inverse steepness ``2 / sqrt(2 - c^2)`` of the tanh profile."""
        return 2.0 / math.sqrt(2.0 - self.speed**2)

    @staticmethod
    def profile(x: np.ndarray, c: float) -> np.ndarray:
        kappa = math.sqrt(2.0 - c * c)
        return math.sqrt((2.0 - c * c) / 2.0) * np.tanh(0.5 * kappa * x) + 1j * c / SQRT2

    def residual(self) -> float:
        """Relative L2 residual of ``-i c psi' + psi'' - psi (|psi|^2 - 1)``.

        Derivatives are taken spectrally on the periodic sample and the
        winding is removed analytically, so the boundary never enters.
        """
        g, c, k = self.grid, self.speed, self.boost
        phi_hat = self.field.coeffs
        ikx = 1j * g.xi_odd[0]
        phi = self.field.values
        d1 = g.inverse(ikx * phi_hat)
        d2 = g.inverse(-g.xi2 * phi_hat)
        undo = np.exp(-1j * k * g.x[0])
        psi = phi * undo
        psi_1 = (d1 - 1j * k * phi) * undo
        psi_2 = (d2 - 2j * k * d1 - k * k * phi) * undo
        res = -1j * c * psi_1 + psi_2 - psi * (np.abs(psi) ** 2 - 1.0)
        scale = g.l2(psi_2) + g.l2(c * psi_1)
        return g.l2(res) / scale


def dark_soliton(c: float, grid: TorusGrid, center: float = 0.0) -> DarkSoliton:
    """Dark soliton of speed ``c`` (``|c| < sqrt 2``) centred at ``center``."""
    if grid.dim != 1:
        raise ValueError("dark solitons are one-dimensional")
    if not abs(c) < SQRT2:
        raise NoTravellingWave(f"|c| = {abs(c)} must be below sqrt(2)")
    kappa = math.sqrt(2.0 - c * c)
    tail = 1.0 - math.tanh(0.5 * kappa * (0.5 * grid.box_length - abs(center)))
    if tail > 1e-12:
        raise ValueError(f"box too short: tanh tail {tail:.2e} at the boundary exceeds 1e-12")
    theta_plus = math.atan2(c / SQRT2, math.sqrt(1.0 - 0.5 * c * c))
    theta_minus = math.atan2(c / SQRT2, -math.sqrt(1.0 - 0.5 * c * c))
    jump = (theta_minus - theta_plus + math.pi) % (2 * math.pi) - math.pi
    boost = jump / grid.box_length
    x = grid.x[0]
    values = DarkSoliton.profile(x - center, c) * np.exp(1j * boost * (x - center))
    return DarkSoliton(grid, float(c), boost, SpectralField(grid, values))


def save_trajectory(traj: Trajectory, directory, prefix: str = "snap") -> Path:
    """Write snapshots as ``.gpwf`` files plus a JSON sidecar with times and logs."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files = []
    for i, (t, snap) in enumerate(zip(traj.times, traj.snapshots)):
        if isinstance(snap, SpectralField):
            name = f"{prefix}_{i:05d}.gpwf"
            write_snapshot(directory / name, snap, t)
            files.append([name])
        else:
            names = [f"{prefix}_{i:05d}_a.gpwf"]
            write_snapshot(directory / names[0], snap.a, t)
            for j, comp in enumerate(snap.u):
                names.append(f"{prefix}_{i:05d}_u{j}.gpwf")
                write_snapshot(directory / names[-1], comp, t)
            files.append(names)
    sidecar = {"times": traj.times, "logs": traj.logs, "files": files, "stop_reason": traj.stop_reason}
    path = directory / f"{prefix}.json"
    path.write_text(json.dumps(sidecar, indent=1, sort_keys=True))
    return path
