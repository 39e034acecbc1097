import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpwave.dynamics import (
    SolverConfig,
    Trajectory,
    dark_soliton,
    evolve_gp,
    evolve_hydro,
    gl_energy,
    mass,
    save_trajectory,
    strang_step,
)
from gpwave.errors import NoTravellingWave, NonFinite, NotAdmissible
from gpwave.grid import SpectralField, VectorField, make_grid, read_snapshot
from gpwave.linear import GP_DISPERSION, LinearPair, leps_propagate
from gpwave.madelung import HydroState, from_hydro, min_modulus, to_hydro

SQRT2 = math.sqrt(2.0)


def gaussian_state(g, eps, amp=1.0, phase=0.5, width=1.0):
    x = g.mesh()
    r2 = sum(c**2 for c in x)
    a = SpectralField(g, amp * np.exp(-r2 / width**2))
    phi = phase * np.exp(-r2 / width**2)
    u = 2 * np.stack([g.inverse(1j * k * g.forward(phi)).real for k in g.xi_odd])
    return HydroState(a, VectorField.from_array(g, u), eps)


def test_constant_is_fixed_point():
    g = make_grid(2, 16, 10.0)
    one = SpectralField.constant(g, 1.0)
    assert np.array_equal(strang_step(one, 0.3, 0.1).values, one.values)
    tr = evolve_gp(one, 0.3, SolverConfig(dt=0.01, t_max=0.1))
    assert all(lg["energy"] == 0 for lg in tr.logs)
    assert np.max(np.abs(tr.snapshots[-1].values - 1)) < 1e-15


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 2.0), st.floats(-0.5, 0.5))
def test_uniform_state_rotates_exactly(r, dt):
    # spatially constant data: the linear flow is trivial, the phase turns at (r^2 - 1) / eps
    g = make_grid(1, 16, 4.0)
    eps = 0.3
    out = strang_step(SpectralField.constant(g, r), eps, dt).values
    assert np.max(np.abs(np.abs(out) - r)) < 1e-13
    assert np.max(np.abs(out - r * np.exp(-1j * dt / eps * (r**2 - 1)))) < 1e-12


def test_strang_reversible():
    g = make_grid(1, 256, 20.0)
    psi = from_hydro(gaussian_state(g, 0.3))
    back = strang_step(strang_step(psi, 0.3, 0.01), 0.3, -0.01)
    assert np.max(np.abs(back.values - psi.values)) < 1e-11


def test_strang_second_order_against_fine_reference():
    g = make_grid(1, 256, 20.0)
    eps = 0.3
    psi0 = from_hydro(gaussian_state(g, eps))
    ref = evolve_gp(psi0, eps, SolverConfig(dt=0.02 / 8, t_max=0.5, log_every=10**9)).snapshots[-1].values
    errs = [g.l2(evolve_gp(psi0, eps, SolverConfig(dt=dt, t_max=0.5, log_every=10**9)).snapshots[-1].values - ref)
            for dt in (0.02, 0.01)]
    assert 3.5 <= errs[0] / errs[1] <= 4.5 * 1.2


def test_soliton_moves_by_c_dt():
    g = make_grid(1, 1024, 80.0)
    sol = dark_soliton(0.5, g)
    dt = 0.01
    psi = sol.field
    for _ in range(10):
        psi = strang_step(psi, 1.0, dt)

    def center(f):
        c1 = g.forward(1 - np.abs(f.values) ** 2)[1]
        return -np.angle(c1) / g.dk

    L = g.box_length
    moved = (center(psi) - center(sol.field) + L / 2) % L - L / 2
    assert abs(moved - sol.lab_speed * 10 * dt) < 1e-4 * 10 * dt


def test_conservation_small_gaussian():
    g = make_grid(1, 1024, 120.0)
    eps = 0.3
    x = g.x[0]
    psi0 = from_hydro(HydroState(SpectralField(g, 0.1 * np.exp(-(x**2) / 64)), VectorField.zeros(g), eps))
    tr = evolve_gp(psi0, eps, SolverConfig(dt=1e-3, t_max=10.0, log_every=500))
    e = np.array([lg["energy"] for lg in tr.logs])
    m = np.array([lg["mass"] for lg in tr.logs])
    assert np.max(np.abs(e - e[0])) / e[0] < 1e-8
    assert np.max(np.abs(m - m[0])) < 1e-9 * max(1.0, abs(m[0]))


def test_stops_on_vortex():
    # slow gray soliton: min |psi| = c / sqrt(2) sits below the threshold from the first step
    g = make_grid(1, 1024, 80.0)
    sol = dark_soliton(0.1, g)
    cfg = SolverConfig(dt=1e-2, t_max=1.0, stop_on_vortex=True, vortex_threshold=0.2)
    tr = evolve_gp(sol.field, 1.0, cfg)
    assert tr.stop_reason == "vortex" and tr.times[-1] == pytest.approx(0.01)
    assert tr.logs[-1]["min_modulus"] < 0.2 and "node" in tr.logs[-1]
    fast = evolve_gp(dark_soliton(1.0, g).field, 1.0, SolverConfig(dt=1e-2, t_max=0.1, stop_on_vortex=True,
                                                                     vortex_threshold=0.2))
    assert fast.stop_reason is None


def test_nonfinite_detected():
    g = make_grid(1, 16, 4.0)
    bad = SpectralField(g, np.full(g.shape, np.nan, dtype=complex))
    with pytest.raises(NonFinite):
        evolve_gp(bad, 1.0, SolverConfig(dt=0.1, t_max=0.2))


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(dt=0.0, t_max=1.0)
    with pytest.raises(ValueError):
        SolverConfig(dt=1.0, t_max=0.5)
    cfg = SolverConfig(dt=0.3, t_max=1.0, record_times=[0.5])
    steps = cfg.schedule()
    assert sum(h for h, _ in steps) == pytest.approx(1.0)
    assert [i for i, (_, r) in enumerate(steps) if r] == [1, 3]


def test_trajectory_times_increase():
    tr = Trajectory()
    tr.append(0.0, None, {})
    with pytest.raises(ValueError):
        tr.append(0.0, None, {})


def test_hydro_zero_and_admissibility():
    g = make_grid(2, 16, 10.0)
    zero = HydroState(SpectralField(g, np.zeros(g.shape)), VectorField.zeros(g), 0.3)
    tr = evolve_hydro(zero, SolverConfig(dt=0.01, t_max=0.05))
    assert all(np.max(np.abs(s.a.values)) == 0 for s in tr.snapshots)
    with pytest.raises(NotAdmissible):
        evolve_hydro(HydroState(SpectralField(g, np.full(g.shape, -10.0)), VectorField.zeros(g), 0.3),
                     SolverConfig(dt=0.01, t_max=0.05))


def test_hydro_matches_gp_through_madelung():
    g = make_grid(1, 256, 20.0)
    eps = 0.3
    st_ = gaussian_state(g, eps)
    tg = evolve_gp(from_hydro(st_), eps, SolverConfig(dt=1e-3, t_max=1.0, record_times=[0.5, 1.0]))
    th = evolve_hydro(st_, SolverConfig(dt=2e-3, t_max=1.0, record_times=[0.5, 1.0]))
    for t in (0.5, 1.0):
        hg, hh = to_hydro(tg.at(t), eps), th.at(t)
        diff = np.hypot(g.l2(hg.a.values - hh.a.values), g.l2(hg.u.values - hh.u.values))
        assert diff / np.hypot(hh.a.norm(), hh.u.norm()) < 1e-3


def test_hydro_linear_regime_matches_leps():
    g = make_grid(1, 256, 40.0)
    eps = 0.3
    st_ = gaussian_state(g, eps, amp=1e-6, phase=0.5e-6, width=2.0)
    th = evolve_hydro(st_, SolverConfig(dt=5e-3, t_max=1.0))
    h = th.snapshots[-1]
    w = leps_propagate(LinearPair(st_.a, st_.u), 1.0, eps, GP_DISPERSION)
    num = np.hypot(g.l2(h.a.values - w.a.values), g.l2(h.u.values - w.u.values))
    # the linearized hydro system is L_eps with the GP dispersion, not the bare wave system
    assert num / np.hypot(w.a.norm(), w.u.norm()) < 1e-6


def test_hydro_preserves_curl_free():
    g = make_grid(2, 64, 16.0)
    st_ = gaussian_state(g, 0.3)
    tr = evolve_hydro(st_, SolverConfig(dt=2e-3, t_max=0.2, log_every=50))
    assert max(lg["curl"] for lg in tr.logs) < 1e-8


def test_gl_energy_examples():
    g = make_grid(2, 32, 2 * np.pi)
    assert gl_energy(SpectralField.constant(g, 1.0)) == 0
    x, y = g.mesh()
    wave = SpectralField(g, np.exp(1j * (2 * x + y)))
    assert gl_energy(wave) == pytest.approx(0.5 * 5 * (2 * np.pi) ** 2, rel=1e-12)


def test_gl_energy_against_fine_quadrature():
    g = make_grid(1, 32, 2 * np.pi)
    rng = np.random.default_rng(2)
    c = np.zeros(32, complex)
    idx = [k % 32 for k in range(-3, 4)]
    c[idx] = 0.1 * (rng.standard_normal(7) + 1j * rng.standard_normal(7))
    c[0] += np.sqrt(32)
    psi = SpectralField.from_coeffs(g, c)
    # fine-grid oracle: evaluate the trigonometric polynomial on 4096 points
    xf = np.linspace(-np.pi, np.pi, 4096, endpoint=False)
    ks = np.array([k for k in range(-3, 4)])
    coef = np.array([c[k % 32] for k in ks]) / np.sqrt(32)
    phase = np.exp(1j * np.outer(xf + np.pi, ks))
    f = phase @ coef
    df = phase @ (1j * ks * coef)
    oracle = np.mean(0.5 * np.abs(df) ** 2 + 0.25 * (1 - np.abs(f) ** 2) ** 2) * 2 * np.pi
    assert gl_energy(psi) == pytest.approx(oracle, rel=1e-10)


def test_dark_soliton_examples():
    g = make_grid(1, 1024, 80.0)
    black = dark_soliton(0.0, g)
    value, node = min_modulus(black.field)
    assert value < 1e-12 and g.x[0].ravel()[node[0]] == pytest.approx(0.0)
    with pytest.raises(NoTravellingWave):
        dark_soliton(1.5, g)
    with pytest.raises(ValueError):
        dark_soliton(0.5, make_grid(1, 64, 10.0))


@settings(max_examples=10, deadline=None)
@given(st.floats(-1.35, 1.35))
def test_dark_soliton_residual_and_far_field(c):
    g = make_grid(1, 2048, 160.0)
    sol = dark_soliton(c, g)
    assert sol.residual() < 1e-8
    far = np.abs(sol.field.values[[0, -1]]) ** 2
    assert np.allclose(far, 1.0, atol=1e-12)


def test_soliton_speed_tracking():
    eps = 0.4
    c = math.sqrt(2 - eps**2)
    g = make_grid(1, 1024, 160.0)
    sol = dark_soliton(c, g)
    assert sol.residual() < 1e-8
    ts = list(np.linspace(0, 20, 11)[1:])
    tr = evolve_gp(sol.field, 1.0, SolverConfig(dt=0.01, t_max=20, record_times=ts))
    pos = np.unwrap([-np.angle(g.forward(1 - np.abs(p.values) ** 2)[1]) for p in tr.snapshots]) / g.dk
    speed = np.polyfit(tr.times, pos, 1)[0] - 2 * sol.boost
    assert abs(speed - c) / c < 1e-3


def test_save_trajectory(tmp_path):
    g = make_grid(1, 16, 4.0)
    tr = evolve_gp(SpectralField.constant(g, 1.0), 0.5, SolverConfig(dt=0.1, t_max=0.2))
    side = save_trajectory(tr, tmp_path)
    meta = json.loads(side.read_text())
    assert meta["times"] == tr.times
    f, t = read_snapshot(tmp_path / meta["files"][-1][0])
    assert t == pytest.approx(tr.times[-1])
    assert mass(f) == pytest.approx(0.0, abs=1e-12)
