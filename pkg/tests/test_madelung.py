import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from gpwave.dynamics import gl_energy
from gpwave.errors import NotAdmissible, NotPotential, VortexEncountered
from gpwave.grid import SpectralField, VectorField, grad_array, make_grid
from gpwave.madelung import (
    AugmentedState,
    HydroState,
    from_augmented,
    from_hydro,
    min_modulus,
    pota_residual,
    to_augmented,
    to_hydro,
)

SQRT2 = np.sqrt(2.0)


def gaussian_psi(g, eps, amp=0.6, phase=0.4):
    x = g.mesh()
    r2 = sum(c**2 for c in x)
    a0 = amp * np.exp(-r2)
    phi0 = phase * np.exp(-r2 / 2)
    return a0, phi0, SpectralField(g, np.sqrt(1 + eps / SQRT2 * a0) * np.exp(1j * phi0))


def test_constant_states():
    g = make_grid(2, 16, 10.0)
    for psi in (SpectralField.constant(g, 1.0), SpectralField.constant(g, np.exp(0.7j))):
        h = to_hydro(psi, 0.3)
        assert np.max(np.abs(h.a.values)) < 1e-14 and np.max(np.abs(h.u.values)) < 1e-14
        s = to_augmented(psi, 0.3)
        assert np.max(np.abs(s.b.values)) < 1e-14 and np.max(np.abs(s.z.values)) < 1e-14


@pytest.mark.parametrize("dim", [1, 2])
def test_forward_construction_recovers_data(dim):
    g = make_grid(dim, 128, 16.0)
    eps = 0.3
    a0, phi0, psi = gaussian_psi(g, eps)
    h = to_hydro(psi, eps)
    assert np.max(np.abs(h.a.values.real - a0)) < 1e-10
    grad_phi = grad_array(g, g.forward(phi0)).real
    assert np.max(np.abs(h.u.values.real - 2 * grad_phi)) < 1e-10
    assert h.curl() < 1e-10


def test_real_profile_log_derivative_symbolic():
    x = sp.symbols("x")
    rho = 1 + sp.Rational(3, 10) * sp.exp(-(x**2))
    target = sp.lambdify(x, -sp.diff(sp.log(rho**2), x), "numpy")
    g = make_grid(1, 128, 24.0)
    xs = g.x[0]
    psi = SpectralField(g, sp.lambdify(x, rho, "numpy")(xs))
    s = to_augmented(psi, 0.2)
    assert np.max(np.abs(s.z.values[0].real)) < 1e-12
    assert np.max(np.abs(s.z.values[0].imag - target(xs))) < 1e-10


@pytest.mark.parametrize("normalization", ["dynaslow", "parabolic"])
def test_augmented_round_trip_up_to_phase(normalization):
    g = make_grid(2, 64, 16.0)
    _, _, psi = gaussian_psi(g, 0.25)
    psi = psi * np.exp(0.9j)
    back = from_augmented(to_augmented(psi, 0.25, normalization))
    ratio = back.values / psi.values
    assert np.max(np.abs(ratio - ratio.flat[0])) < 1e-10
    assert abs(abs(ratio.flat[0]) - 1) < 1e-12


def test_hydro_round_trips():
    g = make_grid(2, 128, 16.0)
    eps = 0.3
    a0, phi0, psi = gaussian_psi(g, eps)
    h = to_hydro(psi, eps)
    h2 = to_hydro(from_hydro(h), eps)
    assert np.max(np.abs(h2.a.values - h.a.values)) < 1e-10
    assert np.max(np.abs(h2.u.values - h.u.values)) < 1e-10
    back = from_hydro(h)
    ratio = back.values / psi.values
    assert np.max(np.abs(ratio - ratio.flat[0])) < 1e-10 and abs(abs(ratio.flat[0]) - 1) < 1e-12
    zero = HydroState(SpectralField(g, np.zeros(g.shape)), VectorField.zeros(g), eps)
    assert np.max(np.abs(from_hydro(zero).values - 1)) < 1e-15


def test_from_hydro_errors():
    g = make_grid(2, 32, 10.0)
    x, y = g.mesh()
    bad_a = HydroState(SpectralField(g, -10 * np.ones(g.shape)), VectorField.zeros(g), 0.5)
    with pytest.raises(NotAdmissible):
        from_hydro(bad_a)
    swirl = VectorField.from_array(g, np.stack([-y * np.exp(-(x**2 + y**2)), x * np.exp(-(x**2 + y**2))]))
    with pytest.raises(NotPotential):
        from_hydro(HydroState(SpectralField(g, np.zeros(g.shape)), swirl, 0.5))


def test_vortex_detection():
    g = make_grid(2, 64, 16.0)
    x, y = g.mesh()
    # planted zero at node (40, 20)
    x0, y0 = g.x[0].ravel()[40], g.x[1].ravel()[20]
    r2 = (x - x0) ** 2 + (y - y0) ** 2
    psi = SpectralField(g, np.sqrt(r2 / (r2 + 1)) * np.exp(1j * 0.0))
    value, node = min_modulus(psi)
    assert value < 0.05 and node == (40, 20)
    with pytest.raises(VortexEncountered) as exc:
        to_hydro(psi, 0.3)
    assert exc.value.node == (40, 20)
    assert min_modulus(SpectralField.constant(g, 1.0)) == (1.0, (0, 0))


def test_pota_residual_examples():
    g = make_grid(2, 64, 16.0)
    _, _, psi = gaussian_psi(g, 0.3)
    assert pota_residual(to_augmented(psi, 0.3)) < 1e-6
    x, y = g.mesh()
    b = SpectralField(g, np.exp(-(x**2 + y**2)))
    z0 = VectorField([SpectralField(g, np.zeros(g.shape)) for _ in range(2)])
    assert pota_residual(AugmentedState(b, z0, 0.3)) == pytest.approx(1.0, rel=1e-12)
    zero = AugmentedState(SpectralField(g, np.zeros(g.shape)), z0, 0.3)
    assert pota_residual(zero) == 0.0


def _weighted_z2(s):
    return s.grid.integrate(s.weight * np.sum(np.abs(s.z.values) ** 2, axis=0))


def test_energy_identity_dynaslow():
    g = make_grid(2, 64, 16.0)
    eps = 0.3
    _, _, psi = gaussian_psi(g, eps)
    s = to_augmented(psi, eps)
    assert gl_energy(psi, eps) == pytest.approx((s.b.norm() ** 2 + _weighted_z2(s)) / 8, rel=1e-8)


def test_energy_identity_parabolic():
    g = make_grid(2, 64, 16.0)
    eps = 0.3
    _, _, psi = gaussian_psi(g, eps)
    s = to_augmented(psi, eps, "parabolic")
    # |psi|^2 - 1 = eps^2 b / 2, so the potential term carries eps^4 / 2 relative to ||b||^2 / 8
    assert gl_energy(psi, 1.0) == pytest.approx((eps**4 / 2 * s.b.norm() ** 2 + _weighted_z2(s)) / 8, rel=1e-8)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 63), st.integers(0, 63))
def test_translation_commutes(i, j):
    g = make_grid(2, 64, 16.0)
    _, _, psi = gaussian_psi(g, 0.3)
    shifted = SpectralField(g, np.roll(psi.values, (i, j), axis=(0, 1)))
    h, hs = to_hydro(psi, 0.3), to_hydro(shifted, 0.3)
    assert np.array_equal(np.roll(h.a.values, (i, j), axis=(0, 1)), hs.a.values)
    assert np.max(np.abs(np.roll(h.u.values, (i, j), axis=(1, 2)) - hs.u.values)) < 1e-13
    s, ss = to_augmented(psi, 0.3), to_augmented(shifted, 0.3)
    assert np.max(np.abs(np.roll(s.z.values, (i, j), axis=(1, 2)) - ss.z.values)) < 1e-13


def test_weight_band():
    g = make_grid(1, 16, 4.0)
    st_ = AugmentedState(SpectralField(g, np.zeros(g.shape)), VectorField.zeros(g), 0.5)
    assert st_.is_admissible()
    h = HydroState(SpectralField(g, np.full(g.shape, 10.0)), VectorField.zeros(g), 0.5)
    assert not h.in_band()
