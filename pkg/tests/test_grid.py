import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpwave.errors import GridError, NonFiniteSymbol
from gpwave.grid import (
    SpectralField,
    VectorField,
    apply_multiplier,
    dealias,
    differentiate,
    make_grid,
    read_snapshot,
    transform,
    write_snapshot,
)


def random_bandlimited(g, seed, kmax=None):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    kmax = kmax if kmax is not None else 0.3 * g.nyquist
    c[g.xi_abs > kmax] = 0
    return SpectralField(g, g.inverse(c).real)


def test_lattice_with_2pi_box():
    g = make_grid(1, 8, 2 * np.pi)
    assert sorted(np.round(g.xi[0].ravel()).astype(int).tolist()) == list(range(-4, 4))


def test_grid_sizes():
    g = make_grid(2, 64, 40.0)
    assert g.shape == (64, 64)
    assert g.dk == pytest.approx(2 * np.pi / 40.0)
    g3 = make_grid(3, 64, 20.0)
    # a complex field buffer on 64^3 is 4 MB; a few dozen of them stay far below 0.5 GB
    assert 64**3 * 16 * 30 < 0.5 * 2**30
    assert g3.shape == (64, 64, 64)


@pytest.mark.parametrize("dim,n,L", [(1, 12, 1.0), (4, 8, 1.0), (1, 4, 1.0), (2, 8, 0.0)])
def test_rejects_bad_grids(dim, n, L):
    with pytest.raises(GridError):
        make_grid(dim, n, L)


def test_frequencies_odd_symmetric():
    g = make_grid(1, 16, 3.0)
    k = g.xi_odd[0]
    # mirrored index -k sits at position (n - i) mod n
    assert np.allclose(k[1:], -k[1:][::-1])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([1, 2]))
def test_round_trip_and_parseval(seed, dim):
    g = make_grid(dim, 16, 5.0)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    f = SpectralField(g, v)
    back = g.inverse(transform(f, "forward"))
    assert np.max(np.abs(back - v)) <= 1e-12 * np.max(np.abs(v))
    assert np.sqrt(np.sum(np.abs(f.coeffs) ** 2)) == pytest.approx(np.sqrt(np.sum(np.abs(v) ** 2)), rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_real_field_hermitian(seed):
    g = make_grid(2, 16, 5.0)
    f = SpectralField(g, np.random.default_rng(seed).standard_normal(g.shape))
    c = f.coeffs
    mirrored = np.conj(np.roll(np.flip(c, axis=(0, 1)), 1, axis=(0, 1)))
    assert np.max(np.abs(c - mirrored)) < 1e-12 * np.max(np.abs(c))


def test_transform_constants_and_delta():
    g = make_grid(2, 16, 5.0)
    c = transform(SpectralField.constant(g, 1.0), "forward")
    assert abs(c[0, 0]) > 0 and np.max(np.abs(c.ravel()[1:])) < 1e-12
    d = np.zeros(g.shape)
    d[3, 5] = 1.0
    mod = np.abs(transform(SpectralField(g, d), "forward"))
    assert np.ptp(mod) < 1e-12
    with pytest.raises(ValueError):
        transform(SpectralField(g, d), "sideways")


def test_multiplier_identity_and_eigenfunction():
    g = make_grid(2, 16, 2 * np.pi)
    f = random_bandlimited(g, 1)
    assert np.allclose(apply_multiplier(f, lambda xi: np.ones_like(xi[0])).values, f.values, atol=1e-14)
    x, y = g.mesh()
    wave = SpectralField(g, np.exp(1j * (2 * x + 3 * y)))
    out = apply_multiplier(wave, lambda xi: 1j * xi[0])
    assert np.max(np.abs(out.values - 2j * wave.values)) < 1e-12


def test_dispersion_multiplier_against_dense_matrix():
    # dense oracle: Fourier matrix F, diag(m), F^-1 applied to node values
    n, L, eps = 16, 8.0, 0.5
    g = make_grid(1, n, L)
    x = g.x[0]
    f = SpectralField(g, np.exp(-(x**2)))
    sym = lambda xi: np.sqrt(2) * np.abs(xi[0]) * np.sqrt(1 + eps**2 * xi[0] ** 2)
    k = np.fft.fftfreq(n, d=1.0 / n)
    F = np.exp(-2j * np.pi * np.outer(k, np.arange(n)) / n) / np.sqrt(n)
    m = sym((2 * np.pi * k / L,))
    dense = np.conj(F.T) @ (m * (F @ f.values))
    assert np.max(np.abs(apply_multiplier(f, sym).values - dense)) < 1e-10


def test_multiplier_non_finite_names_frequency():
    g = make_grid(1, 8, 2 * np.pi)
    f = SpectralField.constant(g, 1.0)
    with np.errstate(divide="ignore"):
        with pytest.raises(NonFiniteSymbol) as exc:
            apply_multiplier(f, lambda xi: 1.0 / np.abs(xi[0]))
    assert exc.value.frequency == (0.0,)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_multipliers_compose_and_commute_with_derivatives(seed):
    g = make_grid(2, 16, 6.0)
    f = random_bandlimited(g, seed)
    m1 = lambda xi: np.exp(-(xi[0] ** 2))
    m2 = lambda xi: 1 + xi[1] ** 2
    both = apply_multiplier(apply_multiplier(f, m1), m2)
    once = apply_multiplier(f, lambda xi: m1(xi) * m2(xi))
    assert np.max(np.abs(both.values - once.values)) < 1e-12 * max(1.0, np.max(np.abs(once.values)))
    lap_then = apply_multiplier(differentiate(f, "laplacian"), m1)
    then_lap = differentiate(apply_multiplier(f, m1), "laplacian")
    assert np.max(np.abs(lap_then.values - then_lap.values)) < 1e-12 * max(1.0, np.max(np.abs(lap_then.values)))


def test_derivative_examples():
    g = make_grid(2, 32, 2 * np.pi)
    x, y = g.mesh()
    f = SpectralField(g, np.sin(3 * x))
    grad = differentiate(f, "gradient")
    assert np.max(np.abs(grad[0].values - 3 * np.cos(3 * x))) < 1e-12
    assert np.max(np.abs(grad[1].values)) < 1e-12
    w = SpectralField(g, np.exp(1j * (2 * x - y)))
    assert np.max(np.abs(differentiate(w, "laplacian").values + 5 * w.values)) < 1e-12


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_div_grad_is_laplacian(seed):
    g = make_grid(2, 32, 7.0)
    f = random_bandlimited(g, seed)
    dg = differentiate(differentiate(f, "gradient"), "divergence")
    lap = differentiate(f, "laplacian")
    assert np.max(np.abs(dg.values - lap.values)) < 1e-12 * max(1.0, np.max(np.abs(lap.values)))


def test_derivative_arity_errors():
    g = make_grid(2, 8, 1.0)
    f = SpectralField.constant(g)
    with pytest.raises(TypeError):
        differentiate(f, "divergence")
    with pytest.raises(TypeError):
        differentiate(VectorField.zeros(g), "gradient")
    with pytest.raises(ValueError):
        differentiate(f, "curl")


def test_dealias_examples():
    g = make_grid(1, 64, 2 * np.pi)
    x = g.x[0]
    inside = SpectralField(g, np.cos(5 * x))
    assert np.max(np.abs(dealias(inside).values - inside.values)) < 1e-13
    nyq = SpectralField(g, np.cos(32 * x))
    assert np.max(np.abs(dealias(nyq).values)) < 1e-13


def test_dealiased_product_matches_padded_product():
    g = make_grid(1, 32, 2 * np.pi)
    rng = np.random.default_rng(3)
    # half-band fields: |k| <= n/6 each, product band n/3 is inside the 2/3 ball
    cf = np.zeros(32, complex)
    cg = np.zeros(32, complex)
    idx = [k % 32 for k in range(-5, 6)]
    cf[idx] = rng.standard_normal(11) + 1j * rng.standard_normal(11)
    cg[idx] = rng.standard_normal(11) + 1j * rng.standard_normal(11)
    f = SpectralField.from_coeffs(g, cf)
    h = SpectralField.from_coeffs(g, cg)
    prod = dealias(f * h)
    # padded-grid oracle (twice the points, more than the 3/2 needed)
    gp = make_grid(1, 64, 2 * np.pi)
    pad = lambda c: np.concatenate([c[:16], np.zeros(32, complex), c[16:]]) * np.sqrt(64 / 32)
    fp = SpectralField.from_coeffs(gp, pad(cf))
    hp = SpectralField.from_coeffs(gp, pad(cg))
    cp = (fp * hp).coeffs / np.sqrt(64 / 32)
    ref = np.concatenate([cp[:16], cp[48:]])
    ref = np.where(g.dealias_mask, ref, 0)
    assert np.max(np.abs(prod.coeffs - ref)) < 1e-12 * np.max(np.abs(ref))


def test_vector_components_share_grid():
    g = make_grid(2, 8, 1.0)
    other = make_grid(2, 8, 1.0)
    with pytest.raises(GridError):
        VectorField([SpectralField.constant(g), SpectralField.constant(other)])


def test_snapshot_round_trip(tmp_path):
    g = make_grid(2, 16, 3.5)
    f = random_bandlimited(g, 4) * (1 + 0.5j)
    path = write_snapshot(tmp_path / "f.gpwf", f, t=1.25)
    raw = path.read_bytes()
    assert raw[:4] == b"GPWF" and len(raw) == 64 + 16 * 16 * 16
    back, t = read_snapshot(path)
    assert t == 1.25 and back.grid == g
    assert np.array_equal(back.values, f.values)
    # interleaved little-endian doubles, C order
    first = np.frombuffer(raw[64:80], dtype="<f8")
    assert first[0] == f.values[0, 0].real and first[1] == f.values[0, 0].imag
