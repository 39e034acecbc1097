"""Dyadic Littlewood-Paley decomposition on the torus and the norms built on it.

``chi`` is a smooth radial profile equal to 1 on ``|xi| <= 1.1`` and to 0 on
``|xi| >= 4/3``; ``phi(xi) = chi(xi / 2) - chi(xi)`` is supported in the annulus
``1.1 <= |xi| <= 8/3``.  Blocks are ``Delta_{-1} = chi(D)`` and
``Delta_q = phi(2^-q D)`` for ``0 <= q < q_max``.  The top block absorbs
everything above, ``Delta_{q_max} = 1 - chi(2^-q_max D)``, so the blocks sum to
the identity at every lattice point; the part of the top block beyond its
annulus is reported as the truncation of each norm.

All norms are physical integrals over the box (nodal quadrature).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegenerateBound, GridTooCoarse, NotAdmissible
from .grid import SpectralField, TorusGrid, VectorField, grad_array
from .madelung import AugmentedState

FLAT = 1.1
OUTER = 4.0 / 3.0

__all__ = [
    "DyadicPartition",
    "NormReport",
    "chi_profile",
    "build_partition",
    "dyadic_block",
    "besov_norm",
    "sobolev_norm",
    "split_low_high",
    "gamma_weighted",
    "lipschitz_norm",
    "commutator",
    "commutator_ratio",
    "tame_ratio",
    "rouge_ratio",
]


def _bump(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def chi_profile(r) -> np.ndarray:
    """Smooth radial cutoff: 1 for ``r <= 1.1``, 0 for ``r >= 4/3``."""
    t = (np.asarray(r, dtype=float) - FLAT) / (OUTER - FLAT)
    hi, lo = _bump(1.0 - t), _bump(t)
    return hi / (hi + lo)


def phi_profile(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return chi_profile(r / 2.0) - chi_profile(r)


@dataclass(frozen=True)
class DyadicPartition:
    grid: TorusGrid
    q_max: int
    q_min: int = -1

    @property
    def levels(self) -> range:
        return range(self.q_min, self.q_max + 1)

    def chi(self, r):
        return chi_profile(r)

    def phi(self, r):
        return phi_profile(r)

    def symbol(self, q: int) -> np.ndarray:
        if q < self.q_min or q > self.q_max:
            raise ValueError(f"block index {q} outside [{self.q_min}, {self.q_max}]")
        r = self.grid.xi_abs
        if q == -1:
            return chi_profile(r)
        if q == self.q_max:
            return 1.0 - chi_profile(r / 2.0**q)
        return phi_profile(r / 2.0**q)

    def lowpass_symbol(self, q: int) -> np.ndarray:
        """``S_q = chi(2^-q D)``; equals the sum of blocks ``< q``."""
        return chi_profile(self.grid.xi_abs / 2.0**q)

    @cached_property
    def symbols(self) -> dict[int, np.ndarray]:
        return {q: self.symbol(q) for q in self.levels}

    @cached_property
    def tail_symbol(self) -> np.ndarray:
        """Frequencies of the top block beyond its annulus, ``1 - chi(2^-(q_max+1) D)``."""
        return 1.0 - chi_profile(self.grid.xi_abs / 2.0 ** (self.q_max + 1))

    def identity_residual(self) -> float:
        total = sum(self.symbols.values())
        return float(np.max(np.abs(total - 1.0)))


def build_partition(grid: TorusGrid) -> DyadicPartition:
    q_max = int(math.floor(math.log2(grid.nyquist * 3.0 / 8.0))) if grid.nyquist * 3.0 / 8.0 >= 1 else -2
    if q_max - (-1) + 1 < 3:
        raise GridTooCoarse(f"grid supports blocks -1..{q_max}; at least three are needed")
    return DyadicPartition(grid, q_max)


def _coeffs(u) -> np.ndarray:
    """Fourier coefficients with leading component axes (scalar -> shape (1, ...)).

    Accepts a scalar field, a vector field, or any sequence of scalar fields
    (treated as one stacked quantity, e.g. ``(b, z)``).
    """
    if isinstance(u, VectorField):
        return u.coeffs
    if isinstance(u, SpectralField):
        return u.coeffs[None]
    if isinstance(u, (list, tuple)):
        return np.concatenate([_coeffs(c) for c in u])
    raise TypeError(f"expected SpectralField, VectorField or a sequence, got {type(u).__name__}")


def _grid(u) -> TorusGrid:
    if isinstance(u, (list, tuple)):
        return _grid(u[0])
    return u.grid


def _partition(u, partition) -> DyadicPartition:
    return partition if partition is not None else build_partition(_grid(u))


def _l2_coeffs(grid: TorusGrid, c: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(c) ** 2) * grid.cell_volume))


def dyadic_block(u, q: int, kind: str = "delta", partition: DyadicPartition | None = None):
    """``Delta_q u`` (``kind="delta"``) or ``S_q u`` (``kind="lowpass"``)."""
    if isinstance(u, (list, tuple)):
        return [dyadic_block(c, q, kind, partition) for c in u]
    p = _partition(u, partition)
    if kind == "delta":
        sym = p.symbol(q)
    elif kind == "lowpass":
        if q < 0 or q > p.q_max + 1:
            raise ValueError(f"lowpass index {q} outside [0, {p.q_max + 1}]")
        sym = p.lowpass_symbol(q)
    else:
        raise ValueError("kind must be 'delta' or 'lowpass'")
    if isinstance(u, VectorField):
        return VectorField([SpectralField.from_coeffs(u.grid, sym * c.coeffs) for c in u])
    return SpectralField.from_coeffs(u.grid, sym * u.coeffs)


@dataclass
class NormReport:
    kind: str
    value: float
    s: float | None = None
    r: float | None = None
    per_block: list[tuple[int, float]] = field(default_factory=list)
    q_max: int | None = None
    truncation: float = 0.0

    def to_row(self) -> dict:
        row = asdict(self)
        row["per_block"] = [[int(q), float(v)] for q, v in self.per_block]
        if self.r is not None and math.isinf(self.r):
            row["r"] = "inf"
        return row


def _block_norms(u, partition: DyadicPartition) -> list[tuple[int, float]]:
    g = _grid(u)
    c = _coeffs(u)
    return [(q, _l2_coeffs(g, partition.symbols[q] * c)) for q in partition.levels]


def besov_norm(u, s: float, r: float = 2.0, partition: DyadicPartition | None = None) -> NormReport:
    """``|| (2^{qs} ||Delta_q u||_2)_q ||_{l^r}``; ``r = inf`` takes the sup over blocks."""
    if not (r >= 1):
        raise ValueError("r must lie in [1, inf]")
    p = _partition(u, partition)
    blocks = [(q, 2.0 ** (q * s) * v) for q, v in _block_norms(u, p)]
    vals = np.array([v for _, v in blocks])
    value = float(vals.max()) if math.isinf(r) else float(np.sum(vals**r) ** (1.0 / r))
    tail = _l2_coeffs(_grid(u), p.tail_symbol * _coeffs(u)) * 2.0 ** (p.q_max * s)
    return NormReport("besov", value, s, r, blocks, p.q_max, tail)


def sobolev_norm(u, s: float, method: str = "direct", partition: DyadicPartition | None = None) -> NormReport:
    if method == "blocks":
        rep = besov_norm(u, s, 2.0, partition)
        rep.kind = "sobolev-blocks"
        return rep
    if method != "direct":
        raise ValueError("method must be 'direct' or 'blocks'")
    g = _grid(u)
    w = (1.0 + g.xi2) ** (s / 2.0)
    return NormReport("sobolev", _l2_coeffs(g, w * _coeffs(u)), s)


def split_low_high(u, eps: float):
    """``(chi(eps D) u, (1 - chi(eps D)) u)``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    g = _grid(u)
    low = chi_profile(eps * g.xi_abs)

    def apply(sym):
        if isinstance(u, (list, tuple)):
            return [SpectralField.from_coeffs(g, sym * c.coeffs) for c in u]
        if isinstance(u, VectorField):
            return VectorField([SpectralField.from_coeffs(g, sym * c.coeffs) for c in u])
        return SpectralField.from_coeffs(g, sym * u.coeffs)

    return apply(low), apply(1.0 - low)


def _multi_indices(dim: int, s: int):
    return [a for a in itertools.product(range(s + 1), repeat=dim) if sum(a) == s]


def _derivative_coeffs(grid: TorusGrid, c: np.ndarray, alpha) -> np.ndarray:
    out = c
    for j, m in enumerate(alpha):
        if m:
            k = grid.xi[j] if m % 2 == 0 else grid.xi_odd[j]
            out = out * (1j * k) ** m
    return out


def gamma_weighted(state: AugmentedState, s: int) -> float:
    """``sum_{|alpha|=s} ||d^alpha b||^2 + ||d^alpha z||^2`` with ``z`` weighted by ``|psi|^2``."""
    if s < 0 or int(s) != s:
        raise ValueError("s must be a nonnegative integer")
    g = state.grid
    w = state.weight
    if np.any(w <= 0):
        raise NotAdmissible("weight left (0, inf)")
    b_hat = state.b.coeffs
    z_hat = state.z.coeffs
    total = 0.0
    for alpha in _multi_indices(g.dim, int(s)):
        total += _l2_coeffs(g, _derivative_coeffs(g, b_hat, alpha)) ** 2
        dz = g.inverse(_derivative_coeffs(g, z_hat, alpha))
        total += float(np.sum(w * np.abs(dz) ** 2) * g.cell_volume)
    return total


def lipschitz_norm(u) -> float:
    """``sup |u| + sup |grad u|`` over the nodes, gradient taken spectrally."""
    g = _grid(u)
    c = _coeffs(u)
    vals = g.inverse(c)
    sup = float(np.max(np.sqrt(np.sum(np.abs(vals) ** 2, axis=0))))
    grads = np.concatenate([grad_array(g, ci) for ci in c])
    gsup = float(np.max(np.sqrt(np.sum(np.abs(grads) ** 2, axis=0))))
    return sup + gsup


def _grad_field(a: SpectralField) -> VectorField:
    return VectorField.from_array(a.grid, grad_array(a.grid, a.coeffs))


def commutator(a: SpectralField, f: SpectralField, q: int, partition: DyadicPartition | None = None) -> SpectralField:
    """``[a, Delta_q] f = a Delta_q f - Delta_q (a f)``."""
    p = _partition(a, partition)
    g = a.grid
    sym = p.symbols[q] if q in p.symbols else p.symbol(q)
    vals = a.values * g.inverse(sym * f.coeffs) - g.inverse(sym * g.forward(a.values * f.values))
    return SpectralField(g, vals)


def commutator_ratio(
    a: SpectralField, f: SpectralField, q: int | None, s: float, partition: DyadicPartition | None = None
):
    """Measured constant in ``||[a, Delta_q] f|| <= C 2^{-qs} (||Da||_inf ||f||_{B^{s-1}} + ||Da||_{B^{s-1}} ||f||_inf)``.

    Besov norms are ``B^{s-1}_{2,1}``.  With ``q=None`` returns ``(max ratio, per-q list)``.
    """
    p = _partition(a, partition)
    g = a.grid
    da = _grad_field(a)
    da_inf = float(np.max(np.sqrt(np.sum(np.abs(da.values) ** 2, axis=0))))
    f_inf = float(np.max(np.abs(f.values)))
    bound = da_inf * besov_norm(f, s - 1, 1.0, p).value + besov_norm(da, s - 1, 1.0, p).value * f_inf
    if not bound > 0:
        raise DegenerateBound("right-hand side of the commutator bound vanishes")

    def one(qq):
        lhs = g.l2(commutator(a, f, qq, p).values)
        return lhs / (2.0 ** (-qq * s) * bound)

    if q is not None:
        return one(q)
    ratios = [(qq, one(qq)) for qq in p.levels]
    return max(r for _, r in ratios), ratios


def tame_ratio(u: SpectralField, v: SpectralField, k: float) -> float:
    """``||uv||_{H^k} / (||u||_inf ||v||_{H^k} + ||v||_inf ||u||_{H^k})``."""
    g = u.grid
    uv = SpectralField(g, u.values * v.values)
    num = sobolev_norm(uv, k).value
    den = np.max(np.abs(u.values)) * sobolev_norm(v, k).value + np.max(np.abs(v.values)) * sobolev_norm(u, k).value
    if not den > 0:
        raise DegenerateBound("tame bound denominator vanishes")
    return float(num / den)


def rouge_ratio(state: AugmentedState, sigma: float, partition: DyadicPartition | None = None) -> float:
    """``||(b, z)||_{B^sigma} / (||(b, v)_low||_{B^sigma} + ||(eps grad b, v)_high||_{B^sigma})``, ``v = Re z``."""
    g = state.grid
    eps = state.eps
    p = _partition(state.b, partition)
    b = state.b
    z = state.z
    v = [SpectralField(g, c.values.real) for c in z]
    full = [b] + list(z)
    b_lo, b_hi = split_low_high(b, eps)
    v_lo, v_hi = split_low_high(v, eps)
    grad_b_hi = list(VectorField.from_array(g, eps * grad_array(g, b_hi.coeffs)))
    low = [b_lo] + v_lo
    high = grad_b_hi + v_hi
    den = besov_norm(low, sigma, 1.0, p).value + besov_norm(high, sigma, 1.0, p).value
    if not den > 0:
        raise DegenerateBound("split norm vanishes")
    return besov_norm(full, sigma, 1.0, p).value / den
