"""Periodic box discretization and Fourier machinery.

Every field in gpwave lives on a :class:`TorusGrid`: ``dim`` axes of ``n``
nodes each, spanning ``[-L/2, L/2)``.  Coefficients are stored in the
standard FFT order; the integer lattice is ``k in {-n/2, ..., n/2 - 1}`` per
axis (the Nyquist mode sits on the negative side) and the wavevector is
``xi = 2 pi k / L``.  Transforms are unitary (``norm="ortho"``), so Parseval
holds without extra factors.

Integrated quantities (L2 norms, energies) use the nodal quadrature
``sum(...) * cell_volume``, which is exact for trigonometric polynomials.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import fft as sfft

from .errors import GridError, NonFiniteSymbol

SNAPSHOT_MAGIC = b"GPWF"
SNAPSHOT_HEADER = struct.Struct("<4sIIdd")
SNAPSHOT_HEADER_SIZE = 64


@dataclass(frozen=True, eq=False)
class TorusGrid:
    """Uniform periodic grid with ``n`` points per axis on a cube of side ``box_length``."""

    dim: int
    n: int
    box_length: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise GridError(f"dim must be 1, 2 or 3, got {self.dim}")
        n = int(self.n)
        if n < 8 or n & (n - 1):
            raise GridError(f"n must be a power of two >= 8, got {self.n}")
        if not self.box_length > 0:
            raise GridError(f"box_length must be positive, got {self.box_length}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "box_length", float(self.box_length))

    def __eq__(self, other):
        if not isinstance(other, TorusGrid):
            return NotImplemented
        return (self.dim, self.n, self.box_length) == (other.dim, other.n, other.box_length)

    def __hash__(self):
        return hash((self.dim, self.n, self.box_length))

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def dx(self) -> float:
        return self.box_length / self.n

    @property
    def cell_volume(self) -> float:
        return self.dx**self.dim

    @property
    def volume(self) -> float:
        return self.box_length**self.dim

    @property
    def dk(self) -> float:
        return 2 * np.pi / self.box_length

    @property
    def nyquist(self) -> float:
        """Largest representable wavenumber ``pi n / L``."""
        return np.pi * self.n / self.box_length

    @property
    def dealias_cutoff(self) -> float:
        """Wavenumber below which every mode survives the two-thirds rule."""
        return self.dk * (self.n // 3)

    @cached_property
    def lattice(self) -> np.ndarray:
        """Integer frequencies per axis in FFT order."""
        return np.fft.fftfreq(self.n, 1.0 / self.n).astype(np.int64)

    def centered_lattice(self) -> np.ndarray:
        return np.fft.fftshift(self.lattice)

    def _axis_shape(self, axis: int) -> tuple[int, ...]:
        s = [1] * self.dim
        s[axis] = self.n
        return tuple(s)

    @cached_property
    def x(self) -> tuple[np.ndarray, ...]:
        """Node coordinates per axis, broadcastable to ``shape``."""
        x1 = -0.5 * self.box_length + self.dx * np.arange(self.n)
        return tuple(x1.reshape(self._axis_shape(j)) for j in range(self.dim))

    def mesh(self) -> tuple[np.ndarray, ...]:
        return tuple(np.broadcast_to(c, self.shape) for c in self.x)

    @cached_property
    def radius(self) -> np.ndarray:
        return np.sqrt(sum(c**2 for c in self.x))

    @cached_property
    def xi(self) -> tuple[np.ndarray, ...]:
        """Wavevector components per axis, broadcastable to ``shape``."""
        k = self.dk * self.lattice.astype(float)
        return tuple(k.reshape(self._axis_shape(j)) for j in range(self.dim))

    @cached_property
    def xi_odd(self) -> tuple[np.ndarray, ...]:
        # Nyquist component zeroed so that odd derivatives of real fields stay real.
        k = self.dk * self.lattice.astype(float)
        k[self.n // 2] = 0.0
        return tuple(k.reshape(self._axis_shape(j)) for j in range(self.dim))

    @cached_property
    def xi2(self) -> np.ndarray:
        out = np.zeros(self.shape)
        for c in self.xi:
            out = out + c**2
        return out

    @cached_property
    def xi_abs(self) -> np.ndarray:
        return np.sqrt(self.xi2)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        keep = np.abs(self.lattice) <= self.n // 3
        mask = np.ones(self.shape, dtype=bool)
        for j in range(self.dim):
            mask = mask & keep.reshape(self._axis_shape(j))
        return mask

    def frequency_at(self, index) -> tuple[float, ...]:
        return tuple(float(self.dk * self.lattice[i]) for i in index)

    # Transforms on raw arrays; the array-level API is what the integrators use.
    def forward(self, values: np.ndarray) -> np.ndarray:
        axes = tuple(range(-self.dim, 0))
        return sfft.fftn(values, axes=axes, norm="ortho")

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        axes = tuple(range(-self.dim, 0))
        return sfft.ifftn(coeffs, axes=axes, norm="ortho")

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        """Real L2 inner product over the box, summed over leading component axes."""
        return float(np.real(np.sum(np.conj(f) * g)) * self.cell_volume)

    def l2(self, values: np.ndarray) -> float:
        """L2 norm over the box (components, if any, summed in squares)."""
        return float(np.sqrt(np.sum(np.abs(values) ** 2) * self.cell_volume))

    def integrate(self, values: np.ndarray) -> float:
        return float(np.real(np.sum(values)) * self.cell_volume)


def make_grid(dim: int, n: int, box_length: float) -> TorusGrid:
    return TorusGrid(dim, n, box_length)


class SpectralField:
    """Complex scalar field with lazily synchronized nodal values and coefficients."""

    __slots__ = ("grid", "_values", "_coeffs")

    def __init__(self, grid: TorusGrid, values=None, *, coeffs=None):
        if (values is None) == (coeffs is None):
            raise ValueError("give exactly one of values or coeffs")
        self.grid = grid
        self._values = None
        self._coeffs = None
        if values is not None:
            arr = np.asarray(values)
            if arr.shape != grid.shape:
                arr = np.broadcast_to(arr, grid.shape)
            self._values = np.array(arr, dtype=complex)
        else:
            arr = np.asarray(coeffs, dtype=complex)
            if arr.shape != grid.shape:
                raise GridError(f"coefficient shape {arr.shape} != grid shape {grid.shape}")
            self._coeffs = arr.copy()

    @classmethod
    def from_coeffs(cls, grid: TorusGrid, coeffs) -> "SpectralField":
        return cls(grid, coeffs=coeffs)

    @classmethod
    def constant(cls, grid: TorusGrid, value: complex = 1.0) -> "SpectralField":
        return cls(grid, np.full(grid.shape, value, dtype=complex))

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            self._values = self.grid.inverse(self._coeffs)
        return self._values

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            self._coeffs = self.grid.forward(self._values)
        return self._coeffs

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    def is_real(self, tol: float = 1e-12) -> bool:
        v = self.values
        scale = max(float(np.max(np.abs(v))), 1.0)
        return float(np.max(np.abs(v.imag))) <= tol * scale

    def copy(self) -> "SpectralField":
        if self._values is not None:
            return SpectralField(self.grid, self._values)
        return SpectralField(self.grid, coeffs=self._coeffs)

    def norm(self) -> float:
        return self.grid.l2(self.values)

    def _check(self, other):
        if isinstance(other, SpectralField):
            if other.grid != self.grid:
                raise GridError("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return SpectralField(self.grid, self.values + self._check(other))

    __radd__ = __add__

    def __sub__(self, other):
        return SpectralField(self.grid, self.values - self._check(other))

    def __rsub__(self, other):
        return SpectralField(self.grid, self._check(other) - self.values)

    def __mul__(self, other):
        return SpectralField(self.grid, self.values * self._check(other))

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(self.grid, -self.values)

    def __repr__(self):
        return f"SpectralField(dim={self.grid.dim}, n={self.grid.n}, L={self.grid.box_length})"


class VectorField:
    """``dim`` scalar components on one shared grid object."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[SpectralField]):
        comps = tuple(components)
        if not comps:
            raise GridError("a vector field needs at least one component")
        grid = comps[0].grid
        if any(c.grid is not grid for c in comps):
            raise GridError("all vector components must share the same grid object")
        if len(comps) != grid.dim:
            raise GridError(f"expected {grid.dim} components, got {len(comps)}")
        self.components = comps

    @classmethod
    def from_array(cls, grid: TorusGrid, values: np.ndarray) -> "VectorField":
        return cls([SpectralField(grid, values[j]) for j in range(grid.dim)])

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "VectorField":
        return cls([SpectralField(grid, np.zeros(grid.shape)) for _ in range(grid.dim)])

    @property
    def grid(self) -> TorusGrid:
        return self.components[0].grid

    @property
    def values(self) -> np.ndarray:
        return np.stack([c.values for c in self.components])

    @property
    def coeffs(self) -> np.ndarray:
        return np.stack([c.coeffs for c in self.components])

    def norm(self) -> float:
        return self.grid.l2(self.values)

    def __getitem__(self, j) -> SpectralField:
        return self.components[j]

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)


Symbol = Callable[[tuple], np.ndarray]


def evaluate_symbol(grid: TorusGrid, symbol) -> np.ndarray:
    """Evaluate ``symbol`` on the lattice (callable of the wavevector tuple, or an array)."""
    m = symbol(grid.xi) if callable(symbol) else symbol
    m = np.broadcast_to(np.asarray(m), grid.shape)
    bad = ~np.isfinite(m)
    if bad.any():
        idx = np.unravel_index(int(np.flatnonzero(bad)[0]), grid.shape)
        raise NonFiniteSymbol(grid.frequency_at(idx))
    return m


def apply_multiplier(field: SpectralField, symbol) -> SpectralField:
    """Multiply the Fourier coefficients of ``field`` pointwise by ``symbol(xi)``.

    The symbol must be finite on the whole lattice, including ``xi = 0``;
    singular symbols need their zero-mode value supplied by the caller.
    """
    m = evaluate_symbol(field.grid, symbol)
    return SpectralField.from_coeffs(field.grid, field.coeffs * m)


def differentiate(field, mode: str):
    """Spectral gradient, divergence or Laplacian."""
    if mode == "gradient":
        if not isinstance(field, SpectralField):
            raise TypeError("gradient expects a scalar SpectralField")
        g = field.grid
        c = field.coeffs
        return VectorField([SpectralField.from_coeffs(g, 1j * k * c) for k in g.xi_odd])
    if mode == "divergence":
        if not isinstance(field, VectorField):
            raise TypeError("divergence expects a VectorField")
        g = field.grid
        c = sum(1j * k * comp.coeffs for k, comp in zip(g.xi_odd, field.components))
        return SpectralField.from_coeffs(g, c)
    if mode == "laplacian":
        if not isinstance(field, SpectralField):
            raise TypeError("laplacian expects a scalar SpectralField")
        return SpectralField.from_coeffs(field.grid, -field.grid.xi2 * field.coeffs)
    raise ValueError(f"unknown derivative mode {mode!r}")


def dealias(field: SpectralField) -> SpectralField:
    """Two-thirds rule: zero every coefficient with some ``|k_j| > n/3``."""
    return SpectralField.from_coeffs(field.grid, np.where(field.grid.dealias_mask, field.coeffs, 0))


def transform(field: SpectralField, direction: str) -> np.ndarray:
    """Return the coefficient array (``forward``) or nodal values (``inverse``) of ``field``."""
    if direction == "forward":
        return field.grid.forward(field.values)
    if direction == "inverse":
        return field.grid.inverse(field.coeffs)
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


# Array-level helpers used by the solvers.

def grad_array(grid: TorusGrid, coeffs: np.ndarray) -> np.ndarray:
    return np.stack([grid.inverse(1j * k * coeffs) for k in grid.xi_odd])


def div_array(grid: TorusGrid, vec_values: np.ndarray) -> np.ndarray:
    c = sum(1j * k * grid.forward(vec_values[j]) for j, k in enumerate(grid.xi_odd))
    return grid.inverse(c)


def write_snapshot(path, field: SpectralField, t: float = 0.0) -> Path:
    """Write ``field`` in the raw ``.gpwf`` format.

    64-byte header (magic ``GPWF``, dim, n, L, simulation time; zero padded)
    followed by little-endian complex128 values in C order.
    """
    g = field.grid
    header = SNAPSHOT_HEADER.pack(SNAPSHOT_MAGIC, g.dim, g.n, g.box_length, float(t))
    header = header.ljust(SNAPSHOT_HEADER_SIZE, b"\0")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(field.values, dtype="<c16").tobytes(order="C"))
    return path


def read_snapshot(path) -> tuple[SpectralField, float]:
    raw = Path(path).read_bytes()
    magic, dim, n, box, t = SNAPSHOT_HEADER.unpack_from(raw, 0)
    if magic != SNAPSHOT_MAGIC:
        raise ValueError(f"{path}: not a GPWF snapshot")
    grid = TorusGrid(dim, n, box)
    data = np.frombuffer(raw, dtype="<c16", offset=SNAPSHOT_HEADER_SIZE)
    if data.size != n**dim:
        raise ValueError(f"{path}: expected {n**dim} values, found {data.size}")
    return SpectralField(grid, data.reshape(grid.shape)), t
