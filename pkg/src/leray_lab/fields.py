"""Vector and scalar fields on the periodic box with paired representations.

A field holds physical samples, Fourier coefficients, or both; the missing
representation is computed on demand and cached. Coefficients are true
Fourier-series coefficients (forward-normalized), so Parseval reads
integral |u|^2 dx = L^n * sum_k |c_k|^2.

Fields are treated as immutable: arrays are marked read-only on
construction and every operation returns a new instance.
"""

from __future__ import annotations

import numpy as np

from . import _fft
from .grid import Grid

# Round-trip and conjugate-symmetry guarantee for transforms.
ROUNDTRIP_TOL = 1e-12


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


def _spectral_to_physical(coeff: np.ndarray, grid: Grid) -> np.ndarray:
    """Inverse transform with conjugate-symmetry check.

    Raises if the imaginary residue exceeds ROUNDTRIP_TOL relative to the
    field amplitude, which indicates a non-Hermitian spectrum.
    """
    axes = tuple(range(coeff.ndim - grid.dim, coeff.ndim))
    z = _fft.ifftn(coeff, axes=axes)
    scale = max(np.abs(z.real).max(), np.abs(coeff).max(), 1e-300)
    imag_max = np.abs(z.imag).max()
    if imag_max > ROUNDTRIP_TOL * scale:
        raise ValueError(
            f"spectral data is not conjugate-symmetric: imaginary residue "
            f"{imag_max:.3e} exceeds {ROUNDTRIP_TOL:.0e} * {scale:.3e}"
        )
    return z.real


class _FieldBase:
    """Shared representation logic for vector and scalar fields."""

    __slots__ = ("grid", "_phys", "_spec", "_rspec", "_norm_cache")

    def __init__(self, grid: Grid, physical=None, spectral=None):
        if physical is None and spectral is None:
            raise ValueError("need at least one of physical or spectral data")
        self.grid = grid
        self._rspec = None
        self._norm_cache = {}
        expected = self._expected_shape(grid)
        if physical is not None:
            physical = np.asarray(physical, dtype=np.float64)
            if physical.shape != expected:
                raise ValueError(
                    f"physical shape {physical.shape} != expected {expected}"
                )
            physical = _freeze(physical)
        if spectral is not None:
            spectral = np.asarray(spectral, dtype=np.complex128)
            if spectral.shape != expected:
                raise ValueError(
                    f"spectral shape {spectral.shape} != expected {expected}"
                )
            spectral = _freeze(spectral)
        self._phys = physical
        self._spec = spectral

    def _expected_shape(self, grid: Grid) -> tuple[int, ...]:
        raise NotImplementedError

    @property
    def has_physical(self) -> bool:
        return self._phys is not None

    @property
    def has_spectral(self) -> bool:
        return self._spec is not None

    @property
    def phys(self) -> np.ndarray:
        """Physical samples (computed and cached on first access)."""
        if self._phys is None:
            self._phys = _freeze(_spectral_to_physical(self._spec, self.grid))
        return self._phys

    @property
    def spec(self) -> np.ndarray:
        """Fourier coefficients (computed and cached on first access)."""
        if self._spec is None:
            axes = tuple(range(self._phys.ndim - self.grid.dim, self._phys.ndim))
            self._spec = _freeze(_fft.fftn(self._phys, axes=axes))
        return self._spec

    @property
    def rspec(self) -> np.ndarray:
        """Half-spectrum coefficients (fast path for physical reconstructions)."""
        if self._rspec is None:
            phys = self.phys
            axes = tuple(range(phys.ndim - self.grid.dim, phys.ndim))
            self._rspec = _freeze(_fft.rfftn(phys, axes=axes))
        return self._rspec

    def with_both(self):
        """Same field with both representations populated."""
        self.phys
        self.spec
        return self


class VectorField(_FieldBase):
    """n-component velocity field on a periodic grid."""

    def _expected_shape(self, grid: Grid) -> tuple[int, ...]:
        return (grid.dim,) + grid.shape

    @classmethod
    def from_physical(cls, grid: Grid, samples) -> "VectorField":
        return cls(grid, physical=samples)

    @classmethod
    def from_spectral(cls, grid: Grid, coeff) -> "VectorField":
        return cls(grid, spectral=coeff)

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorField":
        return cls(
            grid,
            physical=np.zeros((grid.dim,) + grid.shape),
            spectral=np.zeros((grid.dim,) + grid.shape, dtype=np.complex128),
        )

    def scaled(self, factor: float) -> "VectorField":
        return VectorField(
            self.grid,
            physical=None if self._phys is None else factor * self._phys,
            spectral=None if self._spec is None else factor * self._spec,
        )

    def __add__(self, other: "VectorField") -> "VectorField":
        if other.grid != self.grid:
            raise ValueError("cannot add fields on different grids")
        return VectorField(self.grid, spectral=self.spec + other.spec)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + other.scaled(-1.0)


class ScalarField(_FieldBase):
    """Single-component field sharing the transform rules of VectorField."""

    def _expected_shape(self, grid: Grid) -> tuple[int, ...]:
        return grid.shape

    @classmethod
    def from_physical(cls, grid: Grid, samples) -> "ScalarField":
        return cls(grid, physical=samples)

    @classmethod
    def from_spectral(cls, grid: Grid, coeff) -> "ScalarField":
        return cls(grid, spectral=coeff)


def transform(field: _FieldBase, direction: str) -> _FieldBase:
    """Populate the requested representation of `field`.

    direction "forward" fills the spectral side, "inverse" the physical
    side; the returned field carries both.
    """
    if direction == "forward":
        field.spec
    elif direction == "inverse":
        field.phys
    else:
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    return field


def roundtrip_error(field: _FieldBase) -> float:
    """Max abs error of physical -> spectral -> physical, relative to max|u|."""
    phys = field.phys
    axes = tuple(range(phys.ndim - field.grid.dim, phys.ndim))
    back = _fft.ifftn(_fft.fftn(phys, axes=axes), axes=axes).real
    scale = max(np.abs(phys).max(), 1e-300)
    return float(np.abs(back - phys).max() / scale)
