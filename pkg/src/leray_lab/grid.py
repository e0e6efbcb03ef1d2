"""Periodic-box discretization descriptor and its wavenumber machinery.

The box [0, L)^n with N samples per axis carries the wavenumber lattice
k = (2*pi/L) * m for integer modes m in the symmetric range -N/2 .. N/2-1.
All heavy per-grid arrays (|k|^2, dealias mask, mesh coordinates) are
computed once and cached on the instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SUPPORTED_DIMS = (2, 3, 4)

# 4D grids are for static field analysis only; bigger ones are a memory trap.
MAX_DEFAULT_4D_RESOLUTION = 32


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with equal axes.

    Parameters
    ----------
    dim : int
        Spatial dimension, one of 2, 3, 4.
    resolution : int
        Samples per axis; power of two, at least 8.
    box_length : float
        Side length L of the periodic box.
    dealias_fraction : float
        Fraction of the Nyquist mode kept by the dealias mask (2/3 rule
        by default).
    """

    dim: int
    resolution: int
    box_length: float
    dealias_fraction: float = 2.0 / 3.0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.dim not in SUPPORTED_DIMS:
            raise ValueError(f"dim must be one of {SUPPORTED_DIMS}, got {self.dim}")
        if not _is_power_of_two(self.resolution) or self.resolution < 8:
            raise ValueError(
                f"resolution must be a power of two >= 8, got {self.resolution}"
            )
        if not (self.box_length > 0):
            raise ValueError(f"box_length must be positive, got {self.box_length}")
        if not (0 < self.dealias_fraction <= 1):
            raise ValueError(
                f"dealias_fraction must lie in (0, 1], got {self.dealias_fraction}"
            )

    # -- basic geometry -------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.resolution,) * self.dim

    @property
    def mode_count(self) -> int:
        return self.resolution**self.dim

    @property
    def spacing(self) -> float:
        return self.box_length / self.resolution

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def volume(self) -> float:
        return self.box_length**self.dim

    def axis_coordinates(self) -> np.ndarray:
        return np.arange(self.resolution) * self.spacing

    def meshgrid(self) -> list[np.ndarray]:
        """Physical coordinates, one full array per axis."""
        if "mesh" not in self._cache:
            x = self.axis_coordinates()
            mesh = list(np.meshgrid(*([x] * self.dim), indexing="ij"))
            for arr in mesh:
                arr.flags.writeable = False
            self._cache["mesh"] = mesh
        return self._cache["mesh"]

    # -- spectral lattice ------------------------------------------------

    def wavenumbers_1d(self) -> np.ndarray:
        """Wavenumbers along one axis in FFT storage order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.resolution, d=self.spacing)

    def modes_1d(self) -> np.ndarray:
        """Integer mode numbers along one axis in FFT storage order."""
        return np.fft.fftfreq(self.resolution, d=1.0 / self.resolution)

    def wavenumber_axis(self, axis: int) -> np.ndarray:
        """k along `axis`, shaped for broadcasting over the full spectrum.

        The Nyquist mode is zeroed so that i*k derivative symbols preserve
        conjugate symmetry of real fields.
        """
        if not 0 <= axis < self.dim:
            raise ValueError(f"axis {axis} out of range for dim {self.dim}")
        key = ("k_axis", axis)
        if key not in self._cache:
            k = self.wavenumbers_1d().copy()
            k[self.resolution // 2] = 0.0
            shape = [1] * self.dim
            shape[axis] = self.resolution
            self._cache[key] = k.reshape(shape)
        return self._cache[key]

    @property
    def half_shape(self) -> tuple[int, ...]:
        """Spectral shape of the real-input (half-spectrum) transform."""
        return (self.resolution,) * (self.dim - 1) + (self.resolution // 2 + 1,)

    def wavenumber_axis_half(self, axis: int) -> np.ndarray:
        """Like wavenumber_axis but shaped for the half spectrum."""
        if not 0 <= axis < self.dim:
            raise ValueError(f"axis {axis} out of range for dim {self.dim}")
        key = ("k_axis_half", axis)
        if key not in self._cache:
            if axis == self.dim - 1:
                k = 2.0 * np.pi / self.box_length * np.arange(self.resolution // 2 + 1.0)
                k[-1] = 0.0
            else:
                k = self.wavenumbers_1d().copy()
                k[self.resolution // 2] = 0.0
            shape = [1] * self.dim
            shape[axis] = len(k)
            self._cache[key] = k.reshape(shape)
        return self._cache[key]

    def k_squared(self) -> np.ndarray:
        """|k|^2 on the full lattice (Nyquist included, for norm weights)."""
        if "k2" not in self._cache:
            k = self.wavenumbers_1d()
            k2 = np.zeros(self.shape)
            for axis in range(self.dim):
                shape = [1] * self.dim
                shape[axis] = self.resolution
                k2 = k2 + (k**2).reshape(shape)
            k2.flags.writeable = False
            self._cache["k2"] = k2
        return self._cache["k2"]

    def k_squared_half(self) -> np.ndarray:
        """|k|^2 on the half-spectrum lattice (true Nyquist values kept)."""
        if "k2_half" not in self._cache:
            k_full = self.wavenumbers_1d()
            k_last = 2.0 * np.pi / self.box_length * np.arange(self.resolution // 2 + 1.0)
            k2 = np.zeros(self.half_shape)
            for axis in range(self.dim):
                k = k_last if axis == self.dim - 1 else k_full
                shape = [1] * self.dim
                shape[axis] = len(k)
                k2 = k2 + (k**2).reshape(shape)
            k2.flags.writeable = False
            self._cache["k2_half"] = k2
        return self._cache["k2_half"]

    def parseval_weight_half(self) -> np.ndarray:
        """Mode multiplicity on the half lattice (2 except the self-conjugate
        planes of the last axis), broadcastable over the half spectrum."""
        if "pweight" not in self._cache:
            n_half = self.resolution // 2 + 1
            w = np.full(n_half, 2.0)
            w[0] = 1.0
            w[-1] = 1.0
            shape = [1] * self.dim
            shape[-1] = n_half
            w = w.reshape(shape)
            w.flags.writeable = False
            self._cache["pweight"] = w
        return self._cache["pweight"]

    def dealias_mask_half(self) -> np.ndarray:
        """Dealias mask on the half-spectrum lattice."""
        if "dealias_half" not in self._cache:
            cutoff = self.dealias_fraction * (self.resolution / 2)
            m_full = np.abs(self.modes_1d())
            m_last = np.arange(self.resolution // 2 + 1.0)
            mask = np.ones(self.half_shape, dtype=bool)
            for axis in range(self.dim):
                m = m_last if axis == self.dim - 1 else m_full
                shape = [1] * self.dim
                shape[axis] = len(m)
                mask &= (m <= cutoff).reshape(shape)
            mask.flags.writeable = False
            self._cache["dealias_half"] = mask
        return self._cache["dealias_half"]

    def dealias_mask(self) -> np.ndarray:
        """Boolean mask keeping |m_j| <= dealias_fraction * N/2 on every axis."""
        if "dealias" not in self._cache:
            cutoff = self.dealias_fraction * (self.resolution / 2)
            m = np.abs(self.modes_1d())
            mask = np.ones(self.shape, dtype=bool)
            for axis in range(self.dim):
                shape = [1] * self.dim
                shape[axis] = self.resolution
                mask &= (m <= cutoff).reshape(shape)
            mask.flags.writeable = False
            self._cache["dealias"] = mask
        return self._cache["dealias"]

    def band_mask(self, max_mode: float) -> np.ndarray:
        """Mask of modes with |m_j| <= max_mode on every axis, excluding m = 0."""
        m = np.abs(self.modes_1d())
        mask = np.ones(self.shape, dtype=bool)
        for axis in range(self.dim):
            shape = [1] * self.dim
            shape[axis] = self.resolution
            mask &= (m <= max_mode).reshape(shape)
        mask[(0,) * self.dim] = False
        return mask

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "resolution": self.resolution,
            "box_length": self.box_length,
            "dealias_fraction": self.dealias_fraction,
        }


def make_grid(
    dim: int,
    resolution: int,
    box_length: float,
    dealias_fraction: float = 2.0 / 3.0,
    allow_large_4d: bool = False,
) -> Grid:
    """Construct a validated periodic grid.

    Rejects dimensions outside {2, 3, 4}, non-power-of-two resolutions, and
    4D resolutions above 32 unless `allow_large_4d` is set.
    """
    grid = Grid(dim, resolution, float(box_length), float(dealias_fraction))
    if dim == 4 and resolution > MAX_DEFAULT_4D_RESOLUTION and not allow_large_4d:
        raise ValueError(
            f"4D grids are capped at resolution {MAX_DEFAULT_4D_RESOLUTION} "
            "by default (pass allow_large_4d=True to override)"
        )
    return grid
