"""Spectral operators: solenoidal projection, derivatives, heat semigroup,
and the dealiased quadratic advection term.

Each public operation takes and returns immutable field snapshots. The
array-level helpers (prefixed with an underscore) operate on raw spectral
coefficient stacks of shape (n, N, ..., N) and are shared with the time
integrator, which keeps its state in that form.
"""

from __future__ import annotations

import numpy as np

from . import _fft
from .fields import ScalarField, VectorField
from .grid import Grid


def _project_spec(coeff: np.ndarray, grid: Grid) -> np.ndarray:
    """Mode-wise solenoidal projection I - k k^T / |k|^2 (identity at k = 0).

    The zero mode is left unchanged: a constant mean flow is already
    divergence-free and the projector formula is singular there.
    """
    k2 = grid.k_squared()
    k2_safe = np.where(k2 == 0.0, 1.0, k2)
    k_dot_u = np.zeros(grid.shape, dtype=np.complex128)
    for axis in range(grid.dim):
        k_dot_u += grid.wavenumber_axis(axis) * coeff[axis]
    out = np.empty_like(coeff)
    ratio = k_dot_u / k2_safe
    for axis in range(grid.dim):
        out[axis] = coeff[axis] - grid.wavenumber_axis(axis) * ratio
    return out


def _heat_spec(coeff: np.ndarray, grid: Grid, nu: float, t: float) -> np.ndarray:
    return coeff * np.exp(-nu * grid.k_squared() * t)


def _advection_spec(coeff: np.ndarray, grid: Grid) -> np.ndarray:
    """Dealiased projected advection Q = P(div(u u)) for solenoidal u.

    Modes above dealias_fraction * k_max are zeroed before the inverse
    transform and again on the assembled product, so quadratic aliasing
    never reaches retained modes. Divergence form needs one product and
    one derivative per (i, j) pair; it equals the convective form because
    the input is divergence-free mode by mode.
    """
    dim = grid.dim
    mask = grid.dealias_mask()
    axes = tuple(range(1, dim + 1))
    u = _fft.ifftn(coeff * mask, axes=axes).real
    q = np.zeros_like(coeff)
    for i in range(dim):
        for j in range(i, dim):
            pij = _fft.fftn(u[i] * u[j], axes=tuple(range(dim)))
            pij *= mask
            q[i] += 1j * grid.wavenumber_axis(j) * pij
            if j != i:
                q[j] += 1j * grid.wavenumber_axis(i) * pij
    return _project_spec(q, grid)


def _project_spec_half(coeff: np.ndarray, grid: Grid) -> np.ndarray:
    """Solenoidal projection on the half-spectrum lattice.

    Identical mode-wise formula as the full-spectrum version; mirrored
    modes follow by conjugation since the projector is even in k.
    """
    k2 = grid.k_squared_half()
    k2_safe = np.where(k2 == 0.0, 1.0, k2)
    k_dot_u = np.zeros(grid.half_shape, dtype=np.complex128)
    for axis in range(grid.dim):
        k_dot_u += grid.wavenumber_axis_half(axis) * coeff[axis]
    ratio = k_dot_u
    ratio /= k2_safe
    out = np.empty_like(coeff)
    for axis in range(grid.dim):
        out[axis] = coeff[axis] - grid.wavenumber_axis_half(axis) * ratio
    return out


def _advection_spec_half(coeff: np.ndarray, grid: Grid) -> np.ndarray:
    """Half-spectrum twin of _advection_spec (the solver hot path)."""
    dim = grid.dim
    mask = grid.dealias_mask_half()
    axes = tuple(range(1, dim + 1))
    u = _fft.irfftn(coeff * mask, shape=grid.shape, axes=axes)
    q = np.zeros_like(coeff)
    grid_axes = tuple(range(dim))
    for i in range(dim):
        for j in range(i, dim):
            pij = _fft.rfftn(u[i] * u[j], axes=grid_axes)
            pij *= mask
            q[i] += 1j * grid.wavenumber_axis_half(j) * pij
            if j != i:
                q[j] += 1j * grid.wavenumber_axis_half(i) * pij
    return _project_spec_half(q, grid)


def half_to_full_spectrum(coeff: np.ndarray, grid: Grid) -> np.ndarray:
    """Reconstruct the full Hermitian spectrum from the half layout."""
    axes = tuple(range(coeff.ndim - grid.dim, coeff.ndim))
    phys = _fft.irfftn(coeff, shape=grid.shape, axes=axes)
    return _fft.fftn(phys, axes=axes)


def full_to_half_spectrum(coeff: np.ndarray, grid: Grid) -> np.ndarray:
    """Slice a Hermitian full spectrum into the rfft half layout."""
    n_half = grid.resolution // 2 + 1
    return np.ascontiguousarray(coeff[..., :n_half])


def _divergence_residual(coeff: np.ndarray, grid: Grid) -> float:
    """max_k |k . u_hat(k)| / max_k |u_hat(k)| (0 for the zero field)."""
    k_dot_u = np.zeros(grid.shape, dtype=np.complex128)
    for axis in range(grid.dim):
        k_dot_u += grid.wavenumber_axis(axis) * coeff[axis]
    scale = np.abs(coeff).max()
    if scale == 0.0:
        return 0.0
    return float(np.abs(k_dot_u).max() / scale)


def leray_project(field: VectorField) -> VectorField:
    """L2-orthogonal projection onto divergence-free fields."""
    return VectorField.from_spectral(field.grid, _project_spec(field.spec, field.grid))


def derivative(field, axes) -> VectorField | ScalarField:
    """Repeated partial derivative: multiply coefficients by prod_j (i k_j).

    `axes` is a multi-index, e.g. (0, 1) for D_1 D_2. Must be non-empty.
    """
    axes = tuple(int(a) for a in axes)
    if len(axes) == 0:
        raise ValueError("derivative needs at least one axis")
    grid = field.grid
    for a in axes:
        if not 0 <= a < grid.dim:
            raise ValueError(f"axis {a} out of range for dim {grid.dim}")
    symbol = np.ones(grid.shape, dtype=np.complex128)
    for a in axes:
        symbol = symbol * (1j * grid.wavenumber_axis(a))
    return type(field).from_spectral(grid, field.spec * symbol)


def heat_semigroup(field, nu: float, t: float):
    """Diffusion propagator: scale each coefficient by exp(-nu |k|^2 t)."""
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu}")
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    return type(field).from_spectral(field.grid, _heat_spec(field.spec, field.grid, nu, t))


def nonlinear_term(u: VectorField) -> VectorField:
    """Projected advection Q of a divergence-free velocity field."""
    grid = u.grid
    coeff = u.spec
    res = _divergence_residual(coeff, grid)
    if res > 1e-8:
        raise ValueError(
            f"nonlinear_term expects a divergence-free field "
            f"(divergence residual {res:.3e})"
        )
    return VectorField.from_spectral(grid, _advection_spec(coeff, grid))


def divergence_residual(field: VectorField) -> float:
    """Relative divergence residual of a field, from its spectrum."""
    return _divergence_residual(field.spec, field.grid)
