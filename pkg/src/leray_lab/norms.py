"""Lebesgue and derivative-tuple norms of periodic fields.

The m-th derivative norm sums over ALL n^m index tuples (j_1, ..., j_m),
not a minimal basis; the redundancy is deliberate because every derived
constant in this package depends on that normalization. For q = 2 the
tuple sum collapses to the |k|^(2m)-weighted spectral sum, which is the
fast path; the equivalence is itself a tested identity.

Physical-space integrals are plain Riemann sums with cell volume
(L/N)^n, which are exact for band-limited integrands on periodic grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from . import _fft
from .fields import ScalarField, VectorField

# All-tuples enumeration grows like n^m; beyond order 4 only the q = 2
# spectral route is available.
TUPLE_ORDER_CAP = 4

_ROUTES = ("spectral", "physical", "auto")


@dataclass(frozen=True)
class NormRequest:
    """Validated (derivative order, exponent, evaluation route) triple."""

    m: int
    q: float
    route: str = "auto"

    def __post_init__(self):
        if self.m < 0:
            raise ValueError(f"derivative order m must be >= 0, got {self.m}")
        if not (self.q >= 1):
            raise ValueError(f"Lebesgue exponent q must be >= 1, got {self.q}")
        if self.route not in _ROUTES:
            raise ValueError(f"route must be one of {_ROUTES}, got {self.route!r}")
        if self.route == "spectral" and self.q != 2:
            raise ValueError("the spectral route exists only for q = 2")
        if self.q != 2 and self.m > TUPLE_ORDER_CAP:
            raise ValueError(
                f"tuple cap exceeded: m = {self.m} > {TUPLE_ORDER_CAP} "
                "is only supported for q = 2"
            )

    def resolved_route(self) -> str:
        if self.route != "auto":
            return self.route
        return "spectral" if self.q == 2 else "physical"


def _component_phys(field) -> np.ndarray:
    u = field.phys
    return u[np.newaxis] if isinstance(field, ScalarField) else u


def _component_spec(field) -> np.ndarray:
    c = field.spec
    return c[np.newaxis] if isinstance(field, ScalarField) else c


def derivative_multisets(dim: int, m: int):
    """Yield (axes_tuple, multiplicity) covering all n^m ordered tuples.

    Mixed partials commute, so each multiset of axes stands for
    m! / prod(counts!) ordered tuples.
    """
    if m == 0:
        yield (), 1
        return
    for combo in combinations_with_replacement(range(dim), m):
        mult = math.factorial(m)
        for axis in set(combo):
            mult //= math.factorial(combo.count(axis))
        yield combo, mult


def _component_rspec(field) -> np.ndarray:
    c = field.rspec
    return c[np.newaxis] if isinstance(field, ScalarField) else c


def _tuple_fields(field, m: int):
    """Yield (multiplicity, physical derivative stack) per axis multiset.

    Reconstructions go through the half-spectrum transform: the fields are
    real, so this halves the dominating FFT cost of high-order q != 2
    norms.
    """
    grid = field.grid
    if m == 0:
        yield 1, _component_phys(field)
        return
    coeff = _component_rspec(field)
    axes = tuple(range(1, grid.dim + 1))
    for combo, mult in derivative_multisets(grid.dim, m):
        symbol = np.ones(grid.half_shape, dtype=np.complex128)
        for a in combo:
            symbol = symbol * (1j * grid.wavenumber_axis_half(a))
        yield mult, _fft.irfftn(coeff * symbol, shape=grid.shape, axes=axes)


def _power_sum(stack: np.ndarray, q: float) -> float:
    """sum |stack|^q, avoiding the abs pass for even integer exponents."""
    if q == 2:
        return float(np.square(stack).sum())
    if q == 4:
        s2 = np.square(stack)
        return float(np.square(s2).sum())
    return float((np.abs(stack) ** q).sum())


def _spectral_l2(field, m: int) -> float:
    cache = field._norm_cache
    key = ("dl2", m)
    if key in cache:
        return cache[key]
    grid = field.grid
    if "energy" not in cache:
        coeff = _component_spec(field)
        energy = (coeff.real**2 + coeff.imag**2).sum(axis=0)
        cache["energy"] = energy
    energy = cache["energy"]
    if m > 0:
        energy = energy * grid.k_squared() ** m
    value = float(np.sqrt(grid.volume * energy.sum()))
    cache[key] = value
    return value


def dm_lq_norm(field, m: int, q: float, route: str = "auto") -> float:
    """(1/q-power of the) sum over components and all m-tuples of
    integral |D_{j_1} ... D_{j_m} u_i|^q dx."""
    req = NormRequest(m, q, route)
    grid = field.grid
    if np.isinf(q):
        return linf_dm_norm(field, m)
    if req.resolved_route() == "spectral":
        return _spectral_l2(field, m)
    h = grid.cell_volume
    total = 0.0
    for mult, stack in _tuple_fields(field, m):
        total += mult * _power_sum(stack, q) * h
    return total ** (1.0 / q)


def lq_norm(field, q: float, route: str = "auto") -> float:
    """Lebesgue norm over the box; for q = inf, the max over components
    of the sample maxima."""
    return dm_lq_norm(field, 0, q, route)


def linf_dm_norm(field, m: int) -> float:
    """Max over components and derivative tuples of the sample maxima."""
    if m < 0:
        raise ValueError(f"derivative order m must be >= 0, got {m}")
    if m > TUPLE_ORDER_CAP:
        raise ValueError(f"tuple cap exceeded: m = {m} > {TUPLE_ORDER_CAP}")
    best = 0.0
    for _, stack in _tuple_fields(field, m):
        best = max(best, float(np.abs(stack).max()))
    return best


def l2_norm(field) -> float:
    """Plancherel L2 norm (the q = 2 fast path)."""
    return _spectral_l2(field, 0)


def d_l2_norm(field, m: int) -> float:
    """Plancherel norm of the m-th derivative."""
    return _spectral_l2(field, m)
