"""Regularity-time bound constants and the smallness criteria they gate.

The derived constants are one-line functions of the sharp interpolation
constants: k3 = gamma3^12 / 2 for n = 3 (scaling nu^-5 |u0|^4) and
k4 = gamma4^6 / 2 for n = 4 (scaling nu^-3 |u0|^2). They are compared
against the classical value 1/(128 pi^2) for n = 3.

Two gamma presets exist: "computed" takes the quadrature values from the
inequality laboratory (the truth source), "paper" takes the published
12-digit upper bounds verbatim. Reports can show both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .inequalities import optimal_constants

#: Published upper bounds for the sharp interpolation constants.
PAPER_GAMMA3 = 0.558901115737
PAPER_GAMMA4 = 0.419577519172
#: Published upper bounds for the derived regularity-time constants.
PAPER_K3 = 0.000464504284
PAPER_K4 = 0.002727993110

#: Classical n = 3 constant and the 6-digit bound it is quoted under.
CLASSICAL_K3 = 1.0 / (128.0 * math.pi**2)
CLASSICAL_K3_DISPLAY_BOUND = 0.000791572

PRESETS = ("computed", "paper")

_EXPONENT_BY_DIM = {3: 12, 4: 6}
_NU_POWER_BY_DIM = {3: -5, 4: -3}
_DATA_POWER_BY_DIM = {3: 4, 4: 2}


def gamma_values(preset: str = "computed") -> tuple[float, float]:
    """Sharp-constant pair (n = 3, n = 4) under the chosen preset."""
    if preset == "computed":
        return optimal_constants()
    if preset == "paper":
        return PAPER_GAMMA3, PAPER_GAMMA4
    raise ValueError(f"preset must be one of {PRESETS}, got {preset!r}")


def bound_constant(gamma: float, exponent: int) -> float:
    """Derived bound constant gamma^exponent / 2."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if exponent not in (12, 6):
        raise ValueError(f"exponent must be 12 (n=3) or 6 (n=4), got {exponent}")
    return gamma**exponent / 2.0


def regularity_time_bound(
    dim: int, nu: float, l2_u0: float, preset: str = "computed"
) -> float:
    """Upper bound on the time after which all derivative norms decay.

    n = 3: k3 * nu^-5 * |u0|_2^4; n = 4: k4 * nu^-3 * |u0|_2^2.
    """
    if dim not in _EXPONENT_BY_DIM:
        raise ValueError(f"dim must be 3 or 4, got {dim}")
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu}")
    if l2_u0 < 0:
        raise ValueError(f"l2_u0 must be nonnegative, got {l2_u0}")
    g3, g4 = gamma_values(preset)
    gamma = g3 if dim == 3 else g4
    k = bound_constant(gamma, _EXPONENT_BY_DIM[dim])
    return k * nu ** _NU_POWER_BY_DIM[dim] * l2_u0 ** _DATA_POWER_BY_DIM[dim]


def classical_bound(nu: float, l2_u0: float) -> float:
    """Classical n = 3 bound (1/(128 pi^2)) * nu^-5 * |u0|_2^4."""
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu}")
    return CLASSICAL_K3 * nu**-5 * l2_u0**4


def smallness_criterion(
    dim: int,
    nu: float,
    l2: float,
    dl2: float,
    gammas: tuple[float, float] | None = None,
) -> bool:
    """Strict decay criterion evaluated on instantaneous norms.

    n = 3: gamma3^3 * |u|_2^(1/2) * |Du|_2^(1/2) < nu;
    n = 4: gamma4^3 * |Du|_2 < nu. The boundary counts as False.
    """
    if dim not in (3, 4):
        raise ValueError(f"dim must be 3 or 4, got {dim}")
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu}")
    if l2 < 0 or dl2 < 0:
        raise ValueError("norms must be nonnegative")
    g3, g4 = gammas if gammas is not None else gamma_values("computed")
    if dim == 3:
        lhs = g3**3 * math.sqrt(l2) * math.sqrt(dl2)
    else:
        lhs = g4**3 * dl2
    return lhs < nu


@dataclass(frozen=True)
class BoundReport:
    """Computed constants and regularity-time bounds for one input set."""

    gamma3: float
    gamma4: float
    k3: float
    k4: float
    classical_k3: float
    improvement_ratio: float
    t_star_bound: float
    nu: float
    l2_u0: float
    dim: int
    preset: str
    paper_bounds: dict = field(
        default_factory=lambda: {
            "gamma3": PAPER_GAMMA3,
            "gamma4": PAPER_GAMMA4,
            "k3": PAPER_K3,
            "k4": PAPER_K4,
        }
    )

    def to_dict(self) -> dict:
        return {
            "gamma3": self.gamma3,
            "gamma4": self.gamma4,
            "k3": self.k3,
            "k4": self.k4,
            "classical_k3": self.classical_k3,
            "improvement_ratio": self.improvement_ratio,
            "t_star_bound": self.t_star_bound,
            "nu": self.nu,
            "l2_u0": self.l2_u0,
            "dim": self.dim,
            "preset": self.preset,
            "paper_bounds": dict(self.paper_bounds),
        }


def compute_bound_report(
    nu: float = 1.0, l2_u0: float = 1.0, dim: int = 3, preset: str = "computed"
) -> BoundReport:
    g3, g4 = gamma_values(preset)
    k3 = bound_constant(g3, 12)
    k4 = bound_constant(g4, 6)
    return BoundReport(
        gamma3=g3,
        gamma4=g4,
        k3=k3,
        k4=k4,
        classical_k3=CLASSICAL_K3,
        improvement_ratio=CLASSICAL_K3 / k3,
        t_star_bound=regularity_time_bound(dim, nu, l2_u0, preset),
        nu=nu,
        l2_u0=l2_u0,
        dim=dim,
        preset=preset,
    )
