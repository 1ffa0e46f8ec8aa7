"""Logistic and tent maps on [0, 1]: evaluation, derivatives, and the
closed-form fixed points, period-2 orbits, and preimages used to build
finite invariant sets.

The logistic family is x -> gamma * x * (1 - x) with gamma in [0, 4]; the
tent family is x -> mu * x on [0, 0.5) and x -> -mu * (x - 1) on [0.5, 1]
with mu in [0, 2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, ParameterError

__all__ = [
    "MapKind",
    "Map1D",
    "logistic",
    "tent",
    "logistic_fixed_point",
    "logistic_period2",
    "logistic_preimages",
    "tent_fixed_points",
    "tent_period2",
]

# Quadratic roots closer than this are treated as the single vertex preimage.
_ROOT_MERGE_TOL = 1e-12


class MapKind(Enum):
    LOGISTIC = "logistic"
    TENT = "tent"


@dataclass(frozen=True)
class Map1D:
    """A one-parameter map of the unit interval.

    The parameter is not range-checked at construction: values outside the
    nominal range simply fail to keep [0, 1] invariant, which the simulation
    engine detects as escape. At the tent kink x = 0.5 the derivative takes
    the right-branch slope -mu (only |slope| enters any Lyapunov sum).
    """

    kind: MapKind
    param: float

    def eval(self, x: float) -> float:
        """Map value at x; raises DomainError for x outside [0, 1]."""
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x={x!r} outside [0, 1]")
        if self.kind is MapKind.LOGISTIC:
            return self.param * x * (1.0 - x)
        if x < 0.5:
            return self.param * x
        return -(self.param * (x - 1.0))

    def deriv(self, x: float) -> float:
        """Slope at x; raises DomainError for x outside [0, 1]."""
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x={x!r} outside [0, 1]")
        if self.kind is MapKind.LOGISTIC:
            return self.param * (1.0 - 2.0 * x)
        return self.param if x < 0.5 else -self.param

    def eval_array(self, x: np.ndarray) -> np.ndarray:
        """Vectorized eval; same arithmetic as eval(), no domain check."""
        if self.kind is MapKind.LOGISTIC:
            return self.param * x * (1.0 - x)
        return np.where(x < 0.5, self.param * x, -(self.param * (x - 1.0)))

    def deriv_array(self, x: np.ndarray) -> np.ndarray:
        """Vectorized deriv; same branch rule as deriv()."""
        if self.kind is MapKind.LOGISTIC:
            return self.param * (1.0 - 2.0 * x)
        return np.where(x < 0.5, self.param, -self.param)

    def __str__(self) -> str:
        return f"{self.kind.value}:{self.param:.15g}"


def logistic(param: float) -> Map1D:
    return Map1D(MapKind.LOGISTIC, param)


def tent(param: float) -> Map1D:
    return Map1D(MapKind.TENT, param)


def logistic_fixed_point(gamma: float) -> float:
    """Nontrivial fixed point (gamma - 1) / gamma of the logistic map."""
    if gamma == 0.0:
        raise ParameterError("gamma = 0 has no nontrivial fixed point")
    return (gamma - 1.0) / gamma


def logistic_period2(beta: float) -> tuple[float, float]:
    """Period-2 orbit of the logistic map as (minus root, plus root).

    The roots are (beta + 1 -+ sqrt((beta + 1)(beta - 3))) / (2 beta); they
    are real only for beta >= 3 and degenerate to the fixed point at beta = 3.
    """
    if beta < 3.0:
        raise ParameterError(f"no real period-2 orbit for beta={beta!r} < 3")
    root = math.sqrt((beta + 1.0) * (beta - 3.0))
    return (
        (beta + 1.0 - root) / (2.0 * beta),
        (beta + 1.0 + root) / (2.0 * beta),
    )


def logistic_preimages(gamma: float, y: float) -> list[float]:
    """Solutions x in [0, 1] of gamma * x * (1 - x) = y, in ascending order.

    A unimodal quadratic admits at most two preimages. The two roots are
    symmetric about the vertex x = 0.5; roots within 1e-12 of each other are
    merged into the single vertex preimage, and a discriminant within 1e-12
    below zero (y above the maximum by only evaluation round-off) snaps to
    the vertex as well. Returns [] when y is above the map's maximum.
    """
    if gamma <= 0.0:
        raise ParameterError(f"gamma={gamma!r} must be positive")
    disc = 1.0 - 4.0 * y / gamma
    if disc < -_ROOT_MERGE_TOL:
        return []
    if disc <= 0.0:
        return [0.5]
    spread = math.sqrt(disc)
    if spread <= _ROOT_MERGE_TOL:
        return [0.5]
    roots = (0.5 * (1.0 - spread), 0.5 * (1.0 + spread))
    return [x for x in roots if 0.0 <= x <= 1.0]


def tent_fixed_points(mu: float) -> list[float]:
    """Fixed points of the tent map: [0] for mu < 1, [0, mu/(1+mu)] for mu > 1.

    mu = 1 is rejected: the left branch becomes the identity and every point
    of [0, 0.5) is fixed.
    """
    if mu == 1.0:
        raise ParameterError("mu = 1 makes the left tent branch the identity")
    if mu < 1.0:
        return [0.0]
    return [0.0, mu / (1.0 + mu)]


def tent_period2(mu: float) -> tuple[float, float]:
    """Period-2 orbit (mu/(1+mu^2), mu^2/(1+mu^2)) of the tent map, mu > 1."""
    if mu <= 1.0:
        raise ParameterError(f"no period-2 orbit for mu={mu!r} <= 1")
    denom = 1.0 + mu * mu
    return (mu / denom, mu * mu / denom)
