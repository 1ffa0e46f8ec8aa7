"""Finite invariant sets of the two-map random systems.

A finite set S is invariant when both maps send every point of S back into
S; trajectories then bounce among fixed points and period-2 orbits of the
constituent maps ("toss-and-catch"). Six cases are supported:

  L2  two logistic maps, 2 points: the maps' fixed points exchange.
  L3  two logistic maps, 3 points: fixed point of g coincides with one
      period-2 point of h; the third point is a bridging point (periodic
      under neither map) supplied by a preimage.
  L5  two logistic maps, 5 points: adds h's unstable fixed point and a
      bridging preimage point.
  LT1 logistic + tent, 1 point: the maps' fixed points coincide.
  LT2 logistic + tent, 2 points: fixed points exchange.
  LT3 logistic + tent, 3 points: fixed point of g inside a period-2 orbit
      of the tent map, with no bridging point.

Each case fixes a relation between the two map parameters; the solvers
below return those relations (closed forms throughout).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .engine import IfsConfig
from .errors import ParameterError
from .maps import (
    Map1D,
    logistic,
    logistic_fixed_point,
    logistic_period2,
    tent,
    tent_fixed_points,
    tent_period2,
)

__all__ = [
    "TacKind",
    "LabelKind",
    "PointLabel",
    "FIXED_G",
    "FIXED_H",
    "PERIODIC_H2",
    "BRIDGING",
    "FiniteInvariantSet",
    "InvarianceReport",
    "c2_alpha",
    "solve_c3",
    "c3_residuals",
    "solve_c5",
    "c5_residuals",
    "lt_gamma",
    "build_tac",
    "verify_invariance",
    "classify_bridging",
    "write_set_csv",
]

# Points of a multi-point set must be separated by more than this.
DISTINCT_TOL = 1e-9
# Forward invariance of a freshly built set must hold to this tolerance.
BUILD_TOL = 1e-10


class TacKind(Enum):
    """The six supported toss-and-catch cases."""

    L2 = "l2"
    L3 = "l3"
    L5 = "l5"
    LT1 = "lt1"
    LT2 = "lt2"
    LT3 = "lt3"

    @property
    def is_logistic_pair(self) -> bool:
        return self in (TacKind.L2, TacKind.L3, TacKind.L5)


class LabelKind(Enum):
    FIXED_G = "fixed_g"
    FIXED_H = "fixed_h"
    PERIODIC_G = "periodic_g"
    PERIODIC_H = "periodic_h"
    BRIDGING = "bridging"


@dataclass(frozen=True)
class PointLabel:
    """Role of a point: periodic of one map (with its period) or bridging."""

    kind: LabelKind
    period: int = 0

    def __str__(self) -> str:
        if self.kind is LabelKind.BRIDGING:
            return "bridging"
        return f"{self.kind.value}{self.period}"


FIXED_G = PointLabel(LabelKind.FIXED_G, 1)
FIXED_H = PointLabel(LabelKind.FIXED_H, 1)
PERIODIC_H2 = PointLabel(LabelKind.PERIODIC_H, 2)
BRIDGING = PointLabel(LabelKind.BRIDGING)


@dataclass(frozen=True)
class FiniteInvariantSet:
    """An ordered finite invariant set with per-point labels.

    params is (alpha, beta) for the logistic pair cases and (mu, gamma) for
    the logistic-tent cases.
    """

    kind: TacKind
    points: np.ndarray
    labels: tuple[PointLabel, ...]
    params: tuple[float, float]

    def __len__(self) -> int:
        return len(self.points)

    @property
    def param_names(self) -> tuple[str, str]:
        return ("alpha", "beta") if self.kind.is_logistic_pair else ("mu", "gamma")

    def maps(self) -> tuple[Map1D, Map1D]:
        """The (g, h) pair this set was built for."""
        if self.kind.is_logistic_pair:
            alpha, beta = self.params
            return logistic(alpha), logistic(beta)
        mu, gamma = self.params
        return logistic(gamma), tent(mu)

    def config(self, p: float = 0.5, seed: int = 0) -> IfsConfig:
        g, h = self.maps()
        return IfsConfig(g=g, h=h, p=p, seed=seed)


@dataclass(frozen=True)
class InvarianceReport:
    """Outcome of checking S = g(S) union h(S) point by point.

    g_targets[i] (h_targets[i]) is the index of the set point nearest to
    g(x_i) (h(x_i)); ties resolve to the lowest index. passed is True when
    the largest nearest-point distance is within tol.
    """

    passed: bool
    tol: float
    max_distance: float
    g_targets: tuple[int, ...]
    h_targets: tuple[int, ...]
    g_distances: tuple[float, ...]
    h_distances: tuple[float, ...]


def c2_alpha(beta: float) -> float:
    """Partner parameter alpha = beta / (beta - 1) of the two-point case.

    With this tie each logistic map sends the other's fixed point to its
    own, so the two fixed points form an invariant pair. The relation is an
    involution: applying it twice returns beta.
    """
    if beta == 1.0:
        raise ParameterError("beta = 1 is singular for the two-point relation")
    return beta / (beta - 1.0)


def solve_c3() -> tuple[float, float]:
    """Closed-form (alpha, beta) of the three-point logistic case.

    alpha = (3 + cbrt((27 - 3*sqrt(69))/2) + cbrt((27 + 3*sqrt(69))/2)) / 3
    beta  = (2 + cbrt((97 - 3*sqrt(69))/2) + cbrt((97 + 3*sqrt(69))/2)) / 3

    Numerically (2.3247..., 3.0796...); all three defining residuals vanish
    to round-off (see c3_residuals).
    """
    s = 3.0 * math.sqrt(69.0)
    alpha = (3.0 + _cbrt(0.5 * (27.0 - s)) + _cbrt(0.5 * (27.0 + s))) / 3.0
    beta = (2.0 + _cbrt(0.5 * (97.0 - s)) + _cbrt(0.5 * (97.0 + s))) / 3.0
    return alpha, beta


def c3_residuals(alpha: float, beta: float) -> tuple[float, float, float]:
    """Residuals of the three equations defining the three-point case:

    1. minus period-2 root of h equals the fixed point of g,
    2. h maps 1/alpha onto the plus period-2 root,
    3. g maps the plus period-2 root onto 1/alpha.
    """
    minus, plus = logistic_period2(beta)
    g, h = logistic(alpha), logistic(beta)
    return (
        minus - logistic_fixed_point(alpha),
        h.eval(1.0 / alpha) - plus,
        g.eval(plus) - 1.0 / alpha,
    )


def solve_c5() -> tuple[float, float]:
    """Closed-form (alpha, beta) of the five-point logistic case.

    With c = cbrt(54 - 6*sqrt(33)) + cbrt(54 + 6*sqrt(33)):
    alpha = 1 + c/6 and beta = 1 + c/3, so beta = 2*alpha - 1 exactly.
    Numerically (2.1915..., 3.3830...).
    """
    s = 6.0 * math.sqrt(33.0)
    core = _cbrt(54.0 - s) + _cbrt(54.0 + s)
    return 1.0 + core / 6.0, 1.0 + core / 3.0


def c5_residuals(alpha: float, beta: float) -> tuple[float, float, float, float, float]:
    """Residuals of the five equations defining the five-point case."""
    minus, plus = logistic_period2(beta)
    g, h = logistic(alpha), logistic(beta)
    fix_g = logistic_fixed_point(alpha)
    return (
        h.eval(fix_g) - plus,
        g.eval(minus) - fix_g,
        g.eval(logistic_fixed_point(beta)) - minus,
        g.eval(1.0 / beta) - minus,
        g.eval(plus) - 1.0 / beta,
    )


def lt_gamma(kind: TacKind, mu: float) -> float:
    """Logistic parameter paired with tent parameter mu for an LT case.

    LT1: gamma = 1 + mu        (coincident fixed points)
    LT2: gamma = (1 + mu) / mu (fixed points exchange)
    LT3: gamma = (1 + mu^2)/mu (fixed point of g inside h's period-2 orbit)
    """
    if mu == 1.0:
        raise ParameterError("mu = 1 makes the left tent branch the identity")
    if mu < 1.0:
        raise ParameterError(f"mu={mu!r} below the admissible range (mu > 1)")
    if kind is TacKind.LT1:
        gamma = 1.0 + mu
    elif kind is TacKind.LT2:
        gamma = (1.0 + mu) / mu
    elif kind is TacKind.LT3:
        gamma = (1.0 + mu * mu) / mu
    else:
        raise ParameterError(f"{kind} is not a logistic-tent case")
    if gamma > 4.0:
        raise ParameterError(f"gamma={gamma!r} above 4 for mu={mu!r}")
    return gamma


def build_tac(kind: TacKind, free_param: float | None = None) -> FiniteInvariantSet:
    """Construct the invariant set of a given case.

    free_param is beta for L2 and mu for the LT cases; L3 and L5 have no
    free parameter (their parameters are fixed by solve_c3 / solve_c5).
    Points are listed in the canonical order with labels:

      L2  {fix(g), 1/alpha}                      [fixed_g, fixed_h]
      L3  {1/alpha, fix(g), plus root}           [bridging, periodic_h2 x2]
      L5  {1/beta, minus, fix(g), fix(h), plus}  [bridging, periodic_h2,
                                                  fixed_g, fixed_h, periodic_h2]
      LT1 {mu/(1+mu)}                            [fixed_h]
      LT2 {1 - 1/gamma, mu/(1+mu)}               [fixed_g, fixed_h]
      LT3 {mu/(1+mu^2), 1-1/gamma, mu^2/(1+mu^2)} [periodic_h2, fixed_g,
                                                   periodic_h2]

    The built set is checked for pairwise-distinct points (except LT1) and
    forward invariance to 1e-10; violations raise ParameterError.
    """
    if kind in (TacKind.L3, TacKind.L5):
        if free_param is not None:
            raise ParameterError(f"{kind.value} takes no free parameter")
    elif free_param is None:
        raise ParameterError(f"{kind.value} requires a free parameter")

    if kind is TacKind.L2:
        beta = float(free_param)
        alpha = c2_alpha(beta)
        points = [logistic_fixed_point(alpha), 1.0 / alpha]
        labels = (FIXED_G, FIXED_H)
        params = (alpha, beta)
    elif kind is TacKind.L3:
        alpha, beta = solve_c3()
        _, plus = logistic_period2(beta)
        points = [1.0 / alpha, logistic_fixed_point(alpha), plus]
        labels = (BRIDGING, PERIODIC_H2, PERIODIC_H2)
        params = (alpha, beta)
    elif kind is TacKind.L5:
        alpha, beta = solve_c5()
        minus, plus = logistic_period2(beta)
        points = [
            1.0 / beta,
            minus,
            logistic_fixed_point(alpha),
            logistic_fixed_point(beta),
            plus,
        ]
        labels = (BRIDGING, PERIODIC_H2, FIXED_G, FIXED_H, PERIODIC_H2)
        params = (alpha, beta)
    else:
        mu = float(free_param)
        gamma = lt_gamma(kind, mu)
        if kind is TacKind.LT1:
            points = [tent_fixed_points(mu)[1]]
            labels = (FIXED_H,)
        elif kind is TacKind.LT2:
            points = [logistic_fixed_point(gamma), tent_fixed_points(mu)[1]]
            labels = (FIXED_G, FIXED_H)
        else:
            first, second = tent_period2(mu)
            points = [first, logistic_fixed_point(gamma), second]
            labels = (PERIODIC_H2, FIXED_G, PERIODIC_H2)
        params = (mu, gamma)

    fis = FiniteInvariantSet(
        kind=kind,
        points=np.asarray(points, dtype=np.float64),
        labels=labels,
        params=params,
    )
    _validate_built(fis)
    return fis


def _validate_built(fis: FiniteInvariantSet) -> None:
    pts = fis.points
    if np.any(pts < 0.0) or np.any(pts > 1.0):
        raise ParameterError(f"{fis.kind.value}: points leave [0, 1] for params {fis.params}")
    if len(pts) > 1:
        gaps = np.abs(pts[:, None] - pts[None, :])[~np.eye(len(pts), dtype=bool)]
        if gaps.min() <= DISTINCT_TOL:
            raise ParameterError(
                f"{fis.kind.value}: degenerate set (coincident points) for params {fis.params}"
            )
    report = verify_invariance(fis, fis.config(), tol=BUILD_TOL)
    if not report.passed:
        raise ParameterError(
            f"{fis.kind.value}: set not invariant (max distance {report.max_distance:.3e}) "
            f"for params {fis.params}"
        )


def verify_invariance(fis: FiniteInvariantSet, cfg: IfsConfig, tol: float) -> InvarianceReport:
    """Check that both maps send every set point onto a set point within tol.

    Failure is reported, not raised. The caller is responsible for passing a
    config whose maps match fis.params.
    """
    pts = fis.points
    targets: dict[str, list[int]] = {"g": [], "h": []}
    dists: dict[str, list[float]] = {"g": [], "h": []}
    for name, m in (("g", cfg.g), ("h", cfg.h)):
        for x in pts:
            y = m.eval(float(x))
            diff = np.abs(pts - y)
            j = int(np.argmin(diff))  # argmin takes the lowest index on ties
            targets[name].append(j)
            dists[name].append(float(diff[j]))
    max_distance = max(dists["g"] + dists["h"])
    return InvarianceReport(
        passed=max_distance <= tol,
        tol=tol,
        max_distance=max_distance,
        g_targets=tuple(targets["g"]),
        h_targets=tuple(targets["h"]),
        g_distances=tuple(dists["g"]),
        h_distances=tuple(dists["h"]),
    )


def _return_period(m: Map1D, x: float, k_max: int, tol: float) -> int | None:
    y = x
    for k in range(1, k_max + 1):
        y = m.eval(y)
        if abs(y - x) <= tol:
            return k
    return None


def classify_bridging(
    fis: FiniteInvariantSet,
    cfg: IfsConfig,
    k_max: int = 4,
    tol: float = 1e-9,
) -> tuple[PointLabel, ...]:
    """Recompute per-point labels from the dynamics alone.

    A point is periodic of a map when iterating that map k <= k_max times
    returns to it within tol, and bridging when periodic under neither map.
    Periodicity under h takes precedence, so a point that is simultaneously
    a fixed point of g and a period-2 point of h carries the period-2 label
    (matching the stored labels of the three-point logistic case).
    """
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    labels = []
    for x in fis.points:
        k_h = _return_period(cfg.h, float(x), k_max, tol)
        k_g = _return_period(cfg.g, float(x), k_max, tol)
        if k_h is not None:
            labels.append(FIXED_H if k_h == 1 else PointLabel(LabelKind.PERIODIC_H, k_h))
        elif k_g is not None:
            labels.append(FIXED_G if k_g == 1 else PointLabel(LabelKind.PERIODIC_G, k_g))
        else:
            labels.append(BRIDGING)
    return tuple(labels)


def write_set_csv(fis: FiniteInvariantSet, path) -> None:
    """Write columns index,point,label,param1,param2."""
    p1, p2 = fis.params
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "point", "label", "param1", "param2"])
        for i, (x, lab) in enumerate(zip(fis.points, fis.labels)):
            w.writerow([i, repr(float(x)), str(lab), repr(p1), repr(p2)])


def _cbrt(v: float) -> float:
    # real cube root of a nonnegative radicand (all radicands here are > 0)
    return float(np.cbrt(v))
