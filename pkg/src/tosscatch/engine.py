"""Seeded simulation of the random two-map system.

Each step applies g with probability p and h with probability 1 - p, the
selections drawn i.i.d. from a splitmix64 stream so that a run is fully
determined by (config, x0, n_transient, n_keep).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, EscapeError, SingularDerivativeError
from .maps import Map1D, MapKind
from .rng import choice_stream

__all__ = [
    "ESCAPE_TOL",
    "IfsConfig",
    "Trajectory",
    "simulate",
    "step_log_derivs",
    "finite_time_lyapunov",
    "occupation_frequencies",
    "write_trajectory_csv",
]

# Iterates may leave [0, 1] by at most this much (floating-point slop near
# the map maximum) before the run is aborted as escaped.
ESCAPE_TOL = 1e-9

_MIN_ABS_DERIV = 1e-300


@dataclass(frozen=True)
class IfsConfig:
    """The pair (g, h), the probability p of selecting g, and the RNG seed."""

    g: Map1D
    h: Map1D
    p: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p={self.p!r} outside [0, 1]")


@dataclass
class Trajectory:
    """Kept portion of a run: the entry state plus one state per kept step.

    chose_g[k] is True when g produced states[k+1] from states[k], so
    len(chose_g) == len(states) - 1.
    """

    states: np.ndarray
    chose_g: np.ndarray
    transient_len: int = field(default=0)

    @property
    def n_steps(self) -> int:
        return len(self.chose_g)


def simulate(
    cfg: IfsConfig,
    x0: float = 0.3,
    n_transient: int = 10_000,
    n_keep: int = 1000,
) -> Trajectory:
    """Run n_transient + n_keep random steps from x0 and keep the tail.

    Raises EscapeError if any iterate leaves [0, 1] by more than ESCAPE_TOL;
    iterates within the tolerance are clamped back onto the interval so that
    round-off at the map maximum cannot abort a run.
    """
    if not 0.0 <= x0 <= 1.0:
        raise DomainError(f"x0={x0!r} outside [0, 1]")
    if n_keep < 1:
        raise ValueError("n_keep must be >= 1")
    if n_transient < 0:
        raise ValueError("n_transient must be >= 0")

    n_total = n_transient + n_keep
    use_g = choice_stream(cfg.seed, n_total, cfg.p)

    full = np.empty(n_total + 1, dtype=np.float64)
    full[0] = x0
    _iterate_scalar(float(x0), use_g.tolist(), cfg.g, cfg.h, full)

    return Trajectory(
        states=full[n_transient:].copy(),
        chose_g=use_g[n_transient:].copy(),
        transient_len=n_transient,
    )


def _iterate_scalar(x, flags, g, h, out):
    # Tight inner loop; the arithmetic mirrors Map1D.eval exactly so that
    # replaying recorded choices through eval reproduces states bit-for-bit.
    g_logistic = g.kind is MapKind.LOGISTIC
    h_logistic = h.kind is MapKind.LOGISTIC
    gp = g.param
    hp = h.param
    lo_bound = -ESCAPE_TOL
    hi_bound = 1.0 + ESCAPE_TOL
    i = 1
    for chose_g in flags:
        if chose_g:
            if g_logistic:
                x = gp * x * (1.0 - x)
            elif x < 0.5:
                x = gp * x
            else:
                x = -(gp * (x - 1.0))
        else:
            if h_logistic:
                x = hp * x * (1.0 - x)
            elif x < 0.5:
                x = hp * x
            else:
                x = -(hp * (x - 1.0))
        if x < 0.0:
            if x < lo_bound:
                raise EscapeError(f"iterate {x!r} left [0, 1] at step {i - 1}")
            x = 0.0
        elif x > 1.0:
            if x > hi_bound:
                raise EscapeError(f"iterate {x!r} left [0, 1] at step {i - 1}")
            x = 1.0
        out[i] = x
        i += 1
    return x


def step_log_derivs(traj: Trajectory, cfg: IfsConfig) -> np.ndarray:
    """ln|slope of the selected map| at each kept step's starting state."""
    x = traj.states[:-1]
    d = np.where(traj.chose_g, cfg.g.deriv_array(x), cfg.h.deriv_array(x))
    ad = np.abs(d)
    if np.any(ad < _MIN_ABS_DERIV):
        k = int(np.argmax(ad < _MIN_ABS_DERIV))
        raise SingularDerivativeError(
            f"zero derivative at step {k} (state {x[k]!r})"
        )
    return np.log(ad)


def finite_time_lyapunov(traj: Trajectory, cfg: IfsConfig) -> float:
    """Finite-time Lyapunov exponent: mean of ln|selected-map slope| over
    the kept steps."""
    return float(step_log_derivs(traj, cfg).mean())


def occupation_frequencies(states: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Fraction of states nearest to each reference point."""
    idx = np.argmin(np.abs(np.asarray(states)[:, None] - np.asarray(points)[None, :]), axis=1)
    return np.bincount(idx, minlength=len(points)) / len(states)


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Write columns step,x,choice; the choice on a row produced the next
    row's state, so the final row's choice is empty."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "x", "choice"])
        n = len(traj.states)
        for k in range(n):
            choice = ""
            if k < n - 1:
                choice = "g" if traj.chose_g[k] else "h"
            w.writerow([k, repr(float(traj.states[k])), choice])
