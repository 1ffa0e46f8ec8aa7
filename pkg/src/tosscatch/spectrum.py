"""Markov-chain view of a finite invariant set: transition matrix,
stationary distribution, and the exact expected Lyapunov exponent.

On an invariant set the random system induces a finite Markov chain whose
row-stochastic matrix has entry (i, j) = p*[g(x_i) -> x_j] + (1-p)*[h(x_i)
-> x_j]. The stationary distribution is the left fixed vector pi = pi P,
and the expected Lyapunov exponent is the pi- and selection-averaged log
slope magnitude

    E[lambda] = sum_i pi_i ( p ln|g'(x_i)| + (1-p) ln|h'(x_i)| ),

whose sign determines linear stability of the finite-set dynamics.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .engine import IfsConfig
from .errors import (
    DomainError,
    NonUniqueStationaryError,
    ParameterError,
    SingularDerivativeError,
)
from .structures import FiniteInvariantSet, TacKind, verify_invariance

__all__ = [
    "TransitionMatrix",
    "build_transition_matrix",
    "stationary_distribution",
    "expected_lyapunov",
    "sweep_expected_lyapunov",
    "closed_form_lyapunov",
    "write_lyapunov_sweep_csv",
    "write_stationary_csv",
]

_MIN_ABS_DERIV = 1e-300
_STATIONARY_TOL = 1e-12


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic matrix over the set points, parameterized by p.

    g_targets[i] / h_targets[i] are the deterministic images of point i, so
    every entry is 0, p, 1-p, or 1 and the matrix can be re-evaluated at any
    selection probability via at().
    """

    p: float
    g_targets: tuple[int, ...]
    h_targets: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.g_targets)

    def at(self, p: float) -> np.ndarray:
        m = np.zeros((self.n, self.n))
        for i, (jg, jh) in enumerate(zip(self.g_targets, self.h_targets)):
            m[i, jg] += p
            m[i, jh] += 1.0 - p
        return m

    @cached_property
    def matrix(self) -> np.ndarray:
        return self.at(self.p)

    def is_irreducible(self) -> bool:
        """Every state reaches every other along positive-probability edges."""
        support = self.matrix > 0.0
        reach = np.eye(self.n, dtype=bool)
        for _ in range(self.n):
            reach = reach | (reach @ support)
        return bool(reach.all())

    def period(self) -> int:
        """gcd of cycle lengths through state 0 (1 means aperiodic).

        Only meaningful for an irreducible chain; computed from BFS levels:
        every edge u -> v contributes gcd(d[u] + 1 - d[v]).
        """
        support = self.matrix > 0.0
        depth = {0: 0}
        frontier = [0]
        while frontier:
            nxt = []
            for u in frontier:
                for v in np.nonzero(support[u])[0]:
                    v = int(v)
                    if v not in depth:
                        depth[v] = depth[u] + 1
                        nxt.append(v)
            frontier = nxt
        g = 0
        for u in depth:
            for v in np.nonzero(support[u])[0]:
                v = int(v)
                if v in depth:
                    g = math.gcd(g, depth[u] + 1 - depth[v])
        return abs(g)


def build_transition_matrix(
    fis: FiniteInvariantSet, cfg: IfsConfig, tol: float = 1e-10
) -> TransitionMatrix:
    """Derive the chain from the deterministic transition targets.

    Raises ParameterError when the set fails the invariance check at tol.
    """
    report = verify_invariance(fis, cfg, tol)
    if not report.passed:
        raise ParameterError(
            f"set is not invariant under the config maps "
            f"(max distance {report.max_distance:.3e} > tol {tol:g})"
        )
    return TransitionMatrix(p=cfg.p, g_targets=report.g_targets, h_targets=report.h_targets)


def stationary_distribution(tm: TransitionMatrix) -> np.ndarray:
    """Probability vector pi with pi P = pi, by direct linear solve.

    The stationarity equations are stacked with the normalization sum(pi)=1
    and solved in the least-squares sense; a rank deficiency means the chain
    is reducible with more than one stationary vector and raises
    NonUniqueStationaryError. The returned vector satisfies the stationarity
    residual and normalization to 1e-12.
    """
    n = tm.n
    P = tm.matrix
    A = np.vstack([P.T - np.eye(n), np.ones((1, n))])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi, _, rank, _ = np.linalg.lstsq(A, b, rcond=None)
    if rank < n:
        raise NonUniqueStationaryError(
            f"reducible chain (rank {rank} < {n}); stationary vector is not unique"
        )
    residual = float(np.max(np.abs(pi @ P - pi)))
    if residual > _STATIONARY_TOL or abs(pi.sum() - 1.0) > _STATIONARY_TOL:
        raise NonUniqueStationaryError(
            f"stationary solve failed (residual {residual:.3e})"
        )
    if pi.min() < -_STATIONARY_TOL:
        raise NonUniqueStationaryError(f"negative stationary weight {pi.min():.3e}")
    return np.clip(pi, 0.0, None)


def expected_lyapunov(fis: FiniteInvariantSet, cfg: IfsConfig) -> float:
    """Exact expected Lyapunov exponent on the invariant set.

    Averages ln|slope| of the selected map over the stationary distribution:
    sum_i pi_i (p ln|g'(x_i)| + (1-p) ln|h'(x_i)|).
    """
    tm = build_transition_matrix(fis, cfg)
    pi = stationary_distribution(tm)
    p = cfg.p
    total = 0.0
    for weight, x in zip(pi, fis.points):
        dg = abs(cfg.g.deriv(float(x)))
        dh = abs(cfg.h.deriv(float(x)))
        if (p > 0.0 and dg < _MIN_ABS_DERIV) or (p < 1.0 and dh < _MIN_ABS_DERIV):
            raise SingularDerivativeError(f"zero slope at set point {x!r}")
        term = 0.0
        if p > 0.0:
            term += p * math.log(dg)
        if p < 1.0:
            term += (1.0 - p) * math.log(dh)
        total += weight * term
    return total


def sweep_expected_lyapunov(fis: FiniteInvariantSet, p_values) -> np.ndarray:
    """expected_lyapunov across selection probabilities (invariance is
    p-independent, so the set is reused)."""
    return np.array([expected_lyapunov(fis, fis.config(p=float(p))) for p in p_values])


def closed_form_lyapunov(kind: TacKind, param: float, p: float) -> float:
    """Printed closed forms of E[lambda] for the cases that have one.

    L2 (param = alpha): p ln|2 - alpha| + (1-p) ln|(alpha-2)/(alpha-1)|
    LT1 (param = mu):   p ln(mu - 1) + (1-p) ln mu
    LT2 (param = mu):   p ln((mu - 1)/mu) + (1-p) ln mu
    LT3 (param = mu):   p(3-p)/(2-p) ln(mu-1) + p(1-p)/(2-p) ln(mu+1)
                        + (1-2p) ln mu

    The three- and five-point logistic cases have no exact printed form and
    raise ParameterError; use expected_lyapunov for them. A log argument
    that is not positive raises DomainError.
    """
    if kind is TacKind.L2:
        a = param
        args = (abs(2.0 - a), abs((a - 2.0) / (a - 1.0)))
        _check_log_args(args)
        return p * math.log(args[0]) + (1.0 - p) * math.log(args[1])
    if kind is TacKind.LT1:
        mu = param
        _check_log_args((mu - 1.0, mu))
        return p * math.log(mu - 1.0) + (1.0 - p) * math.log(mu)
    if kind is TacKind.LT2:
        mu = param
        _check_log_args((mu - 1.0, mu))
        return p * math.log((mu - 1.0) / mu) + (1.0 - p) * math.log(mu)
    if kind is TacKind.LT3:
        mu = param
        _check_log_args((mu - 1.0, mu + 1.0, mu))
        return (
            p * (3.0 - p) / (2.0 - p) * math.log(mu - 1.0)
            + p * (1.0 - p) / (2.0 - p) * math.log(mu + 1.0)
            + (1.0 - 2.0 * p) * math.log(mu)
        )
    raise ParameterError(
        f"{kind.value} has no exact closed form; use expected_lyapunov"
    )


def _check_log_args(args) -> None:
    for a in args:
        if a <= 0.0:
            raise DomainError(f"log argument {a!r} is not positive")


def write_lyapunov_sweep_csv(path, p_values, values) -> None:
    """Write columns p,E_lambda."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p", "E_lambda"])
        for p, v in zip(p_values, values):
            w.writerow([repr(float(p)), repr(float(v))])


def write_stationary_csv(path, pi) -> None:
    """Write columns index,weight."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "weight"])
        for i, v in enumerate(pi):
            w.writerow([i, repr(float(v))])
