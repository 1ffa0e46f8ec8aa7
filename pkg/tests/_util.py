"""Shared test oracles: batch-means standard errors and an exhaustive
minimum-interval-cover solver independent of the greedy implementation."""

from functools import lru_cache

import numpy as np


def batch_se(values, n_batches: int = 100):
    """Mean and batch-means standard error of a (possibly correlated) series."""
    values = np.asarray(values, dtype=np.float64)
    usable = (len(values) // n_batches) * n_batches
    batches = values[:usable].reshape(n_batches, -1).mean(axis=1)
    mean = float(values.mean())
    se = float(batches.std(ddof=1) / np.sqrt(n_batches))
    return mean, se


def min_cover_exhaustive(points, epsilon: float) -> int:
    """Exact minimum number of closed intervals [a, a + 2*eps] anchored at
    points that cover all points.

    Explores every anchor choice covering the first uncovered point (not just
    the leftmost-anchor rule), so it is an independent check of the greedy
    count. Any cover can be normalized so each interval's left endpoint sits
    on a point, which keeps the search finite.
    """
    pts = sorted(points)
    n = len(pts)
    if n == 0:
        return 0
    width = 2.0 * epsilon

    @lru_cache(maxsize=None)
    def best(i: int) -> int:
        if i >= n:
            return 0
        cheapest = n + 1
        for a in range(i + 1):
            if pts[a] <= pts[i] <= pts[a] + width:
                j = i
                while j < n and pts[j] <= pts[a] + width:
                    j += 1
                cheapest = min(cheapest, 1 + best(j))
        return cheapest

    return best(0)
