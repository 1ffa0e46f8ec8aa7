"""Attractor-size estimation and parameter-space experiment drivers.

The size proxy is the minimum number of closed intervals of length
2*epsilon (epsilon-balls in one dimension) needed to cover a trajectory,
computed by a greedy sweep over the sorted points: anchor an interval at
the leftmost uncovered point, discard everything it covers, repeat. In one
dimension the greedy count is the exact minimum.

Scans evaluate many parameter cells at once with a vectorized kernel whose
per-cell arithmetic and per-cell splitmix64 streams are bit-identical to
engine.simulate, so results do not depend on execution order or thread
count.
"""

from __future__ import annotations

import csv
from bisect import bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .engine import ESCAPE_TOL
from .errors import ParameterError
from .rng import GOLDEN, MASK64, _mix64_np, choice_threshold, derive_cell_seeds

__all__ = [
    "CoverResult",
    "greedy_cover",
    "ScanSettings",
    "AxisSpec",
    "ScanGrid",
    "scan_cells",
    "heatmap_scan",
    "bifurcation_scan",
    "write_grid_csv",
    "write_grid_pgm",
    "write_bifurcation_csv",
]

ESCAPE_SENTINEL = -1

HEATMAP_FAMILIES = ("logistic", "logistic-tent")
BIFURCATION_FAMILIES = ("logistic-pair", "logistic-tent")


@dataclass(frozen=True)
class CoverResult:
    """Greedy cover of a point set: interval count and left endpoints.

    Left endpoints are strictly increasing with gaps above 2*epsilon, and
    every input point lies in some [left, left + 2*epsilon] (right endpoint
    inclusive).
    """

    epsilon: float
    count: int
    interval_left_endpoints: np.ndarray


@dataclass(frozen=True)
class ScanSettings:
    """Shared simulation policy for scans: selection probability, initial
    condition, transient and kept lengths, and the base seed from which
    per-cell seeds are derived."""

    p: float = 0.5
    x0: float = 0.3
    n_transient: int = 10_000
    n_keep: int = 1000
    seed: int = 0


@dataclass(frozen=True)
class AxisSpec:
    name: str
    lo: float
    hi: float
    n: int

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)


@dataclass(frozen=True)
class ScanGrid:
    """Cover counts on a parameter grid; values[j, i] belongs to
    (x_axis.values()[i], y_axis.values()[j]). Escaped cells hold -1."""

    x_axis: AxisSpec
    y_axis: AxisSpec
    values: np.ndarray
    meta: dict = field(default_factory=dict)


def greedy_cover(points, epsilon: float) -> CoverResult:
    """Minimal 1-D cover by intervals [x, x + 2*epsilon] anchored at points.

    Points are sorted ascending; each interval is anchored at the leftmost
    point not yet covered. A point exactly at an interval's right endpoint
    counts as covered (closed intervals), so a single point is always
    covered by one interval. Empty input gives count 0.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    pts = np.sort(np.asarray(points, dtype=np.float64))
    if pts.size == 0:
        return CoverResult(epsilon=epsilon, count=0, interval_left_endpoints=np.empty(0))
    lefts = []
    seq = pts.tolist()
    n = len(seq)
    i = 0
    width = 2.0 * epsilon
    while i < n:
        anchor = seq[i]
        lefts.append(anchor)
        i = bisect_right(seq, anchor + width, i)
    return CoverResult(
        epsilon=epsilon, count=len(lefts), interval_left_endpoints=np.asarray(lefts)
    )


def _cover_count_sorted(seq: list, width: float) -> int:
    n = len(seq)
    count = 0
    i = 0
    while i < n:
        count += 1
        i = bisect_right(seq, seq[i] + width, i)
    return count


def _iterate_cells(g_params, h_params, h_is_tent, seeds, settings):
    """Advance all cells together; returns (kept states, escaped mask).

    Per-cell streams and arithmetic match engine.simulate bit-for-bit:
    elementwise float64 ops are IEEE-identical to the scalar loop.
    """
    gp = np.asarray(g_params, dtype=np.float64)
    hp = np.asarray(h_params, dtype=np.float64)
    m = gp.size
    n_total = settings.n_transient + settings.n_keep

    p = settings.p
    all_g = p >= 1.0
    all_h = p <= 0.0
    thresh = None if (all_g or all_h) else np.uint64(choice_threshold(p))

    x = np.full(m, settings.x0, dtype=np.float64)
    escaped = np.zeros(m, dtype=bool)
    kept = np.empty((m, settings.n_keep), dtype=np.float64)
    seeds = seeds.astype(np.uint64)

    for k in range(n_total):
        if all_g:
            use_g = True
        elif all_h:
            use_g = False
        else:
            offset = np.uint64(((k + 1) * GOLDEN) & MASK64)
            draws = _mix64_np(seeds + offset)
            use_g = draws < thresh
        if h_is_tent:
            y_log = gp * x * (1.0 - x)
            y_tent = np.where(x < 0.5, hp * x, -(hp * (x - 1.0)))
            if use_g is True:
                y = y_log
            elif use_g is False:
                y = y_tent
            else:
                y = np.where(use_g, y_log, y_tent)
        else:
            if use_g is True:
                par = gp
            elif use_g is False:
                par = hp
            else:
                par = np.where(use_g, gp, hp)
            y = par * x * (1.0 - x)
        escaped |= (y < -ESCAPE_TOL) | (y > 1.0 + ESCAPE_TOL)
        x = np.clip(y, 0.0, 1.0)
        if k >= settings.n_transient:
            kept[:, k - settings.n_transient] = x
    return kept, escaped


def _family_cell_params(family, x_params, y_params):
    if family == "logistic":
        return x_params, y_params, False  # g = logistic(alpha=x), h = logistic(beta=y)
    if family == "logistic-tent":
        return y_params, x_params, True  # g = logistic(gamma=y), h = tent(mu=x)
    raise ParameterError(f"unknown heatmap family {family!r}")


def scan_cells(
    family: str,
    x_params,
    y_params,
    epsilon: float,
    settings: ScanSettings = ScanSettings(),
    seeds=None,
    cell_indices=None,
) -> np.ndarray:
    """Cover counts for an arbitrary batch of parameter cells.

    x_params / y_params follow the family's axis convention (logistic:
    alpha / beta; logistic-tent: mu / gamma). Seeds default to the grid
    policy derive_cell_seeds(settings.seed, i, j) with cell_indices = (i, j)
    arrays (both zero when omitted). Escaped cells get ESCAPE_SENTINEL.
    """
    x_params = np.asarray(x_params, dtype=np.float64)
    y_params = np.asarray(y_params, dtype=np.float64)
    if seeds is None:
        if cell_indices is None:
            i_idx = np.arange(x_params.size, dtype=np.int64)
            j_idx = np.zeros(x_params.size, dtype=np.int64)
        else:
            i_idx, j_idx = cell_indices
        seeds = derive_cell_seeds(settings.seed, np.asarray(i_idx), np.asarray(j_idx))
    g_params, h_params, h_is_tent = _family_cell_params(family, x_params, y_params)
    kept, escaped = _iterate_cells(g_params, h_params, h_is_tent, seeds, settings)
    kept.sort(axis=1)
    width = 2.0 * epsilon
    counts = np.empty(x_params.size, dtype=np.int32)
    for r in range(x_params.size):
        if escaped[r]:
            counts[r] = ESCAPE_SENTINEL
        else:
            counts[r] = _cover_count_sorted(kept[r].tolist(), width)
    return counts


_DEFAULT_RES = {"logistic": 401, "logistic-tent": 501}
_DEFAULT_AXES = {
    "logistic": (("alpha", 0.0, 4.0), ("beta", 0.0, 4.0)),
    "logistic-tent": (("mu", 0.0, 2.0), ("gamma", 0.0, 4.0)),
}


def heatmap_scan(
    family: str,
    res: int | None = None,
    epsilon: float = 1e-6,
    settings: ScanSettings = ScanSettings(),
    threads: int = 1,
) -> ScanGrid:
    """Cover-count grid over the family's parameter plane.

    Cells are independent: each runs its own seeded stream derived from the
    grid indices, results land in disjoint slots, and the grid is identical
    for any thread count. Escaped cells are recorded as -1, not raised.
    """
    if family not in HEATMAP_FAMILIES:
        raise ParameterError(f"unknown heatmap family {family!r}")
    if res is None:
        res = _DEFAULT_RES[family]
    if res < 2:
        raise ParameterError("grid resolution must be >= 2 per axis")
    (xn, xlo, xhi), (yn, ylo, yhi) = _DEFAULT_AXES[family]
    x_axis = AxisSpec(xn, xlo, xhi, res)
    y_axis = AxisSpec(yn, ylo, yhi, res)
    xs = x_axis.values()
    ys = y_axis.values()

    values = np.empty((res, res), dtype=np.int32)

    # Rows per block sized so a block's kept-state buffer stays ~30 MB.
    rows_per_block = max(1, 4_000_000 // max(1, res * settings.n_keep))
    blocks = [
        range(j0, min(j0 + rows_per_block, res)) for j0 in range(0, res, rows_per_block)
    ]

    def run_block(rows):
        j_idx = np.repeat(np.fromiter(rows, dtype=np.int64), res)
        i_idx = np.tile(np.arange(res, dtype=np.int64), len(rows))
        counts = scan_cells(
            family,
            xs[i_idx],
            ys[j_idx],
            epsilon,
            settings,
            seeds=derive_cell_seeds(settings.seed, i_idx, j_idx),
        )
        values[rows.start : rows.stop, :] = counts.reshape(len(rows), res)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_block, blocks))
    else:
        for rows in blocks:
            run_block(rows)

    meta = {
        "family": family,
        "epsilon": epsilon,
        "transient": settings.n_transient,
        "steps": settings.n_keep,
        "p": settings.p,
        "x0": settings.x0,
        "seed": settings.seed,
        "seed_policy": "splitmix64(base_seed XOR (i*2^32 + j))",
    }
    return ScanGrid(x_axis=x_axis, y_axis=y_axis, values=values, meta=meta)


def bifurcation_scan(
    family: str,
    sweep: tuple[float, float, int],
    delta: float | None = None,
    mu: float | None = None,
    settings: ScanSettings = ScanSettings(),
) -> list[tuple[float, np.ndarray]]:
    """Kept states along a one-parameter sweep.

    logistic-pair: sweep gamma with parameters alpha = gamma*(1 - delta),
    beta = gamma*(1 + delta); logistic-tent: sweep gamma at fixed tent
    parameter mu. Derived parameters outside the map domains raise
    ParameterError before anything runs. Each sweep value gets the seed
    derive_cell_seeds(settings.seed, index, 0).
    """
    lo, hi, n = sweep
    if n < 2:
        raise ParameterError("sweep needs at least 2 values")
    gammas = np.linspace(lo, hi, int(n))
    if family == "logistic-pair":
        if delta is None:
            raise ParameterError("logistic-pair sweep requires delta")
        g_params = gammas * (1.0 - delta)
        h_params = gammas * (1.0 + delta)
        if g_params.min() < 0 or g_params.max() > 4 or h_params.min() < 0 or h_params.max() > 4:
            raise ParameterError(
                f"derived logistic parameters leave [0, 4] for delta={delta!r}"
            )
        h_is_tent = False
    elif family == "logistic-tent":
        if mu is None:
            raise ParameterError("logistic-tent sweep requires mu")
        if not 0.0 <= mu <= 2.0:
            raise ParameterError(f"mu={mu!r} outside [0, 2]")
        if gammas.min() < 0 or gammas.max() > 4:
            raise ParameterError("gamma sweep leaves [0, 4]")
        g_params = gammas
        h_params = np.full(gammas.size, mu)
        h_is_tent = True
    else:
        raise ParameterError(f"unknown bifurcation family {family!r}")

    idx = np.arange(gammas.size, dtype=np.int64)
    seeds = derive_cell_seeds(settings.seed, idx, np.zeros_like(idx))
    kept, escaped = _iterate_cells(g_params, h_params, h_is_tent, seeds, settings)
    rows = []
    for r, gamma in enumerate(gammas):
        if escaped[r]:
            raise ParameterError(f"trajectory escaped at sweep value {gamma!r}")
        rows.append((float(gamma), kept[r].copy()))
    return rows


def write_grid_csv(grid: ScanGrid, path) -> None:
    """Comment header (lines starting with '#') holding the axes and scan
    metadata, then one row of comma-separated counts per y value, y
    ascending, x ascending within a row."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# x_axis={grid.x_axis.name} lo={grid.x_axis.lo!r} "
                 f"hi={grid.x_axis.hi!r} n={grid.x_axis.n}\n")
        fh.write(f"# y_axis={grid.y_axis.name} lo={grid.y_axis.lo!r} "
                 f"hi={grid.y_axis.hi!r} n={grid.y_axis.n}\n")
        for key in sorted(grid.meta):
            fh.write(f"# {key}={grid.meta[key]}\n")
        for j in range(grid.values.shape[0]):
            fh.write(",".join(str(int(v)) for v in grid.values[j]) + "\n")


def write_grid_pgm(grid: ScanGrid, path, v_cap: int = 100) -> None:
    """ASCII PGM (P2): gray = 255 * min(count, v_cap) // v_cap, escape
    sentinel -> 0. Rows are written top-down, so the highest y value comes
    first and the image matches the usual axis orientation."""
    ny, nx = grid.values.shape
    lines = [f"P2\n{nx} {ny}\n255\n"]
    for j in range(ny - 1, -1, -1):
        row = []
        for v in grid.values[j]:
            v = int(v)
            gray = 0 if v < 0 else (255 * min(v, v_cap)) // v_cap
            row.append(str(gray))
        lines.append(" ".join(row) + "\n")
    with open(path, "w") as fh:
        fh.writelines(lines)


def write_bifurcation_csv(rows, path) -> None:
    """Write columns sweep_value,x; one line per kept state."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sweep_value", "x"])
        for value, states in rows:
            for x in states:
                w.writerow([repr(float(value)), repr(float(x))])
