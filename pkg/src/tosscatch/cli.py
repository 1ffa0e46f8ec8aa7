"""Command-line front end.

Subcommands: simulate, conditions, lyapunov, stationary, bifurcation,
heatmap, cover. Every run writes a JSON manifest recording the resolved
parameters, seed, outputs, and package version; re-running the argv stored
in a manifest reproduces the outputs byte-for-byte. Exit codes: 0 success,
2 usage error, 1 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__
from .engine import IfsConfig, finite_time_lyapunov, simulate, write_trajectory_csv
from .errors import (
    DomainError,
    EscapeError,
    NonUniqueStationaryError,
    ParameterError,
    SingularDerivativeError,
)
from .geometry import (
    ScanSettings,
    bifurcation_scan,
    greedy_cover,
    heatmap_scan,
    write_bifurcation_csv,
    write_grid_csv,
    write_grid_pgm,
)
from .maps import Map1D, MapKind
from .spectrum import (
    build_transition_matrix,
    expected_lyapunov,
    stationary_distribution,
    sweep_expected_lyapunov,
    write_lyapunov_sweep_csv,
    write_stationary_csv,
)
from .structures import TacKind, build_tac, verify_invariance, write_set_csv

THREADS_ENV = "TOSSCATCH_THREADS"

_ERRORS = (
    DomainError,
    ParameterError,
    EscapeError,
    SingularDerivativeError,
    NonUniqueStationaryError,
    ValueError,
    OSError,
)


def fmt(v: float) -> str:
    """Floats are printed with 15 significant digits for round-trip safety."""
    return f"{v:.15g}"


def _map_spec(text: str) -> Map1D:
    """Parse 'kind:param', e.g. logistic:3.0 or tent:1.4."""
    try:
        kind_s, param_s = text.split(":", 1)
        return Map1D(MapKind(kind_s), float(param_s))
    except (ValueError, KeyError) as exc:
        raise argparse.ArgumentTypeError(
            f"expected kind:param (e.g. logistic:3.0), got {text!r}"
        ) from exc


def _range_spec(text: str) -> tuple[float, float, int]:
    """Parse 'lo:hi:n' into a sweep range."""
    try:
        lo_s, hi_s, n_s = text.split(":")
        return float(lo_s), float(hi_s), int(n_s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected lo:hi:n, got {text!r}") from exc


def _case(text: str) -> TacKind:
    try:
        return TacKind(text.lower())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"unknown case {text!r}") from exc


def _default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _write_manifest(args, outputs: list[str]) -> None:
    path = args.manifest
    if path is None:
        path = (outputs[0] + ".manifest.json") if outputs else f"{args.subcommand}.manifest.json"
    params = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("func", "manifest", "argv") and not callable(v)
    }
    doc = {
        "subcommand": args.subcommand,
        "argv": args.argv,
        "params": {k: (str(v) if isinstance(v, (Map1D, TacKind)) else v) for k, v in params.items()},
        "seed": getattr(args, "seed", None),
        "outputs": outputs,
        "version": __version__,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _build_case(args):
    kind = args.case
    if kind is TacKind.L2:
        return build_tac(kind, args.beta)
    if kind in (TacKind.L3, TacKind.L5):
        return build_tac(kind)
    return build_tac(kind, args.mu)


def cmd_simulate(args) -> int:
    cfg = IfsConfig(g=args.g, h=args.h, p=args.p, seed=args.seed)
    traj = simulate(cfg, x0=args.x0, n_transient=args.transient, n_keep=args.keep)
    write_trajectory_csv(traj, args.out)
    _write_manifest(args, [args.out])
    print(f"wrote {args.out} ({traj.n_steps} steps kept)")
    return 0


def cmd_conditions(args) -> int:
    fis = _build_case(args)
    report = verify_invariance(fis, fis.config(), tol=args.tol)
    n1, n2 = fis.param_names
    print(f"case: {fis.kind.value}")
    print(f"{n1} = {fmt(fis.params[0])}")
    print(f"{n2} = {fmt(fis.params[1])}")
    status = "pass" if report.passed else "FAIL"
    print(f"invariance: max residual {report.max_distance:.3e} (tol {args.tol:g}) {status}")
    print("index point label g_to h_to")
    for i, (x, lab) in enumerate(zip(fis.points, fis.labels)):
        print(f"{i} {fmt(float(x))} {lab} {report.g_targets[i]} {report.h_targets[i]}")
    outputs = []
    if args.out:
        write_set_csv(fis, args.out)
        outputs.append(args.out)
        print(f"wrote {args.out}")
    _write_manifest(args, outputs)
    return 0


def cmd_lyapunov(args) -> int:
    fis = _build_case(args)
    outputs = []
    if args.sweep_p is not None:
        lo, hi, n = args.sweep_p
        ps = np.linspace(lo, hi, n)
        values = sweep_expected_lyapunov(fis, ps)
        if args.out:
            write_lyapunov_sweep_csv(args.out, ps, values)
            outputs.append(args.out)
            print(f"wrote {args.out} ({n} rows)")
        else:
            print("p,E_lambda")
            for p, v in zip(ps, values):
                print(f"{fmt(p)},{fmt(v)}")
    else:
        value = expected_lyapunov(fis, fis.config(p=args.p))
        print(fmt(value))
        if args.mc:
            cfg = fis.config(p=args.p, seed=args.seed)
            traj = simulate(cfg, x0=args.x0, n_transient=args.transient, n_keep=args.mc)
            estimate = finite_time_lyapunov(traj, cfg)
            print(f"mc_estimate {fmt(estimate)} ({args.mc} steps)")
    _write_manifest(args, outputs)
    return 0


def cmd_stationary(args) -> int:
    fis = _build_case(args)
    tm = build_transition_matrix(fis, fis.config(p=args.p))
    pi = stationary_distribution(tm)
    print(" ".join(fmt(float(w)) for w in pi))
    outputs = []
    if args.out:
        write_stationary_csv(args.out, pi)
        outputs.append(args.out)
        print(f"wrote {args.out}")
    _write_manifest(args, outputs)
    return 0


def cmd_bifurcation(args) -> int:
    settings = ScanSettings(
        p=args.p, x0=args.x0, n_transient=args.transient, n_keep=args.keep, seed=args.seed
    )
    rows = bifurcation_scan(
        args.family, args.gamma, delta=args.delta, mu=args.mu, settings=settings
    )
    write_bifurcation_csv(rows, args.out)
    _write_manifest(args, [args.out])
    print(f"wrote {args.out} ({len(rows)} sweep values x {args.keep} states)")
    return 0


def cmd_heatmap(args) -> int:
    settings = ScanSettings(
        p=args.p, x0=args.x0, n_transient=args.transient, n_keep=args.keep, seed=args.seed
    )
    grid = heatmap_scan(
        args.family, res=args.res, epsilon=args.eps, settings=settings, threads=args.threads
    )
    csv_path = args.out + ".csv"
    pgm_path = args.out + ".pgm"
    write_grid_csv(grid, csv_path)
    write_grid_pgm(grid, pgm_path, v_cap=args.cap)
    _write_manifest(args, [csv_path, pgm_path])
    print(f"wrote {csv_path} and {pgm_path} ({grid.values.shape[0]}x{grid.values.shape[1]})")
    return 0


def cmd_cover(args) -> int:
    xs = []
    with open(args.input, newline="") as fh:
        for row in csv.DictReader(fh):
            xs.append(float(row["x"]))
    result = greedy_cover(np.asarray(xs), args.eps)
    print(result.count)
    _write_manifest(args, [])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tosscatch",
        description=(
            "Random iterated function systems from logistic and tent maps: "
            "simulation, finite invariant sets, stationary measures, Lyapunov "
            "exponents, and parameter-space scans."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_manifest(p):
        p.add_argument(
            "--manifest",
            default=None,
            help="manifest path (default: <first output>.manifest.json, "
            "or <subcommand>.manifest.json when nothing else is written)",
        )

    def add_case(p, with_p=True):
        p.add_argument(
            "--case",
            type=_case,
            required=True,
            choices=list(TacKind),
            metavar="{l2,l3,l5,lt1,lt2,lt3}",
            help="invariant-set case",
        )
        p.add_argument("--beta", type=float, default=3.0, help="free parameter for l2 (default 3.0)")
        p.add_argument("--mu", type=float, default=1.4, help="free parameter for lt cases (default 1.4)")
        if with_p:
            p.add_argument("--p", type=float, default=0.5, help="probability of selecting g (default 0.5)")

    s = sub.add_parser("simulate", help="run the random system and write the trajectory CSV")
    s.add_argument("--g", type=_map_spec, required=True, help="first map, kind:param (e.g. logistic:1.5)")
    s.add_argument("--h", type=_map_spec, required=True, help="second map, kind:param (e.g. logistic:3.0)")
    s.add_argument("--p", type=float, default=0.5, help="probability of selecting g (default 0.5)")
    s.add_argument("--x0", type=float, default=0.3, help="initial condition (default 0.3)")
    s.add_argument("--transient", type=int, default=10_000, help="discarded steps (default 10000)")
    s.add_argument("--keep", type=int, default=1000, help="recorded steps (default 1000)")
    s.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    s.add_argument("--out", default="traj.csv", help="trajectory CSV path (default traj.csv)")
    add_manifest(s)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("conditions", help="solve a case and print its points, labels, residuals")
    add_case(s, with_p=False)
    s.add_argument("--tol", type=float, default=1e-10, help="invariance tolerance (default 1e-10)")
    s.add_argument("--out", default=None, help="optional invariant-set CSV path")
    add_manifest(s)
    s.set_defaults(func=cmd_conditions)

    s = sub.add_parser("lyapunov", help="exact expected Lyapunov exponent of a case")
    add_case(s)
    s.add_argument("--sweep-p", type=_range_spec, default=None, metavar="LO:HI:N",
                   help="sweep the selection probability, CSV output p,E_lambda")
    s.add_argument("--mc", type=int, default=0, metavar="STEPS",
                   help="also print a seeded Monte-Carlo estimate over STEPS steps")
    s.add_argument("--x0", type=float, default=0.3, help="MC initial condition (default 0.3)")
    s.add_argument("--transient", type=int, default=10_000, help="MC transient (default 10000)")
    s.add_argument("--seed", type=int, default=0, help="MC seed (default 0)")
    s.add_argument("--out", default=None, help="CSV path for sweeps")
    add_manifest(s)
    s.set_defaults(func=cmd_lyapunov)

    s = sub.add_parser("stationary", help="stationary distribution of a case")
    add_case(s)
    s.add_argument("--out", default=None, help="optional CSV path (index,weight)")
    add_manifest(s)
    s.set_defaults(func=cmd_stationary)

    s = sub.add_parser("bifurcation", help="kept states along a one-parameter sweep")
    s.add_argument("--family", required=True, choices=["logistic-pair", "logistic-tent"])
    s.add_argument("--delta", type=float, default=None,
                   help="parameter gap for logistic-pair: alpha=gamma(1-delta), beta=gamma(1+delta)")
    s.add_argument("--mu", type=float, default=None, help="tent parameter for logistic-tent")
    s.add_argument("--gamma", type=_range_spec, required=True, metavar="LO:HI:N",
                   help="sweep range for gamma")
    s.add_argument("--p", type=float, default=0.5, help="probability of selecting g (default 0.5)")
    s.add_argument("--x0", type=float, default=0.3, help="initial condition (default 0.3)")
    s.add_argument("--transient", type=int, default=10_000, help="discarded steps (default 10000)")
    s.add_argument("--keep", type=int, default=1000, help="recorded steps per value (default 1000)")
    s.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    s.add_argument("--out", default="bifurcation.csv", help="CSV path (default bifurcation.csv)")
    add_manifest(s)
    s.set_defaults(func=cmd_bifurcation)

    s = sub.add_parser("heatmap", help="epsilon-cover counts over the parameter plane (CSV + PGM)")
    s.add_argument("--family", required=True, choices=["logistic", "logistic-tent"])
    s.add_argument("--res", type=int, default=None,
                   help="grid resolution per axis (default 401 logistic, 501 logistic-tent)")
    s.add_argument("--eps", type=float, default=1e-6, help="cover radius (default 1e-6)")
    s.add_argument("--p", type=float, default=0.5, help="probability of selecting g (default 0.5)")
    s.add_argument("--x0", type=float, default=0.3, help="initial condition (default 0.3)")
    s.add_argument("--transient", type=int, default=10_000, help="discarded steps (default 10000)")
    s.add_argument("--keep", type=int, default=1000, help="recorded steps per cell (default 1000)")
    s.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    s.add_argument("--threads", type=int, default=None,
                   help=f"worker threads (default ${THREADS_ENV} or 1); output is thread-count independent")
    s.add_argument("--cap", type=int, default=100, help="PGM gray cap (default 100)")
    s.add_argument("--out", default="heatmap", help="output prefix (default heatmap)")
    add_manifest(s)
    s.set_defaults(func=cmd_heatmap)

    s = sub.add_parser("cover", help="greedy epsilon-cover count of a trajectory CSV")
    s.add_argument("--input", required=True, help="CSV with an x column")
    s.add_argument("--eps", type=float, default=1e-6, help="cover radius (default 1e-6)")
    add_manifest(s)
    s.set_defaults(func=cmd_cover)

    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = list(argv)
    if getattr(args, "threads", None) is None and args.subcommand == "heatmap":
        args.threads = _default_threads()
    try:
        return args.func(args)
    except _ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
