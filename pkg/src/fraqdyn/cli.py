"""``fraqdyn`` command-line front end.

Usage::

    fraqdyn <command> [--config FILE] [--set section.key=value ...]

Every command writes its CSV files plus ``manifest.txt`` (the fully resolved
config, itself a valid ``--config`` file) into ``output.directory``.

Exit status is 0 on success, 1 on a domain or solver error and 2 on a usage
or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from typing import List, Optional

import numpy as np

from . import __version__
from .bifurcation import hopf_curve_2d, hopf_curve_3d, regime_boundaries_3d, stability_region_3d
from .config import RunConfig, parse_config, render_config
from .csvio import format_float, write_bursts, write_hopf_curve, write_region, write_regimes, write_trajectory
from .dynamics import BurstSummary, classify_attractor
from .equilibria import equilibria_2d, equilibrium_3d
from .errors import ConfigError, FraqdynError
from .fracsolve import solve_caputo
from .hrmodels import hr2d_vector_field, hr3d_vector_field
from .stability import Status, classify_2d, classify_3d

__all__ = ["COMMANDS", "main", "dispatch", "build_parser"]

MANIFEST = "manifest.txt"
EQUILIBRIA_2D_HEADER = ("branch", "x", "y", "r", "degenerate")
EQUILIBRIA_3D_HEADER = ("x", "y", "z", "r")
STABILITY_HEADER = ("branch", "x", "status", "case_label", "q_star", "q")


def _write_rows(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _opt(value) -> str:
    return "" if value is None else format_float(value)


def _simulate(cfg: RunConfig):
    params = cfg.params()
    field = hr3d_vector_field(params) if cfg.is_3d else hr2d_vector_field(params)
    traj = solve_caputo(field, cfg.initial_state(), cfg.solver_config())
    if cfg.is_3d:
        candidates = [equilibrium_3d(params).state]
    else:
        candidates = [e.state for e in equilibria_2d(params)]
    end = traj.states[-1]
    nearest = min(candidates, key=lambda s: float(np.linalg.norm(end - np.asarray(s))))
    return traj, classify_attractor(traj, nearest, cfg.attractor_config())


def _report(cls, out):
    print(f"attractor: {cls.kind}", file=out)
    print(f"tail_amplitude: {cls.tail_amplitude:.6g}", file=out)
    if cls.bursts is not None:
        print(f"spikes: {len(cls.spikes)}", file=out)
        print(f"bursts: {len(cls.bursts)}", file=out)
        print(f"spikes_per_burst_mean: {cls.bursts.spikes_per_burst_mean:.6g}", file=out)


def cmd_simulate(cfg: RunConfig, outdir: str, out) -> List[str]:
    traj, cls = _simulate(cfg)
    path = os.path.join(outdir, "trajectory.csv")
    write_trajectory(traj, path)
    _report(cls, out)
    return [path]


def cmd_bursting(cfg: RunConfig, outdir: str, out) -> List[str]:
    traj, cls = _simulate(cfg)
    traj_path = os.path.join(outdir, "trajectory.csv")
    burst_path = os.path.join(outdir, "bursts.csv")
    write_trajectory(traj, traj_path)
    summary = cls.bursts or BurstSummary(bursts=(), interburst_gaps=(), spikes_per_burst_mean=0.0)
    write_bursts(summary, burst_path)
    _report(cls, out)
    return [traj_path, burst_path]


def cmd_equilibria(cfg: RunConfig, outdir: str, out) -> List[str]:
    path = os.path.join(outdir, "equilibria.csv")
    if cfg.is_3d:
        e = equilibrium_3d(cfg.params_3d())
        rows = [[format_float(e.x), format_float(e.y), format_float(e.z), format_float(e.r)]]
        _write_rows(path, EQUILIBRIA_3D_HEADER, rows)
    else:
        eqs = equilibria_2d(cfg.base_params())
        rows = [
            [str(e.branch), format_float(e.x), format_float(e.y), format_float(e.r), str(int(e.degenerate))]
            for e in eqs
        ]
        _write_rows(path, EQUILIBRIA_2D_HEADER, rows)
    print(f"equilibria: {len(rows)}", file=out)
    return [path]


def cmd_stability(cfg: RunConfig, outdir: str, out) -> List[str]:
    """One row per equilibrium; 3D rows use branch 0."""
    q = cfg.solver.q
    rows = []
    if cfg.is_3d:
        params = cfg.params_3d()
        e = equilibrium_3d(params)
        v = classify_3d(e, params, q)
        rows.append(["0", format_float(e.x), v.status.value, v.case_label, _opt(v.q_star), format_float(q)])
    else:
        params = cfg.base_params()
        for e in equilibria_2d(params):
            if e.degenerate:
                # zero determinant gives a zero eigenvalue: marginal for every q
                rows.append([str(e.branch), format_float(e.x), Status.MARGINAL.value, "fold", "", format_float(q)])
                continue
            v = classify_2d(e, params, q)
            rows.append(
                [str(e.branch), format_float(e.x), v.status.value, v.case_label, _opt(v.q_star), format_float(q)]
            )
    path = os.path.join(outdir, "stability.csv")
    _write_rows(path, STABILITY_HEADER, rows)
    for row in rows:
        print(f"branch {row[0]}: {row[2]} ({row[3]})", file=out)
    return [path]


def cmd_hopf_curve(cfg: RunConfig, outdir: str, out) -> List[str]:
    a = cfg.analysis
    if cfg.is_3d:
        curve = hopf_curve_3d(cfg.params_3d(), a.I_lo, a.I_hi, a.n_points)
    else:
        curve = hopf_curve_2d(cfg.base_params(), a.r_lo, a.r_hi, a.n_points)
    path = os.path.join(outdir, "hopf_curve.csv")
    write_hopf_curve(curve, path)
    print(f"points: {len(curve)}", file=out)
    return [path]


def cmd_region(cfg: RunConfig, outdir: str, out) -> List[str]:
    a = cfg.analysis
    grid = stability_region_3d(
        cfg.params_3d(),
        I_lo=0.0 if a.I_lo is None else a.I_lo,
        I_hi=30.0 if a.I_hi is None else a.I_hi,
        q_lo=a.q_lo,
        q_hi=a.q_hi,
        nI=a.nI,
        nq=a.nq,
    )
    path = os.path.join(outdir, "region.csv")
    write_region(grid, path)
    print(f"grid: {grid.shape[0]} x {grid.shape[1]}", file=out)
    return [path]


def cmd_regimes(cfg: RunConfig, outdir: str, out) -> List[str]:
    a = cfg.analysis
    table = regime_boundaries_3d(
        cfg.params_3d(), a.I_lo, a.I_hi, scan_points=a.scan_points, tol=a.boundary_tol
    )
    path = os.path.join(outdir, "regimes.csv")
    write_regimes(table, path)
    for b, below, above in table.rows():
        print(f"I = {b:.6f}: {below} -> {above}", file=out)
    return [path]


COMMANDS = {
    "simulate": cmd_simulate,
    "equilibria": cmd_equilibria,
    "stability": cmd_stability,
    "hopf-curve": cmd_hopf_curve,
    "region": cmd_region,
    "regimes": cmd_regimes,
    "bursting": cmd_bursting,
}


def write_manifest(cfg: RunConfig, command: str, outdir: str) -> str:
    path = os.path.join(outdir, MANIFEST)
    text = render_config(cfg, header=(f"fraqdyn {__version__}", f"command: {command}"))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def dispatch(command: str, cfg: RunConfig, out=None) -> List[str]:
    """Run ``command`` and return the paths written (manifest last)."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {sorted(COMMANDS)}")
    out = sys.stdout if out is None else out
    outdir = cfg.output.directory
    os.makedirs(outdir, exist_ok=True)
    paths = COMMANDS[command](cfg, outdir, out)
    paths.append(write_manifest(cfg, command, outdir))
    return paths


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fraqdyn",
        description="Fractional-order Hindmarsh-Rose analysis and simulation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", metavar="FILE", help="flat section.key = value config file")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="override one config value (repeatable)",
    )
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = parse_config(args.config, args.overrides)
        dispatch(args.command, cfg)
    except ConfigError as exc:
        print(f"fraqdyn: config error: {exc}", file=sys.stderr)
        return 2
    except (FraqdynError, ArithmeticError, OSError) as exc:
        print(f"fraqdyn: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
