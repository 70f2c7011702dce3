"""CSV writers and readers for solver and sweep artifacts.

Every file has one header row, newline line endings and floats rendered
with 17 significant digits, so reading a file back reproduces the written
doubles exactly.

=============  ====================================
artifact       header
=============  ====================================
Trajectory     ``t,x,y`` or ``t,x,y,z``
HopfCurve      ``r,I,q_star``
RegionGrid     ``I,q,stable`` (stability code 0/1/2)
RegimeTable    ``I_boundary,label_below,label_above``
BurstSummary   ``burst_index,start,end,spike_count``
=============  ====================================
"""

from __future__ import annotations

import csv
import math
from typing import List, Sequence, Tuple

import numpy as np

from .bifurcation import HopfCurve, RegimeTable, RegionGrid
from .dynamics import Burst, BurstSummary
from .errors import FraqdynError
from .fracsolve import Trajectory

__all__ = [
    "CSVFormatError",
    "TRAJECTORY_COLUMNS",
    "HOPF_HEADER",
    "REGION_HEADER",
    "REGIME_HEADER",
    "BURST_HEADER",
    "format_float",
    "emit_csv",
    "read_csv",
    "write_trajectory",
    "read_trajectory",
    "write_hopf_curve",
    "read_hopf_curve",
    "write_region",
    "read_region",
    "write_regimes",
    "read_regimes",
    "write_bursts",
    "read_bursts",
]

TRAJECTORY_COLUMNS = ("x", "y", "z")
HOPF_HEADER = ("r", "I", "q_star")
REGION_HEADER = ("I", "q", "stable")
REGIME_HEADER = ("I_boundary", "label_below", "label_above")
BURST_HEADER = ("burst_index", "start", "end", "spike_count")


class CSVFormatError(FraqdynError, ValueError):
    """A file does not match the expected schema."""


def format_float(value) -> str:
    return format(float(value), ".17g")


def _write(path, header: Sequence[str], rows):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def _read(path, expected=None) -> Tuple[List[str], List[List[str]]]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise OSError(exc.errno, f"cannot read {path}: {exc.strerror}") from exc
    if not rows:
        raise CSVFormatError(f"{path}: empty file (no header)")
    header, body = rows[0], rows[1:]
    if expected is not None and tuple(header) != tuple(expected):
        raise CSVFormatError(f"{path}: header {header} does not match {list(expected)}")
    for i, row in enumerate(body, 2):
        if len(row) != len(header):
            raise CSVFormatError(f"{path}:{i}: expected {len(header)} fields, got {len(row)}")
    return header, body


def _floats(rows, path) -> np.ndarray:
    try:
        return np.array([[float(v) for v in row] for row in rows], dtype=float)
    except ValueError as exc:
        raise CSVFormatError(f"{path}: {exc}") from None


def write_trajectory(traj: Trajectory, path) -> None:
    dim = traj.states.shape[1] if traj.states.ndim == 2 else 0
    if not 1 <= dim <= len(TRAJECTORY_COLUMNS):
        raise FraqdynError(f"trajectory dimension must be 1..3 for CSV output, got {dim}")
    header = ("t",) + TRAJECTORY_COLUMNS[:dim]
    rows = (
        [format_float(t)] + [format_float(v) for v in state]
        for t, state in zip(traj.times, traj.states)
    )
    _write(path, header, rows)


def read_trajectory(path) -> Trajectory:
    header, body = _read(path)
    dim = len(header) - 1
    if header[0] != "t" or tuple(header[1:]) != TRAJECTORY_COLUMNS[:dim] or dim < 1:
        raise CSVFormatError(f"{path}: not a trajectory header: {header}")
    data = _floats(body, path).reshape(len(body), dim + 1)
    return Trajectory(data[:, 0].copy(), data[:, 1:].copy())


def write_hopf_curve(curve: HopfCurve, path) -> None:
    rows = (
        [format_float(r), format_float(i), format_float(q)]
        for r, i, q in zip(curve.r, curve.I, curve.q_star)
    )
    _write(path, HOPF_HEADER, rows)


def read_hopf_curve(path) -> HopfCurve:
    """Read a curve; ``window`` is the sampled ``r`` span and ``params`` is ``None``."""
    _, body = _read(path, HOPF_HEADER)
    data = _floats(body, path).reshape(len(body), 3)
    window = (float(data[0, 0]), float(data[-1, 0])) if len(data) else (math.nan, math.nan)
    return HopfCurve(
        r=data[:, 0].copy(), I=data[:, 1].copy(), q_star=data[:, 2].copy(), window=window, params=None
    )


def write_region(grid: RegionGrid, path) -> None:
    rows = (
        [format_float(I), format_float(q), str(int(grid.codes[i, j]))]
        for i, I in enumerate(grid.I_values)
        for j, q in enumerate(grid.q_values)
    )
    _write(path, REGION_HEADER, rows)


def read_region(path) -> RegionGrid:
    """Rebuild a grid written row-major by :func:`write_region`."""
    _, body = _read(path, REGION_HEADER)
    data = _floats(body, path).reshape(len(body), 3)
    if len(data) == 0:
        return RegionGrid(np.empty(0), np.empty(0), np.empty((0, 0), dtype=np.int8))
    I_col, q_col = data[:, 0], data[:, 1]
    nq = int(np.argmax(I_col != I_col[0])) or len(I_col)
    if len(data) % nq:
        raise CSVFormatError(f"{path}: {len(data)} rows do not form a grid with {nq} q values")
    nI = len(data) // nq
    codes = data[:, 2].reshape(nI, nq)
    if not np.all(np.isin(codes, (0, 1, 2))):
        raise CSVFormatError(f"{path}: stable column must hold 0, 1 or 2")
    return RegionGrid(
        I_values=I_col[::nq].copy(), q_values=q_col[:nq].copy(), codes=codes.astype(np.int8)
    )


def write_regimes(table: RegimeTable, path) -> None:
    rows = ([format_float(b), below, above] for b, below, above in table.rows())
    _write(path, REGIME_HEADER, rows)


def read_regimes(path) -> RegimeTable:
    _, body = _read(path, REGIME_HEADER)
    if not body:
        raise CSVFormatError(f"{path}: a regime table without boundaries carries no labels")
    boundaries = []
    labels = [body[0][1]]
    for row in body:
        try:
            boundaries.append(float(row[0]))
        except ValueError as exc:
            raise CSVFormatError(f"{path}: {exc}") from None
        if row[1] != labels[-1]:
            raise CSVFormatError(f"{path}: label_below {row[1]!r} disagrees with previous row")
        labels.append(row[2])
    return RegimeTable(boundaries=tuple(boundaries), labels=tuple(labels))


def write_bursts(summary: BurstSummary, path) -> None:
    rows = (
        [str(k), format_float(b.start), format_float(b.end), str(b.spike_count)]
        for k, b in enumerate(summary.bursts)
    )
    _write(path, BURST_HEADER, rows)


def read_bursts(path) -> BurstSummary:
    _, body = _read(path, BURST_HEADER)
    try:
        bursts = tuple(Burst(float(s), float(e), int(n)) for _, s, e, n in body)
    except ValueError as exc:
        raise CSVFormatError(f"{path}: {exc}") from None
    gaps = tuple(b.start - a.end for a, b in zip(bursts[:-1], bursts[1:]))
    mean = float(np.mean([b.spike_count for b in bursts])) if bursts else 0.0
    return BurstSummary(bursts=bursts, interburst_gaps=gaps, spikes_per_burst_mean=mean)


_WRITERS = (
    (Trajectory, write_trajectory),
    (HopfCurve, write_hopf_curve),
    (RegionGrid, write_region),
    (RegimeTable, write_regimes),
    (BurstSummary, write_bursts),
)


def emit_csv(artifact, path) -> None:
    """Write any supported artifact with its schema."""
    for cls, writer in _WRITERS:
        if isinstance(artifact, cls):
            writer(artifact, path)
            return
    raise TypeError(f"no CSV schema for {type(artifact).__name__}")


def read_csv(path):
    """Read a file written by :func:`emit_csv`, choosing the reader from its header."""
    with open(path, encoding="utf-8", newline="") as fh:
        header = tuple(next(csv.reader(fh), ()))
    readers = {
        HOPF_HEADER: read_hopf_curve,
        REGION_HEADER: read_region,
        REGIME_HEADER: read_regimes,
        BURST_HEADER: read_bursts,
    }
    if header in readers:
        return readers[header](path)
    if header[:1] == ("t",):
        return read_trajectory(path)
    raise CSVFormatError(f"{path}: unrecognised header {list(header)}")
