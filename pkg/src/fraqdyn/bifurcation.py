"""Parameter sweeps: critical-order curves, stability grids and regime tables."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .equilibria import equilibrium_3d
from .errors import DomainError
from .hrmodels import HR2DParams, HR3DParams, derive
from .stability import (
    Status,
    _aggregate,
    _eigen_status,
    _pair_from_root,
    _pair_status,
    char_poly_3d,
    critical_q_2d,
    critical_q_3d,
    hopf_window_2d,
    sector_argument_3d,
    smallest_real_root,
    stability_band_3d,
)

__all__ = [
    "HopfCurve",
    "RegionGrid",
    "RegimeTable",
    "STABLE_ALL_Q",
    "HOPF_AT_QSTAR",
    "UNSTABLE_ALL_Q",
    "hopf_curve_2d",
    "hopf_curve_3d",
    "stability_region_3d",
    "regime_boundaries_3d",
]

STABLE_ALL_Q = "stable_all_q"
HOPF_AT_QSTAR = "hopf_at_qstar"
UNSTABLE_ALL_Q = "unstable_all_q"


@dataclass(frozen=True, eq=False)
class HopfCurve:
    """Critical orders along an ``r`` grid; ``I = a r - c`` for each point."""

    r: np.ndarray
    I: np.ndarray
    q_star: np.ndarray
    window: Tuple[float, float]
    params: object

    @property
    def points(self):
        return list(zip(self.r.tolist(), self.I.tolist(), self.q_star.tolist()))

    def __len__(self):
        return len(self.r)


@dataclass(frozen=True, eq=False)
class RegionGrid:
    """Stability codes on an ``(I, q)`` grid.

    ``codes[i, j]`` is the :attr:`Status.code` at ``I_values[i]``, ``q_values[j]``.
    """

    I_values: np.ndarray
    q_values: np.ndarray
    codes: np.ndarray

    def status(self, i: int, j: int) -> Status:
        return Status.from_code(self.codes[i, j])

    @property
    def shape(self):
        return self.codes.shape


@dataclass(frozen=True)
class RegimeTable:
    """Boundaries in ``I`` and the regime label of each interval between them.

    ``labels[0]`` applies below ``boundaries[0]`` and ``labels[k]`` above
    ``boundaries[k-1]``.
    """

    boundaries: Tuple[float, ...]
    labels: Tuple[str, ...]

    def rows(self):
        return [
            (b, self.labels[i], self.labels[i + 1]) for i, b in enumerate(self.boundaries)
        ]

    def label_at(self, I: float) -> str:
        idx = int(np.searchsorted(np.asarray(self.boundaries), I, side="right"))
        return self.labels[idx]


def _grid(lo, hi, n):
    if n < 1:
        raise DomainError(f"number of grid points must be >= 1, got {n}")
    if n == 1:
        return np.array([lo], dtype=float)
    return np.linspace(lo, hi, n)


def hopf_curve_2d(
    params: HR2DParams,
    r_lo: Optional[float] = None,
    r_hi: Optional[float] = None,
    n_points: int = 1000,
) -> HopfCurve:
    """Sample ``q*(r)`` of the fast subsystem over its window (the stimulus of ``params`` is ignored)."""
    window = hopf_window_2d(params)
    if window is None:
        raise DomainError("no critical-order window: needs b^2 > 3a and gamma2 > alpha2")
    w_lo, w_hi = window
    lo = w_lo if r_lo is None else max(r_lo, w_lo)
    hi = w_hi if r_hi is None else min(r_hi, w_hi)
    if lo > hi:
        raise DomainError(
            f"requested r range [{r_lo}, {r_hi}] misses the window [{w_lo:.6g}, {w_hi:.6g}]"
        )
    dq = derive(params)
    if lo <= dq.h_alpha2:
        # lower end sits on the fold (open end of the window)
        lo = np.nextafter(dq.h_alpha2, np.inf)
    rs = _grid(lo, hi, n_points)
    qs = np.array([critical_q_2d(r, params) for r in rs], dtype=float)
    return HopfCurve(r=rs, I=params.a * rs - params.c, q_star=qs, window=window, params=params)


def hopf_curve_3d(
    params: HR3DParams,
    I_lo: Optional[float] = None,
    I_hi: Optional[float] = None,
    n_points: int = 1000,
) -> HopfCurve:
    """Sample clamped ``q*`` of the slow-fast equilibrium inside the open band."""
    band = stability_band_3d(params)
    base = params.base
    I_band = (base.stimulus_for(band[0]), base.stimulus_for(band[1]))
    lo = I_band[0] if I_lo is None else max(I_lo, I_band[0])
    hi = I_band[1] if I_hi is None else min(I_hi, I_band[1])
    if lo >= hi:
        raise DomainError(
            f"requested I range [{I_lo}, {I_hi}] misses the band ({I_band[0]:.6g}, {I_band[1]:.6g})"
        )
    Is = _grid(lo, hi, n_points + 2)[1:-1] if n_points > 1 else np.array([0.5 * (lo + hi)])
    rs = (Is + base.c) / base.a
    qs = np.array([critical_q_3d(r, params) for r in rs], dtype=float)
    return HopfCurve(r=rs, I=base.a * rs - base.c, q_star=qs, window=band, params=params)


def _column_status(params: HR3DParams, I: float, q_values) -> np.ndarray:
    p = params.with_stimulus(I)
    eq = equilibrium_3d(p)
    poly = char_poly_3d(eq.x, p)
    lam1 = smallest_real_root(poly)
    pair_sum, pair_prod = _pair_from_root(poly, lam1)
    return np.array(
        [
            _aggregate((_eigen_status(complex(lam1), q), _pair_status(pair_sum, pair_prod, q))).code
            for q in q_values
        ],
        dtype=np.int8,
    )


def stability_region_3d(
    params: HR3DParams,
    I_lo: float = 0.0,
    I_hi: float = 30.0,
    q_lo: float = 0.01,
    q_hi: float = 1.0,
    nI: int = 500,
    nq: int = 500,
) -> RegionGrid:
    """Classify the slow-fast equilibrium on a uniform ``(I, q)`` grid."""
    if not params.assumption_a:
        raise DomainError("(b-d)^2 < 3as does not hold; refusing slow-fast classification")
    if not (0.0 < q_lo <= q_hi <= 1.0):
        raise DomainError(f"q range must satisfy 0 < q_lo <= q_hi <= 1, got [{q_lo}, {q_hi}]")
    if I_lo > I_hi:
        raise DomainError(f"I_lo = {I_lo} exceeds I_hi = {I_hi}")
    I_values = _grid(I_lo, I_hi, nI)
    q_values = _grid(q_lo, q_hi, nq)
    codes = np.vstack([_column_status(params, I, q_values) for I in I_values])
    return RegionGrid(I_values=I_values, q_values=q_values, codes=codes)


def _label_from_argument(A: float) -> str:
    if A <= 0.0:
        return STABLE_ALL_Q
    if A >= 1.0:
        return UNSTABLE_ALL_Q
    return HOPF_AT_QSTAR


def _bisect_level(func, level, lo, hi, tol):
    f_lo = func(lo) - level
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = func(mid) - level
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def regime_boundaries_3d(
    params: HR3DParams,
    I_lo: Optional[float] = None,
    I_hi: Optional[float] = None,
    scan_points: int = 2000,
    tol: float = 1e-8,
) -> RegimeTable:
    """Locate where the slow-fast equilibrium changes regime as ``I`` varies.

    Boundaries are the two edges of the order-dependent band plus every
    crossing of the arccos argument ``A`` through 0 (``q* = 1``) or 1
    (``q* = 0``).  Crossings are bracketed on a ``scan_points`` grid and
    bisected to ``tol`` in ``I``.
    """
    if not params.assumption_a:
        raise DomainError("(b-d)^2 < 3as does not hold; refusing slow-fast classification")
    base = params.base
    r_lo, r_hi = stability_band_3d(params)
    I_a, I_b = base.stimulus_for(r_lo), base.stimulus_for(r_hi)
    win_lo = I_a if I_lo is None else I_lo
    win_hi = I_b if I_hi is None else I_hi
    if win_lo > win_hi:
        raise DomainError(f"I_lo = {win_lo} exceeds I_hi = {win_hi}")

    def arg(I):
        return sector_argument_3d((I + base.c) / base.a, params)

    def label_at(I):
        r = (I + base.c) / base.a
        if not r_lo < r < r_hi:
            return STABLE_ALL_Q
        return _label_from_argument(arg(I))

    boundaries = []
    if win_lo <= I_a <= win_hi:
        boundaries.append(float(I_a))
    s_lo, s_hi = max(win_lo, I_a), min(win_hi, I_b)
    if s_lo < s_hi:
        grid = np.linspace(s_lo, s_hi, scan_points)
        values = np.array([arg(I) for I in grid])
        for k in range(len(grid) - 1):
            for level in (0.0, 1.0):
                if (values[k] > level) != (values[k + 1] > level):
                    boundaries.append(float(_bisect_level(arg, level, grid[k], grid[k + 1], tol)))
    if win_lo <= I_b <= win_hi:
        boundaries.append(float(I_b))
    boundaries = sorted(set(boundaries))

    edges = [win_lo] + boundaries + [win_hi]
    labels = []
    for i in range(len(edges) - 1):
        left, right = edges[i], edges[i + 1]
        if left < right:
            probe = 0.5 * (left + right)
        elif i == 0:
            probe = right - 1.0
        else:
            probe = left + 1.0
        labels.append(label_at(probe))
    return RegimeTable(boundaries=tuple(boundaries), labels=tuple(labels))
