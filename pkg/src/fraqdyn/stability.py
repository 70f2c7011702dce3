"""Fractional stability tests and critical orders.

A linear Caputo system ``D^q x = A x`` is asymptotically stable iff every
eigenvalue lies strictly outside the sector ``|arg(lambda)| <= q pi/2``.
Eigenvalues within 1e-12 (relative) of the sector boundary are reported as
marginal, never stable.

For the fast subsystem the test reduces to the Jacobian trace and
determinant.  For the slow-fast system the characteristic cubic always has a
real root below ``-eps``; the remaining pair is tested through its sum and
product.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .equilibria import (
    Equilibrium2D,
    Equilibrium3D,
    branch_inverse_2d,
    inverse_big_h,
)
from .errors import DomainError, FraqdynError
from .fracsolve import _check_order
from .hrmodels import (
    HR2DParams,
    HR3DParams,
    big_h,
    derive,
    det_poly,
    h,
    trace_poly,
)

__all__ = [
    "Status",
    "StabilityVerdict",
    "SectorTest",
    "CharPoly3",
    "MARGIN_TOL",
    "matignon_check",
    "stable_2x2",
    "trace_det_2d",
    "classify_2d",
    "critical_q_2d",
    "hopf_window_2d",
    "char_poly_3d",
    "smallest_real_root",
    "classify_char_poly",
    "classify_3d",
    "stability_band_3d",
    "sector_argument_3d",
    "critical_q_3d",
]

MARGIN_TOL = 1e-12


class Status(str, enum.Enum):
    STABLE = "asymptotically_stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"

    @property
    def code(self) -> int:
        """CSV code: 1 stable, 0 unstable, 2 marginal."""
        return _CODES[self]

    @classmethod
    def from_code(cls, code: int) -> "Status":
        try:
            return _FROM_CODES[int(code)]
        except KeyError:
            raise ValueError(f"unknown stability code {code!r}; expected 0, 1 or 2") from None


_CODES = {Status.STABLE: 1, Status.UNSTABLE: 0, Status.MARGINAL: 2}
_FROM_CODES = {v: k for k, v in _CODES.items()}


def _aggregate(statuses) -> Status:
    statuses = list(statuses)
    if any(s is Status.UNSTABLE for s in statuses):
        return Status.UNSTABLE
    if any(s is Status.MARGINAL for s in statuses):
        return Status.MARGINAL
    return Status.STABLE


@dataclass(frozen=True)
class StabilityVerdict:
    status: Status
    case_label: str
    eigenvalues: Tuple[complex, ...]
    q_star: Optional[float]
    q_used: float

    @property
    def stable(self) -> bool:
        return self.status is Status.STABLE


@dataclass(frozen=True)
class SectorTest:
    passes: Tuple[bool, ...]
    statuses: Tuple[Status, ...]
    status: Status


def _eigen_status(lam: complex, q: float) -> Status:
    re, im = lam.real, abs(lam.imag)
    mod = math.hypot(re, im)
    if mod == 0.0:
        return Status.MARGINAL
    if re < 0.0 and q < 1.0:
        return Status.STABLE
    half = 0.5 * q * math.pi
    # |lambda| sin(|arg| - q pi/2), written without computing arg
    margin = (im * math.cos(half) - re * math.sin(half)) / mod
    if margin > MARGIN_TOL:
        return Status.STABLE
    if margin >= -MARGIN_TOL:
        return Status.MARGINAL
    return Status.UNSTABLE


def matignon_check(eigenvalues: Sequence[complex], q: float) -> SectorTest:
    """Sector test ``|arg(lambda)| > q pi/2`` for each eigenvalue."""
    _check_order(q)
    statuses = tuple(_eigen_status(complex(lam), q) for lam in eigenvalues)
    return SectorTest(
        passes=tuple(s is Status.STABLE for s in statuses),
        statuses=statuses,
        status=_aggregate(statuses),
    )


def _quadratic_eigs(trace: float, det: float) -> Tuple[complex, complex]:
    disc = 0.25 * trace * trace - det
    if disc >= 0.0:
        root = math.sqrt(disc)
        big = 0.5 * trace + math.copysign(root, trace) if trace != 0.0 else root
        other = det / big if big != 0.0 else 0.0
        return tuple(sorted((complex(big), complex(other)), key=lambda z: z.real))
    im = math.sqrt(-disc)
    return (complex(0.5 * trace, -im), complex(0.5 * trace, im))


def _pair_status(trace: float, det: float, q: float) -> Status:
    if det > 0.0:
        scale = 2.0 * math.sqrt(det)
        gap = scale * math.cos(0.5 * q * math.pi) - trace
        if gap > MARGIN_TOL * scale:
            return Status.STABLE
        if gap >= -MARGIN_TOL * scale:
            return Status.MARGINAL
        return Status.UNSTABLE
    if det == 0.0:
        return Status.UNSTABLE if trace > 0.0 else Status.MARGINAL
    return Status.UNSTABLE


def stable_2x2(tau: float, delta: float, q: float) -> StabilityVerdict:
    """Stability of a 2x2 system from its trace and determinant.

    Stable iff ``delta > 0`` and ``tau / sqrt(delta) < 2 cos(q pi/2)``.
    """
    _check_order(q)
    return StabilityVerdict(
        status=_pair_status(tau, delta, q),
        case_label="trace_det",
        eigenvalues=_quadratic_eigs(tau, delta),
        q_star=None,
        q_used=q,
    )


def trace_det_2d(x_star: float, params: HR2DParams) -> Tuple[float, float]:
    return trace_poly(x_star, params), det_poly(x_star, params)


def hopf_window_2d(params: HR2DParams) -> Optional[Tuple[float, float]]:
    """Range of ``r`` where ``E3`` has non-negative trace, or ``None``.

    The lower end is ``h(gamma1)``, or the fold value ``h(alpha2)`` when
    ``alpha2 > gamma1`` (then the lower end itself is excluded).
    """
    dq = derive(params)
    if dq.gamma1 is None or dq.gamma1 == dq.gamma2 or dq.gamma2 <= dq.alpha2:
        return None
    lo_x = max(dq.gamma1, dq.alpha2)
    return (h(lo_x, dq.p), h(dq.gamma2, dq.p))


def _clamped_q(arg: float) -> float:
    return 2.0 / math.pi * math.acos(min(1.0, max(0.0, arg)))


def critical_q_2d(r: float, params: HR2DParams) -> Optional[float]:
    """Critical order ``q*(r)`` of the third branch.

    Returns ``None`` when ``r`` is outside the window of
    :func:`hopf_window_2d`: there the trace is negative and ``E3(r)`` is
    stable for every order.
    """
    dq = derive(params)
    if not params.b * params.b > 3.0 * params.a:
        raise DomainError("critical order needs b^2 > 3a (otherwise E3 is always stable)")
    if not r > dq.h_alpha2:
        raise DomainError(f"r = {r!r} not on the third branch: need r > h(alpha2) = {dq.h_alpha2:g}")
    window = hopf_window_2d(params)
    if window is None:
        return None
    lo, hi = window
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    if not (lo - slack <= r <= hi + slack):
        return None
    x3 = branch_inverse_2d(3, r, dq)
    tau, delta = trace_det_2d(x3, params)
    return _clamped_q(tau / (2.0 * math.sqrt(delta)))


def _case_label_2d(eq: Equilibrium2D, params: HR2DParams) -> Tuple[str, bool]:
    """Return the governing case and whether it depends on the order."""
    if eq.branch == 1:
        return "branch1", False
    if eq.branch == 2:
        return "branch2_saddle", False
    dq = derive(params)
    if params.b * params.b <= 3.0 * params.a:
        return "branch3_negative_trace", False
    g1, g2, p = dq.gamma1, dq.gamma2, dq.p
    if p >= 1.5 * g2:
        return "branch3_beyond_trace_roots", False
    if eq.r > h(g2, p):
        return "branch3_above_window", False
    if p <= 1.5 * g1:
        if eq.r < h(g1, p):
            return "branch3_below_window", False
        return "branch3_order_dependent", True
    return "branch3_order_dependent_fold", True


def classify_2d(eq: Equilibrium2D, params: HR2DParams, q: float) -> StabilityVerdict:
    """Classify a fast-subsystem equilibrium at fractional order ``q``.

    ``case_label`` names the branch/case that governs the verdict; for the
    order-dependent cases ``q_star`` carries the critical order.
    """
    _check_order(q)
    if eq.degenerate:
        raise DomainError(f"equilibrium at x={eq.x:g} is a fold point; not hyperbolic")
    tau, delta = trace_det_2d(eq.x, params)
    if delta == 0.0:
        raise DomainError(f"zero Jacobian determinant at x={eq.x:g}; not hyperbolic")
    label, order_dependent = _case_label_2d(eq, params)
    q_star = _clamped_q(tau / (2.0 * math.sqrt(delta))) if order_dependent else None
    base = stable_2x2(tau, delta, q)
    return StabilityVerdict(
        status=base.status,
        case_label=label,
        eigenvalues=base.eigenvalues,
        q_star=q_star,
        q_used=q,
    )


@dataclass(frozen=True)
class CharPoly3:
    """Monic characteristic cubic of the slow-fast Jacobian.

    ``P(l) = l^3 + (eps - tau) l^2 + (delta - eps tau + eps s) l + eps (delta + s)``
    """

    tau: float
    delta: float
    eps: float
    s: float

    def __post_init__(self):
        expected = self.eps * (1.0 - self.eps) * self.s
        terms = (self.eps**3, abs(self.c2) * self.eps**2, abs(self.c1) * self.eps, abs(self.c0))
        got = self(-self.eps)
        if abs(got - expected) > 1e-9 * max(abs(expected), max(terms)):
            raise FraqdynError(
                f"characteristic polynomial identity P(-eps) = eps(1-eps)s failed: {got!r} vs {expected!r}"
            )

    @property
    def c2(self) -> float:
        return self.eps - self.tau

    @property
    def c1(self) -> float:
        return self.delta - self.eps * self.tau + self.eps * self.s

    @property
    def c0(self) -> float:
        return self.eps * (self.delta + self.s)

    @property
    def coefficients(self) -> Tuple[float, float, float, float]:
        return (1.0, self.c2, self.c1, self.c0)

    def __call__(self, lam):
        return ((lam + self.c2) * lam + self.c1) * lam + self.c0

    def derivative(self, lam):
        return (3.0 * lam + 2.0 * self.c2) * lam + self.c1


def char_poly_3d(x_star: float, params: HR3DParams) -> CharPoly3:
    tau, delta = trace_det_2d(x_star, params.base)
    return CharPoly3(tau=tau, delta=delta, eps=params.eps, s=params.s)


def smallest_real_root(poly: CharPoly3) -> float:
    """Smallest real root of ``poly``; it always lies below ``-eps``.

    The bracket is chosen on an interval where ``P`` is increasing, so
    bisection cannot land on a larger root.
    """
    hi = -poly.eps
    lo_floor = None
    # critical points of P
    disc = poly.c2 * poly.c2 - 3.0 * poly.c1
    if disc > 0.0:
        sq = math.sqrt(disc)
        m1 = (-poly.c2 - sq) / 3.0
        m2 = (-poly.c2 + sq) / 3.0
        if m1 < hi:
            pm1 = poly(m1)
            if pm1 > 0.0:
                hi = m1
            elif pm1 == 0.0:
                return m1
            else:
                lo_floor = min(m2, hi)
    if lo_floor is not None:
        lo = lo_floor
        if not poly(lo) < 0.0:
            raise FraqdynError(f"failed to bracket smallest root: P({lo!r}) = {poly(lo)!r}")
    else:
        width = 1.0
        lo = hi - width
        for _ in range(2000):
            if poly(lo) < 0.0:
                break
            width *= 2.0
            lo = hi - width
        else:
            raise FraqdynError(f"failed to bracket smallest root of {poly}")
    while hi - lo > 1e-13 * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if poly(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    for _ in range(3):
        dp = poly.derivative(root)
        if dp == 0.0:
            break
        cand = root - poly(root) / dp
        if not abs(poly(cand)) < abs(poly(root)):
            break
        root = cand
    return root


def _pair_from_root(poly: CharPoly3, lam1: float) -> Tuple[float, float]:
    pair_sum = poly.tau - poly.eps - lam1
    pair_prod = -poly.eps * (poly.delta + poly.s) / lam1
    return pair_sum, pair_prod


def classify_char_poly(poly: CharPoly3, q: float) -> Tuple[Status, Tuple[complex, ...], float]:
    """Return ``(status, eigenvalues, A)`` for a characteristic cubic.

    ``A`` is the pre-clamp argument of the critical-order arccos.
    """
    _check_order(q)
    lam1 = smallest_real_root(poly)
    pair_sum, pair_prod = _pair_from_root(poly, lam1)
    status = _aggregate((_eigen_status(complex(lam1), q), _pair_status(pair_sum, pair_prod, q)))
    eigs = (complex(lam1),) + _quadratic_eigs(pair_sum, pair_prod)
    arg = _sector_argument(poly, lam1)
    return status, eigs, arg


def _sector_argument(poly: CharPoly3, lam1: float) -> float:
    prod = poly.eps * (poly.delta + poly.s)
    if prod <= 0.0:
        # the pair has a real root >= 0: no order stabilises it
        return math.inf
    return (poly.tau - poly.eps - lam1) * math.sqrt(-lam1) / (2.0 * math.sqrt(prod))


def stability_band_3d(params: HR3DParams) -> Tuple[float, float]:
    """Open ``r`` interval ``(H(alpha1), H(2b/3a))`` where stability depends on ``q``."""
    base = params.base
    dq = derive(base)
    return big_h(dq.alpha1, params), big_h(2.0 * base.b / (3.0 * base.a), params)


def _require_assumption(params: HR3DParams):
    if not params.assumption_a:
        raise DomainError("(b-d)^2 < 3as does not hold; refusing slow-fast classification")


def classify_3d(eq: Equilibrium3D, params: HR3DParams, q: float) -> StabilityVerdict:
    _check_order(q)
    _require_assumption(params)
    poly = char_poly_3d(eq.x, params)
    status, eigs, arg = classify_char_poly(poly, q)
    lo, hi = stability_band_3d(params)
    if lo < eq.r < hi:
        label, q_star = "slow_fast_order_dependent", _clamped_q(arg)
    else:
        label, q_star = "slow_fast_always_stable", None
    return StabilityVerdict(
        status=status, case_label=label, eigenvalues=eigs, q_star=q_star, q_used=q
    )


def sector_argument_3d(r: float, params: HR3DParams) -> float:
    """Unclamped arccos argument ``A(r)``; ``A <= 0`` stable for all q, ``A >= 1`` unstable."""
    _require_assumption(params)
    x = inverse_big_h(r, params)
    poly = char_poly_3d(x, params)
    return _sector_argument(poly, smallest_real_root(poly))


def critical_q_3d(r: float, params: HR3DParams) -> float:
    lo, hi = stability_band_3d(params)
    if not lo < r < hi:
        raise DomainError(f"r = {r!r} outside the order-dependent band ({lo:g}, {hi:g})")
    return _clamped_q(sector_argument_3d(r, params))
