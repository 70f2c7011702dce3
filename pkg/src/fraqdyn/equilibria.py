"""Equilibrium branches of the Hindmarsh-Rose systems.

The fast subsystem has up to three branches ``E1, E2, E3`` given by the
restrictions of ``h`` to ``(-inf, alpha1)``, ``[alpha1, alpha2]`` and
``(alpha2, inf)``.  The slow-fast system has a single branch obtained by
inverting the monotone cubic ``H``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

from .errors import DomainError
from .hrmodels import (
    DerivedQuantities,
    HR2DParams,
    HR3DParams,
    big_h,
    derive,
    h,
)
from .polynomial import CubicRoots, cubic_real_roots

__all__ = [
    "Equilibrium2D",
    "Equilibrium3D",
    "CubicRoots",
    "cubic_real_roots",
    "branch_codomain",
    "branch_inverse_2d",
    "equilibria_2d",
    "equilibrium_3d",
    "inverse_big_h",
]

_BISECT_WIDTH = 1e-13


@dataclass(frozen=True)
class Equilibrium2D:
    """Fixed point ``(x, G(x))`` on branch 1, 2 or 3.

    ``degenerate`` marks a fold (tangency) point where ``h'(x) = 0``.
    """

    branch: int
    x: float
    y: float
    r: float
    degenerate: bool = False

    @property
    def state(self):
        return (self.x, self.y)


@dataclass(frozen=True)
class Equilibrium3D:
    x: float
    y: float
    z: float
    r: float

    @property
    def state(self):
        return (self.x, self.y, self.z)


def branch_codomain(branch: int, dq: DerivedQuantities):
    """Admissible ``r`` interval ``(lo, hi, lo_closed, hi_closed)`` for a branch."""
    inf = float("inf")
    if branch == 1:
        return (-inf, dq.h_alpha1, False, False)
    if branch == 2:
        return (dq.h_alpha2, dq.h_alpha1, True, True)
    if branch == 3:
        return (dq.h_alpha2, inf, False, False)
    raise DomainError(f"branch must be 1, 2 or 3, got {branch!r}")


def _in_codomain(r, dom) -> bool:
    lo, hi, lo_closed, hi_closed = dom
    above = r >= lo if lo_closed else r > lo
    below = r <= hi if hi_closed else r < hi
    return above and below


def _bisect(func, target, lo, hi, increasing=True):
    """Solve ``func(x) = target`` on a monotone bracket ``[lo, hi]``."""
    sign = 1.0 if increasing else -1.0
    while hi - lo > _BISECT_WIDTH * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sign * (func(mid) - target) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _polish_in_bracket(x, r, p, lo, hi):
    # Newton on h(x) = r; a step leaving [lo, hi] or not reducing the residual is rejected
    res = abs(h(x, p) - r)
    for _ in range(3):
        slope = x * (3.0 * x - 2.0 * p)
        if slope == 0.0 or res == 0.0:
            break
        cand = x - (h(x, p) - r) / slope
        cand_res = abs(h(cand, p) - r)
        if not (lo <= cand <= hi) or not cand_res < res:
            break
        x, res = cand, cand_res
    return x


def branch_inverse_2d(branch: int, r: float, dq: DerivedQuantities) -> float:
    """Unique ``x`` on the given branch with ``h(x) = r``."""
    dom = branch_codomain(branch, dq)
    if not _in_codomain(r, dom):
        lo, hi, lc, hc = dom
        raise DomainError(
            f"r = {r!r} outside branch {branch} codomain "
            f"{'[' if lc else '('}{lo:g}, {hi:g}{']' if hc else ')'}"
        )
    p = dq.p
    a1, a2 = dq.alpha1, dq.alpha2
    hx = lambda x: h(x, p)  # noqa: E731
    if branch == 1:
        width = 1.0
        lo = a1 - width
        while hx(lo) >= r:
            width *= 2.0
            lo = a1 - width
        return _polish_in_bracket(_bisect(hx, r, lo, a1), r, p, lo, a1)
    if branch == 3:
        width = 1.0
        hi = a2 + width
        while hx(hi) <= r:
            width *= 2.0
            hi = a2 + width
        return _polish_in_bracket(_bisect(hx, r, a2, hi), r, p, a2, hi)
    # middle branch: h decreasing on [alpha1, alpha2]
    if r == dq.h_alpha2:
        return a2
    if r == dq.h_alpha1:
        return a1
    return _polish_in_bracket(_bisect(hx, r, a1, a2, increasing=False), r, p, a1, a2)


def equilibria_2d(params: HR2DParams) -> List[Equilibrium2D]:
    """All equilibria of the fast subsystem, ordered by branch.

    Three for ``h(alpha2) < r < h(alpha1)``, one outside ``[h(alpha2),
    h(alpha1)]`` and two at the fold values (one flagged ``degenerate``).
    """
    dq = derive(params)
    r = params.r
    out = []
    for branch in (1, 2, 3):
        if not _in_codomain(r, branch_codomain(branch, dq)):
            continue
        x = branch_inverse_2d(branch, r, dq)
        degenerate = branch == 2 and (r == dq.h_alpha1 or r == dq.h_alpha2)
        out.append(
            Equilibrium2D(
                branch=branch,
                x=x,
                y=params.c - params.d * x * x,
                r=r,
                degenerate=degenerate,
            )
        )
    return out


def inverse_big_h(r: float, params: HR3DParams) -> float:
    """``H^{-1}(r)``; requires the monotonicity assumption."""
    if not params.assumption_a:
        raise DomainError(
            "(b-d)^2 < 3as does not hold: equilibrium branch is not guaranteed unique"
        )
    base = params.base
    k = params.s / base.a
    roots = cubic_real_roots(1.0, -base.p, k, -k * params.x0 - r)
    if len(roots) != 1:
        # H strictly increasing: several entries means rounding split one root
        x = _bisect(lambda v: big_h(v, params), r, min(roots.roots) - 1.0, max(roots.roots) + 1.0)
    else:
        x = roots.roots[0]
    return x


def equilibrium_3d(params: HR3DParams) -> Equilibrium3D:
    """The unique equilibrium of the slow-fast system at ``r = (I + c)/a``."""
    base = params.base
    r = base.r
    x = inverse_big_h(r, params)
    return Equilibrium3D(
        x=x,
        y=base.c - base.d * x * x,
        z=params.s * (x - params.x0),
        r=r,
    )
