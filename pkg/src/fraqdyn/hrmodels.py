"""Two- and three-dimensional fractional Hindmarsh-Rose systems.

Fast subsystem::

    D^q x = y - a x^3 + b x^2 + I
    D^q y = c - d x^2 - y

Slow-fast extension adds an adaptation current::

    D^q x = y - a x^3 + b x^2 + I - z
    D^q z = eps (s (x - x0) - z)

where ``x0`` is the leftmost resting equilibrium of the fast subsystem at
zero stimulus.  Equilibria are parameterised by ``r = (I + c)/a`` through the
cubic ``h(x) = x^3 - p x^2`` with ``p = (b - d)/a``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import DomainError
from .fracsolve import VectorField
from .polynomial import cubic_real_roots

__all__ = [
    "HR2DParams",
    "HR3DParams",
    "DerivedQuantities",
    "AssumptionWarning",
    "derive",
    "h",
    "h_prime",
    "trace_poly",
    "det_poly",
    "big_h",
    "hr2d_field",
    "hr3d_field",
    "hr2d_vector_field",
    "hr3d_vector_field",
    "resting_x0",
    "reference_2d",
    "reference_3d",
]


class AssumptionWarning(UserWarning):
    """The slow-fast parameters violate ``(b - d)^2 < 3 a s``."""


def _finite(name, value):
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class HR2DParams:
    a: float
    b: float
    c: float
    d: float
    I: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            value = getattr(self, name)
            _finite(name, value)
            if value <= 0.0:
                raise DomainError(f"{name} must be positive, got {value!r}")
        _finite("I", self.I)

    @property
    def p(self) -> float:
        return (self.b - self.d) / self.a

    @property
    def r(self) -> float:
        return (self.I + self.c) / self.a

    def with_stimulus(self, I: float) -> "HR2DParams":
        return replace(self, I=I)

    def stimulus_for(self, r: float) -> float:
        """Stimulus ``I`` that realises the branch parameter ``r``."""
        return self.a * r - self.c


@dataclass(frozen=True)
class HR3DParams:
    """Slow-fast parameters; ``x0`` is derived from ``base`` and cached.

    Violating ``(b - d)^2 < 3 a s`` only emits :class:`AssumptionWarning`;
    operations that need a unique equilibrium branch check
    :attr:`assumption_a` themselves.
    """

    base: HR2DParams
    eps: float
    s: float
    x0: float = field(init=False)

    def __post_init__(self):
        _finite("eps", self.eps)
        _finite("s", self.s)
        if not (0.0 < self.eps < 1.0):
            raise DomainError(f"eps must lie in (0, 1), got {self.eps!r}")
        if self.s <= 0.0:
            raise DomainError(f"s must be positive, got {self.s!r}")
        object.__setattr__(self, "x0", resting_x0(self.base))
        if not self.assumption_a:
            warnings.warn(
                f"(b-d)^2 = {(self.base.b - self.base.d) ** 2:g} >= 3as = "
                f"{3 * self.base.a * self.s:g}: equilibrium branch may not be unique",
                AssumptionWarning,
                stacklevel=3,
            )

    @property
    def assumption_a(self) -> bool:
        b = self.base
        return (b.b - b.d) ** 2 < 3.0 * b.a * self.s

    @property
    def r(self) -> float:
        return self.base.r

    def with_stimulus(self, I: float) -> "HR3DParams":
        return replace(self, base=self.base.with_stimulus(I))

    def stimulus_for(self, r: float) -> float:
        return self.base.stimulus_for(r)


@dataclass(frozen=True)
class DerivedQuantities:
    p: float
    r: float
    alpha1: float
    alpha2: float
    gamma1: Optional[float]
    gamma2: Optional[float]
    h_alpha1: float
    h_alpha2: float


def h(x, p):
    """``h(x) = x^3 - p x^2``."""
    return x * x * (x - p)


def h_prime(x, p):
    return x * (3.0 * x - 2.0 * p)


def trace_poly(x, params: HR2DParams):
    """Jacobian trace ``-3 a x^2 + 2 b x - 1`` at abscissa ``x``."""
    return -3.0 * params.a * x * x + 2.0 * params.b * x - 1.0


def det_poly(x, params: HR2DParams):
    """Jacobian determinant ``a x (3x - 2p)`` at abscissa ``x``."""
    return params.a * x * (3.0 * x - 2.0 * params.p)


def derive(params: HR2DParams) -> DerivedQuantities:
    p = params.p
    alpha1 = min(0.0, 2.0 * p / 3.0)
    alpha2 = max(0.0, 2.0 * p / 3.0)
    a, b = params.a, params.b
    if b * b >= 3.0 * a:
        root = math.sqrt(b * b - 3.0 * a)
        gamma1: Optional[float] = (b - root) / (3.0 * a)
        gamma2: Optional[float] = (b + root) / (3.0 * a)
    else:
        gamma1 = gamma2 = None
    return DerivedQuantities(
        p=p,
        r=params.r,
        alpha1=alpha1,
        alpha2=alpha2,
        gamma1=gamma1,
        gamma2=gamma2,
        h_alpha1=h(alpha1, p),
        h_alpha2=h(alpha2, p),
    )


def resting_x0(base: HR2DParams) -> float:
    """Leftmost equilibrium abscissa of the fast subsystem at ``I = 0``.

    This is the unique ``x < alpha1`` with ``h(x) = c/a``; it exists only
    when ``c/a < h(alpha1)``.
    """
    dq = derive(base)
    r0 = base.c / base.a
    if not r0 < dq.h_alpha1:
        raise DomainError(
            f"resting state not on leftmost branch: r0 = c/a = {r0:g} must be "
            f"< h(alpha1) = {dq.h_alpha1:g}"
        )
    roots = cubic_real_roots(1.0, -dq.p, 0.0, -r0)
    left = [x for x in roots.roots if x < dq.alpha1]
    if not left:
        raise DomainError(f"no root of h(x) = {r0:g} below alpha1 = {dq.alpha1:g}")
    return min(left)


def big_h(x, params: HR3DParams):
    """``H(x) = h(x) + (s/a)(x - x0)``, strictly increasing under the assumption."""
    b = params.base
    return h(x, b.p) + params.s / b.a * (x - params.x0)


def hr2d_field(state, params: HR2DParams) -> np.ndarray:
    x, y = state[0], state[1]
    return np.array(
        [
            y - params.a * x**3 + params.b * x * x + params.I,
            params.c - params.d * x * x - y,
        ]
    )


def hr3d_field(state, params: HR3DParams) -> np.ndarray:
    x, y, z = state[0], state[1], state[2]
    b = params.base
    return np.array(
        [
            y - b.a * x**3 + b.b * x * x + b.I - z,
            b.c - b.d * x * x - y,
            params.eps * (params.s * (x - params.x0) - z),
        ]
    )


def hr2d_vector_field(params: HR2DParams) -> VectorField:
    a, b, c, d, I = params.a, params.b, params.c, params.d, params.I

    def f(t, u):
        x, y = u[0], u[1]
        x2 = x * x
        return np.array([y - a * x2 * x + b * x2 + I, c - d * x2 - y])

    return VectorField(f, 2, name="hr2d")


def hr3d_vector_field(params: HR3DParams) -> VectorField:
    base = params.base
    a, b, c, d, I = base.a, base.b, base.c, base.d, base.I
    eps, s, x0 = params.eps, params.s, params.x0

    def f(t, u):
        x, y, z = u[0], u[1], u[2]
        x2 = x * x
        return np.array(
            [y - a * x2 * x + b * x2 + I - z, c - d * x2 - y, eps * (s * (x - x0) - z)]
        )

    return VectorField(f, 3, name="hr3d")


def reference_2d(I: float = 0.0) -> HR2DParams:
    """The classical Hindmarsh-Rose constants ``a=1, b=3, c=1, d=5``."""
    return HR2DParams(a=1.0, b=3.0, c=1.0, d=5.0, I=I)


def reference_3d(I: float = 0.0) -> HR3DParams:
    """Reference constants with ``eps=0.005, s=4``."""
    return HR3DParams(base=reference_2d(I), eps=0.005, s=4.0)
