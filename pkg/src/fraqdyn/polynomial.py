"""Real roots of cubic polynomials."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = ["CubicRoots", "cubic_real_roots", "eval_cubic"]


@dataclass(frozen=True)
class CubicRoots:
    """Distinct real roots in ascending order with their multiplicities.

    ``complex_pair`` is ``True`` when the remaining two roots are a
    non-real conjugate pair (in which case there is exactly one real root).
    """

    roots: tuple
    multiplicities: tuple
    complex_pair: bool

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)

    def __getitem__(self, i):
        return self.roots[i]


def eval_cubic(c3, c2, c1, c0, x):
    return ((c3 * x + c2) * x + c1) * x + c0


def _polish(c3, c2, c1, c0, x, iterations=5):
    best, best_res = x, abs(eval_cubic(c3, c2, c1, c0, x))
    for _ in range(iterations):
        if best_res == 0.0:
            break
        dp = (3.0 * c3 * best + 2.0 * c2) * best + c1
        if dp == 0.0:
            break
        cand = best - eval_cubic(c3, c2, c1, c0, best) / dp
        res = abs(eval_cubic(c3, c2, c1, c0, cand))
        if not res < best_res:
            break
        best, best_res = cand, res
    return best


def cubic_real_roots(c3: float, c2: float, c1: float, c0: float) -> CubicRoots:
    """Real roots of ``c3 x^3 + c2 x^2 + c1 x + c0``.

    Trigonometric form when all three roots are real, Cardano otherwise,
    followed by Newton polishing.  Repeated roots are returned once with
    their multiplicity.

    >>> cubic_real_roots(1, 2, 0, -1).roots  # doctest: +ELLIPSIS
    (-1.618..., -1.0, 0.618...)
    """
    if c3 == 0.0:
        raise DomainError("leading coefficient is zero: not a cubic")
    b, c, d = c2 / c3, c1 / c3, c0 / c3
    shift = -b / 3.0
    # depressed cubic t^3 + P t + Q with x = t + shift
    P = c - b * b / 3.0
    Q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    half_q = Q / 2.0
    third_p = P / 3.0
    disc = half_q * half_q + third_p**3
    scale = half_q * half_q + abs(third_p) ** 3
    tol = 1e-14 * scale

    if scale == 0.0:
        raw = [(shift, 3)]
    elif abs(disc) <= tol:
        if abs(P) <= 1e-12 * max(1.0, b * b):
            raw = [(shift, 3)]
        else:
            simple = 3.0 * Q / P + shift
            double = -1.5 * Q / P + shift
            raw = [(simple, 1), (double, 2)]
    elif disc < 0.0:
        m = 2.0 * math.sqrt(-third_p)
        arg = max(-1.0, min(1.0, 3.0 * Q / (P * m)))
        phi = math.acos(arg) / 3.0
        raw = [(m * math.cos(phi - 2.0 * math.pi * k / 3.0) + shift, 1) for k in range(3)]
    else:
        sq = math.sqrt(disc)
        # take the larger-magnitude cube root; get the other from u v = -P/3
        big = -math.copysign((abs(half_q) + sq) ** (1.0 / 3.0), half_q)
        other = -third_p / big if big != 0.0 else 0.0
        raw = [(big + other + shift, 1)]

    polished = []
    for root, mult in raw:
        if mult == 1:
            root = _polish(c3, c2, c1, c0, root)
        polished.append((root, mult))
    polished.sort(key=lambda rm: rm[0])
    return CubicRoots(
        roots=tuple(r for r, _ in polished),
        multiplicities=tuple(m for _, m in polished),
        complex_pair=(disc > tol and scale != 0.0),
    )
