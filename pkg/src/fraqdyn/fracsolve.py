"""Caputo initial value problems on a uniform grid.

The integrator is the fractional Adams-Bashforth-Moulton predictor-corrector
(product-rectangle predictor, product-trapezoid corrector).  Every step sums
weighted field evaluations over the whole history, so a run of ``N`` steps
costs ``O(N^2)``.  The history sums are BLAS products over fixed slices, so for
a given numpy/BLAS build and thread count a run is bit-reproducible.

An optional ``memory_window`` keeps only the most recent history terms
(fixed-memory principle).  This is an approximation; the initial value ``x0``
is always retained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, FraqdynError, SolverDivergence

__all__ = [
    "SolverConfig",
    "Trajectory",
    "VectorField",
    "abm_weights",
    "solve_caputo",
    "mittag_leffler",
    "BLOWUP_THRESHOLD",
]

#: any state component above this magnitude is reported as divergence
BLOWUP_THRESHOLD = 1e8


def _check_order(q: float) -> None:
    if not (0.0 < q <= 1.0) or not math.isfinite(q):
        raise DomainError(f"fractional order q must lie in (0, 1], got {q!r}")


@dataclass(frozen=True)
class SolverConfig:
    """Grid and scheme settings for :func:`solve_caputo`.

    Parameters
    ----------
    q : float
        Fractional order, ``0 < q <= 1``.
    step : float
        Uniform grid spacing ``h``.
    horizon : float
        Final time ``T``; the grid is ``t_j = j*h`` for ``j*h <= T``.
    corrector_iterations : int
        Number of corrector passes per step (1 gives PECE).
    memory_window : int, optional
        Number of most recent history terms kept in the convolution sums.
        ``None`` keeps the full history.
    """

    q: float
    step: float
    horizon: float
    corrector_iterations: int = 1
    memory_window: Optional[int] = None

    def __post_init__(self):
        _check_order(self.q)
        if not (self.step > 0.0) or not math.isfinite(self.step):
            raise DomainError(f"step must be positive and finite, got {self.step!r}")
        if not math.isfinite(self.horizon) or self.horizon < self.step:
            raise DomainError(
                f"horizon must be finite and >= step ({self.step}), got {self.horizon!r}"
            )
        if int(self.corrector_iterations) != self.corrector_iterations or self.corrector_iterations < 1:
            raise DomainError(
                f"corrector_iterations must be an integer >= 1, got {self.corrector_iterations!r}"
            )
        if self.memory_window is not None:
            if int(self.memory_window) != self.memory_window or self.memory_window < 1:
                raise DomainError(
                    f"memory_window must be an integer >= 1, got {self.memory_window!r}"
                )

    @property
    def n_steps(self) -> int:
        # tolerate T/h landing a hair below an integer
        return int(math.floor(self.horizon / self.step + 1e-9))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled solution.

    ``times`` has shape ``(N+1,)`` and ``states`` has shape ``(N+1, n)``.
    """

    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if states.ndim == 1:
            states = states.reshape(len(times), -1) if len(times) else states.reshape(0, 0)
        if len(times) != len(states):
            raise ValueError("times and states must have the same length")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    @property
    def dimension(self) -> int:
        return self.states.shape[1] if self.states.ndim == 2 else 0

    @property
    def step(self) -> float:
        if len(self.times) < 2:
            return 0.0
        return float(self.times[1] - self.times[0])

    def __len__(self) -> int:
        return len(self.times)

    def component(self, index: int) -> np.ndarray:
        return self.states[:, index]

    @property
    def x(self) -> np.ndarray:
        return self.states[:, 0]

    def tail(self, fraction: float) -> "Trajectory":
        """Return the trailing ``fraction`` of the samples (at least one)."""
        n = len(self.times)
        start = min(n - 1, int(math.floor((1.0 - fraction) * n)))
        return Trajectory(self.times[start:], self.states[start:])


@dataclass(frozen=True)
class VectorField:
    """Right-hand side ``f(t, x)`` of an ``n``-dimensional system."""

    func: Callable[[float, np.ndarray], Sequence[float]]
    dimension: int
    name: str = ""

    def __call__(self, t: float, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(t, x), dtype=float)


def _weight_tables(q: float, n_max: int):
    # bw[k] = (k+1)^q - k^q ;  aw[k] = (k+2)^(q+1) + k^(q+1) - 2 (k+1)^(q+1)
    k = np.arange(n_max + 3, dtype=float)
    kq = k**q
    kq1 = k ** (q + 1.0)
    bw = kq[1 : n_max + 2] - kq[: n_max + 1]
    aw = kq1[2 : n_max + 3] + kq1[: n_max + 1] - 2.0 * kq1[1 : n_max + 2]
    return bw, aw


def _corrector_first_weight(q: float, n: int) -> float:
    return n ** (q + 1.0) - (n - q) * (n + 1.0) ** q


def abm_weights(q: float, n: int):
    """Predictor and corrector weights for the step ``t_n -> t_{n+1}``.

    Returns
    -------
    predictor, corrector : ndarray
        ``predictor[j] = (n+1-j)^q - (n-j)^q`` and
        ``corrector[j] = a_{j,n+1}`` for ``j = 0..n``.  The implicit weight
        of the new point, ``a_{n+1,n+1} = 1``, is not included.
    """
    _check_order(q)
    if int(n) != n or n < 0:
        raise DomainError(f"step index n must be a non-negative integer, got {n!r}")
    n = int(n)
    bw, aw = _weight_tables(q, n)
    j = np.arange(n + 1)
    predictor = bw[n - j]
    corrector = np.empty(n + 1)
    corrector[0] = _corrector_first_weight(q, n)
    if n >= 1:
        corrector[1:] = aw[n - j[1:]]
    return predictor, corrector


def _reversed_weight_matrix(q: float, n_max: int) -> np.ndarray:
    # row 0: predictor weights, row 1: corrector weights, both reversed so that
    # the weight of history index j at step n sits at column (n_max - n + j)
    bw, aw = _weight_tables(q, n_max)
    return np.ascontiguousarray(np.stack([bw[::-1], aw[::-1]]))


def _as_field(field, dimension: int) -> VectorField:
    if isinstance(field, VectorField):
        return field
    dim = getattr(field, "dimension", dimension)
    return VectorField(field, int(dim))


def solve_caputo(field, x_init, cfg: SolverConfig) -> Trajectory:
    """Integrate ``D^q x = f(t, x)``, ``x(0) = x_init`` with the fractional ABM scheme.

    Parameters
    ----------
    field : VectorField or callable
        Right-hand side ``f(t, x)``.  A bare callable is assumed to have the
        dimension of ``x_init``.
    x_init : array_like
        Initial state.
    cfg : SolverConfig

    Raises
    ------
    SolverDivergence
        If a state becomes non-finite or exceeds :data:`BLOWUP_THRESHOLD`.
    """
    x0 = np.array(x_init, dtype=float).reshape(-1)
    f = _as_field(field, len(x0))
    if f.dimension != len(x0):
        raise DomainError(
            f"field dimension {f.dimension} does not match initial state length {len(x0)}"
        )
    if not np.all(np.isfinite(x0)):
        raise DomainError(f"initial state must be finite, got {x0.tolist()}")

    q, h = cfg.q, cfg.step
    n_steps = cfg.n_steps
    d = len(x0)
    window = cfg.memory_window

    n_max = max(n_steps - 1, 0)
    weights = _reversed_weight_matrix(q, n_max)
    c_pred = h**q / math.gamma(q + 1.0)
    c_corr = h**q / math.gamma(q + 2.0)

    times = np.arange(n_steps + 1, dtype=float) * h
    states = np.empty((n_steps + 1, d))
    hist = np.empty((d, n_steps + 1))
    states[0] = x0
    f_first = f(0.0, x0)
    hist[:, 0] = f_first

    for n in range(n_steps):
        start = 0 if window is None else max(0, n + 1 - window)
        lo = max(start, 1)
        off = n_max - n
        sums = weights[:, off + lo : off + n + 1] @ hist[:, lo : n + 1].T
        pred, corr = sums[0], sums[1]
        if start == 0:
            pred = pred + weights[0, off] * f_first
            corr = corr + _corrector_first_weight(q, n) * f_first
        t_next = times[n + 1]
        x_new = x0 + c_pred * pred
        for _ in range(cfg.corrector_iterations):
            x_new = x0 + c_corr * (f(t_next, x_new) + corr)
        if not np.all(np.isfinite(x_new)) or np.max(np.abs(x_new)) > BLOWUP_THRESHOLD:
            raise SolverDivergence(n + 1, float(t_next), x_new)
        states[n + 1] = x_new
        hist[:, n + 1] = f(t_next, x_new)

    return Trajectory(times, states)


#: estimated relative error above which the series result is rejected
_ML_MAX_REL_ERROR = 1e-8
_ML_TERM_CAP = 5000


def mittag_leffler(q: float, z: float) -> float:
    """One-parameter Mittag-Leffler function ``E_q(z) = sum z^k / Gamma(q k + 1)``.

    The power series converges for every ``z`` but cancels badly for large
    negative arguments.  The routine tracks the largest term and raises if
    the estimated relative rounding error ``eps * max|term| / |E_q(z)|``
    exceeds 1e-8.  In practice this admits ``|z| <= 3`` for ``q >= 0.5``
    and any ``z >= 0`` below overflow.
    """
    _check_order(q)
    z = float(z)
    if z == 0.0:
        return 1.0
    log_abs_z = math.log(abs(z))
    negative = z < 0.0
    total = 1.0
    biggest = 1.0
    for k in range(1, _ML_TERM_CAP):
        log_mag = k * log_abs_z - math.lgamma(q * k + 1.0)
        if log_mag > 700.0:
            raise DomainError(f"E_{q}({z}): series terms overflow double precision")
        mag = math.exp(log_mag)
        term = -mag if (negative and k % 2) else mag
        total += term
        biggest = max(biggest, mag)
        if mag < 1e-16 * abs(total):
            break
    else:
        raise FraqdynError(f"Mittag-Leffler series did not converge for q={q}, z={z}")
    if np.finfo(float).eps * biggest > _ML_MAX_REL_ERROR * abs(total):
        raise DomainError(
            f"E_{q}({z}) cannot be summed reliably in double precision (cancellation)"
        )
    return total
