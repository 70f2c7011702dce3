"""Spike detection, burst segmentation and long-time behaviour of trajectories."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError
from .fracsolve import Trajectory

__all__ = [
    "SpikeTrain",
    "Burst",
    "BurstSummary",
    "AttractorConfig",
    "AttractorClass",
    "EQUILIBRIUM",
    "LIMIT_CYCLE",
    "BURSTING",
    "UNDETERMINED",
    "detect_spikes",
    "segment_bursts",
    "classify_attractor",
    "interspike_cv",
]

EQUILIBRIUM = "equilibrium"
LIMIT_CYCLE = "limit_cycle"
BURSTING = "bursting"
UNDETERMINED = "undetermined"

#: default spike suppression distance, in samples
MIN_SEPARATION_SAMPLES = 20


@dataclass(frozen=True, eq=False)
class SpikeTrain:
    spike_times: np.ndarray
    spike_peaks: np.ndarray
    threshold_used: float

    def __len__(self):
        return len(self.spike_times)

    @property
    def intervals(self) -> np.ndarray:
        return np.diff(self.spike_times)


class Burst(NamedTuple):
    start: float
    end: float
    spike_count: int


@dataclass(frozen=True)
class BurstSummary:
    bursts: Tuple[Burst, ...]
    interburst_gaps: Tuple[float, ...]
    spikes_per_burst_mean: float

    def __len__(self):
        return len(self.bursts)

    @property
    def spike_counts(self) -> Tuple[int, ...]:
        return tuple(b.spike_count for b in self.bursts)


def detect_spikes(
    traj: Trajectory,
    threshold: float = 0.0,
    min_separation: Optional[float] = None,
) -> SpikeTrain:
    """Strict local maxima of the first component above ``threshold``.

    A maximum closer than ``min_separation`` (time units, default 20 samples)
    to the previously accepted spike is dropped.
    """
    if len(traj) < 3:
        raise DomainError(f"need at least 3 samples to detect spikes, got {len(traj)}")
    if not math.isfinite(threshold):
        raise DomainError(f"threshold must be finite, got {threshold!r}")
    x = traj.states[:, 0]
    t = traj.times
    if min_separation is None:
        min_separation = MIN_SEPARATION_SAMPLES * traj.step
    mid = x[1:-1]
    candidates = np.flatnonzero((mid > x[:-2]) & (mid > x[2:]) & (mid > threshold)) + 1
    keep = []
    last = -math.inf
    for i in candidates:
        if t[i] - last >= min_separation:
            keep.append(i)
            last = t[i]
    keep = np.asarray(keep, dtype=int)
    return SpikeTrain(spike_times=t[keep], spike_peaks=x[keep], threshold_used=float(threshold))


def segment_bursts(train: SpikeTrain, gap_factor: float = 3.0) -> BurstSummary:
    """Split a spike train wherever an interval exceeds ``gap_factor`` times the median interval."""
    times = np.asarray(train.spike_times, dtype=float)
    if len(times) == 0:
        return BurstSummary(bursts=(), interburst_gaps=(), spikes_per_burst_mean=0.0)
    if len(times) == 1:
        return BurstSummary(
            bursts=(Burst(float(times[0]), float(times[0]), 1),),
            interburst_gaps=(),
            spikes_per_burst_mean=1.0,
        )
    isi = np.diff(times)
    cut = gap_factor * float(np.median(isi))
    breaks = np.flatnonzero(isi > cut)
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks, [len(times) - 1]))
    bursts = tuple(
        Burst(float(times[s]), float(times[e]), int(e - s + 1)) for s, e in zip(starts, ends)
    )
    gaps = tuple(float(times[s] - times[e]) for e, s in zip(ends[:-1], starts[1:]))
    return BurstSummary(
        bursts=bursts,
        interburst_gaps=gaps,
        spikes_per_burst_mean=float(np.mean([b.spike_count for b in bursts])),
    )


def interspike_cv(train: SpikeTrain) -> float:
    """Coefficient of variation of the inter-spike intervals (``nan`` below 2 intervals)."""
    isi = train.intervals
    if len(isi) < 2:
        return math.nan
    mean = float(np.mean(isi))
    return float(np.std(isi)) / mean if mean > 0.0 else math.nan


@dataclass(frozen=True)
class AttractorConfig:
    transient_fraction: float = 0.5
    amplitude_tolerance: float = 1e-3
    state_tolerance: float = 1e-2
    window_count: int = 4
    threshold: float = 0.0
    min_separation: Optional[float] = None
    gap_factor: float = 3.0
    amplitude_agreement: float = 0.05
    cv_tolerance: float = 0.05

    def __post_init__(self):
        if not (0.0 <= self.transient_fraction < 1.0):
            raise DomainError(f"transient_fraction must lie in [0, 1), got {self.transient_fraction!r}")
        if self.window_count < 1:
            raise DomainError(f"window_count must be >= 1, got {self.window_count!r}")
        for name in ("amplitude_tolerance", "state_tolerance", "gap_factor"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)!r}")


@dataclass(frozen=True)
class AttractorClass:
    kind: str
    tail_amplitude: float
    reference_equilibrium: Optional[Tuple[float, ...]]
    transient_fraction_used: float
    window_amplitudes: Tuple[float, ...] = ()
    spikes: Optional[SpikeTrain] = field(default=None, compare=False, repr=False)
    bursts: Optional[BurstSummary] = field(default=None, compare=False, repr=False)
    isi_cv: float = math.nan


def classify_attractor(
    traj: Trajectory,
    eq: Optional[Sequence[float]] = None,
    cfg: Optional[AttractorConfig] = None,
) -> AttractorClass:
    """Decide whether the tail of ``traj`` rests, cycles, bursts, or none of these.

    The leading ``transient_fraction`` of samples is discarded.  Checks run
    in order: equilibrium (flat tail, end point near ``eq`` when given),
    limit cycle (equal window amplitudes and a single periodic spike train),
    bursting (two or more bursts of at least two spikes).
    """
    cfg = cfg or AttractorConfig()
    n = len(traj)
    start = int(math.floor(cfg.transient_fraction * n))
    tail_len = n - start
    need = 10 * cfg.window_count
    if tail_len < need:
        required = int(math.ceil(need / (1.0 - cfg.transient_fraction)))
        raise DomainError(
            f"trajectory too short: {n} samples leave {tail_len} after the transient; "
            f"need at least {required}"
        )
    tail = Trajectory(traj.times[start:], traj.states[start:])
    x = tail.states[:, 0]
    amplitude = float(np.max(x) - np.min(x))
    ref = None if eq is None else tuple(float(v) for v in eq)

    windows = np.array_split(x, cfg.window_count)
    window_amps = tuple(float(np.max(w) - np.min(w)) for w in windows)
    common = dict(
        tail_amplitude=amplitude,
        reference_equilibrium=ref,
        transient_fraction_used=cfg.transient_fraction,
        window_amplitudes=window_amps,
    )

    if amplitude < cfg.amplitude_tolerance:
        end_ok = True
        if ref is not None:
            end_ok = float(np.linalg.norm(tail.states[-1] - np.asarray(ref))) < cfg.state_tolerance
        if end_ok:
            return AttractorClass(kind=EQUILIBRIUM, **common)
        return AttractorClass(kind=UNDETERMINED, **common)

    spikes = detect_spikes(tail, cfg.threshold, cfg.min_separation)
    bursts = segment_bursts(spikes, cfg.gap_factor)
    cv = interspike_cv(spikes)
    common.update(spikes=spikes, bursts=bursts, isi_cv=cv)

    amps = np.asarray(window_amps)
    amps_agree = amps.min() > 0.0 and (amps.max() - amps.min()) <= cfg.amplitude_agreement * amps.max()
    if amps_agree and len(bursts) == 1 and len(spikes) >= 3 and cv < cfg.cv_tolerance:
        return AttractorClass(kind=LIMIT_CYCLE, **common)
    if sum(1 for b in bursts.bursts if b.spike_count >= 2) >= 2:
        return AttractorClass(kind=BURSTING, **common)
    return AttractorClass(kind=UNDETERMINED, **common)
