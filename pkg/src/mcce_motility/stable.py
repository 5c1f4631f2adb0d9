"""Stable-run extraction and threshold sweeps over motion scores."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .frames import FrameSequence
from .motion import DEFAULT_MASK, GaussianMask, MotionScore, pair_scores

DEFAULT_KNEE_FRACTION = 0.25


@dataclass(frozen=True)
class StableRun:
    start_index: int
    length: int

    @property
    def stop_index(self) -> int:
        """One past the last frame of the run."""
        return self.start_index + self.length


@dataclass(frozen=True)
class SweepPoint:
    threshold: float
    mean_run_length: float
    run_count: int


def runs_from_flags(flags: Sequence[bool], min_length: int = 1) -> list[StableRun]:
    """Split frames at every unstable transition.

    ``flags[k]`` is the stability of the transition (k, k+1). An unstable
    transition ends the current run; frame k+1 starts the next one.
    """
    if min_length < 1:
        raise ValueError("min_length must be >= 1")
    n_frames = len(flags) + 1
    runs = []
    start = 0
    for k, ok in enumerate(flags):
        if not ok:
            runs.append(StableRun(start, k + 1 - start))
            start = k + 1
    runs.append(StableRun(start, n_frames - start))
    return [r for r in runs if r.length >= min_length]


def extract_stable_runs(scores: Sequence[MotionScore], min_length: int = 1) -> list[StableRun]:
    """Maximal runs of frames joined by stable transitions, length >= min_length."""
    if not scores:
        if min_length < 1:
            raise ValueError("min_length must be >= 1")
        return []
    return runs_from_flags([s.if_stable for s in scores], min_length)


def sweep_scores(raw_scores: Sequence[float], thresholds: Sequence[float]) -> list[SweepPoint]:
    """Run statistics per threshold over precomputed consecutive-pair scores."""
    thresholds = [float(t) for t in thresholds]
    if not thresholds:
        raise ValueError("thresholds must be non-empty")
    if any(t < 0 for t in thresholds):
        raise ValueError("thresholds must be non-negative")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be strictly ascending")
    raw = np.asarray(raw_scores, dtype=np.float64)
    n_frames = raw.size + 1
    points = []
    for t in thresholds:
        # With min_length 1 the runs tile all frames, so only the count matters.
        run_count = int(np.count_nonzero(raw > t)) + 1
        points.append(SweepPoint(t, n_frames / run_count, run_count))
    return points


def threshold_sweep(
    seq: FrameSequence,
    mask: GaussianMask = DEFAULT_MASK,
    thresholds: Sequence[float] = (200.0,),
) -> list[SweepPoint]:
    return sweep_scores(pair_scores(seq, mask), thresholds)


def suggest_knee(sweep: Sequence[SweepPoint], fraction: float = DEFAULT_KNEE_FRACTION) -> float:
    """Threshold at which run-length growth flattens out.

    Slopes are increments of mean run length per unit threshold between
    neighbouring sweep points. Starting from the steepest segment, the knee is
    the first point whose next slope falls below ``fraction`` of the steepest.
    Without any growth the first threshold is returned; without a drop, the
    last.
    """
    if len(sweep) < 3:
        raise ValueError(f"need at least 3 sweep points, got {len(sweep)}")
    t = np.array([p.threshold for p in sweep], dtype=np.float64)
    m = np.array([p.mean_run_length for p in sweep], dtype=np.float64)
    slopes = np.diff(m) / np.diff(t)
    steepest = slopes.max()
    if steepest <= 0:
        return float(t[0])
    j = int(np.argmax(slopes)) + 1
    while j < len(slopes):
        if slopes[j] < fraction * steepest:
            return float(t[j])
        j += 1
    return float(t[-1])
