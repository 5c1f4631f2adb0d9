"""Contraction-wave period from mean motion scores over candidate intervals.

For each candidate interval ``i`` (in frames) the sequence is walked in hops
of ``i`` starting at frame 0, every hop is scored with the motion-detector
score, and the hop scores are averaged. Frames one wave period apart look
alike, so the period shows up as a valley of the resulting curve; the deepest
local minimum inside ``[t_l, t_r]`` is reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyCurve, EmptyRange, NoPeriodicity
from .frames import DEFAULT_FPS, FrameSequence
from .motion import DEFAULT_MASK, GaussianMask, residual_histogram

DEFAULT_MIN_S = 5.0
DEFAULT_MAX_S = 50.0
DEFAULT_STEP_S = 0.5
DEFAULT_T_L = 10.0
DEFAULT_T_R = 40.0
# A minimum at a whole fraction of the deepest one is preferred when it is within
# this fraction of the curve's median depth (median score minus deepest score).
DEFAULT_HARMONIC_TOLERANCE = 0.01


@dataclass(frozen=True)
class IntervalGrid:
    min_s: float = DEFAULT_MIN_S
    max_s: float = DEFAULT_MAX_S
    step_s: float = DEFAULT_STEP_S
    fps: float = DEFAULT_FPS

    def __post_init__(self):
        if not self.fps > 0:
            raise ValueError("fps must be positive")
        if not self.step_s > 0:
            raise ValueError("step_s must be positive")
        if not self.min_s < self.max_s:
            raise ValueError("min_s must be below max_s")
        for name in ("min_s", "step_s"):
            frames = getattr(self, name) * self.fps
            if abs(frames - round(frames)) > 1e-9 or round(frames) < 1:
                raise ValueError(f"{name} * fps must be a positive whole number of frames, got {frames}")

    def frames(self) -> list[int]:
        """Grid intervals in frames, ascending."""
        lo = round(self.min_s * self.fps)
        step = round(self.step_s * self.fps)
        hi = math.floor(self.max_s * self.fps + 1e-9)
        return list(range(lo, hi + 1, step))

    def seconds(self) -> list[float]:
        return [f / self.fps for f in self.frames()]


@dataclass(frozen=True)
class CurvePoint:
    interval_s: float
    mean_score: float
    pair_count: int


@dataclass(frozen=True)
class IntervalScoreCurve:
    points: tuple[CurvePoint, ...]

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def intervals(self) -> np.ndarray:
        return np.array([p.interval_s for p in self.points])

    @property
    def scores(self) -> np.ndarray:
        return np.array([p.mean_score for p in self.points])

    def at(self, interval_s: float) -> CurvePoint:
        for p in self.points:
            if abs(p.interval_s - interval_s) < 1e-9:
                return p
        raise KeyError(interval_s)


@dataclass(frozen=True)
class PeriodEstimate:
    period_s: float
    curve: IntervalScoreCurve
    t_l: float = DEFAULT_T_L
    t_r: float = DEFAULT_T_R


class _PairCache:
    """Memoised pair scores; hop grids of different intervals share pairs."""

    def __init__(self, seq: FrameSequence, mask: GaussianMask):
        self.seq = seq
        self.weights = mask.weights
        self.cache: dict[tuple[int, int], float] = {}

    def __call__(self, a: int, b: int) -> float:
        key = (a, b)
        if key not in self.cache:
            hist = residual_histogram(self.seq[a], self.seq[b])
            self.cache[key] = float(np.dot(self.weights, hist))
        return self.cache[key]


def interval_curve(
    seq: FrameSequence,
    grid: IntervalGrid | None = None,
    mask: GaussianMask = DEFAULT_MASK,
    phase_average: bool = False,
) -> IntervalScoreCurve:
    """Mean hop score for every grid interval that fits in the sequence.

    By default hops start at frame 0: pairs (0, i), (i, 2i), ... while the later
    frame exists, giving ``floor((N - 1) / i)`` pairs. With ``phase_average``
    every start offset ``0 .. i-1`` contributes its own hops.
    """
    grid = grid or IntervalGrid(fps=seq.fps)
    n = len(seq)
    score = _PairCache(seq, mask)
    points = []
    for i in grid.frames():
        starts = range(i) if phase_average else (0,)
        pairs = [(a, a + i) for s in starts for a in range(s, n - i, i)]
        if not pairs:
            continue
        mean = float(np.mean([score(a, b) for a, b in pairs]))
        points.append(CurvePoint(i / grid.fps, mean, len(pairs)))
    if not points:
        raise EmptyCurve(f"{n} frames admit no pair at any interval of the grid")
    return IntervalScoreCurve(tuple(points))


def local_minima(scores: np.ndarray, atol: float = 0.0) -> np.ndarray:
    """Indices that are <= both neighbours and strictly below at least one.

    End points compare against their single neighbour. Values within ``atol``
    of each other count as equal.
    """
    n = len(scores)
    out = []
    for k in range(n):
        nbrs = [scores[j] for j in (k - 1, k + 1) if 0 <= j < n]
        if nbrs and all(scores[k] <= v + atol for v in nbrs) and any(scores[k] < v - atol for v in nbrs):
            out.append(k)
    return np.array(out, dtype=int)


def _is_multiple(long: float, short: float, step: float) -> bool:
    k = round(long / short)
    return k >= 2 and abs(long - k * short) <= k * step + 1e-9


def find_period(
    curve: IntervalScoreCurve,
    t_l: float = DEFAULT_T_L,
    t_r: float = DEFAULT_T_R,
    harmonic_tolerance: float = DEFAULT_HARMONIC_TOLERANCE,
) -> PeriodEstimate:
    """Deepest local minimum of ``curve`` with interval in ``[t_l, t_r]``.

    The local-minimum test sees the whole curve, so points just outside the
    range still act as neighbours. Equal scores (within a relative 1e-9) go to
    the shorter interval.

    A true period P also leaves minima at 2P, 3P, ... that are just as deep up
    to noise. So when the deepest minimum lies at a whole multiple (within
    rounding to the grid) of a shorter in-range minimum, and the shorter one is
    within ``harmonic_tolerance`` of the curve's median depth from it, the
    shorter one is reported.
    """
    if not t_l < t_r:
        raise ValueError("t_l must be below t_r")
    if harmonic_tolerance < 0:
        raise ValueError("harmonic_tolerance must be non-negative")
    x, y = curve.intervals, curve.scores
    eps = 1e-9
    in_range = (x >= t_l - eps) & (x <= t_r + eps)
    if not in_range.any():
        raise EmptyRange(f"no curve points within [{t_l}, {t_r}] s")
    # Means of equal pair scores can differ in the last bit; that is not a valley.
    atol = 1e-9 * float(np.max(np.abs(y)))
    candidates = [k for k in local_minima(y, atol) if in_range[k]]
    if not candidates:
        raise NoPeriodicity(f"no local minimum of the interval curve within [{t_l}, {t_r}] s")
    lowest = min(y[k] for k in candidates)
    best = min((k for k in candidates if y[k] <= lowest + atol), key=lambda k: x[k])
    depth = float(np.median(y[in_range]) - y[best])
    step = float(np.min(np.diff(x))) if len(x) > 1 else 0.0
    for k in sorted(candidates, key=lambda j: x[j]):
        if x[k] >= x[best]:
            break
        if _is_multiple(x[best], x[k], step) and y[k] - y[best] <= harmonic_tolerance * max(depth, 0.0):
            best = k
            break
    return PeriodEstimate(float(x[best]), curve, t_l, t_r)


def detect_period(
    seq: FrameSequence,
    grid: IntervalGrid | None = None,
    t_l: float = DEFAULT_T_L,
    t_r: float = DEFAULT_T_R,
    mask: GaussianMask = DEFAULT_MASK,
    phase_average: bool = False,
) -> PeriodEstimate:
    return find_period(interval_curve(seq, grid, mask, phase_average), t_l, t_r)


def period_error(detected_s: float, counted_s: float) -> float:
    """Relative period error in percent: 100 * |detected - counted| / counted."""
    if not counted_s > 0:
        raise ValueError(f"counted period must be positive, got {counted_s}")
    return 100.0 * abs(detected_s - counted_s) / counted_s


def error_summary(errors: Sequence[float]) -> dict[str, float]:
    """Mean, population std, median, max and min of a set of errors."""
    values = np.asarray(errors, dtype=np.float64)
    if values.size == 0:
        raise ValueError("error_summary needs at least one value")
    return {
        "mean": float(values.mean()),
        "std": float(values.std(ddof=0)),
        "median": float(np.median(values)),
        "max": float(values.max()),
        "min": float(values.min()),
    }
