"""Camera motion detection from masked residual histograms.

Two frames are differenced pixel-wise, the absolute residual is binned into a
256-bin histogram, and the histogram is weighted by a unit-sum Gaussian mask
centred mid-range. The weighted count is the motion score; the newer frame is
stable when the score does not exceed the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, SequenceTooShort
from .frames import Frame, FrameSequence

DEFAULT_MU = 128.0
DEFAULT_SIGMA = 20.0
DEFAULT_THRESHOLD = 200.0
# Pixel count the default threshold was chosen for (480 x 480).
REFERENCE_PIXELS = 480 * 480

N_BINS = 256


@dataclass(frozen=True)
class GaussianMask:
    mu: float = DEFAULT_MU
    sigma: float = DEFAULT_SIGMA
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        b = np.arange(N_BINS, dtype=np.float64)
        # Work in log space so extreme (mu, sigma) stay finite before normalizing.
        log_w = -((b - self.mu) ** 2) / (2.0 * self.sigma ** 2)
        w = np.exp(log_w - log_w.max())
        w /= w.sum()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


DEFAULT_MASK = GaussianMask()


@dataclass(frozen=True)
class MotionScore:
    """Score of the pair (frame_index - 1, frame_index)."""

    score: float
    threshold: float = DEFAULT_THRESHOLD
    frame_index: int = 1

    @property
    def if_stable(self) -> bool:
        return self.score <= self.threshold


def scaled_threshold(width: int, height: int, threshold: float = DEFAULT_THRESHOLD) -> float:
    """Rescale a threshold tuned for 480x480 frames to another frame size."""
    return threshold * (width * height) / REFERENCE_PIXELS


def _check_pair(a: Frame, b: Frame) -> None:
    if a.pixels.shape != b.pixels.shape:
        raise DimensionMismatch(
            f"frames {a.index} ({a.width}x{a.height}) and {b.index} ({b.width}x{b.height}) differ in size"
        )


def residual_histogram(a: Frame, b: Frame) -> np.ndarray:
    """256-bin histogram of ``|a - b|``; bins sum to the pixel count."""
    _check_pair(a, b)
    residual = np.abs(a.pixels.astype(np.int16) - b.pixels.astype(np.int16))
    return np.bincount(residual.ravel(), minlength=N_BINS)


def masked_score(hist: np.ndarray, mask: GaussianMask = DEFAULT_MASK) -> float:
    return float(np.dot(mask.weights, hist))


def cmd_score(a: Frame, b: Frame, mask: GaussianMask = DEFAULT_MASK) -> float:
    return masked_score(residual_histogram(a, b), mask)


def classify_stability(
    a: Frame,
    b: Frame,
    mask: GaussianMask = DEFAULT_MASK,
    threshold: float = DEFAULT_THRESHOLD,
) -> MotionScore:
    if not threshold > 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    return MotionScore(cmd_score(a, b, mask), float(threshold), b.index)


def pair_scores(seq: FrameSequence, mask: GaussianMask = DEFAULT_MASK) -> np.ndarray:
    """Raw scores of consecutive pairs; entry k scores frames (k, k+1)."""
    if len(seq) < 2:
        raise SequenceTooShort(f"need at least 2 frames, got {len(seq)}")
    return np.array([cmd_score(seq[k], seq[k + 1], mask) for k in range(len(seq) - 1)])


def score_sequence(
    seq: FrameSequence,
    mask: GaussianMask = DEFAULT_MASK,
    threshold: float = DEFAULT_THRESHOLD,
) -> list[MotionScore]:
    """One verdict per consecutive pair (N - 1 entries).

    Frame 0 has no predecessor and is stable by definition; it gets no entry.
    """
    if not threshold > 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    return [MotionScore(float(s), float(threshold), k + 1) for k, s in enumerate(pair_scores(seq, mask))]


def stability_flags(scores: list[MotionScore]) -> list[bool]:
    """Per-frame stability, frame 0 first (always True)."""
    return [True] + [s.if_stable for s in scores]
