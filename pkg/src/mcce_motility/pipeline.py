"""Sliding-window Wave/Nowave labelling with stability-gated carry-forward."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

from .errors import SequenceTooShort
from .frames import Frame, FrameSequence
from .motion import MotionScore, stability_flags

WAVE = "Wave"
NOWAVE = "Nowave"
DECISION_THRESHOLD = 0.5


class WaveScorer(Protocol):
    """Anything that maps a window of frames to a wave probability in [0, 1].

    ``anchor`` is the position inside the window of the frame that will
    receive the score.
    """

    def __call__(self, window: Sequence[Frame], anchor: int) -> float: ...


@dataclass(frozen=True)
class WindowConfig:
    length: int = 20
    stride: int = 1
    anchor: int | None = None  # None: last frame of the window

    def __post_init__(self):
        if self.length < 1 or self.stride < 1:
            raise ValueError("window length and stride must be >= 1")
        if self.anchor is not None and not 0 <= self.anchor < self.length:
            raise ValueError(f"anchor must be in [0, {self.length}), got {self.anchor}")

    @property
    def anchor_offset(self) -> int:
        return self.length - 1 if self.anchor is None else self.anchor

    @classmethod
    def centered(cls, length: int, stride: int = 1) -> "WindowConfig":
        return cls(length, stride, length // 2)


@dataclass(frozen=True)
class LabeledPrediction:
    frame_index: int
    score: float
    label: str
    gated: bool = False

    @classmethod
    def from_score(cls, frame_index: int, score: float, threshold: float = DECISION_THRESHOLD) -> "LabeledPrediction":
        score = float(score)
        return cls(frame_index, score, WAVE if score >= threshold else NOWAVE)

    @property
    def is_wave(self) -> bool:
        return self.label == WAVE


def classify_sequence(
    seq: FrameSequence,
    cfg: WindowConfig,
    classifier: WaveScorer,
    threshold: float = DECISION_THRESHOLD,
) -> list[LabeledPrediction]:
    """Score every window and spread the scores to one prediction per frame.

    The window starting at ``s`` labels frame ``s + anchor``. Frames that are
    no window's anchor take the score of the nearest earlier anchor, or of the
    first anchor if none precedes them.
    """
    n = len(seq)
    if n < cfg.length:
        raise SequenceTooShort(f"sequence has {n} frames, window needs {cfg.length}")
    expected = getattr(classifier, "frame_count", None)
    if expected is not None and expected != n:
        raise ValueError(f"classifier covers {expected} frames but the sequence has {n}")

    a = cfg.anchor_offset
    scored: dict[int, float] = {}
    for start in range(0, n - cfg.length + 1, cfg.stride):
        window = seq.frames[start:start + cfg.length]
        score = float(classifier(window, a))
        if not 0.0 <= score <= 1.0:
            raise ValueError(f"classifier returned {score} for window at {start}; scores must be in [0, 1]")
        scored[start + a] = score

    first = min(scored)
    out = []
    current = scored[first]
    for k in range(n):
        current = scored.get(k, current)
        out.append(LabeledPrediction.from_score(k, current, threshold))
    return out


def gate_predictions(
    preds: Sequence[LabeledPrediction],
    scores: Sequence[MotionScore] | Sequence[bool],
) -> list[LabeledPrediction]:
    """Replace predictions at unstable frames with the last stable frame's.

    ``scores`` holds either the N - 1 pair verdicts from ``score_sequence`` or
    N per-frame stability flags. Frame 0 is stable regardless.
    """
    scores = list(scores)
    if scores and isinstance(scores[0], MotionScore) or (not scores and len(preds) == 1):
        flags = stability_flags(scores)
    else:
        flags = [bool(f) for f in scores]
        if flags:
            flags[0] = True
    if len(flags) != len(preds):
        raise ValueError(f"{len(preds)} predictions but stability covers {len(flags)} frames")

    out = []
    last_stable = None
    for pred, ok in zip(preds, flags):
        if ok:
            last_stable = pred
            out.append(pred)
        else:
            out.append(LabeledPrediction(pred.frame_index, last_stable.score, last_stable.label, True))
    return out
