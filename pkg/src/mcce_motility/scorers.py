"""Reference wave scorers: an annular-profile heuristic and a file replay."""

from __future__ import annotations

import csv
import io
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ParseError
from .frames import Frame

DEFAULT_ANNULI = 8
DEFAULT_SCALE = 4.0


@lru_cache(maxsize=16)
def _annulus_labels(height: int, width: int, n_annuli: int) -> tuple[np.ndarray, np.ndarray]:
    """Annulus id per pixel (-1 outside the inscribed disc) and pixel counts."""
    yy, xx = np.mgrid[0:height, 0:width]
    r = np.hypot(yy - (height - 1) / 2.0, xx - (width - 1) / 2.0)
    r_max = min(height, width) / 2.0
    labels = np.floor(r / r_max * n_annuli).astype(np.int64)
    labels[labels >= n_annuli] = -1
    counts = np.bincount(labels[labels >= 0], minlength=n_annuli)
    labels.setflags(write=False)
    return labels, counts


def annulus_profile(frame: Frame, n_annuli: int = DEFAULT_ANNULI) -> np.ndarray:
    """Mean intensity of each concentric annulus, centre outward."""
    labels, counts = _annulus_labels(frame.height, frame.width, n_annuli)
    inside = labels >= 0
    sums = np.bincount(labels[inside], weights=frame.pixels[inside].astype(np.float64), minlength=n_annuli)
    return sums / np.maximum(counts, 1)


class HeuristicWaveScorer:
    """Scores contraction-like motion from annular intensity profiles.

    Each frame is reduced to annulus means; an annulus' depth is how far it
    sits below the frame's mean profile, so global brightness changes cancel.
    A contraction ring passing through an annulus makes that depth swing over
    time. The score squashes the largest temporal standard deviation of depth
    (over annuli) with ``1 - exp(-std / scale)``.
    """

    def __init__(self, n_annuli: int = DEFAULT_ANNULI, scale: float = DEFAULT_SCALE):
        if n_annuli < 2 or scale <= 0:
            raise ValueError("need n_annuli >= 2 and scale > 0")
        self.n_annuli = n_annuli
        self.scale = scale

    def depth_spread(self, window: Sequence[Frame]) -> float:
        if len(window) < 2:
            raise ValueError(f"window must hold at least 2 frames, got {len(window)}")
        profiles = np.stack([annulus_profile(f, self.n_annuli) for f in window])
        depth = profiles.mean(axis=1, keepdims=True) - profiles
        return float(depth.std(axis=0).max())

    def __call__(self, window: Sequence[Frame], anchor: int = -1) -> float:
        return float(1.0 - np.exp(-self.depth_spread(window) / self.scale))


def heuristic_wave_scorer(window: Sequence[Frame]) -> float:
    return HeuristicWaveScorer()(window)


class ReplayScorer:
    """Returns precomputed per-frame scores for each window's anchor frame."""

    def __init__(self, scores: Sequence[float]):
        self.scores = np.asarray(scores, dtype=np.float64)

    @property
    def frame_count(self) -> int:
        return len(self.scores)

    def __call__(self, window: Sequence[Frame], anchor: int) -> float:
        idx = window[anchor].index
        if idx >= len(self.scores):
            raise ValueError(f"no replay score for frame {idx}")
        return float(self.scores[idx])


def _parse_bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "wave", "yes"):
        return True
    if v in ("0", "false", "nowave", "no"):
        return False
    raise ValueError(f"not a binary label: {value!r}")


def read_frame_table(text: str, column: str, kind: str = "score") -> np.ndarray:
    """Parse a ``frame_index,...`` CSV and return ``column`` ordered by frame.

    ``kind`` is ``"score"`` (float in [0, 1]) or ``"label"`` (binary). Frame
    indices must be exactly 0..N-1. Errors name the offending line.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("line 1: empty file") from None
    if "frame_index" not in header or column not in header:
        raise ParseError(f"line 1: header must contain frame_index and {column}, got {header}")
    i_col, v_col = header.index("frame_index"), header.index(column)
    rows = {}
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            idx = int(row[i_col])
            if kind == "label":
                value = float(_parse_bool(row[v_col]))
            else:
                value = float(row[v_col])
                if not 0.0 <= value <= 1.0:
                    raise ValueError(f"score {value} outside [0, 1]")
        except (IndexError, ValueError) as exc:
            raise ParseError(f"line {line_no}: {exc}") from None
        if idx in rows:
            raise ParseError(f"line {line_no}: duplicate frame_index {idx}")
        rows[idx] = value
    if sorted(rows) != list(range(len(rows))):
        raise ParseError("frame_index values must cover 0..N-1 without gaps")
    return np.array([rows[k] for k in range(len(rows))])


def replay_scorer(contents: str) -> ReplayScorer:
    """Scorer over a ``frame_index,score[,label]`` CSV text."""
    return ReplayScorer(read_frame_table(contents, "score"))
