"""Detection metrics: confusion counts, accuracy, F1, and AUC two ways."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .pipeline import DECISION_THRESHOLD, LabeledPrediction


@dataclass(frozen=True)
class DetectionMetrics:
    accuracy: float
    f1: float
    auc: float | None  # None when truth holds a single class
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def confusion(pred: Sequence[bool], truth: Sequence[bool]) -> tuple[int, int, int, int]:
    """(tp, fp, tn, fn)."""
    p = np.asarray(pred, dtype=bool)
    t = np.asarray(truth, dtype=bool)
    return (
        int(np.sum(p & t)),
        int(np.sum(p & ~t)),
        int(np.sum(~p & ~t)),
        int(np.sum(~p & t)),
    )


def auc_pairs(scores: Sequence[float], truth: Sequence[bool]) -> float | None:
    """Mann-Whitney AUC: share of (positive, negative) pairs ranked correctly, ties 1/2."""
    s = np.asarray(scores, dtype=np.float64)
    t = np.asarray(truth, dtype=bool)
    pos, neg = s[t], s[~t]
    if pos.size == 0 or neg.size == 0:
        return None
    diff = pos[:, None] - neg[None, :]
    return float((np.sum(diff > 0) + 0.5 * np.sum(diff == 0)) / (pos.size * neg.size))


def roc_curve(scores: Sequence[float], truth: Sequence[bool]) -> tuple[np.ndarray, np.ndarray]:
    """(fpr, tpr) with one vertex per distinct score, from (0, 0) to (1, 1)."""
    s = np.asarray(scores, dtype=np.float64)
    t = np.asarray(truth, dtype=bool)
    order = np.argsort(-s, kind="mergesort")
    s, t = s[order], t[order]
    # Last position of each run of equal scores.
    ends = np.r_[np.nonzero(np.diff(s))[0], s.size - 1]
    tps = np.cumsum(t)[ends]
    fps = np.cumsum(~t)[ends]
    tpr = np.r_[0.0, tps / max(t.sum(), 1)]
    fpr = np.r_[0.0, fps / max((~t).sum(), 1)]
    return fpr, tpr


def auc_trapezoid(scores: Sequence[float], truth: Sequence[bool]) -> float | None:
    t = np.asarray(truth, dtype=bool)
    if t.all() or not t.any():
        return None
    fpr, tpr = roc_curve(scores, t)
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def evaluate(
    preds: Sequence[LabeledPrediction],
    truth: Sequence[bool],
) -> DetectionMetrics:
    """Metrics of per-frame predictions against binary ground truth.

    Accuracy and F1 use the predictions' labels; AUC uses their scores. F1 is
    0 when there are no positives at all.
    """
    if len(preds) != len(truth):
        raise ValueError(f"{len(preds)} predictions but {len(truth)} truth labels")
    labels = [p.is_wave for p in preds]
    tp, fp, tn, fn = confusion(labels, truth)
    total = tp + fp + tn + fn
    accuracy = (tp + tn) / total if total else 0.0
    f1 = 2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) else 0.0
    auc = auc_pairs([p.score for p in preds], truth)
    return DetectionMetrics(accuracy, f1, auc, tp, fp, tn, fn)


def evaluate_scores(scores: Sequence[float], truth: Sequence[bool], threshold: float = DECISION_THRESHOLD) -> DetectionMetrics:
    preds = [LabeledPrediction.from_score(k, s, threshold) for k, s in enumerate(scores)]
    return evaluate(preds, truth)
