"""Camera motion detection, stability gating and contraction-wave period
measurement for magnetically controlled capsule endoscopy video."""

__version__ = "0.1.0"

from .errors import (
    DimensionMismatch,
    EmptyCurve,
    EmptyRange,
    FrameFormatError,
    MotilityError,
    NoPeriodicity,
    ParseError,
    SequenceTooShort,
)
from .frames import Frame, FrameSequence, load_sequence, save_sequence
from .metrics import DetectionMetrics, auc_pairs, auc_trapezoid, evaluate
from .motion import (
    GaussianMask,
    MotionScore,
    classify_stability,
    cmd_score,
    residual_histogram,
    scaled_threshold,
    score_sequence,
)
from .period import (
    IntervalGrid,
    IntervalScoreCurve,
    PeriodEstimate,
    detect_period,
    error_summary,
    find_period,
    interval_curve,
    period_error,
)
from .pipeline import LabeledPrediction, WindowConfig, classify_sequence, gate_predictions
from .scorers import HeuristicWaveScorer, ReplayScorer, heuristic_wave_scorer, replay_scorer
from .stable import StableRun, SweepPoint, extract_stable_runs, suggest_knee, threshold_sweep
from .synth import Jitter, Mucus, SynthSpec, generate
