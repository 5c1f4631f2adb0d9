"""Command-line entry point: ``mcce-motility <subcommand> ...``.

Exit status is 0 on success, 1 on a domain error (a JSON record with
``error`` and ``message`` goes to stderr) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import MotilityError, ParseError
from .frames import FrameSequence, load_sequence, save_sequence
from .metrics import evaluate
from .motion import GaussianMask, pair_scores, score_sequence
from .period import IntervalGrid, error_summary, find_period, interval_curve, period_error
from .pipeline import LabeledPrediction, WindowConfig, classify_sequence, gate_predictions
from .scorers import HeuristicWaveScorer, read_frame_table, replay_scorer
from .stable import extract_stable_runs, suggest_knee, sweep_scores
from .synth import MODES, SINUSOID, Jitter, Mucus, SynthSpec, generate

log = logging.getLogger("mcce_motility")


@dataclass(frozen=True)
class RunConfig:
    """Default algorithm parameters shared by all subcommands."""

    mu: float = 128.0
    sigma: float = 20.0
    threshold: float = 200.0
    interval_min: float = 5.0
    interval_max: float = 50.0
    interval_step: float = 0.5
    t_l: float = 10.0
    t_r: float = 40.0
    fps: float = 2.0
    window: int = 20
    size: int = 480


DEFAULTS = RunConfig()


def fmt(x: float) -> str:
    return f"{x:.6g}"


def _write_csv(path: str | Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_json(path: str | Path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def _mask(args) -> GaussianMask:
    return GaussianMask(args.mu, args.sigma)


def _load(args) -> FrameSequence:
    return load_sequence(args.input, getattr(args, "fps", None))


def _parse_range(text: str) -> list[float]:
    """``start:stop:step`` (stop inclusive) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError(f"bad range {text!r}")
        n = int(np.floor((stop - start) / step + 1e-9))
        return [start + k * step for k in range(n + 1)]
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad threshold list {text!r}") from None


# -- subcommands ---------------------------------------------------------------

def cmd_score(args) -> int:
    seq = _load(args)
    scores = score_sequence(seq, _mask(args), args.threshold)
    rows = [(0, fmt(0.0), "true")]
    rows += [(s.frame_index, fmt(s.score), str(s.if_stable).lower()) for s in scores]
    _write_csv(args.out, ["frame_index", "score", "if_stable"], rows)
    n_unstable = sum(not s.if_stable for s in scores)
    log.info("%d frames, %d unstable", len(seq), n_unstable)
    return 0


def cmd_extract_stable(args) -> int:
    seq = _load(args)
    runs = extract_stable_runs(score_sequence(seq, _mask(args), args.threshold), args.min_length)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for k, run in enumerate(runs):
        save_sequence(
            seq.subsequence(run.start_index, run.length),
            out / f"run_{k:04d}",
            {"source_start_index": run.start_index},
        )
    _write_csv(out / "runs.csv", ["run", "start_index", "length"],
               [(k, r.start_index, r.length) for k, r in enumerate(runs)])
    print(len(runs))
    return 0


def cmd_sweep_threshold(args) -> int:
    seq = _load(args)
    sweep = sweep_scores(pair_scores(seq, _mask(args)), args.thresholds)
    _write_csv(args.out, ["threshold", "run_count", "mean_run_length"],
               [(fmt(p.threshold), p.run_count, fmt(p.mean_run_length)) for p in sweep])
    if len(sweep) >= 3:
        print(f"suggested_threshold={fmt(suggest_knee(sweep, args.knee_fraction))}")
    return 0


def cmd_classify(args) -> int:
    seq = _load(args)
    if args.classifier == "replay":
        scorer = replay_scorer(Path(args.replay_file).read_text())
    else:
        scorer = HeuristicWaveScorer()
    cfg = WindowConfig(args.window, args.stride, args.anchor)
    preds = classify_sequence(seq, cfg, scorer)
    if args.gate:
        preds = gate_predictions(preds, score_sequence(seq, _mask(args), args.threshold))
    _write_csv(args.out, ["frame_index", "score", "label", "gated"],
               [(p.frame_index, fmt(p.score), p.label, str(p.gated).lower()) for p in preds])
    return 0


def _read_truth(path: str) -> np.ndarray:
    text = Path(path).read_text()
    header = text.splitlines()[0] if text else ""
    column = "label" if "label" in header.split(",") else "wave_active"
    return read_frame_table(text, column, kind="label").astype(bool)


def cmd_evaluate(args) -> int:
    text = Path(args.pred).read_text()
    scores = read_frame_table(text, "score")
    header = text.splitlines()[0].split(",")
    if "label" in [h.strip() for h in header]:
        labels = read_frame_table(text, "label", kind="label")
        preds = [LabeledPrediction(k, s, "Wave" if l else "Nowave") for k, (s, l) in enumerate(zip(scores, labels))]
    else:
        preds = [LabeledPrediction.from_score(k, s) for k, s in enumerate(scores)]
    metrics = evaluate(preds, _read_truth(args.truth))
    _write_json(args.out, metrics.to_dict())
    print(json.dumps(metrics.to_dict()))
    return 0


def cmd_detect_period(args) -> int:
    seq = _load(args)
    grid = IntervalGrid(args.interval_min, args.interval_max, args.interval_step, seq.fps)
    curve = interval_curve(seq, grid, _mask(args), phase_average=args.phase_average)
    if args.out:
        _write_csv(args.out, ["interval_s", "mean_score", "pair_count"],
                   [(fmt(p.interval_s), fmt(p.mean_score), p.pair_count) for p in curve])
    summary = {"period_s": None, "t_l": args.tl, "t_r": args.tr, "status": "ok"}
    try:
        est = find_period(curve, args.tl, args.tr)
    except MotilityError as exc:
        summary["status"] = exc.code
        if args.summary:
            _write_json(args.summary, summary)
        raise
    summary["period_s"] = est.period_s
    if args.summary:
        _write_json(args.summary, summary)
    print(fmt(est.period_s))
    return 0


def cmd_period_error(args) -> int:
    print(f"{period_error(args.detected, args.counted):.3f}")
    return 0


def _read_errors(path: str) -> list[float]:
    """Errors from a CSV: the ``error`` column if headed, else the first column."""
    with open(path, newline="") as fh:
        rows = [(n, r) for n, r in enumerate(csv.reader(fh), start=1) if r and any(c.strip() for c in r)]
    col = 0
    if rows:
        try:
            float(rows[0][1][0].strip().rstrip("%"))
        except ValueError:
            names = [h.strip() for h in rows[0][1]]
            col = next((names.index(n) for n in ("error", "error_pct", "error_percent") if n in names), 0)
            rows = rows[1:]
    values = []
    for line_no, r in rows:
        try:
            values.append(float(r[col].strip().rstrip("%")))
        except (IndexError, ValueError):
            raise ParseError(f"{path}: line {line_no}: not a number") from None
    return values


def cmd_error_summary(args) -> int:
    stats = error_summary(_read_errors(args.input))
    if args.out:
        _write_json(args.out, stats)
    print(json.dumps(stats))
    return 0


def cmd_synth(args) -> int:
    jitter = Jitter(args.jitter_p, args.jitter_max, args.jitter_min) if args.jitter_p > 0 else None
    mucus = Mucus(args.mucus_count, args.mucus_radius, args.mucus_drift) if args.mucus_count > 0 else None
    spec = SynthSpec(
        mode=args.mode, width=args.size, height=args.size, fps=args.fps,
        duration_s=args.duration, period_s=args.period, amplitude=args.amplitude,
        jitter=jitter, noise_sigma=args.noise, mucus=mucus, seed=args.seed,
    )
    out = generate(spec)
    save_sequence(out.sequence, args.out_dir)
    if args.truth:
        _write_csv(args.truth, ["frame_index", "wave_active", "jittered"],
                   [(k, int(a), int(j)) for k, (a, j) in enumerate(zip(out.wave_active, out.jittered))])
    print(len(out.sequence))
    return 0


# -- parser ----------------------------------------------------------------------

def _add_mask(p, with_threshold=True):
    d = DEFAULTS
    p.add_argument("--mu", type=float, default=d.mu, help="mask centre bin (default: %(default)s)")
    p.add_argument("--sigma", type=float, default=d.sigma, help="mask width in bins (default: %(default)s)")
    if with_threshold:
        p.add_argument("--threshold", type=float, default=d.threshold,
                       help="motion score above which a frame is unstable (default: %(default)s, for 480x480)")


def _add_input(p):
    p.add_argument("--input", required=True, help="directory of frame_NNNNNN.pgm files")
    p.add_argument("--fps", type=float, default=None,
                   help=f"frames per second; overrides meta.json (default: sidecar, else {DEFAULTS.fps})")


def build_parser() -> argparse.ArgumentParser:
    d = DEFAULTS
    parser = argparse.ArgumentParser(prog="mcce-motility", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cmd-score", help="score consecutive frame pairs")
    _add_input(p)
    _add_mask(p)
    p.add_argument("--out", required=True, help="CSV: frame_index,score,if_stable")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("extract-stable", help="write maximal stable runs as sub-sequences")
    _add_input(p)
    _add_mask(p)
    p.add_argument("--min-length", type=int, default=5, help="shortest run kept (default: %(default)s)")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_extract_stable)

    p = sub.add_parser("sweep-threshold", help="mean stable-run length per threshold")
    _add_input(p)
    _add_mask(p, with_threshold=False)
    p.add_argument("--thresholds", type=_parse_range, default=_parse_range("0:10000:100"),
                   help="start:stop:step (inclusive) or a,b,c (default: 0:10000:100)")
    p.add_argument("--knee-fraction", type=float, default=0.25,
                   help="slope fraction marking the knee (default: %(default)s)")
    p.add_argument("--out", required=True, help="CSV: threshold,run_count,mean_run_length")
    p.set_defaults(func=cmd_sweep_threshold)

    p = sub.add_parser("classify", help="per-frame Wave/Nowave predictions")
    _add_input(p)
    _add_mask(p)
    p.add_argument("--classifier", choices=("heuristic", "replay"), default="heuristic")
    p.add_argument("--replay-file", help="CSV frame_index,score[,label] for --classifier replay")
    p.add_argument("--window", type=int, default=d.window, help="frames per window (default: %(default)s)")
    p.add_argument("--stride", type=int, default=1, help="frames between window starts (default: %(default)s)")
    p.add_argument("--anchor", type=int, default=None,
                   help="window position that receives the label (default: last frame)")
    p.add_argument("--gate", action="store_true", help="carry predictions forward over unstable frames")
    p.add_argument("--out", required=True, help="CSV: frame_index,score,label,gated")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", help="accuracy, F1 and AUC of predictions")
    p.add_argument("--pred", required=True, help="CSV with frame_index,score[,label]")
    p.add_argument("--truth", required=True, help="CSV with frame_index and label or wave_active")
    p.add_argument("--out", required=True, help="metrics JSON")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("detect-period", help="contraction period from the interval score curve")
    _add_input(p)
    _add_mask(p, with_threshold=False)
    p.add_argument("--interval-min", type=float, default=d.interval_min, help="seconds (default: %(default)s)")
    p.add_argument("--interval-max", type=float, default=d.interval_max, help="seconds (default: %(default)s)")
    p.add_argument("--interval-step", type=float, default=d.interval_step, help="seconds (default: %(default)s)")
    p.add_argument("--tl", type=float, default=d.t_l, help="shortest plausible period, s (default: %(default)s)")
    p.add_argument("--tr", type=float, default=d.t_r, help="longest plausible period, s (default: %(default)s)")
    p.add_argument("--phase-average", action="store_true",
                   help="average hops from every start offset, not just frame 0")
    p.add_argument("--out", help="CSV: interval_s,mean_score,pair_count")
    p.add_argument("--summary", help="JSON: period_s,t_l,t_r,status")
    p.set_defaults(func=cmd_detect_period)

    p = sub.add_parser("period-error", help="100 * |detected - counted| / counted")
    p.add_argument("--detected", type=float, required=True)
    p.add_argument("--counted", type=float, required=True)
    p.set_defaults(func=cmd_period_error)

    p = sub.add_parser("error-summary", help="mean, std, median, max, min of period errors")
    p.add_argument("--in", dest="input", required=True, help="CSV of errors (column 'error' or first column)")
    p.add_argument("--out", help="stats JSON")
    p.set_defaults(func=cmd_error_summary)

    p = sub.add_parser("synth", help="generate a synthetic sequence with known period")
    p.add_argument("--mode", choices=MODES, default=SINUSOID)
    p.add_argument("--period", type=float, default=20.0, help="seconds (default: %(default)s)")
    p.add_argument("--duration", type=float, default=120.0, help="seconds (default: %(default)s)")
    p.add_argument("--fps", type=float, default=d.fps, help="(default: %(default)s)")
    p.add_argument("--size", type=int, default=d.size, help="frame width and height (default: %(default)s)")
    p.add_argument("--amplitude", type=float, default=64.0, help="(default: %(default)s)")
    p.add_argument("--jitter-p", type=float, default=0.0, help="shake probability per frame (default: %(default)s)")
    p.add_argument("--jitter-max", type=int, default=8, help="largest shake, px (default: %(default)s)")
    p.add_argument("--jitter-min", type=int, default=4, help="smallest shake, px (default: %(default)s)")
    p.add_argument("--noise", type=float, default=0.0, help="Gaussian noise sigma (default: %(default)s)")
    p.add_argument("--mucus-count", type=int, default=0)
    p.add_argument("--mucus-radius", type=float, default=6.0)
    p.add_argument("--mucus-drift", type=float, default=1.0, help="px per frame")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--truth", help="CSV: frame_index,wave_active,jittered")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "classify" and args.classifier == "replay" and not args.replay_file:
        parser.error("--replay-file is required with --classifier replay")
    try:
        return args.func(args)
    except (MotilityError, ValueError, OSError) as exc:
        code = exc.code if isinstance(exc, MotilityError) else type(exc).__name__
        print(json.dumps({"error": code, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
