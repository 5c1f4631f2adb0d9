"""Acceptance criteria, one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -s`` to see the report lines, or
``python3 tests/test_acceptance.py`` for the report alone.
"""

import math
import time

import numpy as np
import pytest

from mcce_motility.frames import Frame
from mcce_motility.metrics import auc_pairs, auc_trapezoid, evaluate_scores
from mcce_motility.motion import (
    DEFAULT_MASK,
    DEFAULT_THRESHOLD,
    classify_stability,
    pair_scores,
    scaled_threshold,
    score_sequence,
)
from mcce_motility.period import detect_period, error_summary, period_error
from mcce_motility.pipeline import LabeledPrediction, gate_predictions
from mcce_motility.stable import runs_from_flags, sweep_scores
from mcce_motility.synth import Jitter, SynthSpec, generate



def report(name: str, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, detail


def test_period_error_reproduction():
    e = period_error(17.5, 19.2)
    report("period_error(17.5, 19.2)", abs(e - 8.85) <= 0.01, f"{e:.4f}% (target 8.85 +/- 0.01)")


def test_synthetic_period_recovery():
    t0 = time.perf_counter()
    seq = generate(SynthSpec(width=480, height=480, fps=2, duration_s=120, period_s=20, seed=7)).sequence
    est = detect_period(seq)
    elapsed = time.perf_counter() - t0
    at20 = est.curve.at(20.0).mean_score
    # Zero residual everywhere still collects the mask weight of bin 0.
    floor = 480 * 480 * DEFAULT_MASK.weights[0]
    ok = est.period_s == 20.0 and at20 == pytest.approx(floor, rel=1e-9) and elapsed < 60
    report("480px sinusoid period", ok,
           f"period {est.period_s} s, curve(20 s) = {at20:.3g} (zero-residual floor {floor:.3g}), {elapsed:.1f} s")


def test_period_recovery_under_noise():
    found = []
    for seed in range(10):
        spec = SynthSpec(width=480, height=480, noise_sigma=4.0, jitter=Jitter(0.05), seed=seed)
        found.append(detect_period(generate(spec).sequence).period_s)
    hits = sum(abs(p - 20.0) <= 1.0 for p in found)
    report("noisy period recovery", hits >= 9, f"{hits}/10 within 20 +/- 1 s, detected {found}")


def test_cmd_correctness():
    # Independent oracle: weights from a plain loop, no numpy.
    g = [math.exp(-((b - 128) ** 2) / 800.0) for b in range(256)]
    expected = 230400 * g[128] / math.fsum(g)
    a = Frame(np.zeros((480, 480), np.uint8))
    b = Frame(np.full((480, 480), 128, np.uint8))
    diff = classify_stability(a, b, threshold=DEFAULT_THRESHOLD)
    same = classify_stability(a, a, threshold=DEFAULT_THRESHOLD)
    s_diff, s_same = diff.score, same.score
    ok = abs(s_diff - expected) <= 0.01 * expected and not diff.if_stable and same.if_stable
    report("CMD oracle", ok, f"score {s_diff:.4f} vs oracle {expected:.4f}, identical frames {s_same:.3g}")


def test_cmd_jitter_discrimination():
    agree = total = 0
    for seed in range(4):
        spec = SynthSpec(width=480, height=480, noise_sigma=4.0, jitter=Jitter(0.2), seed=100 + seed)
        out = generate(spec)
        verdicts = score_sequence(out.sequence, threshold=scaled_threshold(480, 480))
        flagged = np.array([not v.if_stable for v in verdicts])
        agree += int(np.sum(flagged == out.jittered[1:]))
        total += len(flagged)
    rate = agree / total
    report("CMD jitter discrimination", rate >= 0.95, f"{agree}/{total} pairs agree ({rate:.2%})")


def check_gating_case(scores, flags):
    raw = [LabeledPrediction.from_score(k, s) for k, s in enumerate(scores)]
    flags = [True] + list(flags[1:])
    gated = gate_predictions(raw, flags)
    if gate_predictions(gated, flags) != gated:
        return False
    for k, (g, r, ok) in enumerate(zip(gated, raw, flags)):
        if ok and g != r:
            return False
        src = max(j for j in range(k + 1) if flags[j])
        if (g.score, g.label) != (raw[src].score, raw[src].label) or g.gated == ok:
            return False
    return True


def test_gating_semantics():
    rng = np.random.default_rng(2024)
    cases = 1200
    failures = 0
    for _ in range(cases):
        n = int(rng.integers(1, 60))
        p_stable = rng.uniform(0, 1)
        scores = rng.choice([0.0, 0.25, 0.5, 0.75, 1.0], n) if rng.uniform() < 0.3 else rng.uniform(0, 1, n)
        failures += not check_gating_case(scores.tolist(), (rng.uniform(0, 1, n) < p_stable).tolist())
    report("gating properties", failures == 0, f"{cases - failures}/{cases} random fixtures hold")


def test_metric_oracles():
    rng = np.random.default_rng(99)
    worst = 0.0
    exact = True
    for _ in range(1000):
        n = int(rng.integers(2, 80))
        truth = rng.uniform(0, 1, n) < rng.uniform(0.1, 0.9)
        truth[0], truth[1] = True, False
        scores = np.round(rng.uniform(0, 1, n), int(rng.integers(1, 4)))  # coarse rounding makes ties
        worst = max(worst, abs(auc_pairs(scores, truth) - auc_trapezoid(scores, truth)))
        pred = scores >= 0.5
        tp = fp = tn = fn = 0
        for p, t in zip(pred, truth):
            tp += p and t
            fp += p and not t
            tn += not p and not t
            fn += t and not p
        m = evaluate_scores(scores, truth)
        f1 = 2 * tp / (2 * tp + fp + fn) if tp + fp + fn else 0.0
        exact &= (m.tp, m.fp, m.tn, m.fn) == (tp, fp, tn, fn) and m.accuracy == (tp + tn) / n and m.f1 == f1
    report("metric oracles", worst <= 1e-9 and exact,
           f"max |AUC_pairs - AUC_trapezoid| = {worst:.2e} over 1000 sets, F1/accuracy exact: {exact}")


def test_threshold_sweep_monotonicity():
    thresholds = [100.0 * k for k in range(101)]
    ok = True
    checked = 0
    for seed in range(3):
        spec = SynthSpec(width=96, height=96, noise_sigma=3.0, jitter=Jitter(0.3), seed=seed, duration_s=60)
        raw = pair_scores(generate(spec).sequence)
        scale = scaled_threshold(96, 96) / DEFAULT_THRESHOLD
        grid = [t * scale for t in thresholds]
        grid += [float(raw.max()) + 1.0] if raw.max() + 1.0 > grid[-1] else []
        sweep = sweep_scores(raw, grid)
        means = [p.mean_run_length for p in sweep]
        ok &= all(b >= a for a, b in zip(means, means[1:]))
        ok &= all(p.mean_run_length == len(raw) + 1 for p in sweep if p.threshold >= raw.max())
        checked += len(sweep)
    rng = np.random.default_rng(5)
    for _ in range(200):
        raw = rng.exponential(rng.uniform(10, 3000), int(rng.integers(1, 100)))
        sweep = sweep_scores(raw, thresholds)
        means = [p.mean_run_length for p in sweep]
        ok &= all(b >= a for a, b in zip(means, means[1:]))
        ok &= all(p.mean_run_length == len(raw) + 1 for p in sweep if p.threshold >= raw.max())
        ok &= all(p.run_count == len(runs_from_flags(raw <= p.threshold)) for p in sweep[::10])
        checked += len(sweep)
    report("threshold sweep monotonicity", bool(ok), f"{checked} sweep points monotone, saturated at N above max score")


def test_error_statistics():
    s = error_summary([1, 2, 3, 4])
    ok = s["mean"] == 2.5 and s["median"] == 2.5 and s["std"] == math.sqrt(1.25)
    report("error_summary([1,2,3,4])", ok, f"mean {s['mean']}, std {s['std']:.6f}, median {s['median']}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
