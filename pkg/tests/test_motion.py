import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcce_motility.errors import DimensionMismatch, SequenceTooShort
from mcce_motility.frames import Frame, FrameSequence
from mcce_motility.motion import (
    DEFAULT_MASK,
    GaussianMask,
    MotionScore,
    classify_stability,
    cmd_score,
    residual_histogram,
    scaled_threshold,
    score_sequence,
)

from conftest import const_frame, seq_of

# Direct summation with the math module; frozen from that oracle.
W0 = 2.5440701412212646e-11
W128 = 0.019947114023197977
S_ALL_128 = 4595.815070944814
S_10000 = 199.47114583911036


def oracle_weights(mu, sigma):
    g = [math.exp(-((b - mu) ** 2) / (2 * sigma * sigma)) for b in range(256)]
    z = math.fsum(g)
    return [x / z for x in g]


def oracle_histogram(a, b):
    bins = [0] * 256
    for x, y in zip(a.intensities.tolist(), b.intensities.tolist()):
        bins[abs(x - y)] += 1
    return bins


def test_default_mask_matches_direct_sum():
    w = DEFAULT_MASK.weights
    assert w[0] == pytest.approx(W0, rel=1e-9)
    assert w[128] == pytest.approx(W128, rel=1e-12)
    assert w.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(w, oracle_weights(128, 20), rtol=1e-10, atol=0)


@pytest.mark.parametrize("mu,sigma", [(0, 1), (128, 20), (255, 0.3), (64.5, 300), (300, 5)])
def test_mask_unit_sum_and_shape(mu, sigma):
    w = GaussianMask(mu, sigma).weights
    assert len(w) == 256 and np.all(w >= 0)
    assert abs(w.sum() - 1) <= 1e-12
    b = np.arange(256)
    peak = int(np.argmax(w))
    ratio = w / w[peak]
    expected = np.exp(-((b - mu) ** 2 - (peak - mu) ** 2) / (2 * sigma**2))
    assert np.allclose(ratio, expected, rtol=1e-9, atol=1e-300)


def test_mask_rejects_bad_sigma():
    with pytest.raises(ValueError):
        GaussianMask(128, 0)


def test_histogram_identical():
    f = Frame(np.random.default_rng(1).integers(0, 256, (6, 7), dtype=np.uint8))
    h = residual_histogram(f, f)
    assert h[0] == 42 and h[1:].sum() == 0


def test_histogram_extreme():
    h = residual_histogram(const_frame(0), const_frame(255))
    assert h[255] == 64 and h.sum() == 64


def test_histogram_checkerboard():
    board = (np.indices((8, 8)).sum(axis=0) % 2 * 128).astype(np.uint8)
    h = residual_histogram(const_frame(0), Frame(board))
    assert h[0] == 32 and h[128] == 32 and h.sum() == 64


def test_histogram_matches_pixel_loop(rng):
    a = Frame(rng.integers(0, 256, (9, 11), dtype=np.uint8))
    b = Frame(rng.integers(0, 256, (9, 11), dtype=np.uint8))
    assert residual_histogram(a, b).tolist() == oracle_histogram(a, b)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        residual_histogram(const_frame(0, 8), const_frame(0, 9))
    with pytest.raises(DimensionMismatch):
        cmd_score(const_frame(0, 8), const_frame(0, 8, width=9))


def big_pair(n_diff):
    a = np.zeros((480, 480), np.uint8)
    b = a.copy()
    b.reshape(-1)[:n_diff] = 128
    return Frame(a), Frame(b, 1)


def test_cmd_score_identical_480():
    f = Frame(np.full((480, 480), 90, np.uint8))
    assert cmd_score(f, f) == pytest.approx(230400 * W0, rel=1e-9)
    assert cmd_score(f, f) < 1e-5


def test_cmd_score_all_differ_by_128():
    a, b = big_pair(230400)
    assert cmd_score(a, b) == pytest.approx(S_ALL_128, rel=1e-12)


def test_cmd_score_10000_pixels():
    a, b = big_pair(10000)
    assert cmd_score(a, b) == pytest.approx(S_10000, rel=1e-12)


def test_classify_stability_examples():
    f = Frame(np.full((480, 480), 90, np.uint8))
    assert classify_stability(f, f, threshold=200).if_stable
    a, b = big_pair(230400)
    v = classify_stability(a, b, threshold=200)
    assert not v.if_stable and v.score == pytest.approx(S_ALL_128)
    a, b = big_pair(10000)
    v = classify_stability(a, b, threshold=200)
    assert v.if_stable and v.score < 200


def test_boundary_is_inclusive():
    assert MotionScore(200.0, 200.0).if_stable
    assert not MotionScore(200.0000001, 200.0).if_stable
    with pytest.raises(ValueError):
        classify_stability(const_frame(0), const_frame(0), threshold=0)


A = np.zeros((16, 16), np.uint8)
B = np.full((16, 16), 128, np.uint8)
T_SMALL = scaled_threshold(16, 16)


def test_score_sequence_identical():
    v = score_sequence(seq_of(A, A, A, A, A), threshold=T_SMALL)
    assert len(v) == 4 and all(s.if_stable for s in v)
    assert [s.frame_index for s in v] == [1, 2, 3, 4]


def test_score_sequence_alternating():
    v = score_sequence(seq_of(A, B, A, B), threshold=T_SMALL)
    assert [s.if_stable for s in v] == [False, False, False]


def test_score_sequence_pairs():
    v = score_sequence(seq_of(A, A, B, B), threshold=T_SMALL)
    assert [s.if_stable for s in v] == [True, False, True]


def test_score_sequence_too_short():
    with pytest.raises(SequenceTooShort):
        score_sequence(seq_of(A))


frames_2 = st.integers(1, 6).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(0, 255), min_size=n * n, max_size=n * n),
        st.lists(st.integers(0, 255), min_size=n * n, max_size=n * n),
        st.just(n),
    )
)


@settings(max_examples=200)
@given(frames_2)
def test_symmetry_and_bounds(data):
    xa, xb, n = data
    a = Frame(np.array(xa, np.uint8).reshape(n, n))
    b = Frame(np.array(xb, np.uint8).reshape(n, n))
    s = cmd_score(a, b)
    assert s == cmd_score(b, a)
    assert 0 <= s <= n * n * DEFAULT_MASK.weights.max() * (1 + 1e-12)
    assert cmd_score(a, a) < 1e-6


@settings(max_examples=200)
@given(st.integers(1, 400), st.integers(1, 128), st.integers(0, 127))
def test_mass_shift_toward_mu_never_decreases(count, target, start):
    # Moving `count` pixels from bin `start` to a bin closer to mu (128).
    start = min(start, target - 1) if target > 0 else 0
    hist = np.zeros(256)
    hist[0] = 1000
    hist[start] += count
    moved = hist.copy()
    moved[start] -= count
    moved[target] += count
    w = DEFAULT_MASK.weights
    assert w @ moved >= w @ hist


def test_scaled_threshold():
    assert scaled_threshold(480, 480) == 200
    assert scaled_threshold(64, 64) == pytest.approx(200 * 4096 / 230400)
