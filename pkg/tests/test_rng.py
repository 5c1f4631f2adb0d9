import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from mcce_motility.rng import GAMMA, SplitMix64, derive_seed, mix64

M = (1 << 64) - 1


def reference(seed, n):
    """Scalar SplitMix64 with Python integers."""
    out = []
    for _ in range(n):
        seed = (seed + GAMMA) & M
        z = seed
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M
        out.append(z ^ (z >> 31))
    return out


def test_known_first_output():
    assert int(SplitMix64(0).next_u64(1)[0]) == 0xE220A8397B1DCDAF


@given(st.integers(0, M), st.integers(1, 20))
def test_vectorised_matches_scalar(seed, n):
    r = SplitMix64(seed)
    got = [int(v) for v in r.next_u64(n)] + [int(v) for v in r.next_u64(3)]
    assert got == reference(seed, n + 3)


def test_uniform_and_normal_ranges():
    u = SplitMix64(1).uniform(100_000)
    assert u.min() >= 0 and u.max() < 1 and abs(u.mean() - 0.5) < 0.01
    z = SplitMix64(2).normal(100_000)
    assert abs(z.mean()) < 0.02 and abs(z.std() - 1) < 0.02 and np.isfinite(z).all()


def test_integers_inclusive():
    v = SplitMix64(3).integers(-2, 2, 10_000)
    assert set(v.tolist()) == {-2, -1, 0, 1, 2}


def test_derive_seed_streams_differ():
    seeds = {derive_seed(7, k, t) for k in range(1, 5) for t in range(50)}
    assert len(seeds) == 200
    assert derive_seed(7) == 7
    assert mix64(0) == 0
