"""Synthetic capsule-video sequences with known contraction period.

Every random draw goes through :mod:`mcce_motility.rng` streams keyed by
``(seed, purpose, frame)``, so a frame is a pure function of the spec and its
time index and output is bit-identical across platforms.

Two wave models are available:

``sinusoid``
    ``I(x, t) = B(x) + A sin(2 pi t / P + phi(x))`` over a fixed textured base
    ``B`` and a radial phase map ``phi``. Exactly periodic when ``P * fps`` is
    whole and there is no noise or jitter.
``traveling_ring``
    A dark Gaussian-profile annulus that sweeps from the rim to the centre
    during the first ``active_fraction`` of each period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .frames import DEFAULT_FPS, DEFAULT_SIZE, Frame, FrameSequence
from .rng import SplitMix64, derive_seed

SINUSOID = "sinusoid"
TRAVELING_RING = "traveling_ring"
MODES = (SINUSOID, TRAVELING_RING)

# Stream keys for derive_seed.
_TEXTURE, _NOISE, _JITTER, _MUCUS = 1, 2, 3, 4

BASE_LEVEL = 128.0


@dataclass(frozen=True)
class Jitter:
    """Transient camera shake: a selected frame is translated by a random offset.

    The larger axis of the offset is between ``min_shift`` and ``max_shift``
    pixels. Frame 0 is never shaken.
    """

    probability: float
    max_shift: int = 8
    min_shift: int = 4

    def __post_init__(self):
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError("jitter probability must be in [0, 1]")
        if not 1 <= self.min_shift <= self.max_shift:
            raise ValueError("jitter shifts need 1 <= min_shift <= max_shift")


@dataclass(frozen=True)
class Mucus:
    """Bright discs drifting across the scene (mucus clusters)."""

    count: int = 3
    radius: float = 6.0
    drift: float = 1.0
    intensity: int = 240

    def __post_init__(self):
        if self.count < 0 or self.radius <= 0 or self.drift < 0:
            raise ValueError("mucus needs count >= 0, radius > 0, drift >= 0")
        if not 0 <= self.intensity <= 255:
            raise ValueError("mucus intensity must be in [0, 255]")


@dataclass(frozen=True)
class SynthSpec:
    mode: str = SINUSOID
    width: int = DEFAULT_SIZE
    height: int = DEFAULT_SIZE
    fps: float = DEFAULT_FPS
    duration_s: float = 120.0
    period_s: float = 20.0
    amplitude: float = 64.0
    jitter: Jitter | None = None
    noise_sigma: float = 0.0
    mucus: Mucus | None = None
    seed: int = 0
    # Texture of the static base: B = 128 + texture_contrast * tex, tex in [-1, 1].
    texture_contrast: float = 63.0
    texture_scale: float = 8.0
    # Radial wavelength (px) of the sinusoid phase map: concentric bands move outward.
    phase_wavelength: float = 16.0
    active_fraction: float = 0.5
    ring_width: float | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.width < 1 or self.height < 1:
            raise ValueError("frame size must be positive")
        if not self.fps > 0:
            raise ValueError("fps must be positive")
        if not self.period_s > 0:
            raise ValueError("period_s must be positive")
        if self.duration_s < self.period_s:
            raise ValueError("duration_s must be at least period_s")
        if not 0 <= self.amplitude <= 127:
            raise ValueError("amplitude must be in [0, 127]")
        if self.texture_contrast < 0 or BASE_LEVEL + self.texture_contrast + self.amplitude > 255:
            raise ValueError("base intensity plus amplitude exceeds 255")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")
        if not 0 < self.active_fraction <= 1:
            raise ValueError("active_fraction must be in (0, 1]")
        if self.texture_scale <= 0 or self.phase_wavelength <= 0:
            raise ValueError("texture_scale and phase_wavelength must be positive")

    @property
    def n_frames(self) -> int:
        return int(round(self.duration_s * self.fps))

    @property
    def period_frames(self) -> float:
        return self.period_s * self.fps


@dataclass
class SynthOutput:
    sequence: FrameSequence
    wave_active: np.ndarray
    jittered: np.ndarray
    offsets: np.ndarray = field(repr=False)


def _radius_map(height: int, width: int) -> tuple[np.ndarray, float]:
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    cy, cx = (height - 1) / 2.0, (width - 1) / 2.0
    r = np.hypot(yy - cy, xx - cx)
    return r, min(height, width) / 2.0


def base_texture(spec: SynthSpec) -> np.ndarray:
    """Static textured background, float64 ``(height, width)``.

    Value noise on a ``texture_scale`` lattice, bilinearly interpolated and
    pushed through tanh so folds have soft but distinct edges.
    """
    h, w, cell = spec.height, spec.width, spec.texture_scale
    gh, gw = int(math.ceil(h / cell)) + 2, int(math.ceil(w / cell)) + 2
    lattice = SplitMix64(derive_seed(spec.seed, _TEXTURE)).uniform(gh * gw).reshape(gh, gw)
    y = np.arange(h) / cell
    x = np.arange(w) / cell
    y0, x0 = np.floor(y).astype(int), np.floor(x).astype(int)
    fy, fx = (y - y0)[:, None], (x - x0)[None, :]
    v00 = lattice[np.ix_(y0, x0)]
    v01 = lattice[np.ix_(y0, x0 + 1)]
    v10 = lattice[np.ix_(y0 + 1, x0)]
    v11 = lattice[np.ix_(y0 + 1, x0 + 1)]
    v = (v00 * (1 - fx) + v01 * fx) * (1 - fy) + (v10 * (1 - fx) + v11 * fx) * fy
    sharp = 4.0
    tex = np.tanh(sharp * (2.0 * v - 1.0)) / math.tanh(sharp)
    return BASE_LEVEL + spec.texture_contrast * tex


def phase_fraction(spec: SynthSpec, t: int) -> float:
    """Position of frame ``t`` within its period, in [0, 1).

    Computed as ``(t mod P*fps) / (P*fps)`` so frames a whole number of periods
    apart get the identical phase, bit for bit.
    """
    pf = spec.period_frames
    return (t % pf) / pf


def wave_active(spec: SynthSpec, t: int) -> bool:
    frac = phase_fraction(spec, t)
    if spec.mode == TRAVELING_RING:
        return frac < spec.active_fraction
    return frac >= 0.5


def jitter_offsets(spec: SynthSpec) -> np.ndarray:
    """``(N, 2)`` integer (dy, dx) camera offsets, (0, 0) when not shaken.

    Consecutive offsets always differ by at least ``min_shift`` on some axis:
    a shaken frame too close to its predecessor's offset is mirrored.
    """
    n = spec.n_frames
    out = np.zeros((n, 2), dtype=np.int64)
    j = spec.jitter
    if j is None or j.probability == 0:
        return out
    for t in range(1, n):
        u = SplitMix64(derive_seed(spec.seed, _JITTER, t)).uniform(4)
        if u[0] >= j.probability:
            continue
        major = j.min_shift + min(int(u[1] * (j.max_shift - j.min_shift + 1)), j.max_shift - j.min_shift)
        minor = -j.max_shift + min(int(u[2] * (2 * j.max_shift + 1)), 2 * j.max_shift)
        quadrant = min(int(u[3] * 4), 3)
        major = major if quadrant % 2 == 0 else -major
        off = (major, minor) if quadrant < 2 else (minor, major)
        prev = out[t - 1]
        if max(abs(off[0] - prev[0]), abs(off[1] - prev[1])) < j.min_shift:
            off = (-off[0], -off[1])
        out[t] = off
    return out


def _shift(img: np.ndarray, dy: int, dx: int) -> np.ndarray:
    """Translate by (dy, dx) with edge pixels replicated."""
    if dy == 0 and dx == 0:
        return img
    h, w = img.shape
    pad = max(abs(dy), abs(dx))
    padded = np.pad(img, pad, mode="edge")
    return padded[pad - dy:pad - dy + h, pad - dx:pad - dx + w]


def mucus_footprint(spec: SynthSpec, t: int) -> np.ndarray:
    """Boolean mask of pixels covered by mucus in frame ``t`` (before shake)."""
    h, w = spec.height, spec.width
    mask = np.zeros((h, w), dtype=bool)
    m = spec.mucus
    if m is None or m.count == 0:
        return mask
    u = SplitMix64(derive_seed(spec.seed, _MUCUS)).uniform(3 * m.count).reshape(m.count, 3)
    yy, xx = np.mgrid[0:h, 0:w]
    for cy0, cx0, ang in u:
        theta = 2.0 * math.pi * ang
        cy = (cy0 * h + t * m.drift * math.sin(theta)) % h
        cx = (cx0 * w + t * m.drift * math.cos(theta)) % w
        mask |= (yy - cy) ** 2 + (xx - cx) ** 2 <= m.radius ** 2
    return mask


class _Renderer:
    def __init__(self, spec: SynthSpec):
        self.spec = spec
        self.base = base_texture(spec)
        self.r, self.r_max = _radius_map(spec.height, spec.width)
        self.phase = -2.0 * math.pi * self.r / spec.phase_wavelength
        self.ring_width = spec.ring_width or self.r_max / 16.0

    def scene(self, t: int) -> np.ndarray:
        spec = self.spec
        frac = phase_fraction(spec, t)
        if spec.mode == SINUSOID:
            img = self.base + spec.amplitude * np.sin(2.0 * math.pi * frac + self.phase)
        elif frac < spec.active_fraction:
            rho = self.r_max * (1.0 - frac / spec.active_fraction)
            img = self.base - spec.amplitude * np.exp(-((self.r - rho) ** 2) / (2.0 * self.ring_width ** 2))
        else:
            img = self.base.copy()
        if spec.mucus is not None:
            img = np.where(mucus_footprint(spec, t), float(spec.mucus.intensity), img)
        return img

    def frame(self, t: int, offset) -> np.ndarray:
        img = _shift(self.scene(t), int(offset[0]), int(offset[1]))
        if self.spec.noise_sigma > 0:
            rng = SplitMix64(derive_seed(self.spec.seed, _NOISE, t))
            img = img + self.spec.noise_sigma * rng.normal(img.size).reshape(img.shape)
        return np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)


def generate(spec: SynthSpec) -> SynthOutput:
    """Render the full sequence and its per-frame ground truth.

    ``jittered[t]`` is true when the camera offset of frame ``t`` differs from
    that of frame ``t - 1``: both the shaken frame and the frame where the view
    snaps back are captured across a camera movement.
    """
    renderer = _Renderer(spec)
    offsets = jitter_offsets(spec)
    frames = tuple(Frame(renderer.frame(t, offsets[t]), t) for t in range(spec.n_frames))
    jittered = np.zeros(spec.n_frames, dtype=bool)
    jittered[1:] = np.any(offsets[1:] != offsets[:-1], axis=1)
    active = np.array([wave_active(spec, t) for t in range(spec.n_frames)], dtype=bool)
    return SynthOutput(FrameSequence(frames, spec.fps), active, jittered, offsets)
