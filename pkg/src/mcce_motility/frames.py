"""Grayscale frame and sequence types plus PGM/PPM directory I/O.

A sequence on disk is a directory of ``frame_NNNNNN.pgm`` files (binary P5,
maxval 255) with an optional ``meta.json`` sidecar holding fps and frame
dimensions. Color ``.ppm`` frames are accepted on load and converted to gray.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import DimensionMismatch, FrameFormatError

DEFAULT_FPS = 2.0
DEFAULT_SIZE = 480

FRAME_PATTERN = re.compile(r"^frame_(\d{6})\.(pgm|ppm|pnm)$")
META_NAME = "meta.json"


def frame_filename(index: int) -> str:
    return f"frame_{index:06d}.pgm"


@dataclass(frozen=True, eq=False)
class Frame:
    """One 8-bit grayscale frame.

    ``pixels`` is a read-only ``(height, width)`` uint8 array; ``index`` is the
    0-based position in the owning sequence.
    """

    pixels: np.ndarray
    index: int = 0

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"frame pixels must be a non-empty 2-D grid, got shape {px.shape}")
        if px.dtype != np.uint8:
            if np.issubdtype(px.dtype, np.floating) and not np.all(np.isfinite(px)):
                raise ValueError("frame intensities must be finite")
            if px.min() < 0 or px.max() > 255:
                raise ValueError("frame intensities must lie in [0, 255]")
            if not np.array_equal(px, np.round(px)):
                raise ValueError("frame intensities must be integers")
            px = px.astype(np.uint8)
        else:
            px = px.copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)
        if self.index < 0:
            raise ValueError("frame index must be non-negative")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def intensities(self) -> np.ndarray:
        """Row-major flat view of the grid."""
        return self.pixels.reshape(-1)

    def with_index(self, index: int) -> "Frame":
        return Frame(self.pixels, index)

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return self.index == other.index and np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash((self.index, self.pixels.shape, self.pixels.tobytes()))

    def __repr__(self):
        return f"Frame(index={self.index}, width={self.width}, height={self.height})"


@dataclass(frozen=True)
class FrameSequence:
    """Ordered frames of identical size, indexed 0..N-1, captured at ``fps``."""

    frames: tuple[Frame, ...] = field(default_factory=tuple)
    fps: float = DEFAULT_FPS

    def __post_init__(self):
        frames = tuple(self.frames)
        object.__setattr__(self, "frames", frames)
        if not self.fps > 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        for k, f in enumerate(frames):
            if f.index != k:
                raise ValueError(f"frame indices must be consecutive from 0; position {k} has index {f.index}")
            if f.pixels.shape != frames[0].pixels.shape:
                raise DimensionMismatch(
                    f"frame {k} is {f.width}x{f.height}, expected {frames[0].width}x{frames[0].height}"
                )

    @classmethod
    def from_arrays(cls, arrays: Sequence[np.ndarray] | np.ndarray, fps: float = DEFAULT_FPS) -> "FrameSequence":
        return cls(tuple(Frame(a, k) for k, a in enumerate(arrays)), fps)

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self) -> Iterator[Frame]:
        return iter(self.frames)

    def __getitem__(self, k):
        return self.frames[k]

    @property
    def width(self) -> int | None:
        return self.frames[0].width if self.frames else None

    @property
    def height(self) -> int | None:
        return self.frames[0].height if self.frames else None

    @property
    def duration_s(self) -> float:
        return len(self.frames) / self.fps

    def as_array(self) -> np.ndarray:
        """Stack of all frames, shape ``(N, height, width)``."""
        return np.stack([f.pixels for f in self.frames])

    def subsequence(self, start: int, length: int) -> "FrameSequence":
        """Frames ``start .. start+length-1``, re-indexed from 0."""
        chunk = self.frames[start:start + length]
        return FrameSequence(tuple(f.with_index(k) for k, f in enumerate(chunk)), self.fps)


def luma(rgb: np.ndarray) -> np.ndarray:
    """round(0.299 R + 0.587 G + 0.114 B), half rounding up, as uint8.

    A gray input (2-D, or R == G == B) maps to itself.
    """
    rgb = np.asarray(rgb)
    if rgb.ndim == 2:
        return rgb.astype(np.uint8)
    r, g, b = (rgb[..., c].astype(np.float64) for c in range(3))
    y = np.floor(0.299 * r + 0.587 * g + 0.114 * b + 0.5)
    return np.clip(y, 0, 255).astype(np.uint8)


# -- PNM codec ---------------------------------------------------------------

_MAGIC_CHANNELS = {b"P2": 1, b"P3": 3, b"P5": 1, b"P6": 3}


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping comments.

    Returns the tokens and the offset just past the single whitespace byte that
    terminates the last token.
    """
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ValueError("truncated header")
        tokens.append(data[start:pos])
    return tokens, pos + 1


def decode_pnm(data: bytes) -> np.ndarray:
    """Decode P2/P3/P5/P6 bytes to a ``(h, w)`` or ``(h, w, 3)`` uint8 array.

    Samples are rescaled to 0..255 when maxval differs from 255.
    """
    magic = data[:2]
    if magic not in _MAGIC_CHANNELS:
        raise ValueError(f"unsupported magic {magic!r}")
    channels = _MAGIC_CHANNELS[magic]
    (_, w, h, maxval), offset = _header_tokens(data, 4)
    width, height, maxval = int(w), int(h), int(maxval)
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise ValueError(f"bad header values {width}x{height} maxval {maxval}")
    count = width * height * channels
    if magic in (b"P5", b"P6"):
        dtype = np.dtype(np.uint8) if maxval < 256 else np.dtype(">u2")
        raw = data[offset:offset + count * dtype.itemsize]
        if len(raw) < count * dtype.itemsize:
            raise ValueError(f"truncated raster: expected {count * dtype.itemsize} bytes, got {len(raw)}")
        samples = np.frombuffer(raw, dtype=dtype).astype(np.int64)
    else:
        fields = data[offset:].split()
        if len(fields) < count:
            raise ValueError(f"truncated raster: expected {count} samples, got {len(fields)}")
        samples = np.array([int(x) for x in fields[:count]], dtype=np.int64)
    if samples.max(initial=0) > maxval:
        raise ValueError("sample exceeds maxval")
    if maxval != 255:
        samples = (samples * 255 + maxval // 2) // maxval
    shape = (height, width) if channels == 1 else (height, width, 3)
    return samples.astype(np.uint8).reshape(shape)


def encode_pgm(pixels: np.ndarray) -> bytes:
    pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
    h, w = pixels.shape
    return b"P5\n%d %d\n255\n" % (w, h) + pixels.tobytes()


def read_frame(path: str | Path, index: int = 0) -> Frame:
    path = Path(path)
    try:
        arr = decode_pnm(path.read_bytes())
    except (OSError, ValueError) as exc:
        raise FrameFormatError(f"{path.name}: cannot decode ({exc})") from exc
    return Frame(luma(arr), index)


def write_frame(frame: Frame, path: str | Path) -> None:
    Path(path).write_bytes(encode_pgm(frame.pixels))


# -- sequence directories ----------------------------------------------------

def read_meta(path: str | Path) -> dict:
    meta_path = Path(path) / META_NAME
    if not meta_path.is_file():
        return {}
    try:
        return json.loads(meta_path.read_text())
    except (OSError, ValueError) as exc:
        raise FrameFormatError(f"{META_NAME}: unreadable ({exc})") from exc


def load_sequence(path: str | Path, fps: float | None = None) -> FrameSequence:
    """Load every ``frame_NNNNNN`` file in ``path`` in index order.

    ``fps`` overrides the sidecar value; with neither, 2 fps is assumed.
    """
    path = Path(path)
    if not path.is_dir():
        raise FrameFormatError(f"{path}: not a directory")
    entries = []
    for p in path.iterdir():
        m = FRAME_PATTERN.match(p.name)
        if m:
            entries.append((int(m.group(1)), p))
    if not entries:
        raise FrameFormatError(f"{path}: no frame_NNNNNN.pgm files found")
    entries.sort()
    seen = [i for i, _ in entries]
    if len(set(seen)) != len(seen):
        dup = next(i for i in seen if seen.count(i) > 1)
        raise FrameFormatError(f"duplicate frame index {dup:06d}")
    for k, (i, p) in enumerate(entries):
        if i != k:
            raise FrameFormatError(f"missing frame {k:06d} (next file is {p.name})")

    meta = read_meta(path)
    frames = []
    for k, p in entries:
        frame = read_frame(p, k)
        if frames and frame.pixels.shape != frames[0].pixels.shape:
            raise FrameFormatError(
                f"{p.name}: dimension mismatch, {frame.width}x{frame.height} vs "
                f"{frames[0].width}x{frames[0].height}"
            )
        frames.append(frame)
    if "width" in meta and "height" in meta:
        if (int(meta["width"]), int(meta["height"])) != (frames[0].width, frames[0].height):
            raise FrameFormatError(
                f"{META_NAME}: declares {meta['width']}x{meta['height']} but frames are "
                f"{frames[0].width}x{frames[0].height}"
            )
    if fps is None:
        fps = float(meta.get("fps", DEFAULT_FPS))
    return FrameSequence(tuple(frames), fps)


def save_sequence(seq: FrameSequence, path: str | Path, extra_meta: dict | None = None) -> int:
    """Write ``seq`` as PGM frames plus ``meta.json``; returns the frame count."""
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
        for frame in seq:
            write_frame(frame, path / frame_filename(frame.index))
        if len(seq):
            meta = {"fps": seq.fps, "width": seq.width, "height": seq.height}
            meta.update(extra_meta or {})
            (path / META_NAME).write_text(json.dumps(meta, indent=2) + "\n")
    except OSError as exc:
        raise FrameFormatError(f"{path}: cannot write ({exc})") from exc
    return len(seq)
