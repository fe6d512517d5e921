"""Binary netpbm (P5/P6, maxval 255) reading and writing.

Images live in memory as ``RasterImage`` wrapping a ``(height, width,
channels)`` uint8 array; binary watermarks as ``BinaryImage`` wrapping a
``(height, width)`` array of 0/1.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ImageFormatError, ParameterError

_WHITESPACE = b" \t\n\r\v\f"
_MAGIC_CHANNELS = {b"P5": 1, b"P6": 3}


@dataclass(frozen=True, eq=False)
class RasterImage:
    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim == 2:
            px = px[:, :, None]
        if px.ndim != 3 or px.shape[2] not in (1, 3):
            raise ParameterError(f"pixel array must be (h, w, 1|3), got {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ParameterError("image dimensions must be >= 1")
        if px.dtype != np.uint8:
            if px.size and (px.min() < 0 or px.max() > 255):
                raise ParameterError("samples must lie in [0, 255]")
            px = px.astype(np.uint8)
        px = np.ascontiguousarray(px)
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    @property
    def samples(self) -> bytes:
        """Row-major, channel-interleaved sample bytes (file order)."""
        return self.pixels.tobytes()

    def __eq__(self, other):
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def __repr__(self):
        return f"RasterImage({self.width}x{self.height}x{self.channels})"


@dataclass(frozen=True, eq=False)
class BinaryImage:
    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits)
        if b.ndim != 2 or b.shape[0] < 1 or b.shape[1] < 1:
            raise ParameterError(f"bit array must be 2-D and non-empty, got {b.shape}")
        if b.size and not np.isin(b, (0, 1)).all():
            raise ParameterError("bits must be 0 or 1")
        b = np.ascontiguousarray(b, dtype=np.uint8)
        b.flags.writeable = False
        object.__setattr__(self, "bits", b)

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def __eq__(self, other):
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(
            np.array_equal(self.bits, other.bits)
        )

    def __repr__(self):
        return f"BinaryImage({self.width}x{self.height}, ones={int(self.bits.sum())})"


def _skip_space_and_comments(data: bytes, pos: int) -> int:
    while pos < len(data):
        ch = data[pos : pos + 1]
        if ch in (b"#",):
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
        elif ch and ch in _WHITESPACE:
            pos += 1
        else:
            break
    return pos


def _read_int(data: bytes, pos: int, name: str) -> tuple[int, int]:
    pos = _skip_space_and_comments(data, pos)
    start = pos
    while pos < len(data) and data[pos : pos + 1].isdigit():
        pos += 1
    if pos == start:
        raise ImageFormatError(f"expected integer {name} in header", start)
    return int(data[start:pos]), pos


def read_image(data: bytes) -> RasterImage:
    """Parse a binary PGM (P5) or PPM (P6) file with maxval 255."""
    data = bytes(data)
    magic = data[:2]
    if magic not in _MAGIC_CHANNELS:
        raise ImageFormatError(f"bad magic number {magic!r}, expected P5 or P6", 0)
    channels = _MAGIC_CHANNELS[magic]
    pos = 2
    if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE and data[pos : pos + 1] != b"#":
        raise ImageFormatError("missing whitespace after magic number", pos)

    width, pos = _read_int(data, pos, "width")
    height, pos = _read_int(data, pos, "height")
    maxval_at = _skip_space_and_comments(data, pos)
    maxval, pos = _read_int(data, pos, "maxval")
    if width == 0 or height == 0:
        raise ImageFormatError(f"zero dimension {width}x{height}", maxval_at)
    if maxval != 255:
        raise ImageFormatError(f"unsupported maxval {maxval}, only 255 allowed", maxval_at)
    if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE:
        raise ImageFormatError("missing single whitespace before pixel data", pos)
    pos += 1

    need = width * height * channels
    have = len(data) - pos
    if have < need:
        raise ImageFormatError(
            f"truncated pixel data: need {need} bytes, found {have}", len(data)
        )
    px = np.frombuffer(data, dtype=np.uint8, count=need, offset=pos)
    return RasterImage(px.reshape(height, width, channels).copy())


def write_image(img: RasterImage) -> bytes:
    magic = "P5" if img.channels == 1 else "P6"
    header = f"{magic}\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.samples


def load(path) -> RasterImage:
    return read_image(Path(path).read_bytes())


def save(path, img: RasterImage) -> None:
    Path(path).write_bytes(write_image(img))


def to_gray(img: RasterImage) -> RasterImage:
    """Integer luminance round((77R + 150G + 29B) / 256); gray input is returned as is."""
    if img.channels == 1:
        return img
    px = img.pixels.astype(np.uint32)
    y = (77 * px[..., 0] + 150 * px[..., 1] + 29 * px[..., 2] + 128) >> 8
    return RasterImage(y.astype(np.uint8))


def to_binary(img: RasterImage, threshold: int = 128) -> BinaryImage:
    if img.channels != 1:
        raise ParameterError("to_binary needs a grayscale image; convert with to_gray first")
    if not 0 <= threshold <= 255:
        raise ParameterError(f"threshold {threshold} outside [0, 255]")
    return BinaryImage((img.pixels[..., 0] >= threshold).astype(np.uint8))


def from_binary(wm: BinaryImage) -> RasterImage:
    """Render a binary image as a black/white grayscale raster (1 -> 255)."""
    return RasterImage((wm.bits * 255).astype(np.uint8))
