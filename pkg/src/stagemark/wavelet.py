"""Orthonormal 2-D Haar transform, multi-level pyramids and self-derived watermarks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .imageio import BinaryImage, RasterImage, to_gray


def dwt2(x):
    """One Haar level on an even-sized grid.

    For each 2x2 block [p q; r s]:
    LL=(p+q+r+s)/2, LH=(p-q+r-s)/2, HL=(p+q-r-s)/2, HH=(p-q-r+s)/2.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise ParameterError("empty image")
    if x.ndim != 2 or x.shape[0] % 2 or x.shape[1] % 2:
        raise ParameterError(f"dwt2 needs an even-sized 2-D grid, got {x.shape}")
    p = x[0::2, 0::2]
    q = x[0::2, 1::2]
    r = x[1::2, 0::2]
    s = x[1::2, 1::2]
    return (
        (p + q + r + s) / 2,
        (p - q + r - s) / 2,
        (p + q - r - s) / 2,
        (p - q - r + s) / 2,
    )


def idwt2(ll, lh, hl, hh):
    h, w = ll.shape
    out = np.empty((2 * h, 2 * w), dtype=np.float64)
    out[0::2, 0::2] = (ll + lh + hl + hh) / 2
    out[0::2, 1::2] = (ll - lh + hl - hh) / 2
    out[1::2, 0::2] = (ll + lh - hl - hh) / 2
    out[1::2, 1::2] = (ll - lh - hl + hh) / 2
    return out


@dataclass
class WaveletPyramid:
    shape: tuple[int, int]
    ll: np.ndarray
    # details[k] = (LH, HL, HH) of level k+1; pads[k] = (pad_rows, pad_cols) before it
    details: list[tuple[np.ndarray, np.ndarray, np.ndarray]]
    pads: list[tuple[int, int]]

    @property
    def levels(self) -> int:
        return len(self.details)

    def coefficients(self):
        yield self.ll
        for band in self.details:
            yield from band


def _as_grid(img) -> np.ndarray:
    if isinstance(img, RasterImage):
        return to_gray(img).pixels[..., 0].astype(np.float64)
    x = np.asarray(img, dtype=np.float64)
    if x.ndim != 2:
        raise ParameterError("expected a 2-D grid or RasterImage")
    return x


def decompose(img, levels: int) -> WaveletPyramid:
    """Recursive Haar on the approximation band. Odd sides are padded by
    replicating the last row/column before each level."""
    if levels < 1:
        raise ParameterError("levels must be >= 1")
    x = _as_grid(img)
    shape = x.shape
    details, pads = [], []
    for level in range(1, levels + 1):
        if min(x.shape) < 2:
            raise ParameterError(
                f"{levels} levels is too deep for a {shape[1]}x{shape[0]} image "
                f"(approximation is {x.shape[1]}x{x.shape[0]} before level {level})"
            )
        pad = (x.shape[0] % 2, x.shape[1] % 2)
        if any(pad):
            x = np.pad(x, ((0, pad[0]), (0, pad[1])), mode="edge")
        ll, lh, hl, hh = dwt2(x)
        details.append((lh, hl, hh))
        pads.append(pad)
        x = ll
    return WaveletPyramid(shape, x, details, pads)


def reconstruct(pyr: WaveletPyramid) -> np.ndarray:
    x = pyr.ll
    for (lh, hl, hh), (pr, pc) in zip(reversed(pyr.details), reversed(pyr.pads)):
        x = idwt2(x, lh, hl, hh)
        x = x[: x.shape[0] - pr, : x.shape[1] - pc]
    return x


def binarize_median(band) -> BinaryImage:
    band = np.asarray(band)
    return BinaryImage((band >= np.median(band)).astype(np.uint8))


def self_watermark(host: RasterImage, levels: int) -> BinaryImage:
    """Watermark derived from the host itself: its level-L approximation
    thresholded at its own median (ties -> 1)."""
    return binarize_median(decompose(host, levels).ll)
