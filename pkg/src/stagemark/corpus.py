"""Seeded synthetic test images.

Hosts are smooth colour fields with mild texture, closer to photographs
than uniform noise; watermarks are random or simple glyph-like patterns.
"""
from __future__ import annotations

import numpy as np
from scipy import ndimage

from .imageio import BinaryImage, RasterImage


def natural_host(seed: int, width: int = 512, height: int = 512, channels: int = 3) -> RasterImage:
    rng = np.random.default_rng(seed)
    planes = []
    base = ndimage.gaussian_filter(rng.normal(size=(height, width)), sigma=24, mode="wrap")
    for _ in range(channels):
        coarse = ndimage.gaussian_filter(rng.normal(size=(height, width)), sigma=24, mode="wrap")
        fine = ndimage.gaussian_filter(rng.normal(size=(height, width)), sigma=3, mode="wrap")
        field = base / base.std() + 0.6 * coarse / coarse.std() + 0.15 * fine / fine.std()
        field = (field - field.min()) / (field.max() - field.min())
        planes.append(20 + 215 * field)
    px = np.stack(planes, axis=-1)
    return RasterImage(np.clip(np.rint(px), 0, 255).astype(np.uint8))


def noise_host(seed: int, width: int = 512, height: int = 512, channels: int = 3) -> RasterImage:
    rng = np.random.default_rng(seed)
    return RasterImage(rng.integers(0, 256, size=(height, width, channels), dtype=np.uint8))


def random_watermark(seed: int, side: int = 32) -> BinaryImage:
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(side, side), dtype=np.uint8)
    if not bits.any():
        bits[0, 0] = 1
    return BinaryImage(bits)


def glyph_watermark(side: int = 32) -> BinaryImage:
    """A ring with a cross bar: visually recognisable when extracted."""
    yy, xx = np.mgrid[0:side, 0:side]
    c = (side - 1) / 2
    r = np.hypot(yy - c, xx - c)
    ring = (r > side * 0.28) & (r < side * 0.45)
    bar = np.abs(yy - c) < side * 0.08
    return BinaryImage((ring | (bar & (r < side * 0.45))).astype(np.uint8))
