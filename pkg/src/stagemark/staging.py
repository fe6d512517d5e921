"""Three-stage redundant embedding (1 + 16 + 64 copies) with majority-vote extraction.

Stage s tiles the host into a g x g grid of blocks, g = 1, 4, 8. Inside the
top-left N x N square of every block (N = the smaller block side) the
watermark pixel at (row r, col c) lands on the cat-map image of (x=c, y=r)
modulo N. RGB hosts carry stage 1/2/3 in the LSB of R/G/B; gray hosts carry
them in bit-planes 0/1/2 of the single channel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chaos import SecretKey, cat_map_apply_many
from .errors import CapacityError, ParameterError
from .imageio import BinaryImage, RasterImage
from .metrics import nc
from .signal import encode, encrypt, keystream, xor_unpermute

GRIDS = (1, 4, 8)
TOTAL_COPIES = sum(g * g for g in GRIDS)


@dataclass(frozen=True)
class Stage:
    index: int
    grid: int
    block_w: int
    block_h: int
    side: int
    channel: int
    plane: int
    origins: tuple[tuple[int, int], ...]  # (x, y) of each block's top-left corner
    offsets: tuple[np.ndarray, np.ndarray]  # (dy, dx) inside a block, per watermark pixel

    @property
    def copies(self) -> int:
        return len(self.origins)

    def positions(self) -> tuple[np.ndarray, np.ndarray]:
        """Absolute (rows, cols), shape (copies, n_bits)."""
        oy = np.array([o[1] for o in self.origins])[:, None]
        ox = np.array([o[0] for o in self.origins])[:, None]
        dy, dx = self.offsets
        return oy + dy[None, :], ox + dx[None, :]


@dataclass(frozen=True)
class StagePlan:
    host_width: int
    host_height: int
    channels: int
    stages: tuple[Stage, ...]

    @property
    def total_copies(self) -> int:
        return sum(s.copies for s in self.stages)


@dataclass(frozen=True)
class WatermarkedImage:
    image: RasterImage
    plan: StagePlan


def plan_stages(host_w: int, host_h: int, key: SecretKey, channels: int = 3) -> StagePlan:
    if channels not in (1, 3):
        raise ParameterError("host must have 1 or 3 channels")
    side = key.wm_width
    need = GRIDS[-1] * side
    if host_w < need or host_h < need:
        raise CapacityError(
            f"host {host_w}x{host_h} too small for a {side}x{side} watermark: "
            f"the smallest stage block must hold it, so the host needs at least "
            f"{need}x{need} pixels"
        )
    rr, cc = np.divmod(np.arange(side * side), side)
    stages = []
    for idx, g in enumerate(GRIDS):
        bw, bh = host_w // g, host_h // g
        n = min(bw, bh)
        x, y = cat_map_apply_many(key.cat.with_modulus(n), cc, rr)
        origins = tuple((bx * bw, by * bh) for by in range(g) for bx in range(g))
        channel, plane = (idx, 0) if channels == 3 else (0, idx)
        stages.append(Stage(idx + 1, g, bw, bh, n, channel, plane, origins, (y, x)))
    return StagePlan(host_w, host_h, channels, tuple(stages))


def _check_wm(wm: BinaryImage, key: SecretKey) -> None:
    if (wm.width, wm.height) != (key.wm_width, key.wm_height):
        raise ParameterError(
            f"watermark is {wm.width}x{wm.height}, key expects "
            f"{key.wm_width}x{key.wm_height}"
        )


def embed(host: RasterImage, wm: BinaryImage, key: SecretKey) -> WatermarkedImage:
    _check_wm(wm, key)
    plan = plan_stages(host.width, host.height, key, host.channels)
    payload = encrypt(encode(wm), key).bits
    px = host.pixels.copy()
    for st in plan.stages:
        rows, cols = st.positions()
        bits = np.broadcast_to(payload, rows.shape).astype(np.uint8)
        clear = np.uint8(0xFF ^ (1 << st.plane))
        target = px[rows, cols, st.channel]
        px[rows, cols, st.channel] = (target & clear) | (bits << st.plane)
    return WatermarkedImage(RasterImage(px), plan)


def read_copies(img: RasterImage, key: SecretKey) -> np.ndarray:
    """Decrypted bits of every embedded copy, shape (81, n_bits), stage 3 first."""
    plan = plan_stages(img.width, img.height, key, img.channels)
    n = key.wm_width * key.wm_height
    sigma, stream = keystream(key, n)
    reads = []
    for st in reversed(plan.stages):
        rows, cols = st.positions()
        reads.append((img.pixels[rows, cols, st.channel] >> st.plane) & 1)
    return xor_unpermute(np.concatenate(reads), sigma, stream)


def extract(img: RasterImage, key: SecretKey) -> BinaryImage:
    copies = read_copies(img, key)
    votes = copies.sum(axis=0, dtype=np.int64)
    bits = (2 * votes > copies.shape[0]).astype(np.uint8)
    return BinaryImage(bits.reshape(key.wm_height, key.wm_width))


def detect(img: RasterImage, wm: BinaryImage, key: SecretKey, tau: float = 0.75):
    """Blind detection: (present, confidence) with confidence = NC(wm, extracted)."""
    if not 0.0 <= tau <= 1.0:
        raise ParameterError(f"tau={tau} outside [0, 1]")
    _check_wm(wm, key)
    confidence = nc(wm, extract(img, key))
    return confidence >= tau, confidence
