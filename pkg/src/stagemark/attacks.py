"""Image-processing attacks for robustness evaluation.

All attacks are per channel, keep the input size and are deterministic for
a given spec (stochastic ones carry their own seed).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ParameterError
from .imageio import RasterImage

KINDS = (
    "none", "mean_filter", "median_filter", "highpass_filter",
    "salt_pepper", "crop", "scale_roundtrip", "row_col_removal",
)

# CLI prefix -> kind
_PREFIXES = {
    "none": "none",
    "mean": "mean_filter",
    "median": "median_filter",
    "highpass": "highpass_filter",
    "saltpepper": "salt_pepper",
    "crop": "crop",
    "scale": "scale_roundtrip",
    "rowcol": "row_col_removal",
}
_KIND_PREFIX = {v: k for k, v in _PREFIXES.items()}


@dataclass(frozen=True)
class AttackSpec:
    kind: str
    window: int = 3
    density: float = 0.0
    region: tuple[int, int, int, int] = (0, 0, 0, 0)  # x, y, w, h
    factor: float = 1.0
    count: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown attack kind {self.kind!r}")
        if self.kind.endswith("_filter") and (self.window < 3 or self.window % 2 == 0):
            raise ParameterError(f"filter window must be odd and >= 3, got {self.window}")
        if not 0.0 <= self.density <= 1.0:
            raise ParameterError("density must lie in [0, 1]")
        if self.kind == "scale_roundtrip" and not 0.0 < self.factor <= 1.0:
            raise ParameterError("scale factor must lie in (0, 1]")
        if self.count < 0:
            raise ParameterError("count must be >= 0")

    def label(self) -> str:
        prefix = _KIND_PREFIX[self.kind]
        if self.kind == "none":
            return prefix
        if self.kind.endswith("_filter"):
            return f"{prefix}:{self.window}"
        if self.kind == "salt_pepper":
            return f"{prefix}:{self.density:g}:{self.seed}"
        if self.kind == "crop":
            return f"{prefix}:" + ",".join(str(v) for v in self.region)
        if self.kind == "scale_roundtrip":
            return f"{prefix}:{self.factor:g}"
        return f"{prefix}:{self.count}:{self.seed}"


def parse_attack(text: str, default_seed: int = 0) -> AttackSpec:
    """Parse "mean:3", "saltpepper:0.02:7", "crop:x,y,w,h", "rowcol:10:7", ..."""
    head, _, rest = text.strip().partition(":")
    kind = _PREFIXES.get(head)
    if kind is None:
        raise ParameterError(f"unknown attack {text!r}")
    args = rest.split(":") if rest else []
    try:
        if kind == "none":
            if args:
                raise ValueError
            return AttackSpec(kind)
        if kind.endswith("_filter"):
            (w,) = args
            return AttackSpec(kind, window=int(w))
        if kind == "salt_pepper":
            density, *seed = args
            return AttackSpec(kind, density=float(density),
                              seed=int(seed[0]) if seed else default_seed)
        if kind == "crop":
            (box,) = args
            x, y, w, h = (int(v) for v in box.split(","))
            return AttackSpec(kind, region=(x, y, w, h))
        if kind == "scale_roundtrip":
            (f,) = args
            return AttackSpec(kind, factor=float(f))
        count, *seed = args
        return AttackSpec(kind, count=int(count),
                          seed=int(seed[0]) if seed else default_seed)
    except ValueError:
        raise ParameterError(f"malformed attack spec {text!r}") from None


def split_attack_list(text: str) -> list[str]:
    """Split a comma list; commas inside "crop:x,y,w,h" stay with their crop."""
    items: list[str] = []
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        if items and tok.partition(":")[0] not in _PREFIXES and items[-1].startswith("crop:"):
            items[-1] += "," + tok
        else:
            items.append(tok)
    return items


def _box_sum(px: np.ndarray, k: int) -> np.ndarray:
    """Exact integer k x k window sums with edge replication, per channel."""
    r = k // 2
    padded = np.pad(px.astype(np.int64), ((r, r), (r, r), (0, 0)), mode="edge")
    ii = np.zeros((padded.shape[0] + 1, padded.shape[1] + 1, px.shape[2]), dtype=np.int64)
    ii[1:, 1:] = padded.cumsum(0).cumsum(1)
    h, w = px.shape[:2]
    return ii[k:k + h, k:k + w] - ii[:h, k:k + w] - ii[k:k + h, :w] + ii[:h, :w]


def mean_filter(px: np.ndarray, k: int) -> np.ndarray:
    s = _box_sum(px, k)
    kk = k * k
    return ((2 * s + kk) // (2 * kk)).astype(np.uint8)  # round half up


def median_filter(px: np.ndarray, k: int) -> np.ndarray:
    return ndimage.median_filter(px, size=(k, k, 1), mode="nearest")


def highpass_filter(px: np.ndarray, k: int) -> np.ndarray:
    sharp = 2 * px.astype(np.int64) - mean_filter(px, k).astype(np.int64)
    return np.clip(sharp, 0, 255).astype(np.uint8)


def salt_pepper(px: np.ndarray, density: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    h, w = px.shape[:2]
    hit = rng.choice(h * w, size=int(round(density * h * w)), replace=False)
    values = np.where(rng.random(hit.size) < 0.5, 0, 255).astype(np.uint8)
    out = px.copy().reshape(h * w, -1)
    out[hit] = values[:, None]
    return out.reshape(px.shape)


def crop(px: np.ndarray, region) -> np.ndarray:
    x, y, w, h = region
    H, W = px.shape[:2]
    if w < 0 or h < 0 or x < 0 or y < 0 or x + w > W or y + h > H:
        raise ParameterError(f"crop region {region} outside {W}x{H} image")
    out = px.copy()
    out[y:y + h, x:x + w] = 128
    return out


def scale_roundtrip(px: np.ndarray, factor: float) -> np.ndarray:
    h, w = px.shape[:2]
    sh, sw = int(h * factor), int(w * factor)
    if sh < 1 or sw < 1:
        raise ParameterError(f"scale factor {factor} gives an empty {sw}x{sh} image")
    down_r = ((np.arange(sh) + 0.5) * h / sh).astype(np.int64)
    down_c = ((np.arange(sw) + 0.5) * w / sw).astype(np.int64)
    small = px[down_r][:, down_c]
    up_r = (np.arange(h) * sh // h)
    up_c = (np.arange(w) * sw // w)
    return small[up_r][:, up_c]


def row_col_removal(px: np.ndarray, count: int, seed: int) -> np.ndarray:
    h, w = px.shape[:2]
    if count >= h or count >= w:
        raise ParameterError(f"cannot remove {count} rows/columns from {w}x{h} image")
    rng = np.random.default_rng(seed)
    rows = rng.choice(h, size=count, replace=False)
    cols = rng.choice(w, size=count, replace=False)
    kept = np.delete(np.delete(px, rows, axis=0), cols, axis=1)
    return np.pad(kept, ((0, count), (0, count), (0, 0)), mode="edge")


def apply_attack(img: RasterImage, spec: AttackSpec) -> RasterImage:
    px = img.pixels
    k = spec.kind
    if k == "none":
        out = px
    elif k == "mean_filter":
        out = mean_filter(px, spec.window)
    elif k == "median_filter":
        out = median_filter(px, spec.window)
    elif k == "highpass_filter":
        out = highpass_filter(px, spec.window)
    elif k == "salt_pepper":
        out = salt_pepper(px, spec.density, spec.seed)
    elif k == "crop":
        out = crop(px, spec.region)
    elif k == "scale_roundtrip":
        out = scale_roundtrip(px, spec.factor)
    else:
        out = row_col_removal(px, spec.count, spec.seed)
    return RasterImage(out)
