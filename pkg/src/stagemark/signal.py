"""Watermark bit sequences: flattening, keyed permutation and keystream XOR."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .chaos import LogisticParams, SecretKey, keyed_permutation, logistic_bits
from .errors import ParameterError
from .imageio import BinaryImage

PERMUTATION_OFFSET = 0.1


@dataclass(frozen=True, eq=False)
class WatermarkBits:
    width: int
    height: int
    bits: np.ndarray

    def __post_init__(self):
        b = np.ascontiguousarray(self.bits, dtype=np.uint8).ravel()
        if b.size != self.width * self.height:
            raise ParameterError(
                f"{b.size} bits do not match {self.width}x{self.height} watermark"
            )
        object.__setattr__(self, "bits", b)

    def __eq__(self, other):
        if not isinstance(other, WatermarkBits):
            return NotImplemented
        return (self.width, self.height) == (other.width, other.height) and bool(
            np.array_equal(self.bits, other.bits)
        )


class EncryptedWatermark(WatermarkBits):
    pass


def encode(img: BinaryImage) -> WatermarkBits:
    return WatermarkBits(img.width, img.height, img.bits.ravel())


def decode(w: WatermarkBits) -> BinaryImage:
    return BinaryImage(np.asarray(w.bits).reshape(w.height, w.width))


def permutation_params(cipher: LogisticParams) -> LogisticParams:
    """Logistic parameters for the position shuffle: z0 shifted by 0.1, wrapped."""
    z = (cipher.z0 + PERMUTATION_OFFSET) % 1.0
    if z == 0.0:
        z = PERMUTATION_OFFSET / 2
    return replace(cipher, z0=z)


def keystream(key: SecretKey, length: int) -> tuple[np.ndarray, np.ndarray]:
    """(sigma, chaotic bits) used by encrypt/decrypt for the given key."""
    sigma = keyed_permutation(permutation_params(key.cipher), length)
    return sigma, logistic_bits(key.cipher, length)


def _check(w: WatermarkBits, key: SecretKey) -> int:
    n = key.wm_width * key.wm_height
    if (w.width, w.height) != (key.wm_width, key.wm_height):
        raise ParameterError(
            f"watermark is {w.width}x{w.height} but key expects "
            f"{key.wm_width}x{key.wm_height}"
        )
    return n


def permute_xor(bits: np.ndarray, sigma: np.ndarray, stream: np.ndarray) -> np.ndarray:
    out = np.empty_like(bits)
    out[sigma] = bits  # out[sigma[j]] = w[j], i.e. out[i] = w[sigma^-1(i)]
    return out ^ stream


def xor_unpermute(bits: np.ndarray, sigma: np.ndarray, stream: np.ndarray) -> np.ndarray:
    """Inverse of permute_xor; works on (..., n) stacks of sequences."""
    return (bits ^ stream)[..., sigma]


def encrypt(w: WatermarkBits, key: SecretKey) -> EncryptedWatermark:
    n = _check(w, key)
    sigma, stream = keystream(key, n)
    return EncryptedWatermark(w.width, w.height, permute_xor(w.bits, sigma, stream))


def decrypt(e: WatermarkBits, key: SecretKey) -> WatermarkBits:
    n = _check(e, key)
    sigma, stream = keystream(key, n)
    return WatermarkBits(e.width, e.height, xor_unpermute(e.bits, sigma, stream))
