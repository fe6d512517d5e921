"""Blind three-stage chaotic watermarking for 8-bit images."""
from .chaos import CatMapParams, LogisticParams, SecretKey, generate_key, load_key, save_key
from .errors import StagemarkError
from .imageio import BinaryImage, RasterImage, read_image, write_image
from .staging import detect, embed, extract, plan_stages

__all__ = [
    "BinaryImage", "CatMapParams", "LogisticParams", "RasterImage", "SecretKey",
    "StagemarkError", "detect", "embed", "extract", "generate_key", "load_key",
    "plan_stages", "read_image", "save_key", "write_image",
]

__version__ = "0.1.0"
