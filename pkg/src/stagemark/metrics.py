"""Image quality and watermark robustness metrics, plus report serialization."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ParameterError


def _same_shape(a, b):
    if a.shape != b.shape:
        raise ParameterError(f"shape mismatch: {a.shape} vs {b.shape}")


def mse(a, b) -> float:
    _same_shape(a.pixels, b.pixels)
    diff = a.pixels.astype(np.float64) - b.pixels.astype(np.float64)
    return float(np.mean(diff * diff))


def psnr(a, b) -> float:
    """PSNR in dB over all samples; math.inf when the images are identical."""
    err = mse(a, b)
    if err == 0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / err)


def ber(a, b) -> float:
    _same_shape(a.bits, b.bits)
    return float(np.count_nonzero(a.bits != b.bits)) / a.bits.size


def nc(a, b) -> float:
    """Normalized correlation sum(a*b) / sum(a*a) on raw {0,1} bits.

    Asymmetric: ``a`` is the reference. An all-ones ``b`` scores 1.0 against
    any reference, so NC alone never proves presence.
    """
    _same_shape(a.bits, b.bits)
    ref = a.bits.astype(np.int64)
    denom = int(np.sum(ref * ref))
    if denom == 0:
        raise ParameterError("NC undefined for an all-zero reference watermark")
    return int(np.sum(ref * b.bits)) / denom


@dataclass
class EvaluationReport:
    attack: str
    psnr_host_vs_marked: float
    psnr_marked_vs_attacked: float
    ber: float
    nc: float
    present: bool
    tau: float


TSV_COLUMNS = (
    "attack", "psnr_host_vs_marked", "psnr_marked_vs_attacked",
    "ber", "nc", "present", "tau",
)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "inf" if math.isinf(value) else f"{value:.6f}"
    return str(value)


def reports_to_tsv(rows) -> str:
    lines = ["\t".join(TSV_COLUMNS)]
    for r in rows:
        d = asdict(r)
        lines.append("\t".join(_fmt(d[c]) for c in TSV_COLUMNS))
    return "\n".join(lines) + "\n"


def _json_safe(d: dict) -> dict:
    return {k: ("inf" if isinstance(v, float) and math.isinf(v) else v) for k, v in d.items()}


def reports_to_json(rows, **meta) -> str:
    doc = dict(meta)
    doc["reports"] = [_json_safe(asdict(r)) for r in rows]
    return json.dumps(doc, indent=2) + "\n"


def reports_from_json(text: str) -> list[EvaluationReport]:
    out = []
    for d in json.loads(text)["reports"]:
        d = {k: (math.inf if v == "inf" else v) for k, v in d.items()}
        out.append(EvaluationReport(**d))
    return out
