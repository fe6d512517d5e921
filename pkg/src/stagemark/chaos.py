"""Chaotic primitives: logistic-map keystreams, the integer cat map and keys.

The cat map always runs on exact integers modulo the grid side, never on the
real-valued unit square, so embedder and extractor agree bit for bit.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import DegenerateOrbitError, KeyFileError, ParameterError

# Onset of chaos for the logistic map (Feigenbaum point, as quoted for the scheme).
CHAOS_THRESHOLD = 3.5699456
DEFAULT_BURN_IN = 100


@dataclass(frozen=True)
class LogisticParams:
    mu: float
    z0: float
    burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self):
        if not (CHAOS_THRESHOLD < self.mu <= 4.0):
            raise ParameterError(
                f"mu={self.mu!r} outside the chaotic regime ({CHAOS_THRESHOLD}, 4]"
            )
        if not (0.0 < self.z0 < 1.0):
            raise ParameterError(f"z0={self.z0!r} must lie in (0, 1)")
        if self.burn_in < 0:
            raise ParameterError("burn_in must be >= 0")


@dataclass(frozen=True)
class CatMapParams:
    a: int
    b: int
    c: int
    d: int
    n_iter: int = 1
    modulus: int | None = None

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            if int(getattr(self, name)) < 1:
                raise ParameterError(f"cat map entry {name} must be a positive integer")
        if self.a * self.d - self.b * self.c != 1:
            raise ParameterError(
                f"cat map matrix [[{self.a},{self.b}],[{self.c},{self.d}]] "
                "is not unimodular (ad - bc != 1)"
            )
        if self.n_iter < 1:
            raise ParameterError("n_iter must be >= 1")
        if self.modulus is not None and self.modulus < 2:
            raise ParameterError("modulus must be >= 2")

    def with_modulus(self, modulus: int) -> "CatMapParams":
        return replace(self, modulus=modulus)


@dataclass(frozen=True)
class SecretKey:
    cipher: LogisticParams
    plane: LogisticParams  # reserved for a keyed bit-plane mode; unused by embedding
    cat: CatMapParams
    wm_width: int
    wm_height: int

    def __post_init__(self):
        if self.wm_width < 1 or self.wm_height < 1:
            raise ParameterError("watermark dimensions must be >= 1")
        if self.wm_width != self.wm_height:
            raise ParameterError(
                f"watermark must be square, key says {self.wm_width}x{self.wm_height}"
            )


# ---------------------------------------------------------------- logistic map


def logistic_sequence(p: LogisticParams, count: int) -> np.ndarray:
    """Return Z[burn_in+1 .. burn_in+count] of z -> mu*z*(1-z) starting at z0.

    Raises DegenerateOrbitError as soon as an iterate leaves (0, 1) or
    repeats an earlier value exactly (fixed point or float cycle).
    """
    if count < 1:
        raise ParameterError("count must be >= 1")
    mu = p.mu
    z = p.z0
    seen = {z}
    out = np.empty(count, dtype=np.float64)
    total = p.burn_in + count
    for k in range(1, total + 1):
        z = mu * z * (1.0 - z)
        if not (0.0 < z < 1.0):
            raise DegenerateOrbitError(
                f"logistic orbit left (0,1) at step {k} (mu={mu!r}, z0={p.z0!r})"
            )
        if z in seen:
            raise DegenerateOrbitError(
                f"logistic orbit repeats at step {k} (mu={mu!r}, z0={p.z0!r}); change z0"
            )
        seen.add(z)
        if k > p.burn_in:
            out[k - p.burn_in - 1] = z
    return out


def binarize(values) -> np.ndarray:
    return (np.asarray(values) >= 0.5).astype(np.uint8)


def logistic_bits(p: LogisticParams, count: int) -> np.ndarray:
    return binarize(logistic_sequence(p, count))


def lyapunov_estimate(p: LogisticParams, count: int = 2000) -> float:
    """Mean log|f'(z)| along the orbit; positive means the orbit is chaotic."""
    z = logistic_sequence(p, count)
    return float(np.mean(np.log(np.abs(p.mu * (1.0 - 2.0 * z)) + 1e-300)))


def keyed_permutation(p: LogisticParams, length: int) -> np.ndarray:
    """sigma[i] = rank of the i-th chaotic value (stable ascending sort)."""
    if length < 1:
        raise ParameterError("length must be >= 1")
    values = logistic_sequence(p, length)
    order = np.argsort(values, kind="stable")
    sigma = np.empty(length, dtype=np.int64)
    sigma[order] = np.arange(length)
    return sigma


# -------------------------------------------------------------------- cat map


def _require_modulus(p: CatMapParams) -> int:
    if p.modulus is None:
        raise ParameterError("cat map modulus is not set")
    return p.modulus


def _step(p: CatMapParams, n: int, x, y):
    return (p.a * x + p.b * y) % n, (p.c * x + p.d * y) % n


def cat_map_apply(p: CatMapParams, x: int, y: int) -> tuple[int, int]:
    n = _require_modulus(p)
    if not (0 <= x < n and 0 <= y < n):
        raise ParameterError(f"coordinate ({x}, {y}) outside [0, {n})^2")
    for _ in range(p.n_iter):
        x, y = _step(p, n, x, y)
    return x, y


def cat_map_apply_many(p: CatMapParams, xs, ys) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised cat_map_apply over coordinate arrays."""
    n = _require_modulus(p)
    x = np.asarray(xs, dtype=np.int64)
    y = np.asarray(ys, dtype=np.int64)
    if x.size and (x.min() < 0 or y.min() < 0 or x.max() >= n or y.max() >= n):
        raise ParameterError(f"coordinates outside [0, {n})^2")
    # entries are reduced mod n first so products stay well inside int64
    a, b, c, d = (v % n for v in (p.a, p.b, p.c, p.d))
    for _ in range(p.n_iter):
        x, y = (a * x + b * y) % n, (c * x + d * y) % n
    return x, y


def cat_map_period(p: CatMapParams, x: int, y: int) -> int:
    n = _require_modulus(p)
    if not (0 <= x < n and 0 <= y < n):
        raise ParameterError(f"coordinate ({x}, {y}) outside [0, {n})^2")
    cx, cy = _step(p, n, x, y)
    k = 1
    while (cx, cy) != (x, y):
        cx, cy = _step(p, n, cx, cy)
        k += 1
    return k


def cat_map_periods(p: CatMapParams) -> np.ndarray:
    """Orbit period of every grid point, as an (N, N) array indexed [y, x]."""
    n = _require_modulus(p)
    y0, x0 = np.mgrid[0:n, 0:n]
    x0 = x0.astype(np.int64)
    y0 = y0.astype(np.int64)
    periods = np.zeros((n, n), dtype=np.int64)
    x, y = x0, y0
    a, b, c, d = (v % n for v in (p.a, p.b, p.c, p.d))
    k = 0
    while not periods.all():
        x, y = (a * x + b * y) % n, (c * x + d * y) % n
        k += 1
        back = (x == x0) & (y == y0) & (periods == 0)
        periods[back] = k
    return periods


def cat_map_global_period(p: CatMapParams) -> int:
    """Smallest k >= 1 with A^k = I (mod N)."""
    n = _require_modulus(p)
    ident = ((1, 0), (0, 1))
    m = ((p.a % n, p.b % n), (p.c % n, p.d % n))
    cur = m
    k = 1
    while cur != ident:
        cur = (
            ((cur[0][0] * m[0][0] + cur[0][1] * m[1][0]) % n,
             (cur[0][0] * m[0][1] + cur[0][1] * m[1][1]) % n),
            ((cur[1][0] * m[0][0] + cur[1][1] * m[1][0]) % n,
             (cur[1][0] * m[0][1] + cur[1][1] * m[1][1]) % n),
        )
        k += 1
    return k


@dataclass
class PeriodReport:
    modulus: int
    n_iter: int
    histogram: dict[int, int] = field(default_factory=dict)
    hazard_fraction: float = 0.0

    @property
    def min_period(self) -> int:
        return min(self.histogram)

    @property
    def max_period(self) -> int:
        return max(self.histogram)

    @property
    def global_period(self) -> int:
        return math.lcm(*self.histogram)

    @property
    def hazard(self) -> bool:
        return self.hazard_fraction >= 0.10


def analyze_periods(p: CatMapParams) -> PeriodReport:
    """Histogram of orbit periods plus the fraction of points that n_iter maps
    back onto themselves (n_iter a multiple of their period).

    The origin is fixed under every key, so it is left out of the fraction.
    """
    periods = cat_map_periods(p)
    hist = dict(sorted(Counter(periods.ravel().tolist()).items()))
    moving = periods.ravel()[1:]
    fixed = np.count_nonzero(p.n_iter % moving == 0)
    return PeriodReport(
        modulus=p.modulus, n_iter=p.n_iter, histogram=hist,
        hazard_fraction=fixed / moving.size,
    )


# ------------------------------------------------------------------- key files

_REAL_KEYS = ("cipher.mu", "cipher.z0", "plane.mu", "plane.z0")
_INT_KEYS = (
    "cipher.burn_in", "plane.burn_in",
    "cat.a", "cat.b", "cat.c", "cat.d", "cat.n_iter",
    "wm.width", "wm.height",
)
KEY_FIELDS = (
    "cipher.mu", "cipher.z0", "cipher.burn_in",
    "plane.mu", "plane.z0", "plane.burn_in",
    "cat.a", "cat.b", "cat.c", "cat.d", "cat.n_iter",
    "wm.width", "wm.height",
)


def format_key(key: SecretKey) -> str:
    values = {
        "cipher.mu": key.cipher.mu, "cipher.z0": key.cipher.z0,
        "cipher.burn_in": key.cipher.burn_in,
        "plane.mu": key.plane.mu, "plane.z0": key.plane.z0,
        "plane.burn_in": key.plane.burn_in,
        "cat.a": key.cat.a, "cat.b": key.cat.b, "cat.c": key.cat.c,
        "cat.d": key.cat.d, "cat.n_iter": key.cat.n_iter,
        "wm.width": key.wm_width, "wm.height": key.wm_height,
    }
    return "".join(f"{name} = {values[name]!r}\n" for name in KEY_FIELDS)


def parse_key(text: str) -> SecretKey:
    values: dict[str, float | int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, value = (s.strip() for s in line.partition("="))
        if not sep:
            raise KeyFileError(f"line {lineno}: expected 'key = value'")
        if name not in KEY_FIELDS:
            raise KeyFileError(f"line {lineno}: unknown key {name!r}")
        if name in values:
            raise KeyFileError(f"line {lineno}: duplicate key {name!r}")
        try:
            values[name] = float(value) if name in _REAL_KEYS else int(value)
        except ValueError:
            raise KeyFileError(f"line {lineno}: bad value {value!r} for {name}") from None
    missing = [k for k in KEY_FIELDS if k not in values]
    if missing:
        raise KeyFileError(f"missing key fields: {', '.join(missing)}")
    return SecretKey(
        cipher=LogisticParams(values["cipher.mu"], values["cipher.z0"], values["cipher.burn_in"]),
        plane=LogisticParams(values["plane.mu"], values["plane.z0"], values["plane.burn_in"]),
        cat=CatMapParams(values["cat.a"], values["cat.b"], values["cat.c"],
                         values["cat.d"], values["cat.n_iter"]),
        wm_width=values["wm.width"],
        wm_height=values["wm.height"],
    )


def load_key(path) -> SecretKey:
    return parse_key(Path(path).read_text())


def save_key(path, key: SecretKey) -> None:
    Path(path).write_text(format_key(key))


def _good_logistic(rng: np.random.Generator, mu_low: float) -> LogisticParams:
    # reject periodic windows and near-degenerate seeds so keys stay sensitive
    while True:
        p = LogisticParams(float(rng.uniform(mu_low, 4.0)), float(rng.uniform(0.01, 0.99)))
        try:
            if lyapunov_estimate(p) > 0.3:
                return p
        except DegenerateOrbitError:
            pass


def generate_key(seed: int, wm_width: int, wm_height: int | None = None) -> SecretKey:
    """Seeded random key; identical seeds give identical keys."""
    wm_height = wm_width if wm_height is None else wm_height
    rng = np.random.default_rng(seed)
    cipher = _good_logistic(rng, 3.9)
    plane = _good_logistic(rng, 3.9)
    b = int(rng.integers(1, 9))
    c = int(rng.integers(1, 9))
    cat = CatMapParams(1, b, c, 1 + b * c, n_iter=int(rng.integers(3, 25)))
    return SecretKey(cipher, plane, cat, wm_width, wm_height)
