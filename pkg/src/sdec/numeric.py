"""Dense linear-algebra helpers and deterministic random number generation.

Matrices throughout the engine are plain 2-D float64 C-order numpy
arrays; vectors are 1-D float64 arrays. This module adds the
shape-checked entry points the rest of the engine relies on, plus a
counter-based RNG whose streams depend only on (seed, counter), never
on platform entropy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateVectorError, ShapeError

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)

# SplitMix64 constants (Steele, Lea & Flood's published mixer).
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

# FNV-1a 64-bit, used to derive role-specific child seeds.
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def _mix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):  # uint64 wrap-around is the algorithm
        x = (x ^ (x >> np.uint64(30))) * _MIX1
        x = (x ^ (x >> np.uint64(27))) * _MIX2
        return x ^ (x >> np.uint64(31))


def _fnv1a(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


@dataclass
class Rng:
    """Counter-based SplitMix64 generator.

    Output word i is mix64(seed + (counter + i + 1) * GAMMA); draws
    advance only the counter, so identical seeds reproduce identical
    streams bit-for-bit on every platform. A state is single-owner:
    concurrent work must use spawn() to derive independent child seeds.
    """

    seed: int
    counter: int = field(default=0)

    def __post_init__(self):
        self.seed = int(self.seed) & 0xFFFFFFFFFFFFFFFF

    def _raw(self, n: int) -> np.ndarray:
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            base = np.uint64(self.seed) + idx * _GAMMA
        return _mix64(base)

    def uniform(self, n: int) -> np.ndarray:
        """n draws uniform on [0, 1)."""
        return (self._raw(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def _uniform_open(self, n: int) -> np.ndarray:
        # (0, 1]: safe as a log argument in Box-Muller.
        return ((self._raw(n) >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * 2.0**-53

    def gaussian(self, n: int, mean: float = 0.0, std: float = 1.0) -> np.ndarray:
        """n Gaussian draws via Box-Muller on consecutive counter words."""
        if std < 0:
            raise ValueError("std must be >= 0")
        m = (n + 1) // 2
        u1 = self._uniform_open(m)
        u2 = self.uniform(m)
        r = np.sqrt(-2.0 * np.log(u1))
        theta = (2.0 * np.pi) * u2
        z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:n]
        return mean + std * z

    def gaussian_matrix(self, rows: int, cols: int, mean: float = 0.0, std: float = 1.0) -> np.ndarray:
        return self.gaussian(rows * cols, mean, std).reshape(rows, cols)

    def permutation(self, n: int) -> np.ndarray:
        """Uniform permutation of range(n) (argsort of uniform keys)."""
        return np.argsort(self.uniform(n), kind="stable")

    def index(self, n: int) -> int:
        """One index uniform on [0, n)."""
        return min(int(self.uniform(1)[0] * n), n - 1)

    def weighted_index(self, weights: np.ndarray) -> int:
        """One index drawn proportionally to non-negative weights."""
        total = float(np.sum(weights))
        if total <= 0.0:
            return self.index(len(weights))
        cdf = np.cumsum(weights) / total
        u = float(self.uniform(1)[0])
        return min(int(np.searchsorted(cdf, u, side="right")), len(weights) - 1)

    def spawn(self, role: str) -> "Rng":
        """Independent child generator derived from this seed and a role name."""
        h = _fnv1a(role.encode("utf-8"))
        child = int(_mix64(np.uint64((self.seed ^ h) & 0xFFFFFFFFFFFFFFFF)))
        return Rng(child)


def gaussian_draw(rng: Rng, n: int, mean: float, std: float) -> np.ndarray:
    """Draw n Gaussian values, advancing the stream deterministically."""
    return rng.gaussian(n, mean, std)


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got ndim={arr.ndim}")
    return np.ascontiguousarray(arr)


def matmul(a, b) -> np.ndarray:
    """Matrix product with an explicit inner-dimension check."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: inner dimensions differ ({a.shape} x {b.shape})")
    return a @ b


def cosine_similarity(u, v) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
        raise ShapeError(f"cosine_similarity needs equal-length vectors, got {u.shape} and {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise DegenerateVectorError("cosine similarity undefined for zero-norm input")
    return float(np.clip(float(np.dot(u, v)) / (nu * nv), -1.0, 1.0))


def require_finite(a: np.ndarray, name: str = "array") -> None:
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
