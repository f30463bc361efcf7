"""Pooling of token-level embedding sequences and matrix normalization."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError, DegenerateRowError, EmptySequenceError, ShapeError

_LAYER_NORM_EPS = 1e-12  # inside the sqrt; degeneracy is still an error


class PoolingStrategy(Enum):
    CLS = "cls"
    LAST = "last"
    MEAN = "mean"
    MAX = "max"

    @classmethod
    def from_name(cls, name: str) -> "PoolingStrategy":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ConfigError(f"unknown pooling strategy {name!r}") from None


class NormalizationKind(Enum):
    UNIT_NORM = "unit_norm"
    LAYER_NORM = "layer_norm"
    FEATURE_STANDARDIZE = "feature_standardize"
    NONE = "none"


@dataclass
class NormalizationMode:
    """Normalization choice; feature_standardize carries its fitted statistics."""

    kind: NormalizationKind
    feature_mean: np.ndarray | None = field(default=None)
    feature_std: np.ndarray | None = field(default=None)

    @classmethod
    def from_name(cls, name: str) -> "NormalizationMode":
        try:
            return cls(NormalizationKind(name.strip().lower()))
        except ValueError:
            raise ConfigError(f"unknown normalization mode {name!r}") from None

    @property
    def fitted(self) -> bool:
        return self.feature_mean is not None and self.feature_std is not None


@dataclass
class TokenSequence:
    """Token embeddings for one input, with a padding mask (True = real token)."""

    tokens: np.ndarray
    mask: np.ndarray | None = None

    def __post_init__(self):
        self.tokens = np.ascontiguousarray(np.asarray(self.tokens, dtype=np.float64))
        if self.tokens.ndim != 2:
            raise ShapeError("tokens must be a (length, dim) array")
        if self.mask is None:
            self.mask = np.ones(self.tokens.shape[0], dtype=bool)
        else:
            self.mask = np.asarray(self.mask, dtype=bool)
            if self.mask.shape != (self.tokens.shape[0],):
                raise ShapeError("mask length must match token count")
        if not bool(self.mask.any()):
            raise EmptySequenceError("sequence has no unmasked tokens")

    @property
    def dim(self) -> int:
        return self.tokens.shape[1]


def pool(seq: TokenSequence, strategy: PoolingStrategy) -> np.ndarray:
    """Collapse a token sequence to one fixed-size vector.

    mean/max aggregate over unmasked tokens; cls/last return the first/
    final unmasked token.
    """
    idx = np.flatnonzero(seq.mask)
    if idx.size == 0:
        raise EmptySequenceError("sequence has no unmasked tokens")
    real = seq.tokens[idx]
    if strategy is PoolingStrategy.MEAN:
        return real.mean(axis=0)
    if strategy is PoolingStrategy.MAX:
        return real.max(axis=0)
    if strategy is PoolingStrategy.CLS:
        return real[0].copy()
    return real[-1].copy()


def pool_matrix(sequences, strategy: PoolingStrategy) -> np.ndarray:
    """Pool a list of sequences into an (n, d) matrix."""
    if not sequences:
        raise EmptySequenceError("no sequences to pool")
    return np.stack([pool(s, strategy) for s in sequences])


def normalize(m: np.ndarray, mode: NormalizationMode, fit: bool = False) -> np.ndarray:
    """Normalize an (n, d) matrix row-wise or feature-wise.

    unit_norm scales every row to unit length; layer_norm centers and
    scales each row by its own mean and population std; feature
    standardization uses per-column statistics fitted on a training
    matrix (fit=True records them into the mode, fit=False reuses them).
    """
    m = np.ascontiguousarray(np.asarray(m, dtype=np.float64))
    if m.ndim != 2:
        raise ShapeError("normalize expects a 2-D matrix")
    kind = mode.kind
    if kind is NormalizationKind.NONE:
        return m.copy()
    if kind is NormalizationKind.UNIT_NORM:
        norms = np.linalg.norm(m, axis=1)
        zero = np.flatnonzero(norms == 0.0)
        if zero.size:
            raise DegenerateRowError(int(zero[0]), "zero row cannot be unit-normalized")
        return m / norms[:, None]
    if kind is NormalizationKind.LAYER_NORM:
        mu = m.mean(axis=1, keepdims=True)
        var = m.var(axis=1, keepdims=True)
        constant = np.flatnonzero(var[:, 0] == 0.0)
        if constant.size:
            raise DegenerateRowError(int(constant[0]), "constant row has zero std")
        return (m - mu) / np.sqrt(var + _LAYER_NORM_EPS)
    # feature_standardize
    if fit:
        mode.feature_mean = m.mean(axis=0)
        std = m.std(axis=0)
        std[std == 0.0] = 1.0  # zero-variance features pass through centered
        mode.feature_std = std
    elif not mode.fitted:
        raise ConfigError("feature_standardize with fit=False requires fitted statistics")
    if mode.feature_mean.shape[0] != m.shape[1]:
        raise ShapeError("fitted statistics do not match matrix width")
    return (m - mode.feature_mean) / mode.feature_std
