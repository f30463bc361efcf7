"""File formats: binary embedding files, checkpoints, configs, CSV tables.

Byte layouts are documented in docs/FORMATS.md. Embedding files store
32-bit floats (matching upstream encoder stacks); checkpoints keep full
64-bit precision. All integers and floats are little-endian.
"""

from __future__ import annotations

import csv
import hashlib
import json
import struct
import warnings
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .autoencoder import AutoencoderConfig, AutoencoderParams
from .clustering import ClusterModel, FineTuneConfig, FineTuneHistory
from .embed import NormalizationMode, PoolingStrategy, TokenSequence
from .errors import (
    BadMagicError,
    ConfigError,
    CorruptCheckpointError,
    ShapeError,
    TruncatedPayloadError,
    UnsupportedVersionError,
)
from .refine import RefineConfig

MAGIC = b"SDEC"
CHECKPOINT_MAGIC = b"SDCK"
VERSION = 1
KIND_FLAT = 0
KIND_SEQUENCES = 1

_HEADER = struct.Struct("<4sHBII")


# ---------------------------------------------------------------------------
# embedding files


def save_embeddings(path, data) -> None:
    """Write a flat (n, d) matrix (kind 0) or a list of sequences (kind 1)."""
    path = Path(path)
    if isinstance(data, np.ndarray):
        if data.ndim != 2:
            raise ShapeError("flat embedding data must be 2-D")
        payload = np.ascontiguousarray(data, dtype="<f4").tobytes()
        header = _HEADER.pack(MAGIC, VERSION, KIND_FLAT, data.shape[0], data.shape[1])
        path.write_bytes(header + payload)
        return
    sequences = [s.tokens[s.mask] if isinstance(s, TokenSequence) else np.asarray(s, dtype=np.float64) for s in data]
    if not sequences:
        raise ShapeError("cannot save an empty sequence list")
    dim = sequences[0].shape[1]
    if any(s.ndim != 2 or s.shape[1] != dim or s.shape[0] < 1 for s in sequences):
        raise ShapeError("all sequences must be non-empty with a shared dimension")
    chunks = [_HEADER.pack(MAGIC, VERSION, KIND_SEQUENCES, len(sequences), dim)]
    for s in sequences:
        chunks.append(struct.pack("<I", s.shape[0]))
        chunks.append(np.ascontiguousarray(s, dtype="<f4").tobytes())
    Path(path).write_bytes(b"".join(chunks))


def load_embeddings(path):
    """Read an embedding file; returns an (n, d) float64 matrix or a list of TokenSequence."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise TruncatedPayloadError(f"{path}: file shorter than the header")
    magic, version, kind, n, dim = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise BadMagicError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise UnsupportedVersionError(f"{path}: unsupported version {version}")
    body = raw[_HEADER.size:]
    if kind == KIND_FLAT:
        expected = 4 * n * dim
        if len(body) != expected:
            raise TruncatedPayloadError(f"{path}: payload is {len(body)} bytes, expected {expected}")
        flat = np.frombuffer(body, dtype="<f4").astype(np.float64)
        return flat.reshape(n, dim)
    if kind != KIND_SEQUENCES:
        raise UnsupportedVersionError(f"{path}: unknown kind {kind}")
    sequences = []
    offset = 0
    for _ in range(n):
        if offset + 4 > len(body):
            raise TruncatedPayloadError(f"{path}: truncated sequence header")
        (length,) = struct.unpack_from("<I", body, offset)
        offset += 4
        nbytes = 4 * length * dim
        if length < 1 or offset + nbytes > len(body):
            raise TruncatedPayloadError(f"{path}: truncated sequence payload")
        tokens = np.frombuffer(body, dtype="<f4", count=length * dim, offset=offset)
        offset += nbytes
        sequences.append(TokenSequence(tokens.astype(np.float64).reshape(length, dim)))
    if offset != len(body):
        raise TruncatedPayloadError(f"{path}: {len(body) - offset} trailing bytes")
    return sequences


# ---------------------------------------------------------------------------
# checkpoints


def save_checkpoint(path, params: AutoencoderParams, model: ClusterModel | None,
                    config_hash: str) -> None:
    """Full-precision dump of network parameters and optional centroids."""
    head = {
        "encoder_layers": params.encoder_layers,
        "weight_shapes": [list(w.shape) for w in params.weights],
        "bias_shapes": [list(b.shape) for b in params.biases],
        "alpha": model.alpha if model is not None else None,
        "centroid_shape": list(model.centroids.shape) if model is not None else None,
        "config_hash": config_hash,
    }
    head_bytes = json.dumps(head, sort_keys=True).encode("utf-8")
    blobs = [np.ascontiguousarray(a, dtype="<f8").tobytes()
             for a in (*params.weights, *params.biases)]
    if model is not None:
        blobs.append(np.ascontiguousarray(model.centroids, dtype="<f8").tobytes())
    out = b"".join([
        CHECKPOINT_MAGIC,
        struct.pack("<HI", VERSION, len(head_bytes)),
        head_bytes,
        *blobs,
    ])
    Path(path).write_bytes(out)


def load_checkpoint(path, expected_config_hash: str | None = None):
    """Read a checkpoint; returns (params, model-or-None, config_hash)."""
    raw = Path(path).read_bytes()
    if len(raw) < 10:
        raise CorruptCheckpointError(f"{path}: too short for a checkpoint")
    if raw[:4] != CHECKPOINT_MAGIC:
        raise BadMagicError(f"{path}: bad checkpoint magic {raw[:4]!r}")
    version, head_len = struct.unpack_from("<HI", raw, 4)
    if version != VERSION:
        raise UnsupportedVersionError(f"{path}: unsupported checkpoint version {version}")
    if 10 + head_len > len(raw):
        raise CorruptCheckpointError(f"{path}: header length field exceeds the file")
    try:
        head = json.loads(raw[10:10 + head_len].decode("utf-8"))
        weight_shapes = [tuple(s) for s in head["weight_shapes"]]
        bias_shapes = [tuple(s) for s in head["bias_shapes"]]
        encoder_layers = int(head["encoder_layers"])
        centroid_shape = head["centroid_shape"]
        config_hash = head["config_hash"]
    except (ValueError, KeyError, TypeError) as exc:
        raise CorruptCheckpointError(f"{path}: malformed checkpoint header ({exc})") from None
    shapes = list(weight_shapes) + list(bias_shapes)
    if centroid_shape is not None:
        shapes.append(tuple(centroid_shape))
    expected = sum(int(np.prod(s)) for s in shapes) * 8
    body = raw[10 + head_len:]
    if len(body) != expected:
        raise CorruptCheckpointError(f"{path}: payload is {len(body)} bytes, expected {expected}")
    arrays = []
    offset = 0
    for shape in shapes:
        count = int(np.prod(shape))
        arrays.append(np.frombuffer(body, dtype="<f8", count=count, offset=offset)
                      .astype(np.float64).reshape(shape))
        offset += count * 8
    n_w = len(weight_shapes)
    params = AutoencoderParams(arrays[:n_w], arrays[n_w:n_w + len(bias_shapes)], encoder_layers)
    model = None
    if centroid_shape is not None:
        model = ClusterModel(arrays[-1], alpha=float(head["alpha"]))
    if expected_config_hash is not None and config_hash != expected_config_hash:
        warnings.warn(
            f"{path}: checkpoint was written under a different configuration",
            RuntimeWarning,
            stacklevel=2,
        )
    return params, model, config_hash


# ---------------------------------------------------------------------------
# run configuration


@dataclass
class RunConfig:
    """Flat run configuration; every field has an operational default."""

    seed: int = 0
    k: int | None = None
    input: str | None = None
    output_dir: str = "."
    gold_labels: str | None = None
    pooling: str = "mean"
    normalize: str = "unit_norm"
    layer_dims: list[int] | None = None
    l2_coefficient: float = 1e-4
    ae_epochs: int = 100
    ae_batch_size: int = 16
    ae_learning_rate: float = 1e-3
    epsilon_weight: float = 1e-8
    gamma: float = 0.1
    sgd_lr: float = 0.01
    sgd_momentum: float = 0.9
    cluster_batch_size: int = 32
    update_interval: int = 10
    max_iterations: int = 20000
    delta_tol: float = 0.001
    kl_tol: float = 0.001
    kmeans_restarts: int = 20
    alpha: float = 1.0
    refine_lambda: float = 0.2
    max_passes: int = 10
    refine_space: str = "original"

    _JSON_KEYS = {"refine_lambda": "lambda"}

    def autoencoder_config(self, input_dim: int) -> AutoencoderConfig:
        dims = self.layer_dims or AutoencoderConfig.default_dims(input_dim)
        if dims[0] != input_dim:
            raise ConfigError(f"layer_dims[0]={dims[0]} does not match data dim {input_dim}")
        return AutoencoderConfig(
            layer_dims=list(dims),
            l2_coefficient=self.l2_coefficient,
            epochs=self.ae_epochs,
            batch_size=self.ae_batch_size,
            learning_rate=self.ae_learning_rate,
            epsilon_weight=self.epsilon_weight,
            seed=self.seed,
        )

    def finetune_config(self) -> FineTuneConfig:
        return FineTuneConfig(
            gamma=self.gamma,
            sgd_lr=self.sgd_lr,
            sgd_momentum=self.sgd_momentum,
            batch_size=self.cluster_batch_size,
            update_interval=self.update_interval,
            max_iterations=self.max_iterations,
            delta_tol=self.delta_tol,
            kl_tol=self.kl_tol,
            kmeans_restarts=self.kmeans_restarts,
            seed=self.seed,
        )

    def refine_config(self) -> RefineConfig:
        return RefineConfig(threshold=self.refine_lambda, max_passes=self.max_passes)

    def pooling_strategy(self) -> PoolingStrategy:
        return PoolingStrategy.from_name(self.pooling)

    def normalization_mode(self) -> NormalizationMode:
        return NormalizationMode.from_name(self.normalize)

    def to_dict(self) -> dict:
        return {self._JSON_KEYS.get(f.name, f.name): getattr(self, f.name)
                for f in fields(self)}

    _PATH_KEYS = ("input", "output_dir", "gold_labels")

    def config_hash(self) -> str:
        """Digest of the hyperparameters only; file paths don't affect results."""
        doc = {k: v for k, v in self.to_dict().items() if k not in self._PATH_KEYS}
        return hashlib.sha256(json.dumps(doc, sort_keys=True).encode("utf-8")).hexdigest()


_CONFIG_TYPES = {
    "seed": int,
    "k": (int, type(None)),
    "input": (str, type(None)),
    "output_dir": str,
    "gold_labels": (str, type(None)),
    "pooling": str,
    "normalize": str,
    "layer_dims": (list, type(None)),
    "l2_coefficient": (int, float),
    "ae_epochs": int,
    "ae_batch_size": int,
    "ae_learning_rate": (int, float),
    "epsilon_weight": (int, float),
    "gamma": (int, float),
    "sgd_lr": (int, float),
    "sgd_momentum": (int, float),
    "cluster_batch_size": int,
    "update_interval": int,
    "max_iterations": int,
    "delta_tol": (int, float),
    "kl_tol": (int, float),
    "kmeans_restarts": int,
    "alpha": (int, float),
    "lambda": (int, float),
    "max_passes": int,
    "refine_space": str,
}

_FIELD_BY_KEY = {"lambda": "refine_lambda"}


def config_from_dict(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    cfg = RunConfig()
    for key, value in doc.items():
        if key not in _CONFIG_TYPES:
            raise ConfigError(f"unknown configuration key {key!r}")
        expected = _CONFIG_TYPES[key]
        if isinstance(value, bool) or not isinstance(value, expected):
            raise ConfigError(f"configuration key {key!r} has the wrong type")
        if key == "layer_dims" and value is not None:
            if not value or not all(isinstance(v, int) and not isinstance(v, bool) and v > 0 for v in value):
                raise ConfigError("layer_dims must be a non-empty list of positive integers")
        setattr(cfg, _FIELD_BY_KEY.get(key, key), value)
    if cfg.refine_space not in ("original", "latent"):
        raise ConfigError("refine_space must be 'original' or 'latent'")
    cfg.pooling_strategy()
    cfg.normalization_mode()
    return cfg


def load_config(path) -> RunConfig:
    """Strict JSON config: unknown keys are errors, absent keys take defaults."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(doc)


def save_config(path, cfg: RunConfig) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# CSV tables


def save_labels(path, labels) -> None:
    labels = np.asarray(labels, dtype=np.int64)
    Path(path).write_text("".join(f"{int(v)}\n" for v in labels), encoding="utf-8")


def load_labels(path) -> np.ndarray:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if lines and not _is_int(lines[0]):
        lines = lines[1:]  # optional header
    values = []
    for i, line in enumerate(lines):
        line = line.strip()
        if not line:
            continue
        if not _is_int(line):
            raise ConfigError(f"{path}: line {i + 1} is not an integer label")
        values.append(int(line))
    if not values:
        raise ConfigError(f"{path}: no labels found")
    arr = np.asarray(values, dtype=np.int64)
    if arr.min() < 0:
        raise ConfigError(f"{path}: labels must be non-negative")
    return arr


def _is_int(text: str) -> bool:
    try:
        int(text.strip())
        return True
    except ValueError:
        return False


def save_history(path, history: FineTuneHistory) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "kl", "recon", "delta_label"])
        for iteration, kl, recon, delta in history.rows:
            writer.writerow([iteration, repr(kl), repr(recon), repr(delta)])


def save_refine_log(path, entries) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["point", "old_label", "new_label", "margin"])
        for point, old, new, margin in entries:
            writer.writerow([point, old, new, repr(margin)])
