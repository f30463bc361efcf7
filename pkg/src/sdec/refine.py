"""Cosine-similarity refinement of cluster labels.

Centroids are recomputed in the embedding space the labels came from;
a point moves to the centroid it is most similar to only when that
similarity beats its current centroid's by more than a threshold.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ShapeError


@dataclass
class RefineConfig:
    threshold: float = 0.2   # minimum cosine margin for a reassignment
    max_passes: int = 10

    def validate(self) -> None:
        if self.threshold < 0:
            raise ValueError("threshold must be >= 0")
        if self.max_passes < 1:
            raise ValueError("max_passes must be >= 1")


def centroids_from_labels(x: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """Mean embedding per cluster; empty clusters keep a zero row."""
    x = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
    labels = np.asarray(labels, dtype=np.int64)
    if labels.min() < 0 or labels.max() >= k:
        raise ShapeError(f"labels must lie in [0, {k})")
    sums, counts = _kernels.label_sums(x, labels, k)
    occupied = counts > 0
    centroids = np.zeros_like(sums)
    centroids[occupied] = sums[occupied] / counts[occupied, None]
    return centroids


def _cosine_to_centroids(x: np.ndarray, centroids: np.ndarray):
    """Similarity matrix with zero-norm rows or centroids pinned to -1."""
    xn = np.linalg.norm(x, axis=1)
    cn = np.linalg.norm(centroids, axis=1)
    bad_x = xn == 0.0
    bad_c = cn == 0.0
    sims = (x @ centroids.T) / np.where(bad_x, 1.0, xn)[:, None]
    sims /= np.where(bad_c, 1.0, cn)[None, :]
    np.clip(sims, -1.0, 1.0, out=sims)
    sims[bad_x, :] = -1.0
    sims[:, bad_c] = -1.0
    return sims, bool(bad_x.any() or bad_c.any())


def refine_pass(x: np.ndarray, labels: np.ndarray, centroids: np.ndarray,
                threshold: float, log: list | None = None):
    """One synchronous reassignment sweep against fixed centroids.

    Every decision uses the pass-entry centroids; a point is reassigned
    to its most-similar centroid only when the similarity margin over
    its current centroid strictly exceeds the threshold. Returns the new
    labels and the reassignment count; log (if given) collects
    (point, old_label, new_label, margin) rows.
    """
    x = np.asarray(x, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if x.shape[0] != labels.shape[0]:
        raise ShapeError("labels length does not match point count")
    if labels.min() < 0 or labels.max() >= centroids.shape[0]:
        raise ShapeError("labels index outside the centroid range")
    sims, degenerate = _cosine_to_centroids(x, centroids)
    if degenerate:
        warnings.warn(
            "zero-norm point or centroid encountered; its similarity was pinned to -1",
            RuntimeWarning,
            stacklevel=2,
        )
    best = np.argmax(sims, axis=1)
    margin = sims[np.arange(x.shape[0]), best] - sims[np.arange(x.shape[0]), labels]
    move = margin > threshold
    new_labels = np.where(move, best, labels).astype(np.int64)
    if log is not None:
        for i in np.flatnonzero(move):
            log.append((int(i), int(labels[i]), int(best[i]), float(margin[i])))
    return new_labels, int(np.count_nonzero(move))


def refine(x: np.ndarray, labels: np.ndarray, config: RefineConfig,
           log: list | None = None) -> np.ndarray:
    """Alternate centroid recomputation and reassignment to a fixed point."""
    config.validate()
    labels = np.asarray(labels, dtype=np.int64)
    k = int(labels.max()) + 1
    for _ in range(config.max_passes):
        centroids = centroids_from_labels(x, labels, k)
        labels, moved = refine_pass(x, labels, centroids, config.threshold, log)
        if moved == 0:
            break
    return labels
