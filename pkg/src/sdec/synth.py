"""Synthetic Gaussian-blob datasets for experiments and benchmarks."""

from __future__ import annotations

import numpy as np

from .errors import InfeasibleError
from .numeric import Rng

_MAX_CENTER_ATTEMPTS = 10000


def make_blobs(n: int, dim: int, blobs: int, sep: float, seed: int, sigma: float = 1.0):
    """n points from `blobs` isotropic Gaussians with centers >= sep*sigma apart.

    Returns (X, labels) with balanced label counts, grouped by blob.
    """
    if n < blobs or blobs < 1 or dim < 1:
        raise InfeasibleError("need n >= blobs >= 1 and dim >= 1")
    rng = Rng(seed)
    center_rng = rng.spawn("centers")
    point_rng = rng.spawn("points")
    min_dist = sep * sigma
    # Per-coordinate center std chosen so typical pairwise distances land
    # near twice the required separation without inflating coordinates.
    scale = max(min_dist * np.sqrt(2.0 / dim), 1.0)
    centers: list[np.ndarray] = []
    attempts = 0
    while len(centers) < blobs:
        c = center_rng.gaussian(dim, 0.0, scale)
        if all(float(np.linalg.norm(c - e)) >= min_dist for e in centers):
            centers.append(c)
        attempts += 1
        if attempts > _MAX_CENTER_ATTEMPTS:
            raise InfeasibleError("could not place blob centers at the requested separation")
    counts = [n // blobs + (1 if i < n % blobs else 0) for i in range(blobs)]
    points, labels = [], []
    for j, (center, count) in enumerate(zip(centers, counts)):
        points.append(center + point_rng.gaussian_matrix(count, dim, 0.0, sigma))
        labels.extend([j] * count)
    return np.vstack(points), np.asarray(labels, dtype=np.int64)


def corrupt_labels(labels: np.ndarray, fraction: float, k: int, seed: int) -> np.ndarray:
    """Reassign a fraction of labels to a different, random cluster."""
    labels = np.asarray(labels, dtype=np.int64).copy()
    if k < 2:
        raise InfeasibleError("corruption needs at least 2 clusters")
    rng = Rng(seed).spawn("corrupt")
    n = labels.shape[0]
    n_bad = int(round(fraction * n))
    victims = rng.permutation(n)[:n_bad]
    for i in victims:
        offset = 1 + rng.index(k - 1)
        labels[i] = (labels[i] + offset) % k
    return labels
