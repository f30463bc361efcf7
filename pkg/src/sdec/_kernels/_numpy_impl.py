"""Pure-NumPy implementations of the hot kernels.

Used whenever the compiled extension is unavailable (or forced via
SDEC_KERNELS=numpy). Semantics match sdec._kernels._core; small
floating-point differences from summation order are expected and
bounded by the equivalence tests.
"""

import numpy as np

SELU_LAMBDA = 1.0507009873554804934193349852946
SELU_ALPHA = 1.6732632423543772848170429916717


def selu(x):
    """Elementwise scaled exponential linear unit."""
    x = np.asarray(x, dtype=np.float64)
    return np.where(x > 0.0, SELU_LAMBDA * x, SELU_LAMBDA * SELU_ALPHA * np.expm1(x))


def selu_grad(x):
    """Derivative of selu with respect to its pre-activation input."""
    x = np.asarray(x, dtype=np.float64)
    return np.where(x > 0.0, SELU_LAMBDA, SELU_LAMBDA * SELU_ALPHA * np.exp(x))


def pairwise_sqdist(a, b):
    """Squared Euclidean distances between rows of a (n x d) and b (k x d)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    d2 = (
        np.sum(a * a, axis=1)[:, None]
        + np.sum(b * b, axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    np.maximum(d2, 0.0, out=d2)
    return d2


def student_t_q(z, centroids, alpha):
    """Row-normalized Student's-t kernel between latent rows and centroids."""
    d2 = pairwise_sqdist(z, centroids)
    if alpha == 1.0:
        k = 1.0 / (1.0 + d2)
    else:
        k = np.power(1.0 + d2 / alpha, -(alpha + 1.0) / 2.0)
    return k / np.sum(k, axis=1, keepdims=True)


def nearest_centroid(x, centroids):
    """Index of the closest centroid per row plus total inertia."""
    d2 = pairwise_sqdist(x, centroids)
    labels = np.argmin(d2, axis=1).astype(np.int64)
    inertia = float(np.sum(d2[np.arange(d2.shape[0]), labels]))
    return labels, inertia


def label_sums(x, labels, k):
    """Per-label row sums and member counts (Lloyd accumulation step)."""
    x = np.asarray(x, dtype=np.float64)
    sums = np.zeros((k, x.shape[1]), dtype=np.float64)
    np.add.at(sums, labels, x)
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    return sums, counts
