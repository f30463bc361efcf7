"""Soft clustering on the latent space: k-means++ initialization,
Student's-t assignments, sharpened targets, KL loss, and the joint
fine-tuning loop that trains network and centroids together."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from . import autoencoder as ae
from .errors import InfeasibleError, ShapeError
from .numeric import Rng

_LLOYD_TOL = 1e-6
_LLOYD_MAX_ITER = 300


@dataclass
class ClusterModel:
    """Centroid matrix (k x d_z) and the Student's-t degrees of freedom."""

    centroids: np.ndarray
    alpha: float = 1.0

    def __post_init__(self):
        self.centroids = np.ascontiguousarray(np.asarray(self.centroids, dtype=np.float64))
        if self.centroids.ndim != 2 or self.centroids.shape[0] < 1:
            raise ShapeError("centroids must be a (k, d_z) matrix with k >= 1")
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


@dataclass
class FineTuneConfig:
    """Hyperparameters of the KL fine-tuning stage."""

    gamma: float = 0.1
    sgd_lr: float = 0.01
    sgd_momentum: float = 0.9
    batch_size: int = 32
    update_interval: int = 10
    max_iterations: int = 20000
    delta_tol: float = 0.001
    kl_tol: float = 0.001
    kmeans_restarts: int = 20
    seed: int = 0

    def validate(self) -> None:
        if min(self.gamma, self.sgd_lr, self.sgd_momentum) < 0:
            raise ValueError("gamma, sgd_lr and sgd_momentum must be >= 0")
        if min(self.batch_size, self.update_interval, self.max_iterations, self.kmeans_restarts) < 1:
            raise ValueError("counts must be >= 1")
        if not 0.0 < self.delta_tol < 1.0:
            raise ValueError("delta_tol must lie in (0, 1)")
        if self.kl_tol <= 0:
            raise ValueError("kl_tol must be > 0")


@dataclass
class AssignmentState:
    """Soft assignments q, targets p, and the hard labels they imply."""

    q: np.ndarray
    p: np.ndarray
    labels: np.ndarray


def _kmeanspp_seed(z: np.ndarray, k: int, rng: Rng) -> np.ndarray:
    n = z.shape[0]
    centers = np.empty((k, z.shape[1]))
    centers[0] = z[rng.index(n)]
    d2 = _kernels.pairwise_sqdist(z, centers[:1])[:, 0]
    for j in range(1, k):
        centers[j] = z[rng.weighted_index(d2)]
        d2 = np.minimum(d2, _kernels.pairwise_sqdist(z, centers[j:j + 1])[:, 0])
    return centers


def _lloyd(z: np.ndarray, centers: np.ndarray):
    k = centers.shape[0]
    for _ in range(_LLOYD_MAX_ITER):
        labels, _ = _kernels.nearest_centroid(z, centers)
        sums, counts = _kernels.label_sums(z, labels, k)
        new_centers = centers.copy()
        empty = np.flatnonzero(counts == 0)
        if empty.size:
            # Re-seed each empty cluster at the point farthest from its centroid.
            d2 = _kernels.pairwise_sqdist(z, centers)
            dist_to_own = d2[np.arange(z.shape[0]), labels]
            for c in empty:
                far = int(np.argmax(dist_to_own))
                new_centers[c] = z[far]
                dist_to_own[far] = -1.0
            occupied = counts > 0
            new_centers[occupied] = sums[occupied] / counts[occupied, None]
        else:
            new_centers = sums / counts[:, None]
        move = float(np.max(np.linalg.norm(new_centers - centers, axis=1)))
        centers = new_centers
        if move < _LLOYD_TOL:
            break
    labels, inertia = _kernels.nearest_centroid(z, centers)
    return centers, labels, inertia


def kmeanspp_init(z: np.ndarray, k: int, restarts: int, rng: Rng) -> ClusterModel:
    """Best-of-restarts k-means++ seeding followed by Lloyd iterations."""
    z = np.ascontiguousarray(np.asarray(z, dtype=np.float64))
    n = z.shape[0]
    if k < 1:
        raise InfeasibleError("k must be >= 1")
    if k > n:
        raise InfeasibleError(f"k={k} exceeds the number of points n={n}")
    best_centers, best_inertia = None, np.inf
    for _ in range(max(1, restarts)):
        centers, _, inertia = _lloyd(z, _kmeanspp_seed(z, k, rng))
        if inertia < best_inertia:
            best_centers, best_inertia = centers, inertia
    return ClusterModel(best_centers)


def soft_assign(z: np.ndarray, model: ClusterModel) -> np.ndarray:
    """Student's-t soft assignment matrix q (rows sum to 1)."""
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 2 or z.shape[1] != model.centroids.shape[1]:
        raise ShapeError("latent dim does not match centroid dim")
    return _kernels.student_t_q(z, model.centroids, model.alpha)


def target_distribution(q: np.ndarray) -> np.ndarray:
    """Sharpened targets: square q, discount by soft cluster frequency, renormalize."""
    q = np.asarray(q, dtype=np.float64)
    weight = q * q / np.sum(q, axis=0)
    return weight / np.sum(weight, axis=1, keepdims=True)


def kl_loss(p: np.ndarray, q: np.ndarray) -> float:
    """KL divergence sum_ij p log(p/q), with 0 log 0 = 0."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ShapeError("p and q shapes differ")
    mask = p > 0
    if np.any(q[mask] == 0.0):
        raise InfeasibleError("infinite divergence: q is zero where p has mass")
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def hard_labels(q: np.ndarray) -> np.ndarray:
    """Per-row argmax; ties resolve to the lowest cluster index."""
    return np.argmax(np.asarray(q), axis=1).astype(np.int64)


def clustering_gradients(z: np.ndarray, model: ClusterModel, p: np.ndarray, q: np.ndarray):
    """Exact gradients of kl_loss w.r.t. latent rows and centroids, p fixed.

    With k_ij the unnormalized Student's-t kernel, dKL/dz_i works out to
    (alpha+1)/alpha * sum_j (p_ij - q_ij) (z_i - mu_j) / (1 + |z_i - mu_j|^2/alpha),
    and the centroid gradient is its negative aggregated over rows.
    """
    z = np.asarray(z, dtype=np.float64)
    mu = model.centroids
    alpha = model.alpha
    d2 = _kernels.pairwise_sqdist(z, mu)
    m = ((alpha + 1.0) / alpha) * (p - q) / (1.0 + d2 / alpha)
    grad_z = m.sum(axis=1)[:, None] * z - m @ mu
    grad_mu = m.sum(axis=0)[:, None] * mu - m.T @ z
    return grad_z, grad_mu


@dataclass
class FineTuneHistory:
    """Per-update-event trace of the fine-tuning loop."""

    rows: list[tuple[int, float, float, float]] = field(default_factory=list)
    converged: bool = False
    stop_reason: str = "max_iterations"

    def append(self, iteration: int, kl: float, recon: float, delta_label: float) -> None:
        self.rows.append((iteration, kl, recon, delta_label))


class _Momentum:
    """Classic momentum SGD over the network parameters and centroids."""

    def __init__(self, params: ae.AutoencoderParams, centroids: np.ndarray,
                 lr: float, momentum: float):
        self.lr = lr
        self.momentum = momentum
        self.vel_w = [np.zeros_like(w) for w in params.weights]
        self.vel_b = [np.zeros_like(b) for b in params.biases]
        self.vel_c = np.zeros_like(centroids)

    def step(self, params: ae.AutoencoderParams, grads: ae.Gradients,
             centroids: np.ndarray, grad_centroids: np.ndarray) -> None:
        for p, g, v in zip(params.weights, grads.weights, self.vel_w):
            v *= self.momentum
            v -= self.lr * g
            p += v
        for p, g, v in zip(params.biases, grads.biases, self.vel_b):
            v *= self.momentum
            v -= self.lr * g
            p += v
        self.vel_c *= self.momentum
        self.vel_c -= self.lr * grad_centroids
        centroids += self.vel_c


def _full_pass(params: ae.AutoencoderParams, data: np.ndarray, model: ClusterModel,
               eps: float):
    z = ae.encode(params, data)
    q = soft_assign(z, model)
    p = target_distribution(q)
    labels = hard_labels(q)
    _, recon, _ = ae.forward(params, data)
    report = ae.recon_loss(data, recon, eps)
    return q, p, labels, kl_loss(p, q), report.l_recon


def joint_finetune(params: ae.AutoencoderParams, data: np.ndarray, k: int,
                   ftc: FineTuneConfig, aec: ae.AutoencoderConfig):
    """Fine-tune encoder, decoder, and centroids on recon + gamma*KL.

    Centroids start from k-means++ on the encoder output. Soft targets p
    are recomputed from the full dataset every update_interval
    iterations and held fixed in between; the loop stops once the
    fraction of changed hard labels, or the change in full-dataset KL,
    drops below tolerance.
    """
    ftc.validate()
    data = np.asarray(data, dtype=np.float64)
    n = data.shape[0]
    if n < k:
        raise InfeasibleError(f"k={k} exceeds the number of points n={n}")
    root = Rng(ftc.seed)
    model = kmeanspp_init(ae.encode(params, data), k, ftc.kmeans_restarts, root.spawn("kmeans"))
    shuffle_rng = root.spawn("finetune_shuffle")

    q, p, labels, kl, recon = _full_pass(params, data, model, aec.epsilon_weight)
    history = FineTuneHistory()
    history.append(0, kl, recon, 1.0)
    prev_labels, prev_kl = labels, kl

    optimizer = _Momentum(params, model.centroids, ftc.sgd_lr, ftc.sgd_momentum)
    order = shuffle_rng.permutation(n)
    cursor = 0

    for it in range(1, ftc.max_iterations + 1):
        if cursor + ftc.batch_size > n:
            order = shuffle_rng.permutation(n)
            cursor = 0
        idx = order[cursor:cursor + ftc.batch_size]
        cursor += ftc.batch_size
        batch = data[idx]

        latent, recon_b, cache = ae.forward(params, batch)
        grads = ae.backward(params, cache, batch, aec.epsilon_weight, aec.l2_coefficient)

        q_b = soft_assign(latent, model)
        grad_z, grad_mu = clustering_gradients(latent, model, p[idx], q_b)
        scale = ftc.gamma / batch.shape[0]  # per-sample mean keeps gamma batch-size free
        kl_grads = ae.encoder_backward(params, cache, scale * grad_z)
        for l in range(params.encoder_layers):
            grads.weights[l] += kl_grads.weights[l]
            grads.biases[l] += kl_grads.biases[l]

        optimizer.step(params, grads, model.centroids, scale * grad_mu)

        if it % ftc.update_interval == 0:
            q, p, labels, kl, recon = _full_pass(params, data, model, aec.epsilon_weight)
            delta = float(np.mean(labels != prev_labels))
            history.append(it, kl, recon, delta)
            if delta < ftc.delta_tol:
                history.converged = True
                history.stop_reason = "delta_label"
                break
            if abs(kl - prev_kl) < ftc.kl_tol:
                history.converged = True
                history.stop_reason = "kl_change"
                break
            prev_labels, prev_kl = labels, kl
    if not history.converged:
        warnings.warn(
            f"fine-tuning stopped at max_iterations={ftc.max_iterations} without converging",
            RuntimeWarning,
            stacklevel=2,
        )
    return params, model, AssignmentState(q, p, labels), history
