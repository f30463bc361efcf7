"""Fully-connected autoencoder with SeLU hidden layers and a linear output.

Reconstruction quality is scored by a combined MSE + cosine loss whose
two terms are reweighted every batch by their own magnitudes, so
whichever error currently dominates receives proportionally more of the
gradient. Gradients are computed analytically (the dynamic weights are
treated as constants of the batch) and optimized with Adam during
pretraining.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ShapeError
from .numeric import Rng

SELU_LAMBDA = 1.0507009873554804934193349852946
SELU_ALPHA = 1.6732632423543772848170429916717


def selu(x: float) -> float:
    """Scaled exponential linear unit at a scalar point."""
    if x > 0.0:
        return SELU_LAMBDA * x
    return SELU_LAMBDA * SELU_ALPHA * float(np.expm1(x))


def selu_derivative(x: float) -> float:
    if x > 0.0:
        return SELU_LAMBDA
    return SELU_LAMBDA * SELU_ALPHA * float(np.exp(x))


@dataclass
class AutoencoderConfig:
    """Architecture and pretraining hyperparameters.

    layer_dims lists the encoder widths from the input dimension down to
    the bottleneck; the decoder mirrors it. Defaults follow the standard
    profile: 2048-1024-512-256-128 encoder, batch 16, Adam at 1e-3.
    """

    layer_dims: list[int]
    l2_coefficient: float = 1e-4
    epochs: int = 100
    batch_size: int = 16
    learning_rate: float = 1e-3
    epsilon_weight: float = 1e-8
    seed: int = 0

    @staticmethod
    def default_dims(input_dim: int) -> list[int]:
        return [input_dim, 2048, 1024, 512, 256, 128]

    def validate(self) -> None:
        if len(self.layer_dims) < 2:
            raise ValueError("layer_dims needs at least input and bottleneck")
        if any(d <= 0 for d in self.layer_dims):
            raise ValueError("layer_dims must be strictly positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.l2_coefficient < 0:
            raise ValueError("l2_coefficient must be >= 0")
        if self.epsilon_weight <= 0:
            raise ValueError("epsilon_weight must be > 0")


@dataclass
class AutoencoderParams:
    """Per-layer weights and biases; layers [0, encoder_layers) encode."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    encoder_layers: int

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def latent_dim(self) -> int:
        return self.weights[self.encoder_layers - 1].shape[1]

    def copy(self) -> "AutoencoderParams":
        return AutoencoderParams(
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.encoder_layers,
        )


def full_layer_dims(layer_dims: list[int]) -> list[int]:
    """Encoder dims extended with the mirrored decoder."""
    return list(layer_dims) + list(reversed(layer_dims[:-1]))


def init_params(layer_dims: list[int], rng: Rng) -> AutoencoderParams:
    """LeCun-style init: zero biases, Gaussian weights with std 1/sqrt(fan_in)."""
    dims = full_layer_dims(layer_dims)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        weights.append(rng.gaussian_matrix(fan_in, fan_out, 0.0, 1.0 / np.sqrt(fan_in)))
        biases.append(np.zeros(fan_out))
    return AutoencoderParams(weights, biases, encoder_layers=len(layer_dims) - 1)


@dataclass
class ForwardCache:
    activations: list[np.ndarray]  # a_0 = input, a_{l+1} = act(s_l)
    pre_activations: list[np.ndarray]


def forward(params: AutoencoderParams, batch: np.ndarray):
    """Full forward pass; returns (latent, reconstruction, cache)."""
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[1] != params.input_dim:
        raise ShapeError(f"batch width {batch.shape} does not match input dim {params.input_dim}")
    n_layers = len(params.weights)
    a = batch
    activations = [a]
    pre = []
    for l in range(n_layers):
        s = a @ params.weights[l] + params.biases[l]
        pre.append(s)
        a = s if l == n_layers - 1 else _kernels.selu(s)
        activations.append(a)
    latent = activations[params.encoder_layers]
    return latent, activations[-1], ForwardCache(activations, pre)


def encode(params: AutoencoderParams, batch: np.ndarray) -> np.ndarray:
    """Encoder-only forward pass to the bottleneck."""
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[1] != params.input_dim:
        raise ShapeError(f"batch width {batch.shape} does not match input dim {params.input_dim}")
    a = batch
    for l in range(params.encoder_layers):
        a = _kernels.selu(a @ params.weights[l] + params.biases[l])
    return a


@dataclass
class ReconLossReport:
    """Combined reconstruction loss and its batch-adaptive weights.

    Invariants hold by construction: w_mse + w_cosine equals
    (l_mse + l_cosine) / (l_mse + l_cosine + eps), and l_recon equals
    w_mse*l_mse + w_cosine*l_cosine exactly.
    """

    l_mse: float
    l_cosine: float
    w_mse: float
    w_cosine: float
    l_recon: float
    degenerate_rows: int = 0


def _row_cosines(batch: np.ndarray, recon: np.ndarray):
    """Per-row cosine similarity with degenerate rows poked out.

    Rows where either vector has zero norm get cosine 0 (loss 1) and are
    reported so the caller can warn and zero their gradients.
    """
    bn = np.linalg.norm(batch, axis=1)
    rn = np.linalg.norm(recon, axis=1)
    degenerate = (bn == 0.0) | (rn == 0.0)
    safe = np.where(degenerate, 1.0, bn * rn)
    cos = np.einsum("ij,ij->i", batch, recon) / safe
    cos = np.clip(cos, -1.0, 1.0)
    cos[degenerate] = 0.0
    return cos, degenerate, bn, rn


def recon_loss(batch: np.ndarray, recon: np.ndarray, eps: float) -> ReconLossReport:
    """Score a reconstruction with the dynamically weighted combined loss.

    MSE averages squared error over every entry; the cosine term
    averages 1 - cos per row. The weights are each term's share of their
    sum (plus eps), so the currently larger loss gets the larger weight.
    """
    batch = np.asarray(batch, dtype=np.float64)
    recon = np.asarray(recon, dtype=np.float64)
    if batch.shape != recon.shape:
        raise ShapeError("batch and reconstruction shapes differ")
    if eps <= 0:
        raise ValueError("eps must be > 0")
    l_mse = float(np.mean((batch - recon) ** 2))
    cos, degenerate, _, _ = _row_cosines(batch, recon)
    l_cos = float(np.mean(1.0 - cos))
    denom = l_mse + l_cos + eps
    w_mse = l_mse / denom
    w_cos = l_cos / denom
    return ReconLossReport(
        l_mse=l_mse,
        l_cosine=l_cos,
        w_mse=w_mse,
        w_cosine=w_cos,
        l_recon=w_mse * l_mse + w_cos * l_cos,
        degenerate_rows=int(np.count_nonzero(degenerate)),
    )


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]


def _recon_output_grad(batch: np.ndarray, recon: np.ndarray, eps: float) -> np.ndarray:
    """d l_recon / d reconstruction with the batch weights held constant."""
    n, d = batch.shape
    l_mse = float(np.mean((batch - recon) ** 2))
    cos, degenerate, bn, rn = _row_cosines(batch, recon)
    l_cos = float(np.mean(1.0 - cos))
    denom = l_mse + l_cos + eps
    w_mse = l_mse / denom
    w_cos = l_cos / denom

    grad = w_mse * 2.0 * (recon - batch) / (n * d)

    # d(1 - cos_i)/d recon_i = -(x_i/(|x||r|) - cos_i * r_i/|r|^2), averaged over rows.
    ok = ~degenerate
    if np.any(ok):
        bn_ok = bn[ok][:, None]
        rn_ok = rn[ok][:, None]
        cos_ok = cos[ok][:, None]
        g = -(batch[ok] / (bn_ok * rn_ok) - cos_ok * recon[ok] / (rn_ok * rn_ok))
        cos_grad = np.zeros_like(recon)
        cos_grad[ok] = g / n
        grad = grad + w_cos * cos_grad
    return grad


def _backprop(params: AutoencoderParams, cache: ForwardCache, delta_out: np.ndarray,
              first_layer: int, last_layer: int, l2: float) -> Gradients:
    """Backpropagate delta at the output of last_layer down to first_layer.

    delta_out is dL/d(pre-activation of last_layer) when last_layer is
    linear, or dL/d(activation) already multiplied by the activation
    derivative by the caller.
    """
    weights = [np.zeros_like(w) for w in params.weights]
    biases = [np.zeros_like(b) for b in params.biases]
    delta = delta_out
    for l in range(last_layer, first_layer - 1, -1):
        weights[l] = cache.activations[l].T @ delta
        if l2:
            weights[l] += 2.0 * l2 * params.weights[l]
        biases[l] = delta.sum(axis=0)
        if l > first_layer:
            delta = (delta @ params.weights[l].T) * _kernels.selu_grad(cache.pre_activations[l - 1])
    return Gradients(weights, biases)


def backward(params: AutoencoderParams, cache: ForwardCache, batch: np.ndarray,
             eps: float, l2: float) -> Gradients:
    """Analytic gradient of l_recon + l2 * sum ||W||^2 over all layers."""
    batch = np.asarray(batch, dtype=np.float64)
    recon = cache.activations[-1]
    delta_out = _recon_output_grad(batch, recon, eps)  # output layer is linear
    return _backprop(params, cache, delta_out, 0, len(params.weights) - 1, l2)


def encoder_backward(params: AutoencoderParams, cache: ForwardCache,
                     grad_latent: np.ndarray) -> Gradients:
    """Gradient of an objective w.r.t. encoder layers given dL/d latent."""
    e = params.encoder_layers
    delta = grad_latent * _kernels.selu_grad(cache.pre_activations[e - 1])
    return _backprop(params, cache, delta, 0, e - 1, 0.0)


@dataclass
class AdamState:
    """Bias-corrected Adam accumulators shaped like the parameters."""

    m_weights: list[np.ndarray]
    m_biases: list[np.ndarray]
    v_weights: list[np.ndarray]
    v_biases: list[np.ndarray]
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps_adam: float = 1e-8

    @classmethod
    def for_params(cls, params: AutoencoderParams) -> "AdamState":
        return cls(
            [np.zeros_like(w) for w in params.weights],
            [np.zeros_like(b) for b in params.biases],
            [np.zeros_like(w) for w in params.weights],
            [np.zeros_like(b) for b in params.biases],
        )


def adam_step(params: AutoencoderParams, grads: Gradients, state: AdamState, lr: float):
    """One in-place Adam update; returns (params, state) for chaining."""
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1**state.step
    c2 = 1.0 - b2**state.step
    for group_p, group_g, group_m, group_v in (
        (params.weights, grads.weights, state.m_weights, state.v_weights),
        (params.biases, grads.biases, state.m_biases, state.v_biases),
    ):
        for p, g, m, v in zip(group_p, group_g, group_m, group_v):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p -= lr * (m / c1) / (np.sqrt(v / c2) + state.eps_adam)
    return params, state


def pretrain(data: np.ndarray, config: AutoencoderConfig):
    """Train the autoencoder on shuffled mini-batches with Adam.

    Returns the trained parameters and the per-epoch mean combined loss.
    Degenerate (zero-norm) rows hit during training surface as a single
    warning, never as a failure.
    """
    config.validate()
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] == 0:
        raise ShapeError("training data must be a non-empty 2-D matrix")
    if data.shape[1] != config.layer_dims[0]:
        raise ShapeError(f"data dim {data.shape[1]} != layer_dims[0] {config.layer_dims[0]}")
    root = Rng(config.seed)
    params = init_params(config.layer_dims, root.spawn("ae_init"))
    shuffle_rng = root.spawn("ae_shuffle")
    state = AdamState.for_params(params)
    n = data.shape[0]
    curve = []
    degenerate_total = 0
    for _ in range(config.epochs):
        order = shuffle_rng.permutation(n)
        losses = []
        for start in range(0, n, config.batch_size):
            batch = data[order[start:start + config.batch_size]]
            _, recon, cache = forward(params, batch)
            report = recon_loss(batch, recon, config.epsilon_weight)
            degenerate_total += report.degenerate_rows
            losses.append(report.l_recon)
            grads = backward(params, cache, batch, config.epsilon_weight, config.l2_coefficient)
            adam_step(params, grads, state, config.learning_rate)
        curve.append(float(np.mean(losses)))
    if degenerate_total:
        warnings.warn(
            f"pretraining hit {degenerate_total} zero-norm rows; their cosine loss was pinned to 1",
            RuntimeWarning,
            stacklevel=2,
        )
    return params, curve
