"""Clustering evaluation: optimal-matching accuracy, NMI, and ARI."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ShapeError


def _as_labels(y, name: str) -> np.ndarray:
    arr = np.asarray(y)
    if arr.ndim != 1 or arr.size == 0:
        raise ShapeError(f"{name} must be a non-empty 1-D label vector")
    return arr.astype(np.int64)


def contingency(y_true, y_pred):
    """Count matrix of shape (k_true, k_pred) plus the label values per axis."""
    y_true = _as_labels(y_true, "y_true")
    y_pred = _as_labels(y_pred, "y_pred")
    if y_true.shape != y_pred.shape:
        raise ShapeError("label vectors must have equal length")
    true_vals, ti = np.unique(y_true, return_inverse=True)
    pred_vals, pi = np.unique(y_pred, return_inverse=True)
    counts = np.zeros((true_vals.size, pred_vals.size), dtype=np.int64)
    np.add.at(counts, (ti, pi), 1)
    return counts, true_vals, pred_vals


def accuracy(y_true, y_pred):
    """Best-mapping accuracy and the one-to-one cluster->label mapping used.

    The optimum over one-to-one mappings is found by solving the
    assignment problem on the contingency table padded to square, so
    surplus clusters or classes stay unmatched.
    """
    counts, true_vals, pred_vals = contingency(y_true, y_pred)
    kt, kp = counts.shape
    size = max(kt, kp)
    padded = np.zeros((size, size), dtype=np.int64)
    padded[:kt, :kp] = counts
    rows, cols = linear_sum_assignment(padded, maximize=True)
    matched = int(padded[rows, cols].sum())
    mapping = {
        int(pred_vals[c]): int(true_vals[r])
        for r, c in zip(rows, cols)
        if r < kt and c < kp
    }
    return matched / len(np.asarray(y_true)), mapping


def _entropy(freq: np.ndarray, n: int) -> float:
    p = freq[freq > 0] / n
    return float(-np.sum(p * np.log(p)))


def nmi(y_true, y_pred) -> float:
    """Normalized mutual information, 2*I/(H(Y)+H(C)) with natural logs.

    Both labelings constant is defined as 1 (the 0/0 case); one constant
    labeling yields 0 through I = 0.
    """
    counts, _, _ = contingency(y_true, y_pred)
    n = int(counts.sum())
    row = counts.sum(axis=1)
    col = counts.sum(axis=0)
    h_true = _entropy(row, n)
    h_pred = _entropy(col, n)
    if h_true + h_pred == 0.0:
        return 1.0
    nz = counts > 0
    pij = counts[nz] / n
    outer = (row[:, None] * col[None, :])[nz] / (n * n)
    mi = float(np.sum(pij * np.log(pij / outer)))
    return 2.0 * mi / (h_true + h_pred)


def _comb2(x) -> int:
    x = int(x)
    return x * (x - 1) // 2


def ari(y_true, y_pred) -> float:
    """Adjusted Rand index via pair counts on the contingency table.

    Exact integer pair counts keep the result precise; a degenerate
    denominator (both partitions trivially identical in structure) is
    defined as 1.
    """
    counts, _, _ = contingency(y_true, y_pred)
    n = int(counts.sum())
    if n < 2:
        raise ShapeError("ari requires at least 2 samples")
    sum_cells = sum(_comb2(v) for v in counts.ravel())
    sum_rows = sum(_comb2(v) for v in counts.sum(axis=1))
    sum_cols = sum(_comb2(v) for v in counts.sum(axis=0))
    total = _comb2(n)
    expected = sum_rows * sum_cols / total
    maximum = (sum_rows + sum_cols) / 2.0
    if maximum == expected:
        return 1.0
    return (sum_cells - expected) / (maximum - expected)


@dataclass
class MetricsReport:
    acc: float
    nmi: float
    ari: float
    mapping: dict[int, int]

    def to_json(self) -> str:
        doc = {
            "acc": self.acc,
            "nmi": self.nmi,
            "ari": self.ari,
            "mapping": {str(k): v for k, v in sorted(self.mapping.items())},
        }
        return json.dumps(doc, sort_keys=True) + "\n"


def evaluate(y_true, y_pred) -> MetricsReport:
    acc_val, mapping = accuracy(y_true, y_pred)
    return MetricsReport(acc=acc_val, nmi=nmi(y_true, y_pred), ari=ari(y_true, y_pred), mapping=mapping)
