"""Base learners operating on standardized lag matrices.

All learners fit in standardized space; the engine wraps them with the
dataset's standardization so callers see original units. Training is
deterministic given (dataset, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import NumericError

GP_SIGNAL_VARIANCE = 1.0
GP_NOISE_STD = 0.1
GP_JITTER_START = 1e-10
GP_JITTER_LIMIT = 1e-4

MLP_LEARNING_RATE = 0.01
MLP_EPOCHS = 2000


def median_pairwise_distance(X: np.ndarray) -> float:
    """Median Euclidean distance over all point pairs; 1.0 when degenerate.

    Zero distances (duplicate rows) are excluded so the scale stays usable.
    """
    n = X.shape[0]
    if n < 2:
        return 1.0
    sq = np.sum(X**2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    iu = np.triu_indices(n, k=1)
    dists = np.sqrt(np.maximum(d2[iu], 0.0))
    positive = dists[dists > 0.0]
    if positive.size == 0:
        return 1.0
    return float(np.median(positive))


def rbf_kernel(A: np.ndarray, B: np.ndarray, lengthscale: float, signal: float = GP_SIGNAL_VARIANCE) -> np.ndarray:
    a2 = np.sum(A**2, axis=1)[:, None]
    b2 = np.sum(B**2, axis=1)[None, :]
    d2 = np.maximum(a2 + b2 - 2.0 * (A @ B.T), 0.0)
    return signal * np.exp(-d2 / (2.0 * lengthscale**2))


@dataclass
class LinearRegressionLearner:
    """Least squares on standardized features (SVD-based, minimum norm)."""

    coef: np.ndarray | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "LinearRegressionLearner":
        coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        if not np.all(np.isfinite(coef)):
            raise NumericError("non-finite least-squares solution")
        self.coef = coef
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        return X @ self.coef


@dataclass
class GaussianProcessLearner:
    """Zero-mean GP regression with an RBF kernel solved by Cholesky.

    The lengthscale defaults to the median pairwise training distance; the
    Gram matrix gets escalating diagonal jitter before giving up.
    """

    noise_std: float = GP_NOISE_STD
    lengthscale: float | None = None
    X_train: np.ndarray | None = None
    alpha: np.ndarray | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "GaussianProcessLearner":
        if self.lengthscale is None:
            self.lengthscale = median_pairwise_distance(X)
        K = rbf_kernel(X, X, self.lengthscale)
        K[np.diag_indices_from(K)] += self.noise_std**2
        n = K.shape[0]
        jitter = 0.0
        next_jitter = GP_JITTER_START
        while True:
            try:
                L = np.linalg.cholesky(K + jitter * np.eye(n))
                break
            except np.linalg.LinAlgError:
                if next_jitter > GP_JITTER_LIMIT:
                    raise NumericError("Cholesky failed at maximum jitter") from None
                jitter = next_jitter
                next_jitter *= 10.0
        self.alpha = np.linalg.solve(L.T, np.linalg.solve(L, y))
        self.X_train = X
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        k_star = rbf_kernel(X, self.X_train, self.lengthscale)
        return k_star @ self.alpha


@dataclass
class MLPLearner:
    """One tanh hidden layer of ceil((features+1)/2) units, linear output,
    trained by full-batch gradient descent with a zero-initialized head."""

    seed: int = 0
    learning_rate: float = MLP_LEARNING_RATE
    epochs: int = MLP_EPOCHS
    params: dict = field(default_factory=dict)

    def fit(self, X: np.ndarray, y: np.ndarray) -> "MLPLearner":
        n, f = X.shape
        hidden = math.ceil((f + 1) / 2)
        rng = np.random.default_rng(self.seed)
        w1 = rng.normal(0.0, 1.0 / math.sqrt(max(f, 1)), size=(f, hidden))
        b1 = np.zeros(hidden)
        w2 = np.zeros(hidden)
        b2 = 0.0
        for _ in range(self.epochs):
            h = np.tanh(X @ w1 + b1)
            pred = h @ w2 + b2
            err = pred - y
            grad_w2 = h.T @ err / n
            grad_b2 = err.mean()
            back = np.outer(err, w2) * (1.0 - h**2)
            grad_w1 = X.T @ back / n
            grad_b1 = back.mean(axis=0)
            w2 -= self.learning_rate * grad_w2
            b2 -= self.learning_rate * grad_b2
            w1 -= self.learning_rate * grad_w1
            b1 -= self.learning_rate * grad_b1
        if not (np.all(np.isfinite(w1)) and np.all(np.isfinite(w2))):
            raise NumericError("MLP training diverged")
        self.params = {"w1": w1, "b1": b1, "w2": w2, "b2": b2}
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        p = self.params
        return np.tanh(X @ p["w1"] + p["b1"]) @ p["w2"] + p["b2"]
