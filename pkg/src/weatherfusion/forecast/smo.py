"""Sequential minimal optimization for epsilon-insensitive RBF regression.

Works on the single-coefficient form beta_i = alpha_i - alpha_i* in
[-C, C] with sum(beta) = 0. Each step picks the maximally KKT-violating
pair via the running bias bounds (b_low from the interval lower ends,
b_up from the upper ends) and solves the two-variable subproblem exactly;
the objective there is piecewise quadratic because of the |beta| terms, so
candidates are evaluated per sign segment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .learners import median_pairwise_distance, rbf_kernel

SMO_C = 1.0
SMO_EPSILON = 0.1
SMO_TOLERANCE = 1e-3
SMO_MAX_PASSES = 10_000


def _bias_intervals(beta: np.ndarray, residual: np.ndarray, C: float, eps: float):
    """Admissible bias interval [lo_i, hi_i] implied by each point's KKT case."""
    lo = np.full(beta.shape, -np.inf)
    hi = np.full(beta.shape, np.inf)
    at_zero = beta == 0.0
    pos_in = (beta > 0.0) & (beta < C)
    neg_in = (beta < 0.0) & (beta > -C)
    at_upper = beta == C
    at_lower = beta == -C
    lo[at_zero] = residual[at_zero] - eps
    hi[at_zero] = residual[at_zero] + eps
    lo[pos_in] = hi[pos_in] = residual[pos_in] - eps
    lo[neg_in] = hi[neg_in] = residual[neg_in] + eps
    hi[at_upper] = residual[at_upper] - eps
    lo[at_lower] = residual[at_lower] + eps
    return lo, hi


@dataclass
class SMORegressor:
    """SVR trained by SMO; expects standardized targets (epsilon is absolute)."""

    C: float = SMO_C
    epsilon: float = SMO_EPSILON
    tolerance: float = SMO_TOLERANCE
    max_passes: int = SMO_MAX_PASSES
    lengthscale: float | None = None
    beta: np.ndarray | None = None
    bias: float = 0.0
    X_train: np.ndarray | None = None
    passes_used: int = field(default=0)

    def fit(self, X: np.ndarray, y: np.ndarray) -> "SMORegressor":
        n = X.shape[0]
        if self.lengthscale is None:
            self.lengthscale = median_pairwise_distance(X)
        K = rbf_kernel(X, X, self.lengthscale)
        beta = np.zeros(n)
        f0 = np.zeros(n)  # prediction without bias
        stalled = 0
        for passes in range(self.max_passes):
            residual = y - f0
            lo, hi = _bias_intervals(beta, residual, self.C, self.epsilon)
            i = int(np.argmax(lo))
            j = int(np.argmin(hi))
            violation = lo[i] - hi[j]
            if violation <= self.tolerance:
                self.passes_used = passes
                break
            t = self._pair_step(K, beta, residual, i, j)
            if t == 0.0:
                stalled += 1
                if stalled > 2:
                    self.passes_used = passes
                    break
            else:
                stalled = 0
                beta[i] += t
                beta[j] -= t
                f0 += t * K[:, i] - t * K[:, j]
        else:
            self.passes_used = self.max_passes
        residual = y - f0
        lo, hi = _bias_intervals(beta, residual, self.C, self.epsilon)
        b_low = float(np.max(lo))
        b_up = float(np.min(hi))
        if not np.isfinite(b_low):
            b_low = b_up
        if not np.isfinite(b_up):
            b_up = b_low
        self.bias = (b_low + b_up) / 2.0
        self.beta = beta
        self.X_train = X
        return self

    def _pair_step(self, K: np.ndarray, beta: np.ndarray, residual: np.ndarray, i: int, j: int) -> float:
        """Best change t applied as (beta_i + t, beta_j - t)."""
        C, eps = self.C, self.epsilon
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        t_min = max(-C - beta[i], beta[j] - C)
        t_max = min(C - beta[i], beta[j] + C)
        if t_max <= t_min:
            return 0.0
        # Objective change: 0.5*eta*t^2 - t*(r_i - r_j) + eps*(|b_i+t| + |b_j-t| - |b_i| - |b_j|)
        slope = residual[i] - residual[j]

        def delta(t: float) -> float:
            return (
                0.5 * eta * t * t
                - t * slope
                + eps * (abs(beta[i] + t) + abs(beta[j] - t) - abs(beta[i]) - abs(beta[j]))
            )

        cuts = sorted({t_min, t_max, *(c for c in (-beta[i], beta[j]) if t_min < c < t_max)})
        candidates = set(cuts)
        if eta > 0.0:
            for left, right in zip(cuts[:-1], cuts[1:]):
                mid = (left + right) / 2.0
                s_i = 1.0 if beta[i] + mid >= 0 else -1.0
                s_j = 1.0 if beta[j] - mid >= 0 else -1.0
                t_star = (slope - eps * (s_i - s_j)) / eta
                candidates.add(min(max(t_star, left), right))
        best_t = 0.0
        best_val = 0.0
        for t in candidates:
            val = delta(t)
            if val < best_val - 1e-15:
                best_val = val
                best_t = t
        return best_t

    def predict(self, X: np.ndarray) -> np.ndarray:
        return rbf_kernel(X, self.X_train, self.lengthscale) @ self.beta + self.bias

    def kkt_report(self, y: np.ndarray) -> float:
        """Largest per-point violation of the optimality intervals at the
        chosen bias; near zero at convergence."""
        K = rbf_kernel(self.X_train, self.X_train, self.lengthscale)
        residual = y - K @ self.beta
        lo, hi = _bias_intervals(self.beta, residual, self.C, self.epsilon)
        below = np.where(np.isfinite(lo), lo - self.bias, -np.inf)
        above = np.where(np.isfinite(hi), self.bias - hi, -np.inf)
        return float(max(np.max(below), np.max(above), 0.0))
