"""Epsilon-insensitive support vector regression solved by SMO.

The dual is written over ``2n`` variables ``beta = [alpha; alpha_star]``
with labels ``s = [+1]*n + [-1]*n``::

    min 1/2 beta' Q beta + p' beta,   Q_ab = s_a s_b K(a mod n, b mod n)
    s.t. s' beta = 0,  0 <= beta <= C,  p = [eps - z; eps + z]

Each step updates the maximal-violating pair chosen with second-order
information. The stopping gap ``m(beta) - M(beta)`` is the KKT residual.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import ConvergenceWarning

from ._base import check_array, check_is_fitted, check_n_features, check_X_y

log = logging.getLogger(__name__)

__all__ = ["SVR", "rbf_kernel", "solve_smo", "SmoResult"]

TAU = 1e-12


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    sq = (np.einsum("ij,ij->i", A, A)[:, None] + np.einsum("ij,ij->i", B, B)[None, :]
          - 2.0 * (A @ B.T))
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


@dataclass
class SmoResult:
    coef: np.ndarray  # alpha - alpha_star
    rho: float
    gap: float
    n_iter: int
    converged: bool
    beta: np.ndarray
    grad: np.ndarray


def solve_smo(K: np.ndarray, z: np.ndarray, C: float, epsilon: float,
              tol: float = 1e-3, max_iter: int = 1_000_000) -> SmoResult:
    n = len(z)
    s = np.concatenate([np.ones(n), -np.ones(n)])
    pos = s > 0
    beta = np.zeros(2 * n)
    G = np.concatenate([epsilon - z, epsilon + z])
    Kd = np.diag(K).copy()
    Kd2 = np.concatenate([Kd, Kd])

    gap = np.inf
    it = 0
    converged = False
    while it < max_iter:
        at_upper = beta >= C
        at_lower = beta <= 0
        up = np.where(pos, ~at_upper, ~at_lower)
        low = np.where(pos, ~at_lower, ~at_upper)
        sG = s * G

        cand = np.where(up, -sG, -np.inf)
        i = int(np.argmax(cand))
        g_max = cand[i]
        g_max2 = np.max(np.where(low, sG, -np.inf))
        gap = g_max + g_max2
        if gap < tol:
            converged = True
            break

        ii = i % n
        Ki = K[ii]
        Ki2 = np.concatenate([Ki, Ki])
        b = g_max + sG
        a = Kd[ii] + Kd2 - 2.0 * Ki2
        a = np.where(a > 0, a, TAU)
        score = np.where(low & (b > 0), -(b * b) / a, np.inf)
        j = int(np.argmin(score))
        if not np.isfinite(score[j]):
            converged = True
            break
        jj = j % n
        Kj = K[jj]

        old_i, old_j = beta[i], beta[j]
        quad = Kd[ii] + Kd[jj] - 2.0 * K[ii, jj]
        if quad <= 0:
            quad = TAU
        if s[i] != s[j]:
            delta = (-G[i] - G[j]) / quad
            diff = beta[i] - beta[j]
            bi, bj = beta[i] + delta, beta[j] + delta
            if diff > 0:
                if bj < 0:
                    bj, bi = 0.0, diff
            elif bi < 0:
                bi, bj = 0.0, -diff
            if diff > 0:
                if bi > C:
                    bi, bj = C, C - diff
            elif bj > C:
                bj, bi = C, C + diff
        else:
            delta = (G[i] - G[j]) / quad
            total = beta[i] + beta[j]
            bi, bj = beta[i] - delta, beta[j] + delta
            if total > C:
                if bi > C:
                    bi, bj = C, total - C
            elif bj < 0:
                bj, bi = 0.0, total
            if total > C:
                if bj > C:
                    bj, bi = C, total - C
            elif bi < 0:
                bi, bj = 0.0, total
        beta[i], beta[j] = bi, bj

        d_i = (bi - old_i) * s[i]
        d_j = (bj - old_j) * s[j]
        # G += Q[:, i] d_beta_i + Q[:, j] d_beta_j with Q[:, i] = s * s_i * K[i mod n]
        upd = d_i * Ki + d_j * Kj
        G[:n] += upd
        G[n:] -= upd
        it += 1

    coef = beta[:n] - beta[n:]
    return SmoResult(coef=coef, rho=_rho(beta, G, s, C), gap=float(gap), n_iter=it,
                     converged=converged, beta=beta, grad=G)


def _rho(beta, G, s, C) -> float:
    sG = s * G
    at_upper = beta >= C
    at_lower = beta <= 0
    free = ~at_upper & ~at_lower
    if free.any():
        return float(sG[free].mean())
    pos = s > 0
    ub_mask = (at_upper & ~pos) | (at_lower & pos)
    lb_mask = (at_upper & pos) | (at_lower & ~pos)
    ub = sG[ub_mask].min() if ub_mask.any() else np.inf
    lb = sG[lb_mask].max() if lb_mask.any() else -np.inf
    return float((ub + lb) / 2)


class SVR(RegressorMixin, BaseEstimator):
    """RBF-kernel epsilon-SVR.

    ``gamma="scale"`` uses ``1 / (n_features * X.var())``.
    """

    def __init__(self, C: float = 10.0, epsilon: float = 0.05, gamma="scale",
                 tol: float = 1e-3, max_iter: int = 1_000_000):
        self.C = C
        self.epsilon = epsilon
        self.gamma = gamma
        self.tol = tol
        self.max_iter = max_iter

    def _gamma(self, X) -> float:
        if self.gamma == "scale":
            var = X.var()
            return 1.0 / (X.shape[1] * var) if var > 0 else 1.0
        return float(self.gamma)

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        if not self.C > 0 or not self.epsilon >= 0:
            raise ValueError(f"need C > 0 and epsilon >= 0, got C={self.C}, epsilon={self.epsilon}")
        gamma = self._gamma(X)
        if not gamma > 0:
            raise ValueError(f"gamma must be positive, got {gamma}")
        K = rbf_kernel(X, X, gamma)
        res = solve_smo(K, y, float(self.C), float(self.epsilon), float(self.tol), int(self.max_iter))
        if not res.converged:
            warnings.warn(f"SMO stopped after {res.n_iter} iterations with KKT gap {res.gap:.3g} "
                          f"(tol {self.tol})", ConvergenceWarning)
        sv = np.flatnonzero(res.coef != 0)
        self.support_ = sv
        self.support_vectors_ = X[sv].copy()
        self.dual_coef_ = res.coef[sv].copy()
        self.intercept_ = -res.rho
        self.gamma_ = gamma
        self.n_iter_ = res.n_iter
        self.kkt_gap_ = res.gap
        self.converged_ = res.converged
        self.n_features_in_ = X.shape[1]
        log.debug("SVR fit: %d iterations, gap %.3g, %d support vectors", res.n_iter, res.gap, len(sv))
        return self

    def predict(self, X):
        check_is_fitted(self)
        X = check_array(X)
        check_n_features(self, X)
        if len(self.support_vectors_) == 0:
            return np.full(len(X), self.intercept_)
        out = np.empty(len(X))
        for start in range(0, len(X), 2048):
            Kx = rbf_kernel(X[start:start + 2048], self.support_vectors_, self.gamma_)
            out[start:start + 2048] = Kx @ self.dual_coef_ + self.intercept_
        return out
