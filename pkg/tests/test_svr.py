import numpy as np
import pytest
from sklearn.exceptions import ConvergenceWarning

from vlcloc.estimators import SVR
from vlcloc.estimators.svr import rbf_kernel, solve_smo


def kkt_residual(K, z, C, eps, res):
    """Largest violation of the epsilon-SVR optimality conditions.

    Computed from the primal view of each training point: with residual
    r_i = z_i - f(x_i), free multipliers need |r_i| = eps, zero multipliers
    |r_i| <= eps, bounded ones |r_i| >= eps, with the right sign.
    """
    f = K @ res.coef - res.rho
    r = z - f
    a, a_star = res.beta[: len(z)], res.beta[len(z):]
    worst = 0.0
    for ri, ai, si in zip(r, a, a_star):
        coef = ai - si
        if coef == 0:
            worst = max(worst, abs(ri) - eps)
        elif 0 < coef < C:
            worst = max(worst, abs(ri - eps))
        elif -C < coef < 0:
            worst = max(worst, abs(ri + eps))
        elif coef >= C:
            worst = max(worst, eps - ri)
        else:
            worst = max(worst, eps + ri)
    return worst


def test_epsilon_tube_on_identity():
    X = np.arange(10.0)[:, None]
    y = np.arange(10.0)
    m = SVR(C=10.0, epsilon=0.1, tol=1e-8).fit(X, y)
    assert m.converged_
    assert np.max(np.abs(m.predict(X) - y)) <= 0.1 + 1e-6


@pytest.mark.parametrize("seed", [0, 1])
def test_kkt_conditions_on_toy_regression(seed):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-2, 2, size=(60, 2))
    y = np.sin(X[:, 0]) + 0.3 * X[:, 1] + 0.05 * rng.normal(size=60)
    C, eps = 5.0, 0.05
    K = rbf_kernel(X, X, 0.5)
    res = solve_smo(K, y, C, eps, tol=1e-3)
    assert res.converged
    assert res.gap < 1e-3
    assert kkt_residual(K, y, C, eps, res) < 1e-3
    # dual feasibility
    assert abs(res.coef.sum()) < 1e-9
    assert np.all(res.beta >= 0) and np.all(res.beta <= C)
    # complementarity: never both multipliers of a point positive
    n = len(y)
    assert not np.any((res.beta[:n] > 0) & (res.beta[n:] > 0))


def test_dual_objective_matches_quadratic_program():
    # compare against a dense QP solve of the same dual
    from scipy.optimize import minimize

    rng = np.random.default_rng(3)
    X = rng.uniform(-1, 1, size=(12, 1))
    y = X[:, 0] ** 2
    C, eps, gamma = 2.0, 0.05, 1.0
    K = rbf_kernel(X, X, gamma)
    res = solve_smo(K, y, C, eps, tol=1e-10)

    def dual(v):
        a, s = v[:12], v[12:]
        c = a - s
        return 0.5 * c @ K @ c + eps * (a + s).sum() - y @ c

    ref = minimize(dual, np.zeros(24), method="SLSQP", bounds=[(0, C)] * 24,
                   constraints=[{"type": "eq", "fun": lambda v: v[:12].sum() - v[12:].sum()}],
                   options={"ftol": 1e-14, "maxiter": 1000})
    assert dual(res.beta) <= ref.fun + 1e-7


def test_gamma_scale():
    X = np.random.default_rng(0).normal(size=(30, 4)) * 3
    m = SVR().fit(X, X[:, 0])
    assert m.gamma_ == pytest.approx(1.0 / (4 * X.var()))


def test_nonconvergence_warns():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(80, 2))
    with pytest.warns(ConvergenceWarning, match="KKT gap"):
        SVR(max_iter=3).fit(X, rng.normal(size=80))


def test_invalid_hyperparameters():
    with pytest.raises(ValueError):
        SVR(C=0).fit(np.zeros((3, 1)), np.zeros(3))
    with pytest.raises(ValueError):
        SVR(gamma=-1.0).fit(np.ones((3, 1)) * [[1], [2], [3]], np.zeros(3))
