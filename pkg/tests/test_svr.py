import numpy as np
import pytest

import lemps.svr as svr_module
from lemps.svr import SvrModel, fit_svr, rbf_kernel


def linear_data(seed=0, n=30, p=3):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    y = X @ np.array([0.5, -0.3, 0.2][:p])
    return X, y


class TestRbfKernel:
    def test_identical_points(self):
        assert rbf_kernel([1.0, 2.0], [1.0, 2.0], 1.0) == 1.0

    def test_unit_distance(self):
        assert rbf_kernel([0.0], [1.0], 1.0) == pytest.approx(np.exp(-1.0), abs=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            a, b = rng.normal(size=4), rng.normal(size=4)
            assert rbf_kernel(a, b, 0.7) == rbf_kernel(b, a, 0.7)

    def test_range_and_errors(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            v = rbf_kernel(rng.normal(size=3), rng.normal(size=3), 2.0)
            assert 0.0 < v <= 1.0
        with pytest.raises(ValueError):
            rbf_kernel([1.0], [1.0, 2.0], 1.0)
        with pytest.raises(ValueError):
            rbf_kernel([1.0], [1.0], 0.0)


class TestFitSvr:
    def test_constant_target(self):
        X = np.random.default_rng(1).normal(size=(12, 3))
        model = fit_svr(X, np.full(12, 0.4), C=10.0, gamma=0.5, epsilon=0.01)
        assert len(model.dual_coefficients) == 0
        assert model.bias == pytest.approx(0.4)
        assert np.allclose(model.predict(X), 0.4)

    def test_noiseless_linear_interpolates_within_tube(self):
        X, y = linear_data(2)
        model = fit_svr(X, y, C=1e4, gamma=0.3, epsilon=0.01)
        assert model.converged
        assert np.mean((model.predict(X) - y) ** 2) < 1e-3

    def test_points_inside_tube_have_zero_dual(self):
        X, y = linear_data(3, n=40)
        tol = 1e-3
        model = fit_svr(X, y, C=100.0, gamma=0.5, epsilon=0.05, tol=tol)
        duals = np.zeros(len(y))
        duals[list(model.support_indices)] = model.dual_coefficients
        resid = np.abs(model.predict(X) - y)
        inside = resid < model.epsilon - tol
        assert np.all(duals[inside] == 0.0)

    def test_box_and_sum_constraints(self):
        for seed in range(5):
            rng = np.random.default_rng(seed)
            X = rng.normal(size=(25, 4))
            y = rng.normal(size=25)
            C = 10.0 ** rng.integers(0, 4)
            model = fit_svr(X, y, C=C, gamma=0.1, epsilon=0.02)
            assert np.all(np.abs(model.dual_coefficients) <= C)
            assert abs(np.sum(model.dual_coefficients)) <= 1e-9 * max(1.0, C)

    def test_dual_objective_monotone_nonincreasing(self):
        X, y = linear_data(4, n=25)
        _, trace = fit_svr(X, y, C=50.0, gamma=0.4, epsilon=0.02,
                           track_objective=True)
        trace = np.asarray(trace)
        assert trace.size > 5
        assert np.all(np.diff(trace) <= 1e-10)

    def test_nonconvergence_flag_records_violation(self):
        X, y = linear_data(5, n=40)
        model = fit_svr(X, y, C=1e4, gamma=0.1, epsilon=0.0, max_iter=3)
        assert not model.converged
        assert model.kkt_violation > 0

    def test_parameter_validation(self):
        X, y = linear_data(6)
        with pytest.raises(ValueError):
            fit_svr(X, y, C=0.0, gamma=1.0)
        with pytest.raises(ValueError):
            fit_svr(X, y, C=1.0, gamma=-1.0)
        with pytest.raises(ValueError):
            fit_svr(X, y, C=1.0, gamma=1.0, epsilon=-0.1)

    def test_width_mismatch(self):
        X, y = linear_data(7)
        model = fit_svr(X, y, C=1.0, gamma=0.5)
        with pytest.raises(ValueError):
            model.predict(np.zeros((2, X.shape[1] + 2)))


def kkt_status(model: SvrModel, X, y, slack):
    """Check complementary slackness of every training point."""
    f = model.predict(X)
    duals = np.zeros(len(y))
    duals[list(model.support_indices)] = model.dual_coefficients
    C, eps = model.C, model.epsilon
    for i in range(len(y)):
        r = f[i] - y[i]
        a = duals[i]
        if a == 0.0:
            if not abs(r) <= eps + slack:
                return False
        elif 0.0 < a < C:
            if not abs(r + eps) <= slack:
                return False
        elif a == C:
            if not r <= -eps + slack:
                return False
        elif -C < a < 0.0:
            if not abs(r - eps) <= slack:
                return False
        else:  # a == -C
            if not r >= eps - slack:
                return False
    return True


class TestSvrKkt:
    def test_kkt_certification_random_instances(self):
        rng = np.random.default_rng(9)
        checked = 0
        for _ in range(30):
            n, p = int(rng.integers(10, 40)), int(rng.integers(2, 5))
            X = rng.normal(size=(n, p))
            y = X @ rng.normal(size=p) + 0.1 * rng.normal(size=n)
            tol = 1e-3
            model = fit_svr(X, y, C=float(10.0 ** rng.integers(0, 3)),
                            gamma=float(10.0 ** -rng.integers(0, 3)),
                            epsilon=0.05, tol=tol)
            if model.converged:
                assert kkt_status(model, X, y, slack=tol)
                checked += 1
        assert checked >= 25


class TestSmoBackends:
    @pytest.mark.skipif(svr_module.compiled_smo is None,
                        reason="compiled kernel not built")
    def test_backends_agree(self):
        from lemps._smo_python import smo_solve as py_smo
        from lemps.linear.model import standardize_columns
        from lemps.svr import _rbf_matrix

        rng = np.random.default_rng(10)
        for _ in range(5):
            X = rng.normal(size=(20, 3))
            y = rng.normal(size=20)
            Z, _, _ = standardize_columns(X)
            K = np.ascontiguousarray(_rbf_matrix(np.ascontiguousarray(Z), np.ascontiguousarray(Z), 0.5))
            got_c = svr_module.compiled_smo(K, y, 10.0, 0.05, 1e-4, 10_000, False)
            got_p = py_smo(K, y, 10.0, 0.05, 1e-4, 10_000, False)
            assert np.max(np.abs(got_c[2] - got_p[2])) < 1e-10
            assert got_c[8] == got_p[8]  # same iteration count
