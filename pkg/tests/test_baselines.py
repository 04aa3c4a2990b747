import cvxpy as cp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vorpca import (FactorPair, ParameterError, Trl21Config, e2_objective, e21_objective,
                    gen_toy_line, pca_fit, principal_angles, r1pca_fit, svt_shrink,
                    trl21pca_fit)
from vorpca.baselines import trl21_objective
from vorpca.datasets import canonical_toy_line
from vorpca.recipes import outliers_moved_out


def test_objectives_hand_computed():
    X = np.array([[3.0, 0.0], [4.0, 1.0]])
    F = FactorPair(np.zeros((2, 1)), np.zeros((1, 2)))
    assert e2_objective(X, F) == 26.0
    assert e21_objective(X, F) == 6.0
    with pytest.raises(ParameterError):
        e21_objective(np.zeros((3, 2)), F)


def test_pca_is_eckart_young(rng):
    X = rng.standard_normal((7, 5))
    s = np.linalg.svd(X, compute_uv=False)
    assert e2_objective(X, pca_fit(X, 2)) == pytest.approx(np.sum(s[2:] ** 2))
    assert e2_objective(X, pca_fit(X, 5)) < 1e-20


def _e21_line(X, theta):
    u = np.array([np.cos(theta), np.sin(theta)])
    return np.sum(np.linalg.norm(X - np.outer(u, u @ X), axis=0))


def test_r1pca_matches_brute_force_on_toy_line():
    X = gen_toy_line().data
    thetas = np.linspace(0, np.pi, 200001)
    best = min(_e21_line(X, t) for t in thetas[::100])
    t0 = thetas[::100][np.argmin([_e21_line(X, t) for t in thetas[::100]])]
    fine = np.linspace(t0 - 0.02, t0 + 0.02, 40001)
    best = min(best, min(_e21_line(X, t) for t in fine))
    r1 = r1pca_fit(X, 1)
    assert e21_objective(X, r1) == pytest.approx(best, rel=1e-7)
    assert abs(r1.U[1, 0]) < 0.01  # close to the inlier direction (1, 0)


def test_r1pca_trace_and_info(rng):
    X = rng.standard_normal((5, 40))
    X[:, :5] *= 20
    info = r1pca_fit(X, 2, return_info=True)
    tr = np.asarray(info.objective_trace)
    assert np.all(np.diff(tr) <= 0)
    assert tr[0] == pytest.approx(e21_objective(X, pca_fit(X, 2)))
    assert tr[-1] == pytest.approx(e21_objective(X, info.factors))
    np.testing.assert_allclose(info.factors.U.T @ info.factors.U, np.eye(2), atol=1e-12)


def test_r1pca_init_and_errors(rng):
    X = rng.standard_normal((4, 10))
    F = pca_fit(X, 1)
    a = r1pca_fit(X, 1)
    b = r1pca_fit(X, 1, init=F)
    np.testing.assert_array_equal(a.product(), b.product())
    with pytest.raises(ParameterError):
        r1pca_fit(X, 5)
    with pytest.raises(ParameterError):
        r1pca_fit(X, 1, init=pca_fit(X, 2))


def test_r1pca_exact_low_rank(rng):
    X = rng.standard_normal((5, 2)) @ rng.standard_normal((2, 12))
    assert e21_objective(X, r1pca_fit(X, 2)) < 1e-10 * np.linalg.norm(X)


def test_svt_examples():
    np.testing.assert_allclose(svt_shrink(np.diag([3.0, 1.0]), 2.0), np.diag([1.0, 0.0]))
    assert not svt_shrink(np.eye(3), 1.0).any()
    assert svt_shrink(np.eye(3), 5.0).shape == (3, 3)
    for beta in (0.0, -1.0, np.nan):
        with pytest.raises(ParameterError):
            svt_shrink(np.eye(2), beta)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(-10, 10)), st.floats(1e-3, 20))
def test_svt_spectrum_and_rank(X, beta):
    S = svt_shrink(X, beta)
    sx = np.linalg.svd(X, compute_uv=False)
    ss = np.linalg.svd(S, compute_uv=False)
    np.testing.assert_allclose(ss, np.maximum(sx - beta, 0), atol=1e-9 * (1 + sx.max()))
    assert np.linalg.matrix_rank(S, tol=1e-9 * (1 + sx.max())) <= np.sum(sx > beta)


def test_trl21_config_validation():
    for kw in (dict(beta=0.0), dict(beta=1.0, penalty=-1.0), dict(beta=1.0, primal_tol=0.0),
               dict(beta=1.0, max_iters=0), dict(beta=np.inf)):
        with pytest.raises(ParameterError):
            trl21pca_fit(np.eye(2), Trl21Config(**kw))


@pytest.mark.parametrize("seed, beta", [(0, 1.5), (1, 1.5), (1, 2.0), (2, 2.0)])
def test_trl21_matches_conic_solver(seed, beta):
    # a rank-one signal plus noise; for these beta the minimizer is neither
    # X nor 0
    rng = np.random.default_rng(seed)
    X = 2 * np.outer(rng.standard_normal(4), rng.standard_normal(6))
    X += 0.3 * rng.standard_normal((4, 6))
    Z = cp.Variable((4, 6))
    prob = cp.Problem(cp.Minimize(cp.sum(cp.norm(X - Z, 2, axis=0)) + beta * cp.normNuc(Z)))
    prob.solve(solver="SCS", eps=1e-10, max_iters=200000)
    info = trl21pca_fit(X, Trl21Config(beta=beta, primal_tol=1e-10, dual_tol=1e-10,
                                       max_iters=200000), return_info=True)
    assert info.converged
    # not one of the trivial answers
    assert 0 < np.linalg.norm(info.Z) and np.linalg.norm(info.Z - X) > 1e-3
    assert info.objective == pytest.approx(prob.value, rel=1e-6)
    assert info.objective == pytest.approx(trl21_objective(X, info.Z, beta), rel=1e-15)


def test_trl21_extremes(rng):
    X = rng.standard_normal((5, 8))
    big = trl21pca_fit(X, Trl21Config(beta=1e3))
    assert not big.any()
    small = trl21pca_fit(X, Trl21Config(beta=1e-4, primal_tol=1e-10, dual_tol=1e-10))
    assert np.linalg.norm(small - X) < 1e-3
    info = trl21pca_fit(X, Trl21Config(beta=1.0), return_info=True)
    assert info.objective <= min(trl21_objective(X, np.zeros_like(X), 1.0),
                                 trl21_objective(X, X, 1.0)) + 1e-9


def test_trl21_spectrum_downshift(rng):
    X = rng.standard_normal((6, 10))
    X[:, :2] += 5
    sx = np.linalg.svd(X, compute_uv=False)
    for beta in (0.5, 1.0, 2.0):
        sz = np.linalg.svd(trl21pca_fit(X, Trl21Config(beta=beta)), compute_uv=False)
        assert np.all(sz <= sx * (1 + 1e-9))


def _line_angle(U, direction):
    return principal_angles(U, np.asarray(direction, float)[:, None]).max()


def test_toy_line_pca_tilts_and_r1pca_does_not():
    ds = gen_toy_line()
    X = ds.data
    assert _line_angle(pca_fit(X, 1).U, (1, 0)) > 0.1
    assert _line_angle(r1pca_fit(X, 1).U, (1, 0)) < 0.05


@pytest.mark.parametrize("seed", range(20))
def test_r1pca_follows_inliers(seed):
    # The L21 and L2 fits of the inliers themselves differ by an angle
    # proportional to the inlier noise (median ~0.01 rad at sigma 0.1),
    # so the comparison uses the same layout with sigma 0.01.
    spec = canonical_toy_line()
    spec.seed, spec.inlier_noise_sigma = seed, 0.01
    ds = gen_toy_line(spec)
    r1 = r1pca_fit(ds.data, 1)
    inlier_pca = pca_fit(ds.data[:, ds.labels == 0], 1)
    assert principal_angles(r1.U, inlier_pca.U).max() < 1e-2


def test_r1pca_far_outliers_same_line():
    ds = gen_toy_line()
    X = ds.data
    r1 = r1pca_fit(X, 1)
    out = np.flatnonzero(ds.labels == 1)
    Xb = outliers_moved_out(X, r1.product(), out, 10.0)
    # started from the solution on the original data; a cold start can
    # settle on a line through the far outliers instead
    rb = r1pca_fit(Xb, 1, init=FactorPair(r1.U, r1.U.T @ Xb))
    assert principal_angles(r1.U, rb.U).max() < 1e-3


def test_pca_full_rank_and_errors(rng):
    X = rng.standard_normal((4, 6))
    assert np.linalg.norm(pca_fit(X, 4).product() - X) < 1e-10 * np.linalg.norm(X)
    for k in (0, 5):
        with pytest.raises(ParameterError):
            pca_fit(X, k)


def test_objective_cross_check(rng):
    from vorpca import frobenius_norm, l21_norm
    X = rng.standard_normal((5, 6))
    F = FactorPair(rng.standard_normal((5, 2)), rng.standard_normal((2, 6)))
    assert e2_objective(X, F) == pytest.approx(frobenius_norm(X - F.product()) ** 2)
    assert e21_objective(X, F) == pytest.approx(l21_norm(X - F.product()))
    U, s, V = np.linalg.svd(X, full_matrices=False)
    exact = FactorPair(U * s, V)
    assert e2_objective(X, exact) < 1e-24 and e21_objective(X, exact) < 1e-11


def test_svt_documented_examples(rng):
    X = rng.standard_normal((4, 5))
    s1 = np.linalg.svd(X, compute_uv=False)[0]
    assert not svt_shrink(X, s1).any()
    np.testing.assert_allclose(svt_shrink(np.diag([3.0, 1.0]), 1.0), np.diag([2.0, 0.0]),
                               atol=1e-15)
    # numeric minimization over diagonal Z, 1/2-scaled quadratic term
    grid = np.linspace(-1, 4, 5001)
    f = lambda z, x: 0.5 * (x - z) ** 2 + 1.0 * abs(z)
    assert grid[np.argmin(f(grid, 3.0))] == pytest.approx(2.0, abs=1e-6)
    assert grid[np.argmin(f(grid, 1.0))] == pytest.approx(0.0, abs=1e-6)
    assert np.linalg.norm(svt_shrink(X, 1e-9) - X) < 1e-8


@pytest.mark.parametrize("x, beta, expected", [(2.0, 0.5, 2.0), (-3.0, 0.9, -3.0),
                                               (2.0, 1.5, 0.0), (-1.0, 4.0, 0.0)])
def test_trl21_scalar_case(x, beta, expected):
    Z = trl21pca_fit(np.array([[x]]), Trl21Config(beta=beta, primal_tol=1e-12,
                                                  dual_tol=1e-12, max_iters=100000))
    grid = np.linspace(-5, 5, 100001)
    oracle = grid[np.argmin(np.abs(x - grid) + beta * np.abs(grid))]
    assert oracle == pytest.approx(expected, abs=1e-4)
    assert Z[0, 0] == pytest.approx(expected, abs=1e-6)


def test_trl21_large_beta_objective(rng):
    from vorpca import l21_norm
    X = rng.standard_normal((3, 5))
    info = trl21pca_fit(X, Trl21Config(beta=1e4), return_info=True)
    assert not info.Z.any()
    assert info.objective == pytest.approx(l21_norm(X))


def test_trl21_unconverged_reports_flag(rng):
    X = rng.standard_normal((6, 8))
    info = trl21pca_fit(X, Trl21Config(beta=1.5, max_iters=2, primal_tol=1e-14,
                                       dual_tol=1e-14), return_info=True)
    assert not info.converged and info.iterations == 2
    assert np.all(np.isfinite(info.Z))
