import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import TABLE_MODELS, model, random_counts
from toricmle.birch import SolverOptions, moment_residual, solve_birch, target_moments
from toricmle.errors import ConvergenceError, DomainError, PreconditionError
from toricmle.model import automorphisms, log_likelihood, parametrize


def test_symmetric_fixtures():
    r = solve_birch(model("S3"), [1, 1, 1, 1])
    assert np.max(np.abs(r.p_hat - 0.25)) <= 1e-12
    assert r.theta_hat[-1] == 1
    r = solve_birch(model("S4"), [1] * 5)
    assert np.max(np.abs(r.p_hat - 0.2)) <= 1e-12


def test_data_scaling_leaves_estimate_unchanged():
    a = solve_birch(model("S3"), [3, 5, 7, 11]).p_hat
    b = solve_birch(model("S3"), [6, 10, 14, 22]).p_hat
    assert np.max(np.abs(a - b)) <= 1e-13


def test_printed_cubic_moment_system_holds():
    u = np.array([3, 5, 7, 11])
    N = u.sum()
    p = solve_birch(model("S3"), u).p_hat
    for k in range(3):
        assert 3 * p[k] + p[3] == pytest.approx((3 * u[k] + u[3]) / N, abs=1e-13)


def test_moment_residual_direct():
    S3 = model("S3")
    # A p for uniform p is (1,1,1); b/N for u=(4,1,1,2) is (11, 10, 5)/8
    assert moment_residual(S3, [0.25] * 4, [4, 1, 1, 2]) == pytest.approx(3 / 8, abs=1e-15)
    assert moment_residual(S3, parametrize(S3, [1, 1, 1]), [2, 2, 2, 2]) == 0


def test_zero_counts_rejected():
    with pytest.raises(PreconditionError, match="strictly positive"):
        solve_birch(model("S3"), [1, 0, 2, 3])


def test_bad_options():
    with pytest.raises(DomainError):
        SolverOptions(tol=0)
    with pytest.raises(DomainError):
        SolverOptions(max_iter=0)


def test_non_convergence_reports_last_iterate():
    with pytest.raises(ConvergenceError) as info:
        solve_birch(model("S6"), [5, 900, 3, 700, 1, 999, 2], SolverOptions(max_iter=1, restarts=0))
    assert info.value.last_iterate is not None
    assert info.value.residual > 0


@pytest.mark.parametrize("label", TABLE_MODELS)
def test_certificates_on_random_data(label, rng):
    m = model(label)
    for _ in range(10):
        u = random_counts(rng, m.m)
        r = solve_birch(m, u)
        assert r.moment_residual <= 1e-12
        assert r.variety_residual <= 1e-11
        assert np.all(r.p_hat > 0) and abs(r.p_hat.sum() - 1) <= 1e-12


@pytest.mark.parametrize("label", ["S3", "S4", "S5", "S6''"])
def test_uniqueness_probe(label, rng):
    m = model(label)
    u = random_counts(rng, m.m)
    ref = solve_birch(m, u).p_hat
    for _ in range(20):
        start = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=m.d))
        assert np.max(np.abs(solve_birch(m, u, theta0=start).p_hat - ref)) <= 1e-8


@pytest.mark.parametrize("label", TABLE_MODELS)
def test_optimality_probe(label, rng):
    m = model(label)
    u = random_counts(rng, m.m)
    r = solve_birch(m, u)
    best = log_likelihood(r.p_hat, u)
    for _ in range(50):
        theta = r.theta_hat * (1 + 1e-3 * rng.standard_normal(m.d))
        assert log_likelihood(parametrize(m, theta), u) <= best + 1e-9


@pytest.mark.parametrize("label", TABLE_MODELS)
def test_equivariance_under_automorphisms(label, rng):
    m = model(label)
    u = np.array(random_counts(rng, m.m))
    p = solve_birch(m, u).p_hat
    for perm in automorphisms(m):
        # perm maps coordinate i to perm[i]
        v = np.empty_like(u)
        v[list(perm)] = u
        q = solve_birch(m, v).p_hat
        assert np.max(np.abs(q[list(perm)] - p)) <= 1e-9


@given(st.lists(st.integers(1, 1000), min_size=5, max_size=5))
def test_estimate_matches_target_moments(u):
    m = model("S4_A3")
    r = solve_birch(m, u)
    assert np.max(np.abs(m.array @ r.p_hat - target_moments(m, u))) <= 1e-12
