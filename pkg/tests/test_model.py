import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import TABLE_MODELS, model
from toricmle.errors import DomainError, MalformedInputError
from toricmle.lattice import catalog
from toricmle.model import (
    Binomial,
    DataVector,
    ToricModel,
    degree_of_variety,
    is_automorphism,
    kernel_binomials,
    log_likelihood,
    model_from_json,
    model_to_json,
    parametrize,
    parse_binomial,
    sufficient_statistic,
    torus_fiber_degree,
    variety_residual,
)

S3 = model("S3")
S4 = model("S4")


def test_parametrize_examples():
    assert np.allclose(parametrize(S3, [1, 1, 1]), [0.25] * 4, atol=1e-15)
    assert np.allclose(parametrize(S3, [2, 1, 1]), np.array([4, 2, 1, 2]) / 9, atol=1e-15)
    with pytest.raises(DomainError):
        parametrize(S3, [1, 0, 1])
    with pytest.raises(DomainError):
        parametrize(S3, [1, -2, 1])


def test_sufficient_statistic_examples():
    assert sufficient_statistic(S3, [1, 1, 1, 1]) == (4, 4, 4)
    assert sufficient_statistic(S4, [1, 1, 1, 1, 1]) == (5, 5, 5)
    with pytest.raises(DomainError):
        DataVector([0, 0, 0, 0])
    with pytest.raises(DomainError):
        sufficient_statistic(S3, [1, 2, 3])


def test_kernel_binomial_examples():
    (b,) = kernel_binomials(S3)
    assert b.vector in {(-1, -1, -1, 3), (1, 1, 1, -3)}
    assert str(b) == "p4^3 - p1*p2*p3"
    assert kernel_binomials(ToricModel([[1, 0], [0, 1]])) == []
    # S4: same lattice as the two printed quadrics
    printed = {(1, 0, 0, 1, -2), (0, 1, 1, 0, -2)}
    vecs = [np.array(b.vector) for b in kernel_binomials(S4)]
    for v in printed:
        sol, res, *_ = np.linalg.lstsq(np.array(vecs).T, np.array(v), rcond=None)
        assert np.allclose(sol, np.round(sol)) and np.allclose(np.array(vecs).T @ np.round(sol), v)


def test_variety_residual_examples():
    assert variety_residual(S3, [0.25] * 4) == 0
    assert variety_residual(S3, [0.4, 0.2, 0.2, 0.2]) == pytest.approx(0.008, abs=1e-15)
    with pytest.raises(DomainError):
        variety_residual(S3, [0.5, 0.5, 0, 0])


def test_log_likelihood_examples():
    assert log_likelihood([0.25] * 4, [1, 1, 1, 1]) == pytest.approx(4 * math.log(0.25), abs=1e-14)
    p = np.array([0.1, 0.2, 0.3, 0.4])
    u = [3, 1, 4, 1]
    assert log_likelihood(2 * p, u) == pytest.approx(log_likelihood(p, u), abs=1e-12)
    assert log_likelihood([1, 0, 0, 0], [1, 1, 0, 0]) == -math.inf


def test_model_validation():
    with pytest.raises(MalformedInputError):
        ToricModel([[1, 2], [1, 1]])
    with pytest.raises(MalformedInputError):
        ToricModel([[-1, 1], [2, 0]])


def test_parse_binomial():
    b = parse_binomial("p4^3 - p1*p2*p3", 4)
    assert b == Binomial((0, 0, 0, 3), (1, 1, 1, 0))


def test_degree_and_fiber_for_catalog(entries):
    for e in entries:
        m = e.model()
        assert degree_of_variety(m) == e.degree
        assert torus_fiber_degree(m) == 1


def test_fiber_degree_detects_non_injective_parametrization():
    # theta_i -> -theta_i leaves every square unchanged: four parameter points per model point
    assert torus_fiber_degree(ToricModel([[2, 0, 0], [0, 2, 0], [0, 0, 2]])) == 4
    # (2,0),(1,1),(0,2) only has the global sign, which is a scaling
    assert torus_fiber_degree(ToricModel([[2, 1, 0], [0, 1, 2]])) == 1


def test_automorphism_detection():
    assert is_automorphism(S3, (1, 0, 2, 3))
    assert not is_automorphism(S3, (3, 1, 2, 0))


def test_model_json_round_trip():
    doc = model_to_json(S4)
    assert model_from_json(doc) == S4
    assert set(doc) == {"label", "matrix", "binomials"}


positive_theta = st.lists(st.floats(0.05, 20.0), min_size=3, max_size=3)


@given(positive_theta, st.floats(0.1, 10.0), st.sampled_from(TABLE_MODELS))
def test_parametrize_invariants(theta, lam, label):
    m = model(label)
    p = parametrize(m, theta)
    assert np.all(p > 0)
    assert abs(p.sum() - 1) <= 1e-12
    assert np.allclose(parametrize(m, np.array(theta) * lam), p, atol=1e-14)
    assert variety_residual(m, p) <= 1e-14


@given(st.lists(st.integers(0, 50), min_size=7, max_size=7).filter(lambda v: sum(v) > 0),
       st.sampled_from(TABLE_MODELS))
def test_statistic_sums_to_column_sum_times_n(counts, label):
    m = model(label)
    u = counts[: m.m]
    if sum(u) == 0:
        u[0] = 1
    b = sufficient_statistic(m, u)
    c = sum(m.columns[0])
    assert sum(b) == c * sum(u)
