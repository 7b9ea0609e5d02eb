import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CLOSED_FORM_MODELS, model, random_counts
from toricmle.birch import solve_birch
from toricmle.closedform import (
    audit_paper_polynomials,
    eliminate_to_univariate,
    mle_closed_form,
    paper_displays,
    paper_polynomial,
    theta_from_p,
    theta_from_p_as_printed,
)
from toricmle.errors import DomainError, PreconditionError, UnsupportedModelError
from toricmle.model import parametrize


def test_symmetric_cubic_eliminant_has_root_one_quarter():
    poly = eliminate_to_univariate("S3", [1, 1, 1, 1], 4)
    assert poly(Fraction(1, 4)) == 0
    assert poly.degree == 3


def test_symmetric_quartic_eliminant_has_root_one_fifth():
    poly = eliminate_to_univariate("S4", [1] * 5, 5)
    assert poly(Fraction(1, 5)) == 0
    assert poly.degree <= 4


def test_cubic_eliminant_contains_newton_estimate():
    u = [3, 5, 7, 11]
    p = solve_birch(model("S3"), u).p_hat
    poly = eliminate_to_univariate("S3", u, 1)
    roots = np.roots(poly.to_complex_array()[::-1])
    assert np.min(np.abs(roots - p[0])) <= 1e-9


def test_uniform_closed_forms():
    r = mle_closed_form("S3", [1, 1, 1, 1])
    assert np.max(np.abs(r.p_hat - 0.25)) <= 1e-12
    assert np.allclose(r.theta_hat, np.cbrt(0.25), atol=1e-12)
    r = mle_closed_form("S4", [1] * 5)
    assert np.max(np.abs(r.p_hat - 0.2)) <= 1e-12


def test_cubic_example_matches_newton():
    u = [3, 5, 7, 11]
    r = mle_closed_form("S3", u)
    b = solve_birch(model("S3"), u)
    assert np.max(np.abs(r.p_hat - b.p_hat)) <= 1e-8
    assert np.max(np.abs(parametrize(model("S3"), r.theta_hat) - r.p_hat)) <= 1e-10


@pytest.mark.parametrize("label", CLOSED_FORM_MODELS)
def test_eliminant_degrees(label, rng):
    m = model(label)
    u = random_counts(rng, m.m)
    for k in range(1, m.m + 1):
        deg = eliminate_to_univariate(label, u, k).degree
        if label == "S3":
            assert deg == 3
        else:
            assert 1 <= deg <= 4


@pytest.mark.parametrize("label", CLOSED_FORM_MODELS)
def test_every_eliminant_vanishes_at_newton_estimate(label, rng):
    m = model(label)
    for _ in range(5):
        u = random_counts(rng, m.m)
        p = solve_birch(m, u).p_hat
        for k in range(1, m.m + 1):
            poly = eliminate_to_univariate(label, u, k)
            assert poly.relative_residual(p[k - 1]) <= 1e-8


@pytest.mark.parametrize("label", CLOSED_FORM_MODELS)
def test_agreement_and_round_trip(label, rng):
    m = model(label)
    for _ in range(20):
        u = random_counts(rng, m.m)
        c = mle_closed_form(label, u)
        b = solve_birch(m, u)
        assert np.max(np.abs(c.p_hat - b.p_hat)) <= 1e-8
        assert c.extra["theta_roundtrip"] <= 1e-10
        assert c.moment_residual <= 1e-9 and c.variety_residual <= 1e-9


@pytest.mark.parametrize("label", CLOSED_FORM_MODELS)
def test_theta_recovery_round_trip(label, rng):
    m = model(label)
    p = solve_birch(m, random_counts(rng, m.m)).p_hat
    assert np.max(np.abs(parametrize(m, theta_from_p(label, p)) - p)) <= 1e-10


def test_printed_theta_formula_for_a3_model_misses():
    m = model("S4_A3")
    p = solve_birch(m, [17, 40, 9, 300, 23]).p_hat
    gap = np.max(np.abs(parametrize(m, theta_from_p_as_printed("S4_A3", p)) - p))
    assert gap > 1e-6


def test_display_lookup():
    u = [3, 5, 7, 11]
    assert paper_polynomial("S3", u, 1).degree == 3
    assert [d.label for d in paper_displays("S3", u)] == [1, 2, 3]
    with pytest.raises(DomainError):
        paper_polynomial("S3", u, 4)


def test_audit_records_failures_without_raising():
    u = [3, 5, 7, 11]
    p = solve_birch(model("S3"), u).p_hat
    audit = audit_paper_polynomials("S3", u, p)
    assert len(audit) == 3
    for entry in audit:
        assert entry["derived_residual"] <= 1e-8
        if not entry["holds"]:
            rep = entry["discrepancy"]
            assert set(rep) == {"model", "coordinate", "paper_poly", "derived_poly",
                                "witness_phat", "residuals"}
            json.dumps(rep)


def test_first_two_quartics_of_s4_hold():
    u = [12, 30, 7, 44, 19]
    p = solve_birch(model("S4"), u).p_hat
    holds = {e["label"]: e["holds"] for e in audit_paper_polynomials("S4", u, p)}
    assert holds[1] and holds[2]


def test_paper_source_used_when_it_certifies():
    # the first two S4 quartics hold, so the transcribed polynomials suffice
    r = mle_closed_form("S4", [12, 30, 7, 44, 19])
    assert r.extra["polynomial_source"] == "paper"
    assert r.method == "closed_form_paper"
    # the transcribed cubic has sign slips, so the derived eliminant takes over
    r = mle_closed_form("S3", [3, 5, 7, 11])
    assert r.extra["polynomial_source"] == "derived"
    assert len(r.extra["discrepancies"]) == 3


def test_errors():
    with pytest.raises(UnsupportedModelError):
        mle_closed_form("S5", [1] * 6)
    with pytest.raises(PreconditionError):
        mle_closed_form("S3", [0, 1, 2, 3])
    with pytest.raises(DomainError):
        mle_closed_form("S3", [1, 2, 3])
    with pytest.raises(DomainError):
        eliminate_to_univariate("S3", [1, 2, 3, 4], 9)


@given(st.lists(st.integers(1, 1000), min_size=4, max_size=4), st.integers(2, 7))
def test_cubic_estimate_is_scale_invariant(u, lam):
    a = mle_closed_form("S3", u).p_hat
    b = mle_closed_form("S3", [lam * x for x in u]).p_hat
    assert np.max(np.abs(a - b)) <= 1e-10
