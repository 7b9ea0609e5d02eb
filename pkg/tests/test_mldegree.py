from fractions import Fraction

import numpy as np
import pytest
import sympy

from conftest import TABLE_MODELS, model, random_counts
from toricmle.birch import solve_birch
from toricmle.errors import DomainError, GenericityError, UnsupportedModelError
from toricmle.lattice import lookup
from toricmle.mldegree import (
    MLDegreeReport,
    likelihood_equations,
    ml_degree,
    solve_likelihood_system,
    sylvester_matrix,
    sylvester_resultant,
)
from toricmle.model import ToricModel, degree_of_variety
from toricmle.polynomial import MultivariatePolynomial as MP

x_, t_ = sympy.symbols("x t")


def _mp(expr):
    """sympy expression in (t, x) -> MultivariatePolynomial with var0 = t, var1 = x."""
    poly = sympy.Poly(sympy.expand(expr), t_, x_)
    return MP({e: Fraction(int(c.p), int(c.q)) for e, c in poly.terms()}, 2)


def _to_sym(mp):
    return sum(sympy.Rational(c.numerator, c.denominator) * t_ ** e[0] * x_ ** e[1] for e, c in mp.terms.items())


def test_resultant_examples():
    r = sylvester_resultant(_mp(x_ ** 2 - t_), _mp(x_ - 1), 1)
    assert sympy.expand(_to_sym(r) ** 2 - (t_ - 1) ** 2) == 0
    r = sylvester_resultant(_mp(x_ ** 2 + 1), _mp(x_ ** 2 - 1), 1)
    assert r.degree() == 0 and not r.is_zero()
    f = (x_ - t_) * (x_ - 2)
    g = (x_ - t_) * (x_ + 3)
    r = sylvester_resultant(_mp(f), _mp(g), 1)
    want = sympy.resultant(sympy.expand(f), sympy.expand(g), x_)
    # a common factor in x makes the resultant vanish identically, in particular at t
    assert want == 0 and r.is_zero()


def test_resultant_matches_sympy_on_likelihood_equations(rng):
    sys_ = likelihood_equations(model("S4"), random_counts(rng, 5))
    f, g = sys_.equations
    a, b = sympy.symbols("a b")
    to = lambda mp: sum(sympy.Rational(c.numerator, c.denominator) * a ** e[0] * b ** e[1]
                        for e, c in mp.terms.items())
    fa, ga = to(f.divide_monomial(f.monomial_content())), to(g.divide_monomial(g.monomial_content()))
    r = sylvester_resultant(f.divide_monomial(f.monomial_content()), g.divide_monomial(g.monomial_content()), 1)
    assert sympy.expand(to(r) - sympy.resultant(fa, ga, b)) == 0


def test_resultant_errors():
    with pytest.raises(DomainError):
        sylvester_resultant(MP({}, 2), _mp(x_ - 1), 1)
    with pytest.raises(DomainError):
        sylvester_resultant(_mp(t_ + 1), _mp(x_ - 1), 1)


def test_resultant_vanishes_at_common_roots(rng):
    for _ in range(5):
        a, b = (Fraction(int(v), 7) for v in rng.integers(-20, 20, size=2))
        f = _mp((x_ - b) * (x_ + t_ + 1) + (t_ - a) * x_)
        g = _mp((x_ - b) * (t_ * x_ - 3) + (t_ - a) * (x_ ** 2 + 1))
        r = sylvester_resultant(f, g, 1)
        assert abs(float(r.substitute(0, a).evaluate((0, 0)))) <= 1e-8


def test_sylvester_matrix_shape():
    M = sylvester_matrix([1, 2, 3], [4, 5])
    assert M == [[3, 2, 1], [5, 4, 0], [0, 5, 4]]


def test_likelihood_equation_example():
    sys_ = likelihood_equations(model("S3"), [1, 1, 1, 1])
    t1, t2 = MP.variable(0, 3), MP.variable(1, 3)
    S = t1 ** 2 * t2 + t1 * t2 ** 2 + 1 + t1 * t2
    assert sys_.equations[0] == S * 4 - (t1 ** 2 * t2 * 2 + t1 * t2 ** 2 + t1 * t2) * 4
    assert len(sys_.equations) == 2


@pytest.mark.parametrize("label", TABLE_MODELS)
def test_dependency_and_mle_is_a_critical_point(label, rng):
    m = model(label)
    u = random_counts(rng, m.m)
    sys_ = likelihood_equations(m, u)
    assert sum(sys_.raw, MP.constant(0, 3)).is_zero()
    theta = solve_birch(m, u).theta_hat
    for g in sys_.equations:
        val = g.evaluate((float(theta[0]), float(theta[1]), 1.0))
        assert abs(val) <= 1e-8 * g.abs_evaluate((theta[0], theta[1], 1.0))


def test_unequal_column_sums_are_an_internal_error(monkeypatch):
    from types import SimpleNamespace

    from toricmle import mldegree as mod
    from toricmle.errors import ToricMLEError
    rows = [[1, 2, 1], [0, 1, 2], [2, 1, 0]]
    fake = SimpleNamespace(d=3, m=3, label="bad", matrix=rows,
                           columns=[tuple(c) for c in zip(*rows)])
    monkeypatch.setattr(mod, "sufficient_statistic",
                        lambda m, u: tuple(sum(a * x for a, x in zip(r, u.u)) for r in rows))
    with pytest.raises(ToricMLEError, match="not dependent"):
        likelihood_equations(fake, [1, 2, 3])


@pytest.mark.parametrize("label", TABLE_MODELS)
def test_table_counts_and_degree_bound(label):
    m = model(label)
    expected = lookup(label).ml_degree
    for seed in (1, 2, 3):
        rep = ml_degree(m, trials=3, seed=seed)
        assert rep.consistent
        assert rep.count == expected
        assert rep.count <= degree_of_variety(m)
        assert rep.fiber_degree == 1


def test_quintic_drop():
    rep = ml_degree(model("S5"), trials=3, seed=11)
    assert rep.count == 3 < degree_of_variety(model("S5")) == 5


@pytest.mark.parametrize("label", TABLE_MODELS)
def test_mle_is_among_solutions(label):
    rep = ml_degree(model(label), trials=3, seed=5)
    for trial in rep.trials:
        theta = solve_birch(model(label), trial["u"]).theta_hat
        sols = [complex(*a) for a, _ in trial["raw_theta_solutions"]], \
               [complex(*b) for _, b in trial["raw_theta_solutions"]]
        dist = [max(abs(s1 - theta[0]), abs(s2 - theta[1])) for s1, s2 in zip(*sols)]
        assert min(dist) <= 1e-6 * (1 + max(abs(theta)))


def test_degenerate_draw_is_discarded():
    # b_2 = N makes the second equation reducible for the hexagon
    u = [474, 512, 756, 951, 35, 145, 823]
    out = solve_likelihood_system(likelihood_equations(model("S6"), u))
    assert not out["generic"]
    rep = ml_degree(model("S6"), trials=3, seed=1)
    assert rep.discarded and rep.discarded[0]["u"] == u
    assert rep.count == 6


def test_unsupported_and_report_serialization():
    with pytest.raises(UnsupportedModelError):
        ml_degree(ToricModel([[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 0], [1, 1, 1, 0]]), 3, 0)
    rep = ml_degree(model("S3"), trials=3, seed=0)
    import json
    doc = json.loads(json.dumps(rep.to_dict()))
    assert doc["count"] == 3 and len(doc["trials"]) == 3
    assert {"seed", "u", "raw_theta_solutions", "filtered_count"} <= set(doc["trials"][0])


def test_genericity_failure(monkeypatch):
    import toricmle.mldegree as mod
    monkeypatch.setattr(mod, "solve_likelihood_system",
                        lambda s: {"generic": False, "reason": "forced"})
    with pytest.raises(GenericityError) as info:
        ml_degree(model("S3"), trials=3, seed=0)
    assert len(info.value.details["discarded"]) == 11


def test_experimental_flag_for_high_degree():
    rep = ml_degree(lookup("7a").model(), trials=1, seed=0)
    assert rep.experimental
    assert rep.count <= 7
