"""ML degree by elimination in parameter space.

The critical points of the likelihood on a surface model are the solutions
of two polynomial equations in ``(theta_1, theta_2)`` once ``theta_3`` is
fixed to 1.  We eliminate ``theta_2`` with an exact Sylvester resultant,
strip the factors that cannot carry genuine solutions, locate the roots in
``theta_1`` numerically, and lift each one back to a full solution.  The
count of admissible torus solutions, divided by the fiber degree of the
parametrization, is the ML degree.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, GenericityError, ToricMLEError, UnsupportedModelError
from .intlinalg import fraction_free_det
from .model import DataVector, ToricModel, degree_of_variety, sufficient_statistic, torus_fiber_degree
from .polynomial import MultivariatePolynomial, UnivariatePolynomial, lagrange_interpolate
from .roots import complex_roots

__all__ = [
    "LikelihoodSystem",
    "MLDegreeReport",
    "likelihood_equations",
    "sylvester_resultant",
    "sylvester_matrix",
    "solve_likelihood_system",
    "ml_degree",
    "degree_of_variety",
    "complex_roots",
]

log = logging.getLogger(__name__)

# relative tolerances used when lifting roots back to solutions
_MATCH_TOL = 1e-6
_S_TOL = 1e-10
_DEDUPE_TOL = 1e-7
_MAX_DISCARDS = 10


@dataclass
class LikelihoodSystem:
    """The retained likelihood equations with ``theta_d = 1`` substituted.

    ``raw`` holds all ``d`` equations before the dependent one was dropped
    and before the substitution; ``S`` is the partition sum with
    ``theta_d = 1``.
    """

    equations: list
    data: DataVector
    model_label: str
    S: MultivariatePolynomial
    raw: list = field(default_factory=list)


def _monomial(exps, coeff=1):
    return MultivariatePolynomial.monomial(exps, coeff)


def likelihood_equations(model: ToricModel, u) -> LikelihoodSystem:
    """Likelihood equations ``g_i = b_i S(theta) - N sum_j a_ij theta^{a_j}``.

    Parameters
    ----------
    model : ToricModel
    u : DataVector or sequence of int
        Strictly positive counts.

    Returns
    -------
    LikelihoodSystem
        ``d - 1`` equations in ``theta_1 .. theta_{d-1}``.
    """
    u = u if isinstance(u, DataVector) else DataVector(u)
    if len(u) != model.m:
        raise DomainError(f"data vector has length {len(u)}, model has {model.m} columns")
    if not u.positive:
        raise DomainError("likelihood_equations needs strictly positive counts")
    d = model.d
    b = sufficient_statistic(model, u)
    N = u.N
    cols = model.columns
    S = sum((_monomial(a) for a in cols), MultivariatePolynomial.constant(0, d))
    raw = []
    for i in range(d):
        weighted = sum((_monomial(a, a[i]) for a in cols if a[i]), MultivariatePolynomial.constant(0, d))
        raw.append(S * b[i] - weighted * N)
    total = sum(raw, MultivariatePolynomial.constant(0, d))
    if not total.is_zero():
        # equal column sums force sum_i g_i = (sum_i b_i - c N) S = 0
        raise ToricMLEError("likelihood equations are not dependent; columns must have equal sums")
    kept = [g.substitute(d - 1, 1) for g in raw[:-1]]
    return LikelihoodSystem(equations=kept, data=u, model_label=model.label,
                            S=S.substitute(d - 1, 1), raw=raw)


def sylvester_matrix(f_coeffs, g_coeffs):
    """Sylvester matrix from ascending coefficient lists (formal degrees = lengths - 1)."""
    m, n = len(f_coeffs) - 1, len(g_coeffs) - 1
    size = m + n
    rows = []
    fd = list(reversed(f_coeffs))
    gd = list(reversed(g_coeffs))
    for i in range(n):
        rows.append([0] * i + fd + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + gd + [0] * (size - n - 1 - i))
    return rows


def _resultant_numeric(fc, gc):
    """Exact resultant of univariate coefficient lists with fixed formal degrees."""
    return fraction_free_det([[Fraction(x) for x in row] for row in sylvester_matrix(fc, gc)])


def sylvester_resultant(f: MultivariatePolynomial, g: MultivariatePolynomial, var: int):
    """Resultant of ``f`` and ``g`` with respect to variable ``var``.

    Computed by evaluation and interpolation over the rationals: the other
    variables are specialized one at a time at integer points, the
    resulting Sylvester determinants are exact, and the values are
    interpolated back.  Formal degrees in ``var`` are held fixed, so
    specialization commutes with the resultant.

    Returns
    -------
    MultivariatePolynomial
        Same variable count as the inputs, free of ``var``.
    """
    if f.is_zero() or g.is_zero():
        raise DomainError("resultant of a zero polynomial")
    if f.nvars != g.nvars:
        raise DomainError("variable count mismatch")
    if f.degree(var) < 1 or g.degree(var) < 1:
        raise DomainError(f"both polynomials need positive degree in x{var + 1}")
    return _resultant_rec(f, g, var, f.degree(var), g.degree(var))


def _resultant_rec(f, g, var, m, n):
    nv = f.nvars
    others = sorted((set(f.variables()) | set(g.variables())) - {var})
    fc = f.coefficients_in(var)
    gc = g.coefficients_in(var)
    fc += [MultivariatePolynomial.constant(0, nv)] * (m + 1 - len(fc))
    gc += [MultivariatePolynomial.constant(0, nv)] * (n + 1 - len(gc))
    if not others:
        val = _resultant_numeric([c.evaluate((0,) * nv) for c in fc],
                                 [c.evaluate((0,) * nv) for c in gc])
        return MultivariatePolynomial.constant(val, nv)
    v = others[0]
    # each Sylvester row of f contributes at most deg_v(f) to the degree in v
    bound = n * max(max(c.degree(v) for c in fc), 0) + m * max(max(c.degree(v) for c in gc), 0)
    points = list(range(bound + 1))
    values = [_resultant_rec(f.substitute(v, x), g.substitute(v, x), var, m, n) for x in points]
    # interpolate coefficientwise over the monomials in the remaining variables
    monos = set()
    for val in values:
        monos |= set(val.terms)
    result = MultivariatePolynomial.constant(0, nv)
    for mono in monos:
        ys = [val.terms.get(mono, Fraction(0)) for val in values]
        uni = lagrange_interpolate(points, ys)
        for k, c in enumerate(uni.coeffs):
            e = list(mono)
            e[v] = k
            result = result + _monomial(e, c)
    return result


@dataclass
class MLDegreeReport:
    """Outcome of :func:`ml_degree`; JSON-ready through :meth:`to_dict`."""

    model_label: str
    count: int
    trials: list
    fiber_degree: int
    consistent: bool
    discarded: list = field(default_factory=list)
    degree_of_variety: int = 0
    experimental: bool = False

    def to_dict(self):
        return asdict(self)


def _content_in_theta1(poly):
    """gcd of the coefficients of ``poly`` viewed as a polynomial in theta_2."""
    content = UnivariatePolynomial([])
    for c in poly.coefficients_in(1):
        if not c.is_zero():
            content = c.to_univariate(0) if content.is_zero() else content.gcd(c.to_univariate(0))
    return content


def _specialize(poly, var, value):
    """Complex coefficients of ``poly`` in the other variable after ``x_var = value``."""
    other = 1 - var
    deg = poly.degree(other)
    cs = [0j] * (deg + 1)
    for e, c in poly.terms.items():
        cs[e[other]] += complex(c) * value ** e[var]
    return cs


def _strip_eliminant(res, f, g, removed):
    """Remove content, powers of theta_1 and leading-coefficient factors; log each removal."""
    uni = res.to_univariate(0)
    k, uni = uni.strip_x_power()
    if k:
        removed.append({"factor": "theta1", "power": k})
    lc_f = f.coefficients_in(1)[-1].to_univariate(0)
    lc_g = g.coefficients_in(1)[-1].to_univariate(0)
    lc = lc_f.gcd(lc_g)
    while lc.degree > 0:
        common = uni.gcd(lc)
        if common.degree <= 0:
            break
        uni = uni // common
        removed.append({"factor": "common_leading_coefficient", "poly": str(common)})
    uni = uni.primitive()
    return uni


def _newton2(f_list, df, z, steps=4):
    """Plain Newton on two equations in two complex unknowns."""
    for _ in range(steps):
        F = np.array([fn(z) for fn in f_list])
        J = np.array([[dfn(z) for dfn in row] for row in df])
        try:
            dz = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            break
        new = z + dz
        if np.linalg.norm([fn(new) for fn in f_list]) > np.linalg.norm(F):
            break
        z = new
    return z


def solve_likelihood_system(system: LikelihoodSystem):
    """All admissible complex solutions of a two-equation likelihood system.

    Returns
    -------
    dict
        ``solutions`` (list of ``(theta1, theta2)`` complex pairs),
        ``eliminant_degree``, ``removed`` factors, ``generic`` flag and a
        ``reason`` when the draw is not generic.
    """
    f, g = system.equations
    # clear monomial content so theta = 0 does not leak in as a common root
    f = f.divide_monomial(f.monomial_content())
    g = g.divide_monomial(g.monomial_content())
    removed = []
    for name, poly in (("f", f), ("g", g)):
        cont = _content_in_theta1(poly)
        if cont.degree > 0:
            return {"solutions": [], "eliminant_degree": -1, "removed": removed, "generic": False,
                    "reason": f"equation {name} has the factor {cont} free of theta2"}
    res = sylvester_resultant(f, g, 1)
    if res.is_zero():
        return {"solutions": [], "eliminant_degree": -1, "removed": removed,
                "generic": False, "reason": "resultant vanishes identically"}
    uni = _strip_eliminant(res, f, g, removed)
    out = {"eliminant_degree": uni.degree, "removed": removed, "generic": True, "reason": ""}
    if uni.degree < 1:
        out["solutions"] = []
        return out
    sqf = uni.squarefree_part()
    if sqf.degree != uni.degree:
        out.update(generic=False, reason="eliminant has a repeated factor", solutions=[])
        return out
    report = complex_roots(uni)
    if not report.simple:
        out.update(generic=False, reason="clustered eliminant roots", solutions=[])
        return out

    def ev(poly):
        return lambda z: poly.evaluate((complex(z[0]), complex(z[1])))

    fs = [ev(f), ev(g)]
    dfs = [[ev(f.derivative(0)), ev(f.derivative(1))], [ev(g.derivative(0)), ev(g.derivative(1))]]
    S = system.S
    sols = []
    for t1 in report.roots:
        if abs(t1) == 0:
            continue
        cf = _specialize(f, 0, t1)
        cg = _specialize(g, 0, t1)
        while cf and abs(cf[-1]) == 0:
            cf.pop()
        if len(cf) < 2:
            continue
        cands = complex_roots(cf, cert_tol=1e-6).roots
        gscale = lambda t2: sum(abs(c) * abs(t2) ** k for k, c in enumerate(cg)) or 1.0
        for t2 in cands:
            val = sum(c * t2 ** k for k, c in enumerate(cg))
            if abs(val) > _MATCH_TOL * gscale(t2):
                continue
            z = _newton2(fs, dfs, np.array([t1, t2], dtype=complex))
            if abs(z[0]) == 0 or abs(z[1]) == 0:
                continue
            sval = S.evaluate((complex(z[0]), complex(z[1])))
            if abs(sval) <= _S_TOL * max(S.abs_evaluate((z[0], z[1])), 1.0):
                continue
            if any(np.linalg.norm(z - s) <= _DEDUPE_TOL * max(1.0, np.linalg.norm(z)) for s in sols):
                continue
            jac = np.array([[fn(z) for fn in row] for row in dfs])
            if abs(np.linalg.det(jac)) <= 1e-12 * max(np.linalg.norm(jac) ** 2, 1e-300):
                out.update(generic=False, reason="singular Jacobian at a solution", solutions=[])
                return out
            sols.append(z)
    out["solutions"] = sols
    return out


def ml_degree(model: ToricModel, trials: int = 3, seed: int = 0) -> MLDegreeReport:
    """Count complex critical points of the likelihood for generic data.

    Parameters
    ----------
    model : ToricModel
        A surface model (three rows).
    trials : int
        Number of accepted random data draws, at least 1.
    seed : int
        Seed for the PCG64 generator that draws the data.

    Raises
    ------
    UnsupportedModelError
        If the model does not have exactly three rows.
    GenericityError
        If more than ten draws have to be discarded.
    """
    if model.d != 3:
        raise UnsupportedModelError(f"ml_degree supports models with 3 rows, got {model.d}")
    if trials < 1:
        raise DomainError("trials must be at least 1")
    fiber = torus_fiber_degree(model)
    deg = degree_of_variety(model)
    experimental = deg >= 7
    if experimental:
        log.warning("model %r has degree %d; ML degree computation is experimental", model.label, deg)
    rng = np.random.Generator(np.random.PCG64(seed))
    accepted, discarded = [], []
    while len(accepted) < trials:
        u = [int(x) for x in rng.integers(1, 1001, size=model.m)]
        system = likelihood_equations(model, u)
        try:
            sol = solve_likelihood_system(system)
        except ToricMLEError as exc:
            sol = {"generic": False, "reason": f"{type(exc).__name__}: {exc}"}
        if not sol["generic"]:
            discarded.append({"u": u, "reason": sol["reason"]})
            log.info("discarding non-generic draw %s: %s", u, sol["reason"])
            if len(discarded) > _MAX_DISCARDS:
                raise GenericityError(
                    f"more than {_MAX_DISCARDS} non-generic draws for model {model.label!r}",
                    details={"discarded": discarded})
            continue
        raw = [[[float(z.real), float(z.imag)] for z in s] for s in sol["solutions"]]
        n = len(sol["solutions"])
        accepted.append({
            "seed": seed,
            "trial": len(accepted),
            "u": u,
            "raw_theta_solutions": raw,
            "filtered_count": n,
            "eliminant_degree": sol["eliminant_degree"],
            "removed_factors": sol["removed"],
        })
    counts = {t["filtered_count"] for t in accepted}
    consistent = len(counts) == 1 and all(c % fiber == 0 for c in counts)
    count = accepted[0]["filtered_count"] // fiber
    return MLDegreeReport(model_label=model.label, count=count, trials=accepted, fiber_degree=fiber,
                          consistent=consistent, discarded=discarded, degree_of_variety=deg,
                          experimental=experimental)
