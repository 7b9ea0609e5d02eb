"""Closed-form MLE for the cubic and quartic surface models.

For the four models of degree at most four, every coordinate of the MLE is
a root of a univariate polynomial of degree at most four, so it can be
written with radicals.  Two sources for those polynomials live here:

* ``paper_polynomial`` transcribes the reference displays verbatim,
  including their coefficient slips, so they can be audited.
* ``eliminate_to_univariate`` re-derives the eliminant from the moment
  equations and the toric binomials.

``mle_closed_form`` first tries the transcribed polynomials.  When no
candidate built from them passes the certificates it falls back to the
derived ones.  Every transcription that does not vanish at the certified
estimate gets a machine-readable discrepancy report.

Coordinates are 1-based in this module (``k = 1`` is ``p_1``), matching the
column order of the catalog models.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .birch import MLEResult, moment_residual
from .errors import DomainError, InconsistencyError, PreconditionError, UnsupportedModelError
from .lattice import lookup
from .mldegree import sylvester_resultant
from .model import DataVector, ToricModel, log_likelihood, parametrize, sufficient_statistic, variety_residual
from .polynomial import MultivariatePolynomial, UnivariatePolynomial
from .roots import solve_cubic, solve_low_degree, solve_quartic

__all__ = [
    "SUPPORTED_MODELS",
    "PaperDisplay",
    "paper_displays",
    "paper_polynomial",
    "eliminate_to_univariate",
    "theta_from_p",
    "theta_from_p_as_printed",
    "mle_closed_form",
    "audit_paper_polynomials",
    "solve_cubic",
    "solve_quartic",
]

SUPPORTED_MODELS = ("S3", "S4", "S4_A2", "S4_A3")

# coordinates whose values pin down the rest through the moment equations
_FREE_PAIR = {"S3": (1,), "S4": (1, 2), "S4_A2": (1, 2), "S4_A3": (2, 3)}

_CERT_TOL = 1e-9
_REAL_TOL = 1e-9
_ROOT_TOL = 1e-8


def _label_of(model):
    if isinstance(model, ToricModel):
        label = model.label
    else:
        label = str(model)
    try:
        entry = lookup(label)
    except DomainError:
        raise UnsupportedModelError(
            f"closed forms exist only for {', '.join(SUPPORTED_MODELS)}; got {label!r}") from None
    if entry.model_label not in SUPPORTED_MODELS:
        raise UnsupportedModelError(
            f"closed forms exist only for {', '.join(SUPPORTED_MODELS)}; got {label!r}")
    return entry.model_label


def _model_for(model):
    label = _label_of(model)
    return label, (model if isinstance(model, ToricModel) else lookup(label).model())


def _counts(model, u):
    u = u if isinstance(u, DataVector) else DataVector(u)
    if len(u) != model.m:
        raise DomainError(f"data vector has length {len(u)}, model has {model.m} columns")
    return u


@dataclass(frozen=True)
class PaperDisplay:
    """One printed polynomial.

    ``label`` is the coordinate the text says the polynomial determines;
    ``variable`` is the coordinate its unknown is written as.  They differ
    for the two swapped displays of the ``S4_A2`` model.
    """

    model: str
    label: int
    variable: int
    name: str
    poly: UnivariatePolynomial


def _fr(num, den=1):
    return Fraction(num, den)


def _s3_displays(u):
    u1, u2, u3, u4 = (Fraction(x) for x in u)
    N = u1 + u2 + u3 + u4
    x = UnivariatePolynomial.x()
    out = []
    for k, (i, j) in ((1, (2, 3)), (2, (1, 3)), (3, (1, 2))):
        uk, ui, uj = (u1, u2, u3)[k - 1], (u1, u2, u3)[i - 1], (u1, u2, u3)[j - 1]
        r = 3 * uk + u4
        poly = (x ** 3
                - (N - 28 * r) / (28 * N) * x ** 2
                + ((ui - uk) * (uj - uk) - 9 * r ** 2) / (28 * N ** 2) * x
                - r ** 3 / (28 * N ** 3))
        out.append(PaperDisplay("S3", k, k, f"cubic for p{k}", poly))
    return out


def _s4_displays(u):
    u1, u2, u3, u4, u5 = (Fraction(x) for x in u)
    N = u1 + u2 + u3 + u4 + u5
    x = UnivariatePolynomial.x()
    p1 = ((x ** 2 - (4 * N + (u1 - u4)) / N * x + (2 * u1 + 2 * u2 + u5) * (2 * u1 + 2 * u3 + u5) / N ** 2) ** 2
          - (x ** 2 - (u1 - u4) / N * x) * (4 * x - (2 * N + 2 * (u1 - u4)) / N) ** 2)
    p2 = ((x ** 2 - (4 * N + (u2 - u3)) / N * x + (2 * u1 + 2 * u2 + u5) * (2 * u2 + 2 * u4 + u5) / N ** 2) ** 2
          - (x ** 2 - (u2 - u3) / N * x) * (4 * x - (2 * N + 2 * (u2 - u3)) / N) ** 2)
    p5 = ((x ** 2 - 2 * x + (2 * u1 + 2 * u2 + u5) * (2 * u3 + 2 * u4 + u5) / N ** 2
           + (2 * u1 - 2 * u4) * (N + u2 - u3) / N ** 2) ** 2
          - (2 - 2 * x) ** 2 * ((u1 - u4) / N ** 2 + 4 * x ** 2))
    return [PaperDisplay("S4", 1, 1, "quartic for p1", p1),
            PaperDisplay("S4", 2, 2, "quartic for p2", p2),
            PaperDisplay("S4", 5, 5, "quartic for p5", p5)]


def _s4_a2_displays(u):
    u1, u2, u3, u4, u5 = (Fraction(x) for x in u)
    N = u1 + u2 + u3 + u4 + u5
    x = UnivariatePolynomial.x()
    A = 3 * u1 + 2 * u2 + u5
    B = u1 - u3
    C = u1 + u2 - u4
    D = 3 * u3 + 2 * u2 + u5
    first = ((9 * x ** 2 + (4 * A - 6 * B) / N * x + B ** 2 / N ** 2) * (16 * x + (6 * A - 9 * B) / N) ** 2
             - (33 * x ** 2 + (23 * A - 43 * B + C) / N * x + D ** 2 / N ** 2) ** 2)
    second = ((x ** 2 + (8 * B - 6 * A) / N * x + A ** 2 / N ** 2) * (19 * x + (2 * C - 7 * A) / N) ** 2
              - (3 * x ** 2 + (12 * B - 8 * A - 6 * C) / N * x + (D ** 2 + 2 * D * C) / N ** 2) ** 2)
    # shorthand used by the p5 display
    s = (u1 + 2 * u4 + u5) / N
    t = (u3 + 2 * u4 + u5) / N
    r = (u2 - 3 * u4 - u5) / N
    a5 = 51
    b5 = -35 * (s + t + r) - 4 * t
    c5 = (s + t + r) * (9 * s + 36 * t + r) + 75 * s * r - 8 * t ** 2
    d5 = -3 * (s + t + r) * (12 * s * r + (6 * t + 6 * r + 4 * t) * t) - 3 * s * t * r
    e5 = 3 * s * r * (9 * s * r + (6 * s + 6 * r + 4 * t) * t)
    p5 = UnivariatePolynomial([e5, d5, c5, b5, a5])
    return [PaperDisplay("S4_A2", 1, 2, "quartic labelled p1, written in p2", first),
            PaperDisplay("S4_A2", 2, 1, "quartic labelled p2, written in p1", second),
            PaperDisplay("S4_A2", 5, 5, "quartic for p5", p5)]


def _s4_a3_displays(u):
    u1, u2, u3, u4, u5 = (Fraction(x) for x in u)
    N = u1 + u2 + u3 + u4 + u5
    s = (2 * u3 + u5) / N
    t = (u1 - u4) / N
    r = (2 * u2 + u4 + u5) / N
    p2 = UnivariatePolynomial([
        s ** 4,
        (r - s) * (r + t - s) - 2 * s ** 2 * (3 * s + t - r),
        -4 * s ** 2 + 4 * (s - r) * (3 * r - 5 * s + 2 * t) - 2 * (r + t - s) ** 2,
        76 * r - 92 * s + 16 * t,
        -40,
    ])
    p3 = UnivariatePolynomial([
        s ** 4,
        -s ** 2 * (7 * s + 2 * t + r),
        6 * s ** 2 + (4 * s + t) * (3 * s + t + r),
        -2 * (10 * s + 3 * t + 2 * r),
        10,
    ])
    p5 = UnivariatePolynomial([
        s ** 4 + 2 * s * t * (s * t + r * s),
        -4 * s ** 3 - 2 * t * (s ** 2 + 2 * s * t + 2 * r * s),
        6 * s ** 2 + (2 * t - 4 * s) * (t + r),
        6 * t + 4 * r,
        5,
    ])
    return [PaperDisplay("S4_A3", 2, 2, "quartic for p2", p2),
            PaperDisplay("S4_A3", 3, 3, "quartic for p3", p3),
            PaperDisplay("S4_A3", 5, 5, "quartic for p5", p5)]


_DISPLAYS = {"S3": _s3_displays, "S4": _s4_displays, "S4_A2": _s4_a2_displays, "S4_A3": _s4_a3_displays}


def paper_displays(model, u):
    """All transcribed polynomials for a supported model, as :class:`PaperDisplay` records."""
    label, mdl = _model_for(model)
    u = _counts(mdl, u)
    return _DISPLAYS[label](list(u))


def paper_polynomial(model, u, k):
    """The printed polynomial that the reference display assigns to coordinate ``p_k``.

    The coefficients are transcribed as printed.  For the two swapped
    ``S4_A2`` displays, the returned polynomial is the one labelled ``p_k``;
    see :func:`paper_displays` for the variable it is written in.

    Raises
    ------
    UnsupportedModelError
        For models outside :data:`SUPPORTED_MODELS`.
    DomainError
        If no display is labelled ``p_k``.
    """
    for disp in paper_displays(model, u):
        if disp.label == k:
            return disp.poly
    raise DomainError(f"no printed polynomial for p{k} of model {_label_of(model)}")


# derivation ------------------------------------------------------------

def _affine_solution(model, u, free):
    """Express every coordinate as an affine function of the free coordinates.

    Returns a list of length ``m`` of ``(const, [coef per free coord])`` with
    exact rational entries, or None if the remaining columns are singular.
    """
    A = model.matrix
    d, m = model.d, model.m
    b = sufficient_statistic(model, u)
    N = u.N
    bound = [j for j in range(m) if j not in free]
    if len(bound) != d:
        return None
    # augmented system: A_bound p_bound = b/N - A_free p_free
    rows = []
    for i in range(d):
        rows.append([Fraction(A[i][j]) for j in bound]
                    + [Fraction(b[i], N)] + [Fraction(-A[i][j]) for j in free])
    # Gauss-Jordan on the first d columns
    for c in range(d):
        piv = next((i for i in range(c, d) if rows[i][c] != 0), None)
        if piv is None:
            return None
        rows[c], rows[piv] = rows[piv], rows[c]
        lead = rows[c][c]
        rows[c] = [x / lead for x in rows[c]]
        for i in range(d):
            if i != c and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    out = [None] * m
    for idx, j in enumerate(bound):
        out[j] = (rows[idx][d], rows[idx][d + 1:])
    for idx, j in enumerate(free):
        coefs = [Fraction(0)] * len(free)
        coefs[idx] = Fraction(1)
        out[j] = (Fraction(0), coefs)
    return out


def _affine_polys(affine, nvars):
    polys = []
    for const, coefs in affine:
        p = MultivariatePolynomial.constant(const, nvars)
        for i, c in enumerate(coefs):
            if c:
                p = p + MultivariatePolynomial.variable(i, nvars) * c
        polys.append(p)
    return polys


def _binomial_poly(binom, coords):
    nv = coords[0].nvars
    plus = MultivariatePolynomial.constant(1, nv)
    minus = MultivariatePolynomial.constant(1, nv)
    for j, (a, b) in enumerate(zip(binom.plus, binom.minus)):
        if a:
            plus = plus * coords[j] ** a
        if b:
            minus = minus * coords[j] ** b
    return plus - minus


def eliminate_to_univariate(model, u, k):
    """Re-derive a univariate polynomial satisfied by ``p_k`` at the MLE.

    The moment equations leave ``m - d`` free coordinates.  Substituting the
    resulting affine expressions into the toric binomials gives one
    polynomial in ``p_k`` (cubic model) or two in ``p_k`` and a second free
    coordinate (quartic models); the second coordinate is then eliminated
    with a Sylvester resultant.

    Parameters
    ----------
    model : ToricModel or str
        One of :data:`SUPPORTED_MODELS`.
    u : DataVector or sequence of int
        Strictly positive counts.
    k : int
        1-based coordinate index.

    Returns
    -------
    UnivariatePolynomial
        Squarefree, primitive, degree at most four.
    """
    label, mdl = _model_for(model)
    u = _counts(mdl, u)
    if not u.positive:
        raise PreconditionError("closed forms need strictly positive counts")
    m = mdl.m
    if not 1 <= k <= m:
        raise DomainError(f"coordinate index {k} out of range 1..{m}")
    j0 = k - 1
    nfree = m - mdl.d
    binoms = list(mdl.binomials)
    candidates = [(j0,)] if nfree == 1 else [(j0, j) for j in range(m) if j != j0]
    for free in candidates:
        affine = _affine_solution(mdl, u, list(free))
        if affine is None:
            continue
        coords = _affine_polys(affine, nfree)
        eqs = [_binomial_poly(b, coords) for b in binoms]
        eqs = [e for e in eqs if not e.is_zero()]
        if nfree == 1:
            polys = [e.to_univariate(0) for e in eqs]
            g = polys[0]
            for p in polys[1:]:
                g = g.gcd(p)
            if g.degree < 1:
                continue
            return g.squarefree_part().primitive()
        usable = [e for e in eqs if e.degree(1) >= 1]
        for a in range(len(usable)):
            for b in range(a + 1, len(usable)):
                res = sylvester_resultant(usable[a], usable[b], 1)
                if res.is_zero():
                    continue
                uni = res.to_univariate(0)
                if uni.degree < 1:
                    continue
                uni = uni.squarefree_part()
                if uni.degree <= 4:
                    return uni.primitive()
    raise InconsistencyError(f"could not eliminate down to p{k} for model {label}")


# theta recovery --------------------------------------------------------

def theta_from_p(model, p):
    """Radical formulas for the parameters of a positive point on the model.

    For ``S4_A3`` the second parameter is ``p3 / (p2 p5^2)^(1/4)``; the
    printed variant is kept in :func:`theta_from_p_as_printed`.
    """
    label = _label_of(model)
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0):
        raise DomainError("theta recovery needs a strictly positive point")
    p1, p2, p3 = p[0], p[1], p[2]
    if label == "S3":
        return np.array([np.cbrt(p1 ** 2 / p2), np.cbrt(p2 ** 2 / p1), np.cbrt(p3)])
    p5 = p[4]
    if label in ("S4", "S4_A2"):
        return np.array([np.cbrt(p1 ** 2 / p2), np.cbrt(p2 ** 2 / p1), np.cbrt(p5 ** 3 / (p1 * p2))])
    t3 = (p5 ** 2 / p2) ** 0.25
    return np.array([p2 / p3 * t3, p3 / (p2 * p5 ** 2) ** 0.25, t3])


def theta_from_p_as_printed(model, p):
    """Parameter recovery exactly as printed (differs from :func:`theta_from_p` only for S4_A3)."""
    label = _label_of(model)
    theta = theta_from_p(model, p)
    if label == "S4_A3":
        p = np.asarray(p, dtype=float)
        theta[1] = p[2] * (p[1] ** 3 / p[4] ** 6) ** 0.25
    return theta


# solver ----------------------------------------------------------------

def _real_roots_in_unit(poly):
    if poly.degree < 1:
        return []
    roots = solve_low_degree(poly)
    out = []
    for z in roots:
        if abs(z.imag) <= _REAL_TOL * (1 + abs(z)) and 0 < z.real < 1:
            out.append(z.real)
    return sorted(set(out))


def _reconstruct(affine, values):
    return np.array([float(c) + sum(float(a) * v for a, v in zip(coefs, values)) for c, coefs in affine])


def _certify(mdl, u, p):
    if np.any(p <= 0) or not np.all(np.isfinite(p)):
        return None
    mres = moment_residual(mdl, p, u)
    vres = variety_residual(mdl, p)
    if mres <= _CERT_TOL and vres <= _CERT_TOL:
        return mres, vres
    return None


def _newton_polish(poly, x):
    d = poly.derivative()
    for _ in range(3):
        fx = float(poly(x))
        dx = float(d(x))
        if dx == 0:
            break
        nx = x - fx / dx
        if abs(float(poly(nx))) >= abs(fx):
            break
        x = nx
    return x


def _candidates(label, mdl, u, polys):
    """Try every combination of real roots of the per-coordinate polynomials."""
    free = [k - 1 for k in _FREE_PAIR[label]]
    affine = _affine_solution(mdl, u, free)
    root_lists = [[_newton_polish(polys[k], r) for r in _real_roots_in_unit(polys[k])]
                  for k in _FREE_PAIR[label]]
    tried = []
    certified = []
    if len(root_lists) == 1:
        combos = [(r,) for r in root_lists[0]]
    else:
        combos = [(a, b) for a in root_lists[0] for b in root_lists[1]]
    for combo in combos:
        p = _reconstruct(affine, combo)
        cert = _certify(mdl, u, p)
        tried.append({"free_values": list(combo), "p": p.tolist(),
                      "certified": cert is not None})
        if cert is not None:
            certified.append((p, cert))
    return certified, tried


def _relative_residual(poly, x):
    return float(poly.relative_residual(x))


def audit_paper_polynomials(model, u, p_hat):
    """Evaluate every printed polynomial at a certified estimate.

    Returns one entry per display with its relative residual at both the
    labelled coordinate and the written variable, and a discrepancy report
    (``None`` when the display vanishes at its labelled coordinate).
    """
    label, mdl = _model_for(model)
    u = _counts(mdl, u)
    p_hat = np.asarray(p_hat, dtype=float)
    out = []
    for disp in paper_displays(mdl, u):
        at_label = _relative_residual(disp.poly, p_hat[disp.label - 1])
        at_var = _relative_residual(disp.poly, p_hat[disp.variable - 1])
        derived = eliminate_to_univariate(mdl, u, disp.label)
        at_derived = _relative_residual(derived, p_hat[disp.label - 1])
        entry = {"display": disp.name, "label": disp.label, "variable": disp.variable,
                 "residual_at_label": at_label, "residual_at_variable": at_var,
                 "derived_residual": at_derived, "holds": at_label <= _ROOT_TOL}
        entry["discrepancy"] = None if entry["holds"] else {
            "model": label,
            "coordinate": f"p{disp.label}",
            "paper_poly": str(disp.poly),
            "derived_poly": str(derived),
            "witness_phat": p_hat.tolist(),
            "residuals": {"paper_at_coordinate": at_label,
                          "paper_at_written_variable": at_var,
                          "derived_at_coordinate": at_derived},
        }
        out.append(entry)
    return out


def mle_closed_form(model, u) -> MLEResult:
    """MLE for a cubic or quartic surface model via radical root formulas.

    The per-coordinate polynomials are solved with Cardano or Ferrari,
    candidates are rebuilt through the moment equations, and the single
    candidate that is positive and passes both residual certificates is
    returned.  ``extra`` records the polynomial source and the audit of the
    printed polynomials.

    Raises
    ------
    UnsupportedModelError
        For models outside :data:`SUPPORTED_MODELS`.
    PreconditionError
        If a count is zero.
    InconsistencyError
        If no candidate from either source passes the certificates.
    """
    label, mdl = _model_for(model)
    u = _counts(mdl, u)
    if not u.positive:
        raise PreconditionError("closed forms need strictly positive counts")

    paper = {}
    for disp in paper_displays(mdl, u):
        paper.setdefault(disp.label, disp.poly)
    certified, tried_paper = _candidates(label, mdl, u, paper)
    source = "paper"
    tried_derived = []
    if len(certified) != 1:
        derived = {k: eliminate_to_univariate(mdl, u, k) for k in _FREE_PAIR[label]}
        certified, tried_derived = _candidates(label, mdl, u, derived)
        source = "derived"
    if len(certified) != 1:
        raise InconsistencyError(
            f"{len(certified)} certified candidates for model {label} (expected exactly one)",
            details={"paper_candidates": tried_paper, "derived_candidates": tried_derived})
    p_hat, (mres, vres) = certified[0]
    theta = theta_from_p(label, p_hat)
    audit = audit_paper_polynomials(mdl, u, p_hat)
    return MLEResult(
        p_hat=p_hat,
        theta_hat=theta,
        log_lik=log_likelihood(p_hat, u),
        moment_residual=mres,
        variety_residual=vres,
        method=f"closed_form_{source}",
        model_label=label,
        extra={
            "polynomial_source": source,
            "theta_roundtrip": float(np.max(np.abs(parametrize(mdl, theta) - p_hat))),
            "discrepancies": [a["discrepancy"] for a in audit if a["discrepancy"]],
        },
    )
