"""Polynomial root finders.

Radical formulas for degrees three and four (Cardano, Ferrari), and an
Aberth-Ehrlich simultaneous iteration for any degree.  Coefficient
sequences are ascending (``c[k]`` multiplies ``x^k``) throughout, matching
:class:`~toricmle.polynomial.UnivariatePolynomial`.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = ["solve_cubic", "solve_quartic", "solve_low_degree", "complex_roots", "RootReport"]

_OMEGA = complex(-0.5, np.sqrt(3) / 2)


def _coeffs(poly):
    cs = getattr(poly, "coeffs", poly)
    cs = [complex(c) for c in cs]
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def _horner(cs, z):
    acc = 0j
    for c in reversed(cs):
        acc = acc * z + c
    return acc


def _polish(cs, roots, steps=3):
    """Newton refinement, each step kept only if it lowers ``|p(z)|``."""
    dcs = [k * c for k, c in enumerate(cs)][1:]
    out = []
    for z in roots:
        val = abs(_horner(cs, z))
        for _ in range(steps):
            d = _horner(dcs, z)
            if d == 0 or val == 0:
                break
            cand = z - _horner(cs, z) / d
            cv = abs(_horner(cs, cand))
            if cv >= val:
                break
            z, val = cand, cv
        out.append(z)
    return out


def _cbrt(z):
    if z == 0:
        return 0j
    return cmath.exp(cmath.log(z) / 3)


def _quadratic(a, b, c):
    """Roots of ``a x^2 + b x + c`` without cancellation."""
    disc = cmath.sqrt(b * b - 4 * a * c)
    # pick the sign that avoids cancellation
    if abs(-b + disc) < abs(-b - disc):
        disc = -disc
    q = (-b + disc) / 2
    if q == 0:
        return [0j, 0j]
    return [q / a, c / q]


def solve_cubic(poly):
    """Three complex roots of a cubic by Cardano's formula.

    Parameters
    ----------
    poly : UnivariatePolynomial or sequence
        Ascending coefficients; degree must be exactly 3.
    """
    cs = _coeffs(poly)
    if len(cs) != 4:
        raise DomainError(f"solve_cubic needs degree 3, got degree {len(cs) - 1}")
    d, c, b, a = cs
    b, c, d = b / a, c / a, d / a
    # x = t - b/3 gives t^3 + p t + q
    p = c - b * b / 3
    q = 2 * b ** 3 / 27 - b * c / 3 + d
    if p == 0:
        u = _cbrt(-q)
        ts = [u, u * _OMEGA, u * _OMEGA.conjugate()]
    else:
        disc = cmath.sqrt((q / 2) ** 2 + (p / 3) ** 3)
        w = -q / 2 + disc
        if abs(-q / 2 - disc) > abs(w):
            w = -q / 2 - disc
        u = _cbrt(w)
        ts = []
        if u == 0:
            # q is negligible next to p: t (t^2 + p) = 0
            r = cmath.sqrt(-p)
            ts = [0j, r, -r]
        for k in range(3 if u != 0 else 0):
            uk = u * _OMEGA ** k
            ts.append(uk - p / (3 * uk))
    roots = [t - b / 3 for t in ts]
    return _polish(cs, roots)


def solve_quartic(poly):
    """Four complex roots of a quartic by Ferrari's method.

    The resolvent cubic is solved with :func:`solve_cubic`.
    """
    cs = _coeffs(poly)
    if len(cs) != 5:
        raise DomainError(f"solve_quartic needs degree 4, got degree {len(cs) - 1}")
    e, d, c, b, a = cs
    b, c, d, e = b / a, c / a, d / a, e / a
    # x = y - b/4 gives y^4 + p y^2 + q y + r
    p = c - 3 * b * b / 8
    q = d - b * c / 2 + b ** 3 / 8
    r = e - b * d / 4 + b * b * c / 16 - 3 * b ** 4 / 256
    s = 0
    if q != 0:
        # 8 m^3 + 8 p m^2 + (2 p^2 - 8 r) m - q^2 = 0
        ms = solve_cubic([-q * q, 2 * p * p - 8 * r, 8 * p, 8])
        m = max(ms, key=abs)
        s = cmath.sqrt(2 * m)
    if s == 0:
        # biquadratic (q vanishes, or is too small for its square to be representable)
        ys = []
        for z in _quadratic(1, p, r):
            w = cmath.sqrt(z)
            ys += [w, -w]
    else:
        ys = (_quadratic(1, -s, p / 2 + m + q / (2 * s))
              + _quadratic(1, s, p / 2 + m - q / (2 * s)))
    roots = [y - b / 4 for y in ys]
    return _polish(cs, roots)


def solve_low_degree(poly):
    """Roots of a polynomial of degree 1 to 4 by radicals."""
    cs = _coeffs(poly)
    deg = len(cs) - 1
    if deg == 1:
        return [-cs[0] / cs[1]]
    if deg == 2:
        return _polish(cs, _quadratic(cs[2], cs[1], cs[0]))
    if deg == 3:
        return solve_cubic(cs)
    if deg == 4:
        return solve_quartic(cs)
    raise DomainError(f"no radical solver for degree {deg}")


@dataclass
class RootReport:
    """Roots from :func:`complex_roots`.

    ``clusters`` lists ``(center, indices)`` for every group of roots closer
    than the clustering radius; ``simple`` is False if any group has more
    than one member.
    """

    roots: np.ndarray
    residuals: np.ndarray
    clusters: list = field(default_factory=list)
    sweeps: int = 0

    @property
    def simple(self):
        return all(len(idx) == 1 for _, idx in self.clusters)

    @property
    def multiple(self):
        return [(c, len(idx)) for c, idx in self.clusters if len(idx) > 1]


def _initial_guesses(cs):
    """Bini's starting points: circles whose radii come from the Newton polygon."""
    n = len(cs) - 1
    logs = np.array([np.log(abs(c)) if c != 0 else -np.inf for c in cs])
    pts = [k for k in range(n + 1) if np.isfinite(logs[k])]
    # upper convex hull of (k, log|c_k|)
    hull = []
    for k in pts:
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            if (logs[j] - logs[i]) * (k - i) <= (logs[k] - logs[i]) * (j - i):
                hull.pop()
            else:
                break
        hull.append(k)
    guesses = []
    sigma = 0.7
    for i, j in zip(hull, hull[1:]):
        count = j - i
        radius = np.exp((logs[i] - logs[j]) / count)
        for t in range(count):
            ang = 2 * np.pi * t / count + 2 * np.pi * i / n + sigma
            guesses.append(radius * complex(np.cos(ang), np.sin(ang)))
    return np.array(guesses, dtype=complex)


def complex_roots(poly, max_sweeps=500, cluster_tol=1e-7, cert_tol=1e-8):
    """All complex roots by Aberth-Ehrlich iteration.

    Parameters
    ----------
    poly : UnivariatePolynomial or sequence
        Ascending coefficients, degree at least 1.
    max_sweeps : int
        Iteration limit.
    cluster_tol : float
        Roots closer than ``cluster_tol * max(1, |z|)`` are grouped as one
        non-simple cluster.
    cert_tol : float
        Each root must satisfy ``|p(z)| <= cert_tol * ||c||_1 * (1 + |z|)^n``.

    Returns
    -------
    RootReport

    Raises
    ------
    ConvergenceError
        If the iteration does not settle within ``max_sweeps`` or a root
        fails its residual certificate.
    """
    cs = _coeffs(poly)
    if len(cs) < 2:
        raise DomainError("complex_roots needs degree >= 1")
    scale = max(abs(c) for c in cs)
    cs = [c / scale for c in cs]
    # roots at the origin are exact
    zeros = 0
    while cs[zeros] == 0:
        zeros += 1
    work = cs[zeros:]
    n = len(work) - 1
    dwork = [k * c for k, c in enumerate(work)][1:]

    z = _initial_guesses(work) if n > 0 else np.zeros(0, dtype=complex)
    done = np.zeros(n, dtype=bool)
    eps = np.finfo(float).eps
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        for i in range(n):
            if done[i]:
                continue
            pz = _horner(work, z[i])
            if pz == 0:
                done[i] = True
                continue
            dz = _horner(dwork, z[i])
            ratio = pz / dz if dz != 0 else np.inf
            diff = z[i] - np.delete(z, i)
            s = np.sum(1.0 / diff) if n > 1 else 0
            w = ratio / (1 - ratio * s)
            if not np.isfinite(w):
                w = 1e-3 * (1 + abs(z[i]))
            z[i] -= w
            if abs(w) <= 4 * eps * abs(z[i]) or abs(w) == 0:
                done[i] = True
        if done.all():
            break
        if sweeps >= 50 and sweeps % 10 == 0:
            # stagnation near multiple roots: accept once every root is certified
            res = [abs(_horner(work, zi)) for zi in z]
            bounds = [1e-3 * cert_tol * sum(abs(c) for c in work) * (1 + abs(zi)) ** n for zi in z]
            if all(r <= b for r, b in zip(res, bounds)):
                break
    roots = np.concatenate([np.zeros(zeros, dtype=complex), z])
    norm1 = sum(abs(c) for c in cs)
    deg = len(cs) - 1
    residuals = np.array([abs(_horner(cs, r)) for r in roots])
    bounds = np.array([cert_tol * norm1 * (1 + abs(r)) ** deg for r in roots])
    if np.any(residuals > bounds) or not np.all(np.isfinite(roots)):
        raise ConvergenceError(
            f"Aberth iteration failed to certify all roots after {sweeps} sweeps",
            last_iterate=roots.tolist(), residual=float(np.max(residuals / bounds)))

    clusters = _cluster(roots, cluster_tol)
    return RootReport(roots=roots, residuals=residuals, clusters=clusters, sweeps=sweeps)


def _cluster(roots, tol):
    n = len(roots)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) <= tol * max(1.0, abs(roots[i]), abs(roots[j])):
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [(complex(np.mean(roots[idx])), idx) for idx in groups.values()]
