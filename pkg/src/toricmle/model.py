"""Toric (log-linear) statistical models.

A model is a nonnegative integer matrix ``A`` (d x m) with equal column sums.
Column ``a_j`` gives the monomial ``theta^{a_j}``; the model is the image of
the positive orthant under ``theta -> (theta^{a_j})_j / sum_k theta^{a_k}``.
Integer data (``A``, counts, sufficient statistics, kernels) stay exact;
only ``theta`` and probabilities are floating point.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError, MalformedInputError
from .intlinalg import as_int_matrix, integer_kernel, rank, smith_invariants

__all__ = [
    "ToricModel",
    "DataVector",
    "Binomial",
    "parse_binomial",
    "parametrize",
    "sufficient_statistic",
    "kernel_binomials",
    "variety_residual",
    "binomial_residual",
    "log_likelihood",
    "torus_fiber_degree",
    "degree_of_variety",
    "model_to_json",
    "model_from_json",
    "is_automorphism",
    "automorphisms",
]


@dataclass(frozen=True)
class Binomial:
    """``p^plus - p^minus`` with disjoint supports."""

    plus: tuple
    minus: tuple

    def __post_init__(self):
        plus = tuple(int(x) for x in self.plus)
        minus = tuple(int(x) for x in self.minus)
        if len(plus) != len(minus):
            raise ValueError("exponent vectors differ in length")
        if any(x < 0 for x in plus + minus):
            raise ValueError("negative exponent")
        if any(a and b for a, b in zip(plus, minus)):
            raise ValueError("plus and minus supports overlap")
        object.__setattr__(self, "plus", plus)
        object.__setattr__(self, "minus", minus)

    @classmethod
    def from_vector(cls, v):
        return cls(tuple(max(x, 0) for x in v), tuple(max(-x, 0) for x in v))

    @property
    def vector(self):
        return tuple(a - b for a, b in zip(self.plus, self.minus))

    @property
    def degree(self):
        return sum(self.plus), sum(self.minus)

    def evaluate(self, p):
        p = np.asarray(p, dtype=float)
        return float(np.prod(p ** np.array(self.plus)) - np.prod(p ** np.array(self.minus)))

    def permuted(self, perm):
        """Rename coordinate ``i`` to ``perm[i]``."""
        n = len(self.plus)
        plus, minus = [0] * n, [0] * n
        for i, j in enumerate(perm):
            plus[j], minus[j] = self.plus[i], self.minus[i]
        return Binomial(tuple(plus), tuple(minus))

    def __str__(self):
        def mono(e):
            parts = [f"p{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k]
            return "*".join(parts) or "1"
        return f"{mono(self.plus)} - {mono(self.minus)}"


_TERM = re.compile(r"p(\d+)(?:\^(\d+))?")


def parse_binomial(text, m):
    """Parse ``"p1*p4 - p5^2"`` into a :class:`Binomial` on ``m`` coordinates."""
    try:
        left, right = text.split("-")
    except ValueError:
        raise MalformedInputError(f"not a binomial: {text!r}") from None

    def exps(side):
        e = [0] * m
        for factor in side.split("*"):
            factor = factor.strip()
            match = _TERM.fullmatch(factor)
            if not match:
                raise MalformedInputError(f"bad factor {factor!r} in {text!r}")
            i = int(match.group(1)) - 1
            if not 0 <= i < m:
                raise MalformedInputError(f"coordinate p{i + 1} out of range in {text!r}")
            e[i] += int(match.group(2) or 1)
        return e

    plus, minus = exps(left), exps(right)
    common = [min(a, b) for a, b in zip(plus, minus)]
    return Binomial(tuple(a - c for a, c in zip(plus, common)),
                    tuple(b - c for b, c in zip(minus, common)))


class ToricModel:
    """Nonnegative integer matrix with equal column sums.

    Parameters
    ----------
    matrix : array_like of int, shape (d, m)
    label : str, optional
    """

    def __init__(self, matrix, label=""):
        rows = as_int_matrix(matrix)
        if not rows or not rows[0]:
            raise MalformedInputError("empty model matrix")
        if any(x < 0 for row in rows for x in row):
            raise MalformedInputError("model matrix has negative entries")
        sums = {sum(col) for col in zip(*rows)}
        if len(sums) != 1:
            raise MalformedInputError(f"column sums differ: {sorted(sums)}")
        self._rows = tuple(tuple(r) for r in rows)
        self.column_sum = sums.pop()
        if self.column_sum <= 0:
            raise MalformedInputError("column sum must be positive")
        self.label = label

    @property
    def matrix(self):
        return [list(r) for r in self._rows]

    @cached_property
    def array(self):
        A = np.array(self._rows, dtype=float)
        A.setflags(write=False)
        return A

    @property
    def shape(self):
        return len(self._rows), len(self._rows[0])

    @property
    def d(self):
        return self.shape[0]

    @property
    def m(self):
        return self.shape[1]

    @property
    def columns(self):
        return [tuple(c) for c in zip(*self._rows)]

    @cached_property
    def rank(self):
        return rank(self._rows)

    @cached_property
    def binomials(self):
        return kernel_binomials(self)

    def permute_columns(self, order, label=None):
        return ToricModel([[row[j] for j in order] for row in self._rows],
                          label=self.label if label is None else label)

    def __eq__(self, other):
        return isinstance(other, ToricModel) and self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        return f"ToricModel({self.matrix!r}, label={self.label!r})"


class DataVector:
    """Nonnegative integer counts with positive total."""

    def __init__(self, counts):
        if isinstance(counts, DataVector):
            counts = counts.u
        arr = np.asarray(counts)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("data vector must be a non-empty 1-d sequence")
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise DomainError("data vector entries must be integers")
        u = tuple(int(x) for x in arr)
        if any(x < 0 for x in u):
            raise DomainError("data vector entries must be nonnegative")
        if sum(u) < 1:
            raise DomainError("data vector must have total count N >= 1")
        self.u = u

    @property
    def N(self):
        return sum(self.u)

    @property
    def positive(self):
        return all(x > 0 for x in self.u)

    def __len__(self):
        return len(self.u)

    def __iter__(self):
        return iter(self.u)

    def __getitem__(self, i):
        return self.u[i]

    def __eq__(self, other):
        return isinstance(other, DataVector) and self.u == other.u

    def __repr__(self):
        return f"DataVector({list(self.u)})"


def _data(model, u):
    u = u if isinstance(u, DataVector) else DataVector(u)
    if len(u) != model.m:
        raise DomainError(f"data vector has length {len(u)}, model {model.label!r} has {model.m} columns")
    return u


def parametrize(model, theta):
    """Probability vector ``p_j = theta^{a_j} / sum_k theta^{a_k}``.

    Evaluated in log space, so it is stable for widely spread ``theta``.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (model.d,):
        raise DomainError(f"theta must have length {model.d}")
    if not np.all(theta > 0):
        raise DomainError("theta must be strictly positive")
    return _p_from_log(model, np.log(theta))


def _p_from_log(model, log_theta):
    logs = model.array.T @ log_theta
    return np.exp(logs - logsumexp(logs))


def sufficient_statistic(model, u):
    """``b = A u`` as exact integers."""
    u = _data(model, u)
    b = tuple(sum(a * x for a, x in zip(row, u.u)) for row in model.matrix)
    assert sum(b) == model.column_sum * u.N
    return b


def kernel_binomials(model):
    """Binomials from a lattice basis of ``ker(A)`` over the integers."""
    return [Binomial.from_vector(v) for v in integer_kernel(model.matrix)]


def binomial_residual(binomials, p):
    p = np.asarray(p, dtype=float)
    if not binomials:
        return 0.0
    return max(abs(b.evaluate(p)) for b in binomials)


def variety_residual(model, p):
    """Largest ``|p^plus - p^minus|`` over the kernel binomials; zero on the model."""
    p = np.asarray(p, dtype=float)
    if p.shape != (model.m,):
        raise DomainError(f"p must have length {model.m}")
    if not np.all(p > 0):
        raise DomainError("variety residual needs strictly positive p")
    return binomial_residual(model.binomials, p)


def log_likelihood(p, u):
    """``sum_j u_j log p_j - N log(sum_j p_j)``, multinomial coefficient dropped.

    Returns ``-inf`` when some ``p_j`` is zero but ``u_j`` is not.
    """
    p = np.asarray(p, dtype=float)
    u = np.asarray(u.u if isinstance(u, DataVector) else u, dtype=float)
    if p.shape != u.shape:
        raise DomainError("p and u differ in length")
    if np.any(p < 0):
        raise DomainError("probabilities must be nonnegative")
    mask = u > 0
    if np.any(p[mask] == 0):
        return float("-inf")
    return float(np.sum(u[mask] * np.log(p[mask])) - u.sum() * np.log(p.sum()))


def _difference_matrix(model):
    cols = model.columns
    last = cols[-1]
    return [[a - b for a, b in zip(c, last)] for c in cols[:-1]]


def torus_fiber_degree(model):
    """Generic number of torus points, up to scaling, with the same image.

    The parameters mapping to one projective model point form a coset of
    ``{t : t^{a_j - a_m} = 1 for all j}``; modulo scaling this group is finite
    of order equal to the product of the invariant factors of the matrix of
    column differences.
    """
    M = _difference_matrix(model)
    if rank(M) != model.d - 1:
        raise DomainError("model matrix must have rank d (columns affinely spanning)")
    out = 1
    for f in smith_invariants(M):
        out *= f
    return out


def degree_of_variety(model):
    """Normalized volume of the column polytope in its own affine lattice.

    For a model lifted from a reflexive polygon this is twice the polygon's
    area, i.e. the degree of the toric surface.
    """
    cols = model.columns
    diffs = [tuple(a - b for a, b in zip(c, cols[0])) for c in cols]
    basis = _lattice_basis(diffs)
    k = len(basis)
    if k == 0:
        return 1
    coords = np.array([_solve_integer_coords(basis, v) for v in diffs], dtype=float)
    if k == 1:
        return int(round(coords.max() - coords.min()))
    from scipy.spatial import ConvexHull
    from math import factorial
    return int(round(ConvexHull(coords).volume * factorial(k)))


def _lattice_basis(vectors):
    """Basis (rows) of the lattice spanned by integer vectors, via column echelon form."""
    vecs = [list(v) for v in vectors if any(v)]
    if not vecs:
        return []
    # kernel trick: the lattice spanned by rows of V is the row space; row-reduce with unimodular ops
    V = [row[:] for row in vecs]
    n = len(V[0])
    out = []
    r = 0
    for c in range(n):
        rows = [i for i in range(r, len(V)) if V[i][c] != 0]
        if not rows:
            continue
        while True:
            rows = [i for i in range(r, len(V)) if V[i][c] != 0]
            piv = min(rows, key=lambda i: abs(V[i][c]))
            V[r], V[piv] = V[piv], V[r]
            others = [i for i in range(r + 1, len(V)) if V[i][c] != 0]
            if not others:
                break
            for i in others:
                q = V[i][c] // V[r][c]
                V[i] = [x - q * y for x, y in zip(V[i], V[r])]
        out.append(tuple(V[r]))
        r += 1
        if r == len(V):
            break
    return out


def _solve_integer_coords(basis, v):
    """Coordinates of ``v`` in an echelon lattice basis (exact back-substitution)."""
    from fractions import Fraction
    coords = []
    rem = [Fraction(x) for x in v]
    for b in basis:
        c = next(i for i, x in enumerate(b) if x != 0)
        k = rem[c] / b[c]
        if k.denominator != 1:
            raise DomainError("vector is not in the lattice")
        coords.append(int(k))
        rem = [x - k * y for x, y in zip(rem, b)]
    if any(rem):
        raise DomainError("vector is not in the lattice")
    return coords


def is_automorphism(model, perm):
    """True if permuting columns by ``perm`` maps the column set onto itself up to an
    invertible linear map of the rows (so the model is unchanged)."""
    A = np.array(model.matrix, dtype=float)
    B = A[:, list(perm)]
    # find T with T A = B by least squares and verify exactly
    T, *_ = np.linalg.lstsq(A.T, B.T, rcond=None)
    return bool(np.allclose(A.T @ T, B.T, atol=1e-9) and abs(np.linalg.det(T)) > 1e-9)


def model_to_json(model):
    return {"label": model.label, "matrix": model.matrix,
            "binomials": [str(b) for b in model.binomials]}


def model_from_json(doc):
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    try:
        model = ToricModel(doc["matrix"], label=doc.get("label", ""))
    except KeyError:
        raise MalformedInputError("model JSON needs a 'matrix' field") from None
    for text in doc.get("binomials", ()):
        b = parse_binomial(text, model.m)
        v = np.array(b.vector)
        if np.any(np.array(model.matrix) @ v):
            raise MalformedInputError(f"binomial {text!r} is not in the kernel of the matrix")
    return model


def automorphisms(model):
    """Column permutations that are model automorphisms (brute force; m is tiny)."""
    from itertools import permutations
    return [perm for perm in permutations(range(model.m)) if is_automorphism(model, perm)]
