"""Exact-rational polynomials.

``UnivariatePolynomial`` stores dense ascending coefficients;
``MultivariatePolynomial`` is a sparse map from exponent tuples to
``Fraction`` coefficients over a fixed number of variables.  Both are
immutable value types.  Float and complex evaluation are provided for root
certification, but all algebra stays exact.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Number

import numpy as np

from .errors import DomainError

__all__ = ["UnivariatePolynomial", "MultivariatePolynomial", "lagrange_interpolate"]


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class UnivariatePolynomial:
    """Dense univariate polynomial, coefficients in ascending degree.

    Coefficients are exact ``Fraction`` values unless the polynomial was
    built with ``exact=False`` (complex floats, used for root finding only).
    """

    __slots__ = ("coeffs", "exact")

    def __init__(self, coeffs, exact=True):
        if exact:
            cs = [_frac(c) for c in coeffs]
        else:
            cs = [complex(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.exact = exact

    # construction -----------------------------------------------------
    @classmethod
    def from_roots(cls, roots, lead=1):
        coeffs = [_frac(lead)]
        for r in roots:
            r = _frac(r)
            new = [Fraction(0)] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                new[i + 1] += c
                new[i] -= r * c
            coeffs = new
        return cls(coeffs)

    @classmethod
    def x(cls):
        return cls([0, 1])

    # basic properties -------------------------------------------------
    @property
    def degree(self):
        """Degree; the zero polynomial has degree -1."""
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self):
        return not self.coeffs

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Number):
            other = UnivariatePolynomial([other], exact=self.exact)
        return isinstance(other, UnivariatePolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UnivariatePolynomial({[str(c) for c in self.coeffs]})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            cs = str(c)
            terms.append(cs if not mono else (mono if c == 1 else f"({cs})*{mono}"))
        return " + ".join(terms)

    # arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, UnivariatePolynomial):
            return other
        return UnivariatePolynomial([other], exact=self.exact)

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return UnivariatePolynomial([x + y for x, y in zip(a, b)], exact=self.exact and other.exact)

    __radd__ = __add__

    def __neg__(self):
        return UnivariatePolynomial([-c for c in self.coeffs], exact=self.exact)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return UnivariatePolynomial([], exact=self.exact and other.exact)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UnivariatePolynomial(out, exact=self.exact and other.exact)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = UnivariatePolynomial([1], exact=self.exact)
        for _ in range(int(k)):
            out = out * self
        return out

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [0] * max(len(rem) - len(other.coeffs) + 1, 0)
        lead = other.leading
        while len(rem) >= len(other.coeffs) and rem:
            shift = len(rem) - len(other.coeffs)
            f = rem[-1] / lead
            q[shift] = f
            for i, c in enumerate(other.coeffs):
                rem[shift + i] -= f * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        exact = self.exact and other.exact
        return UnivariatePolynomial(q, exact=exact), UnivariatePolynomial(rem, exact=exact)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def divides(self, other):
        """True if ``self`` divides ``other`` exactly."""
        return (other % self).is_zero()

    # evaluation -------------------------------------------------------
    def __call__(self, x):
        acc = 0 if not isinstance(x, (Fraction, int)) else Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + (c if isinstance(x, (Fraction, int)) else complex(c))
        if isinstance(x, (float, np.floating)) and isinstance(acc, complex) and acc.imag == 0:
            return acc.real
        return acc

    def abs_eval(self, x):
        """``sum |c_k| |x|^k``, the natural scale for a relative residual at ``x``."""
        r = abs(x)
        return float(sum(abs(complex(c)) * r ** k for k, c in enumerate(self.coeffs)))

    def relative_residual(self, x):
        scale = self.abs_eval(x)
        return abs(complex(self(complex(x)))) / scale if scale else 0.0

    def derivative(self):
        return UnivariatePolynomial([k * c for k, c in enumerate(self.coeffs)][1:], exact=self.exact)

    # exact algebra ----------------------------------------------------
    def monic(self):
        if self.is_zero():
            return self
        return UnivariatePolynomial([c / self.leading for c in self.coeffs])

    def gcd(self, other):
        a, b = self, self._coerce(other)
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def squarefree_part(self):
        """``p / gcd(p, p')``, made monic."""
        if self.degree <= 0:
            return self.monic()
        g = self.gcd(self.derivative())
        return (self // g).monic()

    def primitive(self):
        """Scale to coprime integer coefficients with positive leading coefficient."""
        if self.is_zero():
            return self
        from math import gcd, lcm
        den = 1
        for c in self.coeffs:
            den = lcm(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for c in ints:
            g = gcd(g, c)
        sign = 1 if ints[-1] > 0 else -1
        return UnivariatePolynomial([sign * c // g for c in ints])

    def strip_x_power(self):
        """Return ``(k, q)`` with ``self = x^k q`` and ``q(0) != 0``."""
        k = 0
        while k < len(self.coeffs) and self.coeffs[k] == 0:
            k += 1
        return k, UnivariatePolynomial(self.coeffs[k:], exact=self.exact)

    def to_complex_array(self):
        """Ascending complex coefficients scaled so the largest has modulus one."""
        if self.is_zero():
            return np.zeros(0, dtype=complex)
        if self.exact:
            big = max(abs(c) for c in self.coeffs)
            return np.array([complex(c / big) for c in self.coeffs], dtype=complex)
        arr = np.array(self.coeffs, dtype=complex)
        return arr / np.max(np.abs(arr))


def lagrange_interpolate(xs, ys):
    """Exact univariate interpolant through ``(xs[i], ys[i])`` (Newton divided differences)."""
    xs = [_frac(x) for x in xs]
    coef = [_frac(y) for y in ys]
    n = len(xs)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = UnivariatePolynomial([coef[-1]])
    for i in range(n - 2, -1, -1):
        poly = poly * UnivariatePolynomial([-xs[i], 1]) + coef[i]
    return poly


class MultivariatePolynomial:
    """Sparse polynomial with exact rational coefficients.

    Parameters
    ----------
    terms : dict
        Maps exponent tuples (all of length ``nvars``) to coefficients.
    nvars : int
    """

    __slots__ = ("terms", "nvars")

    def __init__(self, terms, nvars):
        clean = {}
        for e, c in dict(terms).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise ValueError(f"exponent {e} has wrong length for {nvars} variables")
            if any(x < 0 for x in e):
                raise ValueError("negative exponent")
            c = _frac(c)
            if c != 0:
                clean[e] = clean.get(e, Fraction(0)) + c
                if clean[e] == 0:
                    del clean[e]
        self.terms = clean
        self.nvars = nvars

    # construction -----------------------------------------------------
    @classmethod
    def constant(cls, c, nvars):
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def variable(cls, i, nvars):
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): 1}, nvars)

    @classmethod
    def monomial(cls, exps, coeff=1):
        return cls({tuple(exps): coeff}, len(exps))

    @classmethod
    def from_univariate(cls, poly, var, nvars):
        terms = {}
        for k, c in enumerate(poly.coeffs):
            e = [0] * nvars
            e[var] = k
            terms[tuple(e)] = c
        return cls(terms, nvars)

    # properties -------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def degree(self, var=None):
        """Degree in one variable, or total degree when ``var`` is None (-1 for zero)."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        return max(e[var] for e in self.terms)

    def variables(self):
        return sorted({i for e in self.terms for i, x in enumerate(e) if x})

    def __eq__(self, other):
        if isinstance(other, Number):
            other = MultivariatePolynomial.constant(other, self.nvars)
        return (isinstance(other, MultivariatePolynomial) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"MultivariatePolynomial({ {e: str(c) for e, c in self.terms.items()} }, {self.nvars})"

    def __str__(self, names=None):
        if not self.terms:
            return "0"
        names = names or [f"x{i + 1}" for i in range(self.nvars)]
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(n + (f"^{k}" if k > 1 else "") for n, k in zip(names, e) if k)
            parts.append(str(c) if not mono else (mono if c == 1 else f"({c})*{mono}"))
        return " + ".join(parts)

    # arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MultivariatePolynomial):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return MultivariatePolynomial.constant(other, self.nvars)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return MultivariatePolynomial(terms, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return MultivariatePolynomial({e: -c for e, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return MultivariatePolynomial(terms, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = MultivariatePolynomial.constant(1, self.nvars)
        base = self
        k = int(k)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # structure --------------------------------------------------------
    def coefficients_in(self, var):
        """List ``[c_0, c_1, ...]`` with ``self = sum_k c_k * x_var^k``; ``c_k`` free of ``x_var``."""
        deg = self.degree(var)
        out = [dict() for _ in range(max(deg, -1) + 1)]
        for e, c in self.terms.items():
            k = e[var]
            out[k][e[:var] + (0,) + e[var + 1:]] = c
        return [MultivariatePolynomial(t, self.nvars) for t in out]

    def substitute(self, var, value):
        """Set ``x_var = value`` (exact); the variable slot stays, with exponent 0."""
        value = _frac(value)
        terms = {}
        for e, c in self.terms.items():
            ne = e[:var] + (0,) + e[var + 1:]
            terms[ne] = terms.get(ne, 0) + c * value ** e[var]
        return MultivariatePolynomial(terms, self.nvars)

    def evaluate(self, point):
        """Evaluate at a full point; exact for rationals, complex otherwise."""
        exact = all(isinstance(x, (int, Fraction)) for x in point)
        total = Fraction(0) if exact else 0j
        for e, c in self.terms.items():
            term = c if exact else complex(c)
            for x, k in zip(point, e):
                if k:
                    term *= x ** k
            total += term
        return total

    def abs_evaluate(self, point):
        """``sum |c| |x|^e``; scale for relative residuals."""
        total = 0.0
        for e, c in self.terms.items():
            term = abs(float(c))
            for x, k in zip(point, e):
                if k:
                    term *= abs(x) ** k
            total += term
        return total

    def to_univariate(self, var):
        """Convert to a univariate polynomial; all other variables must be absent."""
        if any(i != var for i in self.variables()):
            raise DomainError(f"polynomial involves variables other than x{var + 1}")
        coeffs = [Fraction(0)] * (self.degree(var) + 1)
        for e, c in self.terms.items():
            coeffs[e[var]] = c
        return UnivariatePolynomial(coeffs)

    def monomial_content(self):
        """Componentwise minimum exponent over all terms."""
        if not self.terms:
            return (0,) * self.nvars
        return tuple(min(e[i] for e in self.terms) for i in range(self.nvars))

    def divide_monomial(self, exps):
        return MultivariatePolynomial(
            {tuple(a - b for a, b in zip(e, exps)): c for e, c in self.terms.items()}, self.nvars)

    def derivative(self, var):
        terms = {}
        for e, c in self.terms.items():
            if e[var]:
                ne = e[:var] + (e[var] - 1,) + e[var + 1:]
                terms[ne] = c * e[var]
        return MultivariatePolynomial(terms, self.nvars)

    def content(self):
        """Positive rational content: gcd of numerators over lcm of denominators."""
        from math import gcd, lcm
        num, den = 0, 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
        return Fraction(num, den) if num else Fraction(0)

    def primitive(self):
        c = self.content()
        if c == 0:
            return self
        return MultivariatePolynomial({e: v / c for e, v in self.terms.items()}, self.nvars)
