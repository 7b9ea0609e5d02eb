from fractions import Fraction
from math import prod

import numpy as np
import sympy
from hypothesis import given
from hypothesis import strategies as st

from toricmle.intlinalg import (
    determinantal_divisor,
    fraction_free_det,
    integer_kernel,
    rank,
    smith_invariants,
    smith_normal_form,
)

small_matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)))


def test_kernel_of_cubic_matrix():
    assert integer_kernel([[2, 1, 0, 1], [1, 2, 0, 1], [0, 0, 3, 1]]) == [(-1, -1, -1, 3)]


def test_kernel_of_invertible_matrix_is_empty():
    assert integer_kernel([[1, 2], [3, 5]]) == []


def test_snf_known_example():
    assert smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]


def test_bareiss_matches_sympy():
    M = [[3, -1, 4, 1], [5, 9, -2, 6], [5, 3, 5, -8], [9, 7, 9, 3]]
    assert fraction_free_det(M) == sympy.Matrix(M).det()
    F = [[Fraction(1, 2), Fraction(2, 3)], [Fraction(-5, 7), Fraction(3)]]
    assert fraction_free_det(F) == Fraction(1, 2) * 3 + Fraction(2, 3) * Fraction(5, 7)


@given(small_matrices)
def test_snf_agrees_with_determinantal_divisors(M):
    inv = smith_invariants(M)
    r = rank(M)
    assert len(inv) == r == sympy.Matrix(M).rank()
    for a, b in zip(inv, inv[1:]):
        assert b % a == 0
    for k in range(1, r + 1):
        assert prod(inv[:k]) == determinantal_divisor(M, k)


@given(small_matrices)
def test_kernel_vectors_are_in_kernel_and_span_full_rank(M):
    basis = integer_kernel(M)
    A = np.array(M)
    assert len(basis) == A.shape[1] - rank(M)
    for v in basis:
        assert not np.any(A @ np.array(v))
    if basis:
        # the lattice basis is saturated: its maximal minors have gcd 1
        assert determinantal_divisor([list(v) for v in basis], len(basis)) == 1
