from itertools import product

import numpy as np
import pytest
import sympy
from hypothesis import assume, given, strategies as st

from quasitoric.intmat import (
    batched_det,
    exact_det,
    gf2_rank,
    howell_form,
    howell_reduce,
    integer_echelon,
    inverse_mod,
    smith,
    unimodular_inverse,
)
from strategies import unimodular


def square(max_n=4, lo=-6, hi=6):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n)
    )


def rect(max_rows=5, max_cols=4, lo=-5, hi=5):
    return st.tuples(st.integers(1, max_rows), st.integers(1, max_cols)).flatmap(
        lambda s: st.lists(st.lists(st.integers(lo, hi), min_size=s[1], max_size=s[1]), min_size=s[0], max_size=s[0])
    )


@given(square(5, -20, 20))
def test_exact_det_matches_sympy(a):
    assert exact_det(a) == sympy.Matrix(a).det()


@given(st.lists(square(4).filter(lambda a: len(a) == 4), min_size=1, max_size=6))
def test_batched_det_matches_exact(stack):
    got = batched_det(np.array(stack))
    assert [int(x) for x in got] == [exact_det(a) for a in stack]


@given(unimodular())
def test_unimodular_inverse(a):
    inv = unimodular_inverse(a)
    assert np.array_equal(np.array(a) @ inv, np.eye(len(a), dtype=np.int64))


def test_unimodular_inverse_rejects():
    with pytest.raises(ValueError):
        unimodular_inverse([[2, 0], [0, 1]])


@given(square(3, 0, 6), st.sampled_from([2, 3, 4, 5, 8, 9]))
def test_inverse_mod(a, k):
    d = exact_det(a) % k
    assume(sympy.gcd(d, k) == 1)
    inv = inverse_mod(a, k)
    assert np.array_equal(np.array(a) @ inv % k, np.eye(len(a), dtype=np.int64) % k)


@given(rect())
def test_smith_diagonal(a):
    diag, S, T = smith(a)
    D = S * sympy.Matrix(a) * T
    for i in range(D.rows):
        for j in range(D.cols):
            if i != j:
                assert D[i, j] == 0
    assert [abs(x) for x in diag] == [abs(D[i, i]) for i in range(len(diag))]
    for x, y in zip(diag, diag[1:]):
        assert y % x == 0
    assert len(diag) == sympy.Matrix(a).rank()


def _lattice_equal(a, b, n):
    # equal row lattices iff same Hermite normal form
    from sympy.matrices.normalforms import hermite_normal_form

    A = sympy.Matrix(a) if a else sympy.zeros(0, n)
    B = sympy.Matrix(b) if b else sympy.zeros(0, n)
    if A.rank() != B.rank():
        return False
    if A.rank() == 0:
        return True
    ha = hermite_normal_form(A.T).T
    hb = hermite_normal_form(B.T).T
    return ha == hb


@given(rect(6, 4, -4, 4))
def test_integer_echelon_spans_same_lattice(a):
    n = len(a[0])
    rows, piv = integer_echelon(a)
    assert piv == sorted(piv)
    for row, c in zip(rows, piv):
        assert row[c] > 0
        assert all(x == 0 for x in row[:c])
    assert _lattice_equal(a, rows, n)


def _span_mod(rows, k):
    n = len(rows[0])
    out = set()
    for coeffs in product(range(k), repeat=len(rows)):
        out.add(tuple(sum(c * r[j] for c, r in zip(coeffs, rows)) % k for j in range(n)))
    return out


@given(rect(3, 3, 0, 8), st.sampled_from([2, 4, 6, 8, 9]))
def test_howell_membership_is_exact(a, k):
    span = _span_mod(a, k)
    H = howell_form(a, k)
    for v in product(range(k), repeat=len(a[0])):
        assert (not any(howell_reduce(H, v, k))) == (v in span)


@given(rect(5, 6, 0, 1))
def test_gf2_rank(a):
    # plain GF(2) elimination as the oracle
    rows = [list(r) for r in a]
    r = 0
    for c in range(len(rows[0])):
        p = next((i for i in range(r, len(rows)) if rows[i][c] % 2), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] % 2:
                rows[i] = [(x + y) % 2 for x, y in zip(rows[i], rows[r])]
        r += 1
    assert gf2_rank(a) == r
