import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasitoric.charmat import canonical_form, enumerate_integer, enumerate_real, make, mod2_reduce
from quasitoric.connectsum import (
    SplitError,
    c3_connected_sum,
    c3_normal_form,
    c3_pieces,
    classify_c3_small_cover,
    classify_polygon_small_cover,
    connected_sum,
    decomposable_c3,
    form_normal_form,
    intersection_form,
    is_indecomposable_c3,
    polygon_normal_form,
    polygon_pieces,
    polygon_piece_label,
    reassemble,
    split,
)
from quasitoric.polytope import dual_cyclic, polygon, simplex

POLY_CLASSES = [c for m in (4, 5, 6) for c in enumerate_integer(polygon(m), 2)]
C3_REAL = [c for m in (5, 6, 7) for c in enumerate_real(dual_cyclic(3, m))]

CP2 = make(simplex(2), [[1, 0, -1], [0, 1, -1]])


@given(st.sampled_from(POLY_CLASSES))
def test_polygon_normal_form_agrees_with_intersection_form(cl):
    # the intersection form is computed independently of any splitting
    lam = cl.canonical
    q = intersection_form(lam)
    assert abs(round(np.linalg.det(q.astype(float)))) == 1
    assert polygon_normal_form(lam) == form_normal_form(q)


@given(st.sampled_from(POLY_CLASSES + [c for c in enumerate_real(polygon(7))]), st.integers(0, 10**6))
def test_split_order_does_not_matter(cl, seed):
    lam = cl.canonical
    assert polygon_normal_form(lam, random.Random(seed)) == polygon_normal_form(lam)


@given(st.sampled_from(POLY_CLASSES))
def test_polygon_pieces_are_standard(cl):
    for piece in polygon_pieces(cl.canonical):
        assert piece.m in (3, 4)
        assert polygon_piece_label(piece) in ("CP2", "CPbar2", "S2xS2", "CP2#CPbar2")


def _splittable(lam):
    P = lam.polytope
    from itertools import combinations

    for S in combinations(range(1, P.m + 1), P.n):
        try:
            yield split(lam, S)
        except SplitError:
            continue


@given(st.sampled_from(POLY_CLASSES + C3_REAL))
def test_split_then_reassemble_round_trip(cl):
    lam = cl.canonical
    for dec in _splittable(lam):
        assert np.array_equal(reassemble(dec), lam.array)
        for piece, mp in zip(dec.pieces, dec.maps):
            assert piece.polytope.is_vertex(dec.junction(dec.pieces.index(piece)))
            assert len(mp) == piece.m


def test_sum_of_two_projective_planes_is_a_square():
    # CP2 # CP2 lives over the quadrilateral
    v, tau = (1, 2), {1: 1, 2: 2}
    lam = connected_sum(CP2, v, CP2, v, tau)
    assert lam.m == 4
    assert polygon_normal_form(lam) in {form_normal_form(intersection_form(lam))}
    assert polygon_normal_form(lam).kind == "CP2"


@given(st.sampled_from(enumerate_integer(dual_cyclic(3, 5), 2)), st.sampled_from(enumerate_integer(dual_cyclic(3, 4), 2)))
def test_gluing_commutes_with_reduction_mod_two(a, b):
    lam1, lam2 = a.canonical, b.canonical
    whole = c3_connected_sum(lam1, lam2)
    reduced = c3_connected_sum(mod2_reduce(lam1), mod2_reduce(lam2))
    assert canonical_form(mod2_reduce(whole)).key == canonical_form(reduced).key
    assert decomposable_c3(whole, 4)


@given(st.sampled_from(C3_REAL))
def test_c3_small_covers_decompose(cl):
    lam = cl.canonical
    pieces = c3_pieces(lam)
    assert all(p.m in (4, 5) for p in pieces)
    # each split removes 3 shared facets from the count
    assert sum(p.m for p in pieces) - 3 * (len(pieces) - 1) == lam.m
    nf = c3_normal_form(lam)
    assert sum(nf.counts) == len(pieces)


def test_c3_small_cover_counts_cover_all_classes():
    for m in (5, 6, 7):
        assert sum(classify_c3_small_cover(m).values()) == len(enumerate_real(dual_cyclic(3, m)))


@pytest.mark.parametrize("m", [3, 4, 5, 6])
def test_polygon_small_covers(m):
    counts = classify_polygon_small_cover(m)
    assert sum(counts.values()) == len(enumerate_real(polygon(m)))
    # Euler characteristic 4 - m of the surface fixes the genus
    for name in counts:
        kind, k = name.split("#")
        assert (2 - 2 * int(k) if kind == "T2" else 2 - int(k)) == 4 - m


def test_decomposability_bounds():
    lam = enumerate_real(dual_cyclic(3, 6))[0].canonical
    with pytest.raises(SplitError):
        decomposable_c3(lam, 2)
    assert is_indecomposable_c3(lam) == (not any(decomposable_c3(lam, k) for k in (3, 4)))


def test_split_errors():
    lam = enumerate_integer(polygon(5), 2)[0].canonical
    with pytest.raises(SplitError):
        split(lam, (1, 2))  # already a vertex
    with pytest.raises(SplitError):
        split(lam, (1, 1))
    with pytest.raises(SplitError):
        split(lam, (1, 2, 3))
