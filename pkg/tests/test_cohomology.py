import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from quasitoric import golden
from quasitoric.charmat import enumerate_integer, enumerate_real, make, permute_columns
from quasitoric.cohomology import (
    RingError,
    TABLE_ORDER,
    betti,
    char_classes,
    expand,
    fundamental_class,
    graded_basis,
    monomials,
    normal_form,
    pairing_csv,
    pairing_table,
    poincare_pairing,
    poly_add,
    poly_mul,
    presentation,
    reduce_mod,
)
from quasitoric.isomorphism import induced_isomorphism, substitute
from quasitoric.polytope import automorphism_group, dual_cyclic, fh_vectors, polygon, simplex

C36 = enumerate_integer(dual_cyclic(3, 6), 2)
P6 = enumerate_integer(polygon(6), 2)
C47 = list(golden.c47_lifts().values())

# a C^5(8)* class whose quotient has no basis made of monomials
NO_MONOMIAL_BASIS = [
    [1, 0, 0, 0, 0, -2, -2, -1],
    [0, 1, 0, 0, 0, -1, 0, -1],
    [0, 0, 1, 0, 0, -1, -1, -1],
    [0, 0, 0, 1, 0, -1, -1, 0],
    [0, 0, 0, 0, 1, 0, -1, 1],
]


def sympy_ideal(R):
    gens = sp.symbols(" ".join(R.names))
    lin = [sum(c * x for c, x in zip(f, gens)) for f in R.facet_forms]
    rels = [sp.expand(sp.prod([lin[i - 1] for i in S])) for S in R.missing]
    return gens, rels


def to_sympy(poly, gens):
    return sum(c * sp.prod([x**a for x, a in zip(gens, e)]) for e, c in poly.items())


@given(st.sampled_from(C36 + P6))
def test_betti_equals_h_vector(cl):
    R = presentation(cl.canonical)
    assert list(betti(R)) == list(fh_vectors(cl.canonical.polytope).h_vector)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_simplex_ring_is_truncated_polynomial(n):
    P = simplex(n)
    lam = make(P, np.hstack([np.eye(n, dtype=int), -np.ones((n, 1), dtype=int)]))
    R = presentation(lam)
    assert betti(R) == (1,) * (n + 1)
    assert R.g == 1


def test_quadric_basis_example():
    R = presentation(golden.c36_family(5))
    gb = graded_basis(R, 4)
    assert set(gb.basis) == {(0, 0, 2), (0, 1, 1), (1, 0, 1)}
    assert graded_basis(R, 0).basis == ((0, 0, 0),)
    assert graded_basis(R, 3).rank == 0


def ring_and_poly(classes, degree):
    def build(args):
        cl, coeffs, mult = args
        R = presentation(cl.canonical)
        mons = monomials(R.g, degree)
        return R, {e: c for e, c in zip(mons, coeffs) if c}, mult

    return st.tuples(
        st.sampled_from(classes),
        st.lists(st.integers(-5, 5), min_size=20, max_size=20),
        st.lists(st.integers(-3, 3), min_size=20, max_size=20),
    ).map(build)


@given(ring_and_poly(C36, 2), ring_and_poly(C36, 2))
def test_normal_form_is_linear(a, b):
    R, p, _ = a
    _, q, _ = b
    s = poly_add(p, q, scale=3)
    lhs = np.array(normal_form(R, s, 4))
    rhs = np.array(normal_form(R, p, 4)) + 3 * np.array(normal_form(R, q, 4))
    assert np.array_equal(lhs, rhs)


@given(ring_and_poly(C36, 1))
def test_normal_form_annihilates_ideal(data):
    # explicit combinations of relations times random linear multipliers
    R, _, mult = data
    total = {}
    for i, rel in enumerate(R.relations):
        if len(rel) != 2:
            continue
        lin = {e: c for e, c in zip(monomials(R.g, 1), mult[3 * i: 3 * i + 3]) if c}
        total = poly_add(total, poly_mul(expand(rel, R.g), lin))
    assert not any(normal_form(R, total, 6))


@given(st.sampled_from(C36))
def test_ideal_membership_agrees_with_groebner(cl):
    R = presentation(cl.canonical)
    gens, rels = sympy_ideal(R)
    G = sp.groebner(rels, *gens, order="grevlex")
    for d in (2, 3):
        for e in monomials(R.g, d)[:6]:
            p = {e: 1}
            q = poly_add(p, {monomials(R.g, d)[-1]: 2})
            for poly in (p, q):
                assert R.contains(poly, d) == G.contains(to_sympy(poly, gens))


def test_ring_without_monomial_basis_is_still_free():
    lam = make(dual_cyclic(5, 8), NO_MONOMIAL_BASIS)
    R = presentation(lam)
    assert betti(R) == (1, 3, 6, 6, 3, 1)
    top = graded_basis(R, 10)
    assert top.basis == () and top.rank == 1
    fc = fundamental_class(R)
    for d in range(6):
        M = poincare_pairing(R, d, fc)
        assert abs(sp.Matrix(M.tolist()).det()) == 1


@given(st.sampled_from(C36 + C47))
def test_poincare_duality(cl):
    lam = getattr(cl, "canonical", cl)
    R = presentation(lam)
    fc = fundamental_class(R)
    for d in range(R.top + 1):
        M = poincare_pairing(R, d, fc)
        assert abs(sp.Matrix(M.tolist()).det()) == 1


def test_fundamental_class_is_vertex_product():
    R = presentation(C47[8])
    fc = fundamental_class(R)
    assert fc.vertex == (1, 5, 6, 7)
    assert abs(fc.sign) == 1


def test_fundamental_class_needs_matrix():
    R = presentation(C47[0])
    R._cache.pop("matrix")
    with pytest.raises(RingError):
        fundamental_class(R)


def test_table_one_row():
    cols, rows = golden.table1()
    assert cols == TABLE_ORDER
    lifts = golden.c47_lifts()
    t = pairing_table(presentation(lifts[9]))
    assert [t[e] for e in cols] == rows["A"]
    text = pairing_csv({"A": t})
    assert text.splitlines()[0].startswith("ring,X^4,Y^4,Z^4,X^3Y")
    assert text.splitlines()[1] == "A," + ",".join(map(str, rows["A"]))


sigma47, tau47 = golden.c47_generators()


@given(st.sampled_from(C47), st.sampled_from(automorphism_group(dual_cyclic(4, 7))))
def test_pairing_table_transforms_under_automorphisms(lam, g):
    # <M(f), [M']> = +-<f, [M]> for the induced isomorphism M
    mu = permute_columns(lam, g)
    R, S = presentation(lam), presentation(mu)
    M = induced_isomorphism(lam, mu, g)
    tr, ts = pairing_table(R), pairing_table(S)
    ratios = set()
    for e, v in tr.items():
        img = substitute({e: 1}, M)
        w = sum(c * ts[f] for f, c in img.items())
        if v:
            ratios.add(w // v)
            assert w in (v, -v)
        else:
            assert w == 0
    assert len(ratios) == 1


@given(st.sampled_from(C36), st.sampled_from([2, 3, 4, 5]))
def test_reduce_mod_is_reduction(cl, k):
    R = presentation(cl.canonical)
    Rk = reduce_mod(R, k)
    for d in range(R.top + 1):
        assert np.array_equal(Rk.degree_data(d).coords, R.degree_data(d).coords % k)
    assert Rk.coeff_name == f"Z/{k}"


@pytest.mark.parametrize("m", [4, 5, 6])
def test_small_cover_ring_mod_two(m):
    for cl in enumerate_real(dual_cyclic(3, m)):
        R = presentation(cl.canonical)
        assert R.coeff == 2 and R.unit == 1
        assert list(betti(R)) == list(fh_vectors(cl.canonical.polytope).h_vector)


def test_char_classes_of_projective_plane():
    lam = make(simplex(2), [[1, 0, -1], [0, 1, -1]])
    cc = char_classes(lam)
    # w = (1 + v)^3 = 1 + v + v^2 mod 2
    assert cc.w == {0: (1,), 2: (1,), 4: (1,)}
    # product of (1 - v_i^2) over three facets gives -3 v^2 in degree 4
    assert cc.p[4] == (-3,)


def test_char_classes_sign_convention_consistent_with_first_pontrjagin():
    from quasitoric.cohomology import first_pontrjagin_poly

    lam = golden.c36_family(4)
    R = presentation(lam)
    assert tuple(R.coords(first_pontrjagin_poly(R), 2)) == char_classes(lam, R).p[4]


def test_presentation_json_shape():
    R = presentation(golden.c36_family(3))
    d = R.to_dict()
    assert d["g"] == 3 and d["coeff"] == "Z" and d["degrees"] == [2, 2, 2]
    assert len(d["substitutions"]) == 3
    assert all("factors" in r for r in d["relations"])
    assert sorted(len(r["factors"]) for r in d["relations"]) == [2, 2, 2, 3, 3]
