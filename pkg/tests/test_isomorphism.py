from itertools import product

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from quasitoric import golden
from quasitoric.charmat import enumerate_integer, permute_columns
from quasitoric.cohomology import presentation
from quasitoric.intmat import exact_det
from quasitoric.isomorphism import (
    IsoError,
    apply_iso_check,
    char_class_preserved,
    covariant_lines,
    distinguish_all,
    fingerprint,
    induced_isomorphism,
    inverse_certificate,
    iso_by_covariants,
    iso_over_Z_bounded,
    iso_over_Zk,
    isomorphisms_mod,
    top_form,
)
from quasitoric.polytope import automorphism_group, dual_cyclic, polygon

X, Y, Z = sp.symbols("X Y Z")

# ideals as printed for the rings over C^3(6)*, with X, Y, Z = v_4, v_5, v_6
PRINTED = {
    "A_1": [X * (X + 2 * Y + 3 * Z), Y * (X + 2 * Y + 3 * Z), Y * (X + Y + Z), Z**2 * (X + Y + Z), Z**2 * X],
    "A_2": [X * (X + 2 * Y + 3 * Z), Y * (X + 2 * Y + 3 * Z), Y * (X + Y + Z), Z * (Y + Z) * (X + Y + Z),
            Z * X * (Y + Z)],
}


def printed_family(d):
    return [X * (X + Y + d * Z), Y * (X + Y + d * Z), Y * (X + Z), Z**2 * (X + Z), Z**2 * X]


def maps_into(src, dst, M, modulus=None):
    """Groebner oracle: does generator i -> row i of M send src into (dst)?"""
    kw = {"modulus": modulus} if modulus else {}
    G = sp.groebner(dst, X, Y, Z, order="grevlex", **kw)
    sub = {g: sum(int(c) * h for c, h in zip(row, (X, Y, Z))) for g, row in zip((X, Y, Z), M)}
    return all(G.contains(sp.expand(r.subs(sub, simultaneous=True))) for r in src)


RINGS = golden.c36_ring_matrices()
C36_GROUP = automorphism_group(dual_cyclic(3, 6))
C36 = enumerate_integer(dual_cyclic(3, 6), 2)
C47 = list(golden.c47_lifts().values())
C47_GROUP = automorphism_group(dual_cyclic(4, 7))


def test_printed_ideals_match_presentations():
    # the package's relations generate the printed ideals
    for name, printed in [("A_1", PRINTED["A_1"]), ("A_2", PRINTED["A_2"]), ("A_5", printed_family(5))]:
        R = presentation(RINGS[name])
        rels = [sp.expand(sp.prod([sum(c * g for c, g in zip(f, (X, Y, Z))) for f in rel])) for rel in R.relations]
        ident = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        assert maps_into(rels, printed, ident) and maps_into(printed, rels, ident)


def test_a1_a2_certificate():
    M = golden.c36_certificate()
    R, S = presentation(RINGS["A_1"]), presentation(RINGS["A_2"])
    assert apply_iso_check(R, S, M)
    assert apply_iso_check(S, R, inverse_certificate(M))
    assert maps_into(PRINTED["A_1"], PRINTED["A_2"], M)
    assert char_class_preserved(M, RINGS["A_1"], RINGS["A_2"])


def test_a1_a3_certificate_checked_independently():
    # found by the covariant search; contradicts the claimed separation of A_1 and A_3
    M = [[1, 0, 0], [0, -1, 0], [0, 1, 1]]
    inv = sp.Matrix(M).inv().tolist()
    assert maps_into(PRINTED["A_1"], printed_family(3), M)
    assert maps_into(printed_family(3), PRINTED["A_1"], inv)
    R, S = presentation(RINGS["A_1"]), presentation(RINGS["A_3"])
    assert apply_iso_check(R, S, M)
    assert char_class_preserved(M, RINGS["A_1"], RINGS["A_3"])


def test_non_unit_determinant_rejected():
    R = presentation(RINGS["A_1"])
    with pytest.raises(IsoError):
        apply_iso_check(R, R, [[2, 0, 0], [0, 1, 0], [0, 0, 1]])


def gl_mod(g, k):
    for flat in product(range(k), repeat=g * g):
        M = [list(flat[i * g:(i + 1) * g]) for i in range(g)]
        if sp.gcd(exact_det(M) % k, k) == 1:
            yield M


@pytest.mark.parametrize("pair", [("A_1", "A_4"), ("A_4", "A_4"), ("A_1", "A_2")])
def test_mod_two_search_matches_groebner(pair):
    a, b = pair
    src = PRINTED.get(a) or printed_family(int(a[2:]))
    dst = PRINTED.get(b) or printed_family(int(b[2:]))
    expected = {tuple(map(tuple, M)) for M in gl_mod(3, 2) if maps_into(src, dst, M, modulus=2)}
    R, S = presentation(RINGS[a]), presentation(RINGS[b])
    got = {tuple(map(tuple, M)) for M in isomorphisms_mod(R, S, 2).tolist()}
    assert got == expected


def test_mod_three_search_on_surfaces():
    # g = 2: GL(2, Z/3) is small enough to filter by brute force
    classes = enumerate_integer(polygon(4), 2)
    rings = [presentation(c.canonical) for c in classes[:4]]
    for R in rings:
        for S in rings:
            brute = []
            for M in gl_mod(2, 3):
                if _mod_ok(R, S, M, 3):
                    brute.append(tuple(map(tuple, M)))
            got = {tuple(map(tuple, M)) for M in isomorphisms_mod(R, S, 3).tolist()}
            assert got == set(brute)


def _mod_ok(R, S, M, k):
    from quasitoric.isomorphism import relation_images

    return all(not any(v) for _, v in relation_images(R, S, M, modulus=k))


def test_mod_k_verdict_semantics():
    R = presentation(RINGS["A_4"])
    v = iso_over_Zk(R, R, 3)
    assert v.outcome == "iso-mod-k" and not v.distinct
    w = iso_over_Zk(R, presentation(RINGS["A_5"]), 3)
    assert w.distinct or w.outcome == "iso-mod-k"
    assert v.to_dict()["modulus"] == 3


def test_lifted_search_for_prime_powers():
    R = presentation(RINGS["A_4"])
    S = presentation(RINGS["A_6"])
    small = isomorphisms_mod(R, S, 4)
    lifted = isomorphisms_mod(R, S, 16)
    assert {tuple((M % 4).ravel()) for M in lifted} <= {tuple(M.ravel()) for M in small}


@settings(max_examples=15)
@given(st.sampled_from(C47), st.sampled_from(C47_GROUP))
def test_induced_isomorphism_is_an_isomorphism(lam, g):
    mu = permute_columns(lam, g)
    M = induced_isomorphism(lam, mu, g)
    R, S = presentation(lam), presentation(mu)
    assert apply_iso_check(R, S, M)
    assert char_class_preserved(M, lam, mu, R, S)


@settings(max_examples=15)
@given(st.sampled_from(C36), st.sampled_from(C36_GROUP))
def test_invariants_agree_on_isomorphic_rings(cl, g):
    lam = cl.canonical
    mu = permute_columns(lam, g)
    R, S = presentation(lam), presentation(mu)
    assert fingerprint(R) == fingerprint(S)
    for k in (2, 3, 4):
        assert not iso_over_Zk(R, S, k).distinct
    assert sorted((t, m) for t, m, _ in covariant_lines(R)) == sorted((t, m) for t, m, _ in covariant_lines(S))
    v = iso_by_covariants(R, S)
    if v is not None:
        assert v.isomorphic
        assert apply_iso_check(R, S, v.certificate)


@settings(max_examples=10)
@given(st.sampled_from(C36), st.sampled_from(C36_GROUP))
def test_bounded_search_finds_induced_isomorphism(cl, g):
    lam = cl.canonical
    mu = permute_columns(lam, g)
    M = induced_isomorphism(lam, mu, g)
    bound = max(2, int(np.abs(M).max()))
    v = iso_over_Z_bounded(presentation(lam), presentation(mu), bound)
    assert v.isomorphic
    assert apply_iso_check(presentation(lam), presentation(mu), v.certificate)


def test_top_form_transforms_by_substitution():
    lam = C47[0]
    g = C47_GROUP[3]
    mu = permute_columns(lam, g)
    M = np.array(induced_isomorphism(lam, mu, g))
    fR, t = top_form(presentation(lam))
    fS, s = top_form(presentation(mu))
    # a linear form sum t_i x_i maps to sum_j (M^T t)_j y_j
    image = [sum(int(M[i, j]) * t[i] for i in range(len(t))) for j in range(len(t))]
    moved = sp.expand(fS.subs(dict(zip(s, image)), simultaneous=True))
    assert sp.expand(moved - fR) == 0 or sp.expand(moved + fR) == 0


def test_distinguish_all_merges_and_separates():
    lam = golden.c47_lift(9)
    g = C47_GROUP[5]
    rings = [presentation(lam), presentation(permute_columns(lam, g)), presentation(golden.c47_lift(17))]
    dist = distinguish_all(rings)
    assert dist.classes == [[0, 1], [2]]
    assert not dist.unresolved
    assert dist.to_dict()["classes"] == [[0, 1], [2]]


def test_covariants_separate_what_the_ladder_cannot():
    R, S = presentation(RINGS["A_4"]), presentation(RINGS["A_5"])
    v = iso_by_covariants(R, S)
    assert v is not None and v.distinct
