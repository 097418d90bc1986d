"""Connected sums of characteristic pairs and the surface/3-fold classifications built on them.

A characteristic matrix whose minor at a non-vertex n-set S of facets is a
unit splits along S into two smaller characteristic pairs; gluing them back
at the new vertex S recovers the original matrix.  Repeated splitting turns
polygon and C^3(m)^* matrices into standard pieces, which are then read off
as connected-sum normal forms.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .charmat import CharMatrixError, enumerate_integer, enumerate_real, make
from .intmat import inverse_mod, unimodular_inverse
from .polytope import (
    CombinatorialPolytope,
    PolytopeError,
    connected_sum_polytope,
    dual_cyclic,
    polygon,
)


class SplitError(ValueError):
    pass


@dataclass(frozen=True)
class SumDecomposition:
    """Two pieces and how their facets sit inside the original polytope.

    ``maps[i][j]`` is the original label of facet j of piece i; both pieces
    contain the shared facets, which form the gluing vertex in each piece.
    """

    pieces: tuple
    shared: tuple
    maps: tuple

    def junction(self, i):
        inv = {v: k for k, v in self.maps[i].items()}
        return tuple(sorted(inv[s] for s in self.shared))


@dataclass(frozen=True)
class SurfaceNormalForm:
    kind: str
    counts: tuple = field(default=())

    def __str__(self):
        if self.kind == "S2xS2":
            return f"S2xS2#{self.counts[0]}"
        if self.kind == "CP2":
            i, j = self.counts
            return f"CP2#{i}+CPbar2#{j}"
        if self.kind in ("T2", "RP2"):
            return f"{self.kind}#{self.counts[0]}"
        if self.kind == "RP3":
            a, b = self.counts
            return f"RP3#{a} + RP1xRP2#{b}"
        raise ValueError(self.kind)


def _unit(d, modulus):
    return d % 2 == 1 if modulus == 2 else abs(d) == 1


def _standard_label(P):
    for make_std in (lambda: polygon(P.m) if P.n == 2 else None, lambda: dual_cyclic(P.n, P.m)):
        try:
            std = make_std()
        except PolytopeError:
            continue
        if std is not None and std.vertices == P.vertices:
            return std.label
    return f"P({P.n},{P.m})"


def _sides(P, shared):
    rest = [i for i in range(1, P.m + 1) if i not in shared]
    parent = {i: i for i in rest}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for v in P.vertices:
        inside = [i for i in v if i in parent]
        for a, b in zip(inside, inside[1:]):
            parent[find(a)] = find(b)
    groups = {}
    for i in rest:
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def split(lam, shared):
    """Cut ``lam`` along the facet set ``shared`` into two characteristic pairs."""
    P = lam.polytope
    shared = tuple(sorted(shared))
    if len(shared) != P.n or len(set(shared)) != P.n:
        raise SplitError(f"need {P.n} distinct facets to split along")
    if P.is_vertex(shared):
        raise SplitError(f"{shared} is already a vertex")
    if not _unit(lam.minor(shared), lam.modulus):
        raise SplitError(f"minor at {shared} is {lam.minor(shared)}, not a unit")
    sides = _sides(P, shared)
    if len(sides) != 2:
        raise SplitError(f"{shared} does not separate {P.label} into two pieces")
    pieces, maps = [], []
    cut = set(shared)
    for side in sides:
        facets = sorted(cut | set(side))
        index = {f: k for k, f in enumerate(facets, start=1)}
        verts = [tuple(index[i] for i in v) for v in P.vertices if set(v) <= set(facets)]
        verts.append(tuple(index[i] for i in shared))
        try:
            Q = CombinatorialPolytope(P.n, len(facets), verts)
        except PolytopeError as exc:
            raise SplitError(f"{shared} does not cut {P.label} into polytopes: {exc}") from None
        Q = CombinatorialPolytope(Q.n, Q.m, Q.vertices, _standard_label(Q))
        cols = lam.array[:, [f - 1 for f in facets]]
        pieces.append(make(Q, cols, real=bool(lam.modulus)))
        maps.append({k: f for f, k in index.items()})
    return SumDecomposition(tuple(pieces), shared, tuple(maps))


def _match(lam1, v, lam2, w_of_v):
    """Left-multiply lam2 so its columns at w_of_v equal lam1's columns at v."""
    a = lam1.array[:, [i - 1 for i in v]]
    b = lam2.array[:, [j - 1 for j in w_of_v]]
    if lam1.modulus:
        return (a @ inverse_mod(b, 2) @ lam2.array) % 2
    try:
        binv = unimodular_inverse(b)
    except ValueError:
        raise CharMatrixError("gluing columns are not a basis") from None
    return a @ binv @ lam2.array


def reassemble(dec):
    """Glue the two pieces of a decomposition back onto the original labels."""
    first, second = dec.pieces
    map1, map2 = dec.maps
    m = len(set(map1.values()) | set(map2.values()))
    n = first.n
    inv2 = {v: k for k, v in map2.items()}
    inv1 = {v: k for k, v in map1.items()}
    v = [inv1[s] for s in dec.shared]
    w = [inv2[s] for s in dec.shared]
    b = _match(first, v, second, w)
    out = np.zeros((n, m), dtype=np.int64)
    for k, f in map1.items():
        out[:, f - 1] = first.array[:, k - 1]
    for k, f in map2.items():
        if f not in dec.shared:
            out[:, f - 1] = b[:, k - 1]
    return out


def connected_sum(lam1, v, lam2, w, tau, relabel=None):
    """Characteristic matrix on P #_tau Q.

    ``tau`` maps the facets of vertex v of P onto vertex w of Q.  lam2 is
    first moved by the unique GL element making its columns at w agree with
    lam1's columns at v under tau.  ``relabel`` optionally renames the facets
    of the glued polytope (dict old -> new).
    """
    if lam1.modulus != lam2.modulus:
        raise CharMatrixError("cannot glue an integer matrix to a real one")
    P, Q = lam1.polytope, lam2.polytope
    S, qmap = connected_sum_polytope(P, Q, v, w, tau)
    v = tuple(sorted(v))
    b = _match(lam1, v, lam2, [dict(tau)[i] for i in v])
    out = np.zeros((P.n, S.m), dtype=np.int64)
    out[:, : P.m] = lam1.array
    for j, new in qmap.items():
        if new > P.m:
            out[:, new - 1] = b[:, j - 1]
    if relabel is not None:
        verts = tuple(tuple(relabel[i] for i in x) for x in S.vertices)
        S = CombinatorialPolytope(S.n, S.m, verts)
        moved = np.zeros_like(out)
        for old, new in relabel.items():
            moved[:, new - 1] = out[:, old - 1]
        out = moved
    S = CombinatorialPolytope(S.n, S.m, S.vertices, _standard_label(S))
    return make(S, out, real=bool(lam1.modulus))


def c3_gluing(m1, m2):
    """Vertices, gluing map and relabelling realising C^3(m1)^* # C^3(m2)^* = C^3(m1+m2-3)^*."""
    m = m1 + m2 - 3
    v, w = (1, m1 - 1, m1), (1, 2, m2)
    tau = {1: 1, m1 - 1: 2, m1: m2}
    relabel = {x: x for x in range(1, m1)}
    relabel[m1] = m
    for x in range(m1 + 1, m + 1):
        relabel[x] = x - 1
    return v, w, tau, relabel


def c3_connected_sum(lam1, lam2):
    v, w, tau, relabel = c3_gluing(lam1.m, lam2.m)
    return connected_sum(lam1, v, lam2, w, tau, relabel)


def decomposable_c3(lam, k):
    """Whether lam on C^3(m)^* splits along facets {1, k, m} (2 < k < m - 1)."""
    m = lam.m
    if lam.n != 3 or not 2 < k < m - 1:
        raise SplitError(f"k must satisfy 2 < k < {m - 1} on a 3-dimensional polytope")
    return _unit(lam.minor((1, k, m)), lam.modulus)


def is_indecomposable_c3(lam):
    return not any(decomposable_c3(lam, k) for k in range(3, lam.m - 1))


# --- polygons -------------------------------------------------------------


def _eps(a, b):
    return int(a[0] * b[1] - a[1] * b[0])


def _self_intersections(cols):
    m = len(cols)
    eps = [_eps(cols[i], cols[(i + 1) % m]) for i in range(m)]
    out = []
    for i in range(m):
        prev, nxt, c = cols[i - 1], cols[(i + 1) % m], cols[i]
        v = [-(eps[i - 1] * prev[r] + eps[i] * nxt[r]) for r in range(2)]
        r = 0 if c[0] else 1
        s = v[r] // c[r]
        if [s * c[0], s * c[1]] != v:
            raise CharMatrixError("columns do not satisfy the polygon relation")
        out.append(s)
    return out, eps


def _cyclic_columns(lam):
    """Columns in boundary order, starting at facet 1 towards its smaller neighbour."""
    P = lam.polytope
    if P.n != 2:
        raise SplitError("not a polygon")
    adj = {i: [] for i in range(1, P.m + 1)}
    for a, b in P.vertices:
        adj[a].append(b)
        adj[b].append(a)
    order = [1]
    while len(order) < P.m:
        order.append(next(x for x in sorted(adj[order[-1]]) if x not in order))
    return [lam.column(i) for i in order]


def self_intersections(lam):
    """Self-intersection of each characteristic submanifold over a polygon.

    Uses the orientation given by the cyclic facet order and the standard
    orientation of the torus.  Integer matrices only.
    """
    return _self_intersections(_cyclic_columns(lam))


def intersection_form(lam):
    """Gram matrix of the characteristic classes 3..m of a polygon matrix."""
    s, eps = self_intersections(lam)
    m = lam.m
    q = np.zeros((m, m), dtype=np.int64)
    for i in range(m):
        q[i, i] = s[i]
        q[i, (i + 1) % m] = q[(i + 1) % m, i] = eps[i]
    return q[2:, 2:]


def _polygon_cut(cols, modulus, order=None):
    m = len(cols)
    pairs = order or [(i, j) for i in range(m) for j in range(i + 2, m) if (i, j) != (0, m - 1)]
    for i, j in pairs:
        d = _eps(cols[i], cols[j])
        if _unit(d, modulus):
            return i, j
    return None


def _polygon_column_pieces(cols, modulus, rng=None):
    out = []
    stack = [cols]
    while stack:
        cur = stack.pop()
        m = len(cur)
        if m == 3:
            out.append(cur)
            continue
        order = None
        if rng is not None:
            order = [(i, j) for i in range(m) for j in range(i + 2, m) if (i, j) != (0, m - 1)]
            rng.shuffle(order)
        cut = _polygon_cut(cur, modulus, order)
        if cut is None:
            if m != 4:
                raise SplitError(f"indecomposable matrix on the {m}-gon")
            out.append(cur)
            continue
        i, j = cut
        stack.append(cur[i : j + 1])
        stack.append(cur[j:] + cur[: i + 1])
    return out


def polygon_pieces(lam, rng=None):
    """Split a polygon matrix down to triangles and indecomposable quadrilaterals.

    Splits at the first admissible pair of non-adjacent edges, or in a
    random order when ``rng`` (a random.Random) is given.
    """
    cols = _cyclic_columns(lam)
    real = bool(lam.modulus)
    return [
        make(polygon(len(p)), np.array(p).T, real=real, check=False)
        for p in _polygon_column_pieces(cols, lam.modulus, rng)
    ]


def _piece_label(cols, modulus):
    if modulus == 2:
        return "RP2" if len(cols) == 3 else "T2"
    s, _ = _self_intersections(cols)
    if len(cols) == 3:
        return "CP2" if s[0] > 0 else "CPbar2"
    return "S2xS2" if all(x % 2 == 0 for x in s) else "CP2#CPbar2"


def polygon_piece_label(piece):
    """Name of the 4-manifold (integer) or surface (real) over a standard piece."""
    return _piece_label([piece.column(i) for i in range(1, piece.m + 1)], piece.modulus)


def polygon_normal_form(lam, rng=None):
    cols = _cyclic_columns(lam)
    pieces = _polygon_column_pieces(cols, lam.modulus, rng)
    labels = Counter(_piece_label(p, lam.modulus) for p in pieces)
    if lam.modulus == 2:
        if labels["RP2"]:
            return SurfaceNormalForm("RP2", (labels["RP2"] + 2 * labels["T2"],))
        return SurfaceNormalForm("T2", (labels["T2"],))
    pos = labels["CP2"] + labels["CP2#CPbar2"]
    neg = labels["CPbar2"] + labels["CP2#CPbar2"]
    g = labels["S2xS2"]
    if pos + neg == 0:
        return SurfaceNormalForm("S2xS2", (g,))
    # S2xS2 # CP2 = CP2 # CP2 # CPbar2, so each S2xS2 becomes one of each
    i, j = pos + g, neg + g
    return SurfaceNormalForm("CP2", (max(i, j), min(i, j)))


def form_normal_form(q):
    """Normal form of a 4-manifold from its (unimodular) intersection form."""
    q = np.asarray(q, dtype=np.int64)
    if q.size == 0:
        return SurfaceNormalForm("CP2", (0, 0))
    eig = np.linalg.eigvalsh(q.astype(float))
    pos, neg = int((eig > 0).sum()), int((eig < 0).sum())
    if all(int(x) % 2 == 0 for x in np.diag(q)):
        return SurfaceNormalForm("S2xS2", (pos,))
    return SurfaceNormalForm("CP2", (max(pos, neg), min(pos, neg)))


def classify_polygon_quasitoric(m, bound=3):
    """Normal forms realised by quasitoric manifolds over the m-gon, with multiplicities.

    Multiplicity counts the enumerated GL x sign classes giving each form.
    """
    classes = enumerate_integer(polygon(m), bound)
    return Counter(str(polygon_normal_form(c.canonical)) for c in classes)


def classify_polygon_small_cover(m):
    classes = enumerate_real(polygon(m))
    return Counter(str(polygon_normal_form(c.canonical)) for c in classes)


# --- small covers over C^3(m)^* ---------------------------------------------


def c3_pieces(lam):
    out = []
    stack = [lam]
    while stack:
        cur = stack.pop()
        cut = None
        if cur.m >= 5:
            cut = next((k for k in range(3, cur.m - 1) if decomposable_c3(cur, k)), None)
        if cut is None:
            if cur.m > 5:
                raise SplitError(f"indecomposable matrix on C^3({cur.m})*")
            out.append(cur)
            continue
        stack.extend(split(cur, (1, cut, cur.m)).pieces)
    return out


def c3_normal_form(lam):
    pieces = c3_pieces(lam)
    a = sum(1 for p in pieces if p.m == 4)
    return SurfaceNormalForm("RP3", (a, len(pieces) - a))


def classify_c3_small_cover(m):
    classes = enumerate_real(dual_cyclic(3, m))
    return Counter(str(c3_normal_form(c.canonical)) for c in classes)
