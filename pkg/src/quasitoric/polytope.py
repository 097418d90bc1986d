"""Combinatorics of simple polytopes given by their vertex/facet incidence.

A simple n-polytope with facets F_1..F_m is stored as the family of n-subsets
of {1..m} meeting at a vertex, i.e. the maximal faces of the boundary complex
K_P.  Facet labels are 1-based everywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb

AUT_SEARCH_BOUND = 12


class PolytopeError(ValueError):
    pass


def _sorted_family(vertices):
    return tuple(sorted(tuple(sorted(v)) for v in vertices))


@dataclass(frozen=True)
class CombinatorialPolytope:
    n: int
    m: int
    vertices: tuple
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "vertices", _sorted_family(self.vertices))
        self.validate()

    def validate(self):
        if self.n < 1 or self.m <= self.n:
            raise PolytopeError(f"need 1 <= n < m, got n={self.n}, m={self.m}")
        used = set()
        for v in self.vertices:
            if len(v) != self.n or len(set(v)) != self.n:
                raise PolytopeError(f"vertex {v} does not have {self.n} facets")
            if min(v) < 1 or max(v) > self.m:
                raise PolytopeError(f"vertex {v} uses a facet outside 1..{self.m}")
            used.update(v)
        if len(used) != self.m:
            missing = sorted(set(range(1, self.m + 1)) - used)
            raise PolytopeError(f"facets {missing} meet no vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise PolytopeError("repeated vertex")
        # boundary of a polytope: every ridge lies in exactly two vertices
        ridges = {}
        for v in self.vertices:
            for r in combinations(v, self.n - 1):
                ridges[r] = ridges.get(r, 0) + 1
        bad = [r for r, c in ridges.items() if c != 2]
        if bad:
            raise PolytopeError(f"ridge {bad[0]} lies in {ridges[bad[0]]} vertices")

    @cached_property
    def vertex_masks(self):
        return tuple(sum(1 << (i - 1) for i in v) for v in self.vertices)

    @cached_property
    def face_masks(self):
        """Bitmasks of all faces of K_P (including the empty face)."""
        faces = set()
        for v in self.vertices:
            for k in range(self.n + 1):
                for s in combinations(v, k):
                    faces.add(sum(1 << (i - 1) for i in s))
        return frozenset(faces)

    def is_face(self, facets):
        return sum(1 << (i - 1) for i in set(facets)) in self.face_masks

    def is_vertex(self, facets):
        return tuple(sorted(facets)) in self._vertex_set

    @cached_property
    def _vertex_set(self):
        return frozenset(self.vertices)

    def facet_degree(self, i):
        return sum(1 for v in self.vertices if i in v)

    def to_dict(self):
        return {
            "n": self.n,
            "m": self.m,
            "vertices": [list(v) for v in self.vertices],
            "label": self.label,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d):
        return cls(d["n"], d["m"], tuple(tuple(v) for v in d["vertices"]), d.get("label", ""))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class FaceData:
    missing_faces: tuple
    f_vector: tuple
    h_vector: tuple


@dataclass(frozen=True)
class FacetPermutation:
    """A bijection of {1..m}; ``images[i - 1]`` is the image of facet i."""

    images: tuple = field()

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError(f"not a permutation: {self.images}")

    @property
    def m(self):
        return len(self.images)

    def __call__(self, i):
        return self.images[i - 1]

    def apply(self, facets):
        return tuple(sorted(self.images[i - 1] for i in facets))

    def compose(self, other):
        """``self * other``: apply ``other`` first."""
        return FacetPermutation(tuple(self.images[other.images[i] - 1] for i in range(self.m)))

    def inverse(self):
        inv = [0] * self.m
        for i, j in enumerate(self.images, start=1):
            inv[j - 1] = i
        return FacetPermutation(tuple(inv))

    def is_identity(self):
        return self.images == tuple(range(1, self.m + 1))

    @classmethod
    def identity(cls, m):
        return cls(tuple(range(1, m + 1)))

    @classmethod
    def from_cycles(cls, m, *cycles):
        images = list(range(1, m + 1))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                images[a - 1] = b
        return cls(tuple(images))

    def preserves(self, P):
        return all(self.apply(v) in P._vertex_set for v in P.vertices)


def _interval_unions(n, m):
    """n-subsets of {1..m} that are disjoint unions of I_j = {j, j+1} & {1..m}."""
    out = set()

    def walk(i, chosen):
        if len(chosen) == n:
            out.add(tuple(chosen))
            return
        if i > m or len(chosen) > n:
            return
        walk(i + 1, chosen)
        if i == 1 or i == m:
            walk(i + 1, chosen + [i])
        if i < m and len(chosen) + 2 <= n:
            walk(i + 2, chosen + [i, i + 1])

    walk(1, [])
    return out


def dual_cyclic(n, m):
    """C^n(m)^*, with facets labelled so that the dual evenness rule holds."""
    if n < 2 or m <= n:
        raise PolytopeError(f"dual cyclic polytope needs n >= 2 and m > n (got n={n}, m={m})")
    return CombinatorialPolytope(n, m, tuple(_interval_unions(n, m)), f"C^{n}({m})*")


def simplex(n):
    verts = tuple(combinations(range(1, n + 2), n))
    return CombinatorialPolytope(n, n + 1, verts, f"Delta^{n}")


def polygon(m):
    """Convex m-gon with facets numbered cyclically."""
    if m < 3:
        raise PolytopeError("a polygon needs at least 3 edges")
    verts = [(i, i + 1) for i in range(1, m)] + [(1, m)]
    return CombinatorialPolytope(2, m, tuple(verts), f"P_{m}")


def relabel(P, mapping, label=None):
    """Rename facet i to ``mapping[i]`` (dict or FacetPermutation)."""
    f = mapping if callable(mapping) else mapping.__getitem__
    verts = tuple(tuple(f(i) for i in v) for v in P.vertices)
    return CombinatorialPolytope(P.n, P.m, verts, P.label if label is None else label)


def missing_faces(P):
    out = []
    faces = P.face_masks
    for k in range(1, P.n + 2):
        for s in combinations(range(1, P.m + 1), k):
            mask = sum(1 << (i - 1) for i in s)
            if mask in faces:
                continue
            if all(mask & ~(1 << (i - 1)) in faces for i in s):
                out.append(s)
    return tuple(out)


def f_vector(P):
    counts = [0] * P.n
    for mask in P.face_masks:
        k = bin(mask).count("1")
        if k >= 1:
            counts[k - 1] += 1
    return tuple(counts)


def h_from_f(n, f):
    # sum_k h_k t^(n-k) = sum_i f_(i-1) (t-1)^(n-i), f_(-1) = 1
    ext = (1,) + tuple(f)
    return tuple(
        sum(ext[i] * comb(n - i, k - i) * (-1) ** (k - i) for i in range(k + 1))
        for k in range(n + 1)
    )


def fh_vectors(P):
    f = f_vector(P)
    return FaceData(missing_faces(P), f, h_from_f(P.n, f))


def automorphism_group(P):
    """All facet permutations preserving the vertex family.

    Complete backtracking search over S_m; partial maps are pruned by facet
    degree and by the edge relation of K_P before the final vertex check.
    """
    if P.m > AUT_SEARCH_BOUND:
        raise PolytopeError(f"automorphism search bounded to m <= {AUT_SEARCH_BOUND}")
    m = P.m
    deg = [P.facet_degree(i) for i in range(1, m + 1)]
    edge = [[P.is_face((i, j)) for j in range(1, m + 1)] for i in range(1, m + 1)]
    vmasks = set(P.vertex_masks)
    # vertices become checkable once their largest facet is assigned
    closing = [[v for v in P.vertices if max(v) == i + 1] for i in range(m)]
    group = []
    images = [0] * m
    used = [False] * m

    def extend(i):
        if i == m:
            group.append(FacetPermutation(tuple(x + 1 for x in images)))
            return
        for j in range(m):
            if used[j] or deg[j] != deg[i]:
                continue
            if any(edge[i][k] != edge[j][images[k]] for k in range(i)):
                continue
            images[i] = j
            if any(sum(1 << images[a - 1] for a in v) not in vmasks for v in closing[i]):
                continue
            used[j] = True
            extend(i + 1)
            used[j] = False

    extend(0)
    return group


def generated_group(gens, m):
    """Closure of ``gens`` under composition (small groups only)."""
    ident = FacetPermutation.identity(m)
    seen = {ident.images: ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = s.compose(g)
                if h.images not in seen:
                    seen[h.images] = h
                    nxt.append(h)
        frontier = nxt
    return [seen[k] for k in sorted(seen)]


def connected_sum_polytope(P, Q, v, w, tau):
    """P #_tau Q cut at vertex v of P and w of Q.

    ``tau`` maps each facet of v to a facet of w.  Facets of P keep their
    labels; the facets of Q outside w are numbered m_P + 1, ... in increasing
    order, and a facet of w is identified with its tau-preimage.
    Returns the polytope and the dict sending Q's labels to the new labels.
    """
    if P.n != Q.n:
        raise PolytopeError("connected sum needs polytopes of equal dimension")
    v, w = tuple(sorted(v)), tuple(sorted(w))
    if not P.is_vertex(v) or not Q.is_vertex(w):
        raise PolytopeError("gluing sets must be vertices")
    tau = dict(tau)
    if sorted(tau) != list(v) or sorted(tau.values()) != list(w):
        raise PolytopeError("tau must be a bijection from v onto w")
    qmap = {tau[i]: i for i in v}
    nxt = P.m + 1
    for j in range(1, Q.m + 1):
        if j not in qmap:
            qmap[j] = nxt
            nxt += 1
    verts = [x for x in P.vertices if x != v]
    verts += [tuple(qmap[j] for j in y) for y in Q.vertices if y != w]
    label = f"{P.label}#{Q.label}"
    return CombinatorialPolytope(P.n, P.m + Q.m - P.n, tuple(verts), label), qmap
