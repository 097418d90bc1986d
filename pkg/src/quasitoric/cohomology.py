"""Cohomology rings of quasitoric manifolds and small covers.

For a matrix in (I|*) form with identity block at the base vertex, the ring is
Z[v_j : j not in base] modulo one relation per missing face S, namely the
product over i in S of v'_i.  Here v'_i = v_i for a generator and, for a base
facet, the row of the * block (taken without sign, which changes each relation
by at most a global sign).

Polynomials are dicts {exponent tuple: coefficient}.  Per polynomial degree d
the quotient is computed by Smith normal form over Z (or Howell form over Z/k)
and every monomial gets integer coordinates in a chosen monomial basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, islice

import numpy as np

from .charmat import CharMatrix, RealCharMatrix, split_tail, to_identity_form
from .intmat import exact_det, howell_form, howell_reduce, integer_echelon, smith
from .polytope import missing_faces


class TorsionError(ArithmeticError):
    pass


class RingError(ValueError):
    pass


def monomials(g, d):
    """Exponent vectors of degree d, largest first (last generator most significant)."""
    out = []

    def rec(i, left, acc):
        if i < 0:
            if left == 0:
                out.append(tuple(acc))
            return
        lo = left if i == 0 else 0
        for e in range(left, lo - 1, -1):
            acc[i] = e
            rec(i - 1, left - e, acc)
        acc[i] = 0

    rec(g - 1, d, [0] * g)
    return out


def poly_mul(p, q):
    out = {}
    for a, x in p.items():
        for b, y in q.items():
            e = tuple(i + j for i, j in zip(a, b))
            out[e] = out.get(e, 0) + x * y
    return {e: c for e, c in out.items() if c}


def linear(form):
    g = len(form)
    return {tuple(int(i == j) for j in range(g)): int(c) for i, c in enumerate(form) if c}


def expand(factors, g=None):
    g = g if g is not None else len(factors[0])
    out = {(0,) * g: 1}
    for f in factors:
        out = poly_mul(out, linear(f))
    return out


def poly_add(p, q, scale=1):
    out = dict(p)
    for e, c in q.items():
        out[e] = out.get(e, 0) + scale * c
    return {e: c for e, c in out.items() if c}


def homogeneous_parts(p):
    parts = {}
    for e, c in p.items():
        parts.setdefault(sum(e), {})[e] = c
    return parts


def format_poly(p, names):
    if not p:
        return "0"
    terms = []
    for e, c in sorted(p.items(), reverse=True):
        mono = "*".join(f"{n}^{k}" if k > 1 else n for n, k in zip(names, e) if k)
        if not mono:
            terms.append(str(c))
        elif c == 1:
            terms.append(mono)
        elif c == -1:
            terms.append("-" + mono)
        else:
            terms.append(f"{c}*{mono}")
    return " + ".join(terms).replace("+ -", "- ")


class _MulTable:
    """Index maps for multiplying dense degree-d vectors by a generator."""

    def __init__(self, g, top):
        self.g = g
        self.mons = [monomials(g, d) for d in range(top + 1)]
        self.index = [{e: i for i, e in enumerate(ms)} for ms in self.mons]
        self.shift = []
        for d in range(top):
            rows = []
            for j in range(g):
                rows.append([
                    self.index[d + 1][tuple(x + (i == j) for i, x in enumerate(e))]
                    for e in self.mons[d]
                ])
            self.shift.append(np.array(rows, dtype=np.intp))

    def products(self, forms, modulus=0):
        """Dense expansion of prod_f forms[:, f, :], forms of shape (K, e, g)."""
        forms = np.asarray(forms, dtype=np.int64)
        K, e, _ = forms.shape
        poly = np.ones((K, 1), dtype=np.int64)
        for d in range(e):
            new = np.zeros((K, len(self.mons[d + 1])), dtype=np.int64)
            for j in range(self.g):
                new[:, self.shift[d][j]] += poly * forms[:, d, j : j + 1]
            poly = new % modulus if modulus else new
        return poly


@dataclass
class DegreeData:
    degree: int
    monomials: list
    basis: list
    coords: np.ndarray
    divisors: tuple = ()
    howell: list = None
    elements: list = None

    @property
    def rank(self):
        return self.coords.shape[1]

    @property
    def basis_polys(self):
        """Basis elements as polynomials (monomials unless no monomial basis exists)."""
        if self.elements is not None:
            return self.elements
        return [{e: 1} for e in self.basis]


@dataclass(eq=False)
class RingPresentation:
    """Graded ring Z[generators] / (products of linear forms), or over Z/k.

    ``facet_forms[i]`` is the linear form v'_(i+1) in the generators.
    ``unit`` is the cohomological degree of a generator (2 or 1).
    """

    g: int
    top: int
    facet_forms: tuple
    missing: tuple
    generators: tuple
    coeff: int = 0
    unit: int = 2
    names: tuple = None
    parent: "RingPresentation" = None
    sign_convention: str = "unsigned"
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.names is None:
            self.names = default_names(self.generators)

    @property
    def relations(self):
        return tuple(tuple(self.facet_forms[i - 1] for i in S) for S in self.missing)

    @property
    def substitutions(self):
        gens = set(self.generators)
        return tuple(f for i, f in enumerate(self.facet_forms, start=1) if i not in gens)

    @property
    def top_degree(self):
        return self.unit * self.top

    @property
    def coeff_name(self):
        return "Z" if self.coeff == 0 else f"Z/{self.coeff}"

    @property
    def table(self):
        if "mul" not in self._cache:
            self._cache["mul"] = _MulTable(self.g, self.top)
        return self._cache["mul"]

    def degree_data(self, d):
        if not 0 <= d <= self.top:
            raise RingError(f"polynomial degree {d} outside 0..{self.top}")
        if d not in self._cache:
            self._cache[d] = self._compute(d)
        return self._cache[d]

    def _ideal_rows(self, d):
        mons = self.table.mons[d]
        idx = self.table.index[d]
        rows = []
        for rel in self.relations:
            e = len(rel)
            if e > d:
                continue
            base = expand(rel, self.g)
            for mu in self.table.mons[d - e]:
                v = [0] * len(mons)
                for ex, c in base.items():
                    v[idx[tuple(a + b for a, b in zip(ex, mu))]] += c
                rows.append(v)
        return rows

    def _compute(self, d):
        mons = self.table.mons[d]
        N = len(mons)
        rows = self._ideal_rows(d)
        if self.parent is not None:
            pd = self.parent.degree_data(d)
            H = howell_form(rows, self.coeff) if rows else []
            return DegreeData(d, mons, pd.basis, pd.coords % self.coeff, pd.divisors, H, pd.elements)
        if self.coeff:
            return self._compute_mod(d, mons, rows)
        if not rows:
            return DegreeData(d, mons, list(mons), np.eye(N, dtype=np.int64))
        fast = self._compute_unit_pivots(d, mons, rows)
        if fast is not None:
            return fast
        diag, _, T = smith(rows)
        if any(abs(x) != 1 for x in diag):
            raise TorsionError(f"torsion {diag} in degree {self.unit * d}")
        s = len(diag)
        C = np.array(T.tolist(), dtype=object)[:, s:]
        basis_idx = _unimodular_rows(C)
        if basis_idx is None:
            # free quotient without a monomial basis: keep the Smith coordinates
            Tinv = np.array(_sympy_inverse(np.array(T.tolist(), dtype=object)), dtype=object)[s:]
            elements = [{mons[j]: int(c) for j, c in enumerate(row) if c} for row in Tinv]
            return DegreeData(d, mons, [], C.astype(np.int64), tuple(diag), elements=elements)
        B = C[basis_idx]
        Binv = np.array(_sympy_inverse(B), dtype=object)
        coords = (C.dot(Binv)).astype(np.int64) if len(basis_idx) else np.zeros((N, 0), dtype=np.int64)
        return DegreeData(d, mons, [mons[i] for i in basis_idx], coords, tuple(diag))

    def _compute_unit_pivots(self, d, mons, rows):
        """Echelon form over Z; None unless some column order gives all pivots 1.

        Pivots go preferably on the late monomials, leaving the early ones as basis.
        """
        N = len(mons)
        for order in (list(range(N - 1, -1, -1)), list(range(N))):
            H, pivots = integer_echelon([[r[j] for j in order] for r in rows], N)
            if any(row[c] != 1 for row, c in zip(H, pivots)):
                continue
            pos = set(pivots)
            free = [c for c in range(N) if c not in pos]
            col = {c: i for i, c in enumerate(free)}
            coords = np.zeros((N, len(free)), dtype=object)
            for c in free:
                coords[order[c], col[c]] = 1
            for row, c in zip(H, pivots):
                # e_c = (e_c - row) + row, and e_c - row has no pivot entries
                for f in free:
                    if row[f]:
                        coords[order[c], col[f]] = -row[f]
            basis = [mons[order[c]] for c in free]
            return DegreeData(d, mons, basis, coords.astype(np.int64), (1,) * len(H))
        return None

    def _compute_mod(self, d, mons, rows):
        k = self.coeff
        N = len(mons)
        if not rows:
            return DegreeData(d, mons, list(mons), np.eye(N, dtype=np.int64), howell=[])
        # reversed column order puts pivots on the small monomials
        rev = [r[::-1] for r in rows]
        H = howell_form(rev, k)
        pivots = []
        for row in H:
            c = next(i for i, x in enumerate(row) if x)
            if row[c] != 1:
                raise RingError(f"quotient over Z/{k} is not free with a monomial basis")
            pivots.append(c)
        free = [c for c in range(N) if c not in pivots]
        coords = np.zeros((N, len(free)), dtype=np.int64)
        for i in range(N):
            e = [0] * N
            e[N - 1 - i] = 1
            red = howell_reduce(H, e, k)
            coords[i] = [red[c] for c in free]
        basis = [mons[N - 1 - c] for c in free]
        return DegreeData(d, mons, basis, coords, howell=[r[::-1] for r in H])

    def dense(self, poly, d):
        idx = self.table.index[d]
        v = np.zeros(len(idx), dtype=np.int64)
        for e, c in poly.items():
            if sum(e) != d:
                raise RingError("polynomial is not homogeneous of the requested degree")
            v[idx[e]] += c
        return v

    def coords(self, poly, d=None):
        if d is None:
            degs = {sum(e) for e in poly} or {0}
            if len(degs) != 1:
                raise RingError("polynomial is not homogeneous")
            d = degs.pop()
        data = self.degree_data(d)
        out = self.dense(poly, d) @ data.coords
        return out % self.coeff if self.coeff else out

    def contains(self, poly, d=None):
        return not np.any(self.coords(poly, d))

    def to_dict(self):
        return {
            "g": self.g,
            "coeff": self.coeff_name,
            "degrees": [self.unit] * self.g,
            "substitutions": [list(f) for f in self.substitutions],
            "relations": [{"factors": [list(f) for f in rel]} for rel in self.relations],
        }

    def __repr__(self):
        return f"RingPresentation(g={self.g}, top={self.top_degree}, coeff={self.coeff_name})"


def default_names(generators):
    if len(generators) == 3:
        return ("X", "Y", "Z")
    return tuple(f"v{j}" for j in generators)


def _sympy_inverse(B):
    from sympy import Matrix

    if len(B) == 0:
        return []
    inv = Matrix(B.tolist()).inv()
    return [[int(x) for x in row] for row in inv.tolist()]


def _saturated(rows):
    if not rows:
        return True
    diag, _, _ = smith(rows)
    return len(diag) == len(rows) and all(abs(x) == 1 for x in diag)


def _unimodular_rows(C):
    """Indices of rows of C (N x r) forming a unimodular r x r block, or None.

    Greedy in row order (largest monomial first), keeping the chosen rows a
    saturated independent set; falls back to a bounded exhaustive search.
    """
    N, r = C.shape
    if r == 0:
        return []
    chosen = []
    for i in range(N):
        trial = [list(map(int, C[j])) for j in chosen + [i]]
        if _saturated(trial):
            chosen.append(i)
            if len(chosen) == r:
                return chosen
    for combo in islice(combinations(range(N), r), _EXHAUSTIVE_LIMIT):
        if abs(exact_det([list(map(int, C[j])) for j in combo])) == 1:
            return list(combo)
    return None


_EXHAUSTIVE_LIMIT = 20000


def presentation(lam):
    """Ring presentation of the quasitoric manifold (or small cover) of ``lam``."""
    P = lam.polytope
    base = P.vertices[0]
    if not all(lam.column(b) == tuple(int(r == i) for r in range(P.n)) for i, b in enumerate(base)):
        lam = to_identity_form(lam, base)
    tail = split_tail(lam, base)
    gens = tuple(j for j in range(1, P.m + 1) if j not in base)
    g = len(gens)
    forms = [None] * P.m
    for r, b in enumerate(base):
        forms[b - 1] = tuple(int(x) for x in tail[r])
    for c, j in enumerate(gens):
        forms[j - 1] = tuple(int(c == i) for i in range(g))
    real = isinstance(lam, RealCharMatrix)
    R = RingPresentation(
        g=g,
        top=P.n,
        facet_forms=tuple(forms),
        missing=missing_faces(P),
        generators=gens,
        coeff=2 if real else 0,
        unit=1 if real else 2,
    )
    R._cache["matrix"] = lam
    return R


def reduce_mod(R, k):
    """The same presentation with coefficients in Z/k."""
    if k < 2:
        raise RingError("modulus must be at least 2")
    if R.coeff:
        if R.coeff % k:
            raise RingError(f"cannot reduce Z/{R.coeff} to Z/{k}")
        parent = R.parent
    else:
        parent = R
    forms = tuple(tuple(x % k for x in f) for f in R.facet_forms)
    return RingPresentation(R.g, R.top, forms, R.missing, R.generators, coeff=k, unit=R.unit,
                            names=R.names, parent=parent)


@dataclass(frozen=True)
class GradedBasis:
    degree: int
    basis: tuple
    rank: int
    divisors: tuple
    elements: tuple = ()


def graded_basis(R, degree):
    """Basis of the quotient in cohomological ``degree``.

    ``basis`` lists monomials; it is empty when no set of monomials is a
    Z-basis, and ``elements`` then holds the polynomial basis actually used.
    """
    if degree % R.unit:
        return GradedBasis(degree, (), 0, ())
    data = R.degree_data(degree // R.unit)
    return GradedBasis(degree, tuple(data.basis), data.rank, data.divisors, tuple(data.basis_polys))


def normal_form(R, poly, degree=None):
    """Coordinates of ``poly`` in the monomial basis of its degree."""
    if degree is not None:
        if degree % R.unit:
            raise RingError("degree not a multiple of the generator degree")
        degree //= R.unit
    return tuple(int(x) for x in R.coords(poly, degree))


def betti(R):
    """Ranks in degrees 0, u, 2u, ..., top (u the generator degree); odd ones vanish."""
    return tuple(R.degree_data(d).rank for d in range(R.top + 1))


def orientation_vertex(P):
    """Lexicographically largest vertex containing facet 1."""
    return max(v for v in P.vertices if 1 in v)


@dataclass(frozen=True)
class FundamentalClass:
    vertex: tuple
    sign: int
    monomial: tuple


def vertex_product(R, vertex):
    return expand([R.facet_forms[i - 1] for i in vertex], R.g)


def fundamental_class(R, lam=None, vertex=None):
    """[M] fixed by declaring the product of v'_i over a vertex to be +[M]."""
    lam = lam if lam is not None else R._cache.get("matrix")
    if lam is None:
        raise RingError("fundamental class needs the characteristic matrix")
    vertex = tuple(vertex or orientation_vertex(lam.polytope))
    data = R.degree_data(R.top)
    if data.rank != 1:
        raise RingError("top degree is not of rank one")
    c = int(R.coords(vertex_product(R, vertex), R.top)[0])
    if R.coeff == 0 and abs(c) != 1:
        raise RingError(f"vertex product at {vertex} is {c} times a generator")
    if R.coeff and c % R.coeff == 0:
        raise RingError(f"vertex product at {vertex} vanishes")
    return FundamentalClass(vertex, c, data.basis[0] if data.basis else None)


def pairing(R, poly, fc):
    """Coefficient of [M] in a top-degree polynomial."""
    c = int(R.coords(poly, R.top)[0])
    if R.coeff:
        return c * pow(fc.sign, -1, R.coeff) % R.coeff
    return c * fc.sign


def pairing_table(R, lam=None, vertex=None):
    fc = fundamental_class(R, lam, vertex)
    data = R.degree_data(R.top)
    vals = (data.coords[:, 0] * fc.sign)
    if R.coeff:
        vals = vals % R.coeff
    return {e: int(v) for e, v in zip(data.monomials, vals)}


TABLE_ORDER = [
    (4, 0, 0), (0, 4, 0), (0, 0, 4), (3, 1, 0), (2, 2, 0), (1, 3, 0), (0, 3, 1),
    (0, 2, 2), (0, 1, 3), (1, 0, 3), (2, 0, 2), (3, 0, 1), (2, 1, 1), (1, 2, 1), (1, 1, 2),
]


def monomial_name(e, names):
    parts = []
    for n, k in zip(names, e):
        if k == 1:
            parts.append(n)
        elif k > 1:
            parts.append(f"{n}^{k}")
    return "".join(parts) or "1"


def pairing_csv(tables, names=("X", "Y", "Z"), order=None):
    """CSV with one row per ring; columns in the reference layout (TABLE_ORDER) when g = 3, top 4."""
    keys = order
    if keys is None:
        first = next(iter(tables.values()))
        keys = TABLE_ORDER if set(first) == set(TABLE_ORDER) else sorted(first, reverse=True)
    lines = ["ring," + ",".join(monomial_name(e, names) for e in keys)]
    for label, t in tables.items():
        lines.append(label + "," + ",".join(str(t[e]) for e in keys))
    return "\n".join(lines) + "\n"


def poincare_pairing(R, d, fc):
    """Matrix of the cup pairing degree d x degree (top - d) against [M]."""
    low, high = R.degree_data(d), R.degree_data(R.top - d)
    out = np.zeros((low.rank, high.rank), dtype=object)
    for i, a in enumerate(low.basis_polys):
        for j, b in enumerate(high.basis_polys):
            out[i, j] = pairing(R, poly_mul(a, b), fc)
    return out


@dataclass(frozen=True)
class CharClasses:
    w: dict
    p: dict


def char_classes(lam, R=None):
    """Total Stiefel-Whitney and Pontrjagin classes as per-degree coordinates."""
    R = R or presentation(lam)
    g = R.g
    one = {(0,) * g: 1}
    w_poly, p_poly = dict(one), dict(one)
    for f in R.facet_forms:
        lin = linear(f)
        w_poly = poly_mul(w_poly, poly_add(one, lin))
        p_poly = poly_mul(p_poly, poly_add(one, poly_mul(lin, lin), scale=-1))
    w = {}
    for d, part in homogeneous_parts(w_poly).items():
        if d <= R.top:
            w[R.unit * d] = tuple(int(x) % 2 for x in R.coords(part, d))
    for d in range(R.top + 1):
        w.setdefault(R.unit * d, tuple([0] * R.degree_data(d).rank))
    if R.coeff == 2:
        p = {0: (1,)}
        for d in range(1, R.top + 1):
            if (R.unit * d) % 4 == 0:
                p[R.unit * d] = tuple([0] * R.degree_data(d).rank)
    else:
        p = {}
        for d, part in homogeneous_parts(p_poly).items():
            if d <= R.top:
                p[R.unit * d] = tuple(int(x) for x in R.coords(part, d))
        for d in range(0, R.top + 1, 2):
            p.setdefault(R.unit * d, tuple([0] * R.degree_data(d).rank))
    return CharClasses(dict(sorted(w.items())), dict(sorted(p.items())))


def second_sw_poly(R):
    """w_2 of a quasitoric manifold: the sum of the facet classes (reduce mod 2)."""
    out = {}
    for f in R.facet_forms:
        out = poly_add(out, linear(f))
    return out


def first_pontrjagin_poly(R):
    out = {}
    for f in R.facet_forms:
        out = poly_add(out, poly_mul(linear(f), linear(f)), scale=-1)
    return out
