"""Characteristic matrices over Z and Z/2: validation, normal forms, enumeration.

Column j of a matrix is the vector attached to facet j (1-based).  Integer
matrices are classified up to GL(n, Z) acting on rows and sign changes of
columns; real (Z/2) matrices up to GL(n, Z/2).  Optionally a group of facet
permutations acts as well, moving column i to position pi(i).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .intmat import batched_det, exact_det, inverse_mod, unimodular_inverse
from .polytope import CombinatorialPolytope, FacetPermutation, generated_group

CANONICAL_MAX_M = 14
# pairs (partial, candidate) tested per vectorised block
_BLOCK = 1 << 21


class CharMatrixError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CharMatrix:
    polytope: CombinatorialPolytope
    entries: tuple
    modulus = 0

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in np.asarray(self.entries).tolist())
        if self.modulus:
            rows = tuple(tuple(x % self.modulus for x in r) for r in rows)
        object.__setattr__(self, "entries", rows)
        if len(rows) != self.polytope.n or any(len(r) != self.polytope.m for r in rows):
            raise CharMatrixError(
                f"expected a {self.polytope.n}x{self.polytope.m} matrix for {self.polytope.label}"
            )

    @property
    def n(self):
        return self.polytope.n

    @property
    def m(self):
        return self.polytope.m

    @property
    def array(self):
        return np.array(self.entries, dtype=np.int64)

    def column(self, i):
        return tuple(r[i - 1] for r in self.entries)

    def minor(self, facets):
        cols = [i - 1 for i in sorted(facets)]
        d = exact_det([[r[c] for c in cols] for r in self.entries])
        return d % self.modulus if self.modulus else d

    def _key(self):
        return (type(self).__name__, self.polytope.vertices, self.entries)

    def __eq__(self, other):
        return isinstance(other, CharMatrix) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"{type(self).__name__}({self.polytope.label}, {list(map(list, self.entries))})"

    def to_text(self):
        ring = "Z2" if self.modulus == 2 else "Z"
        lines = [f"charmat {self.n} {self.m} {ring} {self.polytope.label}"]
        lines += [" ".join(str(x) for x in r) for r in self.entries]
        return "\n".join(lines) + "\n"

    def to_dict(self):
        return {
            "n": self.n,
            "m": self.m,
            "ring": "Z2" if self.modulus == 2 else "Z",
            "polytope": self.polytope.label,
            "entries": [list(r) for r in self.entries],
        }


class RealCharMatrix(CharMatrix):
    modulus = 2


def from_text(text, polytope):
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "charmat":
        raise CharMatrixError("missing charmat header")
    n, m, ring = int(head[1]), int(head[2]), head[3]
    if (n, m) != (polytope.n, polytope.m):
        raise CharMatrixError("header shape does not match polytope")
    rows = [[int(x) for x in ln.split()] for ln in lines[1 : 1 + n]]
    cls = RealCharMatrix if ring == "Z2" else CharMatrix
    return cls(polytope, rows)


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    vertex: tuple = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def is_characteristic(entries, P=None, modulus=None):
    """Non-singular condition at every vertex; primitivity of columns over Z."""
    if isinstance(entries, CharMatrix):
        P = entries.polytope if P is None else P
        modulus = entries.modulus if modulus is None else modulus
        entries = entries.entries
    modulus = modulus or 0
    a = np.asarray(entries, dtype=np.int64)
    if a.shape != (P.n, P.m):
        raise CharMatrixError(f"shape {a.shape} does not match {P.n}x{P.m}")
    if modulus:
        a = a % modulus
    else:
        for j in range(P.m):
            if np.gcd.reduce(np.abs(a[:, j])) != 1:
                return CheckResult(False, None, f"column {j + 1} is not primitive")
    idx = np.array([[i - 1 for i in v] for v in P.vertices])
    dets = batched_det(np.moveaxis(a[:, idx], 1, 0))
    good = (dets % 2 == 1) if modulus == 2 else (np.abs(dets) == 1)
    if modulus and modulus != 2:
        raise CharMatrixError("only Z and Z/2 matrices are characteristic")
    if good.all():
        return CheckResult(True)
    bad = int(np.argmin(good))
    return CheckResult(False, P.vertices[bad], f"minor at {P.vertices[bad]} is {int(dets[bad])}")


def make(P, entries, real=False, check=True):
    cls = RealCharMatrix if real else CharMatrix
    lam = cls(P, entries)
    if check:
        res = is_characteristic(lam)
        if not res:
            raise CharMatrixError(f"not characteristic on {P.label}: {res.reason}")
    return lam


def identity_tail(P, tail, real=False, base=None, check=True):
    """Matrix with the identity at ``base`` columns and ``tail`` elsewhere."""
    base = tuple(base or P.vertices[0])
    rest = [j for j in range(1, P.m + 1) if j not in base]
    a = np.zeros((P.n, P.m), dtype=np.int64)
    for r, b in enumerate(base):
        a[r, b - 1] = 1
    t = np.asarray(tail, dtype=np.int64).reshape(P.n, len(rest))
    for c, j in enumerate(rest):
        a[:, j - 1] = t[:, c]
    return make(P, a, real=real, check=check)


def split_tail(lam, base=None):
    base = tuple(base or lam.polytope.vertices[0])
    rest = [j - 1 for j in range(1, lam.m + 1) if j not in base]
    return lam.array[:, rest]


def to_identity_form(lam, v=None):
    """A * lam with A the inverse of the columns at vertex v (default: least vertex)."""
    P = lam.polytope
    v = tuple(sorted(v or P.vertices[0]))
    if not P.is_vertex(v):
        raise CharMatrixError(f"{v} is not a vertex of {P.label}")
    a = lam.array
    block = a[:, [i - 1 for i in v]]
    if lam.modulus:
        out = inverse_mod(block, 2) @ a % 2
    else:
        out = unimodular_inverse(block) @ a
    return type(lam)(P, out)


def permute_columns(lam, perm):
    """pi . lam: column i moves to position pi(i)."""
    if not perm.preserves(lam.polytope):
        raise CharMatrixError(f"{perm.images} is not an automorphism of {lam.polytope.label}")
    a = lam.array
    out = np.empty_like(a)
    for i in range(lam.m):
        out[:, perm.images[i] - 1] = a[:, i]
    return type(lam)(lam.polytope, out)


def mod2_reduce(lam):
    return RealCharMatrix(lam.polytope, lam.array % 2)


def lift_tilde(real):
    """Read a real matrix of dimension <= 3 with entries 0/1 over Z."""
    if real.n > 3:
        raise CharMatrixError("the 0/1 lift is only guaranteed in dimension <= 3")
    return make(real.polytope, real.array % 2)


# ---------------------------------------------------------------- canonical forms


def _sign_vectors(n):
    # the all-minus row sign is absorbed by column signs, so fix the first row
    return np.array([(1,) + s for s in product((1, -1), repeat=n - 1)], dtype=np.int64)


def _lexmin_index(flat):
    """Row index of the lexicographic minimum of each block, flat: (N, S, L)."""
    N, S, L = flat.shape
    alive = np.ones((N, S), dtype=bool)
    big = np.iinfo(np.int64).max
    for p in range(L):
        col = np.where(alive, flat[:, :, p], big)
        best = col.min(axis=1, keepdims=True)
        alive &= col == best
    return alive.argmax(axis=1)


def canonical_tails(tails, modulus=0):
    """Normal form of tails under row signs and column signs (identity on Z/2)."""
    tails = np.asarray(tails, dtype=np.int64)
    if modulus == 2:
        return tails % 2
    N, n, t = tails.shape
    if N == 0:
        return tails
    D = _sign_vectors(n)
    X = tails[:, None, :, :] * D[None, :, :, None]
    nz = X != 0
    first = nz.argmax(axis=2)
    top = np.take_along_axis(X, first[:, :, None, :], axis=2)[:, :, 0, :]
    X = X * np.where(top > 0, -1, 1)[:, :, None, :]
    flat = X.reshape(N, len(D), n * t)
    pick = _lexmin_index(flat)
    return X[np.arange(N), pick]


def _lexmin_stack(stack):
    flat = stack.reshape(1, stack.shape[0], -1)
    return stack[_lexmin_index(flat)[0]]


@dataclass(frozen=True, eq=False)
class EquivClass:
    canonical: CharMatrix
    group_spec: str
    orbit_size: int = None

    @property
    def key(self):
        return self.canonical.entries

    def __eq__(self, other):
        return isinstance(other, EquivClass) and (self.key, self.group_spec) == (other.key, other.group_spec)

    def __hash__(self):
        return hash((self.key, self.group_spec))

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return f"EquivClass({self.group_spec}, {list(map(list, self.key))})"


def _group_spec(lam, perms):
    spec = "GL(n,Z/2)" if lam.modulus == 2 else "GL(n,Z)xSigns"
    if perms and len(perms) > 1:
        spec += f"xH[{len(perms)}]"
    return spec


def _rebased_tail(lam, base):
    a = lam.array
    block = a[:, [i - 1 for i in base]]
    rest = [j - 1 for j in range(1, lam.m + 1) if j not in base]
    if lam.modulus:
        return (inverse_mod(block, 2) @ a % 2)[:, rest]
    return (unimodular_inverse(block) @ a)[:, rest]


def _all_sign_forms(tail):
    n, t = tail.shape
    D = np.array(list(product((1, -1), repeat=n)), dtype=np.int64)
    E = np.array(list(product((1, -1), repeat=t)), dtype=np.int64)
    X = tail[None, None] * D[:, None, :, None] * E[None, :, None, :]
    return {tuple(x.ravel()) for x in X.reshape(-1, n, t)}


def canonical_form(lam, perms=None, materialize=False):
    """Lexicographically least (I|*) representative of the class of ``lam``.

    ``perms`` is a subgroup of Aut(K_P) (all elements, or generators which
    are closed under composition here).  The identity block sits at the
    least vertex of the polytope.
    """
    P = lam.polytope
    if P.m > CANONICAL_MAX_M:
        raise CharMatrixError(f"canonical forms are bounded to m <= {CANONICAL_MAX_M}")
    perms = list(perms or [])
    if perms:
        perms = generated_group(perms, P.m)
    base = P.vertices[0]
    images = [lam] + [permute_columns(lam, g) for g in perms if not g.is_identity()]
    tails = np.stack([_rebased_tail(x, base) for x in images])
    canon = canonical_tails(tails, lam.modulus)
    best = _lexmin_stack(canon)
    size = None
    if materialize:
        if lam.modulus:
            size = len({tuple(t.ravel()) for t in tails})
        else:
            forms = set()
            for t in tails:
                forms |= _all_sign_forms(t)
            size = len(forms)
    rep = identity_tail(P, best, real=bool(lam.modulus), base=base, check=False)
    return EquivClass(rep, _group_spec(lam, perms), size)


# ---------------------------------------------------------------- enumeration


def _vertex_schedule(P, base):
    """For each tail column, the vertices whose largest tail facet it is.

    Each entry is (rows, cols): the rows of the tail minor (base positions
    not in the vertex) and its tail columns, the last one being the new one.
    """
    rest = [j for j in range(1, P.m + 1) if j not in base]
    pos = {j: c for c, j in enumerate(rest)}
    sched = [[] for _ in rest]
    for v in P.vertices:
        cols = sorted(pos[j] for j in v if j in pos)
        if not cols:
            continue
        rows = [r for r, b in enumerate(base) if b not in v]
        sched[cols[-1]].append((rows, cols))
    return rest, sched


def _cofactors(partial, rows, cols):
    """Cofactors of the new (last) column for a stack of partial tails."""
    k = len(rows)
    N = partial.shape[0]
    if k == 1:
        return np.ones((N, 1), dtype=np.int64)
    old = cols[:-1]
    sub = partial[:, rows][:, :, old]
    out = np.empty((N, k), dtype=np.int64)
    for i in range(k):
        minor = np.delete(sub, i, axis=1)
        out[:, i] = (-1) ** (i + k - 1) * batched_det(minor)
    return out


def search_tails(P, candidates, modulus=0, base=None):
    """All tails whose columns come from ``candidates`` and pass every vertex.

    ``candidates[c]`` is an array (K_c, n) of allowed values for tail column c.
    Returns an array (N, n, m - n).
    """
    base = tuple(base or P.vertices[0])
    rest, sched = _vertex_schedule(P, base)
    n = P.n
    partial = np.zeros((1, n, 0), dtype=np.int64)
    for c in range(len(rest)):
        cand = np.asarray(candidates[c], dtype=np.int64).reshape(-1, n)
        K = len(cand)
        step = max(1, _BLOCK // max(K, 1))
        pieces = []
        for s in range(0, len(partial), step):
            chunk = partial[s : s + step]
            ok = np.ones((len(chunk), K), dtype=bool)
            for rows, cols in sched[c]:
                cof = _cofactors(chunk, rows, cols)
                dets = cof @ cand[:, rows].T
                ok &= (dets % 2 == 1) if modulus == 2 else (np.abs(dets) == 1)
            ii, jj = np.nonzero(ok)
            if len(ii):
                pieces.append(np.concatenate([chunk[ii], cand[jj][:, :, None]], axis=2))
        if not pieces:
            return np.zeros((0, n, len(rest)), dtype=np.int64)
        partial = np.concatenate(pieces)
    return partial


def _integer_columns(n, values):
    """Columns with entries from values[r], top nonzero entry positive, nonzero."""
    grid = np.array(list(product(*values)), dtype=np.int64).reshape(-1, n)
    nz = grid != 0
    keep = nz.any(axis=1)
    first = np.take_along_axis(grid, nz.argmax(axis=1)[:, None], axis=1)[:, 0]
    return grid[keep & (first > 0)]


def _classes_from_tails(P, tails, modulus, base):
    canon = canonical_tails(tails, modulus)
    uniq = sorted({tuple(t.ravel()) for t in canon})
    t = P.m - P.n
    out = []
    for key in uniq:
        rep = identity_tail(P, np.array(key).reshape(P.n, t), real=bool(modulus), base=base, check=False)
        out.append(EquivClass(rep, "GL(n,Z/2)" if modulus else "GL(n,Z)xSigns"))
    return out


def enumerate_real(P):
    """All GL(n, Z/2)-classes of real characteristic matrices on P."""
    if P.m > 12:
        raise CharMatrixError("real enumeration is bounded to m <= 12")
    base = P.vertices[0]
    cols = np.array([c for c in product((0, 1), repeat=P.n) if any(c)], dtype=np.int64)
    tails = search_tails(P, [cols] * (P.m - P.n), modulus=2, base=base)
    return _classes_from_tails(P, tails, 2, base)


def enumerate_integer(P, bound=6, parity=None):
    """GL x sign classes with an (I|*) representative whose * lies in [-B, B].

    ``parity`` optionally fixes every tail entry mod 2 (shape n x (m - n)).
    """
    if P.m > 10:
        raise CharMatrixError("integer enumeration is bounded to m <= 10")
    if bound < 1:
        raise CharMatrixError("bound must be positive")
    base = P.vertices[0]
    t = P.m - P.n
    rng = np.arange(-bound, bound + 1)
    cands = []
    for c in range(t):
        if parity is None:
            values = [rng] * P.n
        else:
            values = [rng[rng % 2 == parity[r][c] % 2] for r in range(P.n)]
        cands.append(_integer_columns(P.n, values))
    tails = search_tails(P, cands, modulus=0, base=base)
    return _classes_from_tails(P, tails, 0, base)


def fiber_over(real, bound=6):
    """Integer classes reducing to a matrix GL(n, Z/2)-equivalent to ``real``."""
    base = real.polytope.vertices[0]
    parity = _rebased_tail(real, base)
    return enumerate_integer(real.polytope, bound, parity=parity)


def orbits(classes, gens):
    """Partition classes under the group generated by facet permutations."""
    if not classes:
        return []
    P = classes[0].canonical.polytope
    for g in gens:
        if not g.preserves(P):
            raise CharMatrixError(f"{g.images} is not an automorphism of {P.label}")
    group = generated_group(list(gens), P.m)
    buckets = {}
    for cl in classes:
        key = canonical_form(cl.canonical, group).key
        buckets.setdefault(key, []).append(cl)
    out = [sorted(b, key=lambda c: c.key) for b in buckets.values()]
    return sorted(out, key=lambda b: b[0].key)


def same_class(a, b, perms=None):
    return canonical_form(a, perms).key == canonical_form(b, perms).key
