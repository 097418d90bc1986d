"""Graded ring isomorphism tests between cohomology presentations.

A candidate isomorphism is a g x g integer matrix M whose row i is the image
of generator i; a linear form l (coefficient row) is sent to l @ M.  M is an
isomorphism iff it is invertible and maps every relation into the target
ideal.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import factorial, gcd, prod

import numpy as np
import sympy as sp

from .charmat import permute_columns, split_tail, to_identity_form
from .cohomology import (
    expand,
    first_pontrjagin_poly,
    linear,
    poly_add,
    poly_mul,
    presentation,
    reduce_mod,
    second_sw_poly,
)
from .intmat import batched_det, exact_det, unimodular_inverse

EXHAUSTIVE_LIMIT = 2_000_000
DEFAULT_LADDER = (2, 3, 4, 5, 8, 9, 16)
_CHUNK = 1 << 17


class IsoError(ValueError):
    pass


@dataclass
class IsoVerdict:
    outcome: str  # "iso", "iso-mod-k", "distinct", "unresolved"
    certificate: tuple = None
    test: str = ""
    modulus: int = 0
    witness: dict = field(default_factory=dict)

    @property
    def distinct(self):
        return self.outcome == "distinct"

    @property
    def isomorphic(self):
        return self.outcome == "iso"

    def to_dict(self):
        d = {"outcome": self.outcome, "test": self.test}
        if self.modulus:
            d["modulus"] = self.modulus
        if self.certificate is not None:
            d["certificate"] = [list(r) for r in self.certificate]
        d.update(self.witness)
        return d


def _same_shape(R, S):
    if R.g != S.g or R.top != S.top or R.unit != S.unit:
        raise IsoError("rings have different generator counts or top degrees")


def _target_coords(S, d, k):
    c = S.degree_data(d).coords
    return c % k if k else c


def substitute(poly, M):
    """Image of a polynomial under generator i -> row i of M."""
    g = len(M)
    images = [linear(tuple(int(x) for x in M[i])) for i in range(g)]
    out = {}
    for e, c in poly.items():
        term = {(0,) * g: c}
        for i, a in enumerate(e):
            for _ in range(a):
                term = poly_mul(term, images[i])
        out = poly_add(out, term)
    return out


def relation_images(R, S, M, degrees=None, modulus=0):
    """Normal forms in S of the images of R's relations (one per relation)."""
    M = np.asarray(M, dtype=np.int64)
    out = []
    for idx, rel in enumerate(R.relations):
        if degrees is not None and len(rel) not in degrees:
            continue
        forms = [tuple(int(x) for x in np.asarray(f) @ M) for f in rel]
        v = S.coords(expand(forms, R.g), len(rel))
        if modulus:
            v = v % modulus
        out.append((idx, tuple(int(x) for x in v)))
    return out


def apply_iso_check(R, S, M, degrees=None, check_det=True):
    """True iff M maps every relation of R (of the given degrees) into S's ideal."""
    _same_shape(R, S)
    M = np.asarray(M, dtype=np.int64)
    k = S.coeff
    if check_det:
        d = exact_det(M.tolist())
        if (k and gcd(d % k, k) != 1) or (not k and abs(d) != 1):
            raise IsoError(f"matrix has determinant {d}, not a unit")
    return all(not any(v) for _, v in relation_images(R, S, M, degrees, k))


def _batch_filter(R, S, mats, k, degrees=None):
    """Rows of mats (K, g, g) sending every relation of R into S mod k."""
    table = S.table
    rels = [r for r in R.relations if degrees is None or len(r) in degrees]
    rels.sort(key=len)
    for rel in rels:
        if not len(mats):
            break
        forms = np.array(rel, dtype=np.int64)
        imgs = np.einsum("eg,Kgh->Keh", forms, mats) % k
        dense = table.products(imgs, k)
        coords = dense @ _target_coords(S, len(rel), k) % k
        mats = mats[~coords.any(axis=1)]
    return mats


@lru_cache(maxsize=8)
def _gl_mod(g, k):
    total = k ** (g * g)
    if total > EXHAUSTIVE_LIMIT:
        raise IsoError(f"GL({g},Z/{k}) exceeds the exhaustive bound")
    digits = np.array(np.unravel_index(np.arange(total), (k,) * (g * g)), dtype=np.int8).T
    mats = digits.reshape(-1, g, g)
    dets = batched_det(mats.astype(np.int64)) % k
    units = np.array([gcd(int(x), k) == 1 for x in range(k)])
    return mats[units[dets]]


def _prime_power(k):
    for p in range(2, k + 1):
        if k % p == 0:
            a = 0
            while k % p == 0:
                k //= p
                a += 1
            return (p, a) if k == 1 else None
    return None


def isomorphisms_mod(R, S, k, degrees=None):
    """All invertible g x g matrices mod k mapping R's relations into S mod k."""
    _same_shape(R, S)
    g = R.g
    if k ** (g * g) <= EXHAUSTIVE_LIMIT:
        gl = _gl_mod(g, k)
        found = [_batch_filter(R, S, gl[i : i + _CHUNK].astype(np.int64), k, degrees)
                 for i in range(0, len(gl), _CHUNK)]
        return np.concatenate(found) if found else np.zeros((0, g, g), dtype=np.int64)
    pp = _prime_power(k)
    if pp is None or pp[1] < 2:
        raise IsoError(f"Z/{k} is beyond the exhaustive bound and not a prime power")
    p, _ = pp
    low = isomorphisms_mod(R, S, k // p, degrees)
    steps = np.array(np.unravel_index(np.arange(p ** (g * g)), (p,) * (g * g)), dtype=np.int64).T
    steps = steps.reshape(-1, g, g) * (k // p)
    out = []
    for i in range(len(low)):
        cands = (low[i][None] + steps) % k
        out.append(_batch_filter(R, S, cands, k, degrees))
    return np.concatenate(out) if out else np.zeros((0, g, g), dtype=np.int64)


def iso_over_Zk(R, S, k, degrees=None):
    """Complete search over GL(g, Z/k).  A 'distinct' verdict proves non-isomorphism over Z."""
    mats = isomorphisms_mod(R, S, k, degrees)
    if len(mats):
        return IsoVerdict("iso-mod-k", tuple(map(tuple, mats[0].tolist())), f"GL(g,Z/{k})", k,
                          {"count": int(len(mats))})
    return IsoVerdict("distinct", None, f"GL(g,Z/{k})", k, {"count": 0})


def _code(mats, k):
    g2 = mats.shape[1] * mats.shape[2]
    w = k ** np.arange(g2, dtype=np.int64)
    return (mats.reshape(len(mats), -1) % k) @ w


def iso_over_Z_bounded(R, S, bound=10, primary=(4, 5), secondary=(3,)):
    """Search integer matrices with entries in [-bound, bound].

    Candidates are assembled by CRT from the mod-4 and mod-5 solution sets and
    filtered by the mod-3 set; survivors are checked exactly over Z.  A miss is
    reported as unresolved, never as non-isomorphism.
    """
    _same_shape(R, S)
    g = R.g
    sols = {}
    for k in primary + secondary:
        sols[k] = isomorphisms_mod(R, S, k)
        if not len(sols[k]):
            return IsoVerdict("distinct", None, f"GL(g,Z/{k})", k, {"count": 0})
    mod = prod(primary)
    res = np.zeros((1, g, g), dtype=np.int64)
    cur = 1
    for k in primary:
        a, b = res, sols[k] % k
        # x = a mod cur, x = b mod k
        inv = pow(cur, -1, k)
        t = ((b[None] - a[:, None]) % k) * inv % k
        res = (a[:, None] + cur * t).reshape(-1, g, g) % (cur * k)
        cur *= k
    tables = {}
    for k in secondary:
        tab = np.zeros(k ** (g * g), dtype=bool)
        tab[_code(sols[k], k)] = True
        tables[k] = tab
    found = None
    checked = 0
    for cand in _expand_representatives(res, bound, mod):
        for k, tab in tables.items():
            cand = cand[tab[_code(cand, k)]]
        if not len(cand):
            continue
        dets = batched_det(cand)
        cand = cand[np.abs(dets) == 1]
        for M in cand:
            checked += 1
            if apply_iso_check(R, S, M):
                found = M
                break
        if found is not None:
            break
    if found is not None:
        return IsoVerdict("iso", tuple(map(tuple, found.tolist())), "bounded", 0, {"bound": bound})
    return IsoVerdict("unresolved", None, "bounded", 0, {"bound": bound, "checked": checked})


def _expand_representatives(res, bound, mod):
    """Yield stacks of integer matrices in [-bound, bound] with the given residues mod ``mod``."""
    rep = ((res + bound) % mod) - bound
    yield rep
    if 2 * bound + 1 <= mod:
        return
    shape = rep.shape[1:]
    extra = []
    for i in np.nonzero(((rep + mod) <= bound).reshape(len(rep), -1).any(axis=1))[0]:
        flat = rep[i].ravel()
        amb = np.nonzero(flat + mod <= bound)[0]
        choices = [range(0, (bound - flat[e]) // mod + 1) for e in amb]
        for ts in product(*choices):
            if not any(ts):
                continue
            new = flat.copy()
            new[amb] += mod * np.array(ts)
            extra.append(new.reshape(shape))
    if extra:
        yield np.array(extra, dtype=np.int64)


def inverse_certificate(M):
    return unimodular_inverse(np.asarray(M, dtype=np.int64))


def char_class_preserved(M, lam, lam2, R=None, S=None):
    """Does M carry w_2 and p_1 of lam to those of lam2?"""
    R = R or presentation(lam)
    S = S or presentation(lam2)
    if not apply_iso_check(R, S, M):
        raise IsoError("matrix is not an isomorphism of the rings")
    w_src = substitute(second_sw_poly(R), M)
    w_dst = second_sw_poly(S)
    w_ok = not np.any(S.coords(poly_add(w_src, w_dst, -1), 1) % 2)
    p_src = substitute(first_pontrjagin_poly(R), M)
    p_dst = first_pontrjagin_poly(S)
    p_ok = not np.any(S.coords(poly_add(p_src, p_dst, -1), 2))
    return bool(w_ok and p_ok)


# ---------------------------------------------------------------- fingerprints


def _all_degree_one(g, k):
    return np.array(np.unravel_index(np.arange(k ** g), (k,) * g), dtype=np.int64).T


def _powers(R, xs, e, k):
    forms = np.repeat(xs[:, None, :], e, axis=1)
    dense = R.table.products(forms, k)
    return dense @ _target_coords(R, e, k) % k


@dataclass(frozen=True)
class Fingerprint:
    ranks: tuple
    data: tuple

    def first_difference(self, other):
        if self.ranks != other.ranks:
            return ("ranks", 0)
        for (k, name, a), (_, _, b) in zip(self.data, other.data):
            if a != b:
                return (name, k)
        return None


def fingerprint(R, moduli=(3, 4, 5)):
    """Isomorphism invariants of R and its reductions mod k."""
    ranks = tuple(R.degree_data(d).rank for d in range(R.top + 1))
    data = []
    top = R.top
    for k in moduli:
        Rk = reduce_mod(R, k) if R.coeff == 0 else R
        xs = _all_degree_one(R.g, k)
        sq = _powers(Rk, xs, 2, k) if top >= 2 else np.zeros((len(xs), 0), dtype=np.int64)
        data.append((k, "square-zero", int((~sq.any(axis=1)).sum())))
        tp = _powers(Rk, xs, top, k)
        data.append((k, "top-power-zero", int((~tp.any(axis=1)).sum())))
        vals = tp[:, 0] % k if tp.shape[1] == 1 else None
        if vals is not None:
            plus = tuple(sorted(Counter(vals.tolist()).items()))
            minus = tuple(sorted(Counter(((-vals) % k).tolist()).items()))
            data.append((k, "top-power-values", min(plus, minus)))
    return Fingerprint(ranks, tuple(data))


# ---------------------------------------------------------------- covariants


def top_form(R):
    """The form t -> <(sum t_i x_i)^top, [M]> as a sympy expression (up to sign).

    A torsion-free ring generated in degree one with a perfect top pairing is
    determined by this form up to GL(g, Z) and sign.
    """
    data = R.degree_data(R.top)
    if data.rank != 1:
        raise IsoError("top degree is not of rank one")
    t = sp.symbols(f"t0:{R.g}")
    expr = 0
    for e, c in zip(data.monomials, data.coords[:, 0]):
        c = int(c)
        if c:
            mult = factorial(R.top) // prod(factorial(a) for a in e)
            expr += c * mult * prod(ti ** a for ti, a in zip(t, e))
    return sp.expand(expr), t


def _hessian(expr, t):
    return sp.expand(sp.Matrix(len(t), len(t), lambda i, j: sp.diff(expr, t[i], t[j])).det())


def _primitive(vec):
    g = 0
    for x in vec:
        g = gcd(g, int(x))
    v = [int(x) // g for x in vec]
    first = next(x for x in v if x)
    return tuple(-x for x in v) if first < 0 else tuple(v)


def _covariant_data(R):
    """Linear factors of the top form and of its Hessian, plus a factor pattern."""
    if R.coeff:
        raise IsoError("covariants need an integral ring")
    if "covariants" not in R._cache:
        R._cache["covariants"] = _compute_covariants(R)
    return R._cache["covariants"]


def _compute_covariants(R):
    form, t = top_form(R)
    lines = []
    pattern = []
    for tag, expr in (("form", form), ("hessian", _hessian(form, t))):
        if expr == 0:
            pattern.append((tag, "zero"))
            continue
        _, factors = sp.factor_list(expr, *t)
        shape = []
        for f, mult in factors:
            poly = sp.Poly(f, *t)
            shape.append((poly.total_degree(), mult))
            if poly.total_degree() == 1:
                vec = [poly.coeff_monomial(ti) for ti in t]
                lines.append((tag, mult, _primitive(vec)))
        pattern.append((tag, tuple(sorted(shape))))
    return tuple(lines), tuple(pattern)


def covariant_lines(R):
    return _covariant_data(R)[0]


def iso_by_covariants(R, S):
    """Decide isomorphism exactly when the covariant lines of S span.

    Any isomorphism M satisfies F_R(t) = +-F_S(M^T t), so it carries each
    linear factor b of S's form or Hessian to +-M b, a factor of R with the
    same tag and multiplicity.  Fixing a spanning set of S's factors leaves
    finitely many M, each checked exactly.  Returns None when S's lines do
    not span.
    """
    _same_shape(R, S)
    lr, pr = _covariant_data(R)
    ls, ps = _covariant_data(S)
    if pr != ps or Counter((a, b) for a, b, _ in lr) != Counter((a, b) for a, b, _ in ls):
        return IsoVerdict("distinct", None, "covariant-pattern", 0, {"source": pr, "target": ps})
    g = R.g
    basis = []
    for line in ls:
        trial = basis + [line]
        if np.linalg.matrix_rank(np.array([x[2] for x in trial], dtype=float)) == len(trial):
            basis = trial
        if len(basis) == g:
            break
    if len(basis) < g:
        return None
    B = sp.Matrix([list(b[2]) for b in basis]).T
    Binv = B.inv()
    choices = [[a for a in lr if a[:2] == b[:2]] for b in basis]
    tried = 0
    for pick in product(*choices):
        if len({a[2] for a in pick}) < g:
            continue
        A = sp.Matrix([list(a[2]) for a in pick]).T
        for signs in product((1, -1), repeat=g):
            M = A * sp.diag(*signs) * Binv
            if any(x.q != 1 for x in M) or abs(M.det()) != 1:
                continue
            tried += 1
            Mi = np.array(M.tolist(), dtype=np.int64)
            if apply_iso_check(R, S, Mi):
                return IsoVerdict("iso", tuple(map(tuple, Mi.tolist())), "covariant-lines", 0,
                                  {"candidates": tried})
    return IsoVerdict("distinct", None, "covariant-lines", 0, {"candidates": tried})


# ---------------------------------------------------------------- bulk distinction


@dataclass
class Distinction:
    pairs: list
    classes: list
    moduli_used: dict

    @property
    def unresolved(self):
        return [p for p in self.pairs if p["outcome"] == "unresolved"]

    def to_dict(self):
        return {"pairs": self.pairs, "classes": self.classes}


def distinguish_all(rings, moduli=DEFAULT_LADDER, iso_bound=10, fp_moduli=(3, 4, 5)):
    """Pairwise verdicts: fingerprint screen, modular ladder, bounded certificates."""
    fps = [fingerprint(R, fp_moduli) for R in rings]
    n = len(rings)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    pairs = []
    used = Counter()
    for i in range(n):
        for j in range(i + 1, n):
            diff = fps[i].first_difference(fps[j])
            if diff is not None:
                pairs.append({"i": i, "j": j, "outcome": "distinct",
                              "witness": {"test": "fingerprint", "invariant": diff[0], "modulus": diff[1]}})
                used[("fingerprint", diff[1])] += 1
                continue
            verdict = None
            for k in moduli:
                v = iso_over_Zk(rings[i], rings[j], k)
                if v.distinct:
                    verdict = v
                    break
            if verdict is None and rings[i].coeff == 0:
                verdict = iso_by_covariants(rings[i], rings[j])
            if verdict is None:
                verdict = iso_over_Z_bounded(rings[i], rings[j], iso_bound)
            entry = {"i": i, "j": j, "outcome": verdict.outcome if verdict.outcome != "iso-mod-k" else "unresolved",
                     "witness": verdict.to_dict()}
            if verdict.distinct:
                used[(verdict.test, verdict.modulus)] += 1
            elif verdict.isomorphic:
                parent[find(j)] = find(i)
            pairs.append(entry)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    classes = sorted(groups.values())
    return Distinction(pairs, classes, dict(used))


# ---------------------------------------------------------------- induced maps


def induced_isomorphism(lam, lam2, perm):
    """Ring isomorphism H*(lam) -> H*(lam2) when lam2 ~ perm . lam.

    Facet class v_j goes to s_(pi j) v_(pi j), the signs being the column
    signs relating lam2 to the rebased perm . lam.
    """
    P = lam.polytope
    base = P.vertices[0]
    mu = to_identity_form(permute_columns(lam, perm), base)
    lam2 = to_identity_form(lam2, base)
    T, T2 = split_tail(mu, base), split_tail(lam2, base)
    n, t = T.shape
    signs = None
    for bits in range(1 << n):
        D = np.array([-1 if bits >> r & 1 else 1 for r in range(n)])
        DT = D[:, None] * T
        E = []
        for c in range(t):
            if np.array_equal(DT[:, c], T2[:, c]):
                E.append(1)
            elif np.array_equal(DT[:, c], -T2[:, c]):
                E.append(-1)
            else:
                break
        if len(E) == t:
            signs = (D, E)
            break
    if signs is None:
        raise IsoError("matrices are not related by the permutation")
    D, E = signs
    gens = [j for j in range(1, P.m + 1) if j not in base]
    s = {}
    for r, b in enumerate(base):
        s[b] = int(D[r])
    for c, j in enumerate(gens):
        s[j] = int(E[c])
    S = presentation(lam2)
    M = []
    for j in gens:
        target = perm(j)
        if target in base:
            form = [-x for x in S.facet_forms[target - 1]]
        else:
            form = list(S.facet_forms[target - 1])
        M.append([s[target] * x for x in form])
    return np.array(M, dtype=np.int64)
