"""Named reproduction recipes: run a pipeline, diff it against shipped reference data."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import golden
from .charmat import (
    canonical_form,
    enumerate_integer,
    enumerate_real,
    fiber_over,
    is_characteristic,
    lift_tilde,
    mod2_reduce,
    orbits,
    permute_columns,
)
from .cohomology import TorsionError, betti, pairing_table, presentation
from .connectsum import (
    classify_c3_small_cover,
    classify_polygon_quasitoric,
    classify_polygon_small_cover,
    is_indecomposable_c3,
)
from .isomorphism import (
    DEFAULT_LADDER,
    apply_iso_check,
    char_class_preserved,
    distinguish_all,
    iso_by_covariants,
    iso_over_Zk,
)
from .polytope import automorphism_group, dual_cyclic, fh_vectors, polygon, simplex


@dataclass
class RunConfig:
    bound: int = 6
    iso_bound: int = 10
    moduli: tuple = DEFAULT_LADDER
    jobs: int = 1

    def __post_init__(self):
        if self.bound < 1 or self.iso_bound < 1:
            raise ValueError("bounds must be positive")
        if any(k < 2 for k in self.moduli):
            raise ValueError("moduli must be at least 2")
        self.moduli = tuple(self.moduli)


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class RecipeResult:
    recipe: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    def check(self, name, ok, detail=""):
        self.checks.append(Check(name, bool(ok), str(detail)))
        return bool(ok)

    def to_dict(self):
        return {
            "recipe": self.recipe,
            "ok": self.ok,
            "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in self.checks],
            "data": self.data,
        }


RECIPES = {}


def recipe(name):
    def wrap(fn):
        RECIPES[name] = fn
        return fn
    return wrap


def run(name, config=None):
    if name not in RECIPES:
        raise KeyError(name)
    res = RecipeResult(name)
    RECIPES[name](res, config or RunConfig())
    return res


def _keys(classes):
    return {c.key for c in classes}


# ---------------------------------------------------------------- combinatorics


def evenness_brute_force(n, m):
    """n-subsets of [m] whose interior runs of consecutive labels have even length."""
    out = []
    for S in combinations(range(1, m + 1), n):
        runs, start = [], S[0]
        for a, b in zip(S, S[1:] + (None,)):
            if b != a + 1:
                runs.append((start, a))
                start = b
        if all((hi - lo + 1) % 2 == 0 for lo, hi in runs if lo != 1 and hi != m):
            out.append(S)
    return out


@recipe("gale-check")
def _gale(res, cfg):
    bad = []
    for n in range(2, 7):
        for m in range(n + 1, 11):
            if set(dual_cyclic(n, m).vertices) != set(evenness_brute_force(n, m)):
                bad.append((n, m))
    res.check("vertex families for n <= 6, m <= 10", not bad, f"mismatch at {bad}" if bad else "all match")
    got = set(dual_cyclic(4, 7).vertices)
    ref = {tuple(f) for f in golden.load("c47")["maximal_faces"]}
    res.check("C^4(7)* maximal faces", got == ref,
              f"{len(got)} faces" if got == ref else f"missing {sorted(ref - got)}, extra {sorted(got - ref)}")


NONEXISTENCE_CASES = ((4, 8), (4, 9), (4, 10), (4, 11), (5, 9), (5, 10), (6, 9), (6, 10), (7, 10))


@recipe("nonexistence")
def _nonexistence(res, cfg):
    counts = {}
    for n, m in NONEXISTENCE_CASES:
        counts[f"{n},{m}"] = c = len(enumerate_real(dual_cyclic(n, m)))
        res.check(f"no real matrix on C^{n}({m})*", c == 0, f"{c} classes")
    res.data["counts"] = counts


def _real_recipe(res, P, reference, gens):
    classes = enumerate_real(P)
    res.check("real class count", len(classes) == 2, f"{len(classes)} classes")
    keys = _keys(classes)
    ref = [canonical_form(r).key for r in reference]
    res.check("reference matrices are the classes", set(ref) == keys and len(set(ref)) == 2,
              "both reference matrices found" if set(ref) == keys else "reference differs from enumeration")
    orb = orbits(classes, gens)
    res.check("one orbit under the automorphisms", len(orb) == 1, f"{len(orb)} orbits")
    res.data["classes"] = [c.canonical.to_dict() for c in classes]


@recipe("c47-real")
def _c47_real(res, cfg):
    _real_recipe(res, dual_cyclic(4, 7), golden.c47_real(), golden.c47_generators())


@recipe("c58-real")
def _c58_real(res, cfg):
    _real_recipe(res, dual_cyclic(5, 8), golden.c58_real(), golden.c58_generators())


def _c47_base_real():
    return mod2_reduce(golden.c47_lift(1))


def c47_lift_keys():
    return {k: canonical_form(lam).key for k, lam in golden.c47_lifts().items()}


@recipe("c47-lifts")
def _c47_lifts(res, cfg):
    real = _c47_base_real()
    lifts = golden.c47_lifts()
    same = {canonical_form(mod2_reduce(l)).key for l in lifts.values()}
    res.check("reference lifts share one reduction", len(same) == 1, f"{len(same)} reductions")
    fib = fiber_over(real, cfg.bound)
    res.check(f"fiber size at B={cfg.bound}", len(fib) == 28, f"{len(fib)} classes")
    ref = c47_lift_keys()
    ok = set(ref.values()) == _keys(fib) and len(set(ref.values())) == 28
    res.check("bijection with the 28 reference lifts", ok,
              "all 28 matched" if ok else f"{len(set(ref.values()) - _keys(fib))} reference lifts not found")
    wide = fiber_over(real, max(cfg.bound, 8))
    res.check("fiber size stable at B=8", len(wide) == len(fib), f"{len(wide)} classes")


def _c47_orbits():
    real = _c47_base_real()
    fib = fiber_over(real, 6)
    sigma, tau = golden.c47_generators()
    inv = {v: k for k, v in c47_lift_keys().items()}
    return fib, sigma, tau, inv


@recipe("c47-orbits")
def _c47_orbits_recipe(res, cfg):
    fib, sigma, tau, inv = _c47_orbits()
    orb = orbits(fib, [sigma])
    sizes = sorted(len(o) for o in orb)
    res.check("four sigma orbits of size 7", sizes == [7, 7, 7, 7], f"sizes {sizes}")
    labelled = [sorted(inv[c.key] for c in o) for o in orb]
    reps = golden.c47_representatives()
    hit = sorted(next(i for i, o in enumerate(labelled) if r in o) for r in reps.values())
    res.check("representatives lie in distinct orbits", hit == list(range(len(orb))), f"orbits {hit}")
    chains = golden.load("c47")["sigma_chains"]
    lifts = golden.c47_lifts()
    bad = []
    for chain in chains:
        for a, b in zip(chain, chain[1:] + chain[:1]):
            image = canonical_form(permute_columns(lifts[a], sigma)).key
            if inv.get(image) != b:
                bad.append((a, b, inv.get(image)))
    res.check("sigma chains", not bad, "all 28 arrows" if not bad else f"wrong arrows {bad}")
    res.check("tau keeps the orbit count", len(orbits(fib, [sigma, tau])) == 4,
              f"{len(orbits(fib, [sigma, tau]))} orbits under sigma, tau")
    res.data["orbits"] = labelled


def c58_lift_keys():
    out = {}
    for orbit in golden.c58_orbits():
        for k, a, b in orbit:
            out[(k, a, b)] = canonical_form(golden.c58_lift(k, a, b)).key
    return out


def _c58_fiber(bound=6):
    return fiber_over(mod2_reduce(golden.c58_lift(1, 0, 0)), bound)


@recipe("c58-lifts")
def _c58_lifts(res, cfg):
    fib = _c58_fiber(cfg.bound)
    res.check(f"fiber size at B={cfg.bound}", len(fib) == 64, f"{len(fib)} classes")
    ref = c58_lift_keys()
    ok = set(ref.values()) == _keys(fib) and len(set(ref.values())) == 64
    res.check("fiber equals the (lambda_k; a, b) family", ok,
              "64 matched" if ok else f"{len(set(ref.values()) ^ _keys(fib))} differ")


@recipe("c58-orbits")
def _c58_orbits(res, cfg):
    fib = _c58_fiber()
    res.check("64 lifts", len(fib) == 64, f"{len(fib)} classes")
    sigma, _ = golden.c58_generators()
    orb = orbits(fib, [sigma])
    res.check("46 sigma orbits", len(orb) == 46, f"{len(orb)} orbits")
    ref = c58_lift_keys()
    inv = {v: k for k, v in ref.items()}
    got = sorted(sorted(inv[c.key] for c in o) for o in orb)
    want = sorted(sorted(o) for o in golden.c58_orbits())
    res.check("orbit partition matches the reference diagram", got == want,
              "identical" if got == want else f"{len([o for o in want if o not in got])} orbits differ")
    res.data["orbits"] = [[list(x) for x in o] for o in got]


@recipe("table1")
def _table1(res, cfg):
    cols, rows = golden.table1()
    lifts = golden.c47_lifts()
    matched, total, deltas = 0, 0, []
    out = {}
    for name, idx in golden.c47_representatives().items():
        R = presentation(lifts[idx])
        t = pairing_table(R)
        got = [t[e] for e in cols]
        out[name] = got
        for e, g, w in zip(cols, got, rows[name]):
            total += 1
            if g == w:
                matched += 1
            else:
                deltas.append(f"{name}{e}: got {g}, expected {w}")
    res.check("pairing table coefficients", matched == total == 60, f"{matched}/{total} match" + (
        "; " + "; ".join(deltas) if deltas else ""))
    res.data["table"] = out
    res.data["columns"] = [list(c) for c in cols]


def c47_rings():
    lifts = golden.c47_lifts()
    reps = golden.c47_representatives()
    return {name: presentation(lifts[idx]) for name, idx in sorted(reps.items())}


def first_separating_modulus(R, S, moduli):
    for k in moduli:
        if iso_over_Zk(R, S, k).distinct:
            return k
    return None


@recipe("c47-rings")
def _c47_rings(res, cfg):
    rings = c47_rings()
    names = list(rings)
    dist = distinguish_all(list(rings.values()), cfg.moduli, cfg.iso_bound)
    res.check("four singleton classes", len(dist.classes) == 4 and not dist.unresolved,
              f"classes {dist.classes}")
    found = {}
    for pair, k in golden.load("c47")["separating_moduli"].items():
        a, b = pair.split("-")
        ok = iso_over_Zk(rings[a], rings[b], k).distinct
        first = first_separating_modulus(rings[a], rings[b], cfg.moduli)
        found[pair] = {"stated": k, "separates": ok, "least_in_ladder": first}
        res.check(f"{pair} separated at k={k}", ok, f"least separating modulus in the ladder: {first}")
    res.data["separating_moduli"] = found


def c58_rings():
    fib = _c58_fiber()
    sigma, _ = golden.c58_generators()
    return [presentation(o[0].canonical) for o in orbits(fib, [sigma])]


@recipe("c58-rings")
def _c58_rings(res, cfg):
    rings = c58_rings()
    dist = distinguish_all(rings, cfg.moduli, cfg.iso_bound)
    res.check("46 singleton classes", len(dist.classes) == 46, f"{len(dist.classes)} classes")
    res.check("no unresolved pairs", not dist.unresolved, f"{len(dist.unresolved)} unresolved")
    ladder = sorted({k for (test, k) in dist.moduli_used if k})
    res.data["separations"] = {f"{t}@{k}": c for (t, k), c in sorted(dist.moduli_used.items())}
    res.data["ladder_used"] = ladder


def c36_indecomposables(bound=8):
    P = dual_cyclic(3, 6)
    return [c for c in enumerate_integer(P, bound) if is_indecomposable_c3(c.canonical)]


@recipe("c36-list")
def _c36_list(res, cfg):
    bound = max(cfg.bound, 8)
    found = c36_indecomposables(bound)
    named = golden.c36_named(bound)
    keys = {name: canonical_form(lam).key for name, lam in named.items()}
    ok = set(keys.values()) == _keys(found) and len(set(keys.values())) == len(named)
    res.check(f"indecomposable classes at B={bound} equal the named list", ok,
              f"{len(found)} enumerated, {len(named)} named")
    P = dual_cyclic(3, 6)
    orb = orbits(found, automorphism_group(P))
    res.check("automorphism orbits", bound != 8 or len(orb) == golden.load("c36")["aut_orbits_within_8"],
              f"{len(orb)} orbits")
    sigma, tau = golden.c36_generators()
    inv = {v: k for k, v in keys.items()}
    bad = []
    d = golden.load("c36")
    for gen, edges in ((sigma, d["sigma_edges"]), (tau, d["tau_edges"])):
        for a, b in edges:
            pairs = [(a, b)]
            if a == "lambda_d":
                pairs = [(f"lambda_{x}", b.replace("{1-d}", str(1 - x)).replace("lambda_d", f"lambda_{x}"))
                         for x in range(-bound, bound + 1) if x <= -2 or x >= 3]
            for x, y in pairs:
                if x not in named or y not in named:
                    continue
                img = inv.get(canonical_form(permute_columns(named[x], gen)).key)
                if img != y:
                    bad.append((x, y, img))
    res.check("sigma and tau identifications", not bad, "diagram reproduced" if not bad else f"{bad}")
    res.data["orbits"] = [sorted(inv[c.key] for c in o) for o in orb]


def c36_decomposable_rings(bound=8):
    """One ring per automorphism orbit of decomposable classes on C^3(6)*."""
    P = dual_cyclic(3, 6)
    dec = [c for c in enumerate_integer(P, bound) if not is_indecomposable_c3(c.canonical)]
    return [presentation(o[0].canonical) for o in orbits(dec, automorphism_group(P))]


def separates(R, S, moduli):
    """True when the battery proves R and S non-isomorphic; an iso certificate otherwise."""
    k = first_separating_modulus(R, S, moduli)
    if k is not None:
        return True, f"mod {k}"
    v = iso_by_covariants(R, S)
    if v is not None and v.distinct:
        return True, v.test
    if v is not None and v.isomorphic:
        return False, f"isomorphism {v.certificate}"
    return False, "unresolved"


@recipe("c36-iso")
def _c36_iso(res, cfg):
    mats = golden.c36_ring_matrices()
    rings = {k: presentation(v) for k, v in mats.items()}
    M = golden.c36_certificate()
    res.check("A_1 -> A_2 certificate is a ring isomorphism", apply_iso_check(rings["A_1"], rings["A_2"], M))
    res.check("A_1 -> A_2 preserves w_2 and p_1", char_class_preserved(M, mats["A_1"], mats["A_2"]))
    ds = [f"A_{d}" for d in range(3, 9)]
    for a, b in combinations(ds, 2):
        ok, how = separates(rings[a], rings[b], cfg.moduli)
        res.check(f"{a} vs {b}", ok, how)
    for a in ("A_1", "A_2"):
        for b in ds:
            ok, how = separates(rings[a], rings[b], cfg.moduli)
            res.check(f"{a} vs {b}", ok, how)


@recipe("polygon-counts")
def _polygons(res, cfg):
    counts = {}
    for m in range(4, 10):
        found = classify_polygon_quasitoric(m, 3)
        want = (m - 1) // 2 if m % 2 else m // 2 + 1
        counts[m] = sorted(found)
        res.check(f"homeomorphism types over P_{m}", len(found) == want, f"{len(found)} types {sorted(found)}")
    for m in range(3, 10):
        sc = classify_polygon_small_cover(m)
        res.check(f"small covers over P_{m} decompose", all(k.startswith(("T2", "RP2")) for k in sc),
                  dict(sorted(sc.items())))
    res.data["quasitoric_types"] = counts


@recipe("c3-smallcovers")
def _c3_small(res, cfg):
    for m in range(4, 10):
        sc = classify_c3_small_cover(m)
        ok = bool(sc) and all(_c3_summands_ok(label, m) for label in sc)
        res.check(f"small covers over C^3({m})* decompose", ok, dict(sorted(sc.items())))


def _c3_summands_ok(label, m):
    # "RP3#a + RP1xRP2#b" with a + 2b = m - 3
    counts = {"RP3": 0, "RP1xRP2": 0}
    for part in label.split(" + "):
        name, _, k = part.partition("#")
        if name not in counts:
            return False
        counts[name] = int(k or 1)
    return counts["RP3"] + 2 * counts["RP1xRP2"] == m - 3


def betti_cases(bound):
    cases = [(simplex(n), enumerate_integer(simplex(n), bound)) for n in range(2, 6)]
    cases += [(polygon(m), enumerate_integer(polygon(m), min(bound, 3))) for m in range(3, 9)]
    cases.append((dual_cyclic(3, 6), enumerate_integer(dual_cyclic(3, 6), min(bound, 3))))
    for real in golden.c47_real():
        cases.append((real.polytope, fiber_over(real, bound)))
    for real in golden.c58_real():
        cases.append((real.polytope, fiber_over(real, bound)))
    return cases


@recipe("betti-hvector")
def _betti(res, cfg):
    for P, classes in betti_cases(cfg.bound):
        h = list(fh_vectors(P).h_vector)
        bad, torsion = 0, 0
        for c in classes:
            try:
                b = betti(presentation(c.canonical))
            except TorsionError:
                torsion += 1
                continue
            if list(b) != h:
                bad += 1
        res.check(f"{P.label}: betti = h = {tuple(h)}", bad == 0 and torsion == 0 and classes,
                  f"{len(classes)} classes, {bad} mismatches, {torsion} with torsion")


@recipe("lift-problem")
def _lift(res, cfg):
    for m in range(4, 10):
        P = dual_cyclic(3, m)
        reals = enumerate_real(P)
        bad = 0
        for c in reals:
            lam = lift_tilde(c.canonical)
            if not (is_characteristic(lam) and np.array_equal(lam.array % 2, c.canonical.array % 2)):
                bad += 1
        res.check(f"C^3({m})*: 0/1 lifts", bad == 0, f"{len(reals)} real classes, {bad} without lift")
    for n, m in ((4, 7), (5, 8)):
        reals = enumerate_real(dual_cyclic(n, m))
        sizes = [len(fiber_over(c.canonical, 2)) for c in reals]
        res.check(f"C^{n}({m})*: integer lifts", all(sizes), f"fiber sizes at B=2: {sizes}")


RECIPE_ORDER = tuple(RECIPES)
