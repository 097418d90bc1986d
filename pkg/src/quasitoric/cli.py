"""Command-line front end.

    quasitoric polytope N M
    quasitoric enumerate {real,int} N M [--bound B]
    quasitoric classify N M [--indecomposable] [--no-rings]
    quasitoric reproduce RECIPE[,RECIPE...]|all

Exit codes: 0 success, 1 a reproduced value differs from the reference,
2 usage error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import recipes
from .charmat import CharMatrixError, enumerate_integer, enumerate_real, fiber_over, orbits
from .cohomology import TorsionError, presentation
from .connectsum import is_indecomposable_c3
from .isomorphism import distinguish_all
from .polytope import PolytopeError, automorphism_group, dual_cyclic, fh_vectors

EXIT_OK, EXIT_DIFF, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- commands


def cmd_polytope(n, m, cfg):
    P = dual_cyclic(n, m)
    fd = fh_vectors(P)
    return {
        "polytope": P.to_dict(),
        "faces": {
            "missing_faces": [list(s) for s in fd.missing_faces],
            "f_vector": list(fd.f_vector),
            "h_vector": list(fd.h_vector),
        },
    }


def cmd_enumerate(kind, n, m, cfg):
    P = dual_cyclic(n, m)
    if kind == "real":
        classes = enumerate_real(P)
    else:
        classes = enumerate_integer(P, cfg.bound)
    return {
        "polytope": P.label,
        "kind": kind,
        "bound": cfg.bound if kind == "int" else None,
        "count": len(classes),
        "classes": [_class_dict(c) for c in classes],
    }


def _class_dict(c):
    return {"matrix": c.canonical.array.tolist(), "group": c.group_spec}


def integer_classes(P, bound):
    """All integer classes within the bound, gathered fiber by fiber over the real classes."""
    out = {}
    for real in enumerate_real(P):
        for c in fiber_over(real.canonical, bound):
            out[c.key] = c
    return [out[k] for k in sorted(out)]


def cmd_classify(n, m, cfg, indecomposable=False, rings=True):
    P = dual_cyclic(n, m)
    if indecomposable and n != 3:
        raise UsageError("--indecomposable applies to C^3(m)* only")
    classes = integer_classes(P, cfg.bound)
    if indecomposable:
        classes = [c for c in classes if is_indecomposable_c3(c.canonical)]
    orb = orbits(classes, automorphism_group(P))
    report = {
        "polytope": P.label,
        "bound": cfg.bound,
        "matrix_classes": len(classes),
        "equivariant_classes": len(orb),
        "orbits": [{"size": len(o), "representative": o[0].canonical.array.tolist()} for o in orb],
    }
    if rings:
        rs = [presentation(o[0].canonical) for o in orb]
        dist = distinguish_all(rs, cfg.moduli, cfg.iso_bound)
        report["ring_classes"] = dist.classes
        report["unresolved_pairs"] = [(p["i"], p["j"]) for p in dist.unresolved]
        report["separations"] = {f"{t}@{k}": c for (t, k), c in sorted(dist.moduli_used.items())}
    return report


def _run_recipe(args):
    name, cfg = args
    return recipes.run(name, cfg).to_dict()


def cmd_reproduce(name, cfg):
    names = list(recipes.RECIPE_ORDER) if name == "all" else [x.strip() for x in name.split(",") if x.strip()]
    for x in names:
        if x not in recipes.RECIPES:
            raise UsageError(f"unknown recipe {x!r}; choose from {', '.join(recipes.RECIPE_ORDER)} or all")
    work = [(x, cfg) for x in names]
    if cfg.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            results = list(pool.map(_run_recipe, work))
    else:
        results = [_run_recipe(w) for w in work]
    return {"results": results, "ok": all(r["ok"] for r in results)}


# ---------------------------------------------------------------- rendering


def _matrix_text(rows):
    return "[" + "; ".join(" ".join(str(x) for x in r) for r in rows) + "]"


def render(command, payload, fmt):
    if fmt == "json":
        return json.dumps(payload, indent=1, sort_keys=True) + "\n"
    if fmt == "csv":
        return _render_csv(command, payload)
    return _render_text(command, payload)


def _render_csv(command, p):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if command == "polytope":
        w.writerow(["vertex"])
        for v in p["polytope"]["vertices"]:
            w.writerow([" ".join(map(str, v))])
    elif command == "enumerate":
        w.writerow(["index", "group", "matrix"])
        for i, c in enumerate(p["classes"]):
            w.writerow([i, c["group"], json.dumps(c["matrix"], separators=(",", ":"))])
    elif command == "classify":
        ring_of = {}
        for r, members in enumerate(p.get("ring_classes", [])):
            for i in members:
                ring_of[i] = r
        w.writerow(["orbit", "size", "ring_class", "representative"])
        for i, o in enumerate(p["orbits"]):
            w.writerow([i, o["size"], ring_of.get(i, ""), json.dumps(o["representative"], separators=(",", ":"))])
    else:
        w.writerow(["recipe", "check", "ok", "detail"])
        for r in p["results"]:
            for c in r["checks"]:
                w.writerow([r["recipe"], c["name"], "PASS" if c["ok"] else "FAIL", c["detail"]])
    return buf.getvalue()


def _render_text(command, p):
    lines = []
    if command == "polytope":
        P, fd = p["polytope"], p["faces"]
        lines.append(f"{P['label']}: n={P['n']} m={P['m']}, {len(P['vertices'])} vertices")
        lines.append(f"f = {tuple(fd['f_vector'])}")
        lines.append(f"h = {tuple(fd['h_vector'])}")
        lines.append("vertices: " + " ".join("{" + ",".join(map(str, v)) + "}" for v in P["vertices"]))
        lines.append("missing faces: " + " ".join("{" + ",".join(map(str, s)) + "}" for s in fd["missing_faces"]))
    elif command == "enumerate":
        extra = f" (entries within {p['bound']})" if p["bound"] else ""
        lines.append(f"{p['polytope']}: {p['count']} {p['kind']} classes{extra}")
        for i, c in enumerate(p["classes"]):
            lines.append(f"{i:4d} {_matrix_text(c['matrix'])}")
    elif command == "classify":
        lines.append(f"{p['polytope']}: {p['matrix_classes']} matrix classes, "
                     f"{p['equivariant_classes']} up to automorphisms")
        for i, o in enumerate(p["orbits"]):
            lines.append(f"{i:4d} size {o['size']:3d} {_matrix_text(o['representative'])}")
        if "ring_classes" in p:
            distinct = len(p["ring_classes"])
            lines.append(f"rings: {distinct} isomorphism classes, {len(p['unresolved_pairs'])} unresolved pairs")
            for r in p["ring_classes"]:
                if len(r) > 1:
                    lines.append(f"  isomorphic rings: {r}")
            for k, v in p["separations"].items():
                lines.append(f"  separated by {k}: {v} pairs")
    else:
        for r in p["results"]:
            for c in r["checks"]:
                mark = "PASS" if c["ok"] else "FAIL"
                lines.append(f"{mark} {r['recipe']}: {c['name']} ({c['detail']})")
        failed = [r["recipe"] for r in p["results"] if not r["ok"]]
        lines.append("all assertions pass" if not failed else "differences in: " + ", ".join(failed))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- entry point


def _moduli(text):
    try:
        vals = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError("moduli must be comma-separated integers")
    if not vals or any(k < 2 for k in vals):
        raise argparse.ArgumentTypeError("moduli must be integers >= 2")
    return vals


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bound", type=_positive, default=6, help="entry bound B for integer enumeration")
    common.add_argument("--iso-bound", type=_positive, default=10, help="entry bound for integer iso certificates")
    common.add_argument("--moduli", type=_moduli, default=recipes.DEFAULT_LADDER, help="modulus ladder, e.g. 2,3,4")
    common.add_argument("--jobs", type=_positive, default=1)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--output", help="write here instead of stdout")

    ap = argparse.ArgumentParser(prog="quasitoric", description="Quasitoric manifolds and small covers over dual cyclic polytopes.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("polytope", parents=[common], help="vertices, f- and h-vector of C^n(m)*")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p = sub.add_parser("enumerate", parents=[common], help="characteristic matrices up to equivalence")
    p.add_argument("kind", choices=("real", "int"))
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p = sub.add_parser("classify", parents=[common], help="classes up to automorphisms and ring isomorphism")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--indecomposable", action="store_true")
    p.add_argument("--no-rings", action="store_true")
    p = sub.add_parser("reproduce", parents=[common], help="rerun a reference result and diff it")
    p.add_argument("recipe", help="all, or a comma-separated list of: " + ", ".join(recipes.RECIPE_ORDER))
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    cfg = recipes.RunConfig(args.bound, args.iso_bound, args.moduli, args.jobs)
    try:
        if args.command == "polytope":
            payload = cmd_polytope(args.n, args.m, cfg)
        elif args.command == "enumerate":
            payload = cmd_enumerate(args.kind, args.n, args.m, cfg)
        elif args.command == "classify":
            payload = cmd_classify(args.n, args.m, cfg, args.indecomposable, not args.no_rings)
        else:
            payload = cmd_reproduce(args.recipe, cfg)
    except (UsageError, PolytopeError, CharMatrixError) as e:
        print(f"quasitoric: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (TorsionError, AssertionError, ArithmeticError) as e:
        print(f"quasitoric: internal invariant violated: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    text = render(args.command, payload, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "reproduce" and not payload["ok"]:
        return EXIT_DIFF
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
