"""Reference matrices, orbit diagrams and tables shipped with the package."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .charmat import identity_tail, make
from .polytope import FacetPermutation, dual_cyclic


@lru_cache(maxsize=None)
def load(name):
    text = resources.files("quasitoric").joinpath("data").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def _perm(images):
    return FacetPermutation(tuple(images))


# --- C^4(7)* -----------------------------------------------------------------

def c47_real():
    P = dual_cyclic(4, 7)
    return [make(P, a, real=True) for a in load("c47")["real"]]


def c47_lift(k):
    p, q, x, y, s, t, m, n = load("c47")["lifts"][str(k)]
    return identity_tail(dual_cyclic(4, 7), [[1, p, q], [x, y, 1], [1, s, t], [m, n, 1]])


def c47_lifts():
    return {int(k): c47_lift(k) for k in load("c47")["lifts"]}


def c47_generators():
    d = load("c47")
    return _perm(d["sigma"]), _perm(d["tau"])


def c47_representatives():
    """Name -> lift index of the four orbit representatives."""
    return dict(load("c47")["representatives"])


def table1():
    """(columns as exponent tuples, {name: row})."""
    d = load("c47")["table1"]
    return [tuple(c) for c in d["columns"]], {k: list(v) for k, v in d["rows"].items()}


# --- C^5(8)* -----------------------------------------------------------------

def c58_real():
    P = dual_cyclic(5, 8)
    return [make(P, a, real=True) for a in load("c58")["real"]]


def c58_lift(k, a, b, check=True):
    """(lambda_k; a, b): row (1,0,0,0,0,a,b,1) on top of 0 | lambda_k."""
    inner = c47_lift(k).array
    rows = [[1, 0, 0, 0, 0, a, b, 1]] + [[0] + list(r) for r in inner]
    return make(dual_cyclic(5, 8), rows, check=check)


def c58_generators():
    d = load("c58")
    return _perm(d["sigma"]), _perm(d["tau"])


def c58_orbits():
    return [[tuple(x) for x in orbit] for orbit in load("c58")["sigma_orbits"]]


# --- C^3(6)* -----------------------------------------------------------------

def c36_family(d):
    return identity_tail(dual_cyclic(3, 6), [[0, 0, 1], [1, 1, d], [1, 0, 1]])


def c36_named(bound=8):
    """Named indecomposable matrices, with lambda_d for d in [-bound, -2] and [3, bound]."""
    P = dual_cyclic(3, 6)
    out = {name: identity_tail(P, tail) for name, tail in load("c36")["named"].items()}
    for d in range(-bound, bound + 1):
        if d <= -2 or d >= 3:
            out[f"lambda_{d}"] = c36_family(d)
    return out


def c36_generators():
    d = load("c36")
    return _perm(d["sigma"]), _perm(d["tau"])


def c36_ring_matrices(ds=range(3, 9)):
    """A_1, A_2 and A_d as characteristic matrices."""
    d = load("c36")
    named = d["named"]
    P = dual_cyclic(3, 6)
    out = {k: identity_tail(P, named[v]) for k, v in d["ring_names"].items()}
    for x in ds:
        out[f"A_{x}"] = c36_family(x)
    return out


def c36_certificate():
    return [list(r) for r in load("c36")["iso_A1_A2"]]
