"""Exact integer matrix helpers: determinants, inverses, Smith and Howell forms."""

from __future__ import annotations

from math import gcd

import numpy as np
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp


def exact_det(rows):
    """Bareiss fraction-free determinant over Python ints."""
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def batched_det(a):
    """Determinants of a stack of small integer matrices, shape (..., k, k).

    Cofactor expansion in int64; exact as long as entries stay small.
    """
    a = np.asarray(a, dtype=np.int64)
    k = a.shape[-1]
    if k == 0:
        return np.ones(a.shape[:-2], dtype=np.int64)
    if k == 1:
        return a[..., 0, 0].copy()
    if k == 2:
        return a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
    if k == 3:
        return (
            a[..., 0, 0] * (a[..., 1, 1] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 1])
            - a[..., 0, 1] * (a[..., 1, 0] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 0])
            + a[..., 0, 2] * (a[..., 1, 0] * a[..., 2, 1] - a[..., 1, 1] * a[..., 2, 0])
        )
    total = np.zeros(a.shape[:-2], dtype=np.int64)
    rest = a[..., 1:, :]
    for j in range(k):
        if not np.any(a[..., 0, j]):
            continue
        minor = np.delete(rest, j, axis=-1)
        term = a[..., 0, j] * batched_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def unimodular_inverse(m):
    """Inverse of an integer matrix with determinant +-1, as a numpy int array."""
    m = np.asarray(m, dtype=np.int64)
    n = m.shape[0]
    if n == 0:
        return m.copy()
    inv = np.rint(np.linalg.inv(m.astype(float))).astype(np.int64)
    if np.array_equal(m @ inv, np.eye(n, dtype=np.int64)):
        return inv
    exact = Matrix(m.tolist()).inv()
    out = np.array(exact.tolist(), dtype=object)
    if any(x.q != 1 for x in exact):
        raise ValueError("matrix is not unimodular")
    return out.astype(np.int64)


def inverse_mod(m, k):
    """Inverse of a square matrix over Z/k (raises if det is not a unit)."""
    m = np.asarray(m, dtype=np.int64) % k
    n = m.shape[0]
    d = exact_det(m.tolist()) % k
    if gcd(d, k) != 1:
        raise ValueError("matrix is not invertible mod %d" % k)
    adj = np.array(Matrix(m.tolist()).adjugate().tolist(), dtype=object)
    return (adj * pow(d, -1, k) % k).astype(np.int64).reshape(n, n)


def smith(rows):
    """Return (diagonal, S, T) with diag = S * A * T, all as Python-int lists."""
    a = Matrix(rows)
    if a.rows == 0 or a.cols == 0:
        return [], Matrix.eye(a.rows), Matrix.eye(a.cols)
    d, s, t = smith_normal_decomp(a, domain=ZZ)
    diag = [int(d[i, i]) for i in range(min(d.rows, d.cols)) if d[i, i] != 0]
    return diag, s, t


def _unit_normaliser(a, k):
    """Unit u mod k with u*a = gcd(a, k) mod k."""
    g = gcd(a, k)
    if g == 0:
        return 1
    kk = k // g
    u = pow(a // g, -1, kk) if kk > 1 else 1
    while gcd(u, k) != 1:
        u += kk
    return u % k


def howell_form(rows, k):
    """Howell normal form of the row span of ``rows`` over Z/k.

    Returns the list of nonzero rows; each has a leading entry dividing k and
    the span membership test ``howell_reduce(v) == 0`` is exact.
    """
    ncols = len(rows[0]) if rows else 0
    a = [[x % k for x in r] for r in rows]
    while len(a) < ncols:
        a.append([0] * ncols)
    r = 0
    for c in range(ncols):
        for i in range(r + 1, len(a)):
            if a[i][c] == 0:
                continue
            if a[r][c] == 0:
                a[r], a[i] = a[i], a[r]
                continue
            x, y = a[r][c], a[i][c]
            g, s, t = _xgcd(x, y)
            u, v = -y // g, x // g
            ra, rb = a[r], a[i]
            a[r] = [(s * p + t * q) % k for p, q in zip(ra, rb)]
            a[i] = [(u * p + v * q) % k for p, q in zip(ra, rb)]
        if a[r][c] == 0:
            continue
        unit = _unit_normaliser(a[r][c], k)
        a[r] = [(unit * p) % k for p in a[r]]
        piv = a[r][c]
        for i in range(r):
            q = a[i][c] // piv
            if q:
                a[i] = [(p - q * s_) % k for p, s_ in zip(a[i], a[r])]
        ann = [(k // piv) * p % k for p in a[r]]
        if any(ann):
            a.append(ann)
        r += 1
        if r >= len(a):
            break
    return [row for row in a[:r] if any(row)]


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def howell_reduce(howell, vec, k):
    """Reduce ``vec`` by a Howell basis; the result is zero iff vec is in the span."""
    v = [x % k for x in vec]
    for row in howell:
        c = next(i for i, x in enumerate(row) if x)
        if v[c] % row[c]:
            return v
        q = v[c] // row[c]
        if q:
            v = [(p - q * s) % k for p, s in zip(v, row)]
    return v


def gf2_rank(rows):
    """Rank over GF(2) of 0/1 integer rows."""
    vals = []
    for r in rows:
        x = 0
        for i, b in enumerate(r):
            if int(b) & 1:
                x |= 1 << i
        vals.append(x)
    rank = 0
    basis = {}
    for x in vals:
        while x:
            h = x.bit_length() - 1
            if h in basis:
                x ^= basis[h]
            else:
                basis[h] = x
                rank += 1
                break
    return rank


def integer_echelon(rows, ncols=None):
    """Row echelon form over Z with positive pivots, reduced above each pivot.

    Returns (rows, pivot_columns).  Spans the same lattice as the input.
    """
    a = [[int(x) for x in r] for r in rows]
    if ncols is None:
        ncols = len(a[0]) if a else 0
    r, pivots = 0, []
    for c in range(ncols):
        for i in range(r + 1, len(a)):
            if a[i][c] == 0:
                continue
            if a[r][c] == 0:
                a[r], a[i] = a[i], a[r]
                continue
            x, y = a[r][c], a[i][c]
            g, s, t = _xgcd(x, y)
            u, v = -y // g, x // g
            ra, rb = a[r], a[i]
            a[r] = [s * p + t * q for p, q in zip(ra, rb)]
            a[i] = [u * p + v * q for p, q in zip(ra, rb)]
        if r >= len(a) or a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-p for p in a[r]]
        piv = a[r][c]
        for i in range(r):
            q = a[i][c] // piv
            if q:
                a[i] = [p - q * s_ for p, s_ in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r >= len(a):
            break
    return a[:r], pivots
