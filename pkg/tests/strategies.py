"""Shared hypothesis strategies."""

import numpy as np
from hypothesis import strategies as st


def unimodular(max_n=4):
    """Products of elementary integer row operations and sign flips."""
    op = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(-3, 3), st.booleans())

    def build(args):
        n, ops = args
        a = np.eye(n, dtype=np.int64)
        for i, j, c, flip in ops:
            i, j = i % n, j % n
            if i != j:
                a[i] += c * a[j]
            if flip:
                a[i] = -a[i]
        return a.tolist()

    return st.tuples(st.integers(1, max_n), st.lists(op, max_size=12)).map(build)


def signs(n):
    return st.lists(st.sampled_from([1, -1]), min_size=n, max_size=n)
