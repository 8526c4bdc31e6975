"""Brute-force reference computations.

Deliberately naive and independent of the production paths; only the
verification suite and the tests call into here.
"""
from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction

import numpy as np

from .multiindex import MultiIndexMatrix, enumerate_weak_compositions


def cofactor_det(a):
    """Laplace expansion along the first row.  Works on any ring of scalars."""
    rows = [list(r) for r in a]
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = 0
    for c in range(n):
        if rows[0][c] == 0:
            continue
        minor = [r[:c] + r[c + 1:] for r in rows[1:]]
        term = rows[0][c] * cofactor_det(minor)
        total = total - term if c % 2 else total + term
    return total


def exact_det(a) -> Fraction:
    """Cofactor determinant of a real matrix in exact rational arithmetic."""
    return cofactor_det([[Fraction(float(x)) for x in row] for row in np.asarray(a).real])


def balanced_counts_bruteforce(k: int, max_margin: int) -> Counter:
    """Count, for each margin vector ``J`` with ``max(J) <= max_margin``, the
    k x k matrices with entries in ``0..max_margin`` whose row and column
    sums both equal ``J``.  Exhaustive over ``(max_margin + 1)^(k^2)`` matrices.
    """
    vals = np.arange(max_margin + 1)
    grid = np.array(list(itertools.product(vals, repeat=k * k)), dtype=np.int64)
    mats = grid.reshape(-1, k, k)
    rs = mats.sum(axis=2)
    cs = mats.sum(axis=1)
    ok = np.all(rs == cs, axis=1) & np.all(rs <= max_margin, axis=1)
    return Counter(tuple(int(x) for x in row) for row in rs[ok])


def all_multi_indices(k: int, total: int):
    """Every k x k multi-index matrix with entry sum ``total``."""
    for flat in enumerate_weak_compositions(total, k * k):
        yield MultiIndexMatrix(tuple(tuple(flat[r * k:(r + 1) * k]) for r in range(k)))


def relaxed_series_explicit(m, max_degree: int) -> complex:
    """Unconstrained multi-index sum, term by term (no balance condition)."""
    m = np.asarray(m, dtype=np.complex128)
    k = m.shape[0]
    total = 0j
    for d in range(max_degree + 1):
        for alpha in all_multi_indices(k, d):
            j = alpha.row_sums
            coeff = Fraction(j.factorial(), alpha.factorial())
            mono = 1 + 0j
            for r in range(k):
                for l in range(k):
                    mono *= m[r, l] ** alpha.entries[r][l]
            total += (-1) ** d * float(coeff) * mono
    return total


def scalar_geometric(x: complex, n: int) -> complex:
    """``sum_{j=0}^{n} (-x)^j`` summed directly."""
    return sum((-x) ** j for j in range(n + 1))


def tail_ratio_ok(errors, bound: float, floor: float = 1e-13) -> bool:
    """Geometric decay check on an error sequence.

    Uses the running envelope ``env(d) = max_{d' >= d} err(d')`` so that a
    partial sum passing close to the target does not produce a spurious
    ratio, and requires ``env(d2) <= env(d1) * bound^(d2 - d1)`` from the
    midpoint of the range above ``floor`` to its end.
    """
    env = list(itertools.accumulate(reversed(list(errors)), max))[::-1]
    idx = [d for d, e in enumerate(env) if e > floor]
    if len(idx) < 4:
        return True
    d1, d2 = idx[len(idx) // 2], idx[-1]
    return env[d2] <= env[d1] * bound ** (d2 - d1)
