"""Multi-indices and multi-index matrices.

A multi-index matrix ``alpha`` assigns one non-negative exponent to each
entry of a k x k matrix.  It is *balanced* when its r-th row sum equals its
r-th column sum for every r; only balanced matrices carry nonzero Taylor
coefficients of ``1/det(1 + M)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "MultiIndex",
    "MultiIndexMatrix",
    "TermWeight",
    "enumerate_weak_compositions",
    "enumerate_margins",
    "enumerate_balanced",
    "multinomial",
    "term_weight",
    "monomial_value",
]

# Largest multinomial kept on the exact path; beyond it only logs are reported.
_EXACT_LIMIT = 2**64 - 1


class MultiIndex(tuple):
    """Tuple of non-negative integers ``(j_1, ..., j_k)``."""

    def __new__(cls, components=()):
        comps = tuple(int(c) for c in components)
        if any(c < 0 for c in comps):
            raise ValueError(f"negative component in {comps}")
        return super().__new__(cls, comps)

    def total(self) -> int:
        return sum(self)

    def factorial(self) -> int:
        return math.prod(math.factorial(c) for c in self)

    def log_factorial(self) -> float:
        return math.fsum(math.lgamma(c + 1) for c in self)


@dataclass(frozen=True)
class MultiIndexMatrix:
    entries: tuple  # tuple of k row tuples

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.entries)
        k = len(rows)
        if k < 1 or any(len(row) != k for row in rows):
            raise ValueError("multi-index matrix must be square and non-empty")
        if any(x < 0 for row in rows for x in row):
            raise ValueError("multi-index matrix entries must be non-negative")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def zeros(cls, k: int) -> "MultiIndexMatrix":
        return cls(((0,) * k,) * k)

    @property
    def k(self) -> int:
        return len(self.entries)

    @cached_property
    def row_sums(self) -> MultiIndex:
        return MultiIndex(sum(row) for row in self.entries)

    @cached_property
    def col_sums(self) -> MultiIndex:
        return MultiIndex(sum(col) for col in zip(*self.entries))

    def balanced(self) -> bool:
        return self.row_sums == self.col_sums

    def total(self) -> int:
        return self.row_sums.total()

    def factorial(self) -> int:
        """``alpha!``: product of the factorials of all entries."""
        return math.prod(math.factorial(x) for row in self.entries for x in row)

    def to_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    def __str__(self):
        return str([list(row) for row in self.entries])


@dataclass(frozen=True)
class TermWeight:
    """Sign and multinomial weight ``J!/alpha!`` of one term of the series.

    ``coefficient`` is ``None`` when the exact integer exceeds 64 bits; the
    weight is then only available as ``log_coefficient``.
    """

    sign: int
    coefficient: float | None
    log_coefficient: float
    exact: int | None = None


def enumerate_weak_compositions(j: int, k: int, caps: Sequence[int] | None = None
                                ) -> Iterator[MultiIndex]:
    """Yield every length-``k`` vector of non-negative integers summing to ``j``.

    Order is lexicographically descending, so ``(j, 0, ..., 0)`` comes first.
    With ``caps``, component ``i`` is additionally bounded by ``caps[i]``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if j < 0:
        return
    if caps is None:
        caps = (j,) * k
    # suffix capacity, used to prune branches that cannot reach j
    room = [0] * (k + 1)
    for i in range(k - 1, -1, -1):
        room[i] = room[i + 1] + min(caps[i], j)
    buf = [0] * k

    def rec(i, left):
        if i == k - 1:
            if left <= caps[i]:
                buf[i] = left
                yield MultiIndex(buf)
            return
        hi = min(left, caps[i])
        lo = max(0, left - room[i + 1])
        for v in range(hi, lo - 1, -1):
            buf[i] = v
            yield from rec(i + 1, left - v)

    if room[0] >= j:
        yield from rec(0, j)


def enumerate_margins(max_degree: int, k: int) -> Iterator[MultiIndex]:
    """All margin vectors ``J`` with ``|J| <= max_degree``: by total, then lexicographically."""
    for d in range(max_degree + 1):
        yield from enumerate_weak_compositions(d, k)


def enumerate_balanced(j_margins: Sequence[int]) -> Iterator[MultiIndexMatrix]:
    """Yield every non-negative integer matrix whose row sums and column sums both equal ``J``.

    Rows are filled top to bottom, each row being a weak composition of its
    margin capped by what is left in every column; the last row is forced.
    """
    margins = MultiIndex(j_margins)
    k = len(margins)
    if k == 0:
        raise ValueError("margins must be non-empty")
    rows: list = [None] * k

    def rec(r, col_left):
        if r == k - 1:
            rows[r] = tuple(col_left)
            yield MultiIndexMatrix(tuple(rows))
            return
        for comp in enumerate_weak_compositions(margins[r], k, col_left):
            rows[r] = comp
            yield from rec(r + 1, [c - x for c, x in zip(col_left, comp)])

    yield from rec(0, list(margins))


def multinomial(parts: Sequence[int]) -> int:
    """``(sum parts)! / prod(parts!)`` as an exact integer."""
    out, acc = 1, 0
    for p in parts:
        acc += p
        out *= math.comb(acc, p)
    return out


def term_weight(alpha: MultiIndexMatrix) -> TermWeight:
    """Weight of ``alpha`` in the balanced series, with ``J`` its row sums.

    Applies to unbalanced ``alpha`` as well: the result is then the weight
    the term would carry in the unconstrained row-sum series.
    """
    rows = alpha.entries
    sign = -1 if alpha.total() % 2 else 1
    log_c = math.fsum(
        math.lgamma(sum(row) + 1) - math.fsum(math.lgamma(x + 1) for x in row)
        for row in rows
    )
    exact = 1
    for row in rows:
        exact *= multinomial(row)
        if exact > _EXACT_LIMIT:
            return TermWeight(sign, None, log_c)
    return TermWeight(sign, float(exact), log_c, exact)


def monomial_value(m, alpha: MultiIndexMatrix) -> complex:
    """``prod m[r, l] ** alpha[r, l]`` with the convention ``0**0 == 1``."""
    m = np.asarray(m, dtype=np.complex128)
    if m.shape != (alpha.k, alpha.k):
        raise ValueError(f"matrix shape {m.shape} does not match alpha of order {alpha.k}")
    out = 1 + 0j
    for r, row in enumerate(alpha.entries):
        for l, e in enumerate(row):
            if e:
                out *= complex(m[r, l]) ** e
    return out
