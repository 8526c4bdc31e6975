"""Power-series evaluations of ``1/det(1 + M)`` and relatives.

The central object is the *balanced* series

    R(M) = sum_J (-1)^|J| J! sum_alpha M^alpha / alpha!

where ``alpha`` runs over multi-index matrices with row sums and column
sums both equal to ``J``.  Grouping terms by total degree ``d = |J|`` gives
per-degree sums ``B_d(M)`` (the same sum without the sign), and
``R(M) = sum_d (-1)^d B_d(M)``.

``B_d`` can be formed two ways, selected by ``strategy``:

``"enumerate"``
    Walk every balanced ``alpha`` of each degree and add its term; exact
    rounding per degree via :func:`math.fsum`.
``"phase"``
    ``B_d`` is the constant term in ``z`` of the complete homogeneous
    polynomial ``h_d(y)``, ``y_r = (M z)_r / z_r``.  The Laurent exponents
    of ``h_d`` lie in ``[-d, d]``, so averaging over ``N + 1`` roots of unity
    per free variable extracts the constant term exactly (up to rounding).
    Costs ``O(k N^k)`` instead of the number of balanced matrices.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .matcore import GateStatus, as_matrix, frobenius_norm, gate, identity
from .multiindex import (
    MultiIndexMatrix,
    enumerate_balanced,
    enumerate_weak_compositions,
    monomial_value,
    term_weight,
)

__all__ = [
    "GateWarning",
    "RowSumPole",
    "NonUnitPhase",
    "DomainViolation",
    "Order",
    "SeriesReport",
    "CharpolySeries",
    "default_max_degree",
    "auto_degree",
    "balanced_degree_sums",
    "balanced_counts",
    "eval_series_R",
    "taylor_coefficient",
    "eval_series_S",
    "eval_S_closed",
    "conjugate_by_phase",
    "eval_tracelog",
    "charpoly_inverse_series",
]

CHARPOLY_MARGIN = 0.05


class GateWarning(RuntimeWarning):
    """Series evaluated outside the region where convergence is guaranteed."""


class RowSumPole(ZeroDivisionError):
    pass


class NonUnitPhase(ValueError):
    pass


class DomainViolation(ValueError):
    pass


class Order(NamedTuple):
    degree: int
    partial_sum: complex
    terms: int


@dataclass
class SeriesReport:
    method: str  # "BalancedR", "RelaxedS" or "TraceLog"
    orders: list
    final_value: complex
    truncation_degree: int
    gate: GateStatus
    strategy: str = ""

    def errors(self, target: complex) -> list:
        return [abs(o.partial_sum - target) for o in self.orders]

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "orders": [
                {"degree": o.degree, "re": o.partial_sum.real, "im": o.partial_sum.imag,
                 "terms": o.terms}
                for o in self.orders
            ],
            "final": {"re": self.final_value.real, "im": self.final_value.imag},
        }


@dataclass
class CharpolySeries:
    """Coefficients of ``1/det(M - lambda)`` as a series in ``1/lambda``.

    ``value = sum_j coefficients[j] * lambda ** (degree_offset - j)`` with
    ``degree_offset = -k`` and ``coefficients[j] = (-1)^k B_j(M)``.
    """

    coefficients: list
    degree_offset: int
    truncation: int

    def evaluate(self, lam: complex) -> complex:
        terms = [c * lam ** (self.degree_offset - j) for j, c in enumerate(self.coefficients)]
        return _csum(terms)


def _csum(values) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def default_max_degree(k: int) -> int:
    """Largest degree worth enumerating term by term for order ``k``."""
    return {1: 2000, 2: 60, 3: 16, 4: 10}.get(k, 6)


def auto_degree(m, tol: float = 1e-12) -> int:
    """Truncation degree ``N`` with ``(k ||M||)^N < tol``.

    Falls back to :func:`default_max_degree` when ``k ||M|| >= 1``.
    """
    m = as_matrix(m)
    k = m.shape[0]
    q = k * frobenius_norm(m)
    if q == 0.0:
        return 0
    if q >= 1.0:
        return default_max_degree(k)
    return max(0, math.ceil(math.log(tol) / math.log(q)))


def _phase_grid(k: int, n: int) -> np.ndarray:
    """Points ``(1, w^s_2, ..., w^s_k)`` for all ``s`` in ``range(n)^(k-1)``."""
    roots = np.exp(2j * np.pi * np.arange(n) / n)
    if k == 1:
        return np.ones((1, 1), dtype=np.complex128)
    grids = np.meshgrid(*([roots] * (k - 1)), indexing="ij")
    cols = [np.ones(grids[0].size, dtype=np.complex128)] + [g.ravel() for g in grids]
    return np.stack(cols, axis=1)


def _balanced_sums_phase(m: np.ndarray, max_degree: int) -> np.ndarray:
    k = m.shape[0]
    out = np.zeros(max_degree + 1, dtype=np.complex128)
    out[0] = 1.0
    if max_degree == 0:
        return out
    z = _phase_grid(k, max_degree + 1)
    y = np.ascontiguousarray(((z @ m.T) / z).T)
    prev = [np.ones(z.shape[0], dtype=np.complex128) for _ in range(k)]
    for d in range(1, max_degree + 1):
        acc = np.zeros(z.shape[0], dtype=np.complex128)
        for r in range(k):
            acc += y[r] * prev[r]
            prev[r] = acc.copy()
        out[d] = acc.mean()
    return out


@lru_cache(maxsize=256)
def _counts_phase(k: int, max_degree: int) -> tuple:
    # constant term of prod_{r != l} 1/(1 - t z_l/z_r), degree by degree;
    # the k diagonal factors 1/(1 - t) are applied afterwards as prefix sums
    offdiag = [1] + [0] * max_degree
    if max_degree > 0 and k > 1:
        z = _phase_grid(k, max_degree + 1)
        ratios = [z[:, l] / z[:, r] for r in range(k) for l in range(k) if l != r]
        prev = [np.ones(z.shape[0], dtype=np.complex128) for _ in ratios]
        for d in range(1, max_degree + 1):
            acc = np.zeros(z.shape[0], dtype=np.complex128)
            for i, v in enumerate(ratios):
                acc += v * prev[i]
                prev[i] = acc.copy()
            offdiag[d] = int(round(acc.mean().real))
    out = offdiag
    for _ in range(k):
        out = list(itertools.accumulate(out))
    return tuple(out)


def balanced_counts(k: int, max_degree: int) -> list:
    """Number of balanced k x k multi-index matrices of each total degree."""
    return list(_counts_phase(k, max_degree))


def _enumerate_degree(m: np.ndarray, d: int):
    k = m.shape[0]
    terms = []
    for margins in enumerate_weak_compositions(d, k):
        for alpha in enumerate_balanced(margins):
            w = term_weight(alpha)
            mono = monomial_value(m, alpha)
            if w.exact is not None:
                terms.append(w.exact * mono)
            else:
                terms.append(math.exp(w.log_coefficient) * mono)
    return _csum(terms), len(terms)


# auto enumerates term by term only while that stays around 0.1 s
_ENUM_LIMIT = {1: 2000, 2: 24, 3: 8, 4: 5}


def _resolve_strategy(strategy: str, k: int, max_degree: int) -> str:
    if strategy == "auto":
        return "enumerate" if max_degree <= _ENUM_LIMIT.get(k, 3) else "phase"
    if strategy not in ("enumerate", "phase"):
        raise ValueError(f"unknown strategy {strategy!r}")
    return strategy


def balanced_degree_sums(m, max_degree: int, strategy: str = "auto"):
    """``B_d(M)`` for ``d = 0..max_degree`` together with the number of terms in each.

    Returns ``(sums, counts, strategy_used)``.
    """
    m = as_matrix(m)
    if max_degree < 0:
        raise ValueError("max_degree must be non-negative")
    k = m.shape[0]
    strategy = _resolve_strategy(strategy, k, max_degree)
    if strategy == "enumerate":
        sums, counts = [], []
        for d in range(max_degree + 1):
            s, c = _enumerate_degree(m, d)
            sums.append(s)
            counts.append(c)
        return np.array(sums, dtype=np.complex128), counts, strategy
    return _balanced_sums_phase(m, max_degree), balanced_counts(k, max_degree), strategy


def _report(method, per_degree, counts, gate_status, strategy) -> SeriesReport:
    orders = []
    re_parts, im_parts = [], []
    for d, (v, c) in enumerate(zip(per_degree, counts)):
        re_parts.append(float(v.real))
        im_parts.append(float(v.imag))
        orders.append(Order(d, complex(math.fsum(re_parts), math.fsum(im_parts)), int(c)))
    return SeriesReport(method, orders, orders[-1].partial_sum, len(orders) - 1,
                        gate_status, strategy)


def _warn_gate(m: np.ndarray) -> GateStatus:
    g = gate(identity(m.shape[0]) + m)
    if not g.inside_closed:
        warnings.warn(
            f"||M|| = {g.norm_of_deviation:.6g} exceeds 1/k = {g.threshold:.6g}; "
            "the series may not converge",
            GateWarning,
            stacklevel=3,
        )
    return g


def eval_series_R(m, max_degree: int | None = None, strategy: str = "auto") -> SeriesReport:
    """Balanced series for ``1/det(1 + M)`` truncated after total degree ``max_degree``.

    Inputs outside ``||M|| <= 1/k`` are still evaluated (with a
    :class:`GateWarning`); divergence then shows in the partial sums.
    """
    m = as_matrix(m)
    g = _warn_gate(m)
    if max_degree is None:
        max_degree = auto_degree(m)
    sums, counts, used = balanced_degree_sums(m, max_degree, strategy)
    signed = [(-1) ** d * s for d, s in enumerate(sums)]
    return _report("BalancedR", signed, counts, g, used)


def taylor_coefficient(alpha: MultiIndexMatrix) -> int:
    """Mixed partial derivative of ``1/det(1 + M)`` at ``M = 0`` selected by ``alpha``.

    ``(-1)^|alpha| * prod_r |alpha_r|!`` if ``alpha`` is balanced, else ``0``.
    """
    if not alpha.balanced():
        return 0
    sign = -1 if alpha.total() % 2 else 1
    return sign * alpha.row_sums.factorial()


def eval_series_S(m, max_degree: int | None = None) -> SeriesReport:
    """Unconstrained (row-sum) series, truncated after total degree ``max_degree``.

    Degree ``d`` contributes ``h_d(-s_1, ..., -s_k)`` where ``s_r`` is the
    r-th row sum; ``terms`` counts the multi-index matrices it stands for.
    """
    m = as_matrix(m)
    k = m.shape[0]
    g = gate(identity(k) + m)
    if max_degree is None:
        max_degree = auto_degree(m)
    y = -m.sum(axis=1)
    prev = [1 + 0j] * k
    per_degree = [1 + 0j]
    for _ in range(max_degree):
        acc = 0j
        for r in range(k):
            acc = acc + y[r] * prev[r]
            prev[r] = acc
        per_degree.append(complex(acc))
    counts = [math.comb(d + k * k - 1, k * k - 1) for d in range(max_degree + 1)]
    return _report("RelaxedS", per_degree, counts, g, "rowsum")


def eval_S_closed(m) -> complex:
    """``prod_r 1 / (1 + sum_l m[r, l])``."""
    m = as_matrix(m)
    factors = 1 + m.sum(axis=1)
    if np.min(np.abs(factors)) < 1e-14:
        raise RowSumPole("1 + row sum vanishes for some row")
    out = 1 + 0j
    for f in factors:
        out /= complex(f)
    return out


def conjugate_by_phase(m, phases) -> np.ndarray:
    """``D^-1 M D`` for ``D = diag(phases)``: entry ``(r, l)`` becomes ``m[r, l] * z_l / z_r``."""
    m = as_matrix(m)
    z = np.asarray(phases, dtype=np.complex128)
    if z.shape != (m.shape[0],):
        raise ValueError(f"need {m.shape[0]} phases, got shape {z.shape}")
    if np.any(np.abs(np.abs(z) - 1) > 1e-12):
        raise NonUnitPhase("phases must have unit modulus")
    return m * z[np.newaxis, :] / z[:, np.newaxis]


def eval_tracelog(m, max_power: int = 60) -> SeriesReport:
    """``exp(sum_{j=1}^{max_power} (-1)^j tr(M^j) / j)``.

    Row ``j`` of the report holds the exponential of the first ``j``
    log-series terms; row 0 is the empty sum.
    """
    m = as_matrix(m)
    k = m.shape[0]
    g = gate(identity(k) + m)
    if frobenius_norm(m) >= 1.0:
        warnings.warn("||M|| >= 1: log series may diverge", GateWarning, stacklevel=2)
    logs = []
    orders = [Order(0, 1 + 0j, 0)]
    p = identity(k)
    for j in range(1, max_power + 1):
        p = p @ m
        logs.append((-1) ** j * complex(np.trace(p)) / j)
        orders.append(Order(j, complex(np.exp(_csum(logs))), 1))
    return SeriesReport("TraceLog", orders, orders[-1].partial_sum, max_power, g, "trace")


def _charpoly_degree(q: float, k: int, tol: float) -> int:
    # smallest N with sum_{d > N} C(d+k-1, k-1) q^d <= tol
    if q == 0.0:
        return 0
    terms = []
    d = 0
    while True:
        t = math.comb(d + k - 1, k - 1) * q**d
        terms.append(t)
        if d > 10 and t < tol * 1e-6 and terms[-1] < terms[-2]:
            break
        d += 1
    tail = 0.0
    for n in range(len(terms) - 1, -1, -1):
        if tail + terms[n] > tol:
            return n
        tail += terms[n]
    return 0


def charpoly_inverse_series(m, lam: complex, max_j: int | None = None,
                            strategy: str = "auto"):
    """``1/det(M - lam)`` from the balanced sums, as a series in ``1/lam``.

    Valid for ``|lam| >= (1 + 0.05) k ||M||``.  Since
    ``det(M - lam) = (-lam)^k det(1 - M/lam)``,

        1/det(M - lam) = sum_j (-1)^k B_j(M) lam^-(k+j).

    Without ``max_j`` the truncation is chosen so that the majorant
    ``sum_{j > N} C(j+k-1, k-1) (s/|lam|)^j``, with ``s`` the largest absolute
    row sum of ``M``, stays below ``1e-14``.

    Returns ``(value, CharpolySeries)``.
    """
    m = as_matrix(m)
    k = m.shape[0]
    lam = complex(lam)
    bound = k * frobenius_norm(m) * (1 + CHARPOLY_MARGIN)
    # the boundary itself is in the domain; allow for rounding in |lam|
    if lam == 0 or abs(lam) < bound * (1 - 1e-12):
        raise DomainViolation(f"|lambda| = {abs(lam):.6g} below required {bound:.6g}")
    if max_j is None:
        s = float(np.max(np.abs(m).sum(axis=1)))
        max_j = _charpoly_degree(s / abs(lam), k, 1e-14)
    # work with M/lam so that B_j stays O(1)
    sums, _, _ = balanced_degree_sums(m / lam, max_j, strategy)
    sign = (-1) ** k
    coeffs = [sign * complex(s) * lam**j for j, s in enumerate(sums)]
    value = sign * _csum(sums) / lam**k
    return value, CharpolySeries(coeffs, -k, max_j)
