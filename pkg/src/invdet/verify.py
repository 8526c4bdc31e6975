"""Seeded property suite behind ``invdet verify``.

Every check draws its own generator from ``(seed, check index)`` so the
report does not depend on which checks ran before, and the report carries
no timings: the same seed gives a byte-identical report.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import contour, matcore, multiindex, realify, series
from .matcore import frobenius_norm, identity, lu_det, random_gated
from .multiindex import MultiIndexMatrix
from .oracles import balanced_counts_bruteforce, cofactor_det, tail_ratio_ok


@dataclass
class CheckResult:
    name: str
    module: str
    passed: bool
    worst: float
    tolerance: float
    cases: int

    def to_dict(self):
        return {"name": self.name, "module": self.module, "passed": self.passed,
                "worst": self.worst, "tolerance": self.tolerance, "cases": self.cases}


def _gated(rng, k, frac_hi=0.9):
    return random_gated(rng, k, rng.uniform(0.05, frac_hi))


def _lu_vs_cofactor(rng, n):
    worst = 0.0
    for i in range(n):
        k = 1 + i % 4
        a = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        d = lu_det(a)
        worst = max(worst, abs(d - complex(cofactor_det(a.tolist()))) / (1 + abs(d)))
    return worst, 1e-10, n


def _multiplicativity(rng, n):
    worst = 0.0
    for i in range(n):
        k = 1 + i % 5
        a, b = _gated(rng, k), _gated(rng, k)
        p = lu_det(a) * lu_det(b)
        worst = max(worst, abs(lu_det(a @ b) - p) / (1 + abs(p)))
    return worst, 1e-9, n


def _schur_bound(rng, n):
    # worst slack ||B - 1|| - 1/(k-1); must stay <= 0
    worst = -math.inf
    for i in range(n):
        k = 2 + i % 4
        a = _gated(rng, k, 0.999)
        pivot, b = matcore.schur_reduce_step(a)
        worst = max(worst, frobenius_norm(b - identity(k - 1)) - 1 / (k - 1))
        d = lu_det(a)
        if abs(pivot * lu_det(b) - d) > 1e-10 * (1 + abs(d)):
            return math.inf, 0.0, n
    return worst, 0.0, n


def _gated_nonsingular(rng, n):
    worst = math.inf
    for i in range(n):
        worst = min(worst, abs(lu_det(_gated(rng, 1 + i % 5, 0.999))))
    # report the margin above the pivot floor as a non-positive "deviation"
    return -worst, -matcore.PIVOT_FLOOR, n


def _enumeration_bruteforce(rng, n):
    bad = 0
    cases = 0
    for k in (1, 2, 3):
        brute = balanced_counts_bruteforce(k, 3)
        for J in np.ndindex(*(4,) * k):
            cases += 1
            got = sum(1 for _ in multiindex.enumerate_balanced(J))
            bad += got != brute.get(tuple(J), 0)
    return float(bad), 0.0, cases


def _enumeration_consistent(rng, n):
    bad = 0
    cases = 0
    for _ in range(n):
        k = int(rng.integers(1, 4))
        J = rng.integers(0, 4, size=k)
        for alpha in multiindex.enumerate_balanced(J):
            cases += 1
            arr = alpha.to_array()
            ok = (alpha.balanced() and tuple(arr.sum(axis=1)) == tuple(J)
                  and tuple(arr.sum(axis=0)) == tuple(J))
            w = multiindex.term_weight(alpha)
            ok = ok and w.exact is not None and w.exact >= 1
            bad += not ok
    return float(bad), 0.0, cases


def _enumeration_symmetry(rng, n):
    bad = 0
    for _ in range(n):
        k = int(rng.integers(2, 4))
        J = rng.integers(0, 4, size=k)
        perm = rng.permutation(k)
        c1 = sum(1 for _ in multiindex.enumerate_balanced(J))
        c2 = sum(1 for _ in multiindex.enumerate_balanced(J[perm]))
        bad += c1 != c2
    return float(bad), 0.0, n


def _series_vs_lu(rng, n):
    worst = 0.0
    for i in range(n):
        k = 2 + i % 2
        a = _gated(rng, k)
        m = a - identity(k)
        r = series.eval_series_R(m, series.auto_degree(m))
        target = 1 / lu_det(a)
        worst = max(worst, abs(r.final_value - target))
        if not tail_ratio_ok(r.errors(target), k * frobenius_norm(m) + 0.1):
            return math.inf, 1e-9, n
    return worst, 1e-9, n


def _conjugation_invariance(rng, n):
    worst = 0.0
    for i in range(n):
        k = 2 + i % 2
        m = _gated(rng, k) - identity(k)
        z = np.exp(2j * np.pi * rng.random(k))
        v1 = series.eval_series_R(m, 8, "enumerate").final_value
        v2 = series.eval_series_R(series.conjugate_by_phase(m, z), 8, "enumerate").final_value
        worst = max(worst, abs(v1 - v2))
    return worst, 1e-12, n


def _relaxed_closed(rng, n):
    worst = 0.0
    for i in range(n):
        k = 1 + i % 3
        m = _gated(rng, k) - identity(k)
        closed = series.eval_S_closed(m)
        rep = series.eval_series_S(m, 200)
        worst = max(worst, abs(rep.final_value - closed))
        s = float(np.max(np.abs(m.sum(axis=1))))
        if not tail_ratio_ok(rep.errors(closed), s + 0.1):
            return math.inf, 1e-9, n
    return worst, 1e-9, n


def _coefficients(rng, n):
    worst = 0.0
    cases = 0
    for total in range(4):
        for flat in multiindex.enumerate_weak_compositions(total, 4):
            alpha = MultiIndexMatrix((flat[:2], flat[2:]))
            c = contour.cauchy_coefficient(alpha, 0.1, 16)
            worst = max(worst, abs(c - series.taylor_coefficient(alpha)))
            cases += 1
    return worst, 1e-7, cases


def _tracelog(rng, n):
    worst = 0.0
    for i in range(n):
        k = 2 + i % 2
        m = _gated(rng, k) - identity(k)
        t = series.eval_tracelog(m, 60).final_value
        r = series.eval_series_R(m, series.auto_degree(m)).final_value
        worst = max(worst, abs(t - r))
    return worst, 1e-8, n


def _charpoly(rng, n):
    worst = 0.0
    for i in range(n):
        k = 1 + i % 3
        m = (rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))) * rng.uniform(0.1, 2)
        lam = (series.CHARPOLY_MARGIN + 1) * k * frobenius_norm(m) * rng.uniform(1, 3)
        lam *= np.exp(2j * np.pi * rng.random())
        v, _ = series.charpoly_inverse_series(m, lam)
        worst = max(worst, abs(v - 1 / lu_det(m - lam * identity(k))))
    return worst, 1e-9, n


def _contour_vs_lu(rng, n):
    worst = 0.0
    for i in range(n):
        k = 1 + i % 3
        a = _gated(rng, k)
        worst = max(worst, abs(contour.eval_contour(a, 64).value - 1 / lu_det(a)))
    return worst, 1e-12, n


def _node_stability(rng, n):
    worst = 0.0
    for i in range(n):
        k = 1 + i % 3
        a = _gated(rng, k)
        worst = max(worst, abs(contour.eval_contour(a, 32).value
                               - contour.eval_contour(a, 64).value))
    return worst, 1e-12, n


def _lemma1_rows(rng, n):
    worst = 0.0
    for i in range(n):
        k = 2 + i % 3
        a = _gated(rng, k)
        fixed = np.exp(2j * np.pi * rng.random(k - 1))
        worst = max(worst, abs(contour.lemma1_integral(a, 0, fixed, 64) - 1 / a[0, 0]))
        for r in range(1, k):
            worst = max(worst, abs(contour.lemma1_integral(a, r, fixed, 64)))
    return worst, 1e-10, n


def _ordering(rng, n):
    worst = 0.0
    for i in range(n):
        k = 2 + i % 2
        a = _gated(rng, k)
        perm = rng.permutation(k)
        # relabelling the integration variables permutes rows and columns of A
        b = a[np.ix_(perm, perm)]
        worst = max(worst, abs(contour.eval_contour(a, 32).value
                               - contour.eval_contour(b, 32).value))
    return worst, 1e-12, n


def _linearity(rng, n):
    worst = 0.0
    for i in range(n):
        k = 2 + i % 2
        a = _gated(rng, k)
        c = tuple(rng.standard_normal(k) + 1j * rng.standard_normal(k))
        f, g = contour.ExpLinear(c), contour.Coordinate(0)
        fg = lambda z: f(z) + 2.5 * g(z)
        lhs = contour.eval_contour_f(a, fg, 32).value
        rhs = contour.eval_contour_f(a, f, 32).value + 2.5 * contour.eval_contour_f(a, g, 32).value
        worst = max(worst, abs(lhs - rhs))
    return worst, 1e-12, n


def _homotopy(rng, n):
    # report the negated minimum slack; passes when below zero
    worst = -math.inf
    for i in range(n):
        a = _gated(rng, 1 + i % 4, 0.999)
        rep = contour.homotopy_safety_check(a, 50, 200, seed=int(rng.integers(2**32)))
        worst = max(worst, -rep.min_slack)
    return worst, 0.0, n


def _psi_det(rng, n):
    worst = 0.0
    for i in range(n):
        k = 1 + i % 4
        a = (rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))) if i % 2 else _gated(rng, k)
        d = abs(lu_det(a)) ** 2
        worst = max(worst, abs(realify.real_det(realify.psi(a)) - d) / (1 + d))
    return worst, 1e-9, n


def _psi_morphism(rng, n):
    worst = 0.0
    for i in range(n):
        k = 1 + i % 4
        a, b = _gated(rng, k), _gated(rng, k)
        worst = max(worst, float(np.max(np.abs(realify.psi(a @ b)
                                               - realify.psi(a) @ realify.psi(b)))))
        worst = max(worst, abs(np.trace(realify.psi(a)) - 2 * np.trace(a).real))
    return worst, 1e-12, n


CHECKS = [
    ("lu_vs_cofactor", "matcore", _lu_vs_cofactor, 1.0),
    ("det_multiplicativity", "matcore", _multiplicativity, 1.0),
    ("schur_norm_contraction", "matcore", _schur_bound, 2.0),
    ("gated_nonsingular", "matcore", _gated_nonsingular, 1.0),
    ("balanced_vs_bruteforce", "multiindex", _enumeration_bruteforce, 0.0),
    ("balanced_margins_consistent", "multiindex", _enumeration_consistent, 0.5),
    ("balanced_count_symmetry", "multiindex", _enumeration_symmetry, 1.0),
    ("series_R_vs_lu", "series", _series_vs_lu, 1.0),
    ("series_R_conjugation_invariance", "series", _conjugation_invariance, 0.5),
    ("series_S_vs_closed_form", "series", _relaxed_closed, 1.0),
    ("taylor_vs_cauchy_coefficient", "series", _coefficients, 0.0),
    ("tracelog_vs_series_R", "series", _tracelog, 1.0),
    ("charpoly_vs_lu", "series", _charpoly, 1.0),
    ("contour_vs_lu", "contour", _contour_vs_lu, 0.5),
    ("contour_node_stability", "contour", _node_stability, 0.5),
    ("lemma1_rows", "contour", _lemma1_rows, 1.0),
    ("contour_variable_ordering", "contour", _ordering, 0.5),
    ("contour_f_linearity", "contour", _linearity, 0.5),
    ("homotopy_slack_positive", "contour", _homotopy, 1.0),
    ("psi_det_identity", "realify", _psi_det, 2.0),
    ("psi_morphism_and_trace", "realify", _psi_morphism, 1.0),
]


def run_suite(seed: int = 0, samples: int = 20) -> dict:
    """Run every check; ``samples`` scales the number of random cases per check."""
    results = []
    for i, (name, module, fn, scale) in enumerate(CHECKS):
        rng = np.random.default_rng([seed, i])
        n = max(1, int(round(samples * scale)))
        worst, tol, cases = fn(rng, n)
        results.append(CheckResult(name, module, bool(worst <= tol), float(worst), tol, cases))
    return {
        "seed": seed,
        "samples": samples,
        "passed": all(r.passed for r in results),
        "properties": [r.to_dict() for r in results],
    }
