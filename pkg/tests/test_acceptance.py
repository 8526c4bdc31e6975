"""Exit criteria.  Each test records one PASS/FAIL line, shown in the
terminal summary and printed under ``-s``."""
import itertools
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from invdet.contour import (
    ExpLinear,
    MonomialPower,
    One,
    cauchy_coefficient,
    eval_contour,
    eval_contour_f,
    homotopy_safety_check,
    lemma1_integral,
)
from invdet.matcore import frobenius_norm, identity, lu_det, schur_reduce_step
from invdet.multiindex import MultiIndexMatrix, enumerate_balanced
from invdet.oracles import all_multi_indices, balanced_counts_bruteforce, tail_ratio_ok
from invdet.realify import psi, real_det
from invdet.series import (
    charpoly_inverse_series,
    eval_S_closed,
    eval_series_R,
    eval_series_S,
    taylor_coefficient,
)

from conftest import ACCEPTANCE_LINES, gated_sample

pytestmark = pytest.mark.acceptance


def record(num, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {num:2d}. {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def crng(num):
    return np.random.default_rng([20240611, num])


def test_01_balanced_series():
    rng = crng(1)
    worst, t0 = 0.0, time.perf_counter()
    for i in range(500):
        k = 2 + i % 2
        a = gated_sample(rng, k)
        m = a - identity(k)
        n_deg = math.ceil(math.log(1e-12) / math.log(k * frobenius_norm(m)))
        val = eval_series_R(m, n_deg).final_value
        worst = max(worst, abs(val - 1 / lu_det(a)))
    secs = time.perf_counter() - t0
    record(1, "balanced series vs LU", worst <= 1e-9 and secs <= 60,
           f"500 matrices, max err {worst:.2e} (tol 1e-9), {secs:.1f}s (limit 60s)")


def test_02_torus_quadrature():
    rng = crng(2)
    worst, t0 = 0.0, time.perf_counter()
    for i in range(100):
        k = 2 + i % 2
        a = gated_sample(rng, k)
        worst = max(worst, abs(eval_contour(a, 64).value - 1 / lu_det(a)))
    secs = time.perf_counter() - t0
    record(2, "torus quadrature n=64 vs LU", worst <= 1e-12 and secs <= 120,
           f"100 matrices, max err {worst:.2e} (tol 1e-12), {secs:.1f}s (limit 120s)")


def test_03_holomorphic_weights():
    rng = crng(3)
    worst = 0.0
    for i in range(50):
        k = 2 + i % 2
        a = gated_sample(rng, k, 0.99)
        beta = tuple(int(b) for b in rng.integers(0, 3, k))
        c = tuple(rng.normal(size=k) + 1j * rng.normal(size=k))
        for f in (One(), MonomialPower(beta), ExpLinear(c)):
            val = eval_contour_f(a, f, 32).value
            worst = max(worst, abs(val - f.at_origin(k) / lu_det(a)))
    record(3, "f(0)/det(A) for One, MonomialPower, ExpLinear", worst <= 1e-10,
           f"50 matrices x 3 functions at n=32, max err {worst:.2e} (tol 1e-10)")


def test_04_single_circle():
    rng = crng(4)
    worst_first, worst_other = 0.0, 0.0
    for i in range(100):
        k = 2 + i % 3
        a = gated_sample(rng, k, 0.99)
        fixed = np.exp(2j * np.pi * rng.random(k - 1))
        worst_first = max(worst_first, abs(lemma1_integral(a, 0, fixed, 64) - 1 / a[0, 0]))
        for r in range(1, k):
            worst_other = max(worst_other, abs(lemma1_integral(a, r, fixed, 64)))
    ok = worst_first <= 1e-10 and worst_other <= 1e-10
    record(4, "single-circle integral", ok,
           f"100 matrices, row 1 err {worst_first:.2e}, rows >= 2 max {worst_other:.2e} (tol 1e-10)")


def test_05_derivatives():
    worst, worst_unbalanced, count = 0.0, 0.0, 0
    for d in range(4):
        for alpha in all_multi_indices(2, d):
            err = abs(cauchy_coefficient(alpha) - taylor_coefficient(alpha))
            worst = max(worst, err)
            if not alpha.balanced:
                worst_unbalanced = max(worst_unbalanced, err)
            count += 1
    ok = count == 35 and worst <= 1e-7 and worst_unbalanced <= 1e-8
    record(5, "Cauchy vs closed-form Taylor coefficients", ok,
           f"{count} indices, max err {worst:.2e} (tol 1e-7), unbalanced {worst_unbalanced:.2e} (tol 1e-8)")


def test_06_elimination_bound():
    rng = crng(6)
    violations, worst = 0, 0.0
    for i in range(1000):
        k = 2 + i % 4
        # closed gate: frac in (0, 1]
        a = gated_sample(rng, k, 1.0)
        pivot, b = schur_reduce_step(a)
        if frobenius_norm(b - identity(k - 1)) > 1 / (k - 1):
            violations += 1
        det_a = lu_det(a)
        worst = max(worst, abs(pivot * lu_det(b) - det_a) / (1 + abs(det_a)))
    ok = violations == 0 and worst <= 1e-10
    record(6, "one elimination step stays gated", ok,
           f"1000 matrices, {violations} violations, max scaled det err {worst:.2e} (tol 1e-10)")


def test_07_homotopy():
    rng = crng(7)
    slacks = []
    for i in range(100):
        k = 2 + i % 3
        slacks.append(homotopy_safety_check(gated_sample(rng, k, 0.99), 50, 200, seed=i).min_slack)
    lo = min(slacks)
    record(7, "homotopy slack", lo > 0, f"100 matrices, min slack {lo:.3e} (must be > 0)")


def test_08_realification():
    rng = crng(8)
    worst = 0.0
    for _ in range(500):
        k = int(rng.integers(1, 6))
        a = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
        d2 = abs(lu_det(a)) ** 2
        worst = max(worst, abs(real_det(psi(a)) - d2) / (1 + d2))
    record(8, "det psi(A) = |det A|^2", worst <= 1e-9,
           f"500 ungated matrices, max scaled err {worst:.2e} (tol 1e-9)")


def _row_sum_sample(rng, k):
    m = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    target = 0.9 * (1 - rng.random(k))
    rs = m.sum(axis=1)
    return m * (target / np.abs(rs))[:, None]


def test_09_relaxed_series():
    rng = crng(9)
    worst, slow = 0.0, 0
    for i in range(100):
        k = 1 + i % 3
        m = _row_sum_sample(rng, k)
        rmax = np.max(np.abs(m.sum(axis=1)))
        closed = eval_S_closed(m)
        rep = eval_series_S(m, 400)
        errs = rep.errors(closed)
        if not tail_ratio_ok(errs, (1 + rmax) / 2):
            slow += 1
        worst = max(worst, errs[-1])
    ok = slow == 0 and worst <= 1e-9
    record(9, "relaxed series vs row-sum product", ok,
           f"100 matrices, {slow} without geometric decay, err at order 400 {worst:.2e} (tol 1e-9)")


def test_10_charpoly():
    rng = crng(10)
    worst = 0.0
    for i in range(100):
        k = 2 + i % 3
        m = gated_sample(rng, k, 2.0) - identity(k)
        scale = 1.0 if i % 4 == 0 else 1 + 2 * rng.random()
        lam = 1.05 * k * frobenius_norm(m) * scale * np.exp(2j * np.pi * rng.random())
        val, _ = charpoly_inverse_series(m, lam)
        worst = max(worst, abs(val - 1 / lu_det(m - lam * identity(k))))
    record(10, "resolvent determinant series vs LU", worst <= 1e-9,
           f"100 cases, |lambda| >= 1.05 k ||M||, max err {worst:.2e} (tol 1e-9)")


def test_11_balanced_counts():
    mismatches, checked = 0, 0
    for k in (1, 2, 3):
        brute = balanced_counts_bruteforce(k, 3)
        for j in itertools.product(range(4), repeat=k):
            checked += 1
            if sum(1 for _ in enumerate_balanced(j)) != brute[j]:
                mismatches += 1
    record(11, "balanced enumeration vs brute force", mismatches == 0,
           f"{checked} margin vectors, {mismatches} mismatches")


def test_12_determinism(tmp_path):
    outs = []
    for run in range(2):
        path = tmp_path / f"verify{run}.json"
        subprocess.run([sys.executable, "-m", "invdet", "verify", "--seed", "17",
                        "--out", str(path)], check=True)
        outs.append(path.read_bytes())
    record(12, "verify report determinism", outs[0] == outs[1] and len(outs[0]) > 0,
           f"two runs, {len(outs[0])} bytes, identical={outs[0] == outs[1]}")
