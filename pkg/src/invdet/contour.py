"""Trapezoidal quadrature on the polytorus ``|z_1| = ... = |z_k| = 1``.

With ``w = A z`` and ``dz_r = i z_r dtheta_r`` the normalised integral

    (2 pi i)^-k  oint f(z) / (w_1 ... w_k) dz_1 ... dz_k

becomes the plain angular average of ``f(z) prod_r z_r / w_r``, which the
equally spaced rule integrates with exponential accuracy whenever ``A`` is
gated (no ``w_r`` comes near zero).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .matcore import as_matrix, gate
from .multiindex import MultiIndexMatrix

__all__ = [
    "GateViolation",
    "NearPole",
    "CostGuard",
    "TorusRule",
    "QuadResult",
    "HomotopyReport",
    "One",
    "Coordinate",
    "MonomialPower",
    "ExpLinear",
    "Polynomial",
    "eval_contour",
    "eval_contour_f",
    "lemma1_integral",
    "homotopy_safety_check",
    "cauchy_coefficient",
]

NEAR_POLE = 1e-8
DEFAULT_BUDGET = 10**8
_BLOCK = 1 << 16


class GateViolation(ValueError):
    """``||A - 1|| < 1/k`` does not hold."""


class NearPole(ArithmeticError):
    """Some ``w_r`` came within ``1e-8`` of zero at a quadrature node."""


class CostGuard(RuntimeError):
    """Requested quadrature exceeds the evaluation budget."""


@dataclass(frozen=True)
class TorusRule:
    dims: int
    nodes_per_dim: int

    def __post_init__(self):
        if self.dims < 1 or self.nodes_per_dim < 1:
            raise ValueError("dims and nodes_per_dim must be positive")

    @property
    def size(self) -> int:
        return self.nodes_per_dim**self.dims

    @property
    def angles(self) -> np.ndarray:
        n = self.nodes_per_dim
        return 2 * np.pi * np.arange(n) / n

    @property
    def roots(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    def node(self, index: Sequence[int]) -> np.ndarray:
        return self.roots[np.asarray(index)]

    def blocks(self, block: int = _BLOCK):
        """Yield ``(indices, z)`` covering all nodes in row-major order.

        ``indices`` has shape ``(b, dims)``; ``z`` holds the matching points.
        """
        roots = self.roots
        shape = (self.nodes_per_dim,) * self.dims
        for start in range(0, self.size, block):
            flat = np.arange(start, min(start + block, self.size))
            idx = np.stack(np.unravel_index(flat, shape), axis=1)
            yield idx, roots[idx]


@dataclass
class QuadResult:
    value: complex
    nodes_per_dim: int
    evaluations: int
    refinement_delta: float | None = None

    def to_dict(self) -> dict:
        return {
            "value": {"re": self.value.real, "im": self.value.imag},
            "n": self.nodes_per_dim,
            "evaluations": self.evaluations,
            "refinement_delta": self.refinement_delta,
        }


# -- holomorphic test functions -------------------------------------------
# Each takes points of shape (b, k) and returns b values.

@dataclass(frozen=True)
class One:
    def __call__(self, z):
        return np.ones(z.shape[0], dtype=np.complex128)

    def at_origin(self, k):
        return 1 + 0j


@dataclass(frozen=True)
class Coordinate:
    index: int  # 0-based

    def __call__(self, z):
        return z[:, self.index].astype(np.complex128)

    def at_origin(self, k):
        return 0j


@dataclass(frozen=True)
class MonomialPower:
    beta: tuple

    def __call__(self, z):
        return np.prod(z ** np.asarray(self.beta), axis=1)

    def at_origin(self, k):
        return 1 + 0j if not any(self.beta) else 0j


@dataclass(frozen=True)
class ExpLinear:
    """``exp(c . z)``."""

    c: tuple

    def __call__(self, z):
        return np.exp(z @ np.asarray(self.c, dtype=np.complex128))

    def at_origin(self, k):
        return 1 + 0j


@dataclass(frozen=True)
class Polynomial:
    """``sum_beta coeffs[beta] z^beta``."""

    coeffs: Mapping

    def __call__(self, z):
        out = np.zeros(z.shape[0], dtype=np.complex128)
        for beta, c in self.coeffs.items():
            out += c * np.prod(z ** np.asarray(beta), axis=1)
        return out

    def at_origin(self, k):
        return complex(self.coeffs.get((0,) * k, 0))


# -- quadratures -----------------------------------------------------------

def _require_gate(a):
    g = gate(a)
    if not g.inside_strict:
        raise GateViolation(
            f"||A - 1|| = {g.norm_of_deviation:.6g} is not below 1/k = {g.threshold:.6g}")
    return g


def _check_budget(evals, budget):
    if budget is not None and evals > budget:
        raise CostGuard(f"{evals} evaluations exceed the budget of {budget}")


def eval_contour_f(a, f: Callable, n: int = 32, budget: int | None = DEFAULT_BUDGET
                   ) -> QuadResult:
    """Approximate ``f(0)/det(A)`` by the ``n``-point-per-dimension torus rule.

    For even ``n`` the rule on the even-indexed sub-grid (``n/2`` points per
    dimension) is accumulated alongside, giving ``refinement_delta``.
    Block sums are combined with :func:`math.fsum`, so results are
    reproducible bit for bit.
    """
    a = as_matrix(a)
    _require_gate(a)
    k = a.shape[0]
    rule = TorusRule(k, n)
    _check_budget(rule.size, budget)
    half = n % 2 == 0
    diag = np.diag(a)
    off = a - np.diag(diag)
    parts, half_parts = [], []
    for idx, z in rule.blocks():
        # w_r / z_r = a_rr + sum_{l != r} a_rl z_l / z_r; |w_r| = |w_r / z_r| on the torus
        ratio = diag + (z @ off.T) / z
        if np.min(np.abs(ratio)) < NEAR_POLE:
            raise NearPole("w_r vanishes on the torus; input is not gated")
        vals = f(z) / np.prod(ratio, axis=1)
        parts.append(complex(vals.sum()))
        if half:
            half_parts.append(complex(vals[np.all(idx % 2 == 0, axis=1)].sum()))
    value = complex(math.fsum(p.real for p in parts), math.fsum(p.imag for p in parts))
    value /= rule.size
    delta = None
    if half:
        hv = complex(math.fsum(p.real for p in half_parts),
                     math.fsum(p.imag for p in half_parts)) / (n // 2) ** k
        delta = abs(value - hv)
    return QuadResult(value, n, rule.size, delta)


def eval_contour(a, n: int = 32, budget: int | None = DEFAULT_BUDGET) -> QuadResult:
    """``1/det(A)`` as a torus integral; see :func:`eval_contour_f`."""
    return eval_contour_f(a, One(), n, budget)


def lemma1_integral(a, row: int, fixed_z, n: int = 64) -> complex:
    """``(2 pi i)^-1 oint dz_1 / w_row`` over ``|z_1| = 1`` with ``z_2..z_k`` held at ``fixed_z``.

    ``row`` is 0-based.  For gated ``A`` the exact value is ``1/a[0, 0]`` for
    row 0 and ``0`` otherwise.
    """
    a = as_matrix(a)
    _require_gate(a)
    k = a.shape[0]
    if not 0 <= row < k:
        raise IndexError(f"row {row} out of range for k = {k}")
    fixed = np.asarray(fixed_z, dtype=np.complex128).reshape(-1)
    if fixed.shape != (k - 1,):
        raise ValueError(f"need {k - 1} fixed coordinates")
    if np.any(np.abs(np.abs(fixed) - 1) > 1e-12):
        raise ValueError("fixed coordinates must lie on the unit circle")
    z1 = np.exp(2j * np.pi * np.arange(n) / n)
    w = a[row, 0] * z1 + a[row, 1:] @ fixed
    vals = z1 / w
    return complex(math.fsum(vals.real), math.fsum(vals.imag)) / n


@dataclass
class HomotopyReport:
    """Slack ``|w_r(t)| - (1 - t)`` along ``A(t) = 1 + t (A - 1)``.

    ``min_slack`` is taken over ``t > 0``; at ``t = 0`` the slack is zero by
    construction and ``boundary_deviation`` records how far rounding moved it.
    """

    min_slack: float
    argmin_t: float
    boundary_deviation: float
    t_samples: int
    z_samples: int

    @property
    def certified(self) -> bool:
        return self.min_slack > 0

    def to_dict(self) -> dict:
        return {
            "min_slack": self.min_slack,
            "argmin_t": self.argmin_t,
            "boundary_deviation": self.boundary_deviation,
            "t_samples": self.t_samples,
            "z_samples": self.z_samples,
            "certified": self.certified,
        }


def homotopy_safety_check(a, t_samples: int = 50, z_samples: int = 200, seed: int = 0
                          ) -> HomotopyReport:
    a = as_matrix(a)
    _require_gate(a)
    if t_samples < 2 or z_samples < 1:
        raise ValueError("need at least two t values and one torus point")
    k = a.shape[0]
    rng = np.random.default_rng(seed)
    z = np.exp(2j * np.pi * rng.random((z_samples, k)))
    dev = a - np.eye(k)
    ts = np.linspace(0.0, 1.0, t_samples)
    base = z @ dev.T  # w(t) = z + t * base
    slack = np.abs(z[None] + ts[:, None, None] * base[None]) - (1 - ts)[:, None, None]
    per_t = slack.reshape(t_samples, -1).min(axis=1)
    i = 1 + int(np.argmin(per_t[1:]))
    return HomotopyReport(float(per_t[i]), float(ts[i]), float(np.max(np.abs(slack[0]))),
                          t_samples, z_samples)


def cauchy_coefficient(alpha: MultiIndexMatrix, radius: float = 0.1, n: int = 16,
                       budget: int = 10**7) -> complex:
    """``d^alpha [1/det(1 + M)]`` at ``M = 0`` by the Cauchy integral in all ``k^2`` entries.

    Each entry runs over ``n`` equally spaced points of ``|m| = radius``;
    the result is ``alpha!`` times the extracted Taylor coefficient.
    Determinants on the grid come from ``numpy.linalg.det``.
    """
    k = alpha.k
    if not 0 < radius <= 0.9 / k**2:
        raise ValueError(f"radius must lie in (0, {0.9 / k**2:.4g}]")
    nv = k * k
    rule = TorusRule(nv, n)
    _check_budget(rule.size, budget)
    expo = alpha.to_array().reshape(nv)
    eye = np.eye(k)
    parts = []
    for _, u in rule.blocks():
        mats = eye + radius * u.reshape(-1, k, k)
        vals = np.prod(u ** (-expo), axis=1) / np.linalg.det(mats)
        parts.append(complex(vals.sum()))
    mean = complex(math.fsum(p.real for p in parts), math.fsum(p.imag for p in parts))
    mean /= rule.size
    return mean * alpha.factorial() / radius ** alpha.total()
