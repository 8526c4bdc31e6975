"""Dense complex matrices near the identity: norms, gating, LU determinant
and the single Gaussian-elimination step that peels off the first pivot.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`as_matrix`
is the one place where shape and finiteness are checked.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "PIVOT_FLOOR",
    "MatrixError",
    "PivotZero",
    "GateStatus",
    "as_matrix",
    "identity",
    "frobenius_norm",
    "gate",
    "lu_det",
    "schur_reduce_step",
    "random_gated",
    "load_matrix",
    "dump_matrix",
    "matrix_to_json",
    "matrix_from_json",
]

# Absolute floor below which a pivot candidate counts as zero.
PIVOT_FLOOR = 1e-300


class MatrixError(ValueError):
    """Input is not a finite square complex matrix."""


class PivotZero(ArithmeticError):
    """Leading entry too small to eliminate with."""


@dataclass(frozen=True)
class GateStatus:
    """Where ``A`` sits relative to the ball ``||A - 1|| <= 1/k``."""

    norm_of_deviation: float
    threshold: float
    inside_strict: bool
    inside_closed: bool

    def to_dict(self):
        return {
            "norm_of_deviation": self.norm_of_deviation,
            "threshold": self.threshold,
            "inside_strict": self.inside_strict,
            "inside_closed": self.inside_closed,
        }


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a finite square complex128 array (a copy if needed)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise MatrixError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise MatrixError("matrix has non-finite entries")
    return m


def identity(k: int) -> np.ndarray:
    return np.eye(k, dtype=np.complex128)


def frobenius_norm(m) -> float:
    m = np.asarray(m, dtype=np.complex128)
    return float(np.sqrt(np.sum(m.real**2 + m.imag**2)))


def gate(a) -> GateStatus:
    """Gate status of ``a`` (not ``a - 1``) against the threshold ``1/k``.

    The power series uses ``inside_closed``; the contour code needs
    ``inside_strict``.
    """
    a = as_matrix(a)
    k = a.shape[0]
    dev = frobenius_norm(a - identity(k))
    thr = 1.0 / k
    return GateStatus(dev, thr, dev < thr, dev <= thr)


def _lu_det(a: np.ndarray, floor: float):
    u = np.array(a, copy=True)
    n = u.shape[0]
    det = u.dtype.type(1)
    for c in range(n):
        p = c + int(np.argmax(np.abs(u[c:, c])))
        if abs(u[p, c]) < floor:
            return u.dtype.type(0)
        if p != c:
            u[[c, p]] = u[[p, c]]
            det = -det
        piv = u[c, c]
        det *= piv
        if c + 1 < n:
            f = u[c + 1:, c] / piv
            u[c + 1:, c:] -= np.outer(f, u[c, c:])
    return det


def lu_det(a) -> complex:
    """Determinant by LU with partial pivoting on modulus.

    Returns exactly ``0`` when a whole pivot column drops below
    :data:`PIVOT_FLOOR`; singular input is not an error.
    """
    return complex(_lu_det(as_matrix(a), PIVOT_FLOOR))


def schur_reduce_step(a):
    """Eliminate the first column of ``a`` using ``a[0, 0]`` as pivot.

    Returns ``(pivot, b)`` with ``b[r, l] = a[r, l] - a[r, 0] * a[0, l] / a[0, 0]``
    for ``r, l >= 1``, so that ``det(a) == pivot * det(b)``.  No row swaps
    are made; raises :class:`PivotZero` if ``|a[0, 0]|`` is below the floor.
    """
    a = as_matrix(a)
    pivot = a[0, 0]
    if abs(pivot) < PIVOT_FLOOR:
        raise PivotZero(f"|a[0,0]| = {abs(pivot):.3e} below pivot floor")
    b = a[1:, 1:] - np.outer(a[1:, 0], a[0, 1:]) / pivot
    return complex(pivot), b


def random_gated(rng: np.random.Generator, k: int, frac: float) -> np.ndarray:
    """``1 + M`` with ``M`` a complex Gaussian matrix rescaled to ``||M|| = frac / k``.

    ``frac`` above 1 is accepted here; callers that need a gated matrix
    check the bound themselves.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if not frac > 0:
        raise ValueError("frac must be positive")
    m = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    m *= (frac / k) / frobenius_norm(m)
    return identity(k) + m


def matrix_to_json(a) -> dict:
    a = as_matrix(a)
    return {"k": a.shape[0], "re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_json(obj) -> np.ndarray:
    try:
        k = obj["k"]
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixError(f"malformed matrix JSON: {exc}") from exc
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise MatrixError("'k' must be a positive integer")
    if re.shape != (k, k) or im.shape != (k, k):
        raise MatrixError(f"'re' and 'im' must both be {k}x{k}")
    return as_matrix(re + 1j * im)


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MatrixError(f"{path}: {exc}") from exc
    return matrix_from_json(obj)


def dump_matrix(a, path) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(a)))
