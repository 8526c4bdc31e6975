"""Real 2k x 2k form of a complex k x k matrix.

``psi(A1 + i A2) = [[A1, -A2], [A2, A1]]`` is an algebra morphism, and
``det(psi(A)) = |det(A)|^2``.
"""
from __future__ import annotations

import numpy as np

from .matcore import PIVOT_FLOOR, MatrixError, _lu_det, as_matrix

__all__ = ["psi", "real_det"]


def psi(a) -> np.ndarray:
    a = as_matrix(a)
    re, im = a.real, a.imag
    return np.block([[re, -im], [im, re]])


def real_det(m) -> float:
    """Determinant of a real square matrix by LU with partial pivoting."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise MatrixError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise MatrixError("matrix has non-finite entries")
    return float(_lu_det(m, PIVOT_FLOOR))
