"""Series and contour-integral representations of ``1/det(A)`` for complex
matrices near the identity, with classical determinant oracles."""

from .contour import (
    CostGuard,
    GateViolation,
    NearPole,
    QuadResult,
    TorusRule,
    cauchy_coefficient,
    eval_contour,
    eval_contour_f,
    homotopy_safety_check,
    lemma1_integral,
)
from .matcore import GateStatus, frobenius_norm, gate, lu_det, random_gated, schur_reduce_step
from .multiindex import (
    MultiIndex,
    MultiIndexMatrix,
    enumerate_balanced,
    enumerate_weak_compositions,
    monomial_value,
    term_weight,
)
from .realify import psi, real_det
from .series import (
    SeriesReport,
    charpoly_inverse_series,
    conjugate_by_phase,
    eval_S_closed,
    eval_series_R,
    eval_series_S,
    eval_tracelog,
    taylor_coefficient,
)

__version__ = "0.1.0"
