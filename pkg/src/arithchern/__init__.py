"""Exact-arithmetic Chern connections (Frobenius lifts) on GL_n and their curvature."""

from .chern import (
    FormSpec,
    FrobeniusLiftResult,
    LiftParams,
    alpha_target,
    closed_form_rank1,
    solve_frobenius_lift,
    verify_lift_identities,
)
from .curvature import CurvatureReport, EndoImage, apply_endo, curvature_pair, theorem_checks
from .globalize import (
    GlobalLift,
    certify_global,
    reconstruct_global_lift,
    solve_and_globalize,
)
from .ringcore import (
    CycloRing,
    CycloScalar,
    PadicScalar,
    frobenius_scalar,
    legendre,
    p_derivation_scalar,
    padic_arith,
    rational_reconstruct,
)
from .tseries import EXACT, MatrixSeries, PadicRing, Series, SeriesContext, substitute

__all__ = [
    "CycloRing", "CycloScalar", "PadicScalar", "frobenius_scalar",
    "p_derivation_scalar", "legendre", "padic_arith", "rational_reconstruct",
    "Series", "MatrixSeries", "SeriesContext", "PadicRing", "EXACT", "substitute",
    "FormSpec", "LiftParams", "FrobeniusLiftResult", "alpha_target",
    "solve_frobenius_lift", "closed_form_rank1", "verify_lift_identities",
    "GlobalLift", "reconstruct_global_lift", "certify_global", "solve_and_globalize",
    "EndoImage", "apply_endo", "curvature_pair", "CurvatureReport", "theorem_checks",
]

__version__ = "0.1.0"
