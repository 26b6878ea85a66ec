"""Exact polynomial algebra, graded series and the frame-change identities."""

from .identities import (
    RindlerExpansion,
    acceleration_phase,
    boost_phase,
    composed_phase_sum,
    rindler_expand,
    rindler_target,
    rotation_angular_form,
    rotation_completed_square,
    verify_acceleration_composition,
    verify_acceleration_identity,
    verify_boost_identity,
    verify_composition_potential,
    verify_rotation_identity,
)
from .poly import FormExpr, Poly, differential, substitute, symbols
from .series import GradedSeries, compose

__all__ = [
    "FormExpr", "GradedSeries", "Poly", "RindlerExpansion", "acceleration_phase", "boost_phase",
    "compose", "composed_phase_sum", "differential", "rindler_expand", "rindler_target",
    "rotation_angular_form", "rotation_completed_square", "substitute", "symbols",
    "verify_acceleration_composition", "verify_acceleration_identity", "verify_boost_identity",
    "verify_composition_potential", "verify_rotation_identity",
]
