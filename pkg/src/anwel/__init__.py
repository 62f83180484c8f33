"""Signed real counts (Welschinger-type invariants) on equisingular strata of A_n deformations."""

from anwel.counts import (
    CountReport,
    InvarianceVerdict,
    closed_form_table,
    count_discr,
    count_ec,
    count_eg,
    invariance_experiment,
)
from anwel.polynomial import Poly, all_roots, discriminant, resultant
from anwel.singularity import AnFamily, DeformationPoint, classify_singularities, welschinger_sign
from anwel.solver import SquareSystem, solve_all, warm_start_solve
from anwel.strata import SliceTarget, ec_closed_form, eg_system, reduced_eg_system

__all__ = [
    "AnFamily",
    "CountReport",
    "DeformationPoint",
    "InvarianceVerdict",
    "Poly",
    "SliceTarget",
    "SquareSystem",
    "all_roots",
    "classify_singularities",
    "closed_form_table",
    "count_discr",
    "count_ec",
    "count_eg",
    "discriminant",
    "ec_closed_form",
    "eg_system",
    "invariance_experiment",
    "reduced_eg_system",
    "resultant",
    "solve_all",
    "warm_start_solve",
    "welschinger_sign",
]
