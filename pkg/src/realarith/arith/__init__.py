"""Arithmetization: machine runs and axioms as first-order formulas."""

from .axioms import (
    AxiomSet,
    NotClosed,
    eq_axiom,
    eq_conjunction,
    q_axioms,
    q_conjunction,
    star_wrap,
)
from .graph import (
    GraphFormula,
    PredFormula,
    ShadowUnsupported,
    b_formula,
    g_formula,
    graph_formula,
    h_formula,
    shadow_apply,
)
from .translate import functional_notation, predicate_form

__all__ = [
    "AxiomSet",
    "GraphFormula",
    "NotClosed",
    "PredFormula",
    "ShadowUnsupported",
    "b_formula",
    "eq_axiom",
    "eq_conjunction",
    "functional_notation",
    "g_formula",
    "graph_formula",
    "h_formula",
    "predicate_form",
    "q_axioms",
    "q_conjunction",
    "shadow_apply",
    "star_wrap",
]
