from .bracket import (
    approximate_from_inside,
    approximate_from_outside,
    bracket_steps,
    exponent_bracket,
    maximality_probe,
    negative_gap_error,
    richardson,
    solve_member,
)
from .models import BracketResult, Extrapolation, MaximalityProbe, QuotientDiagnostic
from .pair import EigenPairing, eigenfunction_pair, order_pair, transplant
from .quotient import proportionality_diagnostic, sample_points

__all__ = [
    "BracketResult",
    "EigenPairing",
    "Extrapolation",
    "MaximalityProbe",
    "QuotientDiagnostic",
    "approximate_from_inside",
    "approximate_from_outside",
    "bracket_steps",
    "eigenfunction_pair",
    "exponent_bracket",
    "maximality_probe",
    "negative_gap_error",
    "order_pair",
    "proportionality_diagnostic",
    "richardson",
    "sample_points",
    "solve_member",
    "transplant",
]
