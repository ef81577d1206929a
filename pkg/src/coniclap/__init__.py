"""Lift-and-project and disjunctive cuts for mixed-integer second-order cone programs."""

from .cones import Cone, ConeKind, ConeProduct
from .conicsolve import ConicProgram, SolveOptions, SolveResult, SolveStatus, solve
from .cutloop import LoopConfig, Report, run
from .instance_io import StandardProblem, load_problem, parse_cbf, read_cbf, to_standard_form
from .model import Classification, CutCandidate, Disjunction, DisjunctionTerm, elementary_split, split_disjunction
from .oracle import EnumBox, Verdict, split_hull_support_2d, validate_cut
from .separation import Normalization, SeparationConfig, separate

__version__ = "0.1.0"

__all__ = [
    "Classification", "Cone", "ConeKind", "ConeProduct", "ConicProgram", "CutCandidate", "Disjunction",
    "DisjunctionTerm", "EnumBox", "LoopConfig", "Normalization", "Report", "SeparationConfig",
    "SolveOptions", "SolveResult", "SolveStatus", "StandardProblem", "Verdict", "elementary_split",
    "load_problem", "parse_cbf", "read_cbf", "run", "separate", "solve", "split_disjunction",
    "split_hull_support_2d", "to_standard_form", "validate_cut",
]
