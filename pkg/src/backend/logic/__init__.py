from src.backend.logic.formula import And, Count, Exists, Formula, Hyp, Not, Subset, render
from src.backend.logic.parser import lint_formula, parse_formula
from src.backend.logic.semantics import lambda_bound, satisfies

__all__ = [
    "And",
    "Count",
    "Exists",
    "Formula",
    "Hyp",
    "Not",
    "Subset",
    "render",
    "lint_formula",
    "parse_formula",
    "lambda_bound",
    "satisfies",
]
