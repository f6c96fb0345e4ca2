"""Workbench for the semilinear telegraph equation on the quarter plane."""

from .errors import DomainError, ParseError, TelegraphError
from .exprlang import compile_fn, parse
from .kernels import BACKEND
from .problem import BoundaryKind, MixedProblem, ScalarFn

__all__ = [
    "BACKEND", "BoundaryKind", "DomainError", "MixedProblem", "ParseError", "ScalarFn",
    "TelegraphError", "compile_fn", "parse",
]
