"""Symmetry-based exact and reduced solutions of the Grad-Shafranov equation."""
from .catalog import FAMILIES, ClosedFormSolution, doubling_partner, dshape_boundary, instantiate
from .errors import (
    ClassMismatch,
    ConstraintError,
    DomainError,
    GSError,
    NoReduction,
    NumericFailure,
    ParameterError,
    ParseError,
    VerificationFailure,
)
from .profiles import ProfileSpec, SymmetryClass, classify, dshape_params_from, parse_profile, weak_family
from .residual import ResidualReport

__version__ = "0.1.0"
