"""Reliability polynomials of graphs, their complex roots, and density certificates."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ContractViolation,
    InvalidInput,
    InvalidParameter,
    InvalidTarget,
    NotDivisible,
    NotFound,
    NTooSmall,
    PrecisionExhausted,
    RelRootsError,
    SolverFailure,
    TooLarge,
)
from .graphs import Multigraph, TwoTerminalGraph  # noqa: E402
from .polyalg import ComplexApprox, IntPolynomial  # noqa: E402

__all__ = [
    "ComplexApprox",
    "ContractViolation",
    "IntPolynomial",
    "InvalidInput",
    "InvalidParameter",
    "InvalidTarget",
    "Multigraph",
    "NTooSmall",
    "NotDivisible",
    "NotFound",
    "PrecisionExhausted",
    "RelRootsError",
    "SolverFailure",
    "TooLarge",
    "TwoTerminalGraph",
    "__version__",
]
