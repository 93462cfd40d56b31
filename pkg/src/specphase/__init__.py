"""Spectral modularity bisection on planted random graphs, with effective-medium predictions."""

from .errors import (
    CapacityError,
    ConsistencyError,
    ConvergenceError,
    DegenerateVectorError,
    DomainError,
    GenerationError,
    InfeasibleError,
    OperatorError,
    ParameterError,
    PhaseInfeasible,
    SingularPartitionError,
    SpecPhaseError,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConsistencyError",
    "ConvergenceError",
    "DegenerateVectorError",
    "DomainError",
    "GenerationError",
    "InfeasibleError",
    "OperatorError",
    "ParameterError",
    "PhaseInfeasible",
    "SingularPartitionError",
    "SpecPhaseError",
    "__version__",
]
