"""Exception hierarchy shared by all specphase modules."""

from __future__ import annotations


class SpecPhaseError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(SpecPhaseError, ValueError):
    """An argument is outside its admissible range."""


class DomainError(ParameterError):
    """A conversion or formula was evaluated outside its domain."""


class InfeasibleError(ParameterError):
    """A requested graph cannot exist (degree parity, block size, ...)."""


class GenerationError(SpecPhaseError):
    """Random generation failed after exhausting its retry budget."""


class OperatorError(SpecPhaseError):
    """A linear operator cannot be built for the given graph."""


class DegenerateVectorError(SpecPhaseError, ValueError):
    """A vector that must be nonzero is identically zero."""


class ConvergenceError(SpecPhaseError):
    """An iterative solver stopped before reaching its tolerance.

    ``best_residual`` carries the smallest residual seen.
    """

    def __init__(self, message: str, best_residual: float = float("nan")):
        super().__init__(message)
        self.best_residual = best_residual


class PhaseInfeasible(SpecPhaseError):
    """The saddle-point equations of a phase have no feasible root."""


class SingularPartitionError(ParameterError):
    """A bipartition has a side with zero volume."""


class CapacityError(ParameterError):
    """An exhaustive computation was requested on a too-large instance."""


class ConsistencyError(SpecPhaseError):
    """An identity that must hold exactly was violated."""
