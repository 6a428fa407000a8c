"""
Error types for uncertainty-lab.
"""

from typing import Optional


class UncertaintyError(Exception):
    """Base class for every error raised by the library."""


class DimensionMismatchError(UncertaintyError, ValueError):
    pass


class NotNormalizedError(UncertaintyError, ValueError):
    pass


class NotHermitianError(UncertaintyError, ValueError):
    pass


class ZeroVectorError(UncertaintyError, ValueError):
    pass


class EmptyFamilyError(UncertaintyError, ValueError):
    pass


class IntervalMismatchError(UncertaintyError, ValueError):
    pass


class GridMismatchError(UncertaintyError, ValueError):
    pass


class UnsupportedIntervalError(UncertaintyError, ValueError):
    pass


class OutOfDomainError(UncertaintyError, ValueError):
    """A wavefunction violates the boundary law of a momentum extension."""

    def __init__(self, residual: float, theta: float):
        self.residual = residual
        self.theta = theta
        super().__init__(
            f"wavefunction is outside D(P^theta) for theta={theta:.6g} "
            f"(boundary residual {residual:.3e})"
        )


class InvalidParityError(UncertaintyError, ValueError):
    pass


class NumericalFailureError(UncertaintyError, RuntimeError):
    pass


class BrokenPhaseError(UncertaintyError, ValueError):
    pass


class DegenerateSpectrumError(UncertaintyError, ValueError):
    pass


class MissingCError(UncertaintyError, ValueError):
    pass


class CommonEigenvectorsError(UncertaintyError, ValueError):
    pass


class SchemaError(UncertaintyError, ValueError):
    pass


class ScenarioError(UncertaintyError, RuntimeError):
    """A module error raised while executing a scenario."""

    def __init__(self, scenario_id: str, message: str, cause: Optional[BaseException] = None):
        self.scenario_id = scenario_id
        self.cause = cause
        super().__init__(f"[{scenario_id}] {message}")


class NotPTSymmetricError(UncertaintyError, ValueError):
    """A Hamiltonian fails P conj(H) P = H."""


class NotComplexSymmetricError(UncertaintyError, ValueError):
    """A Hamiltonian fails H = H^T, so C cannot be built from phi_n phi_n^T."""
