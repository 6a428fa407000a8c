"""
Observable Algebra Module for uncertainty-lab.
Expectations, standard deviations, commutators and the Robertson relation
for finite-dimensional observables.
"""

import logging
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from .config import get_config
from .errors import (
    DimensionMismatchError,
    NotHermitianError,
    NotNormalizedError,
    NumericalFailureError,
    ZeroVectorError,
)
from .serialization import encode_complex, encode_matrix, encode_vector

logger = logging.getLogger(__name__)


def inf_norm(matrix: np.ndarray) -> float:
    """Induced infinity norm (max absolute row sum)."""
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0.0
    return float(np.linalg.norm(matrix, np.inf))


def herm_tolerance(matrix: np.ndarray) -> float:
    return get_config().tolerances.herm * max(inf_norm(matrix), 1.0)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """
    A self-adjoint matrix acting on C^dim.

    Hermiticity is checked when the operator is built; matrices outside the
    tolerance are rejected, never symmetrized.
    """
    entries: np.ndarray
    label: str = ""

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 1:
            raise DimensionMismatchError(
                f"operator must be a non-empty square matrix, got shape {entries.shape}"
            )
        residual = inf_norm(entries - entries.conj().T)
        if residual > herm_tolerance(entries):
            raise NotHermitianError(
                f"operator {self.label or '<unnamed>'} is not Hermitian "
                f"(||A - A^+||_inf = {residual:.3e})"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def tolerance(self) -> float:
        return herm_tolerance(self.entries)

    def scaled(self, factor: float) -> "HermitianOperator":
        return HermitianOperator(float(factor) * self.entries, label=f"{factor}*{self.label}")

    def shifted(self, shift: float) -> "HermitianOperator":
        return HermitianOperator(
            self.entries + float(shift) * np.eye(self.dim),
            label=f"{self.label}+{shift}I",
        )

    def to_dict(self) -> dict:
        return {"label": self.label, "dim": self.dim, "entries": encode_matrix(self.entries)}


@dataclass(frozen=True, eq=False)
class StateVector:
    """A unit vector |phi> in C^dim."""
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex)
        if amplitudes.ndim != 1 or amplitudes.size < 1:
            raise DimensionMismatchError(
                f"state must be a non-empty vector, got shape {amplitudes.shape}"
            )
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > get_config().tolerances.norm:
            raise NotNormalizedError(f"state norm is {norm!r}, expected 1")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_components(cls, components) -> "StateVector":
        """Normalize arbitrary (nonzero) components N*(a, b, ...)."""
        vector = np.asarray(components, dtype=complex).ravel()
        norm = float(np.linalg.norm(vector))
        if norm == 0.0:
            raise ZeroVectorError("cannot normalize the zero vector")
        return cls(vector / norm)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def with_phase(self, angle: float) -> "StateVector":
        return StateVector(np.exp(1j * angle) * self.amplitudes)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "amplitudes": encode_vector(self.amplitudes)}


@dataclass(frozen=True)
class UncertaintyReport:
    """Both sides of the Robertson relation evaluated on one state."""
    delta_a: float
    delta_b: float
    product: float
    bound: float
    gap: float
    bound_is_zero: bool
    a_eigenstate: bool
    b_eigenstate: bool
    sum_of_squares: float
    commutator_expectation: complex
    tolerance: float

    def to_dict(self) -> dict:
        data = asdict(self)
        data["commutator_expectation"] = encode_complex(self.commutator_expectation)
        return data


def _check_dims(*dims: int) -> None:
    if len(set(dims)) != 1:
        raise DimensionMismatchError(f"dimension mismatch: {dims}")


def expectation(A: HermitianOperator, phi: StateVector) -> float:
    """
    Average value <phi|A|phi>.

    The raw inner product must be real within the Hermiticity tolerance;
    its real part is returned.
    """
    _check_dims(A.dim, phi.dim)
    raw = np.vdot(phi.amplitudes, A.entries @ phi.amplitudes)
    if abs(raw.imag) > A.tolerance:
        raise NotHermitianError(
            f"<phi|A|phi> has imaginary residue {raw.imag:.3e} for {A.label or 'operator'}"
        )
    return float(raw.real)


def variance_radicand(A: HermitianOperator, phi: StateVector) -> float:
    """<A^2> - <A>^2, kept only as a cross-check of std_dev."""
    mean = expectation(A, phi)
    applied = A.entries @ phi.amplitudes
    second_moment = float(np.vdot(applied, applied).real)
    return second_moment - mean * mean


def std_dev(A: HermitianOperator, phi: StateVector) -> float:
    """
    Standard deviation ||(A - <A> I) phi||.

    Args:
        A: Observable
        phi: Normalized state of matching dimension

    Returns:
        Nonnegative standard deviation
    """
    mean = expectation(A, phi)
    applied = A.entries @ phi.amplitudes
    value = float(np.linalg.norm(applied - mean * phi.amplitudes))

    # <A^2> - <A>^2 loses about ||A phi||^2 * eps to cancellation
    second_moment = float(np.vdot(applied, applied).real)
    radicand = second_moment - mean * mean
    tolerance = get_config().tolerances.rob * max(1.0, second_moment)
    if radicand < -tolerance:
        raise NotHermitianError(f"negative variance radicand {radicand:.3e}")
    return value


def commutator(A: HermitianOperator, B: HermitianOperator) -> np.ndarray:
    """AB - BA as a plain complex matrix (anti-Hermitian)."""
    _check_dims(A.dim, B.dim)
    return A.entries @ B.entries - B.entries @ A.entries


def is_anti_hermitian(matrix: np.ndarray, tolerance: Optional[float] = None) -> bool:
    matrix = np.asarray(matrix, dtype=complex)
    tolerance = herm_tolerance(matrix) if tolerance is None else tolerance
    return inf_norm(matrix + matrix.conj().T) <= tolerance


def is_eigenstate(A: HermitianOperator, phi: StateVector) -> bool:
    """Residual ||A phi - <A> phi|| within the zero tolerance."""
    return std_dev(A, phi) <= get_config().tolerances.zero


def robertson_report(A: HermitianOperator, B: HermitianOperator, phi: StateVector) -> UncertaintyReport:
    """
    Evaluate Delta A * Delta B >= 1/2 |<[A, B]>| on a state.

    Args:
        A: First observable
        B: Second observable
        phi: Normalized state

    Returns:
        UncertaintyReport with deviations, bound, gap and degeneracy flags
    """
    _check_dims(A.dim, B.dim, phi.dim)
    tolerances = get_config().tolerances

    delta_a = std_dev(A, phi)
    delta_b = std_dev(B, phi)
    comm_value = complex(np.vdot(phi.amplitudes, commutator(A, B) @ phi.amplitudes))
    bound = 0.5 * abs(comm_value)
    product = delta_a * delta_b
    gap = product - bound

    tolerance = tolerances.rob * max(1.0, product)
    if gap < -tolerance:
        raise NumericalFailureError(
            f"Robertson inequality violated beyond tolerance: gap={gap:.3e}"
        )

    return UncertaintyReport(
        delta_a=delta_a,
        delta_b=delta_b,
        product=product,
        bound=bound,
        gap=gap,
        bound_is_zero=bound <= tolerances.zero,
        a_eigenstate=delta_a <= tolerances.zero,
        b_eigenstate=delta_b <= tolerances.zero,
        sum_of_squares=delta_a * delta_a + delta_b * delta_b,
        commutator_expectation=comm_value,
        tolerance=tolerance,
    )


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> HermitianOperator:
    """Gaussian Hermitian matrix (m + m^+)/2."""
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator(scale * (m + m.conj().T) / 2, label=f"random{dim}")


def random_state(dim: int, rng: np.random.Generator) -> StateVector:
    """Haar-distributed unit vector."""
    while True:
        vector = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        if np.linalg.norm(vector) > 1e-8:
            return StateVector.from_components(vector)
