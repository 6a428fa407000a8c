"""
Zero-Bound Explorer Module for uncertainty-lab.
Pauli and Gell-Mann generators, closed-form Robertson bounds, parametric
state families and a multi-start search for bound-collapsing states.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np
from scipy.optimize import minimize

from .config import get_config
from .errors import DimensionMismatchError, EmptyFamilyError, ZeroVectorError
from .observables import HermitianOperator, StateVector, commutator, robertson_report
from .serialization import encode_complex

logger = logging.getLogger(__name__)


# Sign of lambda_5 relative to the common Gell-Mann convention. The catalog
# keeps entry (1,3) = +i, entry (3,1) = -i so that [lambda_3, lambda_4] = -i lambda_5.
LAMBDA_5_SIGN_VS_STANDARD = -1


@dataclass(frozen=True, eq=False)
class GeneratorCatalog:
    """Pauli matrices and the three Gell-Mann matrices used by the examples."""
    pauli: dict[str, HermitianOperator]
    gellmann: dict[str, HermitianOperator]

    def get(self, name: str) -> HermitianOperator:
        operators = {**self.pauli, **self.gellmann}
        if name not in operators:
            raise KeyError(f"Unknown operator: {name}. Available: {sorted(operators)}")
        return operators[name]

    def names(self) -> list[str]:
        return sorted({**self.pauli, **self.gellmann})


@lru_cache(maxsize=1)
def generator_catalog() -> GeneratorCatalog:
    """Build the generator catalog (cached)."""
    pauli = {
        "sigma_x": HermitianOperator(np.array([[0, 1], [1, 0]]), label="sigma_x"),
        "sigma_y": HermitianOperator(np.array([[0, -1j], [1j, 0]]), label="sigma_y"),
        "sigma_z": HermitianOperator(np.array([[1, 0], [0, -1]]), label="sigma_z"),
    }
    gellmann = {
        "lambda_3": HermitianOperator(np.diag([1, -1, 0]), label="lambda_3"),
        "lambda_4": HermitianOperator(
            np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]]), label="lambda_4"
        ),
        "lambda_5": HermitianOperator(
            np.array([[0, 0, 1j], [0, 0, 0], [-1j, 0, 0]]), label="lambda_5"
        ),
    }
    return GeneratorCatalog(pauli=pauli, gellmann=gellmann)


def _normalization_squared(*components: complex) -> float:
    total = sum(abs(complex(c)) ** 2 for c in components)
    if total == 0.0:
        raise ZeroVectorError("all components are zero")
    return 1.0 / total


def pauli_bound_closed_form(a: complex, b: complex) -> float:
    """
    Robertson bound for (sigma_x, sigma_y) on N(a, b): |<sigma_z>| = N^2 | |a|^2 - |b|^2 |.
    """
    n2 = _normalization_squared(a, b)
    return n2 * abs(abs(a) ** 2 - abs(b) ** 2)


def pauli_moments(a: complex, b: complex) -> dict[str, float]:
    """Closed-form means and deviations of the Pauli matrices on N(a, b)."""
    n2 = _normalization_squared(a, b)
    overlap = complex(np.conj(a) * b)
    return {
        "mean_x": 2 * n2 * overlap.real,
        "mean_y": 2 * n2 * overlap.imag,
        "mean_z": n2 * (abs(a) ** 2 - abs(b) ** 2),
        "delta_x": math.sqrt(max(0.0, 1 - 4 * n2 * n2 * overlap.real ** 2)),
        "delta_y": math.sqrt(max(0.0, 1 - 4 * n2 * n2 * overlap.imag ** 2)),
    }


def gellmann_bound_closed_form(a: complex, b: complex, c: complex) -> float:
    """
    Robertson bound for (lambda_3, lambda_4) on N(a, b, c): N^2 |Im[a* c]|.

    Zero exactly when a* c is real, which covers real coefficients and
    c = beta a with real beta (beta = 0 included).
    """
    n2 = _normalization_squared(a, b, c)
    return n2 * abs((np.conj(complex(a)) * complex(c)).imag)


class FamilyKind(str, Enum):
    REAL = "real"                    # all coefficients real
    PROPORTIONAL = "proportional"    # (a, b, beta*a), beta real, dim 3
    COMPLEX = "complex"              # unconstrained complex coefficients
    EQUAL_MODULUS = "equal_modulus"  # |a| = |b|, dim 2


@dataclass(frozen=True)
class FamilyDescriptor:
    """
    A parametric family of (unnormalized) coefficient vectors.

    Families are plain values (constraint kind + ranges) so that scenario
    files can declare them.
    """
    kind: FamilyKind
    dim: int = 3
    amplitude_range: tuple[float, float] = (-1.0, 1.0)
    beta_range: tuple[float, float] = (-2.0, 2.0)
    include_beta_zero: bool = True
    anchors: tuple[tuple[complex, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind(self.kind))
        if self.dim < 1:
            raise DimensionMismatchError("family dimension must be positive")
        if self.kind is FamilyKind.PROPORTIONAL and self.dim != 3:
            raise DimensionMismatchError("the c = beta*a family lives in dimension 3")
        if self.kind is FamilyKind.EQUAL_MODULUS and self.dim != 2:
            raise DimensionMismatchError("the |a| = |b| family lives in dimension 2")
        low, high = self.amplitude_range
        if not low < high:
            raise ValueError(f"empty amplitude range {self.amplitude_range}")
        anchors = tuple(tuple(complex(v) for v in anchor) for anchor in self.anchors)
        for anchor in anchors:
            if len(anchor) != self.dim:
                raise DimensionMismatchError(f"anchor {anchor} does not have {self.dim} components")
        object.__setattr__(self, "anchors", anchors)

    @property
    def free_parameters(self) -> int:
        """Number of free real parameters of the family."""
        if self.kind is FamilyKind.REAL:
            return self.dim
        if self.kind is FamilyKind.PROPORTIONAL:
            return 5
        if self.kind is FamilyKind.EQUAL_MODULUS:
            return 3
        return 2 * self.dim

    def default_samples(self) -> int:
        search = get_config().search
        pairs = math.ceil(self.free_parameters / 2)
        return min(search.samples_per_pair * pairs, search.max_samples)

    def describe(self) -> str:
        if self.kind is FamilyKind.REAL:
            text = f"real coefficients in {self.amplitude_range}, dim {self.dim}"
        elif self.kind is FamilyKind.PROPORTIONAL:
            text = f"(a, b, beta*a) with complex a, b and real beta in {self.beta_range}"
        elif self.kind is FamilyKind.EQUAL_MODULUS:
            text = "(r e^{i alpha}, r e^{i beta}) with |a| = |b|"
        else:
            text = f"unconstrained complex coefficients, dim {self.dim}"
        if self.anchors:
            text += f"; anchored at {[list(map(str, a)) for a in self.anchors]}"
        return text

    def _draw(self, rng: np.random.Generator, index: int) -> np.ndarray:
        low, high = self.amplitude_range
        if self.kind is FamilyKind.REAL:
            return rng.uniform(low, high, size=self.dim).astype(complex)
        if self.kind is FamilyKind.COMPLEX:
            return rng.uniform(low, high, size=self.dim) + 1j * rng.uniform(low, high, size=self.dim)
        if self.kind is FamilyKind.EQUAL_MODULUS:
            radius = rng.uniform(0.1, max(abs(low), abs(high)))
            phases = rng.uniform(0.0, 2 * np.pi, size=2)
            return radius * np.exp(1j * phases)
        a, b = rng.uniform(low, high, size=2) + 1j * rng.uniform(low, high, size=2)
        beta = rng.uniform(*self.beta_range)
        if index == 0 and self.include_beta_zero:
            beta = 0.0
        return np.array([a, b, beta * a], dtype=complex)

    def sample_components(self, count: int, rng: np.random.Generator) -> Iterator[np.ndarray]:
        """Anchors first, then seeded draws, `count` vectors in total."""
        produced = 0
        for anchor in self.anchors[:count]:
            produced += 1
            yield np.array(anchor, dtype=complex)
        index = 0
        while produced < count:
            components = self._draw(rng, index)
            index += 1
            if np.linalg.norm(components) < 1e-12:
                continue
            produced += 1
            yield components

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "dim": self.dim,
            "amplitude_range": list(self.amplitude_range),
            "beta_range": list(self.beta_range),
            "include_beta_zero": self.include_beta_zero,
            "anchors": [[encode_complex(v) for v in anchor] for anchor in self.anchors],
        }


@dataclass
class FamilyVerdict:
    """Outcome of sampling a family against a pair of observables."""
    family_descriptor: str
    bound_zero_on_family: bool
    witness_states: list[StateVector]
    counter_states: list[StateVector]
    max_bound: float
    sample_count: int
    seed: int
    notes: list[str] = field(default_factory=list)

    def to_dict(self, echo_limit: Optional[int] = None) -> dict:
        limit = get_config().search.witness_echo_limit if echo_limit is None else echo_limit
        return {
            "family_descriptor": self.family_descriptor,
            "bound_zero_on_family": self.bound_zero_on_family,
            "witness_count": len(self.witness_states),
            "counter_count": len(self.counter_states),
            "witness_states": [s.to_dict() for s in self.witness_states[:limit]],
            "counter_states": [s.to_dict() for s in self.counter_states[:limit]],
            "max_bound": self.max_bound,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "notes": list(self.notes),
        }


def classify_family(
    family: FamilyDescriptor,
    A: HermitianOperator,
    B: HermitianOperator,
    samples: Optional[int] = None,
    seed: int = 0,
) -> FamilyVerdict:
    """
    Decide whether the Robertson bound of (A, B) vanishes on a whole family.

    Args:
        family: Family descriptor
        A: First observable
        B: Second observable
        samples: Number of states to draw (default from the family's size)
        seed: Seed of the sampling generator

    Returns:
        FamilyVerdict with witness (zero-bound) and counter states
    """
    if not family.dim == A.dim == B.dim:
        raise DimensionMismatchError(
            f"family dim {family.dim} vs operators {A.dim}, {B.dim}"
        )
    count = family.default_samples() if samples is None else int(samples)
    if count < 1:
        raise EmptyFamilyError(f"samples must be at least 1, got {count}")

    zero = get_config().tolerances.zero
    rng = np.random.default_rng(seed)
    witnesses: list[StateVector] = []
    counters: list[StateVector] = []
    max_bound = 0.0

    for components in family.sample_components(count, rng):
        state = StateVector.from_components(components)
        report = robertson_report(A, B, state)
        max_bound = max(max_bound, report.bound)
        if report.bound <= zero:
            witnesses.append(state)
        else:
            counters.append(state)

    if not witnesses and not counters:
        raise EmptyFamilyError(f"family produced no states: {family.describe()}")

    notes = []
    if family.kind is FamilyKind.PROPORTIONAL and family.include_beta_zero:
        notes.append(
            "beta = 0 (c = 0) is sampled as a witness; the usual statement of "
            "c = beta*a requires beta != 0 although Im[a* c] = 0 there too"
        )

    logger.debug(
        f"family '{family.describe()}': {len(witnesses)} witnesses, {len(counters)} counters"
    )
    return FamilyVerdict(
        family_descriptor=family.describe(),
        bound_zero_on_family=not counters,
        witness_states=witnesses,
        counter_states=counters,
        max_bound=max_bound,
        sample_count=len(witnesses) + len(counters),
        seed=seed,
        notes=notes,
    )


class Objective(str, Enum):
    PRODUCT = "product"
    BOUND = "bound"
    GAP = "gap"


@dataclass
class SearchResult:
    """Best state found by the multi-start sphere search."""
    best_state: StateVector
    best_value: float
    objective: Objective
    iterations: int
    seed: int
    restarts: int

    def to_dict(self) -> dict:
        return {
            "best_state": self.best_state.to_dict(),
            "best_value": self.best_value,
            "objective": self.objective.value,
            "iterations": self.iterations,
            "seed": self.seed,
            "restarts": self.restarts,
        }


def batch_objective(
    A: HermitianOperator,
    B: HermitianOperator,
    states: np.ndarray,
    objective: Objective,
) -> np.ndarray:
    """
    Objective values for many normalized states at once.

    Args:
        A: First observable
        B: Second observable
        states: Array of shape (m, dim) with unit rows
        objective: Which quantity to evaluate

    Returns:
        Array of m objective values
    """
    states = np.atleast_2d(states)
    conj = states.conj()

    def deviation(matrix: np.ndarray) -> np.ndarray:
        applied = states @ matrix.T
        mean = np.einsum("ij,ij->i", conj, applied).real
        return np.linalg.norm(applied - mean[:, None] * states, axis=1)

    comm = commutator(A, B)
    bound = 0.5 * np.abs(np.einsum("ij,ij->i", conj, states @ comm.T))
    if objective is Objective.BOUND:
        return bound
    product = deviation(A.entries) * deviation(B.entries)
    if objective is Objective.PRODUCT:
        return product
    return product - bound


def _state_from_parameters(x: np.ndarray, dim: int) -> Optional[np.ndarray]:
    vector = x[:dim] + 1j * x[dim:]
    norm = np.linalg.norm(vector)
    if norm < 1e-12:
        return None
    return vector / norm


def _objective_value(report, objective: Objective) -> float:
    return {
        Objective.PRODUCT: report.product,
        Objective.BOUND: report.bound,
        Objective.GAP: report.gap,
    }[objective]


def minimize_objective(
    A: HermitianOperator,
    B: HermitianOperator,
    objective: Objective = Objective.PRODUCT,
    seed: int = 0,
    restarts: Optional[int] = None,
) -> SearchResult:
    """
    Multi-start search on the unit sphere for the minimum of an objective.

    An unconstrained complex vector is optimized and normalized inside the
    objective. Each restart runs Nelder-Mead and polishes the optimum with
    Powell. Ties keep the lowest restart index.
    """
    if A.dim != B.dim:
        raise DimensionMismatchError(f"operator dims {A.dim} != {B.dim}")
    objective = Objective(objective)
    search = get_config().search
    restarts = search.restarts if restarts is None else int(restarts)
    if restarts < 1:
        raise ValueError(f"restarts must be at least 1, got {restarts}")

    dim = A.dim
    rng = np.random.default_rng(seed)

    def cost(x: np.ndarray) -> float:
        vector = _state_from_parameters(x, dim)
        if vector is None:
            return 1e6
        return float(batch_objective(A, B, vector[None, :], objective)[0])

    options = {
        "xatol": 1e-12,
        "fatol": 1e-15,
        "maxiter": search.max_iterations,
        "maxfev": 2 * search.max_iterations,
        "adaptive": True,
    }
    polish_options = {"xtol": 1e-12, "ftol": 1e-15, "maxiter": search.max_iterations}
    best_x: Optional[np.ndarray] = None
    best_value = math.inf
    iterations = 0

    for restart in range(restarts):
        x0 = rng.normal(size=2 * dim)
        result = minimize(cost, x0, method="Nelder-Mead", options=options)
        iterations += int(result.nit)
        polished = minimize(cost, result.x, method="Powell", options=polish_options)
        iterations += int(polished.nit)
        if polished.fun <= result.fun:
            result = polished
        if result.fun < best_value:
            best_value = float(result.fun)
            best_x = result.x
            logger.debug(f"restart {restart}: new best {objective.value} = {best_value:.3e}")

    vector = _state_from_parameters(best_x, dim)
    best_state = StateVector.from_components(vector)
    report = robertson_report(A, B, best_state)

    return SearchResult(
        best_state=best_state,
        best_value=_objective_value(report, objective),
        objective=objective,
        iterations=iterations,
        seed=seed,
        restarts=restarts,
    )


def sphere_grid(dim: int, points: Optional[int] = None) -> np.ndarray:
    """
    Dense grid over the state sphere modulo global phase (dims 2 and 3).

    Returns:
        Array of unit rows
    """
    points = get_config().search.brute_force_points if points is None else points
    polar = np.linspace(0.0, np.pi / 2, points)
    phase = np.linspace(0.0, 2 * np.pi, points, endpoint=False)

    if dim == 2:
        t, p = np.meshgrid(polar, phase, indexing="ij")
        t, p = t.ravel(), p.ravel()
        return np.stack([np.cos(t), np.exp(1j * p) * np.sin(t)], axis=1)

    if dim == 3:
        t1, t2, p1, p2 = np.meshgrid(polar, polar, phase, phase, indexing="ij")
        t1, t2, p1, p2 = (g.ravel() for g in (t1, t2, p1, p2))
        return np.stack(
            [
                np.cos(t1).astype(complex),
                np.exp(1j * p1) * np.sin(t1) * np.cos(t2),
                np.exp(1j * p2) * np.sin(t1) * np.sin(t2),
            ],
            axis=1,
        )

    raise DimensionMismatchError(f"brute-force sphere grid supports dims 2 and 3, got {dim}")


def brute_force_minimum(
    A: HermitianOperator,
    B: HermitianOperator,
    objective: Objective = Objective.PRODUCT,
    points: Optional[int] = None,
) -> tuple[float, StateVector]:
    """Minimum of the objective over the dense sphere grid."""
    if A.dim != B.dim:
        raise DimensionMismatchError(f"operator dims {A.dim} != {B.dim}")
    states = sphere_grid(A.dim, points)
    values = batch_objective(A, B, states, Objective(objective))
    index = int(np.argmin(values))
    return float(values[index]), StateVector.from_components(states[index])
