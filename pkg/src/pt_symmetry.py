"""
PT-Symmetry Module for uncertainty-lab.
Finite-dimensional PT-symmetric Hamiltonians: phase classification, the C
operator, PT and CPT inner products and the CPT observable condition.

T acts as entrywise complex conjugation and P is a signed permutation.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np
import scipy.linalg

from .config import get_config
from .errors import (
    BrokenPhaseError,
    CommonEigenvectorsError,
    DegenerateSpectrumError,
    DimensionMismatchError,
    InvalidParityError,
    MissingCError,
    NotComplexSymmetricError,
    NotPTSymmetricError,
    NumericalFailureError,
)
from .observables import inf_norm
from .serialization import encode_complex, encode_matrix, encode_vector

logger = logging.getLogger(__name__)


class Phase(str, Enum):
    UNBROKEN = "unbroken"
    BROKEN = "broken"


# Parity

def validate_parity(P) -> np.ndarray:
    """
    Check that P is a signed permutation with P^2 = I exactly.

    Returns:
        P as a read-only float array
    """
    P = np.array(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise InvalidParityError(f"parity must be square, got shape {P.shape}")
    if not np.all(np.isin(P, (-1.0, 0.0, 1.0))):
        raise InvalidParityError("parity entries must be -1, 0 or 1")
    if not (np.all(np.count_nonzero(P, axis=0) == 1) and np.all(np.count_nonzero(P, axis=1) == 1)):
        raise InvalidParityError("parity must be a signed permutation")
    if not np.array_equal(P @ P, np.eye(P.shape[0])):
        raise InvalidParityError("parity must satisfy P^2 = I")
    P.setflags(write=False)
    return P


def exchange_parity(dim: int) -> np.ndarray:
    """Anti-diagonal exchange matrix, the default parity."""
    return validate_parity(np.fliplr(np.eye(dim)))


def signed_permutation(images: list[int], signs: Optional[list[int]] = None) -> np.ndarray:
    """Parity sending basis vector e_j to signs[j] * e_{images[j]}."""
    dim = len(images)
    signs = [1] * dim if signs is None else signs
    P = np.zeros((dim, dim))
    for j, (i, sign) in enumerate(zip(images, signs)):
        P[i, j] = sign
    return validate_parity(P)


def _parity_list(P: np.ndarray) -> list[list[int]]:
    return [[int(np.flatnonzero(row)[0]), int(row[np.flatnonzero(row)[0]])] for row in P]


def is_pt_symmetric(H, P) -> tuple[bool, float]:
    """
    Check P conj(H) P = H.

    Returns:
        (symmetric, residual) with residual relative to max(||H||_inf, 1)
    """
    H = np.asarray(H, dtype=complex)
    P = validate_parity(P)
    if H.shape != P.shape:
        raise DimensionMismatchError(f"H {H.shape} vs P {P.shape}")
    residual = inf_norm(P @ H.conj() @ P - H) / max(inf_norm(H), 1.0)
    return residual <= get_config().tolerances.pt, residual


# Models

@dataclass(frozen=True, eq=False)
class PTModel:
    """
    A PT-symmetric Hamiltonian with its parity.

    Spectral fields are filled by solve_spectrum, C by prepare_model.
    Eigenvectors are columns, PT-normalized to (phi_n, phi_n)^PT = +-1.
    """
    H: np.ndarray
    P: np.ndarray
    label: str = ""
    parameters: dict = field(default_factory=dict)
    phase: Optional[Phase] = None
    spectrum: Optional[np.ndarray] = None
    eigenvectors: Optional[np.ndarray] = None
    pt_norms: Optional[np.ndarray] = None
    label_offset: Optional[int] = None
    degenerate: bool = False
    C: Optional[np.ndarray] = None
    c_residuals: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    @property
    def h_norm(self) -> float:
        return inf_norm(self.H)

    def to_dict(self) -> dict:
        data = {
            "label": self.label,
            "dim": self.dim,
            "H": encode_matrix(self.H),
            "P": _parity_list(self.P),
            "parameters": dict(self.parameters),
            "phase": None if self.phase is None else self.phase.value,
            "degenerate": self.degenerate,
        }
        if self.spectrum is not None:
            data["spectrum"] = encode_vector(self.spectrum)
        if self.pt_norms is not None:
            data["pt_norms"] = [float(v) for v in self.pt_norms]
            data["label_offset"] = self.label_offset
        if self.C is not None:
            data["C"] = encode_matrix(self.C)
            data["c_residuals"] = dict(self.c_residuals)
        return data


def make_model(H, P=None, label: str = "", **parameters) -> PTModel:
    """
    Validate dims, parity and PT symmetry and wrap H in a PTModel.

    Raises:
        DimensionMismatchError: H is not square with an even positive dim
        NotPTSymmetricError: P conj(H) P != H
        NotComplexSymmetricError: H != H^T
    """
    H = np.array(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape[0] < 1:
        raise DimensionMismatchError(f"H must be square, got shape {H.shape}")
    if H.shape[0] % 2:
        raise DimensionMismatchError(f"PT models need an even dimension, got {H.shape[0]}")
    P = exchange_parity(H.shape[0]) if P is None else validate_parity(P)
    symmetric, residual = is_pt_symmetric(H, P)
    if not symmetric:
        raise NotPTSymmetricError(f"P conj(H) P != H (residual {residual:.3e})")
    transpose_residual = inf_norm(H - H.T) / max(inf_norm(H), 1.0)
    if transpose_residual > get_config().tolerances.pt:
        raise NotComplexSymmetricError(f"H != H^T (residual {transpose_residual:.3e})")
    H.setflags(write=False)
    return PTModel(H=H, P=P, label=label, parameters=parameters)


def two_level_model(r: float, s: float, theta: float) -> PTModel:
    """H = [[r e^{i theta}, s], [s, r e^{-i theta}]] with P = sigma_x."""
    H = np.array(
        [[r * np.exp(1j * theta), s], [s, r * np.exp(-1j * theta)]],
        dtype=complex,
    )
    return make_model(H, exchange_parity(2), label="two_level", r=r, s=s, theta=theta)


def two_level_eigenvalues(r: float, s: float, theta: float) -> np.ndarray:
    """r cos(theta) -+ sqrt(s^2 - r^2 sin^2(theta)), complex when broken."""
    root = np.sqrt(complex(s * s - (r * np.sin(theta)) ** 2))
    return np.array([r * np.cos(theta) - root, r * np.cos(theta) + root])


# Spectrum

def _pt_normalize(
    vector: np.ndarray, P: np.ndarray, tolerance: float
) -> Optional[tuple[np.ndarray, float]]:
    """
    Rephase an eigenvector so P conj(v) = v and scale its PT norm to +-1.

    Returns None when v is not PT-symmetric up to a phase or its PT norm vanishes.
    """
    v = vector / np.linalg.norm(vector)
    image = P @ v.conj()
    ratio = np.vdot(v, image)
    if abs(abs(ratio) - 1.0) > tolerance or np.linalg.norm(image - ratio * v) > tolerance:
        return None
    v = np.sqrt(ratio) * v
    pt_norm = v @ v
    if abs(pt_norm.imag) > tolerance * max(1.0, abs(pt_norm)):
        return None
    if abs(pt_norm.real) <= get_config().tolerances.degeneracy_gap:
        return None
    return v / np.sqrt(abs(pt_norm.real)), float(np.sign(pt_norm.real))


def solve_spectrum(model: PTModel) -> PTModel:
    """
    Eigen-decompose H and classify the phase.

    Eigenvalues are sorted by real part. The phase is unbroken iff every
    eigenvalue is real within eps_pt * max(||H||, 1) and every eigenvector is
    PT-normalizable.

    Returns:
        A copy of the model with spectral fields filled
    """
    tolerances = get_config().tolerances
    try:
        values, vectors = scipy.linalg.eig(model.H)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalFailureError(f"eigen-solver failed for {model.label}: {e}") from e
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(vectors))):
        raise NumericalFailureError(f"eigen-solver returned non-finite values for {model.label}")

    order = np.lexsort((values.imag, values.real))
    values, vectors = values[order], vectors[:, order]

    scale = max(model.h_norm, 1.0)
    gaps = np.abs(values[:, None] - values[None, :])
    np.fill_diagonal(gaps, np.inf)
    degenerate = bool(len(values) > 1 and gaps.min() < tolerances.degeneracy_gap * scale)

    real_spectrum = bool(np.all(np.abs(values.imag) <= tolerances.pt * scale))
    normalized = []
    if real_spectrum and not degenerate:
        for n in range(len(values)):
            result = _pt_normalize(vectors[:, n], model.P, tolerances.pt * 1e3)
            if result is None:
                break
            normalized.append(result)

    if real_spectrum and not degenerate and len(normalized) == len(values):
        eigenvectors = np.column_stack([v for v, _ in normalized])
        signs = np.array([s for _, s in normalized])
        alternating = (-1.0) ** np.arange(len(signs))
        if np.array_equal(signs, alternating):
            offset = 0
        elif np.array_equal(signs, -alternating):
            offset = 1
        else:
            offset = None
        logger.debug(f"{model.label}: unbroken, PT norms {signs.tolist()}")
        return replace(
            model,
            phase=Phase.UNBROKEN,
            spectrum=values.real.astype(complex),
            eigenvectors=eigenvectors,
            pt_norms=signs,
            label_offset=offset,
            degenerate=False,
        )

    logger.debug(f"{model.label}: broken or degenerate (degenerate={degenerate})")
    return replace(
        model,
        phase=Phase.UNBROKEN if real_spectrum and degenerate else Phase.BROKEN,
        spectrum=values,
        eigenvectors=vectors,
        pt_norms=None,
        label_offset=None,
        degenerate=degenerate,
    )


# C operator

def build_c(model: PTModel) -> np.ndarray:
    """
    C = sum_n phi_n phi_n^T over PT-normalized eigenvectors, so that
    C phi_n = (phi_n, phi_n)^PT phi_n.

    Raises:
        BrokenPhaseError: complex spectrum or non-normalizable eigenvectors
        DegenerateSpectrumError: spectrum gap below the degeneracy guard
        NumericalFailureError: C^2 = I, [C, H] = 0 or CP = P conj(C) fails
    """
    if model.phase is None:
        model = solve_spectrum(model)
    if model.degenerate:
        raise DegenerateSpectrumError(f"{model.label}: eigenvalue gap below the degeneracy guard")
    if model.phase is not Phase.UNBROKEN:
        raise BrokenPhaseError(f"{model.label}: PT symmetry is broken")

    phi = model.eigenvectors
    gram = phi.T @ phi
    off_diagonal = inf_norm(gram - np.diag(np.diag(gram)))
    if off_diagonal > get_config().tolerances.pt * 1e3 * max(1.0, inf_norm(phi)) ** 2:
        raise DegenerateSpectrumError(
            f"{model.label}: eigenvectors are not PT-orthogonal (residual {off_diagonal:.3e})"
        )

    C = phi @ phi.T
    residuals = c_residuals(C, model.H, model.P)
    limit = get_config().tolerances.pt * max(1.0, model.h_norm) * max(1.0, inf_norm(C))
    worst = max(residuals.values())
    if worst > limit:
        raise NumericalFailureError(f"{model.label}: C verification failed {residuals}")
    return C


def c_residuals(C: np.ndarray, H: np.ndarray, P: np.ndarray) -> dict[str, float]:
    identity = np.eye(C.shape[0])
    return {
        "c_squared": inf_norm(C @ C - identity),
        "c_commutes_with_h": inf_norm(C @ H - H @ C),
        "c_commutes_with_pt": inf_norm(C @ P - P @ C.conj()),
    }


def prepare_model(model: PTModel) -> PTModel:
    """Solve the spectrum and attach C (unbroken models only)."""
    if model.phase is None:
        model = solve_spectrum(model)
    C = build_c(model)
    C.setflags(write=False)
    return replace(model, C=C, c_residuals=c_residuals(C, model.H, model.P))


# Inner products

def _check_vectors(psi, phi, dim: int) -> tuple[np.ndarray, np.ndarray]:
    psi = np.asarray(psi, dtype=complex).ravel()
    phi = np.asarray(phi, dtype=complex).ravel()
    if not psi.size == phi.size == dim:
        raise DimensionMismatchError(f"vectors of sizes {psi.size}, {phi.size} vs dim {dim}")
    return psi, phi


def pt_inner_product(psi, phi, P) -> complex:
    """(psi, phi)^PT = (P conj(psi))^T phi; indefinite."""
    P = validate_parity(P)
    psi, phi = _check_vectors(psi, phi, P.shape[0])
    return complex((P @ psi.conj()) @ phi)


def cpt_inner_product(psi, phi, model: PTModel) -> complex:
    """(psi, phi)^CPT = (C P conj(psi))^T phi; positive definite."""
    if model.C is None:
        raise MissingCError(f"model {model.label or '<unnamed>'} has no C operator")
    psi, phi = _check_vectors(psi, phi, model.dim)
    return complex((model.C @ model.P @ psi.conj()) @ phi)


# Observables

@dataclass(frozen=True)
class ObservableVerdict:
    operator_label: str
    satisfies_condition: bool
    residual: float
    against_model: str

    def to_dict(self) -> dict:
        return {
            "operator_label": self.operator_label,
            "satisfies_condition": self.satisfies_condition,
            "residual": self.residual,
            "against_model": self.against_model,
        }


def cpt_conjugate(A, model: PTModel) -> np.ndarray:
    """(CPT) A (CPT) = C P conj(A) conj(C) P as a plain matrix."""
    if model.C is None:
        raise MissingCError(f"model {model.label or '<unnamed>'} has no C operator")
    A = np.asarray(A, dtype=complex)
    if A.shape != model.H.shape:
        raise DimensionMismatchError(f"A {A.shape} vs H {model.H.shape}")
    return model.C @ model.P @ A.conj() @ model.C.conj() @ model.P


def is_cpt_observable(A, model: PTModel, label: str = "A") -> ObservableVerdict:
    """
    Test CPT A CPT = A^T.

    The residual ||CPT A CPT - A^T||_inf is divided by
    max(||A||, 1) * max(||C||, 1)^2.
    """
    A = np.asarray(A, dtype=complex)
    conjugated = cpt_conjugate(A, model)
    scale = max(inf_norm(A), 1.0) * max(inf_norm(model.C), 1.0) ** 2
    residual = inf_norm(conjugated - A.T) / scale
    return ObservableVerdict(
        operator_label=label,
        satisfies_condition=residual <= get_config().tolerances.pt,
        residual=residual,
        against_model=model.label,
    )


# Random models

def random_pt_hamiltonian(
    dim: int,
    rng: np.random.Generator,
    P: Optional[np.ndarray] = None,
    non_hermiticity: Optional[float] = None,
) -> np.ndarray:
    """
    Complex symmetric H = H^T with P conj(H) P = H, imposed by symmetrization
    of S + i eta T (S, T real symmetric Gaussian).
    """
    P = exchange_parity(dim) if P is None else validate_parity(P)
    eta = get_config().pt.non_hermiticity if non_hermiticity is None else non_hermiticity
    S = rng.normal(size=(dim, dim))
    T = rng.normal(size=(dim, dim))
    H0 = (S + S.T) / 2 + 1j * eta * (T + T.T) / 2
    return (H0 + P @ H0.conj() @ P) / 2


def random_unbroken_model(
    dim: int,
    rng: np.random.Generator,
    P: Optional[np.ndarray] = None,
    non_hermiticity: Optional[float] = None,
    label: str = "random",
) -> PTModel:
    """
    Rejection-sample a well-conditioned unbroken model with C attached.

    Draws whose smallest unscaled PT norm falls below the conditioning floor
    are discarded.
    """
    pt_config = get_config().pt
    P = exchange_parity(dim) if P is None else validate_parity(P)
    for attempt in range(pt_config.max_attempts):
        H = random_pt_hamiltonian(dim, rng, P, non_hermiticity)
        model = solve_spectrum(make_model(H, P, label=label))
        if model.phase is not Phase.UNBROKEN or model.degenerate:
            logger.debug(f"attempt {attempt}: rejected ({model.phase.value}, degenerate={model.degenerate})")
            continue
        conditioning = 1.0 / np.max(np.linalg.norm(model.eigenvectors, axis=0)) ** 2
        if conditioning < pt_config.min_pt_norm:
            logger.debug(f"attempt {attempt}: rejected (PT norm {conditioning:.3e})")
            continue
        try:
            return prepare_model(model)
        except (DegenerateSpectrumError, NumericalFailureError) as e:
            logger.debug(f"attempt {attempt}: rejected ({e})")
    raise NumericalFailureError(
        f"no unbroken {dim}x{dim} model within {pt_config.max_attempts} attempts"
    )


def hermitian_limit_path(r: float, s: float, theta_start: float, points: int = 10) -> list[dict]:
    """
    Two-level models from theta_start down to the Hermitian limit theta = 0.

    Returns:
        One entry per theta with the model and ||C - P||_inf
    """
    path = []
    for theta in np.linspace(theta_start, 0.0, points):
        model = prepare_model(two_level_model(r, s, float(theta)))
        path.append({
            "theta": float(theta),
            "model": model,
            "c_minus_p": inf_norm(model.C - model.P),
        })
    return path


# Non-universality

@dataclass(frozen=True)
class NonUniversalityResult:
    operator_label: str
    under_model_1: ObservableVerdict
    under_model_2: ObservableVerdict

    @property
    def verdicts_differ(self) -> bool:
        return self.under_model_1.satisfies_condition != self.under_model_2.satisfies_condition

    def to_dict(self) -> dict:
        return {
            "operator_label": self.operator_label,
            "under_model_1": self.under_model_1.to_dict(),
            "under_model_2": self.under_model_2.to_dict(),
            "verdicts_differ": self.verdicts_differ,
        }


def shared_eigenvectors(model_1: PTModel, model_2: PTModel) -> list[int]:
    """Indices of eigenvectors of model 1 that are also eigenvectors of model 2."""
    tolerance = get_config().tolerances.pt * max(model_2.h_norm, 1.0)
    shared = []
    for n in range(model_1.dim):
        v = model_1.eigenvectors[:, n]
        v = v / np.linalg.norm(v)
        applied = model_2.H @ v
        rayleigh = np.vdot(v, applied)
        if np.linalg.norm(applied - rayleigh * v) <= tolerance:
            shared.append(n)
    return shared


OPERATOR_CHOICES = ("h1", "c1", "identity", "h2")


def non_universality_demo(H1, H2, P, operator: str = "h1") -> NonUniversalityResult:
    """
    Evaluate one operator's CPT observable condition under two models.

    Args:
        H1: Hamiltonian of model 1
        H2: Hamiltonian of model 2
        P: Shared parity
        operator: One of "h1", "c1", "identity", "h2"

    Returns:
        NonUniversalityResult with the verdict under each model
    """
    if operator not in OPERATOR_CHOICES:
        raise ValueError(f"operator must be one of {OPERATOR_CHOICES}, got {operator!r}")
    model_1 = prepare_model(make_model(H1, P, label="model_1"))
    model_2 = prepare_model(make_model(H2, P, label="model_2"))

    shared = shared_eigenvectors(model_1, model_2)
    if shared:
        raise CommonEigenvectorsError(f"eigenvectors {shared} of H1 are eigenvectors of H2")

    A = {
        "h1": model_1.H,
        "c1": model_1.C,
        "identity": np.eye(model_1.dim, dtype=complex),
        "h2": model_2.H,
    }[operator]
    return NonUniversalityResult(
        operator_label=operator,
        under_model_1=is_cpt_observable(A, model_1, label=operator),
        under_model_2=is_cpt_observable(A, model_2, label=operator),
    )


def find_non_universal_pair(
    seed: int,
    dim: int = 2,
    max_attempts: Optional[int] = None,
    min_violation: Optional[float] = None,
) -> tuple[PTModel, PTModel, NonUniversalityResult]:
    """
    Seeded search for two unbroken models sharing P where H1 is an observable
    of model 1 but fails the condition under model 2 by more than
    min_violation (default 10 eps_pt).
    """
    attempts = get_config().pt.max_attempts if max_attempts is None else max_attempts
    threshold = 10 * get_config().tolerances.pt if min_violation is None else min_violation
    rng = np.random.default_rng(seed)
    P = exchange_parity(dim)
    for attempt in range(attempts):
        model_1 = random_unbroken_model(dim, rng, P, label="model_1")
        model_2 = random_unbroken_model(dim, rng, P, label="model_2")
        try:
            result = non_universality_demo(model_1.H, model_2.H, P, operator="h1")
        except CommonEigenvectorsError:
            continue
        if result.under_model_1.satisfies_condition and result.under_model_2.residual > threshold:
            logger.info(f"non-universal pair found after {attempt + 1} attempts (seed {seed})")
            return model_1, model_2, result
    raise NumericalFailureError(f"no non-universal pair within {attempts} attempts (seed {seed})")
