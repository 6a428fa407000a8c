"""
Particle-in-a-Box Module for uncertainty-lab.
Self-adjoint momentum extensions, domain audits, the modified position
operator X_M and uncertainty reports for the position/momentum pair.
"""

import logging
import math
from dataclasses import dataclass, asdict
from enum import Enum
from typing import Optional

import numpy as np

from .config import get_config
from .errors import (
    IntervalMismatchError,
    NotNormalizedError,
    NumericalFailureError,
    OutOfDomainError,
    UnsupportedIntervalError,
)
from .serialization import encode_complex
from .wavefunctions import (
    BoxInterval,
    BoxWavefunction,
    ExpPolyTerm,
    IntervalVariant,
    inner_product,
    plane_wave,
)

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class MomentumExtension:
    """
    The self-adjoint momentum P^theta on a box.

    Its domain holds the functions obeying f(b) = e^{i theta} f(a).
    """
    theta: float
    interval: BoxInterval
    hbar: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.theta < TWO_PI:
            raise ValueError(f"theta must lie in [0, 2pi), got {self.theta}")
        hbar = get_config().box.hbar if self.hbar is None else float(self.hbar)
        if hbar <= 0:
            raise ValueError(f"hbar must be positive, got {hbar}")
        object.__setattr__(self, "hbar", hbar)

    @classmethod
    def wrapped(cls, theta: float, interval: BoxInterval, hbar: Optional[float] = None):
        """Build the extension for any real theta, reduced mod 2pi."""
        return cls(float(theta) % TWO_PI, interval, hbar)

    def to_dict(self) -> dict:
        return {"theta": self.theta, "interval": self.interval.to_dict(), "hbar": self.hbar}


@dataclass(frozen=True)
class DomainVerdict:
    """Boundary-law audit of a wavefunction against one extension."""
    in_domain: bool
    residual: float
    shifted_theta: Optional[float]
    note: str
    theta: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


class BoundFormula(str, Enum):
    CANONICAL_HALF_HBAR = "canonical_half_hbar"
    XM_BOUNDARY_FORMULA = "xm_boundary_formula"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class BoxUncertaintyReport:
    delta_x: float
    delta_p: Optional[float]
    product: Optional[float]
    commutator_defined: bool
    bound: Optional[float]
    bound_formula: BoundFormula
    in_domain: bool
    printed_bound: Optional[float] = None
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        data = asdict(self)
        data["bound_formula"] = self.bound_formula.value
        data["notes"] = list(self.notes)
        return data


@dataclass(frozen=True)
class CommutatorExpectation:
    """<f|[P, X]|f>, or Undefined with the factor that leaves the domain."""
    defined: bool
    value: Optional[complex]
    offending_factor: Optional[str] = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "defined": self.defined,
            "value": None if self.value is None else encode_complex(self.value),
            "offending_factor": self.offending_factor,
            "note": self.note,
        }


# Spectrum of P^theta

def eigenvalue(ext: MomentumExtension, n: int) -> float:
    """p_n = hbar (2 pi n + theta) / l"""
    return ext.hbar * (TWO_PI * n + ext.theta) / ext.interval.length


def eigenfunction(ext: MomentumExtension, n: int) -> BoxWavefunction:
    """u_n(x) = (1/sqrt(l)) exp(i p_n x / hbar)"""
    wavenumber = (TWO_PI * n + ext.theta) / ext.interval.length
    return plane_wave(ext.interval, wavenumber, tag="plane_wave", n=int(n), theta=ext.theta)


# Operators

def apply_position(f: BoxWavefunction) -> BoxWavefunction:
    """X f = x f (unnormalized)."""
    return f.times_x()


def _boundary_tolerance(f: BoxWavefunction) -> float:
    tolerances = get_config().tolerances
    return tolerances.bc_closed if f.is_closed_form else tolerances.bc_grid


def _best_theta(left: complex, right: complex, scale: float, tolerance: float) -> Optional[float]:
    """The theta' in [0, 2pi) minimizing |right - e^{i theta'} left|, if it meets the tolerance."""
    if abs(left) > tolerance * scale:
        candidate = float(np.angle(right / left)) % TWO_PI
        residual = abs(right - np.exp(1j * candidate) * left) / scale
        return candidate if residual <= tolerance else None

    # Left value (numerically) zero: scan the periodic residual.
    thetas = np.linspace(0.0, TWO_PI, get_config().box.theta_scan_points, endpoint=False)
    residuals = np.abs(right - np.exp(1j * thetas) * left) / scale
    index = int(np.argmin(residuals))
    if residuals[index] <= tolerance:
        logger.debug(f"theta scan fallback picked {thetas[index]:.6f}")
        return float(thetas[index])
    return None


def domain_check(f: BoxWavefunction, ext: MomentumExtension) -> DomainVerdict:
    """
    Check f(b) = e^{i theta} f(a).

    Args:
        f: Wavefunction on the extension's interval
        ext: Momentum extension

    Returns:
        DomainVerdict with the normalized boundary residual and, when f
        violates this law but obeys another one, the matching theta'
    """
    if f.interval != ext.interval:
        raise IntervalMismatchError(f"{f.interval} vs {ext.interval}")
    left, right = f.boundary_left, f.boundary_right
    scale = max(f.sup_norm(), 1.0)
    tolerance = _boundary_tolerance(f)

    residual = abs(right - np.exp(1j * ext.theta) * left) / scale
    if residual <= tolerance:
        return DomainVerdict(True, residual, None, "boundary law satisfied", ext.theta)

    shifted = _best_theta(left, right, scale, tolerance)
    if shifted is None:
        note = (
            f"f(b) = {right:.6g} cannot equal e^(i theta) f(a) = e^(i theta) {left:.6g} "
            f"for any theta"
        )
    else:
        note = f"boundary law holds for theta' = {shifted:.12g} instead"
    return DomainVerdict(False, residual, shifted, note, ext.theta)


def apply_momentum(f: BoxWavefunction, ext: MomentumExtension) -> BoxWavefunction:
    """
    P^theta f = -i hbar f'.

    Raises:
        OutOfDomainError: f violates the boundary law of ext
    """
    verdict = domain_check(f, ext)
    if not verdict.in_domain:
        raise OutOfDomainError(verdict.residual, ext.theta)
    return f.derivative().scaled(-1j * ext.hbar)


def in_dirichlet_domain(f: BoxWavefunction) -> DomainVerdict:
    """
    Membership in the domain of the symmetric (not self-adjoint) momentum,
    f(a) = f(b) = 0. Such functions lie in every D(P^theta).
    """
    scale = max(f.sup_norm(), 1.0)
    residual = max(abs(f.boundary_left), abs(f.boundary_right)) / scale
    in_domain = residual <= _boundary_tolerance(f)
    note = "vanishes at both walls" if in_domain else "nonzero wall value"
    return DomainVerdict(in_domain, residual, None, note)


# Spreads

def position_spread(f: BoxWavefunction) -> float:
    """||(X - <X>) f|| for normalized f."""
    xf = apply_position(f)
    mean = inner_product(f, xf).real
    return xf.minus(f.scaled(mean)).norm()


def momentum_spread(f: BoxWavefunction, ext: MomentumExtension) -> float:
    """||(P - <P>) f||, raising OutOfDomainError outside D(P^theta)."""
    pf = apply_momentum(f, ext)
    mean = inner_product(f, pf).real
    return pf.minus(f.scaled(mean)).norm()


def _require_normalized(f: BoxWavefunction) -> None:
    tolerances = get_config().tolerances
    tolerance = tolerances.norm if f.is_closed_form else tolerances.quad
    norm = f.norm()
    if abs(norm - 1.0) > tolerance:
        raise NotNormalizedError(f"wavefunction norm is {norm!r}, expected 1")


def _require_symmetric(f: BoxWavefunction) -> None:
    if f.interval.variant is not IntervalVariant.SYMMETRIC:
        raise UnsupportedIntervalError("X_M is defined on the symmetric box [-l/2, l/2]")


# Canonical commutator

def commutator_expectation_canonical(f: BoxWavefunction, ext: MomentumExtension) -> CommutatorExpectation:
    """
    <f|P X|f> - <f|X P|f>, defined only when f and X f both lie in D(P^theta).
    """
    if not domain_check(f, ext).in_domain:
        return CommutatorExpectation(
            False, None, "X P", "P acts on f outside D(P^theta)"
        )
    xf = apply_position(f)
    position_verdict = domain_check(xf, ext)
    if not position_verdict.in_domain:
        return CommutatorExpectation(
            False,
            None,
            "P X",
            f"X f is not in D(P^theta): {position_verdict.note}",
        )

    pxf = apply_momentum(xf, ext)
    xpf = apply_position(apply_momentum(f, ext))
    value = inner_product(f, pxf) - inner_product(f, xpf)
    return CommutatorExpectation(True, complex(value), None, "both factors in the domain")


def canonical_uncertainty_report(f: BoxWavefunction, ext: MomentumExtension) -> BoxUncertaintyReport:
    """Delta X * Delta P^theta against 1/2 |<[P, X]>| when the latter exists."""
    _require_normalized(f)
    notes = []
    delta_x = position_spread(f)
    in_domain = domain_check(f, ext).in_domain

    delta_p = product = None
    if in_domain:
        delta_p = momentum_spread(f, ext)
        product = delta_x * delta_p
    else:
        notes.append("f is outside D(P^theta); Delta P is not defined")

    comm = commutator_expectation_canonical(f, ext)
    if not comm.defined:
        notes.append(f"<[P, X]> does not exist: offending factor {comm.offending_factor}")
        return BoxUncertaintyReport(
            delta_x=delta_x,
            delta_p=delta_p,
            product=product,
            commutator_defined=False,
            bound=None,
            bound_formula=BoundFormula.UNDEFINED,
            in_domain=in_domain,
            notes=tuple(notes),
        )

    bound = 0.5 * abs(comm.value)
    _check_floor(product, bound)
    return BoxUncertaintyReport(
        delta_x=delta_x,
        delta_p=delta_p,
        product=product,
        commutator_defined=True,
        bound=bound,
        bound_formula=BoundFormula.CANONICAL_HALF_HBAR,
        in_domain=in_domain,
        notes=tuple(notes),
    )


def _check_floor(product: Optional[float], bound: float) -> None:
    if product is not None and product < bound - get_config().tolerances.quad:
        raise NumericalFailureError(
            f"uncertainty product {product:.12g} below bound {bound:.12g}"
        )


# Modified position operator

def xm_apply(f: BoxWavefunction) -> BoxWavefunction:
    """
    X_M f = x Theta(l/2 + x) Theta(l/2 - x) f(x).

    Box wavefunctions vanish outside the walls, so this is x f.
    """
    _require_symmetric(f)
    return apply_position(f)


def xm_commutator_expectation(f: BoxWavefunction, hbar: Optional[float] = None) -> complex:
    """
    <f|[P, X_M]|f> for normalized f from its wall values:
    i hbar (l/2) (|f(-l/2)|^2 + |f(l/2)|^2) - i hbar.
    """
    _require_symmetric(f)
    _require_normalized(f)
    hbar = get_config().box.hbar if hbar is None else hbar
    half = f.interval.length / 2
    walls = abs(f.boundary_left) ** 2 + abs(f.boundary_right) ** 2
    return complex(0.0, hbar * (half * walls - 1.0))


def xm_commutator_quadrature(
    f: BoxWavefunction,
    hbar: Optional[float] = None,
    grid_points: Optional[int] = None,
) -> complex:
    """
    <P f|X_M f> - <X_M f|P f> with P = -i hbar d/dx applied without any
    boundary law.

    Closed forms are paired analytically unless grid_points forces sampling.
    """
    _require_symmetric(f)
    hbar = get_config().box.hbar if hbar is None else hbar
    if grid_points is not None and f.is_closed_form:
        f = f.to_grid(grid_points)
    pf = f.derivative().scaled(-1j * hbar)
    xf = xm_apply(f)
    return inner_product(pf, xf) - inner_product(xf, pf)


def xm_printed_bound(f: BoxWavefunction, hbar: float) -> float:
    """hbar |(l/2) 2 |f(-l/2)|^2 - 1|: no 1/2 factor and the left wall counted twice."""
    half = f.interval.length / 2
    return hbar * abs(half * 2 * abs(f.boundary_left) ** 2 - 1.0)


def xm_uncertainty_report(f: BoxWavefunction, ext: MomentumExtension) -> BoxUncertaintyReport:
    """
    Delta X_M * Delta P^theta against 1/2 |<[P, X_M]>|.

    Args:
        f: Normalized wavefunction on the symmetric box
        ext: Momentum extension on the same box

    Returns:
        BoxUncertaintyReport using the boundary formula
    """
    _require_symmetric(f)
    _require_normalized(f)
    if f.interval != ext.interval:
        raise IntervalMismatchError(f"{f.interval} vs {ext.interval}")

    notes = [
        "bound uses 1/2 |<[P, X_M]>|; printed_bound omits the 1/2",
        "boundary terms pair f(-l/2) with f(+l/2); the printed form repeats f(-l/2)",
    ]
    xf = xm_apply(f)
    mean_x = inner_product(f, xf).real
    delta_x = xf.minus(f.scaled(mean_x)).norm()

    delta_p = product = None
    in_domain = True
    try:
        delta_p = momentum_spread(f, ext)
        product = delta_x * delta_p
    except OutOfDomainError as e:
        in_domain = False
        notes.append(f"OutOfDomain: {e}")

    bound = 0.5 * abs(xm_commutator_expectation(f, ext.hbar))
    _check_floor(product, bound)

    return BoxUncertaintyReport(
        delta_x=delta_x,
        delta_p=delta_p,
        product=product,
        commutator_defined=True,
        bound=bound,
        bound_formula=BoundFormula.XM_BOUNDARY_FORMULA,
        in_domain=in_domain,
        printed_bound=xm_printed_bound(f, ext.hbar),
        notes=tuple(notes),
    )


# Test states

def wall_vanishing_state(interval: BoxInterval) -> BoxWavefunction:
    """
    sqrt(2/l) cos(pi x / l) on the symmetric box, sqrt(2/l) sin(pi x / l)
    on the standard one. Zero at both walls.
    """
    length = interval.length
    k = math.pi / length
    amplitude = math.sqrt(2.0 / length) / 2
    if interval.variant is IntervalVariant.SYMMETRIC:
        terms = (ExpPolyTerm(amplitude, 0, k), ExpPolyTerm(amplitude, 0, -k))
        tag = "cos"
    else:
        terms = (ExpPolyTerm(-1j * amplitude, 0, k), ExpPolyTerm(1j * amplitude, 0, -k))
        tag = "sin"
    return BoxWavefunction.closed_form(interval, terms, tag=tag, wavenumber=k)


def random_phase_state(
    interval: BoxInterval,
    rng: np.random.Generator,
    modes: int = 3,
    points: Optional[int] = None,
) -> BoxWavefunction:
    """
    Grid state (1/sqrt(l)) exp(i g(x)) with a smooth random real phase g.
    Its modulus is 1/sqrt(l) everywhere, walls included.
    """
    length = interval.length
    amplitudes = rng.uniform(-1.0, 1.0, size=modes)
    offsets = rng.uniform(0.0, TWO_PI, size=modes)

    def phase(x):
        g = np.zeros_like(x)
        for j in range(modes):
            g = g + amplitudes[j] * np.sin((j + 1) * math.pi * x / length + offsets[j])
        return np.exp(1j * g) / math.sqrt(length)

    return BoxWavefunction.from_function(interval, phase, points, tag="random_phase")


def random_smooth_state(interval: BoxInterval, rng: np.random.Generator, modes: int = 3) -> BoxWavefunction:
    """Normalized closed-form sum of a few plane waves with random wavenumbers."""
    length = interval.length
    coefficients = rng.normal(size=modes) + 1j * rng.normal(size=modes)
    wavenumbers = rng.uniform(-3 * math.pi, 3 * math.pi, size=modes) / length
    terms = [ExpPolyTerm(complex(c), 0, float(k)) for c, k in zip(coefficients, wavenumbers)]
    return BoxWavefunction.closed_form(interval, terms, tag="random_smooth").normalized()
