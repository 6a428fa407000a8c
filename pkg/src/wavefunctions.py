"""
Box Wavefunction Module for uncertainty-lab.
Closed-form and grid representations of wavefunctions on a finite interval,
with analytic or composite-Simpson pairing and 4th-order differentiation.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.integrate import simpson

from .config import get_config
from .errors import GridMismatchError, IntervalMismatchError, ZeroVectorError
from .serialization import encode_complex, encode_vector

logger = logging.getLogger(__name__)

# Samples used to estimate the sup norm of a closed form
SUP_NORM_SAMPLES = 4097

# Below this |kappa| * max(|a|, |b|) the moment integrals switch to a Taylor series
SERIES_THRESHOLD = 1.0
SERIES_TERMS = 40


class IntervalVariant(str, Enum):
    STANDARD = "standard"    # [0, l]
    SYMMETRIC = "symmetric"  # [-l/2, +l/2]


@dataclass(frozen=True)
class BoxInterval:
    """The interior [a, b] of an infinite square well."""
    a: float
    b: float
    variant: IntervalVariant

    def __post_init__(self):
        object.__setattr__(self, "variant", IntervalVariant(self.variant))
        if not self.a < self.b:
            raise ValueError(f"interval needs a < b, got [{self.a}, {self.b}]")
        if self.variant is IntervalVariant.STANDARD and self.a != 0.0:
            raise ValueError("standard interval must start at 0")
        if self.variant is IntervalVariant.SYMMETRIC and self.a != -self.b:
            raise ValueError("symmetric interval must be [-l/2, l/2]")

    @classmethod
    def standard(cls, length: Optional[float] = None) -> "BoxInterval":
        length = get_config().box.length if length is None else float(length)
        return cls(0.0, length, IntervalVariant.STANDARD)

    @classmethod
    def symmetric(cls, length: Optional[float] = None) -> "BoxInterval":
        length = get_config().box.length if length is None else float(length)
        return cls(-length / 2, length / 2, IntervalVariant.SYMMETRIC)

    @classmethod
    def of(cls, variant: str, length: Optional[float] = None) -> "BoxInterval":
        if IntervalVariant(variant) is IntervalVariant.STANDARD:
            return cls.standard(length)
        return cls.symmetric(length)

    @property
    def length(self) -> float:
        return self.b - self.a

    def grid(self, points: int) -> np.ndarray:
        return np.linspace(self.a, self.b, points)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "variant": self.variant.value, "length": self.length}


@dataclass(frozen=True)
class ExpPolyTerm:
    """coefficient * x**power * exp(i * wavenumber * x)"""
    coefficient: complex
    power: int
    wavenumber: float

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.coefficient * x ** self.power * np.exp(1j * self.wavenumber * x)

    def to_dict(self) -> dict:
        return {
            "coefficient": encode_complex(self.coefficient),
            "power": self.power,
            "wavenumber": self.wavenumber,
        }


def merge_terms(terms) -> tuple[ExpPolyTerm, ...]:
    """Combine terms sharing (power, wavenumber); drop exact zeros."""
    merged: dict[tuple[int, float], complex] = {}
    for term in terms:
        key = (term.power, term.wavenumber)
        merged[key] = merged.get(key, 0j) + complex(term.coefficient)
    return tuple(
        ExpPolyTerm(coefficient, power, wavenumber)
        for (power, wavenumber), coefficient in merged.items()
        if coefficient != 0
    )


def moment_integral(power: int, kappa: float, a: float, b: float) -> complex:
    """
    Exact value of the integral of x**power * exp(i*kappa*x) over [a, b].

    Uses integration by parts, or a Taylor series in kappa when the phase
    varies little over the interval.
    """
    reach = max(abs(a), abs(b))
    if abs(kappa) * reach < SERIES_THRESHOLD:
        total = 0j
        factor = 1.0 + 0j
        for j in range(SERIES_TERMS):
            if j > 0:
                factor *= 1j * kappa / j
            degree = power + j + 1
            total += factor * (b ** degree - a ** degree) / degree
        return total

    ik = 1j * kappa
    value = (np.exp(ik * b) - np.exp(ik * a)) / ik
    for m in range(1, power + 1):
        boundary = (b ** m * np.exp(ik * b) - a ** m * np.exp(ik * a)) / ik
        value = boundary - (m / ik) * value
    return complex(value)


def fourth_order_derivative(values: np.ndarray, spacing: float) -> np.ndarray:
    """
    d/dx of uniformly sampled values.

    4th-order central differences in the interior and 4th-order one-sided
    stencils on the two outermost points at each end.
    """
    f = np.asarray(values, dtype=complex)
    if f.size < 5:
        raise GridMismatchError("at least 5 grid points are needed for 4th-order stencils")
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / 12
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / 12
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / 12
    d[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / 12
    d[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / 12
    return d / spacing


class Representation(str, Enum):
    CLOSED_FORM = "closed_form"
    GRID = "grid"


@dataclass(frozen=True, eq=False)
class BoxWavefunction:
    """
    A wavefunction on a BoxInterval, zero outside the walls.

    Closed forms are finite sums of ExpPolyTerm, so boundary values,
    derivatives and pairings are exact. Anything else is a uniform grid
    including both endpoints.
    """
    interval: BoxInterval
    terms: Optional[tuple[ExpPolyTerm, ...]] = None
    samples: Optional[np.ndarray] = None
    tag: str = ""
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.terms is None) == (self.samples is None):
            raise ValueError("a wavefunction needs exactly one of terms or samples")
        if self.terms is not None:
            object.__setattr__(self, "terms", merge_terms(self.terms))
        else:
            samples = np.array(self.samples, dtype=complex).ravel()
            if samples.size < 5 or samples.size % 2 == 0:
                raise GridMismatchError(
                    f"grid needs an odd number (>= 5) of samples, got {samples.size}"
                )
            samples.setflags(write=False)
            object.__setattr__(self, "samples", samples)

    # Constructors

    @classmethod
    def closed_form(cls, interval: BoxInterval, terms, tag: str = "closed_form", **parameters):
        return cls(interval, terms=tuple(terms), tag=tag, parameters=parameters)

    @classmethod
    def from_samples(cls, interval: BoxInterval, samples, tag: str = "grid", **parameters):
        return cls(interval, samples=samples, tag=tag, parameters=parameters)

    @classmethod
    def from_function(
        cls,
        interval: BoxInterval,
        function: Callable[[np.ndarray], np.ndarray],
        points: Optional[int] = None,
        tag: str = "grid",
        **parameters,
    ) -> "BoxWavefunction":
        """Sample a vectorized callable on the default (or given) grid."""
        points = get_config().box.grid_points if points is None else points
        return cls.from_samples(interval, function(interval.grid(points)), tag=tag, **parameters)

    @classmethod
    def zero(cls, interval: BoxInterval) -> "BoxWavefunction":
        return cls.closed_form(interval, (), tag="zero")

    # Basic properties

    @property
    def representation(self) -> Representation:
        return Representation.CLOSED_FORM if self.terms is not None else Representation.GRID

    @property
    def is_closed_form(self) -> bool:
        return self.terms is not None

    @property
    def grid_points(self) -> Optional[int]:
        return None if self.samples is None else self.samples.size

    def evaluate(self, x) -> np.ndarray:
        """Values at points x (closed forms only, grids interpolate linearly)."""
        x = np.asarray(x, dtype=float)
        if self.is_closed_form:
            total = np.zeros(x.shape, dtype=complex)
            for term in self.terms:
                total = total + term.evaluate(x)
            return total
        nodes = self.interval.grid(self.samples.size)
        return np.interp(x, nodes, self.samples.real) + 1j * np.interp(x, nodes, self.samples.imag)

    @property
    def boundary_left(self) -> complex:
        if self.is_closed_form:
            return complex(self.evaluate(self.interval.a))
        return complex(self.samples[0])

    @property
    def boundary_right(self) -> complex:
        if self.is_closed_form:
            return complex(self.evaluate(self.interval.b))
        return complex(self.samples[-1])

    def grid_values(self, points: int) -> np.ndarray:
        if self.is_closed_form:
            return self.evaluate(self.interval.grid(points))
        if points != self.samples.size:
            raise GridMismatchError(f"grid has {self.samples.size} points, asked for {points}")
        return np.asarray(self.samples)

    def to_grid(self, points: Optional[int] = None) -> "BoxWavefunction":
        points = get_config().box.grid_points if points is None else points
        return BoxWavefunction.from_samples(
            self.interval, self.grid_values(points), tag=f"sampled_{self.tag}", **self.parameters
        )

    def sup_norm(self) -> float:
        if self.is_closed_form:
            values = self.evaluate(self.interval.grid(SUP_NORM_SAMPLES))
        else:
            values = self.samples
        return float(np.max(np.abs(values))) if values.size else 0.0

    # Algebra

    def _combine(self, other: "BoxWavefunction", sign: float, tag: str) -> "BoxWavefunction":
        if other.interval != self.interval:
            raise IntervalMismatchError(f"{self.interval} vs {other.interval}")
        if self.is_closed_form and other.is_closed_form:
            shifted = [ExpPolyTerm(sign * t.coefficient, t.power, t.wavenumber) for t in other.terms]
            return BoxWavefunction.closed_form(self.interval, self.terms + tuple(shifted), tag=tag)
        points = self.grid_points or other.grid_points
        values = self.grid_values(points) + sign * other.grid_values(points)
        return BoxWavefunction.from_samples(self.interval, values, tag=tag)

    def plus(self, other: "BoxWavefunction") -> "BoxWavefunction":
        return self._combine(other, 1.0, "combination")

    def minus(self, other: "BoxWavefunction") -> "BoxWavefunction":
        return self._combine(other, -1.0, "combination")

    def scaled(self, factor: complex) -> "BoxWavefunction":
        factor = complex(factor)
        if self.is_closed_form:
            terms = [ExpPolyTerm(factor * t.coefficient, t.power, t.wavenumber) for t in self.terms]
            return BoxWavefunction.closed_form(self.interval, terms, tag=self.tag, **self.parameters)
        return BoxWavefunction.from_samples(
            self.interval, factor * self.samples, tag=self.tag, **self.parameters
        )

    def times_x(self) -> "BoxWavefunction":
        """Pointwise multiplication by x."""
        if self.is_closed_form:
            terms = [ExpPolyTerm(t.coefficient, t.power + 1, t.wavenumber) for t in self.terms]
            return BoxWavefunction.closed_form(
                self.interval, terms, tag=f"x_times_{self.tag}", **self.parameters
            )
        x = self.interval.grid(self.samples.size)
        return BoxWavefunction.from_samples(
            self.interval, x * self.samples, tag=f"x_times_{self.tag}", **self.parameters
        )

    def derivative(self) -> "BoxWavefunction":
        if self.is_closed_form:
            terms = []
            for t in self.terms:
                terms.append(ExpPolyTerm(1j * t.wavenumber * t.coefficient, t.power, t.wavenumber))
                if t.power > 0:
                    terms.append(ExpPolyTerm(t.power * t.coefficient, t.power - 1, t.wavenumber))
            return BoxWavefunction.closed_form(
                self.interval, terms, tag=f"d_{self.tag}", **self.parameters
            )
        spacing = self.interval.length / (self.samples.size - 1)
        return BoxWavefunction.from_samples(
            self.interval,
            fourth_order_derivative(self.samples, spacing),
            tag=f"d_{self.tag}",
            **self.parameters,
        )

    def norm(self) -> float:
        return math.sqrt(max(inner_product(self, self).real, 0.0))

    def normalized(self) -> "BoxWavefunction":
        norm = self.norm()
        if norm == 0.0:
            raise ZeroVectorError("cannot normalize the zero wavefunction")
        return self.scaled(1.0 / norm)

    def to_dict(self) -> dict:
        data = {
            "interval": self.interval.to_dict(),
            "representation": self.representation.value,
            "tag": self.tag,
            "parameters": dict(self.parameters),
            "boundary_left": encode_complex(self.boundary_left),
            "boundary_right": encode_complex(self.boundary_right),
        }
        if self.is_closed_form:
            data["terms"] = [t.to_dict() for t in self.terms]
        else:
            data["samples"] = encode_vector(self.samples)
        return data


def inner_product(f: BoxWavefunction, g: BoxWavefunction) -> complex:
    """
    L2 pairing <f|g> = integral of conj(f) g over the box.

    Two closed forms are paired analytically; otherwise both are sampled on
    the grid of the grid operand and integrated by composite Simpson.
    """
    if f.interval != g.interval:
        raise IntervalMismatchError(f"{f.interval} vs {g.interval}")
    a, b = f.interval.a, f.interval.b

    if f.is_closed_form and g.is_closed_form:
        total = 0j
        for s in f.terms:
            for t in g.terms:
                total += (
                    np.conj(s.coefficient)
                    * t.coefficient
                    * moment_integral(s.power + t.power, t.wavenumber - s.wavenumber, a, b)
                )
        return complex(total)

    if not f.is_closed_form and not g.is_closed_form and f.grid_points != g.grid_points:
        raise GridMismatchError(f"grids of {f.grid_points} and {g.grid_points} points")
    points = f.grid_points or g.grid_points
    integrand = np.conj(f.grid_values(points)) * g.grid_values(points)
    x = f.interval.grid(points)
    return complex(simpson(integrand.real, x=x) + 1j * simpson(integrand.imag, x=x))


def plane_wave(interval: BoxInterval, wavenumber: float, tag: str = "plane_wave", **parameters):
    """(1/sqrt(l)) exp(i k x), unit norm on the interval."""
    amplitude = 1.0 / math.sqrt(interval.length)
    return BoxWavefunction.closed_form(
        interval, (ExpPolyTerm(amplitude, 0, float(wavenumber)),), tag=tag, **parameters
    )
