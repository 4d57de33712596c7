import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator
from scipy.special import gamma

from Levinson.exception import AccuracyError, ConfigurationError, DomainError, InterpolationDomainError
from Levinson.logger import get_logger

logger = get_logger(__name__)

FAMILIES = ("bump", "well", "table")
DIMENSIONS = (1, 2, 3, 4)

ArrayLike = Union[float, np.ndarray]


def sphere_volume(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1} (2 for n = 1)."""
    return 2.0 * math.pi ** (n / 2.0) / gamma(n / 2.0)


@dataclass(frozen=True)
class Moments:
    """Integrals over R^n feeding the high-energy coefficients"""
    I1: float
    I2: float
    sup_abs: float


@dataclass(frozen=True)
class Potential:
    """
    Radial potential with compact support in the ball of radius `radius`.

    bump:  V(r) = -d * exp(1 - 1/(1 - (r/a)^2)) for r < a
    well:  V(r) = -d for r < a
    table: monotone cubic interpolation of (r, V) samples ending at (a, 0)
    """
    dimension: int
    family: str
    depth: float
    radius: float
    table: Optional[Tuple[Tuple[float, ...], Tuple[float, ...]]] = None
    _interp: Optional[PchipInterpolator] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dimension not in DIMENSIONS:
            raise DomainError(f"Unsupported dimension n={self.dimension}; expected one of {DIMENSIONS}")
        if self.family not in FAMILIES:
            raise DomainError(f"Unknown potential family '{self.family}'")
        if not self.radius > 0:
            raise DomainError(f"Support radius must be positive, got {self.radius}")
        if self.family == "table":
            if self.table is None:
                raise ConfigurationError("Table family requires (r, V) samples")
            r, v = (np.asarray(col, dtype=float) for col in self.table)
            if r.size < 2 or np.any(np.diff(r) <= 0):
                raise ConfigurationError("Table radii must be strictly increasing")
            if not math.isclose(r[-1], self.radius) or v[-1] != 0.0:
                raise ConfigurationError("Table samples must end at (a, 0)")
            object.__setattr__(self, "_interp", PchipInterpolator(r, v, extrapolate=False))

    @classmethod
    def from_table_file(cls, path: str, dimension: int) -> "Potential":
        """Load a two-column (r, V) whitespace separated file."""
        try:
            frame = pd.read_csv(path, sep=r"\s+", header=None, comment="#")
        except (OSError, ValueError) as e:
            raise ConfigurationError(f"Could not read potential table {path}: {e}")
        if frame.shape[1] != 2:
            raise ConfigurationError(f"Potential table {path} must have two columns")
        r = tuple(frame[0].astype(float))
        v = tuple(frame[1].astype(float))
        return cls(dimension=dimension, family="table", depth=1.0, radius=r[-1], table=(r, v))

    @classmethod
    def zero(cls, dimension: int, radius: float = 1.0) -> "Potential":
        return cls(dimension=dimension, family="well", depth=0.0, radius=radius)

    @property
    def sup_abs(self) -> float:
        if self.family == "table":
            return float(np.max(np.abs(self.table[1])))
        return abs(self.depth)

    @property
    def is_zero(self) -> bool:
        return self.sup_abs == 0.0

    @property
    def energy_scale(self) -> float:
        """max|V| + a^-2, the natural energy unit of the potential"""
        return self.sup_abs + self.radius ** -2

    def scaled(self, c: float) -> "Potential":
        """The potential c*V."""
        if self.family == "table":
            r, v = self.table
            return replace(self, table=(r, tuple(c * x for x in v)))
        return replace(self, depth=c * self.depth)

    def dilated(self, factor: float) -> "Potential":
        """The potential V(r / factor)."""
        if self.family == "table":
            r, v = self.table
            return replace(self, radius=self.radius * factor, table=(tuple(factor * x for x in r), v))
        return replace(self, radius=self.radius * factor)

    def evaluate(self, r: ArrayLike) -> ArrayLike:
        if np.ndim(r) == 0:
            return self._evaluate_scalar(float(r))
        return np.array([self._evaluate_scalar(float(x)) for x in np.ravel(r)]).reshape(np.shape(r))

    def _evaluate_scalar(self, r: float) -> float:
        if r < 0:
            raise DomainError(f"Radius must be nonnegative, got {r}")
        a = self.radius
        if r >= a:
            return 0.0
        if self.family == "well":
            return -self.depth
        if self.family == "bump":
            x = r / a
            return -self.depth * math.exp(1.0 - 1.0 / (1.0 - x * x))
        value = self._interp(r)
        if np.isnan(value):
            raise InterpolationDomainError(
                f"r={r} lies inside the support but outside the table range "
                f"[{self.table[0][0]}, {self.table[0][-1]}]"
            )
        return float(value)

    def breakpoints(self) -> Tuple[float, ...]:
        """Radii where V is not smooth."""
        if self.family == "table":
            return tuple(self.table[0])
        return (self.radius,)


def evaluate(V: Potential, r: ArrayLike) -> ArrayLike:
    return V.evaluate(r)


def _radial_integral(V: Potential, power: int, quad_tol: float) -> float:
    n = V.dimension
    a = V.radius
    points = [p for p in V.breakpoints() if 0 < p < a] or None
    integrand = lambda r: V._evaluate_scalar(r) ** power * r ** (n - 1)
    result = quad(integrand, 0.0, a, epsabs=0.0, epsrel=quad_tol, limit=200, points=points, full_output=1)
    value, abserr = result[0], result[1]
    if len(result) > 3 or abserr > max(quad_tol * abs(value), 1e-300):
        raise AccuracyError(
            f"Moment quadrature (power {power}) did not reach relative tolerance {quad_tol}; "
            f"estimate {value} +/- {abserr}",
            estimate=value,
        )
    return value


def moments(V: Potential, quad_tol: float = 1e-10) -> Moments:
    """I1 = int V, I2 = int V^2 over R^n by adaptive quadrature on [0, a]."""
    if not quad_tol > 0:
        raise DomainError(f"quad_tol must be positive, got {quad_tol}")
    if V.is_zero:
        return Moments(I1=0.0, I2=0.0, sup_abs=0.0)
    surface = sphere_volume(V.dimension)
    I1 = surface * _radial_integral(V, 1, quad_tol)
    I2 = surface * _radial_integral(V, 2, quad_tol)
    logger.debug(f"Moments for {V.family} n={V.dimension}: I1={I1:.12g}, I2={I2:.12g}")
    return Moments(I1=I1, I2=I2, sup_abs=V.sup_abs)
