import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from Levinson.exception import DomainError, RangeError


@dataclass(frozen=True)
class BesselPair:
    """Riccati-Bessel values j = sqrt(pi x/2) J_mu(x), y = sqrt(pi x/2) Y_mu(x) and x-derivatives"""
    j: float
    y: float
    jp: float
    yp: float

    @property
    def wronskian(self) -> float:
        return self.j * self.yp - self.jp * self.y


def _is_half_integer(mu: float) -> bool:
    return math.isclose(mu - math.floor(mu), 0.5, abs_tol=1e-12)


def riccati_bessel(mu: float, x: float) -> BesselPair:
    """
    Riccati-Bessel pair of real order mu >= 0 at x > 0.

    Half-integer orders go through the spherical Bessel closed forms
    (j_hat_{l+1/2}(x) = x j_l(x)), other orders through J_mu, Y_mu.
    """
    if mu < 0 or not x > 0:
        raise DomainError(f"riccati_bessel needs mu >= 0 and x > 0, got mu={mu}, x={x}")

    if _is_half_integer(mu):
        l = int(round(mu - 0.5))
        jl = special.spherical_jn(l, x)
        yl = special.spherical_yn(l, x)
        jlp = special.spherical_jn(l, x, derivative=True)
        ylp = special.spherical_yn(l, x, derivative=True)
        pair = BesselPair(j=x * jl, y=x * yl, jp=jl + x * jlp, yp=yl + x * ylp)
    else:
        s = math.sqrt(math.pi * x / 2.0)
        J, Y = special.jv(mu, x), special.yv(mu, x)
        Jp, Yp = special.jvp(mu, x), special.yvp(mu, x)
        pair = BesselPair(j=s * J, y=s * Y, jp=s * (Jp + J / (2.0 * x)), yp=s * (Yp + Y / (2.0 * x)))

    if not all(np.isfinite((pair.j, pair.y, pair.jp, pair.yp))):
        raise RangeError(f"Riccati-Bessel pair of order {mu} overflows at x={x}")
    return pair


def gamma_fn(x: float) -> float:
    if x <= 0 and float(x).is_integer():
        raise DomainError(f"Gamma function has a pole at {x}")
    return float(special.gamma(x))


def riccati_j(mu: float, x: float) -> float:
    """Regular Riccati-Bessel value only; underflows quietly to 0 under the centrifugal barrier."""
    if not x > 0:
        raise DomainError(f"riccati_j needs x > 0, got {x}")
    if mu == -0.5:
        return math.cos(x)
    return math.sqrt(math.pi * x / 2.0) * float(special.jv(mu, x))
