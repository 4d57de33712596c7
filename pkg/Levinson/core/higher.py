"""
High-energy polynomials for the spectral shift function.

    P_n(lambda) = 2 pi i beta_n + sum_l C_l lambda^(n/2 - l)
    p_n(lambda) = P_n'(lambda) = sum_l c_l lambda^(n/2 - l - 1),  c_l = (n/2 - l) C_l

Closed forms are provided for n = 1..4 only.
"""
import math
from dataclasses import dataclass
from typing import Tuple

from Levinson.core.potential import Moments, sphere_volume
from Levinson.exception import DomainError


@dataclass(frozen=True)
class HighEnergyData:
    n: int
    C: Tuple[complex, ...]
    c: Tuple[complex, ...]
    beta: float

    def exponents(self) -> Tuple[float, ...]:
        return tuple(self.n / 2.0 - l for l in range(1, len(self.C) + 1))


def first_order_coefficient(n: int, M: Moments) -> complex:
    """C_1(n, V) = -(2 pi i) Vol(S^{n-1}) / (2 (2 pi)^n) * int V."""
    if n < 2:
        raise DomainError(f"first_order_coefficient needs n >= 2, got {n}")
    return -2j * math.pi * sphere_volume(n) / (2.0 * (2.0 * math.pi) ** n) * M.I1


def high_energy(n: int, M: Moments) -> HighEnergyData:
    if n == 1:
        return HighEnergyData(n=1, C=(), c=(), beta=0.0)
    if n == 2:
        # C_{n/2} is absorbed into beta_2 = C_1 / (2 pi i)
        beta = (first_order_coefficient(2, M) / (2j * math.pi)).real
        return HighEnergyData(n=2, C=(), c=(), beta=beta)
    if n == 3:
        C1 = first_order_coefficient(3, M)
        return HighEnergyData(n=3, C=(C1,), c=(0.5 * C1,), beta=0.0)
    if n == 4:
        C1 = first_order_coefficient(4, M)
        beta = sphere_volume(4) / (4.0 * (2.0 * math.pi) ** 4) * M.I2
        return HighEnergyData(n=4, C=(C1,), c=(C1,), beta=beta)
    raise DomainError(f"High-energy coefficients are only available for n in 1..4, got {n}")


def _shifted(lam: float, alpha: float) -> float:
    x = lam - alpha
    if not x > 0:
        raise DomainError(f"High-energy polynomials need lambda - alpha > 0, got {x}")
    return x


def pn_eval(H: HighEnergyData, lam: float, alpha: float = 0.0) -> complex:
    """p_n(lambda - alpha); alpha shifts the pair (H + alpha, H0 + alpha)."""
    x = _shifted(lam, alpha)
    return complex(sum(c * x ** (e - 1.0) for c, e in zip(H.c, H.exponents())))


def Pn_eval(H: HighEnergyData, lam: float, alpha: float = 0.0) -> complex:
    x = _shifted(lam, alpha)
    return 2j * math.pi * H.beta + complex(sum(C * x ** e for C, e in zip(H.C, H.exponents())))


def polynomial_part(H: HighEnergyData, lam: float) -> float:
    """beta_n + (1/2 pi i) sum C_l lambda^(n/2 - l), the large-lambda limit of -xi."""
    return (Pn_eval(H, lam) / (2j * math.pi)).real
