"""
Bound-state counting and zero-energy classification.

N comes from Sturm oscillation: the nodes of the zero-energy regular
solution of each channel, with the exterior continued analytically through
u = A f1 + B f2 beyond the support.
"""
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal
from scipy.optimize import brentq

from Levinson.core.potential import Potential
from Levinson.core.radial import (
    Channel,
    channels,
    growth_fraction,
    integrate_regular,
    zero_energy_coefficients,
)
from Levinson.exception import AmbiguousThresholdWarning, DomainError, RefinementError, warn
from Levinson.logger import get_logger
from Levinson.utils.helpers import channel_box

logger = get_logger(__name__)

ZERO_TOL = 1e-6
AMBIGUOUS_TOL = 1e-4
NODE_FLOOR = 1e-8
SAMPLES = 512


class Resonance(str, Enum):
    NONE = "none"
    N1_EVEN = "n1_even"
    N1_ODD = "n1_odd"
    N2_S = "n2_s"
    N2_P = "n2_p"
    N3_S = "n3_s"
    N4_S = "n4_s"


@dataclass
class SpectralReport:
    per_channel: List[Tuple[Channel, int]]
    N: int
    N0: int
    resonance: Resonance
    N_res: Fraction
    p_count: int = 0
    s_resonance: bool = False
    ambiguous: bool = False
    growth: Dict[str, float] = field(default_factory=dict)


def _centrifugal_dominance(V: Potential, ch: Channel) -> bool:
    return ch.centrifugal > V.radius ** 2 * V.sup_abs


def _sign_changes(u: np.ndarray) -> Tuple[int, bool, float]:
    """Sign changes of u skipping samples below NODE_FLOOR * max|u|; also reports interior tangencies."""
    floor = NODE_FLOOR * np.max(np.abs(u))
    kept = np.nonzero(np.abs(u) > floor)[0]
    signs = np.sign(u[kept])
    changes = int(np.count_nonzero(signs[1:] != signs[:-1]))
    gaps = np.diff(kept) > 1
    tangency = bool(np.any(gaps & (signs[1:] == signs[:-1])))
    return changes, tangency, float(signs[-1])


def count_channel(V: Potential, ch: Channel, step_tol: float = 1e-11, samples: int = SAMPLES) -> int:
    """Negative eigenvalues of the channel operator, by Sturm oscillation."""
    if V.is_zero:
        return 0
    for attempt in range(4):
        sol = integrate_regular(V, ch, 0.0, step_tol=step_tol, samples=samples * 4 ** attempt)
        inside, tangency, sign_at_a = _sign_changes(sol.u)
        if not tangency:
            break
        logger.debug(f"Ambiguous node in channel {ch.label}; refining sampling x4")
    else:
        raise RefinementError(f"Node of the zero-energy solution in channel {ch.label} not resolved")

    A, B = zero_energy_coefficients(V, ch, step_tol)
    frac = growth_fraction(V, ch, A, B)
    sign_at_infinity = math.copysign(1.0, B) if abs(frac) <= ZERO_TOL else math.copysign(1.0, A)
    return inside + int(sign_at_infinity != sign_at_a)


def _low_channels(V: Potential) -> List[Channel]:
    """Channels that can carry a zero-energy bound state or resonance."""
    n = V.dimension
    if n == 1:
        return channels(1, 1)
    out = []
    for ch in channels(n, 1000):
        if ch.l > 1 and _centrifugal_dominance(V, ch):
            break
        out.append(ch)
    return out


def classify_zero_energy(V: Potential, n: Optional[int] = None, step_tol: float = 1e-11):
    """
    (N0, resonance, N_res, details) from the zero-energy growth coefficients.

    N_res: n=1 gives 0 with a parity resonance and -1/2 otherwise (generic
    xi(0+) = -N + 1/2); n=2 counts p-wave harmonics with A = 0; n=3 gives 1/2
    and n=4 gives 1 for an s-wave resonance. Zero eigenvalues count channels
    with mu > 1 and A = 0, weighted by multiplicity.
    """
    n = V.dimension if n is None else n
    if n != V.dimension:
        raise DomainError(f"Potential lives in n={V.dimension}, asked to classify for n={n}")

    flags = {}
    growth = {}
    ambiguous = False
    for ch in _low_channels(V):
        A, B = zero_energy_coefficients(V, ch, step_tol)
        frac = abs(growth_fraction(V, ch, A, B))
        growth[ch.label] = frac
        flags[ch.label] = (ch, frac <= ZERO_TOL)
        if ZERO_TOL < frac < AMBIGUOUS_TOL:
            ambiguous = True
            warn(
                f"Channel {ch.label}: growth fraction {frac:.3e} is near the threshold; "
                f"classified as {'zero' if frac <= ZERO_TOL else 'nonzero'}, the other reading "
                f"would flip the resonance assignment",
                AmbiguousThresholdWarning,
            )

    N0 = sum(ch.m for ch, zero in flags.values() if zero and ch.mu > 1)

    resonance = Resonance.NONE
    N_res = Fraction(0)
    p_count = 0
    s_resonance = False
    if n == 1:
        if flags["even"][1]:
            resonance = Resonance.N1_EVEN
        elif flags["odd"][1]:
            resonance = Resonance.N1_ODD
        N_res = Fraction(0) if resonance != Resonance.NONE else Fraction(-1, 2)
    elif n == 2:
        s_resonance = flags["l0"][1]
        p_ch, p_zero = flags["l1"]
        p_count = p_ch.m if p_zero else 0
        if p_count:
            resonance = Resonance.N2_P
        elif s_resonance:
            resonance = Resonance.N2_S
        N_res = Fraction(p_count)
    elif n == 3 and flags["l0"][1]:
        resonance, N_res = Resonance.N3_S, Fraction(1, 2)
    elif n == 4 and flags["l0"][1]:
        resonance, N_res = Resonance.N4_S, Fraction(1)

    details = {"p_count": p_count, "s_resonance": s_resonance, "ambiguous": ambiguous, "growth": growth}
    return N0, resonance, N_res, details


def total_counts(V: Potential, l_max: Optional[int] = None, step_tol: float = 1e-11) -> SpectralReport:
    n = V.dimension
    chans = channels(n, l_max if l_max is not None else 1000)
    per_channel = []
    for ch in chans:
        count = count_channel(V, ch, step_tol)
        per_channel.append((ch, count))
        if n > 1 and count == 0 and _centrifugal_dominance(V, ch):
            break
    if l_max is not None and n > 1 and not _centrifugal_dominance(V, chans[-1]):
        logger.warning(f"l_max={l_max} is below the centrifugal-dominance cutoff; N may be undercounted")

    N = sum(ch.m * c for ch, c in per_channel)
    N0, resonance, N_res, details = classify_zero_energy(V, n, step_tol)
    logger.info(f"Bound states N={N}, N0={N0}, resonance={resonance.value}, N_res={N_res}")
    return SpectralReport(
        per_channel=per_channel,
        N=N,
        N0=N0,
        resonance=resonance,
        N_res=N_res,
        p_count=details["p_count"],
        s_resonance=details["s_resonance"],
        ambiguous=details["ambiguous"],
        growth=details["growth"],
    )


def threshold_phases(report: SpectralReport) -> Dict[str, float]:
    """
    delta_l(0+) per channel label on the branch with delta_l(inf) = 0: pi per
    bound state, plus pi/2 in a resonant n = 2 p-wave channel.
    """
    out = {}
    for ch, count in report.per_channel:
        value = math.pi * count
        if report.p_count and ch.n == 2 and ch.l == 1:
            value += math.pi / 2.0
        out[ch.label] = value
    return out


def box_counts(V: Potential, ch: Channel, L: Optional[float] = None, points: int = 4000) -> int:
    """Negative eigenvalues of the finite-difference channel matrix on [0, L], L = 20a by default."""
    L = 20.0 * V.radius if L is None else L
    diag, off = channel_box(V, ch, L, points)
    return int(np.count_nonzero(eigvalsh_tridiagonal(diag, off) < 0))


def box_total(V: Potential, L: Optional[float] = None, points: int = 4000) -> int:
    """Multiplicity-weighted box count over channels up to centrifugal dominance."""
    total = 0
    for ch in channels(V.dimension, 1000):
        count = box_counts(V, ch, L, points)
        total += ch.m * count
        if V.dimension == 1:
            continue
        if count == 0 and _centrifugal_dominance(V, ch):
            break
    return total


def lowest_eigenvalue(V: Potential, ch: Channel, L: Optional[float] = None, points: int = 4000) -> float:
    """nu: the smallest box eigenvalue of the channel, the eigenvalue furthest below zero."""
    L = 20.0 * V.radius if L is None else L
    diag, off = channel_box(V, ch, L, points)
    return float(eigvalsh_tridiagonal(diag, off, select="i", select_range=(0, 0))[0])


def _with_depth(V: Potential, depth: float) -> Potential:
    if V.family == "table":
        return V.scaled(depth)
    return replace(V, depth=depth)


def signed_growth(V: Potential, ch: Channel, depth: float, step_tol: float = 1e-11) -> float:
    W = _with_depth(V, depth)
    A, B = zero_energy_coefficients(W, ch, step_tol)
    return growth_fraction(W, ch, A, B)


def resonance_scan(
    V: Potential,
    ch: Channel,
    low: float,
    high: float,
    points: int = 64,
    xtol: float = 1e-12,
) -> List[float]:
    """
    Depths d in [low, high] where the growth coefficient A(d) of channel ch
    vanishes, bracketed on a coarse scan and polished by Brent's method.
    For table potentials d scales the tabulated values.
    """
    if not low < high or points < 2:
        raise DomainError(f"Bad scan interval [{low}, {high}] with {points} points")
    depths = np.linspace(low, high, points)
    values = [signed_growth(V, ch, d) for d in depths]
    roots = []
    for d0, d1, f0, f1 in zip(depths[:-1], depths[1:], values[:-1], values[1:]):
        if f0 == 0.0:
            roots.append(float(d0))
        elif f0 * f1 < 0:
            roots.append(float(brentq(lambda d: signed_growth(V, ch, d), d0, d1, xtol=xtol)))
    if values[-1] == 0.0:
        roots.append(float(depths[-1]))
    logger.info(f"Resonance scan of channel {ch.label} on [{low}, {high}] found {len(roots)} thresholds")
    return roots
