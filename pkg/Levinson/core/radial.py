"""
Partial-wave reduction of -Delta + V for radial V.

Each channel carries the radial operator
    -u'' + [V(r) + (mu^2 - 1/4) / r^2] u = k^2 u,    mu = l + (n - 2) / 2,
whose regular solution behaves like r^(mu + 1/2) at the origin.
"""
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from Levinson.core.potential import Potential
from Levinson.core.specfun import riccati_bessel
from Levinson.exception import (
    ConditioningError,
    DegenerateMatchingError,
    DomainError,
    GridResolutionError,
    StartupAccuracyError,
    StiffnessError,
)
from Levinson.logger import get_logger

logger = get_logger(__name__)

# decades of r between renormalisations of the propagated state
RENORMALISE_DECADES = 1.0


@dataclass(frozen=True)
class Channel:
    """Partial-wave sector (l, mu, multiplicity) of R^n"""
    n: int
    l: int
    mu: float
    m: int

    @property
    def centrifugal(self) -> float:
        return self.mu * self.mu - 0.25

    @property
    def regular_exponent(self) -> float:
        return self.mu + 0.5

    @property
    def growth_exponent(self) -> float:
        return 0.5 + abs(self.mu)

    @property
    def decay_exponent(self) -> float:
        return 0.5 - abs(self.mu)

    @property
    def is_logarithmic(self) -> bool:
        return self.mu == 0.0

    @property
    def label(self) -> str:
        if self.n == 1:
            return "even" if self.l == 0 else "odd"
        return f"l{self.l}"


@dataclass(frozen=True)
class RadialSolution:
    """
    Regular solution sampled on `grid`.

    Stored values are scaled by a positive constant: the regular solution
    normalised by u / r^(mu + 1/2) -> 1 equals u * exp(log_scale).
    """
    grid: np.ndarray
    u: np.ndarray
    u_prime: np.ndarray
    k: float
    log_scale: float


def multiplicity(n: int, l: int) -> int:
    if n == 1:
        return 1
    if n == 2:
        return 1 if l == 0 else 2
    return (2 * l + n - 2) * math.factorial(l + n - 3) // (math.factorial(l) * math.factorial(n - 2))


def channels(n: int, l_max: int) -> List[Channel]:
    if n not in (1, 2, 3, 4):
        raise DomainError(f"Unsupported dimension n={n}")
    if n == 1:
        return [Channel(n=1, l=0, mu=-0.5, m=1), Channel(n=1, l=1, mu=0.5, m=1)]
    if l_max < 0:
        raise DomainError(f"l_max must be nonnegative, got {l_max}")
    return [Channel(n=n, l=l, mu=l + (n - 2) / 2.0, m=multiplicity(n, l)) for l in range(l_max + 1)]


def _startup(V: Potential, ch: Channel, k: float, step_tol: float, r0: Optional[float] = None):
    """Two-term Frobenius start u = r^p (1 + c1 r^2) with p = mu + 1/2, scaled by r0^-p."""
    a = V.radius
    p = ch.regular_exponent
    w = V.evaluate(0.0) - k * k
    c1 = w / (4.0 * (ch.mu + 1.0))
    c2 = (abs(w * c1) + V.sup_abs / (a * a)) / (8.0 * (ch.mu + 2.0))
    if r0 is None:
        r0 = 1e-3 * a
        if c2 > 0:
            r0 = min(r0, (step_tol / c2) ** 0.25)
    elif c2 * r0 ** 4 > step_tol:
        raise StartupAccuracyError(
            f"Series start at r0={r0} leaves truncation error {c2 * r0 ** 4:.3e} > step_tol={step_tol} "
            f"in channel {ch.label}"
        )
    u = 1.0 + c1 * r0 * r0
    up = p / r0 + c1 * (p + 2.0) * r0
    return r0, np.array([u, up]), p * math.log(r0)


def _nodes(V: Potential, r_from: float, r_to: float) -> List[float]:
    """Segment ends: renormalisation points, potential breakpoints and the support edge."""
    points = {r_from, r_to}
    r = r_from * 10.0 ** RENORMALISE_DECADES
    while r < min(r_to, V.radius):
        points.add(r)
        r *= 10.0 ** RENORMALISE_DECADES
    for b in V.breakpoints() + (V.radius,):
        if r_from < b < r_to:
            points.add(b)
    return sorted(points)


def _integrate(
    V: Potential,
    ch: Channel,
    k: float,
    nodes: Sequence[float],
    state: np.ndarray,
    step_tol: float,
    samples: int = 0,
):
    """Advance (u, u') through consecutive segments, renormalising at each segment end."""
    log_scale = 0.0
    kk = k * k
    cent = ch.centrifugal
    pieces = []

    for r_a, r_b in zip(nodes[:-1], nodes[1:]):
        r_left = np.nextafter(r_b, -np.inf)

        def rhs(r, y):
            return [y[1], (V._evaluate_scalar(min(r, r_left)) + cent / (r * r) - kk) * y[0]]

        sol = solve_ivp(
            rhs,
            (r_a, r_b),
            state,
            method="DOP853",
            rtol=step_tol,
            atol=step_tol * 1e-6,
            dense_output=samples > 0,
        )
        if sol.status != 0:
            raise StiffnessError(f"Radial integration failed on [{r_a}, {r_b}] in channel {ch.label}: {sol.message}")
        if samples > 0:
            rs = np.unique(np.concatenate([np.linspace(r_a, r_b, samples), sol.t]))
            if pieces:
                # r_a already closes the previous piece
                rs = rs[rs > r_a]
            pieces.append((rs, sol.sol(rs), log_scale))
        end = sol.y[:, -1]
        norm = math.hypot(end[0], end[1])
        state = end / norm
        log_scale += math.log(norm)

    if samples == 0:
        return state, log_scale, None
    grid, u, up = [], [], []
    for rs, ys, start_scale in pieces:
        factor = math.exp(start_scale - log_scale)
        grid.append(rs)
        u.append(ys[0] * factor)
        up.append(ys[1] * factor)
    return state, log_scale, (np.concatenate(grid), np.concatenate(u), np.concatenate(up))


def propagate(
    V: Potential,
    ch: Channel,
    k: float,
    r_from: float,
    r_to: float,
    state: Sequence[float],
    step_tol: float = 1e-10,
    samples: int = 0,
):
    """
    Propagate arbitrary data (u, u') from r_from to r_to > r_from.

    Returns the final state scaled to unit norm, the log of the discarded
    scale and, when samples > 0, (grid, u, u') in the units of the final state.
    """
    if not 0 < r_from < r_to:
        raise DomainError(f"Need 0 < r_from < r_to, got {r_from}, {r_to}")
    return _integrate(V, ch, k, _nodes(V, r_from, r_to), np.asarray(state, dtype=float), step_tol, samples)


def integrate_regular(
    V: Potential,
    ch: Channel,
    k: float,
    R_m: Optional[float] = None,
    step_tol: float = 1e-10,
    samples: int = 256,
    r0: Optional[float] = None,
) -> RadialSolution:
    R_m = V.radius if R_m is None else R_m
    if R_m < V.radius:
        raise DomainError(f"Matching radius {R_m} lies inside the support radius {V.radius}")
    if not step_tol > 0:
        raise DomainError(f"step_tol must be positive, got {step_tol}")
    r0, state, start_scale = _startup(V, ch, k, step_tol, r0)
    _, log_scale, (grid, u, up) = _integrate(V, ch, k, _nodes(V, r0, R_m), state, step_tol, samples)
    return RadialSolution(grid=grid, u=u, u_prime=up, k=k, log_scale=start_scale + log_scale)


def _shoot(V: Potential, ch: Channel, k: float, R: float, step_tol: float) -> np.ndarray:
    r0, state, _ = _startup(V, ch, k, step_tol)
    end, _, _ = _integrate(V, ch, k, _nodes(V, r0, R), state, step_tol)
    return end


def matching_pair(ch: Channel, x: float) -> Tuple[float, float, float, float]:
    """Free exterior basis (j, y, j', y') with Wronskian j y' - j' y = 1."""
    if ch.n == 1 and ch.l == 0:
        # even channel: (cos x, sin x) stands in for the order -1/2 pair
        return math.cos(x), math.sin(x), -math.sin(x), math.cos(x)
    pair = riccati_bessel(ch.mu, x)
    return pair.j, pair.y, pair.jp, pair.yp


def _fold(delta: float) -> float:
    """Reduce an angle to [-pi/2, pi/2)."""
    return (delta + math.pi / 2.0) % math.pi - math.pi / 2.0


def phase_shift(
    V: Potential,
    ch: Channel,
    lam: float,
    tol: float = 1e-8,
    R_m: Optional[float] = None,
    step_tol: Optional[float] = None,
) -> float:
    """delta_l(lambda) mod pi in [-pi/2, pi/2), from u ~ cos(delta) j - sin(delta) y outside the support."""
    if not lam > 0:
        raise DomainError(f"Phase shifts need lambda > 0, got {lam}")
    if V.is_zero:
        return 0.0
    R = V.radius if R_m is None else R_m
    if R < V.radius:
        raise DomainError(f"Matching radius {R} lies inside the support radius {V.radius}")
    step_tol = step_tol if step_tol is not None else min(max(1e-2 * tol, 1e-12), 1e-8)
    k = math.sqrt(lam)
    u, up = _shoot(V, ch, k, R, step_tol)
    j, y, jp, yp = matching_pair(ch, k * R)
    num = j * up - k * jp * u
    den = y * up - k * yp * u
    if abs(num) < 1e-300 and abs(den) < 1e-300:
        raise DegenerateMatchingError(f"Degenerate matching for channel {ch.label} at lambda={lam}")
    return _fold(math.atan2(num, den))


def unwrap_continuous(samples: Sequence[Tuple[float, float]], max_jump: float = 0.4 * math.pi) -> np.ndarray:
    """
    Continuous branch of phases given mod pi, pinned at the top of the grid
    to the branch nearest 0. Returns phases ordered by increasing lambda.
    """
    ordered = sorted(samples)
    raw = np.array([d for _, d in ordered], dtype=float)
    out = np.empty_like(raw)
    if raw.size == 0:
        return out
    out[-1] = _fold(raw[-1])
    for i in range(raw.size - 2, -1, -1):
        candidate = raw[i] + math.pi * round((out[i + 1] - raw[i]) / math.pi)
        if abs(candidate - out[i + 1]) > max_jump:
            raise GridResolutionError(
                f"Phase jump {abs(candidate - out[i + 1]):.3f} between lambda={ordered[i][0]:.6g} "
                f"and {ordered[i + 1][0]:.6g} exceeds {max_jump:.3f}; refine the grid",
                index=i,
            )
        out[i] = candidate
    return out


def exterior_basis(ch: Channel, r: float) -> np.ndarray:
    """Zero-energy exterior solutions [[f1, f2], [f1', f2']]: f1 grows, f2 decays or stays."""
    if ch.is_logarithmic:
        s = math.sqrt(r)
        return np.array([[s * math.log(r), s], [(0.5 * math.log(r) + 1.0) / s, 0.5 / s]])
    g, d = ch.growth_exponent, ch.decay_exponent
    return np.array([[r ** g, r ** d], [g * r ** (g - 1.0), d * r ** (d - 1.0)]])


def zero_energy_coefficients(V: Potential, ch: Channel, step_tol: float = 1e-11) -> Tuple[float, float]:
    """
    (A, B) with u = A f1 + B f2 outside the support, for the regular
    zero-energy solution up to a positive factor.
    """
    a = V.radius
    r0, state, _ = _startup(V, ch, 0.0, step_tol)
    u, up = _integrate(V, ch, 0.0, _nodes(V, r0, a), state, step_tol)[0]
    basis = exterior_basis(ch, a)
    scaled = basis / np.linalg.norm(basis, axis=0)
    condition = np.linalg.cond(scaled)
    if condition > 1e12:
        raise ConditioningError(
            f"Zero-energy coefficient solve for channel {ch.label} has condition {condition:.3e}",
            condition=condition,
        )
    A, B = np.linalg.solve(basis, [u, up])
    return float(A), float(B)


def growth_fraction(V: Potential, ch: Channel, A: float, B: float) -> float:
    """Signed weight of the growing branch at r = a, in [-1, 1]."""
    a = V.radius
    s1 = math.sqrt(a) if ch.is_logarithmic else a ** ch.growth_exponent
    s2 = a ** ch.decay_exponent
    total = abs(A) * s1 + abs(B) * s2
    return 0.0 if total == 0 else A * s1 / total
