"""
Scattering quantities assembled from partial-wave phase shifts.

For radial V the scattering matrix is diagonal with eigenvalues exp(2i delta_l),
repeated m_l times, so
    Tr(S* S') = 2i sum m_l delta_l'        xi = -(1/pi) sum m_l delta_l
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from Levinson.core.higher import HighEnergyData, pn_eval, polynomial_part, Pn_eval
from Levinson.core.potential import Potential
from Levinson.core.radial import Channel, channels, phase_shift, unwrap_continuous
from Levinson.core.specfun import riccati_j
from Levinson.exception import (
    DomainError,
    GridResolutionError,
    NumericalToleranceError,
    TailModelWarning,
    TruncationError,
    warn,
)
from Levinson.logger import get_logger
from Levinson.utils.helpers import geometric_grid

logger = get_logger(__name__)

MAX_REFINEMENTS = 400
# remainders below this are phase noise
TAIL_FLOOR = 1e-7


@dataclass(frozen=True)
class PhaseShiftTable:
    """Continuous phase shifts delta[channel, lambda] and their lambda-derivatives"""
    channels: Tuple[Channel, ...]
    grid: np.ndarray
    delta: np.ndarray
    delta_prime: np.ndarray
    l_star: Optional[int] = None
    dropped_residual: float = 0.0

    @classmethod
    def from_phases(cls, chans: Sequence[Channel], grid, delta, **kwargs) -> "PhaseShiftTable":
        grid = np.asarray(grid, dtype=float)
        delta = np.atleast_2d(np.asarray(delta, dtype=float))
        if delta.shape != (len(chans), grid.size):
            raise DomainError(f"Phase array shape {delta.shape} does not match {len(chans)} channels x {grid.size} energies")
        return cls(
            channels=tuple(chans),
            grid=grid,
            delta=delta,
            delta_prime=differentiate(delta, grid),
            **kwargs,
        )

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([ch.m for ch in self.channels], dtype=float)


@dataclass(frozen=True)
class TraceCurve:
    grid: np.ndarray
    tr: np.ndarray
    xi: np.ndarray


@dataclass(frozen=True)
class LevinsonIntegral:
    """(1/2 pi i) int_0^inf (Tr S*S' - p_n) split into its pieces"""
    value: float
    imag: float
    low_end: float
    body: float
    tail: float
    tail_exponent: float
    tail_exponent_expected: float
    tail_warning: bool = False
    notes: List[str] = field(default_factory=list)


def differentiate(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Second-order centred differences along the last axis on a nonuniform grid."""
    if np.shape(values)[-1] < 3:
        raise DomainError("Differentiation needs at least 3 grid points")
    return np.gradient(values, grid, axis=-1, edge_order=2)


def spectral_shift(table: PhaseShiftTable) -> np.ndarray:
    return -(table.multiplicities @ table.delta) / math.pi


def trace_curve(table: PhaseShiftTable) -> TraceCurve:
    tr = 2j * (table.multiplicities @ table.delta_prime)
    return TraceCurve(grid=table.grid, tr=tr, xi=spectral_shift(table))


def consistency_check(tc: TraceCurve) -> float:
    """max |tr/(2 pi i) + xi'| over interior points, relative to max |xi'|."""
    if tc.grid.size < 3:
        raise DomainError("consistency_check needs at least 3 grid points")
    xi_prime = differentiate(tc.xi, tc.grid)
    scale = np.max(np.abs(xi_prime))
    if scale == 0.0:
        return float(np.max(np.abs(tc.tr))) if np.any(tc.tr) else 0.0
    defect = np.abs(tc.tr / (2j * math.pi) + xi_prime)[1:-1]
    return float(np.max(defect) / scale)


def determinant_defect(table: PhaseShiftTable) -> float:
    """max |det S(lambda) - exp(-2 pi i xi(lambda))|."""
    det = np.exp(2j * (table.multiplicities @ table.delta))
    return float(np.max(np.abs(det - np.exp(-2j * math.pi * spectral_shift(table)))))


def _screened(V: Potential, ch: Channel, lam: float, tol: float) -> bool:
    """Born bound (a max|V| / k) j_mu(ka)^2 under the centrifugal barrier."""
    k = math.sqrt(lam)
    x = k * V.radius
    if ch.n == 1 or x >= ch.mu:
        return False
    bound = V.radius * V.sup_abs / k * riccati_j(ch.mu, x) ** 2
    return bound < 1e-2 * tol


def _phases_for_channel(V: Potential, ch: Channel, lams: Sequence[float], tol: float, step_tol: Optional[float]):
    out = {}
    for lam in lams:
        if V.is_zero or _screened(V, ch, lam, tol):
            out[lam] = 0.0
        else:
            out[lam] = phase_shift(V, ch, lam, tol=tol, step_tol=step_tol)
    return out


def _compute(V, chans, lams, tol, step_tol, workers) -> List[Dict[float, float]]:
    job = lambda ch: _phases_for_channel(V, ch, lams, tol, step_tol)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, chans))
    return [job(ch) for ch in chans]


def assemble(
    V: Potential,
    l_max: int,
    lambda_max: float,
    tol: float = 1e-8,
    grid_points: int = 240,
    max_jump: float = 0.4 * math.pi,
    step_tol: Optional[float] = None,
    lambda_min: Optional[float] = None,
    workers: int = 1,
) -> Tuple[PhaseShiftTable, TraceCurve]:
    """
    Phase shifts of every channel up to l_max on a geometric grid, unwrapped,
    differentiated and reduced to Tr(S*S') and xi.

    The grid is refined by geometric midpoints wherever a channel phase moves
    by more than max_jump between neighbours. Trailing channels whose weighted
    phase stays below tol are dropped; l_star is the last channel kept.
    """
    if not lambda_max > 0:
        raise DomainError(f"lambda_max must be positive, got {lambda_max}")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    lambda_min = lambda_min if lambda_min is not None else 1e-4 * V.energy_scale
    grid = list(geometric_grid(lambda_min, lambda_max, grid_points))
    chans = channels(V.dimension, l_max)
    logger.info(f"Assembling {len(chans)} channels on {grid_points} energies in [{lambda_min:.3e}, {lambda_max:.3e}]")

    raw = _compute(V, chans, grid, tol, step_tol, workers)
    refinements = 0
    while True:
        try:
            delta = np.vstack([unwrap_continuous(list(r.items()), max_jump) for r in raw])
            break
        except GridResolutionError as e:
            refinements += 1
            if refinements > MAX_REFINEMENTS:
                raise GridResolutionError(
                    f"Energy grid still too coarse after {MAX_REFINEMENTS} refinements", index=e.index
                )
            lam = math.sqrt(grid[e.index] * grid[e.index + 1])
            grid.insert(e.index + 1, lam)
            extra = _compute(V, chans, [lam], tol, step_tol, workers)
            for r, x in zip(raw, extra):
                r.update(x)
    if refinements:
        logger.info(f"Grid refined by {refinements} points to {len(grid)} energies")

    weighted = np.array([ch.m for ch in chans])[:, None] * np.abs(delta)
    significant = np.nonzero(weighted.max(axis=1) >= tol)[0]
    last = int(significant[-1]) if significant.size else 0
    if V.dimension > 1 and last == len(chans) - 1 and len(chans) > 1:
        residual = float(weighted[-1].max())
        raise TruncationError(
            f"Channel l={chans[-1].l} still carries weighted phase {residual:.3e} >= {tol}; raise l_max",
            residual=residual,
        )
    dropped = float(weighted[last + 1:].max()) if last + 1 < len(chans) else 0.0
    kept = chans[: last + 1]
    logger.info(f"Kept channels up to l*={kept[-1].l}; largest dropped weighted phase {dropped:.3e}")

    table = PhaseShiftTable.from_phases(
        kept, np.array(grid), delta[: last + 1], l_star=kept[-1].l, dropped_residual=dropped
    )
    return table, trace_curve(table)


def _low_end(table: PhaseShiftTable, H: HighEnergyData, thresholds: Optional[Mapping[str, float]] = None) -> float:
    """
    Integral over [0, lambda_min]: threshold extrapolation of the phases plus the exact p_n part.

    For n = 2 the s-wave approach is logarithmic, so the phases are pinned to
    their threshold values delta_l(0+) from the bound-state counts; without
    counts each channel is snapped to the nearest multiple of pi/2.
    """
    lam0 = table.grid[0]
    m = table.multiplicities
    if table.channels[0].n == 2:
        d0 = table.delta[:, 0]
        if thresholds is None:
            target = (math.pi / 2.0) * np.round(d0 / (math.pi / 2.0))
        else:
            target = np.array([thresholds.get(ch.label, 0.0) for ch in table.channels])
        from_trace = float(m @ (d0 - target)) / math.pi
    else:
        s = np.sqrt(table.grid[:2])
        g = 2.0 * s * (m @ table.delta_prime[:, :2]) / math.pi
        g_origin = g[0] - (g[1] - g[0]) / (s[1] - s[0]) * s[0]
        from_trace = 0.5 * (g[0] + g_origin) * s[0]
    from_poly = (H.beta - Pn_eval(H, lam0) / (2j * math.pi)).real if (H.C or H.beta) else 0.0
    return from_trace + from_poly


def _body(curve: TraceCurve, H: HighEnergyData) -> complex:
    """Composite rule on the grid, in sqrt(lambda) below lambda = 1."""
    lam = curve.grid
    p = np.array([pn_eval(H, x) for x in lam]) if H.c else np.zeros_like(lam, dtype=complex)
    h = (curve.tr - p) / (2j * math.pi)
    split = int(np.searchsorted(lam, 1.0, side="right"))
    total = 0.0 + 0.0j
    if split >= 2:
        s = np.sqrt(lam[:split])
        total += trapezoid(h[:split] * 2.0 * s, s)
    start = max(split - 1, 0)
    if lam.size - start >= 2:
        total += trapezoid(h[start:], lam[start:])
    return total


def next_order_exponent(n: int) -> float:
    """q with Tr S*S' - p_n ~ lambda^-q and xi + P_n/(2 pi i) ~ lambda^(1-q)."""
    return 1.5 if n % 2 else 2.0


def _remainder(curve: TraceCurve, H: HighEnergyData, lam: np.ndarray) -> np.ndarray:
    """R = xi + beta_n + (1/2 pi i) sum C_l lambda^(n/2-l) on the trailing grid points lam."""
    return curve.xi[-lam.size:] + np.array([polynomial_part(H, x) for x in lam])


def _decay_exponent(lam: np.ndarray, R: np.ndarray, floor: float) -> float:
    """q from a log-log fit of R ~ lambda^(1-q); nan when R is at the noise floor or changes sign."""
    if np.max(np.abs(R)) < floor:
        return float("nan")
    if not (np.all(R > 0) or np.all(R < 0)):
        return float("nan")
    slope = np.polyfit(np.log(lam), np.log(np.abs(R)), 1)[0]
    return float(1.0 - slope)


def _tail(curve: TraceCurve, H: HighEnergyData, window: float, floor: float):
    """
    Fit R on the top of the grid by c lambda^(1-q). Returns (tail integral,
    fitted q or nan, expected q).
    """
    q = next_order_exponent(H.n)
    count = max(5, int(round(window * curve.grid.size)))
    lam = curve.grid[-count:]
    R = _remainder(curve, H, lam)
    x = lam ** (1.0 - q)
    c = float(np.dot(R, x) / np.dot(x, x)) if np.any(x) else 0.0
    tail = c * curve.grid[-1] ** (1.0 - q)
    return tail, _decay_exponent(lam, R, floor), q


def levinson_integral(
    table: PhaseShiftTable,
    curve: TraceCurve,
    H: HighEnergyData,
    tail_window: float = 0.15,
    imag_tol: float = 1e-8,
    thresholds: Optional[Mapping[str, float]] = None,
    tail_floor: float = TAIL_FLOOR,
) -> LevinsonIntegral:
    """
    (1/2 pi i) int_0^inf (Tr S*S' - p_n) d lambda with threshold and high-energy extrapolation.

    thresholds maps channel labels to delta_l(0+); it is only read for n = 2.
    The tail exponent is not fitted while max |R| stays below tail_floor.
    """
    body = _body(curve, H)
    if abs(body.imag) > imag_tol:
        raise NumericalToleranceError(f"Levinson integrand has imaginary part {body.imag:.3e}; assembly sign error")
    low = _low_end(table, H, thresholds)
    tail, fitted, q = _tail(curve, H, tail_window, tail_floor)
    notes = []
    flagged = False
    if np.isfinite(fitted) and abs(fitted - q) > 0.25 * q:
        flagged = True
        message = f"High-energy tail decays like lambda^-{fitted:.3f}, expected lambda^-{q}"
        notes.append(message)
        warn(message, TailModelWarning)
    elif not np.isfinite(fitted):
        logger.debug("Tail residual at the noise floor or changing sign over the fit window; exponent check skipped")
    value = low + body.real + tail
    logger.info(f"Levinson integral {value:.8f} (low {low:.3e}, body {body.real:.8f}, tail {tail:.3e})")
    return LevinsonIntegral(
        value=value,
        imag=body.imag,
        low_end=low,
        body=body.real,
        tail=tail,
        tail_exponent=fitted,
        tail_exponent_expected=q,
        tail_warning=flagged,
        notes=notes,
    )


def high_energy_law(
    curve: TraceCurve,
    H: HighEnergyData,
    lam: float,
    decades: float = 0.5,
    floor: float = TAIL_FLOOR,
) -> Tuple[float, float, float]:
    """
    (relative gap |Tr S*S' - p_n| / |p_n| at the grid point nearest lam,
    fitted decay exponent q of the gap, next-order exponent).

    q is read off the remainder R ~ lambda^(1-q) over the top `decades` of the
    grid, where lower orders no longer compete; nan when R is unresolved.
    """
    if not H.c:
        raise DomainError(f"p_n vanishes identically for n={H.n}")
    i = int(np.argmin(np.abs(np.log(curve.grid / lam))))
    p = pn_eval(H, curve.grid[i])
    relative = abs(curve.tr[i] - p) / abs(p)
    top = curve.grid[curve.grid >= curve.grid[-1] * 10.0 ** (-decades)]
    if top.size < 5:
        top = curve.grid[-5:]
    exponent = _decay_exponent(top, _remainder(curve, H, top), floor)
    return float(relative), exponent, next_order_exponent(H.n)
