"""
Spectral flow of finite-dimensional self-adjoint paths.

Phillips flow uses local cutoffs: on each piece [t0, t1] of a partition a
level a > 0 is picked in a gap of the endpoint spectra, the spectral
projections chi_(-inf, a) at both ends must be closer than 1/2, and the piece
contributes dim E_[0, a)(D_t1) - dim E_[0, a)(D_t0). Zero counts as
nonnegative, so an eigenvalue moving from negative to positive gives +1.
"""
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import eigh_tridiagonal, eigvalsh_tridiagonal
from scipy.special import beta as beta_fn
from scipy.special import betainc

from Levinson.core.potential import Potential
from Levinson.core.radial import Channel, channels
from Levinson.core.scattering import assemble
from Levinson.core.spectrum import lowest_eigenvalue
from Levinson.exception import (
    AccuracyError,
    ConfigurationError,
    DomainError,
    PathResolutionError,
    ResolutionError,
)
from Levinson.logger import get_logger
from Levinson.utils.helpers import box_eigenvalues, box_grid, channel_box

logger = get_logger(__name__)

HERMITIAN_TOL = 1e-12
KERNEL_TOL = 1e-10
KERNEL_SHIFT = 1e-9
GAP_WINDOW = 8


class MatrixPath(ABC):
    """Path t -> D_t of Hermitian matrices on [0, 1]"""
    dim: int

    @abstractmethod
    def at(self, t: float) -> np.ndarray:
        ...

    @abstractmethod
    def derivative(self, t: float) -> np.ndarray:
        ...

    @abstractmethod
    def shifted(self, c: float) -> "MatrixPath":
        """The path D_t + c Id."""

    def breaks(self) -> Sequence[float]:
        """Points where the path may fail to be smooth; quadrature runs piecewise between them."""
        return (0.0, 1.0)

    def eigvals(self, t: float) -> np.ndarray:
        return np.linalg.eigvalsh(self.at(t))

    def eigh(self, t: float) -> Tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.at(t))

    def lower_subspace(self, t: float, a: float) -> np.ndarray:
        """Orthonormal basis of the range of chi_(-inf, a)(D_t)."""
        w, U = self.eigh(t)
        return U[:, w < a]

    def trace_derivative_g(self, t: float, g: Callable[[np.ndarray], np.ndarray]) -> float:
        w, U = self.eigh(t)
        d = np.real(np.einsum("ij,ik,kj->j", U.conj(), self.derivative(t), U))
        return float(np.dot(g(w), d))


def _check_hermitian(D: np.ndarray) -> None:
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise DomainError(f"Path samples must be square matrices, got shape {D.shape}")
    if np.max(np.abs(D - D.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise DomainError("Path sample is not Hermitian")


class AffinePath(MatrixPath):
    """D_t = D0 + t * Delta"""

    def __init__(self, D0, Delta):
        self.D0 = np.asarray(D0)
        self.Delta = np.asarray(Delta)
        _check_hermitian(self.D0)
        _check_hermitian(self.Delta)
        self.dim = self.D0.shape[0]

    @classmethod
    def between(cls, D0, D1) -> "AffinePath":
        D0 = np.asarray(D0)
        return cls(D0, np.asarray(D1) - D0)

    def at(self, t):
        return self.D0 + t * self.Delta

    def derivative(self, t):
        return self.Delta

    def shifted(self, c):
        return AffinePath(self.D0 + c * np.eye(self.dim), self.Delta)


class SampledPath(MatrixPath):
    """
    Piecewise linear interpolation of samples (t_i, D_i), t_0 = 0 < ... < t_last = 1.
    Inside a piece the derivative is the difference quotient of its end samples.
    """

    def __init__(self, ts, mats):
        self.ts = np.asarray(ts, dtype=float)
        self.mats = [np.asarray(m) for m in mats]
        if self.ts.size != len(self.mats) or self.ts.size < 2:
            raise DomainError("SampledPath needs matching t values and at least two samples")
        if self.ts[0] != 0.0 or self.ts[-1] != 1.0 or np.any(np.diff(self.ts) <= 0):
            raise DomainError("Sample times must increase strictly from 0 to 1")
        for m in self.mats:
            _check_hermitian(m)
        self.dim = self.mats[0].shape[0]

    def _piece(self, t):
        return int(min(max(np.searchsorted(self.ts, t, side="right") - 1, 0), self.ts.size - 2))

    def at(self, t):
        i = self._piece(t)
        w = (t - self.ts[i]) / (self.ts[i + 1] - self.ts[i])
        return (1.0 - w) * self.mats[i] + w * self.mats[i + 1]

    def derivative(self, t):
        i = self._piece(t)
        return (self.mats[i + 1] - self.mats[i]) / (self.ts[i + 1] - self.ts[i])

    def shifted(self, c):
        eye = c * np.eye(self.dim)
        return SampledPath(self.ts, [m + eye for m in self.mats])

    def breaks(self):
        return tuple(self.ts)


class TridiagonalPath(MatrixPath):
    """Real symmetric tridiagonal D_t with diagonal d0 + t * dd and fixed off-diagonal e"""

    def __init__(self, d0, dd, e):
        self.d0 = np.asarray(d0, dtype=float)
        self.dd = np.asarray(dd, dtype=float)
        self.e = np.asarray(e, dtype=float)
        self.dim = self.d0.size

    def at(self, t):
        return np.diag(self.d0 + t * self.dd) + np.diag(self.e, 1) + np.diag(self.e, -1)

    def derivative(self, t):
        return np.diag(self.dd)

    def shifted(self, c):
        return TridiagonalPath(self.d0 + c, self.dd, self.e)

    def eigvals(self, t):
        return eigvalsh_tridiagonal(self.d0 + t * self.dd, self.e)

    def eigh(self, t):
        return eigh_tridiagonal(self.d0 + t * self.dd, self.e)

    def lower_subspace(self, t, a):
        w = self.eigvals(t)
        if not np.any(w < a):
            return np.zeros((self.dim, 0))
        _, U = eigh_tridiagonal(self.d0 + t * self.dd, self.e, select="v", select_range=(w[0] - 1.0, a))
        return U

    def trace_derivative_g(self, t, g):
        w, U = self.eigh(t)
        return float(np.dot(g(w), (U * U).T @ self.dd))


class TransformedPath(MatrixPath):
    """F(D_t) for a strictly increasing F fixing the sign of its argument"""

    def __init__(self, path: MatrixPath, F: Callable[[np.ndarray], np.ndarray]):
        self.path = path
        self.F = F
        self.dim = path.dim

    def at(self, t):
        w, U = self.path.eigh(t)
        return (U * self.F(w)) @ U.conj().T

    def eigvals(self, t):
        return self.F(self.path.eigvals(t))

    def eigh(self, t):
        w, U = self.path.eigh(t)
        return self.F(w), U

    def lower_subspace(self, t, a):
        w, U = self.path.eigh(t)
        return U[:, self.F(w) < a]

    def derivative(self, t):
        raise DomainError("TransformedPath has no closed-form derivative")

    def shifted(self, c):
        raise DomainError("Shift the underlying path before transforming it")


def bounded_transform(x: np.ndarray) -> np.ndarray:
    """F(x) = x (1 + x^2)^(-1/2)"""
    return x / np.sqrt(1.0 + x * x)


def endpoint_guard(path: MatrixPath) -> Tuple[MatrixPath, bool]:
    """Shift the path by KERNEL_SHIFT when an endpoint eigenvalue sits within KERNEL_TOL of 0."""
    for t in (0.0, 1.0):
        if np.any(np.abs(path.eigvals(t)) <= KERNEL_TOL):
            logger.warning(f"Endpoint t={t} has an eigenvalue within {KERNEL_TOL} of 0; shifting path by +{KERNEL_SHIFT}")
            return path.shifted(KERNEL_SHIFT), True
    return path, False


def _cutoff(w0: np.ndarray, w1: np.ndarray) -> float:
    """A level a > 0 in the widest gap among the lowest nonnegative endpoint eigenvalues."""
    levels = np.unique(np.concatenate([[0.0], w0[w0 >= 0], w1[w1 >= 0]]))
    if levels.size <= GAP_WINDOW:
        top = levels[-1]
        levels = np.append(levels, top + max(1.0, abs(top)))
    else:
        levels = levels[: GAP_WINDOW + 1]
    gaps = np.diff(levels)
    i = int(np.argmax(gaps))
    return 0.5 * (levels[i] + levels[i + 1])


def projection_distance(U: np.ndarray, W: np.ndarray) -> float:
    """||P_U - P_W|| for orthonormal bases U, W."""
    if U.shape[1] != W.shape[1]:
        return 1.0
    if U.shape[1] == 0:
        return 0.0
    sigma = np.linalg.svd(U.conj().T @ W, compute_uv=False)
    return float(math.sqrt(max(0.0, 1.0 - float(np.min(sigma)) ** 2)))


@dataclass(frozen=True)
class PartitionPiece:
    t0: float
    t1: float
    cutoff: float
    contribution: int


def phillips_partition(path: MatrixPath, max_depth: int = 40) -> List[PartitionPiece]:
    pieces = []

    def visit(t0, t1, w0, w1, depth):
        a = _cutoff(w0, w1)
        if projection_distance(path.lower_subspace(t0, a), path.lower_subspace(t1, a)) < 0.5:
            contribution = int(np.count_nonzero((w1 >= 0) & (w1 < a))) - int(np.count_nonzero((w0 >= 0) & (w0 < a)))
            pieces.append(PartitionPiece(t0, t1, a, contribution))
            return
        if depth >= max_depth:
            raise PathResolutionError(f"Partition refinement exhausted on [{t0}, {t1}]")
        tm = 0.5 * (t0 + t1)
        wm = path.eigvals(tm)
        visit(t0, tm, w0, wm, depth + 1)
        visit(tm, t1, wm, w1, depth + 1)

    visit(0.0, 1.0, path.eigvals(0.0), path.eigvals(1.0), 0)
    return pieces


def spectral_flow_phillips(path: MatrixPath) -> int:
    path, _ = endpoint_guard(path)
    return sum(p.contribution for p in phillips_partition(path))


def bounded_transform_flow(path: MatrixPath) -> int:
    path, _ = endpoint_guard(path)
    return sum(p.contribution for p in phillips_partition(TransformedPath(path, bounded_transform)))


@dataclass(frozen=True)
class EtaKit:
    """
    g_s(x) = (1 + x^2)^(-s) / C_s, G_s its odd primitive, eta_s(x) = sign(x) - 2 G_s(x).
    """
    s: float

    def __post_init__(self):
        if not self.s > 0.5:
            raise DomainError(f"EtaKit needs s > 1/2, got {self.s}")

    @property
    def C_s(self) -> float:
        """sqrt(pi) Gamma(s - 1/2) / Gamma(s) = B(1/2, s - 1/2)."""
        return float(beta_fn(0.5, self.s - 0.5))

    def g(self, x):
        x = np.asarray(x, dtype=float)
        return (1.0 + x * x) ** (-self.s) / self.C_s

    def G(self, x):
        x = np.asarray(x, dtype=float)
        return np.sign(x) * 0.5 * betainc(0.5, self.s - 0.5, x * x / (1.0 + x * x))

    def eta(self, x):
        x = np.asarray(x, dtype=float)
        return np.sign(x) * betainc(self.s - 0.5, 0.5, 1.0 / (1.0 + x * x))

    def residue(self, x):
        """(s - 1/2) C_s eta_s(x); tends to sign(x) as s -> 1/2."""
        return (self.s - 0.5) * self.C_s * self.eta(x)


def trace_eta(D: np.ndarray, s: float) -> float:
    """Tr eta_s(D) for Hermitian D."""
    return float(np.sum(EtaKit(s).eta(np.linalg.eigvalsh(D))))


def _integral(path: MatrixPath, kit: EtaKit, nodes: int) -> float:
    x, w = np.polynomial.legendre.leggauss(nodes)
    total = 0.0
    edges = path.breaks()
    for t0, t1 in zip(edges[:-1], edges[1:]):
        ts = 0.5 * (t1 - t0) * (x + 1.0) + t0
        values = [path.trace_derivative_g(t, kit.g) for t in ts]
        total += 0.5 * (t1 - t0) * float(np.dot(w, values))
    return total


def spectral_flow_formula(path: MatrixPath, s: float, tol: float = 1e-9, max_nodes: int = 1024) -> float:
    """
    int_0^1 Tr(D'_t g_s(D_t)) dt - Tr(G_s(D_1) - B_1/2) + Tr(G_s(D_0) - B_0/2),
    B = 2 chi_[0, inf)(D) - 1, by Gauss-Legendre in t with node doubling.
    """
    kit = EtaKit(s)
    path, _ = endpoint_guard(path)

    def endpoint(t):
        w = path.eigvals(t)
        B = np.where(w >= 0, 1.0, -1.0)
        return float(np.sum(kit.G(w) - 0.5 * B))

    nodes = 64
    previous = _integral(path, kit, nodes)
    while True:
        nodes *= 2
        if nodes > max_nodes:
            raise AccuracyError(
                f"Flow integral not stable to {tol} with {max_nodes} Gauss nodes", estimate=previous
            )
        current = _integral(path, kit, nodes)
        if abs(current - previous) <= tol:
            break
        previous = current
    return current - endpoint(1.0) + endpoint(0.0)


def crossing_count(path: MatrixPath, steps: int = 2000) -> int:
    """Signed eigenvalue crossings of 0 tracked on a uniform t grid; 0 counts as nonnegative."""
    previous = path.eigvals(0.0) >= 0
    total = 0
    for t in np.linspace(0.0, 1.0, steps + 1)[1:]:
        current = path.eigvals(t) >= 0
        total += int(np.count_nonzero(current & ~previous)) - int(np.count_nonzero(previous & ~current))
        previous = current
    return total


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (X + X.conj().T)


def random_affine_path(seed: int, dim: Optional[int] = None, dim_min: int = 2, dim_max: int = 10) -> AffinePath:
    rng = np.random.default_rng(seed)
    if dim is None:
        dim = int(rng.integers(dim_min, dim_max + 1))
    return AffinePath.between(random_hermitian(rng, dim), random_hermitian(rng, dim))


def hamiltonian_path(V: Potential, ch: Channel, L: float, points: int, shift: float = 0.0) -> TridiagonalPath:
    """H_t = H0 + t V (+ shift) as a finite-difference channel matrix on [0, L]."""
    d0, e = channel_box(None, ch, L, points, shift=shift)
    return TridiagonalPath(d0, V.evaluate(box_grid(ch, L, points)[0]), e)


def discretized_hamiltonian_flow(
    V: Potential,
    ch: Channel,
    alpha: Optional[float] = None,
    L: Optional[float] = None,
    points: int = 2000,
) -> Tuple[int, int]:
    """
    (sf of H_t + alpha, sf of H_t) along t in [0, 1]. With alpha beyond the
    bottom of the spectrum the shifted flow is 0; the unshifted one counts
    eigenvalues descending through 0.
    """
    L = 20.0 * V.radius if L is None else L
    if L <= V.radius:
        raise ConfigurationError(f"Box length {L} must exceed the support radius {V.radius}")
    unshifted = hamiltonian_path(V, ch, L, points)
    # the free end of the path is positive, so the bottom along t is min(nu, 0)
    nu = lowest_eigenvalue(V, ch, L, points)
    bottom = min(nu, 0.0)
    if alpha is None:
        alpha = -2.0 * bottom + 2.0
    if alpha <= -bottom:
        raise ConfigurationError(f"Shift alpha={alpha} does not lift the box spectrum (lowest {nu:.6g}) above 0")
    shifted = unshifted.shifted(alpha)
    sf_shifted = spectral_flow_phillips(shifted)
    sf_unshifted = spectral_flow_phillips(unshifted)
    logger.info(f"Hamiltonian flow channel {ch.label}: shifted {sf_shifted}, unshifted {sf_unshifted} (alpha={alpha:.4g})")
    return sf_shifted, sf_unshifted


@dataclass(frozen=True)
class BumpFunction:
    """f(E) = exp(-1 / (1 - y^2)) on [low, high], y the affine image of E in (-1, 1)"""
    low: float
    high: float

    def __post_init__(self):
        if not self.low < self.high:
            raise DomainError(f"Bump support [{self.low}, {self.high}] is empty")

    def _y(self, E):
        return (2.0 * np.atleast_1d(np.asarray(E, dtype=float)) - self.low - self.high) / (self.high - self.low)

    def __call__(self, E):
        y = self._y(E)
        inside = np.abs(y) < 1
        out = np.zeros_like(y)
        out[inside] = np.exp(-1.0 / (1.0 - y[inside] ** 2))
        return out

    def at(self, E: float) -> float:
        return float(self(E)[0])

    def derivative(self, E):
        y = self._y(E)
        inside = np.abs(y) < 1
        out = np.zeros_like(y)
        yi = y[inside]
        out[inside] = np.exp(-1.0 / (1.0 - yi ** 2)) * (-2.0 * yi / (1.0 - yi ** 2) ** 2) * 2.0 / (self.high - self.low)
        return out


def _box_trace(V, f, chans, L, points):
    lhs = 0.0
    bound = []
    for ch in chans:
        E = box_eigenvalues(V, ch, L, points)
        E0 = box_eigenvalues(None, ch, L, points)
        lhs += ch.m * float(np.sum(f(E)) - np.sum(f(E0)))
        bound.extend((ch.m, e) for e in E[E < 0])
    return lhs, bound


def birman_krein_desk_check(
    V: Potential,
    f: BumpFunction,
    L: float = 40.0,
    points: int = 4000,
    l_max: Optional[int] = None,
    grid_points: int = 400,
    tol: float = 0.05,
) -> Tuple[float, float]:
    """
    lhs = Tr(f(H) - f(H0)) from box eigenvalues, rhs = int xi f' with xi = -N(lambda)
    below 0 and the assembled spectral shift above. The box is doubled once and
    lhs must move by less than tol * max(|lhs|, 0.1).
    """
    n = V.dimension
    if l_max is None:
        l_max = 1 if n == 1 else int(math.ceil(math.sqrt(max(f.high, 1.0)) * V.radius)) + 10
    chans = channels(n, l_max)
    lhs, bound = _box_trace(V, f, chans, L, points)
    lhs_doubled, _ = _box_trace(V, f, chans, 2.0 * L, 2 * points)
    if abs(lhs_doubled - lhs) > tol * max(abs(lhs), 0.1):
        raise ResolutionError(f"Box trace not converged: {lhs:.6g} at L={L}, {lhs_doubled:.6g} at L={2 * L}")

    f0 = f.at(0.0)
    rhs = -sum(m * (f0 - f.at(e)) for m, e in bound)
    if f.high > 0:
        _, curve = assemble(V, l_max, f.high, grid_points=grid_points)
        lam = curve.grid
        fp = f.derivative(lam)
        rhs += float(trapezoid(curve.xi * fp, lam))
        rhs += float(curve.xi[0]) * (f.at(lam[0]) - f0)
    logger.info(f"Birman-Krein check: lhs={lhs_doubled:.6g}, rhs={rhs:.6g}")
    return lhs_doubled, rhs
