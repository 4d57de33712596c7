# tests/test_radial.py
import math

import numpy as np
import pytest

from Levinson.core.potential import Potential
from Levinson.core.specfun import riccati_j
from Levinson.core.radial import (
    Channel,
    channels,
    growth_fraction,
    integrate_regular,
    multiplicity,
    phase_shift,
    propagate,
    unwrap_continuous,
    zero_energy_coefficients,
)
from Levinson.exception import DomainError, GridResolutionError, StartupAccuracyError


def gap_mod_pi(x, y):
    """Distance between two angles modulo pi."""
    d = (x - y) % math.pi
    return min(d, math.pi - d)


def well(n, depth, radius=1.0):
    return Potential(dimension=n, family="well", depth=depth, radius=radius)


def test_multiplicities():
    assert [multiplicity(2, l) for l in range(4)] == [1, 2, 2, 2]
    assert [multiplicity(3, l) for l in range(4)] == [1, 3, 5, 7]
    assert [multiplicity(4, l) for l in range(4)] == [1, 4, 9, 16]


def test_channels():
    even, odd = channels(1, 10)
    assert (even.mu, odd.mu) == (-0.5, 0.5)
    assert [ch.mu for ch in channels(4, 2)] == [1.0, 2.0, 3.0]
    assert channels(2, 0)[0].is_logarithmic
    with pytest.raises(DomainError):
        channels(5, 2)


@pytest.mark.parametrize("depth", [1.0, 4.0, 10.0])
@pytest.mark.parametrize("k", [0.05, 0.3, 1.0, 2.7, 8.0, 30.0])
def test_s_wave_well_phase(depth, k):
    """3D s-wave: delta = arctan((k/kappa) tan(kappa a)) - ka."""
    V = well(3, depth)
    kappa = math.sqrt(k * k + depth)
    exact = math.atan(k / kappa * math.tan(kappa)) - k
    delta = phase_shift(V, channels(3, 0)[0], k * k, tol=1e-10)
    assert gap_mod_pi(delta, exact) < 1e-8
    assert -math.pi / 2 <= delta < math.pi / 2


@pytest.mark.parametrize("k", [0.2, 1.5, 6.0])
def test_one_dimensional_parity_phases(k):
    V = well(1, 2.0)
    kappa = math.sqrt(k * k + 2.0)
    even, odd = channels(1, 1)
    exact_even = math.atan(kappa / k * math.tan(kappa)) - k
    exact_odd = math.atan(k / kappa * math.tan(kappa)) - k
    assert gap_mod_pi(phase_shift(V, even, k * k, tol=1e-10), exact_even) < 1e-8
    assert gap_mod_pi(phase_shift(V, odd, k * k, tol=1e-10), exact_odd) < 1e-8


def test_free_phase_is_zero():
    V = Potential.zero(3)
    assert phase_shift(V, channels(3, 2)[2], 4.0) == 0.0


def test_matching_radius_independence():
    V = Potential(dimension=3, family="bump", depth=5.0, radius=1.0)
    ch = channels(3, 1)[1]
    near = phase_shift(V, ch, 3.0, tol=1e-10)
    far = phase_shift(V, ch, 3.0, tol=1e-10, R_m=2.5)
    assert gap_mod_pi(near, far) < 1e-8


def test_matching_radius_inside_support():
    with pytest.raises(DomainError):
        phase_shift(well(3, 1.0), channels(3, 0)[0], 1.0, R_m=0.5)


def test_propagate_conserves_wronskian():
    V = Potential(dimension=3, family="bump", depth=3.0, radius=1.0)
    ch = Channel(n=3, l=1, mu=1.5, m=3)
    (u1, p1), s1, _ = propagate(V, ch, 2.0, 0.2, 3.0, [1.0, 0.0], step_tol=1e-11)
    (u2, p2), s2, _ = propagate(V, ch, 2.0, 0.2, 3.0, [0.0, 1.0], step_tol=1e-11)
    assert (u1 * p2 - p1 * u2) * math.exp(s1 + s2) == pytest.approx(1.0, rel=1e-8)


def test_regular_solution_samples():
    V = well(3, 4.0)
    sol = integrate_regular(V, channels(3, 0)[0], 0.0, samples=64)
    assert sol.grid[0] > 0 and sol.grid[-1] == pytest.approx(1.0)
    assert np.all(np.diff(sol.grid) > 0)
    # u = sin(2r) / 2 for d = 4 at zero energy
    expected = np.sin(2.0 * sol.grid) / 2.0
    scaled = sol.u * math.exp(sol.log_scale)
    assert np.max(np.abs(scaled - expected)) < 1e-7


def test_startup_too_far_out():
    with pytest.raises(StartupAccuracyError):
        integrate_regular(well(3, 50.0), channels(3, 0)[0], 1.0, step_tol=1e-10, r0=0.5)


def test_zero_energy_free_coefficients():
    # regular solutions of the free problem: r^(mu + 1/2)
    A, B = zero_energy_coefficients(Potential.zero(3), channels(3, 0)[0])
    assert abs(growth_fraction(Potential.zero(3), channels(3, 0)[0], A, B)) == pytest.approx(1.0)
    V1 = Potential.zero(1)
    even = channels(1, 1)[0]
    assert abs(growth_fraction(V1, even, *zero_energy_coefficients(V1, even))) <= 1e-6
    V2 = Potential.zero(2)
    s = channels(2, 0)[0]
    assert abs(growth_fraction(V2, s, *zero_energy_coefficients(V2, s))) <= 1e-6


def test_zero_energy_at_s_wave_threshold():
    V = well(3, (math.pi / 2) ** 2)
    ch = channels(3, 0)[0]
    assert abs(growth_fraction(V, ch, *zero_energy_coefficients(V, ch))) <= 1e-6


def test_unwrap_recovers_continuous_branch():
    lam = np.linspace(0.1, 10.0, 200)
    true = 0.1 + 3.0 * (1.0 - lam / 10.0)
    folded = (true + math.pi / 2) % math.pi - math.pi / 2
    out = unwrap_continuous(list(zip(lam, folded)))
    np.testing.assert_allclose(out, true, atol=1e-12)


def test_unwrap_flags_coarse_grid():
    samples = [(1.0, 0.0), (2.0, 1.4), (3.0, 0.0)]
    with pytest.raises(GridResolutionError) as excinfo:
        unwrap_continuous(samples)
    assert excinfo.value.index in (0, 1)


def test_samples_across_segments_are_strictly_increasing():
    """Segment ends are shared between neighbours and must appear once."""
    V = Potential(dimension=3, family="bump", depth=3.0, radius=1.0)
    sol = integrate_regular(V, channels(3, 1)[1], 1.5, R_m=2.0, samples=32)
    assert np.all(np.diff(sol.grid) > 0)
    assert sol.grid.size == np.unique(sol.grid).size
    assert sol.u.size == sol.grid.size == sol.u_prime.size


@pytest.mark.parametrize("l", [0, 1, 3])
def test_free_regular_solution_is_riccati_bessel(l):
    ch = channels(3, l)[l]
    k = 2.0
    sol = integrate_regular(Potential.zero(3), ch, k, R_m=3.0, step_tol=1e-12, samples=64)
    r = sol.grid[sol.grid > 0.05]
    u = sol.u[sol.grid > 0.05]
    ratio = u / np.array([riccati_j(ch.mu, k * x) for x in r])
    np.testing.assert_allclose(ratio, ratio[-1], rtol=1e-8)


@pytest.mark.parametrize("l", [0, 2])
def test_born_regime_is_linear_in_coupling(l):
    V = Potential(dimension=3, family="bump", depth=1.0, radius=1.0)
    ch = channels(3, l)[l]
    c = 1e-3
    big = phase_shift(V.scaled(c), ch, 2.0, tol=1e-12) / c
    small = phase_shift(V.scaled(c / 2), ch, 2.0, tol=1e-12) / (c / 2)
    assert small == pytest.approx(big, rel=1e-2)
