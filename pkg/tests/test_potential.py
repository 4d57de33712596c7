# tests/test_potential.py
import math

import numpy as np
import pytest

from Levinson.core.potential import Potential, moments, sphere_volume
from Levinson.exception import ConfigurationError, DomainError, InterpolationDomainError


@pytest.fixture
def well():
    """3D square well of depth 4 and radius 1."""
    return Potential(dimension=3, family="well", depth=4.0, radius=1.0)


def test_sphere_volume():
    assert sphere_volume(1) == pytest.approx(2.0)
    assert sphere_volume(2) == pytest.approx(2 * math.pi)
    assert sphere_volume(3) == pytest.approx(4 * math.pi)
    assert sphere_volume(4) == pytest.approx(2 * math.pi ** 2)


def test_bump_values():
    V = Potential(dimension=2, family="bump", depth=3.0, radius=2.0)
    assert V.evaluate(0.0) == pytest.approx(-3.0)
    assert V.evaluate(2.0) == 0.0
    assert V.evaluate(5.0) == 0.0
    r = np.linspace(0.0, 1.99, 50)
    values = V.evaluate(r)
    # monotone rise towards zero
    assert np.all(np.diff(values) >= 0)


def test_well_moments(well):
    M = moments(well)
    assert M.I1 == pytest.approx(-4.0 * 4 * math.pi / 3, rel=1e-9)
    assert M.I2 == pytest.approx(16.0 * 4 * math.pi / 3, rel=1e-9)
    assert M.sup_abs == 4.0


def test_one_dimensional_moments_cover_both_half_lines():
    V = Potential(dimension=1, family="well", depth=2.0, radius=1.5)
    assert moments(V).I1 == pytest.approx(-2.0 * 3.0, rel=1e-9)


def test_zero_potential():
    V = Potential.zero(4)
    assert V.is_zero
    M = moments(V)
    assert M.I1 == 0.0 and M.I2 == 0.0


def test_scaled_and_dilated(well):
    assert well.scaled(0.5).evaluate(0.3) == pytest.approx(-2.0)
    wide = well.dilated(2.0)
    assert wide.radius == 2.0
    assert wide.evaluate(1.5) == pytest.approx(-4.0)
    assert well.energy_scale == pytest.approx(5.0)


def test_table_potential(tmp_path):
    path = tmp_path / "v.txt"
    path.write_text("# r V\n0.0 -1.0\n0.5 -0.5\n1.0 0.0\n")
    V = Potential.from_table_file(str(path), dimension=3)
    assert V.radius == 1.0
    assert V.evaluate(0.25) == pytest.approx(-0.75, abs=0.1)
    assert V.evaluate(2.0) == 0.0


def test_table_must_end_at_support_edge():
    with pytest.raises(ConfigurationError):
        Potential(dimension=3, family="table", depth=1.0, radius=1.0, table=((0.0, 1.0), (-1.0, -0.5)))


def test_table_outside_sample_range():
    V = Potential(dimension=3, family="table", depth=1.0, radius=1.0, table=((0.2, 1.0), (-1.0, 0.0)))
    with pytest.raises(InterpolationDomainError):
        V.evaluate(0.1)


def test_invalid_inputs():
    with pytest.raises(DomainError):
        Potential(dimension=5, family="well", depth=1.0, radius=1.0)
    with pytest.raises(DomainError):
        Potential(dimension=3, family="well", depth=1.0, radius=0.0)
    with pytest.raises(DomainError):
        Potential(dimension=3, family="gauss", depth=1.0, radius=1.0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_moments_under_dilation(n):
    V = Potential(dimension=n, family="bump", depth=1.5, radius=1.0)
    assert moments(V.dilated(2.0)).I1 == pytest.approx(2.0 ** n * moments(V).I1, rel=1e-9)


def test_moments_under_scaling(well):
    M = moments(well)
    scaled = moments(well.scaled(-0.5))
    assert scaled.I1 == pytest.approx(-0.5 * M.I1, rel=1e-12)
    assert scaled.I2 == pytest.approx(0.25 * M.I2, rel=1e-12)
