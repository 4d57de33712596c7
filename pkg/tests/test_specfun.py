# tests/test_specfun.py
import math

import pytest

from Levinson.core.specfun import gamma_fn, riccati_bessel, riccati_j
from Levinson.exception import DomainError, RangeError


def series_J(mu, x, terms=60):
    """Power series of J_mu."""
    return sum(
        (-1) ** m / (math.factorial(m) * math.gamma(m + mu + 1)) * (x / 2.0) ** (2 * m + mu)
        for m in range(terms)
    )


@pytest.mark.parametrize("mu", [0.0, 0.5, 1.0, 1.5, 2.0, 3.5, 7.0])
@pytest.mark.parametrize("x", [0.05, 1.0, 7.3, 30.0, 850.0, 1e4])
def test_wronskian(mu, x):
    assert riccati_bessel(mu, x).wronskian == pytest.approx(1.0, abs=1e-10)


def test_half_integer_closed_forms():
    x = 2.3
    p = riccati_bessel(0.5, x)
    assert p.j == pytest.approx(math.sin(x))
    assert p.y == pytest.approx(-math.cos(x))
    assert p.jp == pytest.approx(math.cos(x))
    q = riccati_bessel(1.5, x)
    assert q.j == pytest.approx(math.sin(x) / x - math.cos(x))


@pytest.mark.parametrize("mu, x", [(0.7, 1.3), (2.0, 0.4), (1.0, 5.0)])
def test_matches_series(mu, x):
    expected = math.sqrt(math.pi * x / 2.0) * series_J(mu, x)
    assert riccati_bessel(mu, x).j == pytest.approx(expected, rel=1e-10)
    assert riccati_j(mu, x) == pytest.approx(expected, rel=1e-10)


def test_riccati_j_underflows_quietly():
    assert riccati_j(150.5, 1e-3) == 0.0


def test_overflow_raises():
    with pytest.raises(RangeError):
        riccati_bessel(200.5, 1e-3)


def test_domain():
    with pytest.raises(DomainError):
        riccati_bessel(1.0, 0.0)
    with pytest.raises(DomainError):
        riccati_bessel(-1.0, 1.0)
    with pytest.raises(DomainError):
        gamma_fn(-2.0)
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi))


@pytest.mark.parametrize("mu", [0.0, 0.5, 1.0, 2.5, 3.0])
@pytest.mark.parametrize("x", [0.7, 5.0, 40.0])
def test_derivatives_match_central_differences(mu, x):
    h = 1e-5 * x
    plus, minus = riccati_bessel(mu, x + h), riccati_bessel(mu, x - h)
    p = riccati_bessel(mu, x)
    assert p.jp == pytest.approx((plus.j - minus.j) / (2 * h), rel=1e-7, abs=1e-9)
    assert p.yp == pytest.approx((plus.y - minus.y) / (2 * h), rel=1e-7, abs=1e-9)


@pytest.mark.parametrize("x", [0.5, 1.0, 2.5, 7.25, 13.0, 21.5, 29.0])
def test_gamma_recurrence(x):
    assert gamma_fn(x + 1.0) == pytest.approx(x * gamma_fn(x), rel=1e-12)
