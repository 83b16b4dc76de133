# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
import math

import mpmath
import numpy as np
import pytest
from scipy import special

from thermoinfo.exceptions import DomainError
from thermoinfo.exceptions import InvalidArgumentError
from thermoinfo.specfun import assoc_laguerre
from thermoinfo.specfun import bessel_i_scaled
from thermoinfo.specfun import bessel_order
from thermoinfo.specfun import is_half_integer
from thermoinfo.specfun import laguerre
from thermoinfo.specfun import laguerre_recurrence
from thermoinfo.specfun import log_gamma


@pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 2.0, 2.5, 7.3, 10.0, 55.5, 170.2])
def test_log_gamma_matches_scipy(x: float) -> None:
    assert log_gamma(x) == pytest.approx(special.gammaln(x), rel=1e-13, abs=1e-14)


def test_log_gamma_array() -> None:
    x = np.array([0.25, 3.0, 12.0])
    result = log_gamma(x)
    assert isinstance(result, np.ndarray)
    np.testing.assert_allclose(result, special.gammaln(x), rtol=1e-13)


def test_log_gamma_factorials() -> None:
    assert log_gamma(6.0) == pytest.approx(math.log(120.0), rel=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.5])
def test_log_gamma_domain(x: float) -> None:
    with pytest.raises(DomainError, match="x > 0"):
        log_gamma(x)


def test_log_gamma_not_finite() -> None:
    with pytest.raises(InvalidArgumentError):
        log_gamma(math.nan)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 20])
@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.5, 2.5])
def test_assoc_laguerre_matches_scipy(n: int, alpha: float) -> None:
    x = np.array([0.0, 0.5, 3.0, 10.0])
    expected = special.eval_genlaguerre(n, alpha, x)
    result = assoc_laguerre(n, alpha, x)
    np.testing.assert_allclose(result, expected, rtol=1e-10, atol=1e-10)


def test_assoc_laguerre_high_degree() -> None:
    with mpmath.workdps(40):
        expected = float(mpmath.laguerre(80, 0.5, 5.0))
    assert assoc_laguerre(80, 0.5, 5.0) == pytest.approx(expected, rel=1e-10, abs=1e-10)


def test_laguerre_low_orders() -> None:
    assert laguerre(0, 3.0) == 1.0
    assert laguerre(1, 3.0) == pytest.approx(-2.0)
    assert laguerre(2, 2.0) == pytest.approx(1.0 - 4.0 + 2.0)


def test_laguerre_recurrence_yields_every_degree() -> None:
    values = list(laguerre_recurrence(3, 0.0, 1.0))
    assert len(values) == 4
    assert values[:2] == [1.0, 0.0]


def test_assoc_laguerre_errors() -> None:
    with pytest.raises(InvalidArgumentError, match="nonnegative"):
        assoc_laguerre(-1, 0.0, 1.0)
    with pytest.raises(DomainError, match="alpha > -1"):
        assoc_laguerre(2, -1.0, 1.0)
    with pytest.raises(InvalidArgumentError):
        assoc_laguerre(2, 0.0, math.inf)


@pytest.mark.parametrize("alpha", [-0.7, -0.5, 0.0, 0.3, 0.5, 1.5, 2.5, 4.2])
def test_bessel_i_scaled_matches_scipy(alpha: float) -> None:
    z = np.array([1e-3, 0.5, 2.0, 10.0, 29.9, 30.1, 60.0, 500.0])
    expected = special.ive(alpha, z)
    np.testing.assert_allclose(bessel_i_scaled(alpha, z), expected, rtol=1e-11)


def test_bessel_i_scaled_large_argument_does_not_overflow() -> None:
    value = bessel_i_scaled(0.0, 1e5)
    assert value == pytest.approx(1.0 / math.sqrt(2.0 * math.pi * 1e5), rel=1e-5)


@pytest.mark.parametrize(
    "alpha,expected", [(0.0, 1.0), (0.5, 0.0), (2.5, 0.0), (-0.5, math.inf)]
)
def test_bessel_i_scaled_at_zero(alpha: float, expected: float) -> None:
    assert bessel_i_scaled(alpha, 0.0) == expected


def test_bessel_i_scaled_returns_float_for_scalars() -> None:
    assert isinstance(bessel_i_scaled(1.5, 2.0), float)


def test_bessel_i_scaled_domain() -> None:
    with pytest.raises(DomainError, match="z >= 0"):
        bessel_i_scaled(0.5, -1.0)
    with pytest.raises(DomainError):
        bessel_i_scaled(-1.2, 1.0)


def test_bessel_order() -> None:
    assert bessel_order(2) == 2.0
    with pytest.raises(DomainError):
        bessel_order(math.nan)


def test_is_half_integer() -> None:
    assert is_half_integer(-0.5)
    assert is_half_integer(2.5)
    assert not is_half_integer(2.0)
    assert not is_half_integer(0.3)


def test_laguerre_matches_direct_sum() -> None:
    terms = (math.comb(5, k) * (-1.3) ** k / math.factorial(k) for k in range(6))
    direct = math.fsum(terms)
    assert laguerre(5, 1.3) == pytest.approx(direct, rel=1e-13)


def test_assoc_laguerre_matches_finite_sum() -> None:
    n, alpha, x = 4, 1.5, 0.8

    def binomial(top: float, k: int) -> float:
        return math.exp(log_gamma(top + 1) - log_gamma(k + 1) - log_gamma(top - k + 1))

    direct = math.fsum(
        binomial(n + alpha, n - k) * (-x) ** k / math.factorial(k) for k in range(n + 1)
    )
    assert assoc_laguerre(n, alpha, x) == pytest.approx(direct, rel=1e-12)
    assert assoc_laguerre(1, alpha, x) == pytest.approx(1.0 + alpha - x)


def test_bessel_i_scaled_half_order_closed_form() -> None:
    expected = math.exp(-1.0) * math.sqrt(2.0 / math.pi) * math.cosh(1.0)
    assert bessel_i_scaled(-0.5, 1.0) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(0.452984, abs=1e-6)


def test_bessel_i_scaled_decreases_with_order() -> None:
    z = np.array([0.1, 1.0, 5.0, 29.5, 31.0, 200.0])
    values = [bessel_i_scaled(alpha, z) for alpha in (0.0, 0.5, 1.0, 1.7, 2.5)]
    for lower, higher in zip(values, values[1:]):
        assert np.all(higher <= lower)


def test_log_gamma_constants_and_recursion() -> None:
    assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-13)
    assert log_gamma(2.0) == pytest.approx(0.0, abs=1e-13)
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-13)
    for x in (0.3, 4.5, 77.0):
        expected = log_gamma(x) + math.log(x)
        assert log_gamma(x + 1.0) == pytest.approx(expected, rel=1e-12)
