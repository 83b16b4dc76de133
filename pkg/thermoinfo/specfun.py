# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Special-function kernel.

Laguerre polynomials, exponentially scaled modified Bessel functions of the first
kind and the logarithm of the gamma function, evaluated elementwise on numpy
arrays. All functions are pure and safe to call concurrently.
"""
import math
from typing import Any
from typing import Iterator
from typing import Tuple
from typing import Union

import numpy as np
from numpy.typing import ArrayLike
from numpy.typing import NDArray
from pydantic import confloat
from pydantic import parse_obj_as
from pydantic import ValidationError

from thermoinfo.exceptions import DomainError
from thermoinfo.exceptions import InvalidArgumentError

FloatOrArray = Union[float, NDArray[np.float64]]

# Above this argument the scaled Bessel function switches from the ascending
# series to the large-argument expansion.
Z_SWITCH = 30.0
SERIES_TERMS = 60
ASYMPTOTIC_TERMS = 40
# Degree above which the Laguerre recurrence is carried in double-double.
COMPENSATED_DEGREE = 50

BesselOrder = confloat(gt=-1.0, allow_inf_nan=False)


def bessel_order(alpha: float) -> float:
    """Validate a Bessel/Laguerre order; alpha must lie strictly above -1."""
    try:
        return float(parse_obj_as(BesselOrder, alpha))  # type: ignore[arg-type]
    except ValidationError as error:
        raise DomainError(f"order must satisfy alpha > -1, got {alpha}") from error


def is_half_integer(alpha: float) -> bool:
    return (2.0 * alpha).is_integer() and not alpha.is_integer()


def _as_array(x: ArrayLike) -> Tuple[NDArray[np.float64], bool]:
    arr = np.asarray(x, dtype=np.float64)
    return arr, arr.ndim == 0


def _output(arr: NDArray[np.float64], scalar: bool) -> FloatOrArray:
    return float(arr) if scalar else arr


def _require_finite(arr: NDArray[np.float64], name: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} must be finite")


# --------------------------------------------------------------------------------------
# log-gamma
# --------------------------------------------------------------------------------------

_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_STIRLING_MIN = 10.0


def log_gamma(x: ArrayLike) -> FloatOrArray:
    """Natural logarithm of the gamma function for x > 0.

    Arguments below 10 are shifted upwards with the functional equation
    Gamma(x + 1) = x Gamma(x); the Stirling series with seven Bernoulli
    corrections is used from there on.

    Raises:
        DomainError: if any x <= 0.
    """
    arr, scalar = _as_array(x)
    _require_finite(arr, "x")
    if np.any(arr <= 0.0):
        raise DomainError("log_gamma is only defined for x > 0")

    shift = np.ceil(np.maximum(_STIRLING_MIN - arr, 0.0))
    product = np.ones_like(arr)
    for i in range(int(_STIRLING_MIN)):
        product = np.where(i < shift, product * (arr + i), product)
    y = arr + shift

    inverse = 1.0 / y
    inverse_sq = inverse * inverse
    correction = np.zeros_like(y)
    for coefficient in reversed(_STIRLING):
        correction = correction * inverse_sq + coefficient
    result = (y - 0.5) * np.log(y) - y + _HALF_LOG_2PI + correction * inverse
    return _output(result - np.log(product), scalar)


# --------------------------------------------------------------------------------------
# Laguerre polynomials
# --------------------------------------------------------------------------------------


def laguerre_recurrence(n: int, alpha: Any, x: Any) -> Iterator[Any]:
    """Yield L_0^alpha(x), ..., L_n^alpha(x) from the three-term recurrence.

    Works for any number type closed under arithmetic: floats, numpy arrays, or
    multiple precision numbers.
    """
    previous = x * 0 + 1
    yield previous
    if n == 0:
        return
    current = 1 + alpha - x
    yield current
    for k in range(1, n):
        previous, current = current, (
            (2 * k + 1 + alpha - x) * current - (k + alpha) * previous
        ) / (k + 1)
        yield current


def _two_sum(a: Any, b: Any) -> Tuple[Any, Any]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a: Any) -> Tuple[Any, Any]:
    t = 134217729.0 * a  # 2**27 + 1
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a: Any, b: Any) -> Tuple[Any, Any]:
    p = a * b
    a_hi, a_lo = _split(a)
    b_hi, b_lo = _split(b)
    return p, ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo


def _compensated_laguerre(
    n: int, alpha: float, x: NDArray[np.float64]
) -> NDArray[np.float64]:
    # Each L_k is carried as an unevaluated sum hi + lo.
    prev_hi, prev_lo = np.ones_like(x), np.zeros_like(x)
    cur_hi, cur_lo = _two_sum(1.0 + alpha, -x)
    for k in range(1, n):
        a_hi, a_lo = _two_sum(2.0 * k + 1.0 + alpha, -x)
        b_hi, b_lo = _two_sum(float(k), alpha)
        p1, e1 = _two_prod(a_hi, cur_hi)
        e1 = e1 + a_hi * cur_lo + a_lo * cur_hi
        p2, e2 = _two_prod(b_hi, prev_hi)
        e2 = e2 + b_hi * prev_lo + b_lo * prev_hi
        s, e = _two_sum(p1, -p2)
        e = e + e1 - e2
        q = s / (k + 1)
        ph, pl = _two_prod(q, float(k + 1))
        r = (((s - ph) - pl) + e) / (k + 1)
        prev_hi, prev_lo = cur_hi, cur_lo
        cur_hi, cur_lo = _two_sum(q, r)
    return cur_hi + cur_lo


def assoc_laguerre(n: int, alpha: float, x: ArrayLike) -> FloatOrArray:
    """Associated Laguerre polynomial L_n^alpha(x).

    Degrees above ``COMPENSATED_DEGREE`` run the recurrence in double-double
    arithmetic.

    Raises:
        InvalidArgumentError: if n is negative or x is not finite.
        DomainError: if alpha <= -1.
    """
    if n < 0:
        raise InvalidArgumentError(f"degree must be nonnegative, got {n}")
    alpha = bessel_order(alpha)
    arr, scalar = _as_array(x)
    _require_finite(arr, "x")
    if n > COMPENSATED_DEGREE:
        return _output(_compensated_laguerre(n, alpha, arr), scalar)
    value = arr
    for value in laguerre_recurrence(n, alpha, arr):
        pass
    return _output(np.asarray(value, dtype=np.float64), scalar)


def laguerre(n: int, x: ArrayLike) -> FloatOrArray:
    """Laguerre polynomial L_n(x)."""
    return assoc_laguerre(n, 0.0, x)


# --------------------------------------------------------------------------------------
# Scaled modified Bessel function of the first kind
# --------------------------------------------------------------------------------------


def _scaled_cosh_kernel(z: NDArray[np.float64]) -> NDArray[np.float64]:
    # e^{-z} I_{-1/2}(z)
    with np.errstate(divide="ignore"):
        return np.sqrt(2.0 / (np.pi * z)) * 0.5 * (1.0 + np.exp(-2.0 * z))


def _scaled_sinh_kernel(z: NDArray[np.float64]) -> NDArray[np.float64]:
    # e^{-z} I_{1/2}(z)
    safe = np.where(z > 0.0, z, 1.0)
    value = np.sqrt(2.0 / (np.pi * safe)) * 0.5 * -np.expm1(-2.0 * safe)
    return np.where(z > 0.0, value, 0.0)


def _scaled_series(
    alpha: float, z: NDArray[np.float64], terms: int
) -> NDArray[np.float64]:
    m = np.arange(terms, dtype=np.float64)
    log_denominator = np.asarray(log_gamma(m + 1.0)) + np.asarray(
        log_gamma(m + alpha + 1.0)
    )
    log_half = np.log(z / 2.0)
    total = np.zeros_like(z)
    for j in range(terms):
        total += np.exp((2.0 * j + alpha) * log_half - log_denominator[j] - z)
    return total


def _scaled_asymptotic(alpha: float, z: NDArray[np.float64]) -> NDArray[np.float64]:
    mu = 4.0 * alpha * alpha
    term = np.ones_like(z)
    total = np.ones_like(z)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, ASYMPTOTIC_TERMS + 1):
        nxt = -term * (mu - (2.0 * k - 1.0) ** 2) / (8.0 * k * z)
        active &= np.abs(nxt) < np.abs(term)
        total = np.where(active, total + nxt, total)
        term = nxt
        if not np.any(active & (np.abs(nxt) > 1e-17 * np.abs(total))):
            break
    return total / np.sqrt(2.0 * np.pi * z)


def _scaled_half_integer(alpha: float, z: NDArray[np.float64]) -> NDArray[np.float64]:
    below = _scaled_cosh_kernel(z)
    current = _scaled_sinh_kernel(z)
    if alpha == -0.5:
        return below
    nu = 0.5
    while nu < alpha:
        # I_{nu+1} = I_{nu-1} - (2 nu / z) I_nu, unchanged by the common scaling
        below, current = current, below - (2.0 * nu / z) * current
        nu += 1.0
    return current


def bessel_i_scaled(alpha: float, z: ArrayLike) -> FloatOrArray:
    """Exponentially scaled modified Bessel function e^{-z} I_alpha(z) for z >= 0.

    Orders -1/2 and 1/2 use the hyperbolic closed forms everywhere. Higher
    half-integer orders use upward recurrence from those closed forms where it is
    stable (z >= 2 alpha^2) and the power series elsewhere. General orders use the
    ascending series up to the switch point and the large-argument expansion
    beyond it.

    Raises:
        DomainError: if alpha <= -1 or any z < 0.
    """
    alpha = bessel_order(alpha)
    arr, scalar = _as_array(z)
    if np.any(np.isnan(arr)) or np.any(arr < 0.0):
        raise DomainError("scaled Bessel function requires z >= 0")

    if alpha in (-0.5, 0.5):
        kernel = _scaled_cosh_kernel if alpha < 0 else _scaled_sinh_kernel
        return _output(kernel(arr), scalar)

    z_switch = max(Z_SWITCH, alpha * alpha)
    series_reach = 2.0 * alpha * alpha if is_half_integer(alpha) else z_switch
    terms = SERIES_TERMS + 2 * int(math.ceil(max(series_reach - Z_SWITCH, 0.0)))
    result = np.empty_like(arr)

    zero = arr == 0.0
    if alpha == 0.0:
        result[zero] = 1.0
    else:
        result[zero] = 0.0 if alpha > 0.0 else np.inf

    if is_half_integer(alpha):
        closed = ~zero & (arr >= 2.0 * alpha * alpha)
        result[closed] = _scaled_half_integer(alpha, arr[closed])
        series = ~zero & ~closed
        result[series] = _scaled_series(alpha, arr[series], terms)
    else:
        large = arr > z_switch
        result[large] = _scaled_asymptotic(alpha, arr[large])
        series = ~zero & ~large
        result[series] = _scaled_series(alpha, arr[series], terms)
    return _output(result, scalar)
