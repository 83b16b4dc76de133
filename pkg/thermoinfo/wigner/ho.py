# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Wigner functions of the harmonic oscillator."""
import math
from typing import Optional
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike
from numpy.typing import NDArray
from pydantic import conint
from pydantic import PositiveFloat

from thermoinfo.config import resolve
from thermoinfo.config import Settings
from thermoinfo.exceptions import InvalidArgumentError
from thermoinfo.specfun import FloatOrArray
from thermoinfo.specfun import laguerre
from thermoinfo.specfun import laguerre_recurrence
from thermoinfo.wigner.base import WignerFunction


def _as_output(value: NDArray[np.float64], like: ArrayLike) -> FloatOrArray:
    return float(value) if np.ndim(like) == 0 else value


def _finite_points(x: ArrayLike, k: ArrayLike) -> Tuple[NDArray, NDArray]:
    xs, ks = np.broadcast_arrays(
        np.asarray(x, dtype=np.float64), np.asarray(k, dtype=np.float64)
    )
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ks))):
        raise InvalidArgumentError("phase-space points must be finite")
    return xs, ks


def ho_eigen_wigner(n: int, x: ArrayLike, k: ArrayLike) -> FloatOrArray:
    """W_n(x, k) = (-1)^n / pi * exp(-r^2) * L_n(2 r^2), r^2 = x^2 + k^2."""
    if n < 0:
        raise InvalidArgumentError(f"quantum number must be nonnegative, got {n}")
    xs, ks = _finite_points(x, k)
    r2 = xs * xs + ks * ks
    value = (-1.0) ** n / math.pi * np.exp(-r2) * np.asarray(laguerre(n, 2.0 * r2))
    return float(value) if value.ndim == 0 else value


def _hermite_function(n: int, x: NDArray[np.float64]) -> NDArray[np.float64]:
    # Normalized Hermite functions by their stable three-term recurrence.
    previous = np.zeros_like(x)
    current = math.pi**-0.25 * np.exp(-0.5 * x * x)
    for m in range(n):
        previous, current = current, (
            math.sqrt(2.0 / (m + 1)) * x * current - math.sqrt(m / (m + 1)) * previous
        )
    return current


class HOEigenstateWigner(WignerFunction):
    n: conint(ge=0)  # type: ignore[valid-type]

    @property
    def envelope(self) -> float:
        return 1.0 / (1.0 + 0.5 * self.n)

    def frequencies(self, x_extent: float, k_extent: float) -> Tuple[float, float]:
        ripple = 2.0 * math.sqrt(2.0 * self.n + 1.0)
        return 2.0 * x_extent + ripple, 2.0 * k_extent + ripple

    def evaluate(
        self, x: NDArray[np.float64], k: NDArray[np.float64], settings: Settings
    ) -> NDArray[np.float64]:
        return np.asarray(ho_eigen_wigner(self.n, x, k))

    def k_marginal(self, x: ArrayLike) -> FloatOrArray:
        arr = np.asarray(x, dtype=np.float64)
        return _as_output(_hermite_function(self.n, arr) ** 2, x)

    def x_marginal(self, k: ArrayLike) -> Optional[FloatOrArray]:
        return self.k_marginal(k)

    def describe(self) -> str:
        return f"HO eigenstate n={self.n}"


class ThermalWignerHO(WignerFunction):
    """Thermal oscillator state, W = t / pi * exp(-t (x^2 + k^2)).

    ``beta`` may be infinite, which gives the ground state.
    """

    beta: PositiveFloat
    omega: PositiveFloat = 1.0

    @property
    def t(self) -> float:
        return math.tanh(0.5 * self.beta * self.omega)

    @property
    def envelope(self) -> float:
        return self.t

    def evaluate(
        self, x: NDArray[np.float64], k: NDArray[np.float64], settings: Settings
    ) -> NDArray[np.float64]:
        t = self.t
        return t / math.pi * np.exp(-t * (x * x + k * k))

    def k_marginal(self, x: ArrayLike) -> FloatOrArray:
        t = self.t
        arr = np.asarray(x, dtype=np.float64)
        return _as_output(math.sqrt(t / math.pi) * np.exp(-t * arr * arr), x)

    def x_marginal(self, k: ArrayLike) -> Optional[FloatOrArray]:
        return self.k_marginal(k)

    def describe(self) -> str:
        return f"HO thermal beta={self.beta:g} omega={self.omega:g}"


def ho_thermal_wigner(
    state: ThermalWignerHO, x: ArrayLike, k: ArrayLike
) -> FloatOrArray:
    xs, ks = _finite_points(x, k)
    return state(xs, ks)


def ho_thermal_wigner_series(
    beta: float,
    x: ArrayLike,
    k: ArrayLike,
    n_terms: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> FloatOrArray:
    """Thermal Wigner function as the Boltzmann mixture of eigenstate Wigner
    functions, sum_n (1 - q) q^n W_n with q = exp(-beta).

    Without ``n_terms`` the mixture is cut where q^n drops below ``tol``.
    """
    settings = resolve(settings)
    if not (math.isfinite(beta) and beta > 0.0):
        raise InvalidArgumentError(f"beta must be positive and finite, got {beta}")
    q = math.exp(-beta)
    if n_terms is None:
        n_terms = max(1, math.ceil(-math.log(settings.tol) / beta))
    if n_terms < 1:
        raise InvalidArgumentError(f"n_terms must be positive, got {n_terms}")
    xs, ks = _finite_points(x, k)
    r2 = xs * xs + ks * ks
    total = np.zeros_like(r2)
    weight = 1.0 - q
    for polynomial in laguerre_recurrence(n_terms - 1, 0.0, 2.0 * r2):
        total = total + weight * polynomial
        weight *= -q
    value = total * np.exp(-r2) / math.pi
    return float(value) if value.ndim == 0 else value
