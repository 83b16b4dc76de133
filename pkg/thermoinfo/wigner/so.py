# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Thermal Wigner function of the singular oscillator.

With b = beta * omega, s = sinh(b) and a = tanh(b / 2) the half-line state is

    W(x, k) = 2 e^{alpha b} / pi * int_{-x}^{x} dy cos(2 k y) sqrt(x^2 - y^2)
              * exp(-a x^2 - y^2 / a) * ie_alpha((x^2 - y^2) / s)

for x >= 0, where ie_alpha is the exponentially scaled Bessel function and the
exponent -coth(b)(x^2 + y^2) + (x^2 - y^2)/s has already been combined. The
substitution y = x sin(theta) removes the square-root endpoint behaviour.

The even embedding puts psi(|x|) / sqrt(2) on the whole line. Its Wigner
function is half the same integral taken over every y with |x^2 - y^2| in
place of x^2 - y^2; the part |y| > x decays as exp(-x^2 / a - a y^2).
"""
import math
from typing import Callable
from typing import Optional
from typing import Tuple

import mpmath
import numpy as np
from numpy.typing import ArrayLike
from numpy.typing import NDArray
from pydantic import PositiveFloat
from pydantic import validator
from structlog import get_logger

from thermoinfo.config import resolve
from thermoinfo.config import Settings
from thermoinfo.config import SOEmbedding
from thermoinfo.exceptions import ConvergenceError
from thermoinfo.exceptions import DomainError
from thermoinfo.exceptions import InvalidArgumentError
from thermoinfo.specfun import bessel_i_scaled
from thermoinfo.specfun import bessel_order
from thermoinfo.specfun import FloatOrArray
from thermoinfo.specfun import laguerre_recurrence
from thermoinfo.wigner.base import WignerFunction
from thermoinfo.wigner.quadrature import composite_rule
from thermoinfo.wigner.quadrature import next_power_of_two
from thermoinfo.wigner.quadrature import refine

logger = get_logger()

# Cap on points times quadrature nodes held in memory at once.
BLOCK_NODES = 2**21
# Digits carried by the multiple precision side of the resummation check.
HILLE_HARDY_DPS = 50
HILLE_HARDY_MAX_TERMS = 4000
HILLE_HARDY_TOL = 1e-12

Integrand = Callable[[NDArray[np.float64], NDArray[np.float64], int], NDArray]


class ThermalWignerSO(WignerFunction):
    """Canonical ensemble of the singular oscillator with ladder 2n + 1."""

    beta: PositiveFloat
    alpha: float
    omega: PositiveFloat = 1.0
    embedding: SOEmbedding = SOEmbedding.EVEN

    @validator("alpha")
    def alpha_above_minus_one(cls, v: float) -> float:
        return bessel_order(v)

    @validator("beta")
    def beta_finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("beta must be finite")
        return v

    @property
    def b(self) -> float:
        return self.beta * self.omega

    @property
    def a(self) -> float:
        return math.tanh(0.5 * self.b)

    @property
    def prefactor(self) -> float:
        return 2.0 * math.exp(self.alpha * self.b) / math.pi

    @property
    def half_line(self) -> bool:
        return self.embedding is SOEmbedding.HALF_LINE

    @property
    def envelope(self) -> float:
        return self.a

    @property
    def k_envelope(self) -> float:
        # The momentum decay has no Gaussian bound in general.
        return 0.0

    def reach(self, settings: Settings) -> float:
        """|y| beyond which the outer integrand is below ``inner_tol``."""
        return math.sqrt(self._log_cut(settings) / self.a)

    @staticmethod
    def _log_cut(settings: Settings) -> float:
        return -math.log(settings.inner_tol) + 6.0

    def frequencies(self, x_extent: float, k_extent: float) -> Tuple[float, float]:
        x_freq = 2.0 * k_extent + 2.0 * self.a * x_extent
        if self.half_line:
            return x_freq, 2.0 * x_extent
        # The outer part of the even embedding spreads over |y| ~ a^(-1/2).
        return x_freq, 2.0 * max(x_extent, 1.0 / math.sqrt(self.a))

    # ----------------------------------------------------------------------------------
    # Inner integrals
    # ----------------------------------------------------------------------------------

    def _inside(
        self, x: NDArray[np.float64], k: NDArray[np.float64], panels: int, nodes: int
    ) -> NDArray[np.float64]:
        """Twice the integral over 0 <= y <= x, as a function of theta."""
        a, s = self.a, math.sinh(self.b)
        theta, weights = composite_rule(0.0, 0.5 * math.pi, panels, nodes)
        safe = np.where(x > 0.0, x, 1.0)[:, None]
        sin, cos = np.sin(theta)[None, :], np.cos(theta)[None, :]
        chord = safe * cos
        kernel = np.asarray(bessel_i_scaled(self.alpha, chord * chord / s))
        integrand = (
            np.cos(2.0 * k[:, None] * safe * sin)
            * chord
            * chord
            * np.exp(-a * safe * safe - (safe * sin) ** 2 / a)
            * kernel
        )
        return np.where(x > 0.0, 2.0 * integrand @ weights, 0.0)

    def _outside(
        self,
        x: NDArray[np.float64],
        k: NDArray[np.float64],
        panels: int,
        nodes: int,
        reach: float,
    ) -> NDArray[np.float64]:
        """Twice the integral over y > x, with y^2 = x^2 + v^2."""
        a, s = self.a, math.sinh(self.b)
        v, weights = composite_rule(0.0, reach, panels, nodes)
        v = v[None, :]
        xx = x[:, None]
        y = np.sqrt(xx * xx + v * v)
        kernel = np.asarray(bessel_i_scaled(self.alpha, v * v / s))
        integrand = (
            np.cos(2.0 * k[:, None] * y)
            * v
            * (v / y)
            * np.exp(-xx * xx / a - a * y * y)
            * kernel
        )
        return 2.0 * integrand @ weights

    def _refine_block(
        self,
        x: NDArray[np.float64],
        k: NDArray[np.float64],
        panels: int,
        integrand: Integrand,
        settings: Settings,
        label: str,
    ) -> NDArray[np.float64]:
        scale = self.prefactor
        refined = refine(
            lambda level: scale * integrand(x, k, level),
            panels,
            settings.max_panels,
            settings.inner_tol,
            label=label,
        )
        return refined.value

    def _integrate(
        self,
        x: NDArray[np.float64],
        k: NDArray[np.float64],
        periods: NDArray[np.float64],
        integrand: Integrand,
        settings: Settings,
        label: str,
    ) -> NDArray[np.float64]:
        nodes = settings.gl_nodes
        need = np.array(
            [
                next_power_of_two(settings.nodes_per_period * p / nodes)
                for p in periods
            ],
            dtype=int,
        )
        result = np.empty_like(x)
        for panels in np.unique(need):
            members = np.flatnonzero(need == panels)
            block = max(1, BLOCK_NODES // (2 * int(panels) * nodes))
            for start in range(0, len(members), block):
                idx = members[start : start + block]
                result[idx] = self._refine_block(
                    x[idx], k[idx], int(panels), integrand, settings, label
                )
        return result

    def _inside_w(
        self, x: NDArray[np.float64], k: NDArray[np.float64], settings: Settings
    ) -> NDArray[np.float64]:
        a = self.a
        periods = (np.abs(k) * x + x / math.sqrt(a)) / math.pi + 1.0
        return self._integrate(
            x,
            k,
            periods,
            lambda xs, ks, panels: self._inside(xs, ks, panels, settings.gl_nodes),
            settings,
            "SO inner integral",
        )

    def _outside_w(
        self, x: NDArray[np.float64], k: NDArray[np.float64], settings: Settings
    ) -> NDArray[np.float64]:
        reach = self.reach(settings)
        periods = (np.abs(k) * reach + math.sqrt(self._log_cut(settings))) / math.pi
        return self._integrate(
            x,
            k,
            periods + 1.0,
            lambda xs, ks, panels: self._outside(
                xs, ks, panels, settings.gl_nodes, reach
            ),
            settings,
            "SO outer integral",
        )

    def evaluate(
        self, x: NDArray[np.float64], k: NDArray[np.float64], settings: Settings
    ) -> NDArray[np.float64]:
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(k))):
            raise InvalidArgumentError("phase-space points must be finite")
        if self.half_line:
            result = np.zeros_like(x)
            inside = x > 0.0
            result[inside] = self._inside_w(x[inside], k[inside], settings)
            return result
        r = np.abs(x)
        return 0.5 * (self._inside_w(r, k, settings) + self._outside_w(r, k, settings))

    # ----------------------------------------------------------------------------------
    # Coordinate density
    # ----------------------------------------------------------------------------------

    def _density_at_origin(self) -> float:
        if self.alpha > -0.5:
            return 0.0
        if self.alpha < -0.5:
            return math.inf
        return math.sqrt(2.0 * math.sinh(self.b) / math.pi) * 2.0 * math.exp(
            self.alpha * self.b
        )

    def k_marginal(self, x: ArrayLike) -> FloatOrArray:
        """rho(x, x) = 2 e^{alpha b} x exp(-a x^2) ie_alpha(x^2 / s) on x > 0."""
        arr = np.asarray(x, dtype=np.float64)
        r = np.abs(arr)
        safe = np.where(r > 0.0, r, 1.0)
        density = (
            2.0
            * math.exp(self.alpha * self.b)
            * safe
            * np.exp(-self.a * safe * safe)
            * np.asarray(bessel_i_scaled(self.alpha, safe * safe / math.sinh(self.b)))
        )
        density = np.where(r > 0.0, density, self._density_at_origin())
        if self.half_line:
            density = np.where(arr >= 0.0, density, 0.0)
        else:
            density = 0.5 * density
        return float(density) if density.ndim == 0 else density

    def describe(self) -> str:
        return (
            f"SO thermal beta={self.beta:g} alpha={self.alpha:g} "
            f"omega={self.omega:g} embedding={self.embedding.value}"
        )


def so_thermal_wigner(
    state: ThermalWignerSO,
    x: ArrayLike,
    k: ArrayLike,
    settings: Optional[Settings] = None,
) -> FloatOrArray:
    """The half-line thermal Wigner function of ``state`` on x >= 0.

    Raises:
        DomainError: if any x < 0.
        QuadratureError: if the inner integral does not converge.
    """
    if np.any(np.asarray(x) < 0.0):
        raise DomainError("the singular oscillator Wigner function needs x >= 0")
    half = state.copy(update={"embedding": SOEmbedding.HALF_LINE})
    return half(x, k, settings)


def hille_hardy_check(
    alpha: float,
    x: float,
    y: float,
    lam: float,
    n_terms: Optional[int] = None,
) -> Tuple[float, float, float]:
    """Compare the bilinear Laguerre series with its Bessel resummation.

    The series sum_n lam^n n! / Gamma(alpha + n + 1) L_n((x+y)^2) L_n((x-y)^2)
    is summed in multiple precision; the closed form

        u^-alpha (1 - lam)^-1 lam^(-alpha/2) exp(-2 lam (x^2 + y^2) / (1 - lam))
        * I_alpha(2 sqrt(lam) u / (1 - lam)),   u = x^2 - y^2,

    is evaluated in double precision through the scaled Bessel function.

    Returns:
        ``(lhs, rhs, rel_err)``.

    Raises:
        DomainError: unless |y| < x and 0 < lam < 1, or if alpha <= -1.
        ConvergenceError: if the series tail is not below 1e-12 relative within
            ``n_terms`` (default 4000) terms.
    """
    alpha = bessel_order(alpha)
    if not all(math.isfinite(v) for v in (x, y, lam)):
        raise InvalidArgumentError("arguments must be finite")
    if not abs(y) < x:
        raise DomainError(f"need |y| < x, got x={x}, y={y}")
    if not 0.0 < lam < 1.0:
        raise DomainError(f"need 0 < lambda < 1, got {lam}")
    cap = HILLE_HARDY_MAX_TERMS if n_terms is None else n_terms

    with mpmath.workdps(HILLE_HARDY_DPS):
        mp_alpha = mpmath.mpf(alpha)
        mp_lam = mpmath.mpf(lam)
        coefficient = 1 / mpmath.gamma(mp_alpha + 1)
        total = mpmath.mpf(0)
        recent = []
        pairs = zip(
            laguerre_recurrence(cap - 1, mp_alpha, mpmath.mpf(x + y) ** 2),
            laguerre_recurrence(cap - 1, mp_alpha, mpmath.mpf(x - y) ** 2),
        )
        converged = False
        for n, (first, second) in enumerate(pairs):
            term = coefficient * first * second
            total += term
            recent = (recent + [abs(term)])[-3:]
            # Laguerre products grow at most polynomially against lam^n.
            if n >= 2 and max(recent) / (1 - mp_lam) <= HILLE_HARDY_TOL * abs(total):
                converged = True
                break
            coefficient *= mp_lam * (n + 1) / (mp_alpha + n + 1)
        lhs = float(total)
    if not converged:
        raise ConvergenceError(
            f"Hille-Hardy series did not converge within {cap} terms",
            partial_sum=lhs,
            terms_used=cap,
        )

    u = x * x - y * y
    z = 2.0 * math.sqrt(lam) * u / (1.0 - lam)
    log_rhs = (
        -alpha * math.log(u)
        - math.log1p(-lam)
        - 0.5 * alpha * math.log(lam)
        - 2.0 * lam * (x * x + y * y) / (1.0 - lam)
        + z
    )
    rhs = math.exp(log_rhs) * float(bessel_i_scaled(alpha, z))
    rel_err = abs(lhs - rhs) / abs(rhs)
    logger.debug("Hille-Hardy check", alpha=alpha, lhs=lhs, rhs=rhs, rel_err=rel_err)
    return lhs, rhs, rel_err


def _wedge(p: float, q: float) -> float:
    return math.atan(math.sqrt(q / p)) / math.sqrt(p * q)


def ho_so_projection_half_order(
    beta: float, embedding: Optional[SOEmbedding] = None
) -> float:
    """Exact projection of HO(2 beta) on SO(beta, alpha = -1/2), omega = 1.

    The even embedding of the alpha = -1/2 ensemble is the even-parity oscillator
    ensemble, giving (1 - q)^2 / (1 - q^3) with q = exp(-2 beta). The half-line
    embedding reduces to two Gaussian wedge integrals and tends to 1/2.
    """
    if not (math.isfinite(beta) and beta > 0.0):
        raise InvalidArgumentError(f"beta must be positive and finite, got {beta}")
    embedding = resolve(None).so_embedding if embedding is None else embedding
    q = math.exp(-2.0 * beta)
    if embedding is SOEmbedding.EVEN:
        return (1.0 - q) ** 2 / (1.0 - q**3)
    t, a = math.tanh(beta), math.tanh(0.5 * beta)
    wedges = _wedge(t + a, 1.0 / t + 1.0 / a) + _wedge(t + 1.0 / a, 1.0 / t + a)
    return 2.0 / math.pi * (1.0 - q) / math.sqrt(1.0 + q) * wedges
