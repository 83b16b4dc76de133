# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Partition functions and the classical thermodynamic quantifiers.

Ladder spectra are summed in increasing energy order, relative to the ground
level, until an eventual-ratio bound on the remaining tail falls below the
requested tolerance. Composite models combine the results of their factors.
"""
import itertools
import math
from enum import Enum
from typing import Optional

import more_itertools
import numpy as np
from pydantic import BaseModel
from structlog import get_logger

from thermoinfo.config import resolve
from thermoinfo.config import Settings
from thermoinfo.derivatives import log_beta_derivatives
from thermoinfo.exceptions import ConvergenceError
from thermoinfo.exceptions import DivergenceError
from thermoinfo.exceptions import DomainError
from thermoinfo.exceptions import InvalidArgumentError
from thermoinfo.specfun import log_gamma
from thermoinfo.spectra import ClosedForm
from thermoinfo.spectra import EnsembleModel
from thermoinfo.spectra import ProductSpectrum
from thermoinfo.spectra import SymmetrizedPowerSpectrum

logger = get_logger()

LEVEL_CHUNK = 256


class Method(str, Enum):
    AUTO = "auto"
    SERIES = "series"
    NUMERIC = "numeric"


class SeriesResult(BaseModel):
    """Partition function value with its certified truncation bound.

    ``tail_bound`` bounds the absolute truncation error of ``value``. ``energy``
    and ``capacity`` are the dimensionless internal energy and heat capacity
    from the first and second moments of the same sum.
    """

    value: float
    log_value: float
    terms_used: int
    tail_bound: float
    energy: float
    capacity: float

    class Config:
        frozen = True


class _Neumaier:
    """Compensated running sum."""

    def __init__(self) -> None:
        self.total = 0.0
        self.compensation = 0.0

    def add(self, value: float) -> None:
        total = self.total + value
        if abs(self.total) >= abs(value):
            self.compensation += (self.total - total) + value
        else:
            self.compensation += (value - total) + self.total
        self.total = total

    @property
    def value(self) -> float:
        return self.total + self.compensation


def _geometric_tail(previous: float, last: float) -> float:
    # Valid while term ratios are nonincreasing, which holds for every
    # built-in ladder once the ratio drops below one.
    if last == 0.0:
        return 0.0
    if previous <= 0.0:
        return math.inf
    ratio = last / previous
    if ratio >= 1.0:
        return math.inf
    return last * ratio / (1.0 - ratio)


def check_beta(model: EnsembleModel, beta: float, settings: Settings) -> float:
    """Validate an inverse temperature for ``model``.

    Raises:
        InvalidArgumentError: if beta is not finite.
        DomainError: if beta <= 0.
        DivergenceError: if beta < beta_min and the spectrum is unbounded.
    """
    if not math.isfinite(beta):
        raise InvalidArgumentError(f"beta must be finite, got {beta}")
    if beta <= 0.0:
        raise DomainError(f"beta must be positive, got {beta}")
    if beta < settings.beta_min and not model.spectrum.finite:
        raise DivergenceError(
            f"beta={beta} is below beta_min={settings.beta_min}; "
            "the partition function of an unbounded spectrum diverges"
        )
    return float(beta)


def _check_tol(tol: Optional[float], settings: Settings) -> float:
    if tol is None:
        return settings.tol
    if not (0.0 < tol <= 1e-3):
        raise InvalidArgumentError(f"tolerance must lie in (0, 1e-3], got {tol}")
    return tol


def _sum_ladder(
    model: EnsembleModel, beta: float, tol: float, settings: Settings
) -> SeriesResult:
    b = model.reduced(beta)
    levels = model.spectrum.levels()
    ground = next(levels)
    e0 = ground.energy

    sums = [_Neumaier(), _Neumaier(), _Neumaier()]
    previous = np.zeros(3)
    tails = np.full(3, math.inf)
    terms_used = 0
    stream = itertools.chain([ground], levels)
    for chunk in more_itertools.chunked(stream, LEVEL_CHUNK):
        energies = np.fromiter((level.energy for level in chunk), float, len(chunk))
        degeneracies = np.fromiter(
            (level.degeneracy for level in chunk), float, len(chunk)
        )
        x = b * (energies - e0)
        weights = degeneracies * np.exp(-x)
        columns = (weights, weights * x, weights * x * x)
        for accumulator, column in zip(sums, columns):
            accumulator.add(math.fsum(column))
        terms_used += len(chunk)

        lasts = np.array([column[-1] for column in columns])
        if len(chunk) > 1:
            previous = np.array([column[-2] for column in columns])
        tails = np.array(
            [_geometric_tail(p, t) for p, t in zip(previous, lasts)], dtype=float
        )
        previous = lasts
        values = np.array([accumulator.value for accumulator in sums])
        if not model.spectrum.finite and np.all(tails <= tol * values):
            break
        if terms_used >= settings.max_terms:
            partial = math.exp(-b * e0) * sums[0].value
            raise ConvergenceError(
                f"partition series for {model.describe()} at beta={beta} did not "
                f"certify its tail within {settings.max_terms} terms",
                partial_sum=partial,
                terms_used=terms_used,
            )
    else:
        tails = np.zeros(3)

    s0, s1, s2 = (accumulator.value for accumulator in sums)
    mean = s1 / s0
    variance = max(s2 / s0 - mean * mean, 0.0)
    log_value = -b * e0 + math.log(s0)
    result = SeriesResult(
        value=math.exp(log_value),
        log_value=log_value,
        terms_used=terms_used,
        tail_bound=math.exp(-b * e0) * float(tails[0]),
        energy=b * e0 + mean,
        capacity=variance,
    )
    logger.debug(
        "Partition series converged",
        model=model.describe(),
        beta=beta,
        terms_used=terms_used,
        tail_bound=result.tail_bound,
    )
    return result


def _relative_tail(result: SeriesResult) -> float:
    return result.tail_bound / result.value if result.value > 0.0 else 0.0


def _sum_series(
    model: EnsembleModel, beta: float, tol: float, settings: Settings
) -> SeriesResult:
    spectrum = model.spectrum
    if isinstance(spectrum, ProductSpectrum):
        factor_tol = tol / len(spectrum.factors)
        parts = [
            _sum_series(factor, model.reduced(beta), factor_tol, settings)
            for factor in spectrum.factors
        ]
        log_value = math.fsum(part.log_value for part in parts)
        growth = math.prod(1.0 + _relative_tail(part) for part in parts)
        return SeriesResult(
            value=math.exp(log_value),
            log_value=log_value,
            terms_used=sum(part.terms_used for part in parts),
            tail_bound=math.exp(log_value) * (growth - 1.0),
            energy=math.fsum(part.energy for part in parts),
            capacity=math.fsum(part.capacity for part in parts),
        )
    if isinstance(spectrum, SymmetrizedPowerSpectrum):
        n = spectrum.n
        base = _sum_series(spectrum.base, model.reduced(beta), tol / n, settings)
        log_value = n * base.log_value - float(log_gamma(n + 1.0))
        growth = (1.0 + _relative_tail(base)) ** n
        return SeriesResult(
            value=math.exp(log_value),
            log_value=log_value,
            terms_used=base.terms_used,
            tail_bound=math.exp(log_value) * (growth - 1.0),
            energy=n * base.energy,
            capacity=n * base.capacity,
        )
    return _sum_ladder(model, beta, tol, settings)


def _from_closed_form(form: ClosedForm) -> SeriesResult:
    return SeriesResult(
        value=math.exp(form.log_z),
        log_value=form.log_z,
        terms_used=0,
        tail_bound=0.0,
        energy=form.energy,
        capacity=form.capacity,
    )


def analytic(
    model: EnsembleModel, beta: float, settings: Optional[Settings] = None
) -> Optional[ClosedForm]:
    """The closed form usable for ``model``: exact ones always, continuum
    approximations only when ``prefer_closed_form`` is set."""
    settings = resolve(settings)
    form = model.closed_form(beta)
    if form is None or not (form.exact or settings.prefer_closed_form):
        return None
    return form


def partition(
    model: EnsembleModel,
    beta: float,
    tol: Optional[float] = None,
    settings: Optional[Settings] = None,
) -> SeriesResult:
    """Evaluate Z(beta) = sum_n g_n exp(-beta * scale * e_n).

    With ``prefer_closed_form`` set and a closed form available the analytic value
    is returned with a zero tail bound; otherwise the series is summed.

    Raises:
        DivergenceError: if beta < beta_min on an unbounded spectrum.
        ConvergenceError: if the tail bound is not reached within ``max_terms``.
    """
    settings = resolve(settings)
    tol = _check_tol(tol, settings)
    beta = check_beta(model, beta, settings)
    if settings.prefer_closed_form:
        form = model.closed_form(beta)
        if form is not None:
            return _from_closed_form(form)
    return _sum_series(model, beta, tol, settings)


def log_partition(
    model: EnsembleModel,
    beta: float,
    tol: Optional[float] = None,
    settings: Optional[Settings] = None,
) -> float:
    return partition(model, beta, tol=tol, settings=settings).log_value


def internal_energy(
    model: EnsembleModel,
    beta: float,
    method: Method = Method.AUTO,
    settings: Optional[Settings] = None,
) -> float:
    """Dimensionless internal energy -beta d(ln Z)/d(beta)."""
    settings = resolve(settings)
    beta = check_beta(model, beta, settings)
    if method is Method.NUMERIC:
        derivatives = log_beta_derivatives(
            lambda b: log_partition(model, b, settings=settings), beta, settings
        )
        return -derivatives.first
    form = analytic(model, beta, settings) if method is Method.AUTO else None
    if form is not None:
        return form.energy
    return _sum_series(model, beta, settings.tol, settings).energy


def heat_capacity(
    model: EnsembleModel,
    beta: float,
    method: Method = Method.AUTO,
    settings: Optional[Settings] = None,
) -> float:
    """Dimensionless heat capacity beta^2 d^2(ln Z)/d(beta)^2, the energy variance."""
    settings = resolve(settings)
    beta = check_beta(model, beta, settings)
    if method is Method.NUMERIC:
        derivatives = log_beta_derivatives(
            lambda b: log_partition(model, b, settings=settings), beta, settings
        )
        return derivatives.second
    form = analytic(model, beta, settings) if method is Method.AUTO else None
    if form is not None:
        return form.capacity
    return _sum_series(model, beta, settings.tol, settings).capacity
