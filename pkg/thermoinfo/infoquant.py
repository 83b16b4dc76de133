# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Information quantifiers of canonical ensembles.

Purity, same-ensemble projections and the storage-of-information capacities are
all expressed through partition functions:

    F(beta, beta')  = Z(beta + beta') / (Z(beta) Z(beta'))
    P(beta)         = F(beta, beta) = Z(2 beta) / Z(beta)^2
    eps_P(beta)     = beta d(ln P)/d(beta)        = 2 eps(beta) - eps(2 beta)
    C_P(beta)       = -beta^2 d^2(ln P)/d(beta)^2 = 2 C(beta) - C(2 beta)

Projections F are what the phase-space trace returns; the fidelity of the
corresponding states is sqrt(F).
"""
import itertools
import math
from pathlib import Path
from typing import List
from typing import NamedTuple
from typing import Optional
from typing import Union

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel
from pydantic import conint
from pydantic import root_validator
from pydantic import ValidationError
from structlog import get_logger

from thermoinfo.config import resolve
from thermoinfo.config import Settings
from thermoinfo.derivatives import log_beta_derivatives
from thermoinfo.exceptions import InvalidArgumentError
from thermoinfo.exceptions import PrecisionError
from thermoinfo.spectra import EnsembleModel
from thermoinfo.thermo import heat_capacity
from thermoinfo.thermo import internal_energy
from thermoinfo.thermo import log_partition
from thermoinfo.thermo import Method
from thermoinfo.thermo import partition

logger = get_logger()

# Slack allowed on overlap row and column sums.
SUM_SLACK = 1e-9


def log_self_fidelity(
    model: EnsembleModel,
    beta1: float,
    beta2: float,
    settings: Optional[Settings] = None,
) -> float:
    settings = resolve(settings)
    return (
        log_partition(model, beta1 + beta2, settings=settings)
        - log_partition(model, beta1, settings=settings)
        - log_partition(model, beta2, settings=settings)
    )


def self_fidelity(
    model: EnsembleModel,
    beta1: float,
    beta2: float,
    settings: Optional[Settings] = None,
) -> float:
    """Projection between two canonical ensembles of the same system."""
    return math.exp(log_self_fidelity(model, beta1, beta2, settings))


def fidelity(
    model: EnsembleModel,
    beta1: float,
    beta2: float,
    settings: Optional[Settings] = None,
) -> float:
    """Square root of the projection."""
    return math.sqrt(self_fidelity(model, beta1, beta2, settings))


def purity(
    model: EnsembleModel, beta: float, settings: Optional[Settings] = None
) -> float:
    return self_fidelity(model, beta, beta, settings)


def log_purity(
    model: EnsembleModel, beta: float, settings: Optional[Settings] = None
) -> float:
    return log_self_fidelity(model, beta, beta, settings)


def info_energy(
    model: EnsembleModel,
    beta: float,
    method: Method = Method.AUTO,
    settings: Optional[Settings] = None,
) -> float:
    """Storage-of-information energy beta d(ln P)/d(beta).

    ``Method.NUMERIC`` differentiates ln P on the log-beta stencil; otherwise the
    moment identity is used with analytic or series energies.
    """
    settings = resolve(settings)
    if method is Method.NUMERIC:
        return log_beta_derivatives(
            lambda b: log_purity(model, b, settings), beta, settings
        ).first
    return 2.0 * internal_energy(model, beta, method, settings) - internal_energy(
        model, 2.0 * beta, method, settings
    )


def info_capacity(
    model: EnsembleModel,
    beta: float,
    method: Method = Method.AUTO,
    settings: Optional[Settings] = None,
) -> float:
    """Storage-of-information capacity -beta^2 d^2(ln P)/d(beta)^2."""
    settings = resolve(settings)
    if method is Method.NUMERIC:
        return -log_beta_derivatives(
            lambda b: log_purity(model, b, settings), beta, settings
        ).second
    return 2.0 * heat_capacity(model, beta, method, settings) - heat_capacity(
        model, 2.0 * beta, method, settings
    )


class OverlapMatrix(BaseModel):
    """Truncated |<n_a|l_b>|^2 between two eigenbases.

    ``exhaustive`` declares that every nonzero overlap is listed, which makes the
    truncation remainder vanish.
    """

    rows: conint(ge=1)  # type: ignore[valid-type]
    cols: conint(ge=1)  # type: ignore[valid-type]
    abs_sq: List[List[float]]
    exhaustive: bool = False

    class Config:
        frozen = True

    @root_validator(skip_on_failure=True)
    def check_entries(cls, values: dict) -> dict:
        matrix = np.asarray(values["abs_sq"], dtype=float)
        if matrix.shape != (values["rows"], values["cols"]):
            raise ValueError(
                f"abs_sq has shape {matrix.shape}, "
                f"expected ({values['rows']}, {values['cols']})"
            )
        if not np.all(np.isfinite(matrix)) or np.any((matrix < 0.0) | (matrix > 1.0)):
            raise ValueError("overlap entries must lie in [0, 1]")
        if np.any(matrix.sum(axis=1) > 1.0 + SUM_SLACK):
            raise ValueError("overlap row sums must not exceed 1")
        if np.any(matrix.sum(axis=0) > 1.0 + SUM_SLACK):
            raise ValueError("overlap column sums must not exceed 1")
        return values

    @property
    def matrix(self) -> NDArray[np.float64]:
        return np.asarray(self.abs_sq, dtype=float)

    @property
    def row_defects(self) -> NDArray[np.float64]:
        return np.maximum(1.0 - self.matrix.sum(axis=1), 0.0)

    @property
    def col_defects(self) -> NDArray[np.float64]:
        return np.maximum(1.0 - self.matrix.sum(axis=0), 0.0)

    @classmethod
    def identity(cls, size: int) -> "OverlapMatrix":
        return cls(rows=size, cols=size, abs_sq=np.eye(size).tolist())


def load_overlaps(path: Union[str, Path]) -> OverlapMatrix:
    """Read ``{"rows", "cols", "abs_sq", "exhaustive"?}`` from JSON.

    Raises:
        InvalidArgumentError: if the file is missing or does not validate.
    """
    try:
        return OverlapMatrix.parse_file(path)
    except (OSError, ValidationError) as error:
        message = f"cannot load overlap file {path}: {error}"
        raise InvalidArgumentError(message) from error


class CrossProjection(NamedTuple):
    """Truncated projection; the exact value lies in [value, value + bracket]."""

    value: float
    bracket: float


def _state_weights(
    model: EnsembleModel, beta: float, log_z: float, count: int
) -> NDArray[np.float64]:
    """Occupation probabilities of the first ``count`` states, zero padded."""
    try:
        levels = model.scaled_levels()
        energies = list(
            itertools.islice(
                itertools.chain.from_iterable(
                    itertools.repeat(level.energy, level.degeneracy) for level in levels
                ),
                count,
            )
        )
    except NotImplementedError as error:
        raise InvalidArgumentError(str(error)) from error
    weights = np.zeros(count)
    weights[: len(energies)] = np.exp(
        -beta * np.asarray(energies, dtype=float) - log_z
    )
    return weights


def cross_projection(
    model_a: EnsembleModel,
    model_b: EnsembleModel,
    overlaps: OverlapMatrix,
    beta1: float,
    beta2: float,
    tol: Optional[float] = None,
    settings: Optional[Settings] = None,
) -> CrossProjection:
    """Projection between ensembles of two systems from their state overlaps.

    Beyond the listed overlaps the remainder is bounded using the first excluded
    Boltzmann weight of each system together with the row and column defects.

    Raises:
        PrecisionError: if the remainder bracket exceeds ``tol`` (absolute);
            ``partial`` carries the truncated ``CrossProjection``.
    """
    settings = resolve(settings)
    tol = settings.tol if tol is None else tol
    log_z_a = partition(model_a, beta1, settings=settings).log_value
    log_z_b = partition(model_b, beta2, settings=settings).log_value
    a = _state_weights(model_a, beta1, log_z_a, overlaps.rows + 1)
    b = _state_weights(model_b, beta2, log_z_b, overlaps.cols + 1)
    a_kept, a_next = a[:-1], float(a[-1])
    b_kept, b_next = b[:-1], float(b[-1])

    value = float(a_kept @ overlaps.matrix @ b_kept)
    if overlaps.exhaustive:
        bracket = 0.0
    else:
        bracket = (
            float(a_kept @ overlaps.row_defects) * b_next
            + a_next * float(b_kept @ overlaps.col_defects)
            + b_next * max(1.0 - math.fsum(a_kept), 0.0)
        )
    result = CrossProjection(value=value, bracket=bracket)
    logger.debug("Cross projection", value=value, bracket=bracket)
    if bracket > tol:
        raise PrecisionError(
            f"truncated overlaps leave a remainder bracket of {bracket:.3g}, "
            f"above the tolerance {tol:.3g}",
            partial=result,
        )
    return result
