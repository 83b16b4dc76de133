# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Composite Gauss-Legendre rules and self-converging panel refinement."""
import math
from functools import lru_cache
from typing import Any
from typing import Callable
from typing import NamedTuple
from typing import Tuple
from typing import TypeVar
from typing import Union

import numpy as np
from numpy.typing import NDArray
from structlog import get_logger
from tenacity import retry_if_exception_type
from tenacity import Retrying
from tenacity import RetryCallState
from tenacity import stop_after_attempt

from thermoinfo.config import Settings
from thermoinfo.exceptions import QuadratureError

logger = get_logger()

Estimate = TypeVar("Estimate", float, NDArray[np.float64])


@lru_cache(maxsize=None)
def legendre_rule(nodes: int) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    return np.polynomial.legendre.leggauss(nodes)


def composite_rule(
    a: float, b: float, panels: int, nodes: int
) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Nodes and weights of ``panels`` equal Gauss-Legendre panels on [a, b]."""
    ref_x, ref_w = legendre_rule(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = (mid[:, None] + half[:, None] * ref_x[None, :]).ravel()
    w = (half[:, None] * ref_w[None, :]).ravel()
    return x, w


def next_power_of_two(value: float) -> int:
    return 1 if value <= 1.0 else 2 ** math.ceil(math.log2(value))


def panels_for(periods: float, settings: Settings) -> int:
    """Power-of-two panel count giving ``nodes_per_period`` nodes per oscillation."""
    nodes = settings.nodes_per_period * max(periods, 1.0)
    return next_power_of_two(nodes / settings.gl_nodes)


class Refined(NamedTuple):
    value: Any
    error: float
    level: int


class _Unconverged(Exception):
    def __init__(self, value: Union[float, NDArray[np.float64]], error: float) -> None:
        super().__init__(f"self-convergence error {error:.3g}")
        self.value = value
        self.error = error


def _log_round(retry_state: RetryCallState) -> None:
    logger.debug("Refining quadrature", round=retry_state.attempt_number)


def refine(
    evaluate: Callable[[int], Estimate],
    level: int,
    limit: int,
    tol: float,
    label: str = "quadrature",
) -> Refined:
    """Double ``level`` until two successive estimates agree to ``tol``.

    ``evaluate(level)`` must return the estimate at resolution ``level``; levels
    are doubled up to ``limit``. The agreement is measured elementwise in absolute
    terms.

    Raises:
        QuadratureError: if the estimates still disagree at ``limit``.
    """
    doublings = int(math.log2(limit / level)) if level <= limit else 0
    if doublings < 1:
        raise QuadratureError(f"{label} needs more resolution than the limit {limit}")
    current = {"level": level, "value": evaluate(level)}

    def compare() -> Refined:
        coarse = current["value"]
        fine_level = 2 * int(current["level"])
        fine = evaluate(fine_level)
        current.update(level=fine_level, value=fine)
        error = float(np.max(np.abs(np.asarray(fine) - np.asarray(coarse))))
        if not error <= tol:
            raise _Unconverged(fine, error)
        return Refined(fine, error, fine_level)

    try:
        for attempt in Retrying(
            retry=retry_if_exception_type(_Unconverged),
            stop=stop_after_attempt(doublings),
            reraise=True,
            after=_log_round,
        ):
            with attempt:
                result = compare()
    except _Unconverged as error:
        logger.warning(f"{label} did not converge", error=error.error, limit=limit)
        estimate = error.value if np.ndim(error.value) == 0 else None
        raise QuadratureError(
            f"{label} did not reach tolerance {tol:.3g} "
            f"(last change {error.error:.3g}) within the limit {limit}",
            estimate=None if estimate is None else float(estimate),
            error=error.error,
        ) from error
    return result
