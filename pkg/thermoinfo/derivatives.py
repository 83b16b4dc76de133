# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Logarithmic beta derivatives by finite differences.

Derivatives are taken in u = ln(beta) with five-point central stencils and refined
by Richardson extrapolation over successive step halvings. With g(u) = f(e^u),
beta f'(beta) = g'(u) and beta^2 f''(beta) = g''(u) - g'(u).
"""
import math
from typing import Callable
from typing import Dict
from typing import List
from typing import NamedTuple
from typing import Optional
from typing import Tuple

from structlog import get_logger

from thermoinfo.config import resolve
from thermoinfo.config import Settings
from thermoinfo.exceptions import NumericDifferentiationError

logger = get_logger()

_OFFSETS = (-2, -1, 1, 2)
_FIRST = (1.0, -8.0, 8.0, -1.0)
_SECOND = (-1.0, 16.0, 16.0, -1.0)


class LogDerivatives(NamedTuple):
    """beta f'(beta) and beta^2 f''(beta) with Richardson error estimates."""

    first: float
    second: float
    first_error: float
    second_error: float


def _richardson(estimates: List[float]) -> Tuple[float, float]:
    # Symmetric stencils carry even error terms starting at h^4.
    table = [list(estimates)]
    for level in range(1, len(estimates)):
        ratio = 4.0 ** (level + 1)
        previous = table[-1]
        table.append(
            [
                (ratio * previous[i + 1] - previous[i]) / (ratio - 1.0)
                for i in range(len(previous) - 1)
            ]
        )
    best = table[-1][0]
    if len(table) == 1:
        return best, 0.0
    return best, abs(best - table[-2][-1])


def log_beta_derivatives(
    f: Callable[[float], float],
    beta: float,
    settings: Optional[Settings] = None,
) -> LogDerivatives:
    """Differentiate ``f`` with respect to ln(beta) at ``beta``.

    Raises:
        NumericDifferentiationError: if ``f`` returns non-finite values or the
            Richardson error estimate exceeds ``stencil_tol`` relative.
    """
    settings = resolve(settings)
    u0 = math.log(beta)
    cache: Dict[float, float] = {}

    def g(u: float) -> float:
        if u not in cache:
            value = f(math.exp(u))
            if not math.isfinite(value):
                raise NumericDifferentiationError(
                    f"non-finite function value at beta={math.exp(u)!r}"
                )
            cache[u] = value
        return cache[u]

    centre = g(u0)
    firsts: List[float] = []
    seconds: List[float] = []
    for halving in range(settings.richardson_halvings + 1):
        h = settings.stencil_step / 2**halving
        samples = [g(u0 + offset * h) for offset in _OFFSETS]
        firsts.append(math.fsum(c * s for c, s in zip(_FIRST, samples)) / (12.0 * h))
        seconds.append(
            (math.fsum(c * s for c, s in zip(_SECOND, samples)) - 30.0 * centre)
            / (12.0 * h * h)
        )

    d1, e1 = _richardson(firsts)
    d2, e2 = _richardson(seconds)
    result = LogDerivatives(
        first=d1, second=d2 - d1, first_error=e1, second_error=e1 + e2
    )
    logger.debug("Log-beta stencil", beta=beta, result=result)
    tol = settings.stencil_tol
    if (
        not math.isfinite(result.first)
        or not math.isfinite(result.second)
        or result.first_error > tol * max(1.0, abs(result.first))
        or result.second_error > tol * max(1.0, abs(result.second))
    ):
        raise NumericDifferentiationError(
            f"unstable log-beta derivative at beta={beta!r}: {result}"
        )
    return result
