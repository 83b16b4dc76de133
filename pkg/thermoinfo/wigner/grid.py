# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Phase-space grids and the quadratures built on them.

Grids are tensor products of composite Gauss-Legendre rules. Axes on which
every integrand is even are folded onto the positive half with doubled weights.
"""
import csv
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any
from typing import Callable
from typing import Iterable
from typing import List
from typing import Literal
from typing import Optional
from typing import Sequence
from typing import TextIO
from typing import Tuple

import numpy as np
from more_itertools import sliced
from numpy.typing import NDArray
from pydantic import BaseModel
from pydantic import conint
from pydantic import root_validator
from structlog import get_logger
from tqdm import tqdm

from thermoinfo.config import resolve
from thermoinfo.config import Settings
from thermoinfo.config import SOEmbedding
from thermoinfo.curves import CurveSeries
from thermoinfo.curves import format_float
from thermoinfo.exceptions import ConfigurationError
from thermoinfo.exceptions import InvalidArgumentError
from thermoinfo.exceptions import QuadratureError
from thermoinfo.exceptions import ThermoInfoError
from thermoinfo.wigner.base import WignerFunction
from thermoinfo.wigner.ho import ThermalWignerHO
from thermoinfo.wigner.quadrature import composite_rule
from thermoinfo.wigner.quadrature import next_power_of_two
from thermoinfo.wigner.quadrature import panels_for
from thermoinfo.wigner.quadrature import refine
from thermoinfo.wigner.so import ThermalWignerSO

logger = get_logger()

MIN_NODES = 16

Axis = Tuple[NDArray[np.float64], NDArray[np.float64]]
MarginalFn = Callable[[NDArray[np.float64]], Any]


class PhaseSpaceGrid(BaseModel):
    """Rectangle [x_min, x_max] x [k_min, k_max] with panelled Gauss-Legendre axes.

    A mirrored axis starts at zero and stands for the symmetric interval; its
    weights are doubled.
    """

    x_min: float
    x_max: float
    k_min: float
    k_max: float
    x_panels: conint(ge=1)  # type: ignore[valid-type]
    k_panels: conint(ge=1)  # type: ignore[valid-type]
    nodes_per_panel: conint(ge=4)  # type: ignore[valid-type]
    mirror_x: bool = False
    mirror_k: bool = False
    rule: Literal["gauss-legendre"] = "gauss-legendre"

    class Config:
        frozen = True

    @root_validator(skip_on_failure=True)
    def check_box(cls, values: dict) -> dict:
        for axis in ("x", "k"):
            low, high = values[f"{axis}_min"], values[f"{axis}_max"]
            if not high > low:
                raise ValueError(f"{axis}_max must exceed {axis}_min")
            if values[f"mirror_{axis}"] and low != 0.0:
                raise ValueError(f"a mirrored {axis} axis must start at 0")
            if values[f"{axis}_panels"] * values["nodes_per_panel"] < MIN_NODES:
                raise ValueError(f"the {axis} axis needs at least {MIN_NODES} nodes")
        return values

    @property
    def n_x(self) -> int:
        return self.x_panels * self.nodes_per_panel

    @property
    def n_k(self) -> int:
        return self.k_panels * self.nodes_per_panel

    def _axis(self, low: float, high: float, panels: int, mirror: bool) -> Axis:
        nodes, weights = composite_rule(low, high, panels, self.nodes_per_panel)
        return nodes, 2.0 * weights if mirror else weights

    def x_axis(self) -> Axis:
        return self._axis(self.x_min, self.x_max, self.x_panels, self.mirror_x)

    def k_axis(self) -> Axis:
        return self._axis(self.k_min, self.k_max, self.k_panels, self.mirror_k)

    def refined(self, factor: int = 2) -> "PhaseSpaceGrid":
        return self.copy(
            update={
                "x_panels": self.x_panels * factor,
                "k_panels": self.k_panels * factor,
            }
        )

    def unfolded(self) -> "PhaseSpaceGrid":
        """The same rule written out over the full symmetric intervals."""
        update: dict = {}
        if self.mirror_x:
            update.update(x_min=-self.x_max, x_panels=2 * self.x_panels, mirror_x=False)
        if self.mirror_k:
            update.update(k_min=-self.k_max, k_panels=2 * self.k_panels, mirror_k=False)
        return self.copy(update=update)


def _extent(envelope: float, tol: float) -> float:
    # exp(-c r^2) integrates to less than tol beyond this radius.
    exponent = max(-math.log(tol * envelope / math.pi), -math.log(tol))
    return math.sqrt(exponent / envelope)


def _certify_axis(
    marginal: MarginalFn,
    low: float,
    high: float,
    panels: int,
    mirror: bool,
    tol: float,
    settings: Settings,
    label: str,
) -> int:
    def integral(level: int) -> float:
        nodes, weights = composite_rule(low, high, level, settings.gl_nodes)
        factor = 2.0 if mirror else 1.0
        return factor * float(np.sum(weights * np.asarray(marginal(nodes))))

    try:
        refined = refine(integral, panels, settings.max_panels, tol, label=label)
    except QuadratureError as error:
        raise ConfigurationError(
            f"{label} does not reach the grid tolerance {tol:.3g} "
            f"within {settings.max_panels} panels"
        ) from error
    return refined.level


def build_grid(
    states: Sequence[WignerFunction],
    tol: Optional[float] = None,
    projection: bool = False,
    settings: Optional[Settings] = None,
) -> PhaseSpaceGrid:
    """Choose a grid on which every state in ``states`` is resolved to ``tol``.

    Extents invert the Gaussian tail bound exp(-c r^2). For a single integrand c is
    the smallest envelope of the states; for a product (``projection``) the
    envelopes add. Panel counts start from the oscillation frequency of each state
    and are then doubled until the coordinate (and, where available, momentum)
    marginals self-converge.

    Raises:
        InvalidArgumentError: if ``states`` is empty.
        ConfigurationError: if the tolerance needs more than ``max_panels`` panels.
    """
    settings = resolve(settings)
    tol = settings.grid_tol if tol is None else tol
    if not states:
        raise InvalidArgumentError("build_grid needs at least one state")
    if not 0.0 < tol < 1.0:
        raise InvalidArgumentError(f"grid tolerance must lie in (0, 1), got {tol}")

    x_envelopes = [state.envelope for state in states]
    k_envelopes = [state.k_envelope for state in states]
    if projection:
        c_x, c_k = sum(x_envelopes), sum(k_envelopes)
    else:
        c_x, c_k = min(x_envelopes), min(k_envelopes)
    if c_k <= 0.0:
        c_k = c_x
    x_extent, k_extent = _extent(c_x, tol), _extent(c_k, tol)

    half_line = any(state.half_line for state in states)
    mirror_x = not half_line and all(state.even_in_x for state in states)
    x_min = 0.0 if half_line or mirror_x else -x_extent
    x_length = x_extent - x_min

    minimum = next_power_of_two(MIN_NODES / settings.gl_nodes)
    x_panels, k_panels = minimum, minimum
    for state in states:
        fx, fk = state.frequencies(x_extent, k_extent)
        x_panels = max(x_panels, panels_for(x_length * fx / (2.0 * math.pi), settings))
        k_panels = max(k_panels, panels_for(k_extent * fk / (2.0 * math.pi), settings))
    if max(x_panels, k_panels) >= settings.max_panels:
        raise ConfigurationError(
            f"grid tolerance {tol:.3g} needs {max(x_panels, k_panels)} panels, "
            f"the limit is {settings.max_panels}"
        )

    for state in states:
        x_panels = max(
            x_panels,
            _certify_axis(
                state.k_marginal,
                x_min,
                x_extent,
                x_panels,
                mirror_x,
                tol,
                settings,
                f"coordinate marginal of {state.describe()}",
            ),
        )
        if state.x_marginal(0.0) is not None:
            k_panels = max(
                k_panels,
                _certify_axis(
                    state.x_marginal,
                    0.0,
                    k_extent,
                    k_panels,
                    True,
                    tol,
                    settings,
                    f"momentum marginal of {state.describe()}",
                ),
            )

    grid = PhaseSpaceGrid(
        x_min=x_min,
        x_max=x_extent,
        k_min=0.0,
        k_max=k_extent,
        x_panels=x_panels,
        k_panels=k_panels,
        nodes_per_panel=settings.gl_nodes,
        mirror_x=mirror_x,
        mirror_k=True,
    )
    logger.debug("Built phase-space grid", grid=grid.dict(), tol=tol)
    return grid


def _chunk_sum(
    functions: Tuple[WignerFunction, ...],
    x: NDArray[np.float64],
    k: NDArray[np.float64],
    weights: NDArray[np.float64],
    settings: Settings,
) -> float:
    product = weights.copy()
    for function in functions:
        product *= function.evaluate(x, k, settings)
    return float(np.sum(product))


def _integrate(
    functions: Tuple[WignerFunction, ...], grid: PhaseSpaceGrid, settings: Settings
) -> float:
    x, wx = grid.x_axis()
    k, wk = grid.k_axis()
    xx, kk = (axis.ravel() for axis in np.meshgrid(x, k, indexing="ij"))
    weights = np.outer(wx, wk).ravel()
    chunks: Iterable[Tuple[NDArray, NDArray, NDArray]] = zip(
        sliced(xx, settings.chunk_size),
        sliced(kk, settings.chunk_size),
        sliced(weights, settings.chunk_size),
    )

    def partial(chunk: Tuple[NDArray, NDArray, NDArray]) -> float:
        return _chunk_sum(functions, *chunk, settings)

    if settings.workers > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as executor:
            partials: List[float] = list(executor.map(partial, chunks))
    else:
        partials = [partial(chunk) for chunk in chunks]
    return float(np.sum(partials))


def grid_integral(
    w: WignerFunction, grid: PhaseSpaceGrid, settings: Optional[Settings] = None
) -> float:
    """The integral of ``w`` over the grid, without refinement."""
    return _integrate((w,), grid, resolve(settings))


def _check_domain(functions: Sequence[WignerFunction], grid: PhaseSpaceGrid) -> None:
    if grid.mirror_x and any(function.half_line for function in functions):
        raise InvalidArgumentError("a half-line state cannot use a mirrored x axis")


def phase_space_projection(
    w_a: WignerFunction,
    w_b: WignerFunction,
    grid: Optional[PhaseSpaceGrid] = None,
    settings: Optional[Settings] = None,
) -> float:
    """F = 2 pi times the phase-space integral of w_a * w_b.

    Without ``grid`` a projection grid is built for the pair. Panels on both axes
    are doubled until successive values agree to ``grid_tol``.

    Raises:
        QuadratureError: if the grid refinement or an inner integral fails.
    """
    settings = resolve(settings)
    if grid is None:
        grid = build_grid([w_a, w_b], projection=True, settings=settings)
    _check_domain((w_a, w_b), grid)
    base = grid

    def evaluate(factor: int) -> float:
        return 2.0 * math.pi * _integrate((w_a, w_b), base.refined(factor), settings)

    limit = settings.max_panels // max(base.x_panels, base.k_panels)
    result = refine(
        evaluate,
        1,
        max(limit, 1),
        settings.grid_tol,
        label=f"projection of {w_a.describe()} on {w_b.describe()}",
    )
    logger.debug(
        "Phase-space projection",
        value=result.value,
        error=result.error,
        level=result.level,
    )
    return float(result.value)


def normalization(
    w: WignerFunction,
    grid: Optional[PhaseSpaceGrid] = None,
    settings: Optional[Settings] = None,
) -> float:
    """Total weight of ``w`` from its coordinate marginal on the grid's x range."""
    settings = resolve(settings)
    if grid is None:
        grid = build_grid([w], settings=settings)
    _check_domain((w,), grid)

    def integral(level: int) -> float:
        x, weights = composite_rule(grid.x_min, grid.x_max, level, grid.nodes_per_panel)
        factor = 2.0 if grid.mirror_x else 1.0
        return factor * float(np.sum(weights * np.asarray(w.k_marginal(x))))

    result = refine(
        integral,
        grid.x_panels,
        max(settings.max_panels, 2 * grid.x_panels),
        settings.grid_tol,
        label=f"normalization of {w.describe()}",
    )
    return float(result.value)


def dump_grid(
    w: WignerFunction,
    grid: PhaseSpaceGrid,
    stream: TextIO,
    settings: Optional[Settings] = None,
) -> None:
    """Write ``x,k,w`` rows over the full grid, x major."""
    settings = resolve(settings)
    full = grid.unfolded()
    x, _ = full.x_axis()
    k, _ = full.k_axis()
    xx, kk = (axis.ravel() for axis in np.meshgrid(x, k, indexing="ij"))
    values = w.evaluate(xx, kk, settings)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["x", "k", "w"])
    for row in zip(xx, kk, values):
        writer.writerow([format_float(float(value)) for value in row])


def cross_fidelity_curve(
    alpha: float,
    betas: Sequence[float],
    grid_tol: Optional[float] = None,
    embedding: Optional[SOEmbedding] = None,
    settings: Optional[Settings] = None,
) -> CurveSeries:
    """Projection of HO(2 beta) on SO(beta, alpha) along ``betas``.

    Points that fail are recorded as NaN with a flag naming the failure. The
    curve is expected to increase with beta; a warning is logged if it does not.
    """
    settings = resolve(settings)
    if grid_tol is not None:
        settings = settings.copy(update={"grid_tol": grid_tol})
    embedding = settings.so_embedding if embedding is None else embedding
    if not all(math.isfinite(beta) and beta > 0.0 for beta in betas):
        raise InvalidArgumentError("betas must be positive and finite")

    values: List[float] = []
    flags: List[str] = []
    for beta in tqdm(betas, desc=f"alpha={alpha:g}", unit="beta", disable=None):
        try:
            value = phase_space_projection(
                ThermalWignerHO(beta=2.0 * beta),
                ThermalWignerSO(beta=beta, alpha=alpha, embedding=embedding),
                settings=settings,
            )
            flag = ""
        except ThermoInfoError as error:
            logger.warning(
                "Cross projection failed", alpha=alpha, beta=beta, error=str(error)
            )
            value, flag = math.nan, type(error).__name__
        values.append(value)
        flags.append(flag)

    finite = [value for value in values if math.isfinite(value)]
    if any(later < earlier for earlier, later in zip(finite, finite[1:])):
        logger.warning("Cross projection curve is not monotone in beta", alpha=alpha)
    return CurveSeries(
        beta_grid=list(betas),
        columns={"F": values},
        metadata={
            "alpha": format_float(alpha),
            "embedding": embedding.value,
            "grid_tol": format_float(settings.grid_tol),
        },
        flags=flags,
    )
