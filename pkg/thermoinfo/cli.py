# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Command line front end: beta sweeps written as CSV.

Exit codes are 0 on success, 2 when some rows carry failure flags, 64 on usage
errors and 1 on any other failure.
"""
import argparse
import logging
import math
import re
import sys
from contextlib import ExitStack
from typing import Any
from typing import Callable
from typing import Dict
from typing import List
from typing import NoReturn
from typing import Optional
from typing import Sequence
from typing import TextIO

import numpy as np
import structlog
from pydantic import ValidationError
from structlog import get_logger
from tqdm import tqdm

from thermoinfo import __version__
from thermoinfo.config import Settings
from thermoinfo.config import SOEmbedding
from thermoinfo.curves import CurveSeries
from thermoinfo.curves import format_float
from thermoinfo.exceptions import InvalidArgumentError
from thermoinfo.exceptions import PrecisionError
from thermoinfo.exceptions import ThermoInfoError
from thermoinfo.infoquant import cross_projection
from thermoinfo.infoquant import CrossProjection
from thermoinfo.infoquant import fidelity
from thermoinfo.infoquant import info_capacity
from thermoinfo.infoquant import info_energy
from thermoinfo.infoquant import load_overlaps
from thermoinfo.infoquant import OverlapMatrix
from thermoinfo.infoquant import purity
from thermoinfo.infoquant import self_fidelity
from thermoinfo.spectra import EnsembleModel
from thermoinfo.spectra import load_custom_spectrum
from thermoinfo.spectra import make_box
from thermoinfo.spectra import make_ho
from thermoinfo.spectra import make_rotor
from thermoinfo.spectra import make_so
from thermoinfo.spectra import product
from thermoinfo.thermo import heat_capacity
from thermoinfo.thermo import internal_energy
from thermoinfo.thermo import Method
from thermoinfo.thermo import partition
from thermoinfo.wigner.grid import build_grid
from thermoinfo.wigner.grid import cross_fidelity_curve
from thermoinfo.wigner.grid import dump_grid
from thermoinfo.wigner.ho import ThermalWignerHO
from thermoinfo.wigner.so import ThermalWignerSO

logger = get_logger()

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARTIAL = 2
EXIT_USAGE = 64

QUANTITIES = (
    "Z",
    "P",
    "F_self",
    "sqrtF_self",
    "eps",
    "C",
    "eps_P",
    "C_P",
    "F_cross",
    "F_cross_bracket",
)
FIG1_OMEGAS = {1: (0.1, 1.0, 10.0), 2: (0.1, 1.0, 100.0)}
FIG1_BETAS = "0.001:1000:241log"
FIG2_ALPHAS = (-0.5, 0.5, 1.5, 2.5)
FIG2_BETAS = "0.5:5:40log"

_RANGE = re.compile(r"^([^:]+):([^:]+):(\d+)(log|lin)?$")


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_beta_range(text: str, default_spacing: str = "lin") -> List[float]:
    """Parse ``start:stop:count[log|lin]`` or a single beta.

    Raises:
        argparse.ArgumentTypeError: if the text does not describe a valid range.
    """
    match = _RANGE.match(text.strip())
    try:
        if match is None:
            betas = [float(text)]
        else:
            start, stop = float(match[1]), float(match[2])
            count, spacing = int(match[3]), match[4] or default_spacing
            if count < 1 or (count > 1 and not stop > start):
                raise ValueError("need count >= 1 and stop > start")
            space = np.geomspace if spacing == "log" else np.linspace
            betas = [float(b) for b in space(start, stop, count)]
    except ValueError as error:
        message = f"invalid beta range {text!r}: {error}"
        raise argparse.ArgumentTypeError(message) from error
    if not all(math.isfinite(b) and b > 0.0 for b in betas):
        raise argparse.ArgumentTypeError(f"betas must be positive in {text!r}")
    return betas


def _log_betas(text: str) -> List[float]:
    return parse_beta_range(text, default_spacing="log")


def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as error:
        raise argparse.ArgumentTypeError(str(error)) from error


def _quantity_list(text: str) -> List[str]:
    names = [item.strip() for item in text.split(",") if item.strip()]
    unknown = sorted(set(names) - set(QUANTITIES))
    if unknown or not names:
        raise argparse.ArgumentTypeError(
            f"unknown quantities {unknown}; choose from {', '.join(QUANTITIES)}"
        )
    return names


def _add_settings_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol", type=float, help="relative series tolerance")
    parser.add_argument("--grid-tol", type=float, help="phase-space tolerance")
    parser.add_argument("--box-ground", type=int, choices=(0, 1))
    parser.add_argument("--prefer-closed-form", action="store_true", default=None)
    parser.add_argument("--workers", type=int, help="quadrature threads")
    parser.add_argument(
        "--embedding",
        choices=[embedding.value for embedding in SOEmbedding],
        help="placement of the singular oscillator on the full line",
    )
    parser.add_argument("--out", help="write CSV here instead of standard output")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="thermoinfo",
        description="Information content of thermal quantum ensembles.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    evaluate = commands.add_parser("eval", help="evaluate quantities along beta")
    evaluate.add_argument(
        "--model",
        required=True,
        choices=("ho", "so", "ho3d", "box", "rotor", "custom"),
    )
    evaluate.add_argument("--alpha", type=float, default=0.5)
    evaluate.add_argument("--omegas", type=_float_list)
    evaluate.add_argument("--theta", type=float, default=1.0)
    evaluate.add_argument("--spectrum-file")
    evaluate.add_argument("--overlaps-file")
    evaluate.add_argument(
        "--cross-spectrum-file",
        help="second system for F_cross; defaults to the evaluated model",
    )
    evaluate.add_argument("--q", type=_quantity_list, default=["Z", "P"])
    evaluate.add_argument("--beta", type=parse_beta_range, required=True)
    evaluate.add_argument(
        "--beta-ratio", type=float, default=2.0, help="beta' = ratio * beta"
    )
    evaluate.add_argument(
        "--method", choices=[method.value for method in Method], default="auto"
    )
    _add_settings_arguments(evaluate)

    fig1 = commands.add_parser("fig1", help="anisotropic oscillator capacities")
    fig1.add_argument("--variant", type=int, choices=(1, 2), default=1)
    fig1.add_argument("--beta", type=_log_betas, default=_log_betas(FIG1_BETAS))
    _add_settings_arguments(fig1)

    fig2 = commands.add_parser("fig2", help="oscillator cross projections")
    fig2.add_argument("--alphas", type=_float_list, default=list(FIG2_ALPHAS))
    fig2.add_argument("--beta", type=_log_betas, default=_log_betas(FIG2_BETAS))
    _add_settings_arguments(fig2)

    dump = commands.add_parser("dump-grid", help="write a Wigner function grid")
    dump.add_argument("--state", choices=("ho", "so"), default="ho")
    dump.add_argument("--beta", type=float, required=True)
    dump.add_argument("--alpha", type=float, default=0.5)
    _add_settings_arguments(dump)
    return parser


def configure_logging(verbose: bool) -> None:
    structlog.configure(
        wrapper_class=structlog.make_filtering_bound_logger(
            logging.DEBUG if verbose else logging.WARNING
        ),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
    )


def settings_from(args: argparse.Namespace) -> Settings:
    overrides = {
        "tol": args.tol,
        "grid_tol": args.grid_tol,
        "box_ground": args.box_ground,
        "prefer_closed_form": args.prefer_closed_form,
        "workers": args.workers,
        "so_embedding": args.embedding,
    }
    try:
        return Settings(**{k: v for k, v in overrides.items() if v is not None})
    except ValidationError as error:
        raise UsageError(str(error)) from error


def model_from(args: argparse.Namespace, settings: Settings) -> EnsembleModel:
    try:
        if args.model == "ho":
            if args.omegas and len(args.omegas) > 1:
                raise UsageError("--model ho takes a single --omegas value")
            return make_ho(args.omegas[0] if args.omegas else 1.0)
        if args.model == "so":
            return make_so(args.alpha)
        if args.model == "ho3d":
            omegas = FIG1_OMEGAS[1] if args.omegas is None else args.omegas
            return product([make_ho(omega) for omega in omegas])
        if args.model == "box":
            return make_box(args.theta, settings=settings)
        if args.model == "rotor":
            return make_rotor(args.theta)
        if args.spectrum_file is None:
            raise UsageError("--model custom needs --spectrum-file")
        return load_custom_spectrum(args.spectrum_file)
    except (InvalidArgumentError, ValueError) as error:
        raise UsageError(str(error)) from error


class _Row:
    """Quantities of one beta, failures recorded instead of raised."""

    def __init__(self) -> None:
        self.values: Dict[str, float] = {}
        self.flags: List[str] = []

    def record(self, name: str, compute: Callable[[], float]) -> None:
        try:
            self.values[name] = compute()
        except ThermoInfoError as error:
            logger.warning("Evaluation failed", quantity=name, error=str(error))
            self.values[name] = math.nan
            self.flags.append(f"{name}:{type(error).__name__}")


def _cross(
    model: EnsembleModel,
    other: EnsembleModel,
    overlaps: OverlapMatrix,
    beta: float,
    ratio: float,
    settings: Settings,
    row: _Row,
) -> None:
    try:
        result = cross_projection(
            model, other, overlaps, beta, ratio * beta, settings=settings
        )
    except PrecisionError as error:
        row.flags.append(f"F_cross:{type(error).__name__}")
        result = error.partial if isinstance(error.partial, CrossProjection) else None
    except ThermoInfoError as error:
        row.flags.append(f"F_cross:{type(error).__name__}")
        result = None
    row.values["F_cross"] = math.nan if result is None else result.value
    row.values["F_cross_bracket"] = math.nan if result is None else result.bracket


def cmd_eval(args: argparse.Namespace, settings: Settings) -> CurveSeries:
    model = model_from(args, settings)
    method = Method(args.method)
    ratio = args.beta_ratio
    wants_cross = {"F_cross", "F_cross_bracket"} & set(args.q)
    overlaps: Optional[OverlapMatrix] = None
    other = model
    if wants_cross:
        if args.overlaps_file is None:
            raise UsageError("F_cross needs --overlaps-file")
        try:
            overlaps = load_overlaps(args.overlaps_file)
            if args.cross_spectrum_file is not None:
                other = load_custom_spectrum(args.cross_spectrum_file)
        except InvalidArgumentError as error:
            raise UsageError(str(error)) from error

    computations: Dict[str, Callable[[float], float]] = {
        "Z": lambda b: partition(model, b, settings=settings).value,
        "P": lambda b: purity(model, b, settings),
        "F_self": lambda b: self_fidelity(model, b, ratio * b, settings),
        "sqrtF_self": lambda b: fidelity(model, b, ratio * b, settings),
        "eps": lambda b: internal_energy(model, b, method, settings),
        "C": lambda b: heat_capacity(model, b, method, settings),
        "eps_P": lambda b: info_energy(model, b, method, settings),
        "C_P": lambda b: info_capacity(model, b, method, settings),
    }
    columns: Dict[str, List[float]] = {name: [] for name in args.q}
    flags: List[str] = []
    for beta in tqdm(args.beta, unit="beta", disable=None):
        row = _Row()
        for name in args.q:
            if name in computations:
                row.record(name, lambda: computations[name](beta))
        if overlaps is not None:
            _cross(model, other, overlaps, beta, ratio, settings, row)
        for name in args.q:
            columns[name].append(row.values[name])
        flags.append(";".join(row.flags))
    return CurveSeries(
        beta_grid=args.beta,
        columns=columns,
        metadata={
            "model": model.describe(),
            "method": method.value,
            "beta_ratio": format_float(ratio),
            "tol": format_float(settings.tol),
        },
        flags=flags,
    )


def cmd_fig1(args: argparse.Namespace, settings: Settings) -> CurveSeries:
    omegas = FIG1_OMEGAS[args.variant]
    model = product([make_ho(omega) for omega in omegas])
    columns: Dict[str, List[float]] = {
        name: [] for name in ("P", "eps_P", "C_P", "eps", "C")
    }
    for beta in tqdm(args.beta, unit="beta", disable=None):
        columns["P"].append(purity(model, beta, settings))
        columns["eps_P"].append(info_energy(model, beta, settings=settings))
        columns["C_P"].append(info_capacity(model, beta, settings=settings))
        columns["eps"].append(internal_energy(model, beta, settings=settings))
        columns["C"].append(heat_capacity(model, beta, settings=settings))
    return CurveSeries(
        beta_grid=args.beta,
        columns=columns,
        metadata={
            "model": model.describe(),
            "omegas": ",".join(format_float(omega) for omega in omegas),
        },
    )


def cmd_fig2(args: argparse.Namespace, settings: Settings) -> CurveSeries:
    betas = args.beta
    result = CurveSeries(
        beta_grid=betas,
        columns={"tanh": [math.tanh(beta) for beta in betas]},
        metadata={
            "embedding": settings.so_embedding.value,
            "grid_tol": format_float(settings.grid_tol),
        },
    )
    for alpha in args.alphas:
        curve = cross_fidelity_curve(alpha, betas, settings=settings)
        column = CurveSeries(
            beta_grid=betas,
            columns={f"F_alpha={alpha:g}": curve.columns["F"]},
            flags=[f"alpha={alpha:g}:{flag}" if flag else "" for flag in curve.flags],
        )
        result = result.merged(column)
    return result


def cmd_dump_grid(args: argparse.Namespace, settings: Settings, out: TextIO) -> None:
    try:
        if args.state == "ho":
            state: Any = ThermalWignerHO(beta=args.beta)
        else:
            state = ThermalWignerSO(
                beta=args.beta, alpha=args.alpha, embedding=settings.so_embedding
            )
    except ValidationError as error:
        raise UsageError(str(error)) from error
    dump_grid(state, build_grid([state], settings=settings), out, settings)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    try:
        settings = settings_from(args)
        with ExitStack() as stack:
            out: TextIO = (
                stack.enter_context(open(args.out, "w", newline=""))
                if args.out
                else sys.stdout
            )
            if args.command == "dump-grid":
                cmd_dump_grid(args, settings, out)
                return EXIT_OK
            commands = {"eval": cmd_eval, "fig1": cmd_fig1, "fig2": cmd_fig2}
            curve = commands[args.command](args, settings)
            curve = CurveSeries(
                beta_grid=curve.beta_grid,
                columns=curve.columns,
                metadata={"thermoinfo": __version__, **curve.metadata},
                flags=curve.flags,
            )
            curve.write_csv(out)
    except UsageError as error:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {error}", file=sys.stderr)
        return EXIT_USAGE
    except (ThermoInfoError, OSError) as error:
        logger.error("thermoinfo failed", error=str(error))
        return EXIT_FAILURE
    return EXIT_PARTIAL if curve.partial else EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
