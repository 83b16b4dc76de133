# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
import io
import math

import pytest
from pydantic import ValidationError

from thermoinfo.curves import CurveSeries
from thermoinfo.curves import format_float
from thermoinfo.exceptions import InvalidArgumentError


@pytest.fixture
def series() -> CurveSeries:
    return CurveSeries(
        beta_grid=[0.1, 1.0, 10.0],
        columns={"P": [math.tanh(0.05), math.tanh(0.5), math.tanh(5.0)]},
        metadata={"model": "HO"},
    )


def test_csv_layout(series: CurveSeries) -> None:
    lines = series.to_csv().splitlines()
    assert lines[0] == "# model: HO"
    assert lines[1] == "beta,P,flag"
    assert lines[2] == f"0.10000000000000001,{format_float(math.tanh(0.05))},"


def test_csv_round_trip(series: CurveSeries) -> None:
    assert CurveSeries.from_csv(io.StringIO(series.to_csv())) == series


def test_flags_default_to_empty(series: CurveSeries) -> None:
    assert series.flags == ["", "", ""]
    assert not series.partial


def test_partial_rows_survive_csv() -> None:
    series = CurveSeries(
        beta_grid=[1.0, 2.0],
        columns={"F": [0.5, math.nan]},
        flags=["", "F:QuadratureError"],
    )
    parsed = CurveSeries.from_csv(io.StringIO(series.to_csv()))
    assert parsed.partial
    assert parsed.flags == ["", "F:QuadratureError"]
    assert math.isnan(parsed.columns["F"][1])


@pytest.mark.parametrize(
    "fields",
    [
        {"beta_grid": [1.0, 1.0], "columns": {}},
        {"beta_grid": [2.0, 1.0], "columns": {}},
        {"beta_grid": [1.0, 2.0], "columns": {"P": [0.5]}},
        {"beta_grid": [1.0, 2.0], "columns": {}, "flags": ["x"]},
    ],
)
def test_validation(fields: dict) -> None:
    with pytest.raises(ValidationError):
        CurveSeries(**fields)


def test_merged(series: CurveSeries) -> None:
    other = CurveSeries(
        beta_grid=series.beta_grid,
        columns={"Z": [1.0, 2.0, 3.0]},
        metadata={"tol": "1e-12"},
        flags=["", "Z:ConvergenceError", ""],
    )
    merged = series.merged(other)
    assert list(merged.columns) == ["P", "Z"]
    assert merged.metadata == {"model": "HO", "tol": "1e-12"}
    assert merged.flags == ["", "Z:ConvergenceError", ""]
    with pytest.raises(InvalidArgumentError):
        series.merged(CurveSeries(beta_grid=[1.0], columns={}))


@pytest.mark.parametrize(
    "text", ["", "# only: metadata\n", "x,P,flag\n1,2,\n", "beta,P,flag\n1,abc,\n"]
)
def test_from_csv_errors(text: str) -> None:
    with pytest.raises(InvalidArgumentError):
        CurveSeries.from_csv(io.StringIO(text))
