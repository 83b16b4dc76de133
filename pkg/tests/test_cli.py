# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
import argparse
import io
import math
from pathlib import Path
from typing import Callable
from typing import List
from typing import Tuple

import numpy as np
import pytest

from thermoinfo.cli import EXIT_OK
from thermoinfo.cli import EXIT_PARTIAL
from thermoinfo.cli import EXIT_USAGE
from thermoinfo.cli import main
from thermoinfo.cli import parse_beta_range
from thermoinfo.curves import CurveSeries
from thermoinfo.wigner.so import ho_so_projection_half_order

Run = Callable[[List[str]], Tuple[int, str, str]]


@pytest.fixture
def run(capsys: pytest.CaptureFixture) -> Run:
    def runner(argv: List[str]) -> Tuple[int, str, str]:
        code = main(argv)
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return runner


def curve(text: str) -> CurveSeries:
    return CurveSeries.from_csv(io.StringIO(text))


def test_parse_beta_range() -> None:
    assert parse_beta_range("2.5") == [2.5]
    assert parse_beta_range("1:3:3") == [1.0, 2.0, 3.0]
    np.testing.assert_allclose(parse_beta_range("1:100:3log"), [1.0, 10.0, 100.0])
    np.testing.assert_allclose(
        parse_beta_range("1:100:3", default_spacing="log"), [1.0, 10.0, 100.0]
    )


@pytest.mark.parametrize("text", ["abc", "3:1:5", "1:2:0", "0:1:3", "-1", "1:2:x"])
def test_parse_beta_range_errors(text: str) -> None:
    with pytest.raises(argparse.ArgumentTypeError):
        parse_beta_range(text)


def test_eval_oscillator(run: Run) -> None:
    argv = ["eval", "--model", "ho", "--q", "Z,P", "--beta", "0.1:10:50log"]
    code, out, _ = run(argv)
    assert code == EXIT_OK
    result = curve(out)
    assert len(result.beta_grid) == 50
    assert result.metadata["model"] == "HO"
    assert "thermoinfo" in result.metadata
    expected = [math.tanh(0.5 * beta) for beta in result.beta_grid]
    np.testing.assert_allclose(result.columns["P"], expected, rtol=1e-10)
    assert not result.partial


def test_eval_rotor_continuum(run: Run) -> None:
    code, out, _ = run(
        [
            "eval",
            "--model",
            "rotor",
            "--q",
            "eps,eps_P",
            "--beta",
            "0.1:10:20",
            "--prefer-closed-form",
        ]
    )
    assert code == EXIT_OK
    result = curve(out)
    assert result.columns["eps"] == result.columns["eps_P"]


def test_eval_anisotropic_purity(run: Run) -> None:
    argv = ["eval", "--model", "ho3d", "--omegas", "0.5,2", "--q", "P", "--beta", "1"]
    code, out, _ = run(argv)
    assert code == EXIT_OK
    expected = math.tanh(0.25) * math.tanh(1.0)
    assert curve(out).columns["P"] == [pytest.approx(expected, rel=1e-10)]


def test_eval_self_fidelity(run: Run) -> None:
    argv = ["eval", "--model", "ho", "--q", "F_self,sqrtF_self", "--beta", "1"]
    code, out, _ = run(argv + ["--beta-ratio", "3"])
    assert code == EXIT_OK
    result = curve(out)
    expected = 2.0 * math.sinh(0.5) * math.sinh(1.5) / math.sinh(2.0)
    assert result.columns["F_self"][0] == pytest.approx(expected, rel=1e-10)
    assert result.columns["sqrtF_self"][0] == pytest.approx(math.sqrt(expected))
    assert result.metadata["beta_ratio"] == "3"


def test_eval_custom(run: Run, write_json: Callable[[str, object], Path]) -> None:
    path = write_json("qubit.json", {"name": "qubit", "levels": [[0, 1], [1, 1]]})
    argv = ["eval", "--model", "custom", "--spectrum-file", str(path), "--q", "Z"]
    code, out, _ = run(argv + ["--beta", "1"])
    assert code == EXIT_OK
    assert curve(out).columns["Z"] == [pytest.approx(1.0 + math.exp(-1.0))]


def test_eval_cross_projection_partial(
    run: Run, write_json: Callable[[str, object], Path]
) -> None:
    overlaps = write_json(
        "overlaps.json",
        {"rows": 3, "cols": 3, "abs_sq": np.eye(3).tolist()},
    )
    argv = ["eval", "--model", "ho", "--q", "F_cross,F_cross_bracket"]
    code, out, _ = run(argv + ["--overlaps-file", str(overlaps), "--beta", "0.5"])
    assert code == EXIT_PARTIAL
    result = curve(out)
    assert result.flags == ["F_cross:PrecisionError"]
    value = result.columns["F_cross"][0]
    bracket = result.columns["F_cross_bracket"][0]
    exact = 2.0 * math.sinh(0.25) * math.sinh(0.5) / math.sinh(0.75)
    assert value <= exact <= value + bracket


def test_eval_cross_projection_at_low_temperature(
    run: Run, write_json: Callable[[str, object], Path]
) -> None:
    overlaps = write_json(
        "overlaps.json",
        {"rows": 3, "cols": 3, "abs_sq": np.eye(3).tolist()},
    )
    argv = ["eval", "--model", "so", "--q", "F_cross,F_cross_bracket"]
    code, out, _ = run(argv + ["--overlaps-file", str(overlaps), "--beta", "500"])
    assert code == EXIT_OK
    result = curve(out)
    assert not result.partial
    assert result.columns["F_cross"] == [pytest.approx(1.0, rel=1e-12)]
    assert result.columns["F_cross_bracket"] == [0.0]


def test_eval_out_file(run: Run, tmp_path: Path) -> None:
    target = tmp_path / "z.csv"
    argv = ["eval", "--model", "so", "--q", "Z", "--beta", "1:2:2"]
    code, out, _ = run(argv + ["--out", str(target)])
    assert code == EXIT_OK
    assert out == ""
    with target.open() as stream:
        result = CurveSeries.from_csv(stream)
    expected = [1.0 / (2.0 * math.sinh(beta)) for beta in (1.0, 2.0)]
    np.testing.assert_allclose(result.columns["Z"], expected, rtol=1e-10)


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--model", "ho", "--q", "Q", "--beta", "1"],
        ["eval", "--model", "ho", "--beta", "0:1:3"],
        ["eval", "--model", "spin", "--beta", "1"],
        ["fig1", "--variant", "3"],
    ],
)
def test_argument_errors(argv: List[str]) -> None:
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    assert excinfo.value.code == EXIT_USAGE


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--model", "so", "--alpha", "-1", "--beta", "1"],
        ["eval", "--model", "custom", "--beta", "1"],
        ["eval", "--model", "ho", "--q", "F_cross", "--beta", "1"],
        ["eval", "--model", "ho", "--beta", "1", "--tol", "0.5"],
        ["eval", "--model", "ho", "--omegas", "1,2", "--beta", "1"],
        ["dump-grid", "--state", "so", "--alpha", "-2", "--beta", "1"],
    ],
)
def test_usage_errors(run: Run, argv: List[str]) -> None:
    code, out, err = run(argv)
    assert code == EXIT_USAGE
    assert out == ""
    assert "error" in err


def test_fig1(run: Run) -> None:
    code, out, _ = run(["fig1", "--variant", "2", "--beta", "0.01:100:9"])
    assert code == EXIT_OK
    result = curve(out)
    assert result.metadata["omegas"] == "0.10000000000000001,1,100"
    assert list(result.columns) == ["P", "eps_P", "C_P", "eps", "C"]
    omegas = (0.1, 1.0, 100.0)
    for beta, value in zip(result.beta_grid, result.columns["P"]):
        expected = math.prod(math.tanh(0.5 * omega * beta) for omega in omegas)
        assert value == pytest.approx(expected, rel=1e-9)


def test_fig1_capacity_peaks(run: Run) -> None:
    argv = ["fig1", "--variant", "2", "--beta", "0.001:1000:601"]
    code, out, _ = run(argv + ["--prefer-closed-form"])
    assert code == EXIT_OK
    result = curve(out)
    betas, c_p = np.array(result.beta_grid), np.array(result.columns["C_P"])
    peaks = betas[1:-1][(c_p[1:-1] > c_p[:-2]) & (c_p[1:-1] > c_p[2:])]
    assert len(peaks) == 3
    # One peak per oscillator, near beta * omega = 1.55.
    np.testing.assert_allclose(np.sort(peaks), [0.0155, 1.55, 15.5], rtol=0.2)
    # Every axis contributes 1 at high temperature.
    assert c_p[0] == pytest.approx(3.0, abs=5e-3)
    assert result.columns["C"][0] == pytest.approx(3.0, abs=1e-3)


def test_dump_grid(run: Run) -> None:
    code, out, _ = run(["dump-grid", "--state", "ho", "--beta", "1"])
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "x,k,w"
    x, k, w = (float(field) for field in lines[1].split(","))
    t = math.tanh(0.5)
    expected = t / math.pi * math.exp(-t * (x * x + k * k))
    assert w == pytest.approx(expected, rel=1e-12)


@pytest.mark.slow
def test_fig2(run: Run) -> None:
    argv = ["fig2", "--alphas", "-0.5", "--beta", "0.5:1:2", "--grid-tol", "1e-5"]
    code, out, _ = run(argv)
    assert code == EXIT_OK
    result = curve(out)
    assert result.metadata["embedding"] == "even"
    np.testing.assert_allclose(result.columns["tanh"], np.tanh([0.5, 1.0]))
    expected = [ho_so_projection_half_order(beta) for beta in result.beta_grid]
    np.testing.assert_allclose(result.columns["F_alpha=-0.5"], expected, atol=1e-4)
