# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
import itertools
import math
from pathlib import Path
from typing import Callable

import pytest
from pydantic import ValidationError

from thermoinfo.config import Settings
from thermoinfo.exceptions import DomainError
from thermoinfo.exceptions import InvalidArgumentError
from thermoinfo.spectra import EnsembleModel
from thermoinfo.spectra import HOSpectrum
from thermoinfo.spectra import Level
from thermoinfo.spectra import load_custom_spectrum
from thermoinfo.spectra import make_box
from thermoinfo.spectra import make_custom
from thermoinfo.spectra import make_ho
from thermoinfo.spectra import make_rotor
from thermoinfo.spectra import make_so
from thermoinfo.spectra import product
from thermoinfo.spectra import symmetrized_power


def first(model: EnsembleModel, count: int) -> list:
    return list(itertools.islice(model.scaled_levels(), count))


def test_ladders() -> None:
    assert first(make_ho(), 3) == [Level(0.5, 1), Level(1.5, 1), Level(2.5, 1)]
    assert first(make_so(2.5), 3) == [Level(1.0, 1), Level(3.0, 1), Level(5.0, 1)]
    assert first(make_rotor(1.0), 3) == [Level(0.0, 1), Level(2.0, 3), Level(6.0, 5)]
    assert first(make_box(1.0), 3) == [Level(0.0, 1), Level(1.0, 1), Level(4.0, 1)]
    assert first(make_box(1.0, ground=1), 2) == [Level(1.0, 1), Level(4.0, 1)]


def test_box_ground_from_settings() -> None:
    model = make_box(2.0, settings=Settings(box_ground=1))
    assert first(model, 1) == [Level(2.0, 1)]


def test_energy_scale_multiplies_levels() -> None:
    assert first(make_ho(3.0), 2) == [Level(1.5, 1), Level(4.5, 1)]
    assert make_ho(3.0).reduced(2.0) == 6.0


def test_levels_below() -> None:
    levels = list(make_ho().spectrum.levels_below(3.0))
    assert [level.energy for level in levels] == [0.5, 1.5, 2.5]


def test_product_coalesces_degenerate_levels() -> None:
    model = product([make_ho(), make_ho()])
    assert first(model, 3) == [Level(1.0, 1), Level(2.0, 2), Level(3.0, 3)]


def test_product_of_scaled_factors_is_ordered() -> None:
    model = product([make_ho(0.1), make_ho(1.0), make_ho(10.0)])
    energies = [level.energy for level in first(model, 50)]
    assert energies == sorted(energies)
    assert energies[0] == pytest.approx(5.55)


def test_product_closed_form_adds_factors() -> None:
    model = product([make_ho(1.0), make_ho(2.0)])
    form = model.closed_form(1.5)
    assert form is not None and form.exact
    expected = make_ho(1.0).closed_form(1.5).log_z + make_ho(2.0).closed_form(1.5).log_z
    assert form.log_z == pytest.approx(expected)


def test_product_single_and_empty() -> None:
    ho = make_ho()
    assert product([ho]) is ho
    with pytest.raises(InvalidArgumentError):
        product([])


def test_symmetrized_power() -> None:
    ho = make_ho()
    assert symmetrized_power(ho, 1) is ho
    model = symmetrized_power(ho, 3)
    form = model.closed_form(1.0)
    assert form.log_z == pytest.approx(3 * ho.closed_form(1.0).log_z - math.log(6.0))
    with pytest.raises(NotImplementedError):
        model.spectrum.levels()
    with pytest.raises(InvalidArgumentError):
        symmetrized_power(ho, 0)


def test_continuum_forms_are_not_exact() -> None:
    assert not make_box(1.0).closed_form(1.0).exact
    assert not make_rotor(1.0).closed_form(1.0).exact
    assert make_so(0.5).closed_form(1.0).exact


def test_so_closed_form_is_oscillator_at_double_beta() -> None:
    assert make_so(1.5).closed_form(0.7) == make_ho().closed_form(1.4)


def test_custom_levels_are_sorted() -> None:
    model = make_custom([(2.0, 1), (0.0, 2)])
    assert first(model, 5) == [Level(0.0, 2), Level(2.0, 1)]
    assert model.spectrum.finite


@pytest.mark.parametrize(
    "levels", [[(0.0, 1)], [(0.0, 1), (1.0, 0)], [(0.0, 1), (math.inf, 1)]]
)
def test_custom_invalid(levels: list) -> None:
    with pytest.raises(InvalidArgumentError):
        make_custom(levels)


def test_factories_validate() -> None:
    with pytest.raises(DomainError):
        make_so(-1.0)
    with pytest.raises(DomainError):
        make_box(0.0)
    with pytest.raises(InvalidArgumentError):
        make_rotor(math.inf)
    with pytest.raises(InvalidArgumentError):
        make_box(1.0, ground=2)


def test_models_are_frozen() -> None:
    model = make_ho()
    with pytest.raises(TypeError):
        model.energy_scale = 2.0  # type: ignore[misc]


def test_model_from_json() -> None:
    model = EnsembleModel.parse_obj({"spectrum": {"kind": "HO"}, "energy_scale": 2})
    assert isinstance(model.spectrum, HOSpectrum)
    with pytest.raises(ValidationError):
        EnsembleModel.parse_obj({"spectrum": {"kind": "Unknown"}})


def test_load_custom_spectrum(write_json: Callable[[str, object], Path]) -> None:
    path = write_json(
        "two_level.json",
        {"name": "qubit", "energy_scale": 0.5, "levels": [[0, 1], [1, 1]]},
    )
    model = load_custom_spectrum(path)
    assert model.describe() == "Custom(qubit)[scale=0.5]"
    assert first(model, 2) == [Level(0.0, 1), Level(0.5, 1)]


def test_load_custom_spectrum_errors(
    tmp_path: Path, write_json: Callable[[str, object], Path]
) -> None:
    with pytest.raises(InvalidArgumentError, match="cannot load"):
        load_custom_spectrum(tmp_path / "missing.json")
    path = write_json("bad.json", {"name": "bad", "levels": [[0, 1]]})
    with pytest.raises(InvalidArgumentError, match="cannot load"):
        load_custom_spectrum(path)
