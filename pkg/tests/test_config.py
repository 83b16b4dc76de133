# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
import pytest
from pydantic import ValidationError

from thermoinfo.config import get_settings
from thermoinfo.config import resolve
from thermoinfo.config import Settings
from thermoinfo.config import SOEmbedding


def test_defaults() -> None:
    settings = Settings()
    assert settings.tol == 1e-12
    assert settings.beta_min == 1e-4
    assert settings.grid_tol == 1e-8
    assert settings.so_embedding is SOEmbedding.EVEN
    assert not settings.prefer_closed_form


def test_environment_overrides(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("THERMOINFO_TOL", "1e-10")
    monkeypatch.setenv("THERMOINFO_SO_EMBEDDING", "half")
    monkeypatch.setenv("THERMOINFO_PREFER_CLOSED_FORM", "true")
    settings = Settings()
    assert settings.tol == 1e-10
    assert settings.so_embedding is SOEmbedding.HALF_LINE
    assert settings.prefer_closed_form


@pytest.mark.parametrize(
    "overrides",
    [
        {"tol": 0.0},
        {"tol": 0.01},
        {"max_panels": 1000},
        {"box_ground": 2},
        {"so_embedding": "odd"},
        {"workers": 0},
    ],
)
def test_validation(overrides: dict) -> None:
    with pytest.raises(ValidationError):
        Settings(**overrides)


def test_settings_are_immutable() -> None:
    settings = Settings()
    with pytest.raises(TypeError):
        settings.tol = 1e-6  # type: ignore[misc]
    assert settings.copy(update={"tol": 1e-6}).tol == 1e-6


def test_resolve() -> None:
    custom = Settings(tol=1e-9)
    assert resolve(custom) is custom
    assert resolve(None) is get_settings()
