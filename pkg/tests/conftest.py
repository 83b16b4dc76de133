# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
import json
from pathlib import Path
from typing import Callable
from typing import Iterator

import pytest
import structlog

from thermoinfo.config import Settings
from thermoinfo.spectra import EnsembleModel
from thermoinfo.spectra import make_ho
from thermoinfo.spectra import make_so


@pytest.fixture(autouse=True)
def reset_structlog() -> Iterator[None]:
    # The CLI binds structlog to the current sys.stderr; undo it so later
    # tests do not log into a closed capture stream.
    yield
    structlog.reset_defaults()


@pytest.fixture
def settings() -> Settings:
    return Settings()


@pytest.fixture
def closed_form_settings() -> Settings:
    return Settings(prefer_closed_form=True)


@pytest.fixture
def ho() -> EnsembleModel:
    return make_ho()


@pytest.fixture
def so() -> EnsembleModel:
    return make_so(0.5)


@pytest.fixture
def write_json(tmp_path: Path) -> Callable[[str, object], Path]:
    def writer(name: str, payload: object) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return path

    return writer
