# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
from importlib.metadata import PackageNotFoundError
from importlib.metadata import version

try:
    __version__ = version("thermoinfo")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"
