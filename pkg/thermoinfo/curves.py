# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Beta sweeps and their CSV representation.

A curve file starts with ``# key: value`` metadata lines, followed by the header
``beta,<column>...,flag`` and one row per beta. Floats are written with 17
significant digits so a file re-parses to the identical series.
"""
import csv
import io
from typing import Dict
from typing import List
from typing import TextIO

from pydantic import BaseModel
from pydantic import root_validator

from thermoinfo.exceptions import InvalidArgumentError

FLAG_COLUMN = "flag"


def format_float(value: float) -> str:
    return format(value, ".17g")


class CurveSeries(BaseModel):
    """Quantities evaluated on an increasing beta grid.

    ``flags`` holds one entry per row, empty for rows that evaluated cleanly and
    the failure name otherwise.
    """

    beta_grid: List[float]
    columns: Dict[str, List[float]]
    metadata: Dict[str, str] = {}
    flags: List[str] = []

    class Config:
        frozen = True

    @root_validator(skip_on_failure=True)
    def check_shape(cls, values: dict) -> dict:
        betas = values["beta_grid"]
        if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
            raise ValueError("beta_grid must be strictly increasing")
        for name, column in values["columns"].items():
            if len(column) != len(betas):
                raise ValueError(
                    f"column {name} has {len(column)} values for {len(betas)} betas"
                )
        if not values["flags"]:
            values["flags"] = [""] * len(betas)
        elif len(values["flags"]) != len(betas):
            raise ValueError("flags must have one entry per beta")
        return values

    @property
    def partial(self) -> bool:
        return any(self.flags)

    def merged(self, other: "CurveSeries") -> "CurveSeries":
        """Columns of both series on their shared beta grid."""
        if other.beta_grid != self.beta_grid:
            raise InvalidArgumentError("cannot merge curves on different beta grids")
        flags = [
            ";".join(filter(None, pair)) for pair in zip(self.flags, other.flags)
        ]
        return CurveSeries(
            beta_grid=self.beta_grid,
            columns={**self.columns, **other.columns},
            metadata={**self.metadata, **other.metadata},
            flags=flags,
        )

    def write_csv(self, stream: TextIO) -> None:
        for key, value in self.metadata.items():
            stream.write(f"# {key}: {value}\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["beta", *self.columns, FLAG_COLUMN])
        for row, beta in enumerate(self.beta_grid):
            writer.writerow(
                [
                    format_float(beta),
                    *(format_float(column[row]) for column in self.columns.values()),
                    self.flags[row],
                ]
            )

    def to_csv(self) -> str:
        buffer = io.StringIO()
        self.write_csv(buffer)
        return buffer.getvalue()

    @classmethod
    def from_csv(cls, stream: TextIO) -> "CurveSeries":
        metadata: Dict[str, str] = {}
        lines = stream.read().splitlines()
        body = []
        for line in lines:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(": ")
                metadata[key] = value
            elif line:
                body.append(line)
        if not body:
            raise InvalidArgumentError("curve file has no header")
        reader = csv.reader(body)
        header = next(reader)
        if header[0] != "beta" or header[-1] != FLAG_COLUMN:
            raise InvalidArgumentError(f"unexpected curve header {header}")
        names = header[1:-1]
        rows = list(reader)
        try:
            return cls(
                beta_grid=[float(row[0]) for row in rows],
                columns={
                    name: [float(row[i + 1]) for row in rows]
                    for i, name in enumerate(names)
                },
                metadata=metadata,
                flags=[row[-1] for row in rows],
            )
        except (IndexError, ValueError) as error:
            raise InvalidArgumentError(f"malformed curve file: {error}") from error
