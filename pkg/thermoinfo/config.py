# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
from enum import Enum
from functools import lru_cache
from typing import Optional

from pydantic import BaseSettings
from pydantic import Field
from pydantic import validator


class SOEmbedding(str, Enum):
    """How the half-line singular oscillator is placed on the full phase space."""

    HALF_LINE = "half"
    EVEN = "even"


class Settings(BaseSettings):
    """Numerical configuration shared by every operation.

    Values are read from ``THERMOINFO_*`` environment variables, e.g.
    ``THERMOINFO_TOL=1e-11`` or ``THERMOINFO_SO_EMBEDDING=half``.
    """

    # Partition function series
    tol: float = Field(1e-12, gt=0.0, le=1e-3)
    max_terms: int = Field(1_000_000, ge=1)
    beta_min: float = Field(1e-4, gt=0.0)
    prefer_closed_form: bool = False

    # Log-beta differentiation stencil
    stencil_step: float = Field(1e-2, gt=0.0, lt=0.5)
    richardson_halvings: int = Field(2, ge=0, le=4)
    stencil_tol: float = Field(1e-5, gt=0.0)

    # Phase-space quadrature
    grid_tol: float = Field(1e-8, gt=0.0, lt=1.0)
    inner_tol: float = Field(1e-8, gt=0.0, lt=1.0)
    gl_nodes: int = Field(32, ge=4, le=128)
    max_panels: int = Field(1024, ge=1)
    nodes_per_period: int = Field(8, ge=2)
    chunk_size: int = Field(4096, ge=1)
    workers: int = Field(1, ge=1)

    # Models
    box_ground: int = Field(0, ge=0, le=1)
    so_embedding: SOEmbedding = SOEmbedding.EVEN

    @validator("max_panels")
    def max_panels_power_of_two(cls, v: int) -> int:
        if v & (v - 1):
            raise ValueError("max_panels must be a power of two")
        return v

    class Config:
        env_prefix = "THERMOINFO_"
        allow_mutation = False


@lru_cache(maxsize=None)
def get_settings() -> Settings:
    return Settings()


def resolve(settings: Optional[Settings]) -> Settings:
    """Return the given settings, or the process-wide default."""
    return settings if settings is not None else get_settings()
