# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Common interface of the Wigner function evaluators.

Phase space is dimensionless, x = (m w / hbar)^(1/2) q and k = (m w hbar)^(-1/2) p,
so a normalized Wigner function integrates to 1 over dx dk and the projection of
two states is 2 pi times the integral of their product.
"""
from abc import ABC
from abc import abstractmethod
from typing import Optional
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike
from numpy.typing import NDArray
from pydantic import BaseModel

from thermoinfo.config import resolve
from thermoinfo.config import Settings
from thermoinfo.specfun import FloatOrArray


class WignerFunction(BaseModel, ABC):
    """A real quasi-probability distribution W(x, k)."""

    class Config:
        frozen = True

    @property
    def half_line(self) -> bool:
        """True when the state lives on x >= 0 and W vanishes for x < 0."""
        return False

    @property
    def even_in_x(self) -> bool:
        return not self.half_line

    @property
    @abstractmethod
    def envelope(self) -> float:
        """c in a Gaussian bound exp(-c x^2) on the x-decay of |W|."""

    @property
    def k_envelope(self) -> float:
        """Like ``envelope`` for k; zero when no Gaussian k-bound is known."""
        return self.envelope

    def frequencies(self, x_extent: float, k_extent: float) -> Tuple[float, float]:
        """Largest angular frequencies of W along x and k inside the given box."""
        return 2.0 * self.envelope * x_extent, 2.0 * self.k_envelope * k_extent

    @abstractmethod
    def evaluate(
        self, x: NDArray[np.float64], k: NDArray[np.float64], settings: Settings
    ) -> NDArray[np.float64]:
        """W at matching 1-D arrays of points."""

    @abstractmethod
    def k_marginal(self, x: ArrayLike) -> FloatOrArray:
        """The coordinate density, the integral of W over k."""

    def x_marginal(self, k: ArrayLike) -> Optional[FloatOrArray]:
        """The momentum density when it has a closed form."""
        return None

    def __call__(
        self, x: ArrayLike, k: ArrayLike, settings: Optional[Settings] = None
    ) -> FloatOrArray:
        xs, ks = np.broadcast_arrays(
            np.asarray(x, dtype=np.float64), np.asarray(k, dtype=np.float64)
        )
        values = self.evaluate(xs.ravel(), ks.ravel(), resolve(settings))
        if xs.ndim == 0:
            return float(values[0])
        return values.reshape(xs.shape)

    def describe(self) -> str:
        return type(self).__name__
