# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
from typing import Optional


class ThermoInfoError(Exception):
    pass


class InvalidArgumentError(ThermoInfoError, ValueError):
    pass


class DomainError(ThermoInfoError, ValueError):
    pass


class DivergenceError(ThermoInfoError):
    pass


class ConvergenceError(ThermoInfoError):
    def __init__(
        self,
        message: str,
        partial_sum: Optional[float] = None,
        terms_used: Optional[int] = None,
    ) -> None:
        """Series or iteration that did not establish its tail bound.

        Args:
            message: Human readable description.
            partial_sum: The partial result reached before giving up.
            terms_used: Number of terms summed.
        """
        super().__init__(message)
        self.partial_sum = partial_sum
        self.terms_used = terms_used


class PrecisionError(ThermoInfoError):
    def __init__(self, message: str, partial: Optional[object] = None) -> None:
        super().__init__(message)
        self.partial = partial


class QuadratureError(ThermoInfoError):
    def __init__(
        self,
        message: str,
        estimate: Optional[float] = None,
        error: Optional[float] = None,
    ) -> None:
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NumericDifferentiationError(ThermoInfoError):
    pass


class ConfigurationError(ThermoInfoError):
    pass
