# SPDX-FileCopyrightText: 2023 Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Energy spectra and the ensemble models built on them.

Every spectrum is an immutable pydantic model whose ``levels()`` method returns a
fresh lazy iterator of ``Level`` pairs in nondecreasing energy order, so concurrent
consumers never share iteration state. Energies are dimensionless; the physical
scale lives on ``EnsembleModel.energy_scale`` and enters every evaluation through
the reduced inverse temperature ``b = beta * energy_scale``.
"""
import functools
import heapq
import itertools
import math
from pathlib import Path
from typing import Annotated
from typing import Iterator
from typing import List
from typing import Literal
from typing import NamedTuple
from typing import Optional
from typing import Tuple
from typing import Union

from pydantic import BaseModel
from pydantic import conlist
from pydantic import Field
from pydantic import PositiveFloat
from pydantic import PositiveInt
from pydantic import ValidationError
from pydantic import validator

from thermoinfo.config import resolve
from thermoinfo.config import Settings
from thermoinfo.exceptions import DomainError
from thermoinfo.exceptions import InvalidArgumentError
from thermoinfo.specfun import bessel_order
from thermoinfo.specfun import log_gamma


class Level(NamedTuple):
    energy: float
    degeneracy: int


class ClosedForm(NamedTuple):
    """Analytic thermodynamics at a reduced inverse temperature.

    ``energy`` and ``capacity`` are the dimensionless -beta d(ln Z)/d(beta) and
    beta^2 d^2(ln Z)/d(beta)^2. ``exact`` is False for continuum approximations.
    """

    log_z: float
    energy: float
    capacity: float
    exact: bool


def _oscillator(b: float) -> ClosedForm:
    half = 0.5 * b
    return ClosedForm(
        log_z=-half - math.log(-math.expm1(-b)),
        energy=half / math.tanh(half),
        capacity=(half / math.sinh(half)) ** 2 if half < 700.0 else 0.0,
        exact=True,
    )


class Spectrum(BaseModel):
    kind: str

    class Config:
        frozen = True

    @property
    def finite(self) -> bool:
        return False

    def levels(self) -> Iterator[Level]:
        raise NotImplementedError(f"{self.kind} spectrum has no level ladder")

    def levels_below(self, cutoff: float) -> Iterator[Level]:
        """Levels with energy at or below ``cutoff``."""
        return itertools.takewhile(lambda level: level.energy <= cutoff, self.levels())

    def closed_form(self, b: float) -> Optional[ClosedForm]:
        return None

    def describe(self) -> str:
        return self.kind


class HOSpectrum(Spectrum):
    kind: Literal["HO"] = "HO"

    def levels(self) -> Iterator[Level]:
        return (Level(n + 0.5, 1) for n in itertools.count())

    def closed_form(self, b: float) -> Optional[ClosedForm]:
        return _oscillator(b)


class SOSpectrum(Spectrum):
    """Singular oscillator; the ladder does not depend on alpha."""

    kind: Literal["SO"] = "SO"
    alpha: float

    @validator("alpha")
    def alpha_above_minus_one(cls, v: float) -> float:
        return bessel_order(v)

    def levels(self) -> Iterator[Level]:
        return (Level(2.0 * n + 1.0, 1) for n in itertools.count())

    def closed_form(self, b: float) -> Optional[ClosedForm]:
        return _oscillator(2.0 * b)

    def describe(self) -> str:
        return f"SO(alpha={self.alpha:g})"


class BoxSpectrum(Spectrum):
    kind: Literal["Box"] = "Box"
    ground: int = Field(0, ge=0, le=1)

    def levels(self) -> Iterator[Level]:
        return (Level(float(n * n), 1) for n in itertools.count(self.ground))

    def closed_form(self, b: float) -> Optional[ClosedForm]:
        # Gaussian integral of the level sum; continuum approximation only.
        return ClosedForm(0.5 * math.log(math.pi / (4.0 * b)), 0.5, 0.5, exact=False)

    def describe(self) -> str:
        return f"Box(ground={self.ground})"


class RotorSpectrum(Spectrum):
    kind: Literal["Rotor"] = "Rotor"

    def levels(self) -> Iterator[Level]:
        return (Level(float(n * (n + 1)), 2 * n + 1) for n in itertools.count())

    def closed_form(self, b: float) -> Optional[ClosedForm]:
        return ClosedForm(-math.log(b), 1.0, 1.0, exact=False)


class CustomSpectrum(Spectrum):
    kind: Literal["Custom"] = "Custom"
    name: str = "custom"
    entries: conlist(Tuple[float, PositiveInt], min_items=2)  # type: ignore[valid-type]

    @validator("entries")
    def sort_entries(
        cls, v: List[Tuple[float, int]]
    ) -> List[Tuple[float, int]]:
        if not all(math.isfinite(energy) for energy, _ in v):
            raise ValueError("energies must be finite")
        return sorted(v)

    @property
    def finite(self) -> bool:
        return True

    def levels(self) -> Iterator[Level]:
        return (Level(energy, degeneracy) for energy, degeneracy in self.entries)

    def describe(self) -> str:
        return f"Custom({self.name})"


class _Prefix:
    """Memoized prefix of a lazy level stream."""

    def __init__(self, levels: Iterator[Level]) -> None:
        self._levels = levels
        self._seen: List[Level] = []

    def get(self, index: int) -> Optional[Level]:
        while len(self._seen) <= index:
            level = next(self._levels, None)
            if level is None:
                return None
            self._seen.append(level)
        return self._seen[index]


def _minkowski(left: Iterator[Level], right: Iterator[Level]) -> Iterator[Level]:
    """Lazily merge all pairwise sums of two nondecreasing level streams."""
    a, b = _Prefix(left), _Prefix(right)
    heap: List[Tuple[float, int, int, int]] = []

    def push(i: int, j: int) -> None:
        level_a, level_b = a.get(i), b.get(j)
        if level_a is not None and level_b is not None:
            energy = level_a.energy + level_b.energy
            degeneracy = level_a.degeneracy * level_b.degeneracy
            heapq.heappush(heap, (energy, i, j, degeneracy))

    push(0, 0)
    while heap:
        energy, i, j, degeneracy = heapq.heappop(heap)
        yield Level(energy, degeneracy)
        if j == 0:
            push(i + 1, 0)
        push(i, j + 1)


def _coalesce(levels: Iterator[Level]) -> Iterator[Level]:
    for energy, group in itertools.groupby(levels, key=lambda level: level.energy):
        yield Level(energy, sum(level.degeneracy for level in group))


class ProductSpectrum(Spectrum):
    """Non-interacting distinguishable subsystems; energies are absolute."""

    kind: Literal["Product"] = "Product"
    factors: List["EnsembleModel"]

    @property
    def finite(self) -> bool:
        return all(factor.spectrum.finite for factor in self.factors)

    def levels(self) -> Iterator[Level]:
        streams = (factor.scaled_levels() for factor in self.factors)
        return _coalesce(functools.reduce(_minkowski, streams))

    def closed_form(self, b: float) -> Optional[ClosedForm]:
        forms = [factor.closed_form(b) for factor in self.factors]
        if any(form is None for form in forms):
            return None
        return ClosedForm(
            log_z=math.fsum(form.log_z for form in forms if form),
            energy=math.fsum(form.energy for form in forms if form),
            capacity=math.fsum(form.capacity for form in forms if form),
            exact=all(form.exact for form in forms if form),
        )

    def describe(self) -> str:
        return " x ".join(factor.describe() for factor in self.factors)


class SymmetrizedPowerSpectrum(Spectrum):
    """N identical subsystems with Z = Z_A^N / N!; it has no level ladder."""

    kind: Literal["SymmetrizedPower"] = "SymmetrizedPower"
    base: "EnsembleModel"
    n: PositiveInt

    @property
    def finite(self) -> bool:
        return self.base.spectrum.finite

    def closed_form(self, b: float) -> Optional[ClosedForm]:
        form = self.base.closed_form(b)
        if form is None:
            return None
        return ClosedForm(
            log_z=self.n * form.log_z - float(log_gamma(self.n + 1.0)),
            energy=self.n * form.energy,
            capacity=self.n * form.capacity,
            exact=form.exact,
        )

    def describe(self) -> str:
        return f"Sym[{self.base.describe()}]^{self.n}"


AnySpectrum = Annotated[
    Union[
        HOSpectrum,
        SOSpectrum,
        BoxSpectrum,
        RotorSpectrum,
        CustomSpectrum,
        ProductSpectrum,
        SymmetrizedPowerSpectrum,
    ],
    Field(discriminator="kind"),
]


class EnsembleModel(BaseModel):
    """A spectrum together with the energy scale multiplying beta."""

    spectrum: AnySpectrum
    energy_scale: PositiveFloat = 1.0

    class Config:
        frozen = True

    @validator("energy_scale")
    def energy_scale_finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("energy_scale must be finite")
        return v

    def reduced(self, beta: float) -> float:
        return beta * self.energy_scale

    def scaled_levels(self) -> Iterator[Level]:
        """Levels in units of the reference energy, i.e. multiplied by the scale."""
        scale = self.energy_scale
        return (
            Level(level.energy * scale, level.degeneracy)
            for level in self.spectrum.levels()
        )

    def closed_form(self, beta: float) -> Optional[ClosedForm]:
        return self.spectrum.closed_form(self.reduced(beta))

    def describe(self) -> str:
        if self.energy_scale == 1.0:
            return self.spectrum.describe()
        return f"{self.spectrum.describe()}[scale={self.energy_scale:g}]"


ProductSpectrum.update_forward_refs(EnsembleModel=EnsembleModel)
SymmetrizedPowerSpectrum.update_forward_refs(EnsembleModel=EnsembleModel)


def _scale(theta: float) -> float:
    if not math.isfinite(theta):
        raise InvalidArgumentError(f"energy scale must be finite, got {theta}")
    if theta <= 0.0:
        raise DomainError(f"energy scale must be positive, got {theta}")
    return float(theta)


def make_ho(omega: float = 1.0) -> EnsembleModel:
    """Harmonic oscillator, levels n + 1/2."""
    return EnsembleModel(spectrum=HOSpectrum(), energy_scale=_scale(omega))


def make_so(alpha: float, omega: float = 1.0) -> EnsembleModel:
    """Singular oscillator, levels 2n + 1 for every alpha > -1.

    Raises:
        DomainError: if alpha <= -1.
    """
    return EnsembleModel(
        spectrum=SOSpectrum(alpha=bessel_order(alpha)), energy_scale=_scale(omega)
    )


def make_box(
    theta: float, ground: Optional[int] = None, settings: Optional[Settings] = None
) -> EnsembleModel:
    """Infinite square well, levels n^2 from n = ``ground`` (settings default 0)."""
    if ground is None:
        ground = resolve(settings).box_ground
    if ground not in (0, 1):
        raise InvalidArgumentError(f"box ground index must be 0 or 1, got {ground}")
    return EnsembleModel(
        spectrum=BoxSpectrum(ground=ground), energy_scale=_scale(theta)
    )


def make_rotor(theta: float) -> EnsembleModel:
    """Rigid rotor, levels l(l + 1) with degeneracy 2l + 1."""
    return EnsembleModel(spectrum=RotorSpectrum(), energy_scale=_scale(theta))


def make_custom(
    levels: List[Tuple[float, int]], energy_scale: float = 1.0, name: str = "custom"
) -> EnsembleModel:
    try:
        spectrum = CustomSpectrum(name=name, entries=levels)
    except ValidationError as error:
        raise InvalidArgumentError(f"invalid custom spectrum: {error}") from error
    return EnsembleModel(spectrum=spectrum, energy_scale=_scale(energy_scale))


def product(models: List[EnsembleModel]) -> EnsembleModel:
    """Tensor product of independent subsystems; Z multiplies.

    Raises:
        InvalidArgumentError: if ``models`` is empty.
    """
    if not models:
        raise InvalidArgumentError("product requires at least one model")
    if len(models) == 1:
        return models[0]
    return EnsembleModel(spectrum=ProductSpectrum(factors=list(models)))


def symmetrized_power(model: EnsembleModel, n: int) -> EnsembleModel:
    """N identical subsystems, Z = Z_A^N / N!.

    Raises:
        InvalidArgumentError: if n < 1.
    """
    if n < 1:
        raise InvalidArgumentError(f"number of subsystems must be positive, got {n}")
    if n == 1:
        return model
    return EnsembleModel(spectrum=SymmetrizedPowerSpectrum(base=model, n=n))


class CustomSpectrumFile(BaseModel):
    name: str
    energy_scale: PositiveFloat = 1.0
    levels: conlist(Tuple[float, PositiveInt], min_items=2)  # type: ignore[valid-type]


def load_custom_spectrum(path: Union[str, Path]) -> EnsembleModel:
    """Read ``{"name", "energy_scale", "levels": [[energy, degeneracy], ...]}``.

    Raises:
        InvalidArgumentError: if the file is missing or does not validate.
    """
    try:
        data = CustomSpectrumFile.parse_file(path)
    except (OSError, ValidationError) as error:
        message = f"cannot load spectrum file {path}: {error}"
        raise InvalidArgumentError(message) from error
    return make_custom(data.levels, energy_scale=data.energy_scale, name=data.name)
