"""The U² inverse theorem: correlating phases and correlating level sets.

``large_fourier_coefficient`` finds the frequency ``θ = r/M`` that correlates
best with ``f``. ``correlating_set`` upgrades it to a level set
``E_t = {n : φ(θn) >= t}`` of a phase ``φ``, picking ``t`` where the level
structure of ``φ`` is not too concentrated, so that ``1_{E_t}`` is close in L²
to the ramp ``η_{t,r}∘φ``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Literal

import numpy as np
import numpy.typing as npt

from .config import DEFAULT_CONFIG, RegularityConfig
from .diophantine import TorusPoint
from .exceptions import ApproximationError, InvalidArgumentError
from .fourier import IntervalFunction, correlation, fourier_correlations
from .witness import Clamp, Expr, ImPhase, Ramp, RePhase, StructureWitness, negative_part

logger = logging.getLogger("arithreg.inverse")

Variant = Literal["re+", "re-", "im+", "im-"]

PHASE_VARIANTS: tuple[Variant, ...] = ("re+", "re-", "im+", "im-")


def phase_expression(variant: Variant) -> Expr:
    """The ``[0, 1]``-valued phase ``φ`` of a variant on a one-dimensional torus."""
    if variant == "re+":
        return Clamp(RePhase(0))
    if variant == "re-":
        return negative_part(RePhase(0))
    if variant == "im+":
        return Clamp(ImPhase(0))
    if variant == "im-":
        return negative_part(ImPhase(0))
    raise InvalidArgumentError(f"unknown phase variant {variant!r}")


def _check_bounded(f: IntervalFunction, config: RegularityConfig) -> None:
    if f.is_complex:
        raise InvalidArgumentError("expected a real-valued function")
    if np.any(np.abs(f.values) > 1 + config.exact_tolerance):
        raise InvalidArgumentError("function values must lie in [-1, 1]")


# ----------------------------------------------------------------------
# Linear phases
# ----------------------------------------------------------------------
@dataclass(slots=True, frozen=True)
class FourierPeak:
    """The frequency ``θ = r/M`` with the largest correlation against ``f``."""

    frequency: int
    modulus: int
    theta: Fraction
    achieved: float
    coefficient: complex

    def to_dict(self) -> dict[str, Any]:
        return {
            "r": self.frequency,
            "m": self.modulus,
            "theta": [str(self.theta.numerator), str(self.theta.denominator)],
            "achieved": self.achieved,
        }


def large_fourier_coefficient(
    f: IntervalFunction,
    delta: float,
    *,
    config: RegularityConfig = DEFAULT_CONFIG,
) -> FourierPeak:
    """Scan every ``r`` in ``Z/MZ`` for the largest ``|E_{n∈[N]} f(n) e(-rn/M)|``.

    Ties go to the lowest ``r``. ``achieved`` is the measured maximum; callers
    compare it with ``delta`` themselves.
    """
    if delta <= 0:
        raise InvalidArgumentError(f"delta must be positive, got {delta}")
    _check_bounded(f, config)
    correlations = fourier_correlations(f)
    magnitudes = np.abs(correlations)
    r = int(np.argmax(magnitudes))
    m = f.ambient_modulus
    peak = FourierPeak(
        frequency=r,
        modulus=m,
        theta=Fraction(r, m),
        achieved=float(magnitudes[r]),
        coefficient=complex(correlations[r]),
    )
    if peak.achieved < delta**2:
        logger.debug("largest coefficient %.4g at r=%d is below delta^2=%.4g", peak.achieved, r, delta**2)
    return peak


# ----------------------------------------------------------------------
# Maximal function
# ----------------------------------------------------------------------
def maximal_radii(config: RegularityConfig = DEFAULT_CONFIG) -> npt.NDArray[np.float64]:
    return 2.0 ** -np.arange(1, config.maximal_radii + 1, dtype=np.float64)


def maximal_function(
    phi: IntervalFunction,
    t: float,
    *,
    config: RegularityConfig = DEFAULT_CONFIG,
) -> float:
    """``sup_r (1/2r)·|{n : |φ(n) - t| <= r}|/N`` over ``r = 2^-1 .. 2^-k``, capped.

    Example:
        >>> maximal_function(IntervalFunction.constant(4, 0.0), 0.5)
        0.0
    """
    if not 0 <= t <= 1:
        raise InvalidArgumentError(f"threshold t must lie in [0, 1], got {t}")
    distance = np.abs(phi.values - t)
    best = 0.0
    for r in maximal_radii(config):
        count = int(np.count_nonzero(distance <= r))
        best = max(best, count / (2.0 * r * phi.n_max))
    return min(best, config.maximal_cap)


def maximal_profile(
    sorted_phi: npt.NDArray[np.float64],
    thresholds: npt.NDArray[np.float64],
    *,
    config: RegularityConfig = DEFAULT_CONFIG,
) -> npt.NDArray[np.float64]:
    """``maximal_function`` at many thresholds at once, from sorted values of ``φ``."""
    n = sorted_phi.shape[0]
    best = np.zeros(thresholds.shape[0])
    for r in maximal_radii(config):
        upper = np.searchsorted(sorted_phi, thresholds + r, side="right")
        lower = np.searchsorted(sorted_phi, thresholds - r, side="left")
        best = np.maximum(best, (upper - lower) / (2.0 * r * n))
    return np.minimum(best, config.maximal_cap)


# ----------------------------------------------------------------------
# Measurable sets
# ----------------------------------------------------------------------
@dataclass(slots=True, frozen=True)
class LevelSetRecipe:
    """How a level set was cut out: ``E = {n : φ(θn) >= threshold}``."""

    theta: TorusPoint
    phi: Expr
    threshold: float
    maximal_value: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "theta": self.theta.to_dict(),
            "phi": self.phi.to_dict(),
            "threshold": self.threshold,
            "maximal_value": self.maximal_value,
        }


@dataclass(slots=True, frozen=True)
class WitnessRecord:
    target_error: float
    witness: StructureWitness
    achieved_l2_error: float
    ramp_width: float | None = None

    @property
    def complexity(self) -> float:
        return self.witness.complexity

    def to_dict(self) -> dict[str, Any]:
        return {
            "target_error": self.target_error,
            "achieved_l2_error": self.achieved_l2_error,
            "ramp_width": self.ramp_width,
            "witness": self.witness.to_dict(),
        }


@dataclass(slots=True, eq=False)
class MeasurableSet:
    """A subset of ``[N]`` together with the witnesses certifying its 1-measurability."""

    indicator: IntervalFunction
    recipe: LevelSetRecipe | None = None
    label: str = "E"
    witnesses: list[WitnessRecord] = field(default_factory=list)

    def __post_init__(self) -> None:
        values = self.indicator.values
        if self.indicator.is_complex or not np.all((values == 0) | (values == 1)):
            raise InvalidArgumentError("a measurable set needs a {0, 1}-valued indicator")

    @classmethod
    def from_members(cls, n_max: int, members: Any, *, label: str = "E") -> MeasurableSet:
        return cls(IntervalFunction.indicator(n_max, members), label=label)

    @property
    def n_max(self) -> int:
        return self.indicator.n_max

    @property
    def mask(self) -> npt.NDArray[np.bool_]:
        return self.indicator.values > 0.5

    def members(self) -> npt.NDArray[np.int64]:
        """Elements of the set, as integers in ``[1, N]``."""
        return np.flatnonzero(self.mask) + 1

    def __len__(self) -> int:
        return int(np.count_nonzero(self.mask))

    def witness_error(self, witness: StructureWitness) -> float:
        residual = self.indicator.values - witness.evaluate_on(self.n_max)
        return float(np.sqrt(np.mean(residual * residual)))

    def _record(self, target: float, witness: StructureWitness, width: float | None) -> WitnessRecord:
        record = WitnessRecord(target, witness, self.witness_error(witness), width)
        self.witnesses.append(record)
        return record

    def witness_for(
        self,
        target: float,
        *,
        config: RegularityConfig = DEFAULT_CONFIG,
    ) -> WitnessRecord:
        """A witness ``F(θn)`` with ``‖1_E - F(θ·)‖₂ <= target``.

        An already recorded witness meeting the target is reused. Level sets
        start from the ramp width ``target²/(4·M(t))`` clipped to the
        configured range, widen it while the target stays met and halve it
        otherwise.
        """
        if target <= 0:
            raise InvalidArgumentError(f"witness precision must be positive, got {target}")
        meeting = [rec for rec in self.witnesses if rec.achieved_l2_error <= target]
        if meeting:
            return min(meeting, key=lambda rec: rec.complexity)

        size = len(self)
        if size in (0, self.n_max):
            return self._record(target, StructureWitness.constant(1.0 if size else 0.0), None)
        if self.recipe is None:
            raise ApproximationError(
                f"set '{self.label}' has no level-set recipe", best_error=float("inf"), target=target
            )

        recipe = self.recipe

        def build(width: float) -> StructureWitness:
            return StructureWitness(recipe.theta, Ramp(recipe.threshold, width, recipe.phi))

        if recipe.maximal_value > 0:
            width = target * target / (4.0 * recipe.maximal_value)
        else:
            width = config.ramp_max
        width = float(np.clip(width, config.ramp_min, config.ramp_max))
        witness = build(width)
        error = self.witness_error(witness)

        if error <= target:
            while 2 * width <= config.ramp_max:
                wider = build(2 * width)
                wider_error = self.witness_error(wider)
                if wider_error > target:
                    break
                width, witness, error = 2 * width, wider, wider_error
        else:
            for _ in range(config.ramp_refinements):
                width /= 2
                witness = build(width)
                error = self.witness_error(witness)
                if error <= target:
                    break
            else:
                raise ApproximationError(
                    f"ramp witness for set '{self.label}' misses its precision", best_error=error, target=target
                )
        logger.debug("set %s: ramp width %.3g gives L2 error %.3g (target %.3g)", self.label, width, error, target)
        return self._record(target, witness, width)

    def growth_data(self) -> list[tuple[float, float]]:
        """Recorded ``(M, complexity)`` pairs with ``M = 1/target``."""
        return [(1.0 / rec.target_error, rec.complexity) for rec in self.witnesses]

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "n": self.n_max,
            "members": self.members().tolist(),
            "recipe": self.recipe.to_dict() if self.recipe else None,
            "witnesses": [rec.to_dict() for rec in self.witnesses],
        }


# ----------------------------------------------------------------------
# Correlating sets
# ----------------------------------------------------------------------
@dataclass(slots=True)
class CorrelatingSet:
    """Result of ``correlating_set``."""

    set: MeasurableSet
    achieved: float
    variant: Variant | None
    peak: FourierPeak | None
    threshold: float | None
    witness: WitnessRecord | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "achieved": self.achieved,
            "variant": self.variant,
            "threshold": self.threshold,
            "peak": self.peak.to_dict() if self.peak else None,
            "set": self.set.to_dict(),
        }


def threshold_grid(config: RegularityConfig = DEFAULT_CONFIG) -> npt.NDArray[np.float64]:
    """Midpoints ``(j - 1/2)/G`` of a uniform grid on ``(0, 1)``."""
    g = config.threshold_grid
    return (np.arange(1, g + 1, dtype=np.float64) - 0.5) / g


def level_set_correlations(
    f: IntervalFunction,
    phi_values: npt.NDArray[np.float64],
    thresholds: npt.NDArray[np.float64],
) -> npt.NDArray[np.float64]:
    """``|E_n f(n)·1[φ(n) >= t]|`` for each ``t``."""
    order = np.argsort(-phi_values, kind="stable")
    partial = np.concatenate(([0.0], np.cumsum(f.values[order])))
    ascending = np.sort(phi_values)
    counts = phi_values.shape[0] - np.searchsorted(ascending, thresholds, side="left")
    return np.abs(partial[counts]) / f.n_max


def correlating_set(
    f: IntervalFunction,
    delta: float,
    *,
    precision: float = 0.1,
    label: str = "E",
    config: RegularityConfig = DEFAULT_CONFIG,
) -> CorrelatingSet:
    """Find a level set ``E`` of a linear phase with ``|E_n f(n) 1_E(n)|`` large.

    The phase variant with the best correlation is kept, thresholds whose
    level set correlates at least half as well as the best are candidates,
    and the candidate with the smallest maximal function wins. A ramp witness
    of L² precision ``precision`` is recorded on the returned set.
    """
    _check_bounded(f, config)
    n = f.n_max
    peak = large_fourier_coefficient(f, delta, config=config)
    theta = TorusPoint((peak.theta,))
    points = theta.orbit(np.arange(1, n + 1))

    variant: Variant = PHASE_VARIANTS[0]
    phi_values = np.zeros(n)
    best_variant = -1.0
    for candidate in PHASE_VARIANTS:
        values = phase_expression(candidate).evaluate(points)
        value = abs(float(np.mean(f.values * values)))
        if value > best_variant:
            variant, phi_values, best_variant = candidate, values, value

    thresholds = threshold_grid(config)
    scores = level_set_correlations(f, phi_values, thresholds)
    best = float(np.max(scores))
    if best <= 0.0:
        empty = MeasurableSet(IntervalFunction.constant(n, 0.0, f.ambient_modulus), label=label)
        record = empty.witness_for(precision, config=config)
        logger.info("no level set correlates with f; returning the empty set")
        return CorrelatingSet(empty, 0.0, None, peak, None, record)

    good = np.flatnonzero(scores >= best / 2)
    profile = maximal_profile(np.sort(phi_values), thresholds[good], config=config)
    t = float(thresholds[good[int(np.argmin(profile))]])
    phi_function = IntervalFunction.from_values(phi_values, f.ambient_modulus)
    maximal = maximal_function(phi_function, t, config=config)

    indicator = IntervalFunction.from_values((phi_values >= t).astype(np.float64), f.ambient_modulus)
    recipe = LevelSetRecipe(theta, phase_expression(variant), t, maximal)
    level_set = MeasurableSet(indicator, recipe, label=label)
    record = level_set.witness_for(precision, config=config)
    achieved = abs(correlation(f, indicator))
    logger.info(
        "correlating set: theta=%s variant=%s t=%.5f |E|=%d achieved=%.4g",
        peak.theta, variant, t, len(level_set), achieved,
    )
    return CorrelatingSet(level_set, achieved, variant, peak, t, record)

