"""Factors of ``[N]``, conditional expectation and weak regularity.

A factor is a partition of ``[N]`` into nonempty cells. Cells are labelled
``0, 1, ...`` in the order of their smallest member. Factors grown from the
trivial factor by joining measurable sets are *generated*: every cell is an
atom of the generating sets, so its indicator is a product of generator
witnesses and their complements.
"""
from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
import numpy.typing as npt

from .config import DEFAULT_CONFIG, RegularityConfig
from .exceptions import ConsistencyError, InvalidArgumentError, WeakRegularityError
from .fourier import IntervalFunction, u2_norm_interval
from .inverse import CorrelatingSet, MeasurableSet, correlating_set
from .telemetry import NULL_REPORTER, TelemetryReporter

logger = logging.getLogger("arithreg.factors")

Labels = npt.NDArray[np.int64]


def _canonical_labels(raw: npt.ArrayLike) -> Labels:
    """Relabel so that cells are numbered by their smallest member."""
    _, first, inverse = np.unique(np.asarray(raw), return_index=True, return_inverse=True)
    rank = np.empty(first.shape[0], dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.shape[0])
    return rank[inverse.reshape(-1)]


@dataclass(slots=True, frozen=True)
class Cell:
    label: int
    members: npt.NDArray[np.int64]

    def __len__(self) -> int:
        return int(self.members.shape[0])


@dataclass(slots=True, frozen=True, eq=False)
class Factor:
    """A partition of ``[N]``; ``labels[n - 1]`` is the cell of ``n``."""

    n_max: int
    labels: Labels
    generators: tuple[MeasurableSet, ...] = ()
    generated: bool = False

    def __post_init__(self) -> None:
        if self.labels.shape != (self.n_max,):
            raise InvalidArgumentError(f"expected {self.n_max} cell labels, got shape {self.labels.shape}")
        counts = np.bincount(self.labels)
        if counts.size and np.any(counts == 0):
            raise InvalidArgumentError("factor has an empty cell")
        self.labels.setflags(write=False)

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------
    @classmethod
    def trivial(cls, n_max: int) -> Factor:
        return cls(n_max, np.zeros(n_max, dtype=np.int64), (), True)

    @classmethod
    def discrete(cls, n_max: int) -> Factor:
        return cls(n_max, np.arange(n_max, dtype=np.int64))

    @classmethod
    def from_cells(cls, n_max: int, cells: Iterable[Iterable[int]]) -> Factor:
        """Build a factor from explicit member lists, which must partition ``[N]``."""
        raw = np.full(n_max, -1, dtype=np.int64)
        for index, cell in enumerate(cells):
            members = [int(n) for n in cell]
            if not members:
                raise InvalidArgumentError(f"cell {index} is empty")
            for n in members:
                if not 1 <= n <= n_max:
                    raise InvalidArgumentError(f"cell member {n} is not in [1, {n_max}]")
                if raw[n - 1] >= 0:
                    raise InvalidArgumentError(f"{n} belongs to two cells")
                raw[n - 1] = index
        missing = np.flatnonzero(raw < 0)
        if missing.size:
            raise InvalidArgumentError(f"cells do not cover {int(missing[0]) + 1}")
        labels = _canonical_labels(raw)
        return cls(n_max, labels, (), generated=int(labels.max()) == 0)

    # ------------------------------------------------------------------
    # Structure
    # ------------------------------------------------------------------
    @property
    def complexity(self) -> int:
        return int(self.labels.max()) + 1

    def __len__(self) -> int:
        return self.complexity

    @property
    def cells(self) -> list[Cell]:
        order = np.argsort(self.labels, kind="stable")
        bounds = np.cumsum(np.bincount(self.labels, minlength=self.complexity))
        groups = np.split(order + 1, bounds[:-1])
        return [Cell(label, members) for label, members in enumerate(groups)]

    def sizes(self) -> npt.NDArray[np.int64]:
        return np.bincount(self.labels, minlength=self.complexity)

    def refines(self, other: Factor) -> bool:
        """Whether every cell of ``other`` is a union of cells of this factor."""
        if other.n_max != self.n_max:
            raise InvalidArgumentError(f"length mismatch: {self.n_max} against {other.n_max}")
        pairs = np.unique(self.labels * other.complexity + other.labels)
        return int(pairs.shape[0]) == self.complexity

    def same_partition(self, other: Factor) -> bool:
        return self.refines(other) and other.refines(self)

    def signature(self, label: int) -> tuple[bool, ...]:
        """Membership of a cell in each generator."""
        if not 0 <= label < self.complexity:
            raise InvalidArgumentError(f"no cell labelled {label}")
        representative = int(np.flatnonzero(self.labels == label)[0])
        return tuple(bool(gen.mask[representative]) for gen in self.generators)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n_max,
            "cells": [cell.members.tolist() for cell in self.cells],
            "generators": [gen.label for gen in self.generators],
        }

    @classmethod
    def from_dict(
        cls,
        payload: Mapping[str, Any],
        generators: Mapping[str, MeasurableSet] | None = None,
    ) -> Factor:
        n_max = int(payload["n"])
        factor = cls.from_cells(n_max, payload["cells"])
        ids = list(payload.get("generators", []))
        if not ids:
            return factor
        known = generators or {}
        unknown = [gid for gid in ids if gid not in known]
        if unknown:
            raise InvalidArgumentError(f"unknown generator ids: {', '.join(map(str, unknown))}")
        return cls(n_max, factor.labels.copy(), tuple(known[gid] for gid in ids), False)


# ----------------------------------------------------------------------
# Projections
# ----------------------------------------------------------------------
def _check_length(f: IntervalFunction, b: Factor) -> None:
    if f.n_max != b.n_max:
        raise InvalidArgumentError(f"function on [{f.n_max}] against a factor of [{b.n_max}]")


def _cell_means(values: npt.NDArray[Any], b: Factor) -> npt.NDArray[Any]:
    counts = b.sizes()
    if np.iscomplexobj(values):
        real = np.bincount(b.labels, weights=values.real, minlength=b.complexity)
        imag = np.bincount(b.labels, weights=values.imag, minlength=b.complexity)
        return (real + 1j * imag) / counts
    return np.bincount(b.labels, weights=values, minlength=b.complexity) / counts


def cell_averages(f: IntervalFunction, b: Factor) -> npt.NDArray[Any]:
    """The average of ``f`` on each cell, indexed by label."""
    _check_length(f, b)
    return _cell_means(f.values, b)


def conditional_expectation(f: IntervalFunction, b: Factor) -> IntervalFunction:
    """``E(f|B)``: the cell average of ``f`` at every point.

    Example:
        >>> f = IntervalFunction.from_values([0, 1, 1, 1])
        >>> conditional_expectation(f, Factor.from_cells(4, [[1, 2], [3, 4]])).values.tolist()
        [0.5, 0.5, 1.0, 1.0]
    """
    means = cell_averages(f, b)
    return IntervalFunction.from_values(means[b.labels], f.ambient_modulus)


def energy(f: IntervalFunction, b: Factor) -> float:
    """``‖E(f|B)‖₂²``."""
    means = cell_averages(f, b)
    return float(np.sum(b.sizes() * np.abs(means) ** 2) / b.n_max)


def join(b: Factor, e: MeasurableSet) -> Factor:
    """The factor generated by ``B`` and ``E``; empty intersections are dropped."""
    if e.n_max != b.n_max:
        raise InvalidArgumentError(f"set in [{e.n_max}] against a factor of [{b.n_max}]")
    raw = b.labels * 2 + e.mask.astype(np.int64)
    return Factor(b.n_max, _canonical_labels(raw), b.generators + (e,), b.generated)


# ----------------------------------------------------------------------
# Energy increment and weak regularity
# ----------------------------------------------------------------------
@dataclass(slots=True)
class IncrementStep:
    """A productive energy-increment step."""

    factor: Factor
    gain: float
    u2_before: float
    found: CorrelatingSet


def energy_increment_step(
    f: IntervalFunction,
    b: Factor,
    delta: float,
    *,
    precision: float = 0.1,
    config: RegularityConfig = DEFAULT_CONFIG,
) -> IncrementStep | None:
    """Refine ``b`` by a set correlating with ``f - E(f|B)``, or ``None`` if that is ``delta``-uniform."""
    _check_length(f, b)
    if delta <= 0:
        raise InvalidArgumentError(f"delta must be positive, got {delta}")
    projection = conditional_expectation(f, b)
    residual = f - projection
    u2 = u2_norm_interval(residual, method="spectral", config=config)
    if u2 < delta:
        return None

    scale = max(1.0, float(np.max(np.abs(residual.values))))
    found = correlating_set(
        residual * (1.0 / scale),
        delta,
        precision=precision,
        label=f"E{len(b.generators) + 1}",
        config=config,
    )
    refined = join(b, found.set)
    gain = energy(f, refined) - energy(f, b)
    difference = conditional_expectation(f, refined) - projection
    pythagoras = float(np.mean(np.abs(difference.values) ** 2))
    if abs(gain - pythagoras) > config.exact_tolerance:
        raise ConsistencyError(f"energy gain {gain!r} differs from ‖E(f|B') - E(f|B)‖² = {pythagoras!r}")
    logger.debug("energy step: U2=%.4g, %d -> %d cells, gain %.4g", u2, b.complexity, refined.complexity, gain)
    return IncrementStep(refined, gain, u2, found)


StopReason = Literal["uniform", "gain_floor"]


@dataclass(slots=True)
class WeakRegularization:
    """Outcome of ``weak_regularize`` with its trajectories."""

    factor: Factor
    delta: float
    stop_reason: StopReason
    energies: list[float] = field(default_factory=list)
    u2_norms: list[float] = field(default_factory=list)
    gains: list[float] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.gains)

    @property
    def final_u2(self) -> float:
        return self.u2_norms[-1]

    def to_dict(self) -> dict[str, Any]:
        return {
            "delta": self.delta,
            "stop_reason": self.stop_reason,
            "steps": self.steps,
            "energies": self.energies,
            "u2_norms": self.u2_norms,
            "complexity": self.factor.complexity,
        }


def weak_regularize(
    f: IntervalFunction,
    b0: Factor,
    delta: float,
    max_steps: int | None = None,
    *,
    precision: float = 0.1,
    config: RegularityConfig = DEFAULT_CONFIG,
    reporter: TelemetryReporter = NULL_REPORTER,
) -> WeakRegularization:
    """Iterate energy increments until ``‖f - E(f|B)‖_{U²} <= delta``.

    The loop also stops once a step gains less than ``delta**4 / 1024`` (the
    configured floor); that step is discarded. Exhausting ``max_steps``
    (default ``N + 1``) raises ``WeakRegularityError``.
    """
    _check_length(f, b0)
    steps_allowed = f.n_max + 1 if max_steps is None else max_steps
    floor = config.gain_floor(delta)
    factor = b0
    energies = [energy(f, b0)]
    u2_norms: list[float] = []
    gains: list[float] = []

    while True:
        residual = f - conditional_expectation(f, factor)
        u2 = u2_norm_interval(residual, method="spectral", config=config)
        u2_norms.append(u2)
        if u2 <= delta:
            reason: StopReason = "uniform"
            break
        if len(gains) >= steps_allowed:
            logger.warning("weak regularization hit max_steps=%d with U2=%.4g", steps_allowed, u2)
            raise WeakRegularityError(steps_allowed, energies, u2_norms)

        with reporter.span("weak_regularize.step", step=len(gains), u2=u2, cells=factor.complexity) as span:
            step = energy_increment_step(f, factor, delta, precision=precision, config=config)
            gain = step.gain if step is not None else 0.0
            span["gain"] = gain
        if step is None or gain < floor:
            reason = "gain_floor"
            break
        factor = step.factor
        gains.append(gain)
        energies.append(energy(f, factor))
        if energies[-1] <= energies[-2]:
            raise ConsistencyError("energy trajectory failed to increase")

    logger.info(
        "weak regularization at delta=%.4g: %d steps, %d cells, stop=%s",
        delta, len(gains), factor.complexity, reason,
    )
    return WeakRegularization(factor, delta, reason, energies, u2_norms, gains)

