"""Configuration for arithreg computations.

Settings resolve in priority order: explicit keyword overrides, ``ARITHREG_*``
environment variables (a ``.env`` file is loaded first), a YAML configuration
file, then the defaults below.
"""
from __future__ import annotations

import os
from collections.abc import Mapping
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

import yaml
from dotenv import find_dotenv, load_dotenv

from .exceptions import ConfigNotFoundError, InvalidArgumentError
from .utils import environment_setting_name, resolve_env_reference

DEFAULT_CONFIG_FILENAMES = (
    "arithreg.yaml",
    "arithreg.yml",
    ".arithreg.yaml",
)


@dataclass(slots=True, frozen=True)
class RegularityConfig:
    """Numerical constants shared by every module.

    Attributes
    ----------
    tolerance:
        Absolute tolerance for norm identities (Parseval, spectral U², M-independence).
    direct_u2_limit:
        Largest modulus for which ``method="auto"`` counts quadruples directly;
        larger moduli use the spectral formula.
    exact_tolerance:
        Tolerance for identities that hold up to rounding only (Pythagoras,
        idempotence, the decomposition sum).
    threshold_grid:
        Number of level-set thresholds scanned in ``(0, 1)``.
    maximal_radii:
        Radii ``2**-1 .. 2**-maximal_radii`` used by the maximal function.
    maximal_cap:
        Ceiling applied to maximal-function values.
    ramp_min, ramp_max:
        Clip range of the ramp width chosen for level-set witnesses.
    ramp_refinements:
        How many times a ramp width may be halved below ``ramp_min`` while a
        witness misses its requested precision.
    gain_floor_divisor:
        Weak regularization stops once the energy gain drops below
        ``delta**4 / gain_floor_divisor``.
    enumeration_budget:
        Maximum number of integer vectors visited by an irrationality scan.
    fejer_torus_grid, fejer_interval_grid:
        Verification grid sizes per torus dimension and on ``[0, 1]``.
    fejer_max_degree:
        Largest truncation degree tried by Fejér approximation.
    fejer_sample_budget:
        Largest sampling grid (total points) used to estimate Fourier coefficients.
    quadrature_points:
        Midpoint-rule points per continuous dimension for integral estimates.
    inflation_c1, inflation_c2:
        Constants of the inflated growth chain ``F2(M) = F(c2*M**2)``,
        ``F1(M) = F2(c1*M**2)``.
    lipschitz_samples:
        Pairs sampled when spot-checking a witness Lipschitz bound.
    seed:
        Seed for the Lipschitz spot-check sampler.
    """

    tolerance: float = 1e-9
    direct_u2_limit: int = 8192
    exact_tolerance: float = 1e-12
    threshold_grid: int = 1024
    maximal_radii: int = 12
    maximal_cap: float = 4096.0
    ramp_min: float = 2.0**-12
    ramp_max: float = 0.25
    ramp_refinements: int = 48
    gain_floor_divisor: float = 1024.0
    enumeration_budget: int = 2_000_000
    fejer_torus_grid: int = 64
    fejer_interval_grid: int = 128
    fejer_max_degree: int = 64
    fejer_sample_budget: int = 2**22
    quadrature_points: int = 256
    inflation_c1: int = 16
    inflation_c2: int = 16
    lipschitz_samples: int = 256
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tolerance <= 0 or self.exact_tolerance <= 0:
            raise InvalidArgumentError("tolerances must be positive")
        if self.threshold_grid < 1 or self.maximal_radii < 1:
            raise InvalidArgumentError("threshold_grid and maximal_radii must be positive")
        if not 0 < self.ramp_min <= self.ramp_max:
            raise InvalidArgumentError("ramp clip range must satisfy 0 < ramp_min <= ramp_max")
        if self.enumeration_budget < 1:
            raise InvalidArgumentError("enumeration_budget must be positive")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> RegularityConfig:
        known = {f.name: f for f in fields(cls)}
        values: dict[str, Any] = {}
        for key, raw in data.items():
            name = key.replace("-", "_")
            if name not in known:
                raise InvalidArgumentError(f"Unknown configuration key '{key}'")
            resolved = resolve_env_reference(raw)
            if resolved is not None:
                values[name] = _coerce(name, resolved)
        return cls(**values)

    def with_overrides(self, **overrides: Any) -> RegularityConfig:
        present = {key: value for key, value in overrides.items() if value is not None}
        return replace(self, **present)

    def gain_floor(self, delta: float) -> float:
        return delta**4 / self.gain_floor_divisor


DEFAULT_CONFIG = RegularityConfig()


def _coerce(name: str, value: Any) -> Any:
    default = getattr(DEFAULT_CONFIG, name)
    try:
        if isinstance(default, int):
            return int(value)
        return float(value)
    except (TypeError, ValueError) as err:
        raise InvalidArgumentError(f"Invalid value {value!r} for setting '{name}'") from err


def load_config(path: str | Path | None = None, **overrides: Any) -> RegularityConfig:
    """Resolve a configuration from file, environment and explicit overrides."""
    load_dotenv(find_dotenv(usecwd=True))
    settings: dict[str, Any] = {}

    candidate = _find_config_file(path)
    if candidate is not None:
        settings.update(_load_yaml(candidate))

    for f in fields(RegularityConfig):
        env_value = os.getenv(environment_setting_name(f.name))
        if env_value is not None:
            settings[f.name] = env_value

    config = RegularityConfig.from_mapping(settings)
    return config.with_overrides(**overrides)


def _find_config_file(path: str | Path | None) -> Path | None:
    if path:
        candidate = Path(path)
        if not candidate.is_file():
            raise ConfigNotFoundError(f"Config file not found at {candidate}")
        return candidate
    for name in DEFAULT_CONFIG_FILENAMES:
        guess = Path(name)
        if guess.is_file():
            return guess
    return None


def _load_yaml(path: Path) -> dict[str, Any]:
    content = path.read_text(encoding="utf-8")
    payload = yaml.safe_load(content)
    if not isinstance(payload, dict):
        return {}
    section = payload.get("arithreg", payload)
    return dict(section) if isinstance(section, dict) else {}
