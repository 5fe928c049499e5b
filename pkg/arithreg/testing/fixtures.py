"""Seeded function factories and pytest fixtures for arithreg tests."""
from __future__ import annotations

import json
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np

try:  # pragma: no cover - optional dependency
    import pytest
except ImportError:  # pragma: no cover - fixture module available only with pytest
    pytest = None  # type: ignore

from ..config import DEFAULT_CONFIG, RegularityConfig
from ..fourier import IntervalFunction


def random_function(n_max: int, seed: int, *, modulus: int | None = None) -> IntervalFunction:
    """Uniform values in ``[0, 1)`` from ``default_rng(seed)``."""
    rng = np.random.default_rng(seed)
    return IntervalFunction.from_values(rng.random(n_max), modulus)


def random_complex_function(n_max: int, seed: int, *, modulus: int | None = None) -> IntervalFunction:
    rng = np.random.default_rng(seed)
    return IntervalFunction.from_values(rng.normal(size=n_max) + 1j * rng.normal(size=n_max), modulus)


def planted_phase(
    n_max: int,
    r: int,
    *,
    amplitude: float,
    noise: float,
    seed: int,
    modulus: int | None = None,
) -> IntervalFunction:
    """``amplitude·cos(2πrn/M)`` plus uniform noise in ``[-noise, noise]``, clipped to ``[-1, 1]``."""
    m = modulus or 2 * n_max
    rng = np.random.default_rng(seed)
    ns = np.arange(1, n_max + 1)
    values = amplitude * np.cos(2 * np.pi * r * ns / m)
    values = values + rng.uniform(-noise, noise, size=n_max)
    return IntervalFunction.from_values(np.clip(values, -1.0, 1.0), m)


def function_payload(f: IntervalFunction) -> dict[str, Any]:
    return {"n": f.n_max, "m": f.ambient_modulus, "values": [float(v) for v in f.values]}


def json_writer(root: Path) -> Callable[[str, Any], Path]:
    """Return a helper that dumps payloads as JSON files under ``root``."""

    def write(name: str, payload: Any) -> Path:
        path = root / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return write


if pytest:  # pragma: no cover

    @pytest.fixture
    def config() -> RegularityConfig:
        return DEFAULT_CONFIG

    @pytest.fixture
    def rng() -> np.random.Generator:
        return np.random.default_rng(20240611)

    @pytest.fixture
    def write_json(tmp_path: Path) -> Callable[[str, Any], Path]:
        return json_writer(tmp_path)
