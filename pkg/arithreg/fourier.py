"""Fourier analysis on Z/MZ and the U² / L² norms on [N].

Functions on ``[N] = {1, ..., N}`` are embedded into ``Z/MZ`` (``M >= 2N``)
by zero extension. The Fourier transform is normalised as an average,
``f̂(r) = E_x f(x) e(-rx/M)``, so Parseval reads ``Σ|f̂|² = E|f|²``.
"""
from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
import numpy.typing as npt

from .config import DEFAULT_CONFIG, RegularityConfig
from .exceptions import ConsistencyError, InvalidArgumentError

logger = logging.getLogger("arithreg.fourier")

ArrayLike = npt.ArrayLike
Vector = npt.NDArray[Any]
U2Method = Literal["auto", "direct", "spectral"]


@dataclass(slots=True, frozen=True, eq=False)
class IntervalFunction:
    """A real or complex function on ``[N]`` with an ambient modulus ``M >= 2N``.

    ``values[i]`` holds ``f(i + 1)``.
    """

    n_max: int
    values: Vector
    ambient_modulus: int

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise InvalidArgumentError("n_max must be a positive integer")
        if self.values.ndim != 1 or self.values.shape[0] != self.n_max:
            raise InvalidArgumentError(
                f"expected {self.n_max} values, got shape {self.values.shape}"
            )
        if self.ambient_modulus < 2 * self.n_max:
            raise InvalidArgumentError(
                f"ambient modulus {self.ambient_modulus} is smaller than 2N = {2 * self.n_max}"
            )
        self.values.setflags(write=False)

    @classmethod
    def from_values(cls, values: ArrayLike, modulus: int | None = None) -> IntervalFunction:
        array = np.array(values)
        if array.size == 0:
            raise InvalidArgumentError("an interval function needs at least one value")
        if not np.iscomplexobj(array):
            array = array.astype(np.float64)
        else:
            array = array.astype(np.complex128)
        n = int(array.shape[0])
        return cls(n_max=n, values=array, ambient_modulus=modulus if modulus is not None else 2 * n)

    @classmethod
    def constant(cls, n_max: int, value: float, modulus: int | None = None) -> IntervalFunction:
        return cls.from_values(np.full(n_max, value, dtype=np.float64), modulus)

    @classmethod
    def indicator(cls, n_max: int, members: Iterable[int], modulus: int | None = None) -> IntervalFunction:
        values = np.zeros(n_max, dtype=np.float64)
        for n in members:
            if not 1 <= n <= n_max:
                raise InvalidArgumentError(f"{n} is not in [1, {n_max}]")
            values[n - 1] = 1.0
        return cls.from_values(values, modulus)

    @property
    def is_complex(self) -> bool:
        return bool(np.iscomplexobj(self.values))

    def with_modulus(self, modulus: int) -> IntervalFunction:
        return IntervalFunction(self.n_max, self.values.copy(), modulus)

    def embed(self, modulus: int | None = None) -> Vector:
        """Zero extension of ``f`` to ``Z/MZ``; position ``n`` holds ``f(n)``."""
        m = self.ambient_modulus if modulus is None else modulus
        if m < 2 * self.n_max:
            raise InvalidArgumentError(f"ambient modulus {m} is smaller than 2N = {2 * self.n_max}")
        out = np.zeros(m, dtype=self.values.dtype)
        out[1 : self.n_max + 1] = self.values
        return out

    def mean(self) -> complex | float:
        value = self.values.mean()
        return complex(value) if self.is_complex else float(value)

    def in_unit_range(self, tolerance: float = 0.0) -> bool:
        if self.is_complex:
            return False
        return bool(np.all(self.values >= -tolerance) and np.all(self.values <= 1 + tolerance))

    def _check_compatible(self, other: IntervalFunction) -> None:
        if other.n_max != self.n_max:
            raise InvalidArgumentError(
                f"length mismatch: {self.n_max} values against {other.n_max}"
            )

    def _combine(self, values: Vector, other: IntervalFunction | None = None) -> IntervalFunction:
        modulus = self.ambient_modulus
        if other is not None:
            modulus = max(modulus, other.ambient_modulus)
        return IntervalFunction.from_values(values, modulus)

    def __add__(self, other: IntervalFunction) -> IntervalFunction:
        self._check_compatible(other)
        return self._combine(self.values + other.values, other)

    def __sub__(self, other: IntervalFunction) -> IntervalFunction:
        self._check_compatible(other)
        return self._combine(self.values - other.values, other)

    def __mul__(self, scalar: float | complex) -> IntervalFunction:
        return self._combine(self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> IntervalFunction:
        return self._combine(-self.values)

    def __len__(self) -> int:
        return self.n_max

    def __repr__(self) -> str:
        return f"IntervalFunction(n_max={self.n_max}, ambient_modulus={self.ambient_modulus})"


@dataclass(slots=True, frozen=True, eq=False)
class Spectrum:
    """Fourier coefficients ``f̂(r)`` indexed by ``r`` in ``Z/MZ``."""

    modulus: int
    coeffs: Vector

    def __post_init__(self) -> None:
        if self.coeffs.shape != (self.modulus,):
            raise InvalidArgumentError(
                f"expected {self.modulus} coefficients, got shape {self.coeffs.shape}"
            )
        self.coeffs.setflags(write=False)

    def fourth_moment(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 4))

    def energy(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))


def _as_cyclic(f: ArrayLike) -> Vector:
    array = np.asarray(f)
    if array.ndim != 1 or array.size == 0:
        raise InvalidArgumentError("a cyclic function needs a non-empty one-dimensional array")
    return array.astype(np.complex128) if np.iscomplexobj(array) else array.astype(np.float64)


def dft(f: ArrayLike) -> Spectrum:
    """Normalised discrete Fourier transform of a function on ``Z/MZ``.

    Example:
        >>> dft([1.0, 0.0, 0.0, 0.0]).coeffs.real.tolist()
        [0.25, 0.25, 0.25, 0.25]
    """
    values = _as_cyclic(f)
    m = values.shape[0]
    return Spectrum(modulus=m, coeffs=np.fft.fft(values) / m)


def idft(spectrum: Spectrum) -> Vector:
    """Fourier inversion: ``f(x) = Σ_r f̂(r) e(rx/M)``."""
    return np.fft.ifft(np.asarray(spectrum.coeffs) * spectrum.modulus)


def _autoconvolution_energy(values: Vector) -> float:
    """``Σ_s |Σ_x f(x) f(s - x)|²``, the additive-quadruple count of ``f``."""
    m = values.shape[0]
    reflected = values[(-np.arange(m)) % m]
    total = 0.0
    for s in range(m):
        r_s = np.dot(values, np.roll(reflected, s))
        total += float(abs(r_s) ** 2)
    return total


def u2_fourth_power_cyclic(
    f: ArrayLike,
    *,
    method: U2Method = "auto",
    config: RegularityConfig = DEFAULT_CONFIG,
) -> float:
    """The average of ``f`` over additive quadruples of ``Z/MZ``.

    ``direct`` counts quadruples through the autoconvolution
    ``r(s) = Σ_x f(x) f(s - x)``; ``spectral`` uses ``Σ_r |f̂(r)|⁴``.
    ``auto`` picks ``direct`` up to ``config.direct_u2_limit``.
    """
    values = _as_cyclic(f)
    m = values.shape[0]
    if method == "auto":
        method = "direct" if m <= config.direct_u2_limit else "spectral"
    if method == "spectral":
        return dft(values).fourth_moment()
    if method != "direct":
        raise InvalidArgumentError(f"unknown U2 method '{method}'")

    radicand = _autoconvolution_energy(values) / m**3
    spectral = dft(values).fourth_moment()
    scale = max(1.0, float(np.max(np.abs(values))) ** 4)
    if radicand < -config.tolerance * scale:
        raise ConsistencyError(f"negative U2 radicand {radicand!r}")
    if abs(radicand - spectral) > config.tolerance * scale:
        raise ConsistencyError(
            f"direct U2 average {radicand!r} disagrees with spectral value {spectral!r}"
        )
    logger.debug("direct U2 average %.6g on Z/%dZ", radicand, m)
    return max(radicand, 0.0)


def u2_norm_cyclic(
    f: ArrayLike,
    *,
    method: U2Method = "auto",
    config: RegularityConfig = DEFAULT_CONFIG,
) -> float:
    """``‖f‖_{U²(Z/MZ)}``.

    Example:
        >>> round(u2_norm_cyclic([1.0] * 8), 12)
        1.0
    """
    return u2_fourth_power_cyclic(f, method=method, config=config) ** 0.25


def u2_norm_interval(
    f: IntervalFunction,
    *,
    method: U2Method = "auto",
    config: RegularityConfig = DEFAULT_CONFIG,
) -> float:
    """``‖f‖_{U²([N])}``: the ``Z/MZ`` norm of the zero extension, normalised by ``1_[N]``."""
    numerator = u2_fourth_power_cyclic(f.embed(), method=method, config=config)
    indicator = np.zeros(f.ambient_modulus)
    indicator[1 : f.n_max + 1] = 1.0
    denominator = u2_fourth_power_cyclic(indicator, method=method, config=config)
    return float((numerator / denominator) ** 0.25)


def l2_norm(f: IntervalFunction) -> float:
    """``(E_{x∈[N]} |f(x)|²)^{1/2}``."""
    return float(np.sqrt(np.mean(np.abs(f.values) ** 2)))


def correlation(f: IntervalFunction, g: IntervalFunction) -> complex:
    """``E_{n∈[N]} f(n) · conj g(n)``."""
    if f.n_max != g.n_max:
        raise InvalidArgumentError(f"length mismatch: {f.n_max} values against {g.n_max}")
    return complex(np.mean(f.values * np.conj(g.values)))


def fourier_correlations(f: IntervalFunction) -> Vector:
    """``E_{n∈[N]} f(n) e(-rn/M)`` for every ``r`` in ``Z/MZ``."""
    return np.fft.fft(f.embed()) / f.n_max
