"""Counting lemmas: averages of Lipschitz functions along ``θn``.

For ``θ`` that is ``(A, N)``-irrational, averages of ``F(θn)`` over long
progressions are close to ``∫F``; the same holds for ``F(n/N, n mod q, θn)``
against the product measure on ``[0, 1] × Z/qZ × T^d``. The proofs go through
trigonometric approximation and geometric sums, and both are exposed here as
diagnostics with computed bounds.
"""
from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Literal, Protocol

import numpy as np
import numpy.typing as npt

from .config import DEFAULT_CONFIG, RegularityConfig
from .diophantine import TorusPoint, find_irrational_point, torus_norm
from .exceptions import ApproximationError, InvalidArgumentError

logger = logging.getLogger("arithreg.counting")

Points = npt.NDArray[np.float64]
ComplexValues = npt.NDArray[np.complex128]
TorusEvaluator = Callable[[Points], npt.NDArray[Any]]

TWO_PI = 2.0 * math.pi
COEFFICIENT_FLOOR = 1e-15


class StructuredEvaluator(Protocol):
    def __call__(self, x: Points, y: npt.NDArray[np.int64], z: Points) -> npt.NDArray[Any]: ...


# ----------------------------------------------------------------------
# Trigonometric polynomials
# ----------------------------------------------------------------------
@dataclass(slots=True, frozen=True)
class TrigPolynomial:
    """``Σ_m c_m e(m·x)`` on ``T^d``; terms are sorted by frequency."""

    dim: int
    terms: tuple[tuple[tuple[int, ...], complex], ...]

    def __post_init__(self) -> None:
        for m, _ in self.terms:
            if len(m) != self.dim:
                raise InvalidArgumentError(f"frequency {m} does not live in Z^{self.dim}")

    @classmethod
    def from_terms(cls, dim: int, terms: Mapping[tuple[int, ...], complex]) -> TrigPolynomial:
        merged: dict[tuple[int, ...], complex] = {}
        for m, c in terms.items():
            key = tuple(int(v) for v in m)
            merged[key] = merged.get(key, 0j) + complex(c)
        kept = tuple(sorted((m, c) for m, c in merged.items() if abs(c) >= COEFFICIENT_FLOOR))
        return cls(dim, kept)

    @classmethod
    def constant(cls, dim: int, value: complex) -> TrigPolynomial:
        return cls.from_terms(dim, {(0,) * dim: value})

    @property
    def coefficients(self) -> dict[tuple[int, ...], complex]:
        return dict(self.terms)

    @property
    def constant_term(self) -> complex:
        return self.coefficients.get((0,) * self.dim, 0j)

    @property
    def degree(self) -> int:
        return max((sum(abs(v) for v in m) for m, _ in self.terms), default=0)

    @property
    def lipschitz_bound(self) -> float:
        """``Σ |c_m| (1 + 2π‖m‖₂)``, a bound on ``sup|F| + Lip(F)``."""
        return float(sum(abs(c) * (1 + TWO_PI * math.hypot(*m)) for m, c in self.terms))

    def nonconstant(self) -> list[tuple[tuple[int, ...], complex]]:
        return [(m, c) for m, c in self.terms if any(m)]

    def evaluate(self, points: npt.ArrayLike) -> ComplexValues:
        pts = np.asarray(points, dtype=np.float64).reshape(-1, self.dim)
        if not self.terms:
            return np.zeros(pts.shape[0], dtype=np.complex128)
        freqs = np.array([m for m, _ in self.terms], dtype=np.float64).reshape(-1, self.dim)
        coeffs = np.array([c for _, c in self.terms], dtype=np.complex128)
        return np.exp(1j * TWO_PI * (pts @ freqs.T)) @ coeffs

    __call__ = evaluate

    def to_dict(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "terms": [{"m": list(m), "re": c.real, "im": c.imag} for m, c in self.terms],
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> TrigPolynomial:
        dim = int(payload["dim"])
        terms: dict[tuple[int, ...], complex] = {}
        for term in payload["terms"]:
            key = tuple(int(v) for v in term["m"])
            terms[key] = terms.get(key, 0j) + complex(float(term["re"]), float(term.get("im", 0.0)))
        return cls.from_terms(dim, terms)


def l1_frequencies(dim: int, degree: int) -> list[tuple[int, ...]]:
    """All ``m ∈ Z^d`` with ``‖m‖₁ <= degree``, in lexicographic order."""
    span = range(-degree, degree + 1)
    return [m for m in itertools.product(span, repeat=dim) if sum(abs(v) for v in m) <= degree]


def random_trig_polynomial(dim: int, degree: int, lipschitz: float, seed: int) -> TrigPolynomial:
    """Seeded polynomial of degree ``<= degree`` whose Lipschitz bound equals ``lipschitz``."""
    if dim < 1 or degree < 0 or lipschitz <= 0:
        raise InvalidArgumentError("need dim >= 1, degree >= 0 and a positive Lipschitz target")
    rng = np.random.default_rng(seed)
    freqs = l1_frequencies(dim, degree)
    raw = rng.normal(size=len(freqs)) + 1j * rng.normal(size=len(freqs))
    weights = np.array([1.0 / (1.0 + sum(v * v for v in m)) for m in freqs])
    poly = TrigPolynomial.from_terms(dim, dict(zip(freqs, raw * weights, strict=True)))
    scale = lipschitz / poly.lipschitz_bound
    return TrigPolynomial.from_terms(dim, {m: c * scale for m, c in poly.terms})


def _phase_integral(k: int) -> complex:
    """``∫₀¹ e(kx/2) dx``."""
    if k == 0:
        return 1.0 + 0j
    return ((-1) ** k - 1) / (1j * math.pi * k)


StructuredKey = tuple[int, int, tuple[int, ...]]


@dataclass(slots=True, frozen=True)
class ProductTrigPolynomial:
    """``Σ c_{k,a,m} e(kx/2 + ay/q + m·z)`` on ``[0, 1] × Z/qZ × T^d``."""

    q: int
    dim: int
    terms: tuple[tuple[StructuredKey, complex], ...]

    @classmethod
    def from_terms(cls, q: int, dim: int, terms: Mapping[StructuredKey, complex]) -> ProductTrigPolynomial:
        if q < 1:
            raise InvalidArgumentError(f"q must be positive, got {q}")
        kept = tuple(
            sorted(((int(k), int(a) % q, tuple(m)), complex(c)) for (k, a, m), c in terms.items() if abs(c) >= COEFFICIENT_FLOOR)
        )
        return cls(q, dim, kept)

    @property
    def coefficients(self) -> dict[StructuredKey, complex]:
        return dict(self.terms)

    def integral(self) -> complex:
        """``∫ P dμ`` for Lebesgue × uniform × Haar."""
        total = 0j
        for (k, a, m), c in self.terms:
            if a == 0 and not any(m):
                total += c * _phase_integral(k)
        return total

    def evaluate(self, x: npt.ArrayLike, y: npt.ArrayLike, z: npt.ArrayLike) -> ComplexValues:
        xs = np.asarray(x, dtype=np.float64).reshape(-1)
        ys = np.asarray(y, dtype=np.int64).reshape(-1)
        zs = np.asarray(z, dtype=np.float64).reshape(xs.shape[0], self.dim)
        out = np.zeros(xs.shape[0], dtype=np.complex128)
        for (k, a, m), c in self.terms:
            phase = k * xs / 2 + (a * ys % self.q) / self.q
            if self.dim:
                phase = phase + zs @ np.asarray(m, dtype=np.float64)
            out += c * np.exp(1j * TWO_PI * phase)
        return out

    __call__ = evaluate

    def to_dict(self) -> dict[str, Any]:
        return {
            "q": self.q,
            "dim": self.dim,
            "terms": [
                {"k": k, "a": a, "m": list(m), "re": c.real, "im": c.imag} for (k, a, m), c in self.terms
            ],
        }


# ----------------------------------------------------------------------
# Fejér approximation
# ----------------------------------------------------------------------
ApproximationKind = Literal["truncation", "fejer"]


@dataclass(slots=True)
class FejerApproximation:
    polynomial: TrigPolynomial | ProductTrigPolynomial
    degree: int
    grid_error: float
    kind: ApproximationKind

    def to_dict(self) -> dict[str, Any]:
        return {
            "degree": self.degree,
            "grid_error": self.grid_error,
            "kind": self.kind,
            "polynomial": self.polynomial.to_dict(),
        }


def _degrees(limit: int) -> list[int]:
    out = [0]
    m0 = 1
    while m0 <= limit:
        out.append(m0)
        m0 *= 2
    return out


def _grid_size(base: int, m0: int) -> int:
    size = base
    while size < 2 * m0 + 2:
        size *= 2
    return size


def _fejer_weights(freqs: Sequence[npt.NDArray[np.int64]], m0: int) -> npt.NDArray[np.float64]:
    weights = np.ones(freqs[0].shape)
    for f in freqs:
        weights = weights * np.clip(1.0 - np.abs(f) / (m0 + 1), 0.0, None)
    return weights


def _shifted_values(coeffs: ComplexValues, shifts: Sequence[float]) -> ComplexValues:
    """Values of a dense coefficient array on the grid shifted by ``shifts`` (in grid steps)."""
    phase = np.zeros(coeffs.shape)
    for axis, shift in enumerate(shifts):
        if shift:
            size = coeffs.shape[axis]
            index = np.fft.fftfreq(size, d=1.0 / size)
            shape = [1] * coeffs.ndim
            shape[axis] = size
            phase = phase + (index * shift / size).reshape(shape)
    return np.fft.ifftn(coeffs * np.exp(1j * TWO_PI * phase)) * coeffs.size


def _fit(
    samples: ComplexValues,
    truth: npt.NDArray[Any],
    masks: Callable[[int], list[tuple[ApproximationKind, npt.NDArray[np.float64]]]],
    m0: int,
    shifts: Sequence[float],
    delta: float,
) -> tuple[ApproximationKind, ComplexValues, float] | tuple[None, None, float]:
    spectrum = np.fft.fftn(samples) / samples.size
    best = math.inf
    for kind, weights in masks(m0):
        coeffs = spectrum * weights
        error = float(np.max(np.abs(truth - _shifted_values(coeffs, shifts))))
        if error <= delta / 2:
            return kind, coeffs, error
        best = min(best, error)
    return None, None, best


def fejer_truncate(
    func: TorusEvaluator,
    delta: float,
    *,
    dim: int = 1,
    config: RegularityConfig = DEFAULT_CONFIG,
) -> FejerApproximation:
    """A trigonometric polynomial within ``delta/2`` of ``func`` on a verification grid.

    Degrees ``0, 1, 2, 4, ...`` are tried in turn; at each degree the plain
    truncation of the sampled Fourier series is tried before the Fejér mean.
    """
    if delta <= 0:
        raise InvalidArgumentError(f"delta must be positive, got {delta}")
    if dim < 1:
        raise InvalidArgumentError(f"torus dimension must be positive, got {dim}")
    best = math.inf
    cache: dict[int, tuple[ComplexValues, npt.NDArray[Any]]] = {}

    for m0 in _degrees(config.fejer_max_degree):
        size = _grid_size(config.fejer_torus_grid, m0)
        if size**dim > config.fejer_sample_budget:
            break
        if size not in cache:
            axis = np.arange(size) / size
            grid = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
            samples = np.asarray(func(grid), dtype=np.complex128).reshape((size,) * dim)
            truth = np.asarray(func((grid + 0.5 / size) % 1.0)).reshape((size,) * dim)
            cache[size] = (samples, truth)
        samples, truth = cache[size]
        freqs = np.meshgrid(*([np.fft.fftfreq(size, d=1.0 / size).astype(np.int64)] * dim), indexing="ij")

        def masks(m0: int, freqs: list[npt.NDArray[np.int64]] = freqs) -> list[tuple[ApproximationKind, npt.NDArray[np.float64]]]:
            l1 = sum(np.abs(f) for f in freqs)
            return [("truncation", (l1 <= m0).astype(np.float64)), ("fejer", _fejer_weights(freqs, m0))]

        kind, coeffs, error = _fit(samples, truth, masks, m0, [0.5] * dim, delta)
        best = min(best, error)
        if kind is not None and coeffs is not None:
            keep = np.abs(coeffs) >= COEFFICIENT_FLOOR
            terms = {
                tuple(int(f[idx]) for f in freqs): complex(coeffs[idx]) for idx in zip(*np.nonzero(keep), strict=True)
            }
            poly = TrigPolynomial.from_terms(dim, terms)
            logger.debug("fejer_truncate: %s at degree %d, grid error %.3g", kind, m0, error)
            return FejerApproximation(poly, poly.degree, error, kind)

    raise ApproximationError("trigonometric approximation budget exhausted", best_error=best, target=delta / 2)


def fejer_truncate_structured(
    func: StructuredEvaluator,
    q: int,
    delta: float,
    *,
    dim: int = 0,
    config: RegularityConfig = DEFAULT_CONFIG,
) -> FejerApproximation:
    """Approximate ``func`` on ``[0, 1] × Z/qZ × T^d`` by a ``ProductTrigPolynomial``.

    The first coordinate is reflected, ``F(-x, y, z) = F(x, y, z)``, so that
    ``[-1, 1)`` becomes a circle carrying the frequencies ``k/2``.
    """
    if q < 1:
        raise InvalidArgumentError(f"q must be positive, got {q}")
    if delta <= 0:
        raise InvalidArgumentError(f"delta must be positive, got {delta}")
    best = math.inf

    for m0 in _degrees(config.fejer_max_degree):
        sx = _grid_size(2 * config.fejer_interval_grid, m0)
        sz = _grid_size(config.fejer_torus_grid, m0)
        shape = (sx, q) + (sz,) * dim
        if math.prod(shape) > config.fejer_sample_budget:
            break
        axes = [np.arange(sx) * (2.0 / sx) - 1.0, np.arange(q)] + [np.arange(sz) / sz] * dim
        mesh = np.meshgrid(*axes, indexing="ij")
        u, y = mesh[0].reshape(-1), mesh[1].reshape(-1).astype(np.int64)
        z = np.stack([g.reshape(-1) for g in mesh[2:]], axis=-1) if dim else np.zeros((u.shape[0], 0))
        samples = np.asarray(func(np.abs(u), y, z), dtype=np.complex128).reshape(shape)
        u_shift = u + 1.0 / sx
        z_shift = (z + 0.5 / sz) % 1.0
        truth = np.asarray(func(np.abs(u_shift), y, z_shift)).reshape(shape)

        signed = [np.fft.fftfreq(sx, d=1.0 / sx).astype(np.int64), np.arange(q)] + [
            np.fft.fftfreq(sz, d=1.0 / sz).astype(np.int64)
        ] * dim
        freqs = np.meshgrid(*signed, indexing="ij")
        continuous = [freqs[0]] + list(freqs[2:])

        def masks(m0: int, continuous: list[npt.NDArray[np.int64]] = continuous) -> list[tuple[ApproximationKind, npt.NDArray[np.float64]]]:
            l1 = sum(np.abs(f) for f in continuous)
            return [("truncation", (l1 <= m0).astype(np.float64)), ("fejer", _fejer_weights(continuous, m0))]

        kind, coeffs, error = _fit(samples, truth, masks, m0, [0.5, 0.0] + [0.5] * dim, delta)
        best = min(best, error)
        if kind is not None and coeffs is not None:
            terms: dict[StructuredKey, complex] = {}
            for idx in zip(*np.nonzero(np.abs(coeffs) >= COEFFICIENT_FLOOR), strict=True):
                k = int(freqs[0][idx])
                # Sampling started at x = -1, which contributes e(k/2) = (-1)^k.
                value = complex(coeffs[idx]) * (-1) ** (k % 2)
                terms[(k, int(freqs[1][idx]), tuple(int(f[idx]) for f in freqs[2:]))] = value
            poly = ProductTrigPolynomial.from_terms(q, dim, terms)
            logger.debug("fejer_truncate_structured: %s at degree %d, grid error %.3g", kind, m0, error)
            return FejerApproximation(poly, m0, error, kind)

    raise ApproximationError("structured approximation budget exhausted", best_error=best, target=delta / 2)


# ----------------------------------------------------------------------
# Progressions and geometric sums
# ----------------------------------------------------------------------
@dataclass(slots=True, frozen=True)
class Progression:
    start: int
    step: int
    length: int

    def __post_init__(self) -> None:
        if self.length < 1:
            raise InvalidArgumentError("a progression needs at least one element")
        if self.step < 1:
            raise InvalidArgumentError(f"progression step must be positive, got {self.step}")

    @classmethod
    def interval(cls, n_max: int) -> Progression:
        return cls(1, 1, n_max)

    @property
    def last(self) -> int:
        return self.start + self.step * (self.length - 1)

    def elements(self) -> npt.NDArray[np.int64]:
        return self.start + self.step * np.arange(self.length, dtype=np.int64)

    def within(self, n_max: int) -> bool:
        return self.start >= 1 and self.last <= n_max

    def to_dict(self) -> dict[str, int]:
        return {"start": self.start, "step": self.step, "length": self.length}

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> Progression:
        return cls(int(payload["start"]), int(payload["step"]), int(payload["length"]))


def progression_average(
    func: TorusEvaluator,
    theta: TorusPoint,
    progression: Progression,
    *,
    n_max: int | None = None,
) -> complex:
    """``E_{n∈P} F(θn)`` by direct summation."""
    if n_max is not None and not progression.within(n_max):
        raise InvalidArgumentError(f"progression {progression.to_dict()} is not contained in [1, {n_max}]")
    points = theta.orbit(progression.elements())
    return complex(np.mean(np.asarray(func(points))))


@dataclass(slots=True)
class TermBound:
    frequency: tuple[int, ...]
    magnitude: float
    distance: float
    bound: float
    observed: float | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "m": list(self.frequency),
            "abs_c": self.magnitude,
            "distance": self.distance,
            "bound": self.bound,
            "observed": self.observed,
        }


@dataclass(slots=True)
class ProgressionDiagnostic:
    """Measured error of a progression average against the geometric-sum bounds."""

    average: complex
    integral: complex
    terms: list[TermBound]
    geometric_bound: float
    lemma_bound: float | None
    preconditions: dict[str, bool] = field(default_factory=dict)

    @property
    def error(self) -> float:
        return abs(self.average - self.integral)

    @property
    def within_bound(self) -> bool:
        return self.error <= self.geometric_bound + 1e-12

    def to_dict(self) -> dict[str, Any]:
        return {
            "average": [self.average.real, self.average.imag],
            "integral": [self.integral.real, self.integral.imag],
            "error": self.error,
            "geometric_bound": self.geometric_bound,
            "lemma_bound": self.lemma_bound,
            "preconditions": self.preconditions,
            "terms": [term.to_dict() for term in self.terms],
        }


def geometric_sum_bounds(
    poly: TrigPolynomial,
    theta: TorusPoint,
    progression: Progression,
    *,
    n_max: int,
    a_param: int | None = None,
) -> ProgressionDiagnostic:
    """Bound ``|E_{n∈P} P(θn) - c_0|`` term by term.

    With common difference ``h`` and length ``L = ηN``, the term ``c_m e(m·θn)``
    averages to at most ``|c_m|·min(1, 1/(L·‖(m·θ)h‖))``. When ``a_param`` is
    given, the bound ``Σ_{m≠0} |c_m|/(ηA)`` valid for ``(A, N)``-irrational ``θ``
    with ``A > |h|·‖m‖₁`` is reported too.
    """
    if poly.dim != theta.dim:
        raise InvalidArgumentError(f"polynomial on T^{poly.dim} against a point of T^{theta.dim}")
    average = progression_average(poly, theta, progression, n_max=n_max)
    length = progression.length
    points = theta.orbit(progression.elements())
    terms: list[TermBound] = []
    for m, c in poly.nonconstant():
        alpha = torus_norm(theta.dot(m) * progression.step)
        bound = 1.0 if alpha == 0 else min(1.0, 1.0 / (length * float(alpha)))
        observed = abs(complex(np.mean(np.exp(1j * TWO_PI * (points @ np.asarray(m, dtype=np.float64))))))
        terms.append(TermBound(m, abs(c), float(alpha), abs(c) * bound, observed))

    geometric = float(sum(term.bound for term in terms))
    eta = length / n_max
    preconditions = {"contained": progression.within(n_max)}
    lemma: float | None = None
    if a_param is not None:
        preconditions["frequencies_below_A"] = all(
            a_param > progression.step * sum(abs(v) for v in term.frequency) for term in terms
        )
        lemma = float(sum(term.magnitude for term in terms)) / (eta * a_param)
    return ProgressionDiagnostic(average, poly.constant_term, terms, geometric, lemma, preconditions)


@dataclass(slots=True)
class SweepRow:
    a_param: int
    theta: TorusPoint
    error: float
    geometric_bound: float
    lemma_bound: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "A": self.a_param,
            "theta": self.theta.to_dict(),
            "error": self.error,
            "geometric_bound": self.geometric_bound,
            "lemma_bound": self.lemma_bound,
        }


def irrationality_sweep(
    poly: TrigPolynomial,
    levels: Sequence[int],
    n_max: int,
    *,
    config: RegularityConfig = DEFAULT_CONFIG,
) -> list[SweepRow]:
    """Error of ``E_{n<=N} P(θ_A n)`` for points ``θ_A`` certified ``(A, N)``-irrational."""
    rows: list[SweepRow] = []
    progression = Progression.interval(n_max)
    for a_param in levels:
        theta, _ = find_irrational_point(a_param, n_max, poly.dim, config=config)
        diag = geometric_sum_bounds(poly, theta, progression, n_max=n_max, a_param=a_param)
        assert diag.lemma_bound is not None
        rows.append(SweepRow(a_param, theta, diag.error, diag.geometric_bound, diag.lemma_bound))
        logger.info("sweep A=%d: error %.4g, bound %.4g", a_param, diag.error, diag.geometric_bound)
    return rows


# ----------------------------------------------------------------------
# Structured averages
# ----------------------------------------------------------------------
def _structured_arguments(q: int, theta: TorusPoint, n_param: int) -> tuple[Points, npt.NDArray[np.int64], Points]:
    if q < 1:
        raise InvalidArgumentError(f"q must be positive, got {q}")
    if n_param < 1:
        raise InvalidArgumentError(f"N must be positive, got {n_param}")
    ns = np.arange(1, n_param + 1, dtype=np.int64)
    return ns / n_param, ns % q, theta.orbit(ns)


def structured_average(
    func: StructuredEvaluator,
    q: int,
    theta: TorusPoint,
    n_param: int,
) -> complex:
    """``E_{n<=N} F(n/N, n mod q, θn)``."""
    x, y, z = _structured_arguments(q, theta, n_param)
    return complex(np.mean(np.asarray(func(x, y, z))))


TermCase = Literal["torus", "residue", "interval"]


@dataclass(slots=True)
class StructuredTerm:
    key: StructuredKey
    case: TermCase
    magnitude: float
    observed: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.observed <= self.bound + 1e-12

    def to_dict(self) -> dict[str, Any]:
        k, a, m = self.key
        return {
            "k": k,
            "a": a,
            "m": list(m),
            "case": self.case,
            "abs_c": self.magnitude,
            "observed": self.observed,
            "bound": self.bound,
            "passed": self.passed,
        }


@dataclass(slots=True)
class StructuredDiagnostic:
    average: complex
    integral: complex
    terms: list[StructuredTerm]

    @property
    def error(self) -> float:
        return abs(self.average - self.integral)

    @property
    def total_bound(self) -> float:
        return float(sum(term.magnitude * term.bound for term in self.terms))

    @property
    def passed(self) -> bool:
        return all(term.passed for term in self.terms) and self.error <= self.total_bound + 1e-12

    def to_dict(self) -> dict[str, Any]:
        return {
            "average": [self.average.real, self.average.imag],
            "integral": [self.integral.real, self.integral.imag],
            "error": self.error,
            "total_bound": self.total_bound,
            "passed": self.passed,
            "terms": [term.to_dict() for term in self.terms],
        }


def structured_diagnostic(
    poly: ProductTrigPolynomial,
    theta: TorusPoint,
    n_param: int,
) -> StructuredDiagnostic:
    """Check every non-constant ``φ_{k,a,m}`` against its own integral.

    Three cases bound ``|E_n φ(n) - ∫φ|``:

    * ``m ≠ 0``: split ``n`` by residue mod ``q``; each class is a geometric
      sum with ratio ``q·(k/2N + m·θ)``, giving ``1/(⌊N/q⌋·‖q·(k/2N + m·θ)‖)``.
    * ``m = 0, a ≠ 0``: one geometric sum with ratio ``k/2N + a/q``.
    * ``m = 0, a = 0, k ≠ 0``: a Riemann sum of ``e(kx/2)``, off by at most ``π|k|/2N``.
    """
    q = poly.q
    if poly.dim != theta.dim:
        raise InvalidArgumentError(f"polynomial on T^{poly.dim} against a point of T^{theta.dim}")
    x, y, z = _structured_arguments(q, theta, n_param)
    average = complex(np.mean(poly(x, y, z)))
    terms: list[StructuredTerm] = []
    for key, c in poly.terms:
        k, a, m = key
        if k == 0 and a == 0 and not any(m):
            continue
        single = ProductTrigPolynomial(q, poly.dim, ((key, 1.0 + 0j),))
        target = single.integral()
        observed = abs(complex(np.mean(single(x, y, z))) - target)
        if any(m):
            beta = Fraction(k, 2 * n_param) + theta.dot(m)
            distance = torus_norm(beta * q)
            blocks = n_param // q
            bound = 1.0 if distance == 0 or blocks == 0 else min(1.0, 1.0 / (blocks * float(distance)))
            case: TermCase = "torus"
        elif a != 0:
            distance = torus_norm(Fraction(k, 2 * n_param) + Fraction(a, q))
            bound = 1.0 if distance == 0 else min(1.0, 1.0 / (n_param * float(distance)))
            case = "residue"
        else:
            bound = min(2.0, math.pi * abs(k) / (2 * n_param))
            case = "interval"
        terms.append(StructuredTerm(key, case, abs(c), observed, bound))
    return StructuredDiagnostic(average, poly.integral(), terms)


# ----------------------------------------------------------------------
# Integrals
# ----------------------------------------------------------------------
DomainKind = Literal["torus", "interval", "structured"]


@dataclass(slots=True, frozen=True)
class Domain:
    """``T^d``, ``[0, 1]`` or ``[0, 1] × Z/qZ × T^d`` with its product measure."""

    kind: DomainKind
    dim: int = 1
    q: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ("torus", "interval", "structured"):
            raise InvalidArgumentError(f"unknown domain kind {self.kind!r}")
        if self.dim < 0 or self.q < 1:
            raise InvalidArgumentError("domain needs dim >= 0 and q >= 1")

    @property
    def continuous_dims(self) -> int:
        if self.kind == "interval":
            return 1
        if self.kind == "torus":
            return self.dim
        return 1 + self.dim


@dataclass(slots=True, frozen=True)
class IntegralEstimate:
    value: complex
    error_bound: float
    method: Literal["exact", "midpoint"]

    def to_dict(self) -> dict[str, Any]:
        return {"value": [self.value.real, self.value.imag], "error_bound": self.error_bound, "method": self.method}


def integral_estimate(
    func: Any,
    domain: Domain,
    *,
    lipschitz: float | None = None,
    config: RegularityConfig = DEFAULT_CONFIG,
) -> IntegralEstimate:
    """``∫F dμ``: exact for trigonometric polynomials, else a midpoint rule.

    The midpoint error bound is ``Lip·h·√D/2`` for grid spacing ``h`` and
    ``D`` continuous dimensions; it is infinite when no Lipschitz bound is known.
    """
    if isinstance(func, TrigPolynomial):
        return IntegralEstimate(func.constant_term, 0.0, "exact")
    if isinstance(func, ProductTrigPolynomial):
        return IntegralEstimate(func.integral(), 0.0, "exact")

    dims = domain.continuous_dims
    per_dim = config.quadrature_points
    discrete = domain.q if domain.kind == "structured" else 1
    while dims and per_dim > 2 and per_dim**dims * discrete > config.fejer_sample_budget:
        per_dim //= 2
    nodes = (np.arange(per_dim) + 0.5) / per_dim
    if domain.kind == "interval":
        value = complex(np.mean(np.asarray(func(nodes))))
    elif domain.kind == "torus":
        mesh = np.meshgrid(*([nodes] * domain.dim), indexing="ij")
        points = np.stack([g.reshape(-1) for g in mesh], axis=-1)
        value = complex(np.mean(np.asarray(func(points))))
    else:
        axes = [nodes, np.arange(domain.q)] + [nodes] * domain.dim
        mesh = np.meshgrid(*axes, indexing="ij")
        x, y = mesh[0].reshape(-1), mesh[1].reshape(-1).astype(np.int64)
        z = np.stack([g.reshape(-1) for g in mesh[2:]], axis=-1) if domain.dim else np.zeros((x.shape[0], 0))
        value = complex(np.mean(np.asarray(func(x, y, z))))

    if dims == 0:
        return IntegralEstimate(value, 0.0, "midpoint")
    bound = math.inf if lipschitz is None else lipschitz * (1.0 / per_dim) * math.sqrt(dims) / 2
    return IntegralEstimate(value, bound, "midpoint")
