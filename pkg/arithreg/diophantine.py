"""Exact torus arithmetic, irrationality scans and the smooth/rational/irrational split.

Everything here runs on ``fractions.Fraction`` and Python integers; floats are
rejected on input so that (A, N)-irrationality is a decidable predicate.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np
import numpy.typing as npt

from .config import DEFAULT_CONFIG, RegularityConfig
from .exceptions import ConsistencyError, InvalidArgumentError, ResourceBudgetError
from .growth import GrowthFunction
from .reports import VerificationReport
from .telemetry import NULL_REPORTER, TelemetryReporter

logger = logging.getLogger("arithreg.diophantine")

IntMatrix = tuple[tuple[int, ...], ...]


def as_fraction(value: Any, *, name: str = "value") -> Fraction:
    """Convert a rational-like input to ``Fraction``, rejecting floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as err:
            raise InvalidArgumentError(f"{name} must be a rational string like '3/2', got {value!r}") from err
    if isinstance(value, tuple | list) and len(value) == 2:
        numerator, denominator = (_as_integer(part, name=name) for part in value)
        if denominator == 0:
            raise InvalidArgumentError(f"{name} has a zero denominator")
        return Fraction(numerator, denominator)
    raise InvalidArgumentError(f"{name} must be int/Fraction/str, got {type(value).__name__}: {value!r}")


def _as_integer(value: Any, *, name: str) -> int:
    number = as_fraction(value, name=name)
    if number.denominator != 1:
        raise InvalidArgumentError(f"{name} must be given as a pair of integers, got {value!r}")
    return int(number)


def torus_norm(x: Fraction) -> Fraction:
    """``‖x‖_T``: distance from ``x`` to the nearest integer."""
    r = x % 1
    return min(r, 1 - r)


def signed_residue(x: Fraction) -> Fraction:
    """Representative of ``x mod 1`` in ``(-1/2, 1/2]``."""
    r = x % 1
    return r - 1 if r > Fraction(1, 2) else r


# ----------------------------------------------------------------------
# Torus points and charts
# ----------------------------------------------------------------------
@dataclass(slots=True, frozen=True)
class TorusPoint:
    """A point of ``T^d`` with exact rational coordinates in ``[0, 1)``."""

    coords: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        reduced = tuple(as_fraction(c, name="coordinate") % 1 for c in self.coords)
        object.__setattr__(self, "coords", reduced)

    @classmethod
    def zero(cls, dim: int) -> TorusPoint:
        return cls(tuple(Fraction(0) for _ in range(dim)))

    @classmethod
    def of(cls, *coords: Any) -> TorusPoint:
        return cls(tuple(as_fraction(c) for c in coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def _check_dim(self, other: TorusPoint) -> None:
        if other.dim != self.dim:
            raise InvalidArgumentError(f"dimension mismatch: {self.dim} against {other.dim}")

    def __add__(self, other: TorusPoint) -> TorusPoint:
        self._check_dim(other)
        return TorusPoint(tuple(a + b for a, b in zip(self.coords, other.coords, strict=True)))

    def __sub__(self, other: TorusPoint) -> TorusPoint:
        self._check_dim(other)
        return TorusPoint(tuple(a - b for a, b in zip(self.coords, other.coords, strict=True)))

    def __neg__(self) -> TorusPoint:
        return TorusPoint(tuple(-c for c in self.coords))

    def scale(self, k: int) -> TorusPoint:
        return TorusPoint(tuple(c * k for c in self.coords))

    def dot(self, q: Sequence[int]) -> Fraction:
        """``q·θ mod 1``."""
        if len(q) != self.dim:
            raise InvalidArgumentError(f"vector of length {len(q)} against a point of dimension {self.dim}")
        return sum((c * int(k) for c, k in zip(self.coords, q, strict=True)), Fraction(0)) % 1

    def signed(self) -> tuple[Fraction, ...]:
        return tuple(signed_residue(c) for c in self.coords)

    def distance_sq_to_zero(self) -> Fraction:
        """``d(θ, 0)²`` for the Euclidean torus metric, exactly."""
        return sum((torus_norm(c) ** 2 for c in self.coords), Fraction(0))

    def common_denominator(self) -> int:
        return math.lcm(1, *(c.denominator for c in self.coords))

    def is_torsion(self, order: int) -> bool:
        return all((c * order).denominator == 1 for c in self.coords)

    def to_floats(self) -> npt.NDArray[np.float64]:
        return np.array([float(c) for c in self.coords], dtype=np.float64)

    def orbit(self, ns: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Floating images of the exact points ``θ·n mod 1``, shape ``(len(ns), d)``."""
        n_array = np.asarray(ns, dtype=np.int64).reshape(-1)
        out = np.empty((n_array.shape[0], self.dim), dtype=np.float64)
        for j, c in enumerate(self.coords):
            p, q = c.numerator, c.denominator
            if q * max(1, int(np.max(np.abs(n_array), initial=1))) < 2**62:
                residues = (p * n_array) % q
                out[:, j] = residues / q
            else:
                out[:, j] = [((p * int(n)) % q) / q for n in n_array]
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "coords": [[str(c.numerator), str(c.denominator)] for c in self.coords],
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> TorusPoint:
        coords = tuple(as_fraction(tuple(pair), name="coordinate") for pair in payload["coords"])
        if int(payload.get("dim", len(coords))) != len(coords):
            raise InvalidArgumentError("TorusPoint 'dim' does not match the number of coordinates")
        return cls(coords)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


def identity_matrix(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def determinant(matrix: IntMatrix) -> int:
    """Exact integer determinant (Bareiss elimination)."""
    n = len(matrix)
    if n == 0:
        return 1
    a = [list(row) for row in matrix]
    sign, previous = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if pivot is None:
                return 0
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // previous
        previous = a[k][k]
    return sign * a[n - 1][n - 1]


def integer_inverse(matrix: IntMatrix) -> IntMatrix:
    """Inverse of a unimodular integer matrix."""
    n = len(matrix)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise InvalidArgumentError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        lead = aug[col][col]
        aug[col] = [v / lead for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col], strict=True)]
    inverse = []
    for row in aug:
        entries = row[n:]
        if any(v.denominator != 1 for v in entries):
            raise InvalidArgumentError("matrix is not unimodular")
        inverse.append(tuple(int(v) for v in entries))
    return tuple(inverse)


def mat_vec(matrix: IntMatrix, vector: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(sum((Fraction(a) * v for a, v in zip(row, vector, strict=True)), Fraction(0)) for row in matrix)


def mat_mul(left: IntMatrix, right: IntMatrix) -> IntMatrix:
    columns = list(zip(*right, strict=True)) if right else []
    return tuple(tuple(sum(a * b for a, b in zip(row, col, strict=True)) for col in columns) for row in left)


@dataclass(slots=True, frozen=True)
class SubtorusChart:
    """A unimodular map ``L`` with ``L(T) = T^{d'} × {0}^{d-d'}``."""

    ambient_dim: int
    dim: int
    matrix: IntMatrix

    def __post_init__(self) -> None:
        if len(self.matrix) != self.ambient_dim or any(len(row) != self.ambient_dim for row in self.matrix):
            raise InvalidArgumentError(f"chart matrix must be {self.ambient_dim}x{self.ambient_dim}")
        if not 0 <= self.dim <= self.ambient_dim:
            raise InvalidArgumentError(f"chart dimension {self.dim} outside [0, {self.ambient_dim}]")

    @classmethod
    def identity(cls, dim: int) -> SubtorusChart:
        return cls(ambient_dim=dim, dim=dim, matrix=identity_matrix(dim))

    @property
    def complexity(self) -> int:
        return max((abs(v) for row in self.matrix for v in row), default=1)

    @property
    def determinant(self) -> int:
        return determinant(self.matrix)

    def inverse(self) -> IntMatrix:
        return integer_inverse(self.matrix)

    def apply(self, point: TorusPoint) -> TorusPoint:
        if point.dim != self.ambient_dim:
            raise InvalidArgumentError(f"point of dimension {point.dim} against a {self.ambient_dim}-dim chart")
        return TorusPoint(mat_vec(self.matrix, point.coords))

    def chart_coordinates(self, point: TorusPoint) -> TorusPoint:
        """First ``dim`` coordinates of ``L(point)``."""
        return TorusPoint(self.apply(point).coords[: self.dim])

    def contains(self, point: TorusPoint) -> bool:
        image = self.apply(point)
        return all(c == 0 for c in image.coords[self.dim :])

    def lift(self, coords: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """``L⁻¹(z, 0)`` as an exact (unreduced) vector."""
        padded = list(coords) + [Fraction(0)] * (self.ambient_dim - len(coords))
        return mat_vec(self.inverse(), padded)

    def to_dict(self) -> dict[str, Any]:
        return {
            "ambient_dim": self.ambient_dim,
            "dim": self.dim,
            "matrix": [list(row) for row in self.matrix],
            "complexity": self.complexity,
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> SubtorusChart:
        matrix = tuple(tuple(int(v) for v in row) for row in payload["matrix"])
        return cls(ambient_dim=int(payload["ambient_dim"]), dim=int(payload["dim"]), matrix=matrix)


# ----------------------------------------------------------------------
# (A, N)-irrationality
# ----------------------------------------------------------------------
@dataclass(slots=True, frozen=True)
class IrrationalityCheck:
    """Result of an exhaustive (A, N)-irrationality scan."""

    passed: bool
    a_param: int
    n_param: int
    dim: int
    visited: int
    counterexample: tuple[int, ...] | None = None
    value: Fraction | None = None

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "passed": self.passed,
            "A": self.a_param,
            "N": self.n_param,
            "dim": self.dim,
            "visited": self.visited,
        }
        if self.counterexample is not None:
            payload["counterexample"] = list(self.counterexample)
            payload["norm"] = [str(self.value.numerator), str(self.value.denominator)] if self.value is not None else None
        return payload

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> IrrationalityCheck:
        counterexample = payload.get("counterexample")
        norm = payload.get("norm")
        return cls(
            passed=bool(payload["passed"]),
            a_param=int(payload["A"]),
            n_param=int(payload["N"]),
            dim=int(payload["dim"]),
            visited=int(payload["visited"]),
            counterexample=tuple(int(v) for v in counterexample) if counterexample is not None else None,
            value=as_fraction(tuple(norm), name="norm") if norm is not None else None,
        )


def l1_ball_size(dim: int, radius: int) -> int:
    """Number of nonzero ``q`` in ``Z^dim`` with ``‖q‖₁ <= radius``, up to sign."""
    total = sum(2**i * math.comb(dim, i) * math.comb(radius, i) for i in range(dim + 1))
    return (total - 1) // 2


def _l1_sphere(dim: int, radius: int, leading_zero: bool = True) -> Iterator[tuple[int, ...]]:
    """Vectors of ``‖q‖₁ == radius`` with first nonzero entry positive, in lexicographic order."""
    if dim == 0:
        return
    if dim == 1:
        if radius == 0:
            if not leading_zero:
                yield (0,)
            return
        if not leading_zero:
            yield (-radius,)
        yield (radius,)
        return
    for a in range(-radius, radius + 1):
        if leading_zero and a < 0:
            continue
        for rest in _l1_sphere(dim - 1, radius - abs(a), leading_zero and a == 0):
            yield (a, *rest)


def enumerate_frequencies(dim: int, radius: int) -> Iterator[tuple[int, ...]]:
    """Nonzero ``q`` with ``‖q‖₁ <= radius`` up to sign, by ``‖q‖₁`` then lexicographically."""
    for s in range(1, radius + 1):
        yield from _l1_sphere(dim, s)


def is_irrational(
    theta: TorusPoint,
    a_param: int,
    n_param: int,
    *,
    config: RegularityConfig = DEFAULT_CONFIG,
) -> IrrationalityCheck:
    """Decide whether ``θ`` is (A, N)-irrational.

    Every nonzero ``q`` with ``‖q‖₁ <= A`` (up to sign) is visited in order of
    ``‖q‖₁`` and then lexicographically; the first ``q`` with
    ``‖q·θ‖_T < A/N`` is returned as the counterexample.

    Example:
        >>> is_irrational(TorusPoint.of("1/2"), 3, 10).counterexample
        (2,)
    """
    if a_param < 1 or n_param < 1:
        raise InvalidArgumentError(f"A and N must be >= 1, got A={a_param}, N={n_param}")
    dim = theta.dim
    if dim == 0:
        return IrrationalityCheck(True, a_param, n_param, 0, 0)

    denominator = theta.common_denominator()
    numerators = [int(c * denominator) for c in theta.coords]
    threshold = a_param * denominator  # ‖q·θ‖ >= A/N  <=>  N·min(r, Q-r) >= A·Q

    visited = 0
    for q in enumerate_frequencies(dim, a_param):
        visited += 1
        if visited > config.enumeration_budget:
            raise ResourceBudgetError(
                f"irrationality scan at A={a_param} in dimension {dim} exceeds the enumeration budget "
                f"({l1_ball_size(dim, a_param)} vectors)",
                bound=l1_ball_size(dim, a_param),
                budget=config.enumeration_budget,
            )
        residue = sum(qj * pj for qj, pj in zip(q, numerators, strict=True)) % denominator
        distance = min(residue, denominator - residue)
        if n_param * distance < threshold:
            logger.debug("theta %s fails (A=%d, N=%d) at q=%s", theta, a_param, n_param, q)
            return IrrationalityCheck(
                False, a_param, n_param, dim, visited, counterexample=q,
                value=Fraction(distance, denominator),
            )
    return IrrationalityCheck(True, a_param, n_param, dim, visited)


# ----------------------------------------------------------------------
# Unimodular completion
# ----------------------------------------------------------------------
def _nearest_quotient(a: int, b: int) -> int:
    return round(Fraction(a, b))


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """``(g, s, t)`` with ``s·a + t·b == g == gcd(a, b) >= 0``."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        quotient = old_r // r
        old_r, r = r, old_r - quotient * r
        old_s, s = s, old_s - quotient * s
        old_t, t = t, old_t - quotient * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def bezout_vector(q_prime: Sequence[int]) -> tuple[int, ...]:
    """An integer vector ``u`` with ``q'·u == 1``."""
    g = 0
    u = [0] * len(q_prime)
    for j, qj in enumerate(q_prime):
        g, s, t = extended_gcd(g, int(qj))
        u = [s * v for v in u]
        u[j] += t
    if g != 1:
        raise InvalidArgumentError(f"vector {tuple(q_prime)} is not primitive (gcd {g})")
    return tuple(u)


def complete_unimodular(q_prime: Sequence[int]) -> SubtorusChart:
    """A matrix ``U`` with ``det U = 1`` (when ``n >= 2``) and last row ``q'``.

    ``q'`` is reduced to ``e_n`` by recorded column operations ``q'·V = e_n``;
    then ``U = V⁻¹``. The chart describes ``{y : q'·y = 0}``.
    """
    q = [int(v) for v in q_prime]
    n = len(q)
    if n == 0:
        raise InvalidArgumentError("cannot complete an empty vector")
    if math.gcd(*q) != 1:
        raise InvalidArgumentError(f"vector {tuple(q)} is not primitive (gcd {math.gcd(*q)})")

    columns = [[int(i == j) for i in range(n)] for j in range(n)]  # columns[j] = V e_j

    def column_op(k: int, j: int, c: int) -> None:
        q[k] -= c * q[j]
        columns[k] = [a - c * b for a, b in zip(columns[k], columns[j], strict=True)]

    while sum(1 for v in q if v != 0) > 1:
        j = min((i for i in range(n) if q[i] != 0), key=lambda i: (abs(q[i]), i))
        for k in range(n):
            if k != j and q[k] != 0:
                column_op(k, j, _nearest_quotient(q[k], q[j]))

    j = next(i for i in range(n) if q[i] != 0)
    if j != n - 1:
        q[j], q[n - 1] = q[n - 1], q[j]
        columns[j], columns[n - 1] = columns[n - 1], columns[j]
    if q[n - 1] == -1:
        q[n - 1] = 1
        columns[n - 1] = [-v for v in columns[n - 1]]

    v_matrix = tuple(tuple(columns[j][i] for j in range(n)) for i in range(n))
    u_rows = [list(row) for row in integer_inverse(v_matrix)]
    if n >= 2 and determinant(tuple(tuple(r) for r in u_rows)) == -1:
        u_rows[0] = [-v for v in u_rows[0]]
    matrix = tuple(tuple(r) for r in u_rows)
    if list(matrix[-1]) != [int(v) for v in q_prime]:
        raise ConsistencyError(f"unimodular completion lost the last row {tuple(q_prime)}")
    return SubtorusChart(ambient_dim=n, dim=n - 1, matrix=matrix)


# ----------------------------------------------------------------------
# θ = θ_smth + θ_rat + θ_irrat
# ----------------------------------------------------------------------
def ceil_sqrt(x: Fraction) -> int:
    """Smallest integer ``k >= 0`` with ``k² >= x``."""
    if x <= 0:
        return 0
    c = math.ceil(x)
    k = math.isqrt(c)
    return k if k * k >= c else k + 1


@dataclass(slots=True)
class ThetaDecomposition:
    """The split of a torus point into smooth, rational and irrational parts."""

    theta: TorusPoint
    smooth: TorusPoint
    rational: TorusPoint
    irrational: TorusPoint
    chart: SubtorusChart
    m_value: int
    torsion_order: int
    n_param: int
    growth_spec: str
    iterations: int
    checks: list[IrrationalityCheck] = field(default_factory=list)

    @property
    def irrational_coordinates(self) -> TorusPoint:
        return self.chart.chart_coordinates(self.irrational)

    @property
    def level(self) -> int:
        """The irrationality level ``A`` of the final scan."""
        return self.checks[-1].a_param if self.checks else 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "theta": self.theta.to_dict(),
            "smooth": self.smooth.to_dict(),
            "rational": self.rational.to_dict(),
            "irrational": self.irrational.to_dict(),
            "irrational_chart_coords": self.irrational_coordinates.to_dict(),
            "chart": self.chart.to_dict(),
            "m_value": self.m_value,
            "torsion_order": self.torsion_order,
            "N": self.n_param,
            "growth": self.growth_spec,
            "iterations": self.iterations,
            "checks": [check.to_dict() for check in self.checks],
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> ThetaDecomposition:
        try:
            return cls(
                theta=TorusPoint.from_dict(payload["theta"]),
                smooth=TorusPoint.from_dict(payload["smooth"]),
                rational=TorusPoint.from_dict(payload["rational"]),
                irrational=TorusPoint.from_dict(payload["irrational"]),
                chart=SubtorusChart.from_dict(payload["chart"]),
                m_value=int(payload["m_value"]),
                torsion_order=int(payload["torsion_order"]),
                n_param=int(payload["N"]),
                growth_spec=str(payload["growth"]),
                iterations=int(payload["iterations"]),
                checks=[IrrationalityCheck.from_dict(check) for check in payload.get("checks", [])],
            )
        except (KeyError, TypeError, ValueError) as err:
            raise InvalidArgumentError(f"malformed theta decomposition: {err}") from err


def _measure_m(
    previous: int,
    smooth_vector: Sequence[Fraction],
    torsion: int,
    chart: SubtorusChart,
    n_param: int,
) -> int:
    distance_sq = sum((v * v for v in smooth_vector), Fraction(0))
    smooth_scale = ceil_sqrt(distance_sq * n_param * n_param)
    return max(previous, smooth_scale, torsion, chart.complexity, 1)


def decompose_theta(
    theta: TorusPoint,
    n_param: int,
    growth: GrowthFunction,
    *,
    start_m: int = 1,
    config: RegularityConfig = DEFAULT_CONFIG,
    reporter: TelemetryReporter = NULL_REPORTER,
) -> ThetaDecomposition:
    """Split ``θ`` into smooth, rational and irrational parts.

    While the irrational part fails the scan at level ``⌈F(M)⌉`` (capped at
    ``N``: beyond ``N/2`` every nonzero ``q`` fails anyway), the violating ``q``
    is written ``q = m·q'``, a smooth shift along the coordinate with largest
    ``|q_j|`` clears ``q·z``, a torsion shift built from a Bézout vector of
    ``q'`` clears ``q'·z``, and the point descends to ``{q'·z = 0}``.
    """
    if n_param < 1:
        raise InvalidArgumentError(f"N must be >= 1, got {n_param}")
    d = theta.dim
    chart = SubtorusChart.identity(d)
    smooth_vector = [Fraction(0)] * d
    rational = TorusPoint.zero(d)
    irrational = theta
    torsion = 1
    iterations = 0
    checks: list[IrrationalityCheck] = []
    m_value = _measure_m(start_m, smooth_vector, torsion, chart, n_param)

    while True:
        level = growth.ceil_value(m_value, cap=n_param)
        z = chart.chart_coordinates(irrational)
        with reporter.span("theta.iteration", iteration=iterations, m_value=m_value, level=level) as span:
            check = is_irrational(z, level, n_param, config=config)
            span["passed"] = check.passed
        checks.append(check)
        if check.passed:
            break
        if iterations >= d:
            raise ConsistencyError(f"theta decomposition exceeded {d} iterations")

        q = check.counterexample
        assert q is not None
        m = math.gcd(*q)
        q_prime = tuple(v // m for v in q)

        j = min(range(len(q)), key=lambda i: (-abs(q[i]), i))
        delta = signed_residue(z.dot(q))
        shift = [Fraction(0)] * z.dim
        shift[j] = delta / q[j]

        cleared = TorusPoint(tuple(a - b for a, b in zip(z.coords, shift, strict=True)))
        residual = cleared.dot(q_prime) * m
        if residual.denominator != 1:
            raise ConsistencyError(f"smooth shift failed to clear q={q}")
        k = int(residual) % m
        bezout = bezout_vector(q_prime)
        torsion_shift = [Fraction(k, m) * u for u in bezout]

        smooth_lift = chart.lift(shift)
        torsion_lift = chart.lift(torsion_shift)
        smooth_vector = [a + b for a, b in zip(smooth_vector, smooth_lift, strict=True)]
        rational = rational + TorusPoint(torsion_lift)
        irrational = irrational - TorusPoint(smooth_lift) - TorusPoint(torsion_lift)

        completion = complete_unimodular(q_prime)
        block = completion.matrix
        rows = [list(row) for row in chart.matrix]
        top = mat_mul(block, tuple(tuple(r) for r in rows[: chart.dim]))
        new_matrix = tuple(top) + tuple(tuple(r) for r in rows[chart.dim :])
        chart = SubtorusChart(ambient_dim=d, dim=chart.dim - 1, matrix=new_matrix)
        if not chart.contains(irrational):
            raise ConsistencyError("irrational part left its subtorus")

        torsion = math.lcm(torsion, m)
        iterations += 1
        m_value = _measure_m(m_value, smooth_vector, torsion, chart, n_param)
        logger.debug(
            "iteration %d: q=%s m=%d, chart dim %d, M=%d", iterations, q, m, chart.dim, m_value
        )

    smooth = TorusPoint(tuple(smooth_vector))
    decomposition = ThetaDecomposition(
        theta=theta,
        smooth=smooth,
        rational=rational,
        irrational=irrational,
        chart=chart,
        m_value=m_value,
        torsion_order=torsion,
        n_param=n_param,
        growth_spec=growth.spec,
        iterations=iterations,
        checks=checks,
    )
    logger.info(
        "theta decomposed in %d iterations: M=%d, torsion %d, chart dim %d",
        iterations, m_value, torsion, chart.dim,
    )
    return decomposition


def verify_decomposition(
    decomposition: ThetaDecomposition,
    growth: GrowthFunction,
    *,
    config: RegularityConfig = DEFAULT_CONFIG,
) -> VerificationReport:
    """Recheck every clause of a theta decomposition with exact arithmetic."""
    report = VerificationReport()
    dec = decomposition
    n = dec.n_param
    m = dec.m_value

    recombined = dec.smooth + dec.rational + dec.irrational
    report.add("exact_sum", recombined == dec.theta, detail=str(recombined))

    distance_sq = dec.smooth.distance_sq_to_zero()
    report.add(
        "smooth",
        distance_sq * n * n <= m * m,
        measured=float(distance_sq) ** 0.5,
        bound=m / n,
    )
    report.add(
        "torsion",
        dec.rational.is_torsion(dec.torsion_order) and dec.torsion_order <= m,
        measured=dec.torsion_order,
        bound=m,
    )
    report.add("chart_det", abs(dec.chart.determinant) == 1, measured=dec.chart.determinant)
    report.add("chart_contains", dec.chart.contains(dec.irrational))
    report.add(
        "chart_complexity", dec.chart.complexity <= m, measured=dec.chart.complexity, bound=m
    )
    report.add("iterations", dec.iterations <= dec.theta.dim, measured=dec.iterations, bound=dec.theta.dim)

    level = growth.ceil_value(m, cap=n)
    rerun = is_irrational(dec.irrational_coordinates, level, n, config=config)
    report.add(
        "irrational",
        rerun.passed,
        measured=str(rerun.counterexample) if rerun.counterexample else "pass",
        bound=level,
    )
    return report


# ----------------------------------------------------------------------
# Certified irrational points
# ----------------------------------------------------------------------
_QUADRATIC_SEEDS = (5, 2, 3, 7, 11, 13, 17, 19)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def next_prime(n: int) -> int:
    candidate = max(2, n)
    while not _is_prime(candidate):
        candidate += 1
    return candidate


def find_irrational_point(
    a_param: int,
    n_param: int,
    dim: int = 1,
    *,
    attempts: int = 4096,
    config: RegularityConfig = DEFAULT_CONFIG,
) -> tuple[TorusPoint, IrrationalityCheck]:
    """Deterministically search for a rational point that is (A, N)-irrational.

    Candidates have a prime denominator ``Q >= 10N`` and numerators
    ``⌊Q·frac(√s)⌋`` for small squarefree ``s`` (the golden ratio in the first
    coordinate), nudged one step at a time until the scan passes.
    """
    if not 1 <= dim <= len(_QUADRATIC_SEEDS):
        raise InvalidArgumentError(f"dimension must be in [1, {len(_QUADRATIC_SEEDS)}]")
    q_den = next_prime(10 * n_param)
    base = []
    for j in range(dim):
        seed = _QUADRATIC_SEEDS[j]
        if j == 0:
            numerator = (math.isqrt(5 * q_den * q_den) - q_den) // 2
        else:
            numerator = math.isqrt(seed * q_den * q_den) % q_den
        base.append(numerator)

    for attempt in range(attempts):
        offset = (attempt + 1) // 2 * (1 if attempt % 2 else -1)
        numerators = [base[0] + offset, *base[1:]]
        point = TorusPoint(tuple(Fraction(p, q_den) for p in numerators))
        check = is_irrational(point, a_param, n_param, config=config)
        if check.passed:
            return point, check
    raise ResourceBudgetError(
        f"no ({a_param}, {n_param})-irrational point found in dimension {dim} after {attempts} attempts",
        bound=attempts,
        budget=attempts,
    )
