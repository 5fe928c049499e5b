"""Growth functions ``F: R⁺ → R⁺`` and their DSL.

Supported forms::

    poly:c,k            M ↦ c·M^k
    exp:c               M ↦ c·2^M
    table:M1=V1,...     piecewise-linear through (0, 0) and the listed knots,
                        extended past the last knot with the last slope

``inflate(c)`` builds ``M ↦ F(c·M²)``; the irrational regularity pipeline
stacks two of these.
"""
from __future__ import annotations

import math
import re
from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

from .exceptions import InvalidArgumentError, ResourceBudgetError

GrowthKind = Literal["poly", "exp", "table", "inflated"]

# 2**EXACT_EXP_LIMIT is the largest power evaluated exactly without a cap.
EXACT_EXP_LIMIT = 65536


@dataclass(slots=True, frozen=True)
class GrowthFunction:
    """An increasing function used to trade structure complexity for uniformity."""

    kind: GrowthKind
    coefficient: Fraction = Fraction(1)
    exponent: Fraction = Fraction(1)
    knots: tuple[tuple[Fraction, Fraction], ...] = ()
    base: GrowthFunction | None = field(default=None, compare=False)

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------
    @classmethod
    def poly(cls, c: float | Fraction | str, k: float | Fraction | str) -> GrowthFunction:
        coefficient, exponent = _positive(c, "c"), _positive(k, "k")
        return cls(kind="poly", coefficient=coefficient, exponent=exponent)

    @classmethod
    def exp(cls, c: float | Fraction | str) -> GrowthFunction:
        return cls(kind="exp", coefficient=_positive(c, "c"))

    @classmethod
    def table(cls, pairs: Iterable[tuple[float | Fraction | str, float | Fraction | str]]) -> GrowthFunction:
        knots = tuple((_positive(m, "M"), _positive(v, "V")) for m, v in pairs)
        if not knots:
            raise InvalidArgumentError("a growth table needs at least one knot")
        for (m0, v0), (m1, v1) in zip(knots, knots[1:], strict=False):
            if not (m1 > m0 and v1 > v0):
                raise InvalidArgumentError(
                    f"growth table must be strictly increasing: {m0}={v0} then {m1}={v1}"
                )
        return cls(kind="table", knots=knots)

    def inflate(self, c: int | Fraction) -> GrowthFunction:
        """``M ↦ F(c·M²)``."""
        return GrowthFunction(kind="inflated", coefficient=_positive(c, "c"), base=self)

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------
    def __call__(self, m: float) -> float:
        if m < 0:
            raise InvalidArgumentError(f"growth functions are defined on M >= 0, got {m}")
        if self.kind == "poly":
            try:
                return float(self.coefficient) * float(m) ** float(self.exponent)
            except OverflowError:
                return math.inf
        if self.kind == "exp":
            try:
                return float(self.coefficient) * 2.0 ** float(m)
            except OverflowError:
                return math.inf
        if self.kind == "table":
            return float(self._interpolate(Fraction(m)))
        assert self.base is not None
        inner = float(self.coefficient) * float(m) ** 2
        return self.base(inner)

    def exact(self, m: int | Fraction | float, *, cap: int | None = None) -> Fraction:
        """Exact value as a rational, saturating at ``cap`` when one is given."""
        value = Fraction(m)
        if value < 0:
            raise InvalidArgumentError(f"growth functions are defined on M >= 0, got {m}")
        if self.kind == "poly":
            if self.exponent.denominator == 1:
                return _saturate(self.coefficient * value ** int(self.exponent), cap)
            return _saturate(Fraction(self(float(value))), cap)
        if self.kind == "exp":
            if cap is not None and float(value) > math.log2(cap / float(self.coefficient)) + 1:
                return Fraction(cap)
            if value.denominator == 1 and value <= EXACT_EXP_LIMIT:
                return _saturate(self.coefficient * 2 ** int(value), cap)
            if value > EXACT_EXP_LIMIT:
                raise ResourceBudgetError(
                    f"exp growth at M={float(value):.6g} needs a cap", bound=value, budget=EXACT_EXP_LIMIT
                )
            return _saturate(Fraction(self(float(value))), cap)
        if self.kind == "table":
            return _saturate(self._interpolate(value), cap)
        assert self.base is not None
        return self.base.exact(self.coefficient * value * value, cap=cap)

    def ceil_value(self, m: int | Fraction | float, *, cap: int | None = None) -> int:
        """``⌈F(M)⌉`` as an integer, optionally capped."""
        return math.ceil(self.exact(m, cap=cap))

    def _interpolate(self, m: Fraction) -> Fraction:
        previous = (Fraction(0), Fraction(0))
        for knot in self.knots:
            if m <= knot[0]:
                return _lerp(previous, knot, m)
            previous = knot
        if len(self.knots) == 1:
            m0, v0 = self.knots[0]
            return v0 * m / m0
        return _lerp(self.knots[-2], self.knots[-1], m)

    def check_monotone(self, points: Iterable[float]) -> bool:
        """Whether ``F`` is strictly increasing on the given evaluation points."""
        ordered = sorted(set(points))
        values = [self(p) for p in ordered]
        return all(b > a or (math.isinf(a) and math.isinf(b)) for a, b in zip(values, values[1:], strict=False))

    @property
    def spec(self) -> str:
        if self.kind == "poly":
            return f"poly:{_fmt(self.coefficient)},{_fmt(self.exponent)}"
        if self.kind == "exp":
            return f"exp:{_fmt(self.coefficient)}"
        if self.kind == "table":
            return "table:" + ",".join(f"{_fmt(m)}={_fmt(v)}" for m, v in self.knots)
        assert self.base is not None
        return f"inflate({_fmt(self.coefficient)})[{self.base.spec}]"

    def __str__(self) -> str:
        return self.spec


MONOTONE_PROBES = (0.5, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144)
INFLATE_PATTERN = re.compile(r"inflate\((?P<c>[^()]+)\)\[(?P<base>.+)\]")


def parse_growth(text: str) -> GrowthFunction:
    """Parse a growth DSL string such as ``poly:10,1``.

    ``inflate(c)[spec]`` reads back the specs written by inflated growths.

    Example:
        >>> parse_growth("poly:10,1")(3)
        30.0
    """
    if isinstance(text, str) and (inflated := INFLATE_PATTERN.fullmatch(text.strip())):
        return parse_growth(inflated.group("base")).inflate(_token(inflated.group("c").strip()))
    if not isinstance(text, str) or ":" not in text:
        raise InvalidArgumentError(f"growth spec {text!r} must look like 'kind:params'")
    kind, _, body = text.strip().partition(":")
    kind = kind.strip().lower()
    if kind == "poly":
        tokens = [token.strip() for token in body.split(",")]
        if len(tokens) != 2:
            raise InvalidArgumentError(f"poly growth expects 'c,k', got {body!r}")
        growth = GrowthFunction.poly(_token(tokens[0]), _token(tokens[1]))
    elif kind == "exp":
        growth = GrowthFunction.exp(_token(body.strip()))
    elif kind == "table":
        pairs = []
        for token in body.split(","):
            m_text, sep, v_text = token.partition("=")
            if not sep:
                raise InvalidArgumentError(f"table knot {token.strip()!r} must look like 'M=V'")
            pairs.append((_token(m_text.strip()), _token(v_text.strip())))
        growth = GrowthFunction.table(pairs)
    else:
        raise InvalidArgumentError(f"unknown growth kind {kind!r}")

    if not growth.check_monotone(MONOTONE_PROBES):
        raise InvalidArgumentError(f"growth spec {text!r} is not increasing")
    return growth


def _token(token: str) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError) as err:
        raise InvalidArgumentError(f"invalid number {token!r} in growth spec") from err


def _positive(value: float | Fraction | str | int, name: str) -> Fraction:
    number = Fraction(value)
    if number <= 0:
        raise InvalidArgumentError(f"growth parameter {name} must be positive, got {value}")
    return number


def _lerp(left: tuple[Fraction, Fraction], right: tuple[Fraction, Fraction], m: Fraction) -> Fraction:
    (m0, v0), (m1, v1) = left, right
    return v0 + (v1 - v0) * (m - m0) / (m1 - m0)


def _saturate(value: Fraction, cap: int | None) -> Fraction:
    if cap is not None and value > cap:
        return Fraction(cap)
    return value


def _fmt(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return repr(float(value)) if Fraction(float(value)) == value else str(value)
