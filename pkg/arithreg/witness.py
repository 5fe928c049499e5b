"""Structure witnesses: ``f(n) = F(θn)`` with ``F`` an explicit expression on ``T^d``.

Expressions are small trees over constants, coordinate phases
``Re e(x_j)`` / ``Im e(x_j)``, ramps, sums, products and clamping to
``[0, 1]``. Each node reports a bound on its sup norm and on its Lipschitz
constant for the Euclidean torus metric; the Lipschitz norm of a witness is
the sum of the two.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, ClassVar

import numpy as np
import numpy.typing as npt

from .diophantine import TorusPoint
from .exceptions import InvalidArgumentError

Points = npt.NDArray[np.float64]
Values = npt.NDArray[np.float64]

TWO_PI = 2.0 * math.pi


class Expr(ABC):
    """A node of a witness expression tree."""

    tag: ClassVar[str]

    @abstractmethod
    def evaluate(self, points: Points) -> Values:
        """Evaluate at an ``(n, d)`` array of torus points."""

    @abstractmethod
    def bounds(self) -> tuple[float, float]:
        """``(sup bound, Lipschitz constant)``."""

    @abstractmethod
    def coordinates(self) -> set[int]: ...

    @abstractmethod
    def remap(self, mapping: Mapping[int, int]) -> Expr: ...

    @abstractmethod
    def to_dict(self) -> dict[str, Any]: ...

    def size(self) -> int:
        return 1


@dataclass(slots=True, frozen=True)
class Const(Expr):
    tag: ClassVar[str] = "const"
    value: float

    def evaluate(self, points: Points) -> Values:
        return np.full(points.shape[0], float(self.value))

    def bounds(self) -> tuple[float, float]:
        return abs(self.value), 0.0

    def coordinates(self) -> set[int]:
        return set()

    def remap(self, mapping: Mapping[int, int]) -> Expr:
        return self

    def to_dict(self) -> dict[str, Any]:
        return {"tag": self.tag, "value": self.value}


@dataclass(slots=True, frozen=True)
class RePhase(Expr):
    """``x ↦ cos(2π x_j)``."""

    tag: ClassVar[str] = "re_phase"
    coord: int

    def evaluate(self, points: Points) -> Values:
        return np.cos(TWO_PI * points[:, self.coord])

    def bounds(self) -> tuple[float, float]:
        return 1.0, TWO_PI

    def coordinates(self) -> set[int]:
        return {self.coord}

    def remap(self, mapping: Mapping[int, int]) -> Expr:
        return RePhase(mapping[self.coord])

    def to_dict(self) -> dict[str, Any]:
        return {"tag": self.tag, "coord": self.coord}


@dataclass(slots=True, frozen=True)
class ImPhase(Expr):
    """``x ↦ sin(2π x_j)``."""

    tag: ClassVar[str] = "im_phase"
    coord: int

    def evaluate(self, points: Points) -> Values:
        return np.sin(TWO_PI * points[:, self.coord])

    def bounds(self) -> tuple[float, float]:
        return 1.0, TWO_PI

    def coordinates(self) -> set[int]:
        return {self.coord}

    def remap(self, mapping: Mapping[int, int]) -> Expr:
        return ImPhase(mapping[self.coord])

    def to_dict(self) -> dict[str, Any]:
        return {"tag": self.tag, "coord": self.coord}


@dataclass(slots=True, frozen=True)
class Ramp(Expr):
    """``η_{t,r}∘child``: 0 below ``t - r``, 1 from ``t`` on, linear in between."""

    tag: ClassVar[str] = "ramp"
    threshold: float
    width: float
    child: Expr

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise InvalidArgumentError(f"ramp width must be positive, got {self.width}")

    def evaluate(self, points: Points) -> Values:
        inner = self.child.evaluate(points)
        return np.clip((inner - (self.threshold - self.width)) / self.width, 0.0, 1.0)

    def bounds(self) -> tuple[float, float]:
        _, lip = self.child.bounds()
        return 1.0, lip / self.width

    def coordinates(self) -> set[int]:
        return self.child.coordinates()

    def remap(self, mapping: Mapping[int, int]) -> Expr:
        return Ramp(self.threshold, self.width, self.child.remap(mapping))

    def to_dict(self) -> dict[str, Any]:
        return {
            "tag": self.tag,
            "threshold": self.threshold,
            "width": self.width,
            "child": self.child.to_dict(),
        }

    def size(self) -> int:
        return 1 + self.child.size()


@dataclass(slots=True, frozen=True)
class Clamp(Expr):
    """Truncation to ``[0, 1]``; never increases the Lipschitz constant."""

    tag: ClassVar[str] = "clamp"
    child: Expr

    def evaluate(self, points: Points) -> Values:
        return np.clip(self.child.evaluate(points), 0.0, 1.0)

    def bounds(self) -> tuple[float, float]:
        sup, lip = self.child.bounds()
        return min(sup, 1.0), lip

    def coordinates(self) -> set[int]:
        return self.child.coordinates()

    def remap(self, mapping: Mapping[int, int]) -> Expr:
        return Clamp(self.child.remap(mapping))

    def to_dict(self) -> dict[str, Any]:
        return {"tag": self.tag, "child": self.child.to_dict()}

    def size(self) -> int:
        return 1 + self.child.size()


@dataclass(slots=True, frozen=True)
class Sum(Expr):
    tag: ClassVar[str] = "sum"
    children: tuple[Expr, ...]

    def evaluate(self, points: Points) -> Values:
        total = np.zeros(points.shape[0])
        for child in self.children:
            total = total + child.evaluate(points)
        return total

    def bounds(self) -> tuple[float, float]:
        sup = lip = 0.0
        for child in self.children:
            s, l_ = child.bounds()
            sup += s
            lip += l_
        return sup, lip

    def coordinates(self) -> set[int]:
        return set().union(*(child.coordinates() for child in self.children))

    def remap(self, mapping: Mapping[int, int]) -> Expr:
        return Sum(tuple(child.remap(mapping) for child in self.children))

    def to_dict(self) -> dict[str, Any]:
        return {"tag": self.tag, "children": [child.to_dict() for child in self.children]}

    def size(self) -> int:
        return 1 + sum(child.size() for child in self.children)


@dataclass(slots=True, frozen=True)
class Prod(Expr):
    tag: ClassVar[str] = "prod"
    children: tuple[Expr, ...]

    def evaluate(self, points: Points) -> Values:
        total = np.ones(points.shape[0])
        for child in self.children:
            total = total * child.evaluate(points)
        return total

    def bounds(self) -> tuple[float, float]:
        pairs = [child.bounds() for child in self.children]
        sup = math.prod(s for s, _ in pairs)
        lip = 0.0
        for i, (_, l_i) in enumerate(pairs):
            lip += l_i * math.prod(s for j, (s, _) in enumerate(pairs) if j != i)
        return sup, lip

    def coordinates(self) -> set[int]:
        return set().union(*(child.coordinates() for child in self.children))

    def remap(self, mapping: Mapping[int, int]) -> Expr:
        return Prod(tuple(child.remap(mapping) for child in self.children))

    def to_dict(self) -> dict[str, Any]:
        return {"tag": self.tag, "children": [child.to_dict() for child in self.children]}

    def size(self) -> int:
        return 1 + sum(child.size() for child in self.children)


def complement(expr: Expr) -> Expr:
    """``1 - expr``."""
    return Sum((Const(1.0), Prod((Const(-1.0), expr))))


def positive_part(expr: Expr) -> Expr:
    """``max(expr, 0)`` for expressions bounded by 1."""
    return Clamp(expr)


def negative_part(expr: Expr) -> Expr:
    """``max(-expr, 0)`` for expressions bounded by 1."""
    return Clamp(Prod((Const(-1.0), expr)))


_NODE_TYPES: dict[str, type[Expr]] = {
    cls.tag: cls for cls in (Const, RePhase, ImPhase, Ramp, Clamp, Sum, Prod)
}


def expression_from_dict(payload: Mapping[str, Any]) -> Expr:
    """Rebuild an expression tree from its JSON form."""
    try:
        tag = payload["tag"]
    except (KeyError, TypeError) as err:
        raise InvalidArgumentError(f"expression node without a tag: {payload!r}") from err
    if tag not in _NODE_TYPES:
        raise InvalidArgumentError(f"unknown expression tag {tag!r}")
    try:
        if tag == "const":
            return Const(float(payload["value"]))
        if tag == "re_phase":
            return RePhase(int(payload["coord"]))
        if tag == "im_phase":
            return ImPhase(int(payload["coord"]))
        if tag == "ramp":
            return Ramp(
                float(payload["threshold"]),
                float(payload["width"]),
                expression_from_dict(payload["child"]),
            )
        if tag == "clamp":
            return Clamp(expression_from_dict(payload["child"]))
        children = tuple(expression_from_dict(child) for child in payload["children"])
        return Sum(children) if tag == "sum" else Prod(children)
    except (KeyError, TypeError, ValueError) as err:
        raise InvalidArgumentError(f"malformed '{tag}' node: {err}") from err


# ----------------------------------------------------------------------
# Witnesses
# ----------------------------------------------------------------------
def torus_distance(x: Points, y: Points) -> Values:
    """Euclidean torus distance ``min_z ‖x - y - z‖₂`` row by row."""
    diff = np.asarray(x) - np.asarray(y)
    diff = diff - np.round(diff)
    return np.sqrt(np.sum(diff * diff, axis=-1))


@dataclass(slots=True, frozen=True)
class StructureWitness:
    """Certifies ``1``-complexity: ``f(n) = F(θn)`` with ``F`` given by ``expr``."""

    theta: TorusPoint
    expr: Expr

    def __post_init__(self) -> None:
        used = self.expr.coordinates()
        if used and max(used) >= self.theta.dim:
            raise InvalidArgumentError(
                f"expression uses coordinate {max(used)} of a {self.theta.dim}-dimensional torus"
            )

    @classmethod
    def constant(cls, value: float) -> StructureWitness:
        return cls(theta=TorusPoint.zero(0), expr=Const(float(value)))

    @property
    def dim(self) -> int:
        return self.theta.dim

    @property
    def sup_bound(self) -> float:
        return self.expr.bounds()[0]

    @property
    def lipschitz_constant(self) -> float:
        return self.expr.bounds()[1]

    @property
    def lip_bound(self) -> float:
        """Bound on ``‖F‖_Lip = sup|F| + Lip(F)``."""
        sup, lip = self.expr.bounds()
        return sup + lip

    @property
    def complexity(self) -> float:
        return max(float(self.dim), self.lip_bound)

    def evaluate_points(self, points: Points) -> Values:
        pts = np.asarray(points, dtype=np.float64).reshape(-1, self.dim)
        return self.expr.evaluate(pts)

    def evaluate_on(self, n_max: int) -> Values:
        """``F(θn)`` for ``n = 1..N`` with ``θn`` reduced exactly."""
        ns = np.arange(1, n_max + 1)
        return self.expr.evaluate(self.theta.orbit(ns))

    def spot_check_lipschitz(self, samples: int = 256, seed: int = 0) -> tuple[bool, float]:
        """Check ``|F(x) - F(y)| <= Lip·d(x, y)`` on seeded random pairs.

        Returns the verdict and the largest observed difference quotient.
        """
        if self.dim == 0:
            return True, 0.0
        rng = np.random.default_rng(seed)
        x = rng.random((samples, self.dim))
        # Half the pairs are close together so that the local slope is probed.
        y = rng.random((samples, self.dim))
        y[: samples // 2] = x[: samples // 2] + rng.normal(scale=1e-3, size=(samples // 2, self.dim))
        y %= 1.0
        distance = torus_distance(x, y)
        mask = distance > 0
        quotient = np.abs(self.expr.evaluate(x) - self.expr.evaluate(y))[mask] / distance[mask]
        worst = float(np.max(quotient, initial=0.0))
        return worst <= self.lipschitz_constant * (1 + 1e-9) + 1e-12, worst

    def to_dict(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "theta": self.theta.to_dict(),
            "expr": self.expr.to_dict(),
            "lip_bound": self.lip_bound,
            "complexity": self.complexity,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> StructureWitness:
        theta = TorusPoint.from_dict(dict(payload["theta"]))
        return cls(theta=theta, expr=expression_from_dict(payload["expr"]))


def merge_frequencies(thetas: Sequence[TorusPoint]) -> tuple[TorusPoint, list[dict[int, int]]]:
    """Place several witnesses on one product torus.

    Distinct coordinates are kept in first-seen order; the returned mappings
    send each witness's coordinate index to its merged index.
    """
    merged: list[Fraction] = []
    mappings: list[dict[int, int]] = []
    for theta in thetas:
        mapping: dict[int, int] = {}
        for j, value in enumerate(theta.coords):
            if value not in merged:
                merged.append(value)
            mapping[j] = merged.index(value)
        mappings.append(mapping)
    return TorusPoint(tuple(merged)), mappings
