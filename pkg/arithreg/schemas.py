"""Pydantic models for the JSON files read by the ``arithreg`` command line.

Every file is validated here before it reaches the numeric code, so shape
errors surface as ``pydantic.ValidationError`` with the offending field.
"""
from __future__ import annotations

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .counting import ProductTrigPolynomial, Progression, TrigPolynomial
from .diophantine import TorusPoint
from .fourier import IntervalFunction, Spectrum


class _Schema(BaseModel):
    model_config = ConfigDict(extra="ignore", frozen=True)


class FunctionFile(_Schema):
    """``{"n": N, "m": M, "values": [f(1), ..., f(N)]}``; ``m`` defaults to ``2N``."""

    n: int = Field(ge=1)
    m: int | None = None
    values: list[float]

    @model_validator(mode="after")
    def _check_shape(self) -> FunctionFile:
        if len(self.values) != self.n:
            raise ValueError(f"expected {self.n} values, got {len(self.values)}")
        if self.m is not None and self.m < 2 * self.n:
            raise ValueError(f"m={self.m} is smaller than 2n={2 * self.n}")
        return self

    def to_function(self) -> IntervalFunction:
        return IntervalFunction.from_values(self.values, self.m)

    @classmethod
    def from_function(cls, f: IntervalFunction) -> FunctionFile:
        return cls(n=f.n_max, m=f.ambient_modulus, values=[float(v) for v in f.values])


class SpectrumFile(_Schema):
    m: int = Field(ge=1)
    re: list[float]
    im: list[float]

    @model_validator(mode="after")
    def _check_shape(self) -> SpectrumFile:
        if len(self.re) != self.m or len(self.im) != self.m:
            raise ValueError(f"expected {self.m} real and imaginary parts")
        return self

    def to_spectrum(self) -> Spectrum:
        return Spectrum(self.m, np.asarray(self.re) + 1j * np.asarray(self.im))

    @classmethod
    def from_spectrum(cls, spectrum: Spectrum) -> SpectrumFile:
        return cls(
            m=spectrum.modulus,
            re=spectrum.coeffs.real.tolist(),
            im=spectrum.coeffs.imag.tolist(),
        )


class TorusPointFile(_Schema):
    """Exact coordinates as ``[numerator, denominator]`` pairs."""

    dim: int = Field(ge=0)
    coords: list[tuple[int | str, int | str]]

    @model_validator(mode="after")
    def _check_dim(self) -> TorusPointFile:
        if len(self.coords) != self.dim:
            raise ValueError(f"dim={self.dim} but {len(self.coords)} coordinates were given")
        return self

    def to_point(self) -> TorusPoint:
        return TorusPoint.from_dict(self.model_dump())


class TermModel(_Schema):
    m: list[int]
    re: float
    im: float = 0.0


class TrigPolynomialFile(_Schema):
    dim: int = Field(ge=1)
    terms: list[TermModel]

    @model_validator(mode="after")
    def _check_terms(self) -> TrigPolynomialFile:
        for term in self.terms:
            if len(term.m) != self.dim:
                raise ValueError(f"frequency {term.m} does not live in Z^{self.dim}")
        return self

    def to_polynomial(self) -> TrigPolynomial:
        return TrigPolynomial.from_dict(self.model_dump())


class StructuredTermModel(_Schema):
    k: int
    a: int
    m: list[int]
    re: float
    im: float = 0.0


class ProductTrigPolynomialFile(_Schema):
    q: int = Field(ge=1)
    dim: int = Field(ge=0)
    terms: list[StructuredTermModel]

    @model_validator(mode="after")
    def _check_terms(self) -> ProductTrigPolynomialFile:
        for term in self.terms:
            if len(term.m) != self.dim:
                raise ValueError(f"frequency {term.m} does not live in Z^{self.dim}")
        return self

    def to_polynomial(self) -> ProductTrigPolynomial:
        terms: dict[tuple[int, int, tuple[int, ...]], complex] = {}
        for term in self.terms:
            key = (term.k, term.a % self.q, tuple(term.m))
            terms[key] = terms.get(key, 0j) + complex(term.re, term.im)
        return ProductTrigPolynomial.from_terms(self.q, self.dim, terms)


class ProgressionModel(_Schema):
    start: int = Field(ge=1)
    step: int = Field(ge=1)
    length: int = Field(ge=1)

    def to_progression(self) -> Progression:
        return Progression(self.start, self.step, self.length)


class CountJobFile(_Schema):
    """Input of ``count``: a polynomial plus an optional point and progression."""

    polynomial: TrigPolynomialFile | ProductTrigPolynomialFile
    theta: TorusPointFile | None = None
    progression: ProgressionModel | None = None


class FactorModel(_Schema):
    n: int = Field(ge=1)
    cells: list[list[int]]
    generators: list[str] = Field(default_factory=list)


class WitnessModel(_Schema):
    theta: TorusPointFile
    expr: dict[str, Any]


IRRATIONAL_FIELDS = ("irrational_m_value", "q", "f_tilde", "decomposition", "growth_audit", "lip_bound")


class CertificateFile(_Schema):
    """A regularity certificate as written by ``decompose`` or ``decompose-irrational``."""

    n: int = Field(ge=1)
    m: int
    epsilon: float = Field(gt=0, le=1)
    growth: str
    base_growth: str | None = None
    m_value: float
    f_str: list[float]
    f_sml: list[float]
    f_unf: list[float]
    witness: WitnessModel
    factor: FactorModel
    measured: dict[str, float] = Field(default_factory=dict)
    theta_irr: TorusPointFile | None = None
    irrational_m_value: float | None = None
    q: int | None = Field(default=None, ge=1)
    f_tilde: dict[str, Any] | None = None
    decomposition: dict[str, Any] | None = None
    growth_audit: dict[str, Any] | None = None
    lip_bound: float | None = None

    @model_validator(mode="after")
    def _check_lengths(self) -> CertificateFile:
        for name in ("f_str", "f_sml", "f_unf"):
            if len(getattr(self, name)) != self.n:
                raise ValueError(f"{name} has {len(getattr(self, name))} values, expected {self.n}")
        if self.factor.n != self.n:
            raise ValueError(f"factor partitions [{self.factor.n}], expected [{self.n}]")
        if self.theta_irr is not None:
            missing = [name for name in IRRATIONAL_FIELDS if getattr(self, name) is None]
            if missing:
                raise ValueError(f"irrational certificate is missing {', '.join(missing)}")
        return self

    @property
    def is_irrational(self) -> bool:
        return self.theta_irr is not None

    @property
    def regularity_growth(self) -> str:
        """The growth the base certificate was produced with."""
        return self.base_growth or self.growth
