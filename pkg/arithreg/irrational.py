"""Regularity with an irrational frequency.

``regularize_irrational`` runs ``regularize`` under an inflated growth
function, splits the frequency of the structured witness into smooth,
rational and irrational parts, and rewrites ``f_str(n) = F(θn)`` as
``F̃(n/N, n mod q, z_n)`` where ``z_n`` are chart coordinates of the
irrational part.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np
import numpy.typing as npt

from .config import DEFAULT_CONFIG, RegularityConfig
from .counting import Domain, IntegralEstimate, integral_estimate
from .diophantine import (
    SubtorusChart,
    ThetaDecomposition,
    TorusPoint,
    as_fraction,
    decompose_theta,
    is_irrational,
    verify_decomposition,
)
from .exceptions import GrowthAuditError, InvalidArgumentError
from .fourier import IntervalFunction, u2_norm_interval
from .growth import GrowthFunction
from .regularity import RegularityCertificate, regularize, verify_certificate
from .reports import VerificationReport
from .telemetry import NULL_REPORTER, TelemetryReporter
from .witness import Expr, StructureWitness, expression_from_dict

logger = logging.getLogger("arithreg.irrational")

Points = npt.NDArray[np.float64]


@dataclass(slots=True, frozen=True, eq=False)
class StructuredFunction:
    """``F̃(x, y, z) = F(N·θ_smth·x + θ_rat·y + L⁻¹(z, 0))``."""

    expr: Expr
    n_param: int
    q: int
    smooth: tuple[Fraction, ...]
    rational: TorusPoint
    chart: SubtorusChart
    chart_point: TorusPoint

    @property
    def ambient_dim(self) -> int:
        return len(self.smooth)

    @property
    def chart_dim(self) -> int:
        return self.chart.dim

    def lift_columns(self) -> tuple[tuple[int, ...], ...]:
        """The first ``d'`` columns of ``L⁻¹``, as a ``d × d'`` matrix."""
        if self.ambient_dim == 0:
            return ()
        inverse = self.chart.inverse()
        return tuple(tuple(row[: self.chart_dim]) for row in inverse)

    def __call__(self, x: npt.ArrayLike, y: npt.ArrayLike, z: npt.ArrayLike) -> npt.NDArray[np.float64]:
        xs = np.asarray(x, dtype=np.float64).reshape(-1)
        ys = np.asarray(y, dtype=np.int64).reshape(-1)
        zs = np.asarray(z, dtype=np.float64).reshape(xs.shape[0], self.chart_dim)
        d = self.ambient_dim
        smooth = np.array([float(v) for v in self.smooth]) * self.n_param
        rational = self.rational.to_floats()
        points = np.outer(xs, smooth).reshape(-1, d) + np.outer(ys, rational).reshape(-1, d)
        if self.chart_dim:
            lift = np.array(self.lift_columns(), dtype=np.float64).reshape(d, self.chart_dim)
            points = points + zs @ lift.T
        return self.expr.evaluate(points % 1.0)

    def points_at(self, ns: npt.ArrayLike) -> Points:
        """Exact images of ``(n/N, n mod q, z_n)`` on ``T^d``, rounded once at the end."""
        n_obj = np.asarray(ns, dtype=np.int64).reshape(-1).astype(object)
        d = self.ambient_dim
        if d == 0:
            return np.zeros((n_obj.shape[0], 0))
        denominator = math.lcm(
            *(v.denominator for v in self.smooth),
            self.rational.common_denominator(),
            self.chart_point.common_denominator(),
        )
        smooth = np.array([int(v * denominator) for v in self.smooth], dtype=object)
        rational = np.array([int(v * denominator) for v in self.rational.coords], dtype=object)
        total = np.outer(n_obj, smooth) + np.outer(n_obj % self.q, rational)
        if self.chart_dim:
            chart = np.array([int(v * denominator) for v in self.chart_point.coords], dtype=object)
            z_num = np.outer(n_obj, chart) % denominator
            lift = np.array(self.lift_columns(), dtype=object).reshape(d, self.chart_dim)
            total = total + z_num.dot(lift.T)
        total = total % denominator
        return np.array(
            [[float(Fraction(int(v), denominator)) for v in row] for row in total], dtype=np.float64
        ).reshape(-1, d)

    def at(self, ns: npt.ArrayLike) -> npt.NDArray[np.float64]:
        return self.expr.evaluate(self.points_at(ns))

    def lipschitz_bound(self) -> float:
        """``sup|F̃| + Lip(F̃)`` for the sum of the metrics on the three factors."""
        sup, lip = self.expr.bounds()
        smooth_norm = math.sqrt(sum(float(v) ** 2 for v in self.smooth))
        stretch = lip * self.n_param * smooth_norm
        residue = min(2 * sup, lip * math.sqrt(self.ambient_dim) / 2) if self.q > 1 else 0.0
        lift = 0.0
        if self.chart_dim:
            frobenius = math.sqrt(sum(v * v for row in self.lift_columns() for v in row))
            lift = lip * frobenius
        return sup + max(stretch, residue, lift)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n_param,
            "q": self.q,
            "smooth": [[str(v.numerator), str(v.denominator)] for v in self.smooth],
            "rational": self.rational.to_dict(),
            "chart_dim": self.chart_dim,
            "lift": [list(row) for row in self.lift_columns()],
            "chart": self.chart.to_dict(),
            "chart_point": self.chart_point.to_dict(),
            "expr": self.expr.to_dict(),
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> StructuredFunction:
        try:
            return cls(
                expr=expression_from_dict(payload["expr"]),
                n_param=int(payload["n"]),
                q=int(payload["q"]),
                smooth=tuple(as_fraction(tuple(pair), name="smooth") for pair in payload["smooth"]),
                rational=TorusPoint.from_dict(payload["rational"]),
                chart=SubtorusChart.from_dict(payload["chart"]),
                chart_point=TorusPoint.from_dict(payload["chart_point"]),
            )
        except (KeyError, TypeError, ValueError) as err:
            raise InvalidArgumentError(f"malformed structured function: {err}") from err


@dataclass(slots=True, frozen=True)
class GrowthAudit:
    """The chain ``F₁(M₁) >= F₂(M₂) >= F(M)``."""

    m1: float
    m2: float
    m_value: float
    outer: float
    inner: float
    target: float

    @property
    def passed(self) -> bool:
        return self.outer >= self.inner >= self.target

    def to_dict(self) -> dict[str, Any]:
        return {
            "M1": self.m1,
            "M2": self.m2,
            "M": self.m_value,
            "F1(M1)": self.outer,
            "F2(M2)": self.inner,
            "F(M)": self.target,
            "passed": self.passed,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> GrowthAudit:
        return cls(
            m1=float(payload["M1"]),
            m2=float(payload["M2"]),
            m_value=float(payload["M"]),
            outer=float(payload["F1(M1)"]),
            inner=float(payload["F2(M2)"]),
            target=float(payload["F(M)"]),
        )


@dataclass(slots=True)
class IrrationalCertificate:
    """A regularity certificate whose structured part has an irrational frequency."""

    base: RegularityCertificate
    decomposition: ThetaDecomposition
    f_tilde: StructuredFunction
    lip_bound: float
    m_value: float
    growth_spec: str
    audit: GrowthAudit
    report: VerificationReport | None = None

    @property
    def q(self) -> int:
        return self.f_tilde.q

    @property
    def chart(self) -> SubtorusChart:
        return self.decomposition.chart

    @property
    def theta_irr(self) -> TorusPoint:
        """Chart coordinates of the irrational part, a point of ``T^{d'}``."""
        return self.decomposition.irrational_coordinates

    @property
    def n_max(self) -> int:
        return self.base.n_max

    def to_dict(self) -> dict[str, Any]:
        payload = self.base.to_dict()
        payload.update(
            {
                "growth": self.growth_spec,
                "base_growth": self.base.growth_spec,
                "irrational_m_value": self.m_value,
                "q": self.q,
                "chart": self.chart.to_dict(),
                "theta_irr": self.theta_irr.to_dict(),
                "f_tilde": self.f_tilde.to_dict(),
                "lip_bound": self.lip_bound,
                "decomposition": self.decomposition.to_dict(),
                "growth_audit": self.audit.to_dict(),
                "report": self.report.to_dict() if self.report else None,
            }
        )
        return payload

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> IrrationalCertificate:
        """Read back a certificate written by ``to_dict``.

        The top-level ``q`` is the advertised residue modulus and takes
        precedence over the copy stored with ``f_tilde``.
        """
        try:
            base_payload = {**payload, "growth": payload.get("base_growth") or payload["growth"]}
            structured = {**payload["f_tilde"], "q": payload.get("q", payload["f_tilde"].get("q"))}
            return cls(
                base=RegularityCertificate.from_dict(base_payload),
                decomposition=ThetaDecomposition.from_dict(payload["decomposition"]),
                f_tilde=StructuredFunction.from_dict(structured),
                lip_bound=float(payload["lip_bound"]),
                m_value=float(payload["irrational_m_value"]),
                growth_spec=str(payload["growth"]),
                audit=GrowthAudit.from_dict(payload["growth_audit"]),
            )
        except (KeyError, TypeError, ValueError) as err:
            raise InvalidArgumentError(f"malformed irrational certificate: {err}") from err


def inflated_growths(growth: GrowthFunction, config: RegularityConfig = DEFAULT_CONFIG) -> tuple[GrowthFunction, GrowthFunction]:
    """``(F₁, F₂)`` with ``F₂(M) = F(c₂M²)`` and ``F₁(M) = F₂(c₁M²)``."""
    inner = growth.inflate(config.inflation_c2)
    return inner.inflate(config.inflation_c1), inner


def _structured_function(witness: StructureWitness, dec: ThetaDecomposition, n_param: int) -> StructuredFunction:
    return StructuredFunction(
        expr=witness.expr,
        n_param=n_param,
        q=dec.torsion_order,
        smooth=dec.smooth.signed(),
        rational=dec.rational,
        chart=dec.chart,
        chart_point=dec.irrational_coordinates,
    )


def regularize_irrational(
    f: IntervalFunction,
    epsilon: float,
    growth: GrowthFunction,
    *,
    config: RegularityConfig = DEFAULT_CONFIG,
    reporter: TelemetryReporter = NULL_REPORTER,
) -> IrrationalCertificate:
    """Decompose ``f`` with ``f_str(n) = F̃(n/N, n mod q, θn)`` and ``θ`` irrational.

    The Diophantine split starts at the complexity ``M₁`` reached by the
    regularity step; the final complexity is
    ``M = max(M₂, ‖F̃‖_Lip, q, d')``.

    A certificate is returned even when one of its clauses fails; the
    failures are logged and listed in ``cert.report``, which callers must
    inspect. A failing growth audit raises ``GrowthAuditError`` instead.
    """
    outer, inner = inflated_growths(growth, config)
    n_param = f.n_max
    with reporter.span("regularize_irrational", n=n_param, epsilon=epsilon) as span:
        base = regularize(f, epsilon, outer, config=config, reporter=reporter)
        m1 = base.m_value
        dec = decompose_theta(
            base.witness.theta, n_param, inner, start_m=math.ceil(m1), config=config, reporter=reporter
        )
        m2 = float(dec.m_value)
        f_tilde = _structured_function(base.witness, dec, n_param)
        lip = f_tilde.lipschitz_bound()
        m_value = max(m2, lip, float(dec.torsion_order), float(dec.chart.dim))
        audit = GrowthAudit(m1, m2, m_value, outer(m1), inner(m2), growth(m_value))
        span.update(q=dec.torsion_order, chart_dim=dec.chart.dim, m_value=m_value)

    if not audit.passed:
        logger.warning("growth audit failed: %s", audit.to_dict())
        raise GrowthAuditError(audit.outer, audit.inner, audit.target)

    certificate = IrrationalCertificate(
        base=base,
        decomposition=dec,
        f_tilde=f_tilde,
        lip_bound=lip,
        m_value=m_value,
        growth_spec=growth.spec,
        audit=audit,
    )
    certificate.report = verify_irrational_certificate(certificate, f, epsilon, growth, config=config)
    if not certificate.report.passed:
        logger.warning("irrational certificate failed clauses: %s", certificate.report.failures)
    logger.info(
        "irrational regularity: M1=%.4g M2=%.4g M=%.4g q=%d d'=%d",
        m1, m2, m_value, dec.torsion_order, dec.chart.dim,
    )
    return certificate


def evaluate_structured(cert: IrrationalCertificate, n: int) -> float:
    """``F̃(n/N, n mod q, z_n)`` for ``n`` in ``[N]``."""
    if not 1 <= n <= cert.n_max:
        raise InvalidArgumentError(f"n={n} is not in [1, {cert.n_max}]")
    return float(cert.f_tilde.at([n])[0])


def structured_integral(cert: IrrationalCertificate, *, config: RegularityConfig = DEFAULT_CONFIG) -> IntegralEstimate:
    """``∫F̃`` over ``[0, 1] × Z/qZ × T^{d'}``."""
    domain = Domain("structured", dim=cert.f_tilde.chart_dim, q=cert.q)
    return integral_estimate(cert.f_tilde, domain, lipschitz=cert.lip_bound, config=config)


def verify_irrational_certificate(
    cert: IrrationalCertificate,
    f: IntervalFunction,
    epsilon: float,
    growth: GrowthFunction,
    *,
    config: RegularityConfig = DEFAULT_CONFIG,
) -> VerificationReport:
    """Recheck the base clauses, the structured form and the irrationality of ``θ``."""
    outer, inner = inflated_growths(growth, config)
    report = verify_certificate(cert.base, f, epsilon, outer, config=config)
    n_param = cert.n_max

    unf = u2_norm_interval(cert.base.f_unf, config=config)
    bound = 1.0 / growth(cert.m_value)
    report.add("unf_u2_final", unf <= bound + config.tolerance, measured=unf, bound=bound)

    structured = cert.f_tilde.at(np.arange(1, n_param + 1))
    deviation = float(np.max(np.abs(structured - cert.base.f_str.values)))
    report.add("structured_eval", deviation <= config.tolerance, measured=deviation, bound=config.tolerance)
    dec = cert.decomposition
    consistent = (
        cert.q == dec.torsion_order
        and cert.f_tilde.rational == dec.rational
        and cert.f_tilde.chart == dec.chart
        and cert.f_tilde.chart_point == dec.irrational_coordinates
        and cert.f_tilde.smooth == dec.smooth.signed()
    )
    report.add("structured_parts", consistent, measured=cert.q, bound=dec.torsion_order)

    level = growth.ceil_value(cert.m_value, cap=n_param)
    check = is_irrational(cert.theta_irr, level, n_param, config=config)
    report.add(
        "irrational",
        check.passed,
        measured=str(check.counterexample) if check.counterexample else "pass",
        bound=level,
    )
    m = cert.m_value
    report.add("q_bound", cert.q <= m, measured=cert.q, bound=m)
    report.add("dim_bound", cert.f_tilde.chart_dim <= m, measured=cert.f_tilde.chart_dim, bound=m)
    lip = cert.f_tilde.lipschitz_bound()
    report.add("lip_bound", lip <= m * (1 + config.exact_tolerance), measured=lip, bound=m)

    audit = GrowthAudit(cert.audit.m1, cert.audit.m2, m, outer(cert.audit.m1), inner(cert.audit.m2), growth(m))
    report.add("growth_audit", audit.passed, measured=f"{audit.outer:.6g} >= {audit.inner:.6g} >= {audit.target:.6g}")

    for clause in verify_decomposition(cert.decomposition, inner, config=config).clauses:
        clause.name = f"theta_{clause.name}"
        report.clauses.append(clause)
    return report
