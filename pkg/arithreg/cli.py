"""Command line entry point: ``arithreg <command> [options]``.

Exit status: 0 on success, 1 when a certificate fails (or a counterexample is
found), 2 on input errors, 3 when a resource budget is exhausted.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, TypeVar

from pydantic import BaseModel, ValidationError

from .config import RegularityConfig, load_config
from .counting import (
    ProductTrigPolynomial,
    Progression,
    TrigPolynomial,
    geometric_sum_bounds,
    irrationality_sweep,
    random_trig_polynomial,
    structured_diagnostic,
)
from .diophantine import decompose_theta, find_irrational_point, is_irrational, verify_decomposition
from .exceptions import (
    ArithRegError,
    CertificateError,
    ConfigNotFoundError,
    InvalidArgumentError,
    ResourceBudgetError,
    WeakRegularityError,
)
from .fourier import IntervalFunction, dft, u2_norm_interval
from .growth import parse_growth
from .irrational import (
    IrrationalCertificate,
    regularize_irrational,
    verify_irrational_certificate,
)
from .regularity import RegularityCertificate, regularize, verify_certificate
from .reports import VerificationReport
from .schemas import CertificateFile, CountJobFile, FunctionFile, SpectrumFile, TorusPointFile
from .synth import synthesize

logger = logging.getLogger("arithreg.cli")

SchemaT = TypeVar("SchemaT", bound=BaseModel)

COMMANDS = (
    "spectrum",
    "u2",
    "decompose",
    "decompose-irrational",
    "verify",
    "theta-decompose",
    "irrational-check",
    "count",
    "synth",
)

DEFAULT_GROWTH = "poly:10,1"
DEFAULT_EPSILON = 0.25
DEFAULT_SWEEP_DEGREE = 3
DEFAULT_SWEEP_LIPSCHITZ = 10.0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arithreg",
        description="Certified U² arithmetic regularity decompositions.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", action="append", type=Path, default=[], help="Input JSON file. Repeatable.")
    parser.add_argument("--output", type=Path, help="Write the JSON artifact here instead of stdout.")
    parser.add_argument("--csv", type=Path, help="Also write a plot-ready CSV table.")
    parser.add_argument("--epsilon", type=float, default=None, help=f"Target L² size of f_sml (default {DEFAULT_EPSILON}).")
    parser.add_argument("--growth", default=None, help=f"Growth spec (default {DEFAULT_GROWTH}).")
    parser.add_argument("--A", dest="a_param", type=int, default=None, help="Irrationality level A.")
    parser.add_argument("--N", dest="n_param", type=int, default=None, help="Length N of the interval [N].")
    parser.add_argument("--q", type=int, default=1, help="Modulus of the structured domain.")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--sweep", default=None, help="Comma-separated levels, e.g. A=25,50,100,200.")
    parser.add_argument("--generator", default=None, help="Generator spec for synth, e.g. cosine:1,3.")
    parser.add_argument("--config", type=Path, default=None, help="YAML configuration file.")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level.")
    return parser


# ----------------------------------------------------------------------
# I/O helpers
# ----------------------------------------------------------------------
def _read_json(path: Path) -> Any:
    text = path.read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        exc.add_note(str(path))
        raise


def _load(path: Path, schema: type[SchemaT]) -> SchemaT:
    return schema.model_validate(_read_json(path))


def _dump(payload: Any) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _emit(args: argparse.Namespace, payload: Any) -> None:
    text = _dump(payload)
    if args.output:
        args.output.write_text(text, encoding="utf-8", newline="\n")
        logger.info("wrote %s", args.output)
    else:
        sys.stdout.write(text)


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.info("wrote %d rows to %s", len(rows), path)


def _single_input(args: argparse.Namespace) -> Path:
    if len(args.input) != 1:
        raise InvalidArgumentError(f"{args.command} needs exactly one --input, got {len(args.input)}")
    return args.input[0]


def _load_function(path: Path) -> IntervalFunction:
    return _load(path, FunctionFile).to_function()


def _epsilon(args: argparse.Namespace) -> float:
    return float(args.epsilon) if args.epsilon is not None else DEFAULT_EPSILON


def _require_n(args: argparse.Namespace) -> int:
    if args.n_param is None or args.n_param < 1:
        raise InvalidArgumentError(f"{args.command} needs --N >= 1")
    return int(args.n_param)


def _parse_levels(text: str) -> list[int]:
    _, _, values = text.rpartition("=")
    try:
        levels = [int(token) for token in values.split(",") if token.strip()]
    except ValueError as err:
        raise InvalidArgumentError(f"bad --sweep value {text!r}") from err
    if not levels or any(level < 1 for level in levels):
        raise InvalidArgumentError(f"--sweep needs positive levels, got {text!r}")
    return levels


def _require_pass(report: VerificationReport) -> None:
    if not report.passed:
        raise CertificateError(report.failures)


def _component_rows(f: IntervalFunction, cert: RegularityCertificate) -> list[list[Any]]:
    return [
        [n + 1, float(f.values[n]), float(cert.f_str.values[n]), float(cert.f_sml.values[n]), float(cert.f_unf.values[n])]
        for n in range(f.n_max)
    ]


COMPONENT_HEADER = ("n", "f", "f_str", "f_sml", "f_unf")


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------
def _spectrum(args: argparse.Namespace, config: RegularityConfig) -> int:
    f = _load_function(_single_input(args))
    spectrum = dft(f.embed())
    _emit(args, SpectrumFile.from_spectrum(spectrum).model_dump())
    if args.csv:
        rows = [[r, c.real, c.imag, abs(c)] for r, c in enumerate(spectrum.coeffs.tolist())]
        _write_csv(args.csv, ("r", "re", "im", "abs"), rows)
    return 0


def _u2(args: argparse.Namespace, config: RegularityConfig) -> int:
    f = _load_function(_single_input(args))
    value = u2_norm_interval(f, config=config)
    if args.output:
        _emit(args, {"n": f.n_max, "m": f.ambient_modulus, "u2": value})
    else:
        print(round(value, 12))
    return 0


def _decompose(args: argparse.Namespace, config: RegularityConfig) -> int:
    f = _load_function(_single_input(args))
    growth = parse_growth(args.growth or DEFAULT_GROWTH)
    cert = regularize(f, _epsilon(args), growth, config=config)
    _emit(args, cert.to_dict())
    if args.csv:
        _write_csv(args.csv, COMPONENT_HEADER, _component_rows(f, cert))
    assert cert.report is not None
    _require_pass(cert.report)
    return 0


def _decompose_irrational(args: argparse.Namespace, config: RegularityConfig) -> int:
    f = _load_function(_single_input(args))
    growth = parse_growth(args.growth or DEFAULT_GROWTH)
    cert = regularize_irrational(f, _epsilon(args), growth, config=config)
    _emit(args, cert.to_dict())
    if args.csv:
        _write_csv(args.csv, COMPONENT_HEADER, _component_rows(f, cert.base))
    assert cert.report is not None
    _require_pass(cert.report)
    return 0


def _verify(args: argparse.Namespace, config: RegularityConfig) -> int:
    if len(args.input) != 2:
        raise InvalidArgumentError("verify needs --input CERTIFICATE --input FUNCTION")
    raw = _read_json(args.input[0])
    schema = CertificateFile.model_validate(raw)
    f = _load_function(args.input[1])
    epsilon = args.epsilon if args.epsilon is not None else schema.epsilon
    if schema.is_irrational:
        irrational = IrrationalCertificate.from_dict(raw)
        growth = parse_growth(args.growth or schema.growth)
        report = verify_irrational_certificate(irrational, f, epsilon, growth, config=config)
    else:
        cert = RegularityCertificate.from_dict(raw)
        growth = parse_growth(args.growth or schema.regularity_growth)
        report = verify_certificate(cert, f, epsilon, growth, config=config)
    _emit(args, report.to_dict())
    _require_pass(report)
    return 0


def _theta_decompose(args: argparse.Namespace, config: RegularityConfig) -> int:
    theta = _load(_single_input(args), TorusPointFile).to_point()
    n_param = _require_n(args)
    growth = parse_growth(args.growth or DEFAULT_GROWTH)
    dec = decompose_theta(theta, n_param, growth, config=config)
    report = verify_decomposition(dec, growth, config=config)
    _emit(args, {"decomposition": dec.to_dict(), "report": report.to_dict()})
    _require_pass(report)
    return 0


def _irrational_check(args: argparse.Namespace, config: RegularityConfig) -> int:
    n_param = _require_n(args)
    if args.a_param is None:
        raise InvalidArgumentError("irrational-check needs --A")
    if args.input:
        theta = _load(_single_input(args), TorusPointFile).to_point()
        check = is_irrational(theta, args.a_param, n_param, config=config)
    else:
        theta, check = find_irrational_point(args.a_param, n_param, config=config)
    _emit(args, {"theta": theta.to_dict(), "check": check.to_dict()})
    return 0 if check.passed else 1


def _count_polynomial(args: argparse.Namespace) -> tuple[CountJobFile | None, TrigPolynomial | ProductTrigPolynomial]:
    if args.input:
        raw = _read_json(_single_input(args))
        if "polynomial" not in raw:
            raw = {"polynomial": raw}
        job = CountJobFile.model_validate(raw)
        return job, job.polynomial.to_polynomial()
    seed = args.seed if args.seed is not None else 0
    logger.debug("random polynomial with seed %d", seed)
    return None, random_trig_polynomial(1, DEFAULT_SWEEP_DEGREE, DEFAULT_SWEEP_LIPSCHITZ, seed)


def _count(args: argparse.Namespace, config: RegularityConfig) -> int:
    n_param = _require_n(args)
    job, poly = _count_polynomial(args)

    if args.sweep:
        if not isinstance(poly, TrigPolynomial):
            raise InvalidArgumentError("--sweep needs a polynomial on T^d")
        rows = irrationality_sweep(poly, _parse_levels(args.sweep), n_param, config=config)
        _emit(args, {"N": n_param, "polynomial": poly.to_dict(), "rows": [row.to_dict() for row in rows]})
        if args.csv:
            table = [[row.a_param, row.error, row.geometric_bound, row.lemma_bound] for row in rows]
            _write_csv(args.csv, ("A", "error", "geometric_bound", "lemma_bound"), table)
        return 0

    a_param = args.a_param
    if job is not None and job.theta is not None:
        theta = job.theta.to_point()
    else:
        if a_param is None:
            raise InvalidArgumentError("count needs --A or a point in the input")
        theta, _ = find_irrational_point(a_param, n_param, poly.dim, config=config)

    payload: dict[str, Any] = {"N": n_param, "A": a_param, "theta": theta.to_dict(), "polynomial": poly.to_dict()}
    if isinstance(poly, TrigPolynomial) and args.q > 1:
        poly = ProductTrigPolynomial.from_terms(args.q, poly.dim, {(0, 0, m): c for m, c in poly.terms})
    if isinstance(poly, ProductTrigPolynomial):
        structured = structured_diagnostic(poly, theta, n_param)
        payload["diagnostic"] = structured.to_dict()
        if args.csv:
            rows = [[t.key[0], t.key[1], " ".join(map(str, t.key[2])), t.case, t.observed, t.bound] for t in structured.terms]
            _write_csv(args.csv, ("k", "a", "m", "case", "observed", "bound"), rows)
        _emit(args, payload)
        return 0 if structured.passed else 1

    progression = job.progression.to_progression() if job and job.progression else Progression.interval(n_param)
    diag = geometric_sum_bounds(poly, theta, progression, n_max=n_param, a_param=a_param)
    payload["progression"] = progression.to_dict()
    payload["diagnostic"] = diag.to_dict()
    if args.csv:
        rows = [[" ".join(map(str, t.frequency)), t.magnitude, t.distance, t.observed, t.bound] for t in diag.terms]
        _write_csv(args.csv, ("m", "abs_c", "distance", "observed", "bound"), rows)
    _emit(args, payload)
    return 0 if diag.within_bound else 1


def _synth(args: argparse.Namespace, config: RegularityConfig) -> int:
    if not args.generator:
        raise InvalidArgumentError("synth needs --generator")
    n_param = _require_n(args)
    seed = args.seed if args.seed is not None else config.seed
    f = synthesize(args.generator, n_param, seed=seed)
    _emit(args, FunctionFile.from_function(f).model_dump())
    return 0


HANDLERS: dict[str, Callable[[argparse.Namespace, RegularityConfig], int]] = {
    "spectrum": _spectrum,
    "u2": _u2,
    "decompose": _decompose,
    "decompose-irrational": _decompose_irrational,
    "verify": _verify,
    "theta-decompose": _theta_decompose,
    "irrational-check": _irrational_check,
    "count": _count,
    "synth": _synth,
}


def run(args: argparse.Namespace) -> int:
    """Dispatch one job and map failures to exit codes."""
    try:
        overrides = {"seed": args.seed} if args.seed is not None else {}
        config = load_config(args.config, **overrides)
        return HANDLERS[args.command](args, config)
    except CertificateError as exc:
        logger.warning("certificate failed: %s", ", ".join(exc.failing_clauses))
        print(f"error: certificate failed clauses: {', '.join(exc.failing_clauses)}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        where = f"{exc.__notes__[0]}: " if getattr(exc, "__notes__", None) else ""
        print(f"error: {where}malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return 2
    except (InvalidArgumentError, ConfigNotFoundError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ResourceBudgetError, WeakRegularityError) as exc:
        print(f"error: resource budget exhausted: {exc}", file=sys.stderr)
        return 3
    except ArithRegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
