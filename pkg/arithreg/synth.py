"""Deterministic synthetic inputs.

Generator specs::

    constant:c            f(n) = c
    interval:a,b          f(n) = 1 when a < n/N <= b, else 0
    residue:a,q           f(n) = 1 when n ≡ a (mod q), else 0
    cosine:r,Q[,amp]      f(n) = (1 + amp·cos(2πnr/Q)) / 2, amp defaults to 1
    uniform               independent uniform values in [0, 1)
    mix:w1@s1;w2@s2       Σ wᵢ·sᵢ(n), weights >= 0 with Σ wᵢ <= 1

All randomness comes from one ``numpy.random.default_rng(seed)``, consumed in
the order the components appear, so a spec and a seed fix the output.
"""
from __future__ import annotations

import logging
from fractions import Fraction

import numpy as np
import numpy.typing as npt

from .exceptions import InvalidArgumentError
from .fourier import IntervalFunction

logger = logging.getLogger("arithreg.synth")

GENERATORS = ("constant", "interval", "residue", "cosine", "uniform", "mix")


def _numbers(kind: str, args: str, count: tuple[int, int]) -> list[float]:
    tokens = [token.strip() for token in args.split(",")] if args else []
    low, high = count
    if not low <= len(tokens) <= high:
        raise InvalidArgumentError(f"{kind} expects {low}-{high} arguments, got {args!r}")
    values: list[float] = []
    for token in tokens:
        try:
            values.append(float(Fraction(token)))
        except (ValueError, ZeroDivisionError) as err:
            raise InvalidArgumentError(f"bad number {token!r} in generator {kind!r}") from err
    return values


def _generate(spec: str, n_max: int, rng: np.random.Generator) -> npt.NDArray[np.float64]:
    kind, _, args = spec.strip().partition(":")
    ns = np.arange(1, n_max + 1, dtype=np.int64)
    if kind == "constant":
        (c,) = _numbers(kind, args, (1, 1))
        if not 0 <= c <= 1:
            raise InvalidArgumentError(f"constant {c} is outside [0, 1]")
        return np.full(n_max, c)
    if kind == "interval":
        a, b = _numbers(kind, args, (2, 2))
        x = ns / n_max
        return ((x > a) & (x <= b)).astype(np.float64)
    if kind == "residue":
        a, q = _numbers(kind, args, (2, 2))
        if q < 1 or q != int(q) or a != int(a):
            raise InvalidArgumentError(f"residue needs integers a and q >= 1, got {args!r}")
        return (ns % int(q) == int(a) % int(q)).astype(np.float64)
    if kind == "cosine":
        numbers = _numbers(kind, args, (2, 3))
        r, big_q = numbers[0], numbers[1]
        amp = numbers[2] if len(numbers) == 3 else 1.0
        if big_q == 0 or not abs(amp) <= 1:
            raise InvalidArgumentError(f"cosine needs Q != 0 and |amp| <= 1, got {args!r}")
        # Reduce n·r mod Q in integers when possible so the phase stays exact.
        if r == int(r) and big_q == int(big_q):
            phase = (ns * int(r)) % int(big_q) / big_q
        else:
            phase = ns * (r / big_q)
        return 0.5 * (1.0 + amp * np.cos(2 * np.pi * phase))
    if kind == "uniform":
        if args:
            raise InvalidArgumentError(f"uniform takes no arguments, got {args!r}")
        return rng.random(n_max)
    if kind == "mix":
        return _mix(args, n_max, rng)
    raise InvalidArgumentError(f"unknown generator {kind!r}; expected one of {', '.join(GENERATORS)}")


def _mix(args: str, n_max: int, rng: np.random.Generator) -> npt.NDArray[np.float64]:
    total = np.zeros(n_max)
    weight_sum = 0.0
    for part in filter(None, (p.strip() for p in args.split(";"))):
        weight_text, sep, inner = part.partition("@")
        if not sep:
            raise InvalidArgumentError(f"mixture component {part!r} is not of the form w@spec")
        if inner.strip().startswith("mix"):
            raise InvalidArgumentError("mixtures cannot be nested")
        (weight,) = _numbers("mix", weight_text, (1, 1))
        if weight < 0:
            raise InvalidArgumentError(f"negative mixture weight {weight_text!r}")
        weight_sum += weight
        total += weight * _generate(inner, n_max, rng)
    if weight_sum == 0:
        raise InvalidArgumentError(f"empty mixture {args!r}")
    if weight_sum > 1 + 1e-12:
        raise InvalidArgumentError(f"mixture weights sum to {weight_sum:g} > 1")
    return total


def synthesize(spec: str, n_max: int, *, seed: int = 0, modulus: int | None = None) -> IntervalFunction:
    """Build ``f: [N] → [0, 1]`` from a generator spec.

    Example:
        >>> synthesize("interval:0,1/2", 4).values.tolist()
        [1.0, 1.0, 0.0, 0.0]
    """
    if n_max < 1:
        raise InvalidArgumentError(f"N must be >= 1, got {n_max}")
    rng = np.random.default_rng(seed)
    values = _generate(spec, n_max, rng)
    logger.debug("synthesized %s on [%d] with seed %d", spec, n_max, seed)
    return IntervalFunction.from_values(values, modulus)
