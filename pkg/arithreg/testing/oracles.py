"""Slow reference implementations used to cross-check the fast paths."""
from __future__ import annotations

import itertools
from collections.abc import Sequence
from fractions import Fraction

import numpy as np
import numpy.typing as npt

from ..diophantine import TorusPoint, enumerate_frequencies, torus_norm
from ..fourier import IntervalFunction


def u2_quadruple_average(values: npt.ArrayLike) -> complex:
    """``E_{a,h₁,h₂} f(a)·conj f(a+h₁)·conj f(a+h₂)·f(a+h₁+h₂)`` on ``Z/MZ``, in ``O(M³)``."""
    f = np.asarray(values, dtype=np.complex128)
    m = f.shape[0]
    total = 0j
    for h1 in range(m):
        shifted = np.roll(f, -h1)
        g = f * np.conj(shifted)
        # Σ_{a,h₂} g(a)·conj g(a+h₂), one full matrix per h₁.
        total += complex(np.sum(np.outer(g, np.conj(g))))
    return total / m**3


def u2_interval_oracle(f: IntervalFunction) -> float:
    numerator = u2_quadruple_average(f.embed()).real
    indicator = np.zeros(f.ambient_modulus)
    indicator[1 : f.n_max + 1] = 1.0
    return float((numerator / u2_quadruple_average(indicator).real) ** 0.25)


def fourier_peak_scan(f: IntervalFunction) -> tuple[int, float]:
    """Lowest ``r`` maximising ``|E_n f(n) e(-rn/M)|``, by direct summation."""
    m = f.ambient_modulus
    ns = np.arange(1, f.n_max + 1)
    best_r, best = 0, -1.0
    for r in range(m):
        value = abs(complex(np.mean(f.values * np.exp(-2j * np.pi * r * ns / m))))
        if value > best + 1e-12:
            best_r, best = r, value
    return best_r, best


def maximal_function_oracle(phi: Sequence[float], t: float, radii: Sequence[float], cap: float) -> float:
    n = len(phi)
    best = 0.0
    for r in radii:
        count = sum(1 for value in phi if abs(value - t) <= r)
        best = max(best, count / (2.0 * r * n))
    return min(best, cap)


def irrationality_oracle(theta: TorusPoint, a_param: int, n_param: int) -> bool:
    """``(A, N)``-irrationality by scanning the whole box ``[-A, A]^d``."""
    threshold = Fraction(a_param, n_param)
    for q in itertools.product(range(-a_param, a_param + 1), repeat=theta.dim):
        if not any(q) or sum(abs(v) for v in q) > a_param:
            continue
        if torus_norm(theta.dot(q)) < threshold:
            return False
    return True


def frequency_count(dim: int, radius: int) -> int:
    return sum(1 for _ in enumerate_frequencies(dim, radius))
