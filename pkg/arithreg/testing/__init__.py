"""Testing helpers for arithreg."""
from .fixtures import function_payload, json_writer, planted_phase, random_complex_function, random_function
from .oracles import (
    fourier_peak_scan,
    frequency_count,
    irrationality_oracle,
    maximal_function_oracle,
    u2_interval_oracle,
    u2_quadruple_average,
)

__all__ = [
    "random_function",
    "random_complex_function",
    "planted_phase",
    "function_payload",
    "json_writer",
    "u2_quadruple_average",
    "u2_interval_oracle",
    "fourier_peak_scan",
    "maximal_function_oracle",
    "irrationality_oracle",
    "frequency_count",
]
