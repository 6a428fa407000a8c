"""
JSON encoding helpers for complex values, vectors and matrices.
"""

import math
from typing import Any, Optional, Union

import numpy as np

ComplexLike = Union[complex, float, int, str, list, tuple, dict]


def encode_float(value: Optional[float]) -> Optional[float]:
    """Plain float, or None for NaN/inf (JSON has no spelling for them)."""
    if value is None:
        return None
    value = float(value)
    if math.isnan(value) or math.isinf(value):
        return None
    return value


def encode_complex(value: complex) -> dict:
    value = complex(value)
    return {"re": encode_float(value.real), "im": encode_float(value.imag)}


def encode_vector(values) -> list[dict]:
    return [encode_complex(v) for v in np.asarray(values).ravel()]


def encode_matrix(matrix) -> list[list[dict]]:
    return [encode_vector(row) for row in np.asarray(matrix)]


def decode_complex(value: ComplexLike) -> complex:
    """
    Parse a complex number from its scenario-file spellings.

    Accepts plain numbers, ``[re, im]`` pairs, ``{"re": .., "im": ..}`` objects
    and Python literals such as ``"1-2j"``.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a complex number: {value!r}")
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    if isinstance(value, dict):
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ValueError(f"not a complex number: {value!r}")


def decode_vector(values: list[Any]) -> np.ndarray:
    return np.array([decode_complex(v) for v in values], dtype=complex)


def decode_matrix(rows: list[list[Any]]) -> np.ndarray:
    return np.array([[decode_complex(v) for v in row] for row in rows], dtype=complex)
