"""Scalar regime helpers.

Everything runs in one of two regimes: binary64 floats with a comparison
tolerance, or exact rationals (``fractions.Fraction``) with tolerance zero.
Operations never mix regimes on their own; the grid fixes the regime and
these helpers keep the decisions in one place.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Union

#: user-facing comparison tolerance in the float regime
DEFAULT_TOL = 1e-9

#: rank / kernel / ratio-test threshold inside the pivoting kernels (float regime)
PIVOT_TOL = 1e-12

Scalar = Union[int, float, Fraction]


def is_exact(x: Scalar) -> bool:
    """True for scalars that support exact arithmetic (int or Fraction)."""
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def all_exact(values: Iterable[Scalar]) -> bool:
    return all(is_exact(v) for v in values)


def resolve_tol(exact: bool, tol: Scalar | None) -> Scalar:
    """Effective comparison tolerance: caller override, else regime default."""
    if tol is not None:
        return tol
    return Fraction(0) if exact else DEFAULT_TOL


def check_finite(x: Scalar, what: str) -> Scalar:
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError(f"{what}: non-finite value {x!r}")
    return x


def max_abs(values: Iterable[Scalar]) -> Scalar:
    m = 0
    for v in values:
        a = -v if v < 0 else v
        if a > m:
            m = a
    return m
