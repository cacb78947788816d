"""Incomplete gamma functions.

Series expansion of the lower function below ``x = a + 1``, modified Lentz
continued fraction for the upper function above it.
"""

from __future__ import annotations

import math

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


def _prefactor(a: float, x: float) -> float:
    # x^a e^-x, in log space so large arguments underflow cleanly
    return math.exp(a * math.log(x) - x)


def _lower_series(a: float, x: float) -> float:
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * _prefactor(a, x)
    raise ArithmeticError(f"incomplete gamma series did not converge for a={a}, x={x}")


def _upper_cf(a: float, x: float) -> float:
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h * _prefactor(a, x)
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge for a={a}, x={x}")


def _check(a: float, x: float) -> None:
    if not a > 0:
        raise ValueError(f"shape parameter must be positive, got {a!r}")
    if not x >= 0:
        raise ValueError(f"argument must be non-negative, got {x!r}")


def lower_incomplete_gamma(a: float, x: float) -> float:
    """gamma(a, x) = integral of t^(a-1) e^-t over [0, x]."""
    _check(a, x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.gamma(a)
    if x < a + 1.0:
        return _lower_series(a, x)
    return math.gamma(a) - _upper_cf(a, x)


def upper_incomplete_gamma(a: float, x: float) -> float:
    """Gamma(a, x) = integral of t^(a-1) e^-t over [x, inf)."""
    _check(a, x)
    if x == 0.0:
        return math.gamma(a)
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return math.gamma(a) - _lower_series(a, x)
    return _upper_cf(a, x)
