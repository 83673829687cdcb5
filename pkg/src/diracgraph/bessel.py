"""
Modified Bessel function I0 for real non-negative arguments.

Power series up to SERIES_LIMIT, optimally truncated Hankel expansion beyond.
Both branches reach double precision on the ranges where they are used.
"""

from __future__ import annotations

import math

SERIES_LIMIT = 15.0

_SERIES_MAX_TERMS = 200
_ASYMPTOTIC_MAX_TERMS = 60


def _require_non_negative(z: float) -> float:
    z = float(z)
    if not z >= 0.0:  # also catches NaN
        raise ValueError(f"Bessel argument must be non-negative, got {z!r}")
    return z


def _series(z: float) -> float:
    # sum_k (z/2)^(2k) / (k!)^2
    q = 0.25 * z * z
    term = 1.0
    total = 1.0
    for k in range(1, _SERIES_MAX_TERMS):
        term *= q / (k * k)
        total += term
        if term <= total * 1e-17:
            break
    return total


def _asymptotic(z: float) -> float:
    # e^z / sqrt(2 pi z) * sum_k t_k,  t_k = t_{k-1} * (2k-1)^2 / (8 k z)
    term = 1.0
    total = 1.0
    for k in range(1, _ASYMPTOTIC_MAX_TERMS):
        nxt = term * (2 * k - 1) ** 2 / (8.0 * k * z)
        if abs(nxt) >= abs(term):
            break  # divergent tail: stop at the smallest term
        term = nxt
        total += term
        if abs(term) < abs(total) * 1e-17:
            break
    return math.exp(z) / math.sqrt(2.0 * math.pi * z) * total


def i0_asymptotic(z: float) -> float:
    """Asymptotic branch of I0, exposed for cross-checks at the branch switch."""
    z = _require_non_negative(z)
    if z == 0.0:
        raise ValueError("asymptotic expansion is undefined at z=0")
    return _asymptotic(z)


def bessel_i0(z: float) -> float:
    z = _require_non_negative(z)
    if z <= SERIES_LIMIT:
        return _series(z)
    return _asymptotic(z)
