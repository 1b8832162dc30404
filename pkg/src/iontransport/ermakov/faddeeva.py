"""Error function of complex argument.

Small |z| uses the Maclaurin series; large |z| (and the right half-plane
strip away from the origin) uses the Laplace continued fraction for erfc,
evaluated with the modified Lentz algorithm. erf(-z) = -erf(z) covers the
left half-plane.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from ..errors import ConvergenceError

__all__ = ["erf_complex"]

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_SWITCH_RADIUS = 4.0
# inside the switching radius the continued fraction is still preferred here
_CF_INNER_RADIUS = 2.5
_CF_INNER_MIN_REAL = 1.0
_MAX_TERMS = 20000
_TINY = 1e-300


def _series(z: complex) -> complex:
    z2 = z * z
    term = z
    total = z
    n = 0
    while True:
        n += 1
        term *= -z2 / n
        add = term / (2 * n + 1)
        total += add
        if abs(add) <= 1e-17 * abs(total) and n > 3:
            return _TWO_OVER_SQRT_PI * total
        if n > _MAX_TERMS:
            raise ConvergenceError(f"erf series did not converge at z={z}")


def _erfc_cf(z: complex) -> complex:
    # erfc(z) = exp(-z^2)/sqrt(pi) / (z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    f = z
    c = f
    d = 0j
    for k in range(1, _MAX_TERMS):
        a = 0.5 * k
        d = z + a * d
        if d == 0:
            d = _TINY
        d = 1.0 / d
        c = z + a / c
        if c == 0:
            c = _TINY
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            return cmath.exp(-z * z) / math.sqrt(math.pi) / f
    raise ConvergenceError(f"erfc continued fraction did not converge at z={z}")


def _erf_scalar(z: complex) -> complex:
    if z.real < 0:
        return -_erf_scalar(-z)
    r = abs(z)
    if r >= _SWITCH_RADIUS and z.real > 0:
        return 1.0 - _erfc_cf(z)
    if r >= _CF_INNER_RADIUS and z.real >= _CF_INNER_MIN_REAL:
        return 1.0 - _erfc_cf(z)
    return _series(z)


def erf_complex(z):
    """erf(z) for complex scalars or arrays."""
    if np.isscalar(z):
        return _erf_scalar(complex(z))
    arr = np.asarray(z, dtype=complex)
    out = np.empty_like(arr)
    for idx, val in np.ndenumerate(arr):
        out[idx] = _erf_scalar(complex(val))
    return out
