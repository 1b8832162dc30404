"""Normalized transport functions q~0(t) and their time derivatives.

A transport profile describes the motion of the well minimum,
``q0(t) = (b/2) * q~0(t)``, for ``-t0 <= t <= t0``. Times are in seconds,
the transport distance ``b`` in metres. The normalized function runs from
-1 to +1 for the analytic kinds.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
from numpy.polynomial import hermite as _hermite
from scipy.interpolate import CubicSpline
from scipy.special import erf

from .errors import InvalidGridError, InvalidParameterError, OrderError, OutOfRangeError

__all__ = [
    "TransportProfile",
    "ProfileSample",
    "make_sine_profile",
    "make_erf_profile",
    "make_tabulated_profile",
    "load_tabulated_profile",
    "sample_profile",
    "decompose_symmetry",
]

_TABULATED_MAX_ORDER = 2
_MIN_TABLE_POINTS = 9


class ProfileSample(NamedTuple):
    t: float
    value: float
    derivatives: tuple  # (q', q'', ..., q^(n)) in 1/s^k


@dataclass(frozen=True, eq=False)
class TransportProfile:
    """Immutable transport function.

    Use the ``make_*`` factories rather than constructing this directly.
    """

    kind: str
    t0: float
    b: float
    tp: float | None = None
    table: tuple[np.ndarray, np.ndarray] | None = None
    _splines: tuple = field(default=(), repr=False)

    # -- domain ---------------------------------------------------------
    @property
    def t_start(self) -> float:
        if self.kind == "tabulated":
            return float(self.table[0][0])
        return -self.t0

    @property
    def t_end(self) -> float:
        if self.kind == "tabulated":
            return float(self.table[0][-1])
        return self.t0

    @property
    def max_order(self) -> float:
        return _TABULATED_MAX_ORDER if self.kind == "tabulated" else math.inf

    def _check_range(self, t):
        t = np.asarray(t, dtype=float)
        slack = 1e-12 * max(abs(self.t_start), abs(self.t_end))
        if np.any(t < self.t_start - slack) or np.any(t > self.t_end + slack):
            raise OutOfRangeError(
                f"t outside profile interval [{self.t_start:g}, {self.t_end:g}] s"
            )
        return np.clip(t, self.t_start, self.t_end)

    # -- evaluation -----------------------------------------------------
    def derivative(self, t, order: int = 0):
        """k-th time derivative of the normalized profile (1/s^k)."""
        if order < 0:
            raise OrderError("derivative order must be nonnegative")
        if order > self.max_order:
            raise OrderError(
                f"{self.kind} profiles provide derivatives up to order {self.max_order}"
            )
        t = self._check_range(t)
        if self.kind == "sine":
            k = math.pi / (2.0 * self.t0)
            return k**order * np.sin(k * t + order * math.pi / 2.0)
        if self.kind == "erf":
            c = 2.0 / self.tp
            norm = math.erf(c * self.t0)
            if order == 0:
                return erf(c * t) / norm
            # d^n/dx^n exp(-x^2) = (-1)^n H_n(x) exp(-x^2), physicists' Hermite
            coef = np.zeros(order)
            coef[-1] = 1.0
            x = c * t
            poly = _hermite.hermval(x, coef)
            return (
                (2.0 / math.sqrt(math.pi))
                * c**order
                * (-1.0) ** (order - 1)
                * poly
                * np.exp(-x * x)
                / norm
            )
        return self._splines[order](t)

    def value(self, t):
        return self.derivative(t, 0)

    def position(self, t):
        """Well position q0(t) in metres."""
        return 0.5 * self.b * self.derivative(t, 0)

    def acceleration(self, t):
        """q0''(t) in m/s^2."""
        return 0.5 * self.b * self.derivative(t, 2)

    def endpoint_velocity(self) -> tuple[float, float]:
        """q~0'(t_start), q~0'(t_end); nonzero for the truncated erf."""
        return (
            float(self.derivative(self.t_start, 1)),
            float(self.derivative(self.t_end, 1)),
        )

    def scaled_derivative(self, tau, order: int):
        """Derivative with respect to tau = t/t0, i.e. t0^k q~0^(k)(tau t0)."""
        return self.t0**order * self.derivative(np.asarray(tau) * self.t0, order)


def make_sine_profile(t0: float, b: float) -> TransportProfile:
    """q~0(t) = sin(pi t / 2 t0)."""
    if not (t0 > 0 and b > 0):
        raise InvalidParameterError("t0 and b must be positive")
    return TransportProfile("sine", float(t0), float(b))


def make_erf_profile(t0: float, tp: float, b: float) -> TransportProfile:
    """Renormalized error function Erf(2t/tp)/Erf(2t0/tp).

    Requires ``0 < tp < 2 t0`` so that the truncated endpoints are nearly at
    rest.
    """
    if not (t0 > 0 and b > 0 and tp > 0):
        raise InvalidParameterError("t0, tp and b must be positive")
    if tp >= 2.0 * t0:
        raise InvalidParameterError(f"erf profile needs tp < 2 t0 (got tp/2t0={tp / (2 * t0):g})")
    return TransportProfile("erf", float(t0), float(b), tp=float(tp))


def make_tabulated_profile(t, q, b: float) -> TransportProfile:
    """Profile from samples; cubic interpolation, central differences."""
    t = np.asarray(t, dtype=float)
    q = np.asarray(q, dtype=float)
    if t.ndim != 1 or t.shape != q.shape:
        raise InvalidGridError("t and q must be 1-D arrays of equal length")
    if t.size < _MIN_TABLE_POINTS:
        raise InvalidGridError(f"need at least {_MIN_TABLE_POINTS} samples, got {t.size}")
    if np.any(np.diff(t) <= 0):
        raise InvalidGridError("sample times must be strictly increasing")
    if not np.all(np.isfinite(q)):
        raise InvalidGridError("non-finite profile samples")
    if not b > 0:
        raise InvalidParameterError("b must be positive")
    d1 = np.gradient(q, t, edge_order=2)
    d2 = np.gradient(d1, t, edge_order=2)
    splines = (CubicSpline(t, q), CubicSpline(t, d1), CubicSpline(t, d2))
    t0 = 0.5 * (t[-1] - t[0])
    return TransportProfile(
        "tabulated", float(t0), float(b), table=(t.copy(), q.copy()), _splines=splines
    )


def load_tabulated_profile(path, b: float) -> TransportProfile:
    """Read a two-column CSV ``t_seconds,q_tilde`` with a header line."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 2:
            raise InvalidGridError(f"{path}: missing header line")
        try:
            float(header[0])
        except ValueError:
            pass
        else:
            raise InvalidGridError(f"{path}: first line must be a header, got numbers")
        rows = [(float(r[0]), float(r[1])) for r in reader if r and r[0].strip()]
    t, q = np.array(rows).T
    return make_tabulated_profile(t, q, b)


def sample_profile(p: TransportProfile, t: float, max_order: int = 2) -> ProfileSample:
    """Value and derivatives of ``p`` at a single time."""
    if max_order < 2:
        raise OrderError("max_order must be at least 2")
    if max_order > p.max_order:
        raise OrderError(f"{p.kind} profiles provide derivatives up to order {p.max_order}")
    value = float(p.derivative(t, 0))
    derivs = tuple(float(p.derivative(t, k)) for k in range(1, max_order + 1))
    return ProfileSample(float(t), value, derivs)


def decompose_symmetry(t, q, *, atol: float = 1e-12):
    """Split samples on a grid symmetric about zero into q_S and q_A."""
    t = np.asarray(t, dtype=float)
    q = np.asarray(q, dtype=float)
    if t.shape != q.shape or t.ndim != 1:
        raise InvalidGridError("t and q must be 1-D arrays of equal length")
    if not np.allclose(t, -t[::-1], rtol=0.0, atol=atol * max(1.0, np.abs(t).max())):
        raise InvalidGridError("grid is not symmetric about t = 0")
    mirrored = q[::-1]
    sym = 0.5 * (q + mirrored)
    anti = q - sym
    return sym, anti
