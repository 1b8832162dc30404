"""Stripe ("railway track") electrode potentials.

Each electrode is an infinitely long stripe of width W in a grounded plane,
held at one unit voltage; the ion sits at height z_ion above the plane.
Positions along the trap axis are measured in units of z_ion,
x_hat = x / z_ion, and the normalized width is W_hat = W / z_ion.
Electrode m is centred at x_hat = m W_hat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .constants import ELEMENTARY_CHARGE
from .errors import InvalidParameterError, NonConfiningError
from .io import write_csv

__all__ = [
    "ElectrodeArray",
    "stripe_potential",
    "stripe_potential_deriv",
    "superpose",
    "axial_frequency",
    "axial_frequency_curvature",
    "geometry_factor",
    "argmax_geometry_factor",
    "potential_scan",
]


@dataclass(frozen=True)
class ElectrodeArray:
    """An odd number of equal stripes, symmetric about electrode index 0.

    ``center_label`` is the user-facing number of the middle electrode; with
    the default, electrodes are labelled 1..n_el.
    """

    n_el: int
    w_hat: float
    z_ion: float
    unit_voltage: float = 1.0
    a_max: float = 2.0
    center_label: int | None = None

    def __post_init__(self):
        if self.n_el < 3 or self.n_el % 2 == 0:
            raise InvalidParameterError("n_el must be odd and at least 3")
        if not self.w_hat > 0:
            raise InvalidParameterError("W_hat must be positive")
        if not self.z_ion > 0:
            raise InvalidParameterError("z_ion must be positive")
        if self.center_label is None:
            object.__setattr__(self, "center_label", (self.n_el + 1) // 2)

    @property
    def half(self) -> int:
        return (self.n_el - 1) // 2

    @property
    def indices(self) -> np.ndarray:
        """Electrode indices m relative to the centre electrode."""
        return np.arange(-self.half, self.half + 1)

    @property
    def labels(self) -> np.ndarray:
        return self.indices + self.center_label

    @property
    def width(self) -> float:
        """Electrode width W in metres."""
        return self.w_hat * self.z_ion

    @property
    def span(self) -> tuple[float, float]:
        """Outer edges of the array in x_hat."""
        edge = (self.half + 0.5) * self.w_hat
        return -edge, edge

    def basis(self, x_hat, order: int = 0) -> np.ndarray:
        """Matrix B[i, k] = d^order phi_{m_k}/dx_hat^order at x_hat[i] (volts)."""
        x = np.atleast_1d(np.asarray(x_hat, dtype=float))[:, None]
        m = self.indices[None, :]
        if order == 0:
            out = stripe_potential(x, m, self.w_hat)
        else:
            out = stripe_potential_deriv(x, m, self.w_hat, order)
        return self.unit_voltage * out

    def scaled(self, w_hat: float) -> "ElectrodeArray":
        return ElectrodeArray(self.n_el, w_hat, self.z_ion, self.unit_voltage,
                              self.a_max, self.center_label)


def _parts(x_hat, m_idx, w_hat):
    u = np.asarray(x_hat, dtype=float) - np.asarray(m_idx) * w_hat
    d = 1.0 + u * u - 0.25 * w_hat * w_hat
    return u, d


def stripe_potential(x_hat, m_idx, w_hat: float):
    """phi_m(x_hat) = (1/pi) arctan(W_hat / (1 + (x_hat - m W_hat)^2 - W_hat^2/4)).

    The arctan is taken on the branch (0, pi), which keeps the potential
    continuous where the denominator changes sign. Volts per unit voltage.
    """
    _, d = _parts(x_hat, m_idx, w_hat)
    return np.arctan2(w_hat, d) / math.pi


def stripe_potential_deriv(x_hat, m_idx, w_hat: float, order: int):
    """First or second derivative of ``stripe_potential`` in x_hat."""
    u, d = _parts(x_hat, m_idx, w_hat)
    r = d * d + w_hat * w_hat
    if order == 1:
        return -2.0 * w_hat * u / (math.pi * r)
    if order == 2:
        return -2.0 * w_hat * (r - 4.0 * u * u * d) / (math.pi * r * r)
    raise InvalidParameterError(f"derivative order must be 1 or 2, got {order}")


def superpose(arr: ElectrodeArray, amplitudes, x_hat):
    """phi, phi' and phi'' of sum_m a_m phi_m at x_hat (volts, per x_hat^k)."""
    a = np.asarray(amplitudes, dtype=float)
    if a.shape != (arr.n_el,):
        raise InvalidParameterError(f"need {arr.n_el} amplitudes, got shape {a.shape}")
    scalar = np.ndim(x_hat) == 0
    out = tuple(arr.basis(x_hat, k) @ a for k in range(3))
    if scalar:
        return tuple(float(v[0]) for v in out)
    return out


def geometry_factor(w_hat):
    """g(W_hat) = W_hat / ((W_hat/2)^4 + 3 W_hat^2 / 2 + 1)."""
    w = np.asarray(w_hat, dtype=float)
    if np.any(w <= 0):
        raise InvalidParameterError("W_hat must be positive")
    return w / ((0.5 * w) ** 4 + 1.5 * w * w + 1.0)


def _geometry_slope(w):
    # numerator of g'(w): 1 - 3 w^2 / 2 - 3 w^4 / 16
    return 1.0 - 1.5 * w * w - 0.1875 * w**4


def argmax_geometry_factor(tol: float = 1e-10) -> float:
    """Location of the maximum of g.

    Golden-section search brackets the maximum; since g is flat there, the
    bracket is polished by a root of g' to reach ``tol``.
    """
    res = minimize_scalar(lambda w: -geometry_factor(w), bracket=(0.1, 1.0, 3.0),
                          method="golden", options={"xtol": 1e-9})
    lo, hi = res.x - 1e-4, res.x + 1e-4
    return brentq(_geometry_slope, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)


def axial_frequency(w_hat: float, z_ion: float, a0: float, mass: float,
                    charge: float = ELEMENTARY_CHARGE, unit_voltage: float = 1.0) -> float:
    """omega = sqrt(-(2 a0 / pi m)(Q U / z_ion^2) g(W_hat)) in rad/s.

    Uses the closed-form geometry factor g; see ``axial_frequency_curvature``
    for the frequency from the exact curvature of a single stripe.
    """
    if not (z_ion > 0 and mass > 0):
        raise InvalidParameterError("z_ion and mass must be positive")
    w2 = -(2.0 * a0 / (math.pi * mass)) * (charge * unit_voltage / z_ion**2) * float(geometry_factor(w_hat))
    if not w2 > 0:
        raise NonConfiningError(f"omega^2 = {w2:.3g} <= 0; a0 must be negative for confinement")
    return math.sqrt(w2)


def axial_frequency_curvature(w_hat: float, z_ion: float, a0: float, mass: float,
                              charge: float = ELEMENTARY_CHARGE,
                              unit_voltage: float = 1.0) -> float:
    """omega from the second derivative of a0 * phi_0 at the electrode centre.

    Equivalent to replacing the denominator of g by (1 + W_hat^2/4)^2.
    """
    if not (z_ion > 0 and mass > 0):
        raise InvalidParameterError("z_ion and mass must be positive")
    curv = a0 * unit_voltage * float(stripe_potential_deriv(0.0, 0, w_hat, 2))
    w2 = charge * curv / (mass * z_ion**2)
    if not w2 > 0:
        raise NonConfiningError(f"omega^2 = {w2:.3g} <= 0; a0 must be negative for confinement")
    return math.sqrt(w2)


def potential_scan(arr: ElectrodeArray, amplitudes, x_hat, path=None):
    """Sample the superposed potential; optionally write ``x_hat,phi_volts``."""
    x = np.asarray(x_hat, dtype=float)
    phi = superpose(arr, amplitudes, x)[0]
    if path is not None:
        write_csv(path, ["x_hat", "phi_volts"], zip(x, phi))
    return phi
