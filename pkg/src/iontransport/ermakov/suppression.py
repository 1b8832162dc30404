"""Energy transfer in the well-controlled regime (constant frequency).

Here the amplitude reduces to a Fourier-type integral of the transport
acceleration,

    Xi(t1) = -exp(i w0 t1) int exp(-i w0 t') q0''(t') dt',

which is evaluated by QAWO quadrature in the reduced time tau = t/t0, and
compared with the closed forms for the sine and error-function profiles and
with the endpoint (high-frequency) expansion.
"""

from __future__ import annotations

import math
import warnings
from typing import NamedTuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq

from ..constants import HBAR
from ..errors import DomainError, InvalidParameterError, OrderError
from .dynamics import SuppressionResult
from .faddeeva import erf_complex

__all__ = [
    "ideal_transfer_integral",
    "suppression_amplitude_ideal",
    "analytic_sine_suppression",
    "analytic_erf_suppression",
    "ht_expansion",
    "asymptotic_suppression",
    "approximate_trajectory",
    "symmetry_split_suppression",
    "SymmetrySplit",
    "erf_endpoint_term",
    "criterion_threshold",
    "first_sustained",
    "ErfRecipe",
    "erf_criterion_transport",
]

_QUAD_OPTS = dict(epsabs=1e-14, epsrel=1e-12, limit=400)


def _weighted(func, lo, hi, x, weight):
    if hi <= lo:
        return 0.0
    if x == 0.0:
        if weight == "sin":
            return 0.0
        return quad(func, lo, hi, **_QUAD_OPTS)[0]
    with warnings.catch_warnings():
        # roundoff flags fire once the result is at machine precision
        warnings.simplefilter("ignore", IntegrationWarning)
        return quad(func, lo, hi, weight=weight, wvar=x, **_QUAD_OPTS)[0]


def ideal_transfer_integral(x: float, profile, tau1: float = 1.0) -> complex:
    """J = int_{tau_start}^{tau1} exp(-i x tau) theta''(tau) dtau.

    ``theta(tau) = q~0(tau t0)`` is the normalized profile in reduced time,
    ``x = omega0 t0``. With it, Xi~/omega0 = -exp(i x tau1) J / x.
    """
    t0 = profile.t0
    lo = profile.t_start / t0
    hi = min(tau1, profile.t_end / t0)

    def g(tau):
        return float(profile.scaled_derivative(tau, 2))

    c = _weighted(g, lo, hi, x, "cos")
    s = _weighted(g, lo, hi, x, "sin")
    return complex(c, -s)


def suppression_amplitude_ideal(
    omega0: float, p, t1: float | None = None, *, mass: float | None = None
) -> SuppressionResult:
    """Xi(t1) for an ideal harmonic well of constant frequency ``omega0``."""
    if p.max_order < 2:
        raise OrderError("profile must provide a second derivative")
    if not omega0 > 0:
        raise InvalidParameterError("omega0 must be positive")
    t1 = p.t_end if t1 is None else t1
    x = omega0 * p.t0
    tau1 = t1 / p.t0
    j = ideal_transfer_integral(x, p, tau1)
    # Xi = -exp(i w0 t1) (b/2) J / t0
    xi = -np.exp(1j * omega0 * t1) * j * (0.5 * p.b) / p.t0
    return SuppressionResult(complex(xi), omega0, p.b, mass)


def analytic_sine_suppression(x):
    """|Xi~/omega0| = |2 cos x / (1 - (2x/pi)^2)| for the sine profile.

    Written as pi sinc(pi/2 - x) / (1 + 2x/pi) so the removable singularity
    at x = pi/2 needs no special case.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("x must be nonnegative")
    d = 0.5 * math.pi - x
    return np.abs(math.pi * np.sinc(d / math.pi) / (1.0 + 2.0 * x / math.pi))


def erf_endpoint_term(x: float, y: float) -> float:
    """Contribution of the nonzero endpoint velocity of the truncated erf.

    Equals -2 sin(x) q~0'(t0)/omega0; the closed form neglects it.
    """
    r = 2.0 * x / y
    return -2.0 * math.sin(x) * (4.0 / (math.sqrt(math.pi) * y)) * math.exp(-r * r) / math.erf(r)


def analytic_erf_suppression(x: float, y: float, mode: str = "full") -> float:
    """Closed forms of |Xi~/omega0| for the renormalized erf profile.

    mode
        ``full``: 2 exp(-y^2/16) Re Erf(2x/y + i y/4) / Erf(2x/y).
        ``asymptote``: the 2x/y -> infinity limit 2 exp(-y^2/16).
        ``expansion``: full form with the first asymptotic correction of erfc.
        ``exact``: ``full`` plus the endpoint-velocity term, which makes it
        identical to the truncated-profile integral.
    """
    if not (x > 0 and y > 0):
        raise DomainError("x and y must be positive")
    b = 0.25 * y
    r = 2.0 * x / y
    if mode == "asymptote":
        return 2.0 * math.exp(-b * b)
    if mode == "expansion":
        corr = math.exp(-r * r) / (math.sqrt(math.pi) * math.hypot(r, b))
        corr *= math.cos(2 * r * b + math.atan2(b, r))
        return abs(2.0 * (math.exp(-b * b) - corr) / math.erf(r))
    if mode not in ("full", "exact"):
        raise InvalidParameterError(f"unknown mode {mode!r}")
    if r <= 1.0:
        raise DomainError(f"closed form needs 2x/y > 1 (got {r:g})")
    val = 2.0 * math.exp(-b * b) * erf_complex(complex(r, b)).real / math.erf(r)
    if mode == "exact":
        val += erf_endpoint_term(x, y)
    return abs(val)


def ht_expansion(derivs_a, derivs_b, lam: float, a: float, b: float, n_order: int) -> complex:
    """Endpoint asymptotic series of int_a^b exp(-i lam tau) g(tau) dtau.

    ``derivs_a[n]``, ``derivs_b[n]`` hold g^(n) at the endpoints for
    n = 0..n_order.
    """
    if not lam > 0:
        raise InvalidParameterError("lambda must be positive")
    if n_order < 0:
        raise InvalidParameterError("order must be nonnegative")
    if len(derivs_a) < n_order + 1 or len(derivs_b) < n_order + 1:
        raise OrderError(f"need endpoint derivatives through order {n_order}")
    ea = np.exp(-1j * lam * a)
    eb = np.exp(-1j * lam * b)
    total = 0j
    for n in range(n_order + 1):
        total += (-1) ** n / (-1j * lam) ** (n + 1) * (derivs_b[n] * eb - derivs_a[n] * ea)
    return complex(total)


def asymptotic_suppression(p, x: float, n_order: int = 0) -> float:
    """High-frequency partial sum for |Xi~/omega0| at omega0 t0 = x.

    2 sum_n theta^(n+2)(-1) / (-x)^(n+2) cos(x + n pi/2), where theta is the
    profile in reduced time.
    """
    if n_order + 2 > p.max_order:
        raise OrderError(f"{p.kind} profile lacks derivative order {n_order + 2}")
    total = 0.0
    for n in range(n_order + 1):
        d = float(p.scaled_derivative(-1.0, n + 2))
        total += d / (-x) ** (n + 2) * math.cos(x + n * math.pi / 2)
    return abs(2.0 * total)


def approximate_trajectory(p, omega0: float, t, n_order: int = 0):
    """Lag u_c(t) of the ion behind the well, from the endpoint expansion (m)."""
    if n_order + 2 > p.max_order:
        raise OrderError(f"{p.kind} profile lacks derivative order {n_order + 2}")
    t = np.asarray(t, dtype=float)
    half_b = 0.5 * p.b
    u = np.zeros_like(t)
    for n in range(n_order + 1):
        k = n + 2
        here = half_b * p.derivative(t, k)
        start = half_b * float(p.derivative(p.t_start, k))
        memory = np.cos(omega0 * (t - p.t_start) - n * math.pi / 2) * start
        u -= (math.cos(n * math.pi / 2) * here - memory) / omega0**k
    return u


class SymmetrySplit(NamedTuple):
    """Normalized |Xi~/omega0|^2 contributions of the two parity parts."""

    antisymmetric: float
    symmetric: float

    @property
    def total(self) -> float:
        return self.antisymmetric + self.symmetric


def symmetry_split_suppression(p, omega0: float, t1: float | None = None) -> SymmetrySplit:
    """Split |Xi|^2 into the sine-weighted antisymmetric and cosine-weighted
    symmetric parts of the transport acceleration.

    Needs a profile interval symmetric about zero with the readout at its end.
    """
    if not math.isclose(p.t_start, -p.t_end, rel_tol=1e-12, abs_tol=0.0):
        raise DomainError("profile interval must be symmetric about t = 0")
    if t1 is not None and not math.isclose(t1, p.t_end, rel_tol=1e-12):
        raise DomainError("parity split requires the readout at the end of the transport")
    x = omega0 * p.t0

    def g(tau):
        return float(p.scaled_derivative(tau, 2))

    def anti(tau):
        return 0.5 * (g(tau) - g(-tau))

    def sym(tau):
        return 0.5 * (g(tau) + g(-tau))

    s_a = _weighted(anti, -1.0, 1.0, x, "sin")
    c_s = _weighted(sym, -1.0, 1.0, x, "cos")
    return SymmetrySplit((s_a / x) ** 2, (c_s / x) ** 2)


# ---------------------------------------------------------------------------
# One-quantum criterion
# ---------------------------------------------------------------------------
def criterion_threshold(mass: float, b: float, omega0: float, hbar: float = HBAR) -> float:
    """Largest |Xi~/omega0|^2 transferring less than one quantum: 8 hbar / (m b^2 omega0)."""
    if not (mass > 0 and b > 0 and omega0 > 0):
        raise InvalidParameterError("mass, b and omega0 must be positive")
    return 8.0 * hbar / (mass * b * b * omega0)


def first_sustained(x, values, threshold: float):
    """Smallest grid point from which ``values`` stay below ``threshold``.

    None if the last value still violates it.
    """
    x = np.asarray(x, dtype=float)
    bad = np.nonzero(~(np.asarray(values, dtype=float) < threshold))[0]
    if bad.size == 0:
        return float(x[0])
    if bad[-1] == x.size - 1:
        return None
    return float(x[bad[-1] + 1])


class ErfRecipe(NamedTuple):
    """Shortest erf transport meeting the criterion: y, x = omega0 t0 and 2x/2pi."""

    y: float
    x: float
    cycles: float


def _sustained_x(y: float, threshold: float, mode: str, dx: float) -> float:
    # the closed form oscillates with period 2 pi in x; beyond 2x/y = 6 it
    # sits on its asymptote to ~1e-16
    xs = np.arange(0.5 * y * (1 + 1e-6), 3.0 * y, dx)

    def excess(x):
        return analytic_erf_suppression(x, y, mode) ** 2 - threshold

    v = np.array([excess(x) for x in xs])
    bad = np.nonzero(v >= 0)[0]
    if bad.size == 0:
        return float(xs[0])
    k = bad[-1]
    return brentq(excess, xs[k], xs[k + 1], xtol=1e-12)


def erf_criterion_transport(threshold: float, mode: str = "exact", y_span: float = 3.0,
                            n_y: int = 61, dx: float = 0.02) -> ErfRecipe:
    """Shortest erf transport whose energy transfer stays below ``threshold``.

    For each y above the asymptotic bound y^2 > 8 ln(4/threshold), find the
    duration beyond which |Xi~/omega0|^2 stays below the threshold, and
    minimize the total number of cycles over y (coarse grid, then a local
    refinement around the best y).
    """
    if not threshold > 0:
        raise InvalidParameterError("threshold must be positive")
    y_min = math.sqrt(8.0 * math.log(4.0 / threshold))
    ys = np.linspace(y_min * (1 + 1e-9), y_min + y_span, n_y)
    xs = np.array([_sustained_x(y, threshold, mode, dx) for y in ys])
    k = int(np.argmin(xs))
    step = ys[1] - ys[0]
    fine = np.linspace(max(ys[k] - step, ys[0]), ys[k] + step, 41)
    xf = np.array([_sustained_x(y, threshold, mode, dx) for y in fine])
    j = int(np.argmin(xf))
    return ErfRecipe(float(fine[j]), float(xf[j]), float(2.0 * xf[j] / (2.0 * math.pi)))
