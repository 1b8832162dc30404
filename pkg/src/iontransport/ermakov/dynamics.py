"""Parametrically driven, forced oscillator: Ermakov amplitude and phase,
Green's-function particular solution and the energy-transfer amplitude.

Conventions
-----------
The amplitude rho and phase mu solve

    rho'' + omega(t)^2 rho = rho^-3,    rho^2 mu' = 1,

with rho(t_start) = omega(t_start)^-1/2, rho'(t_start) = 0, mu(t_start) = 0.
The integration constant of the phase law is 1, so rho carries units of
s^1/2 when t is in seconds.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad_vec, solve_ivp
from scipy.interpolate import CubicSpline

from ..constants import HBAR
from ..errors import (
    ConvergenceError,
    FiniteDifferenceError,
    GridMismatchError,
    InvalidForcingError,
    InvalidParameterError,
    OutOfRangeError,
    SingularityError,
)

logger = logging.getLogger(__name__)

__all__ = [
    "FrequencyProgram",
    "ForcingTerm",
    "ErmakovSolution",
    "ClassicalTrajectory",
    "SuppressionResult",
    "solve_ermakov",
    "constant_freq_rho",
    "fit_constant_frequency",
    "adiabatic_rho_mu",
    "greens_particular",
    "general_solution",
    "suppression_amplitude_general",
    "suppression_amplitude_first_order",
    "energy_transfer",
    "quanta_transferred",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


# ---------------------------------------------------------------------------
# Inputs
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class FrequencyProgram:
    """Trap frequency omega(t) in rad/s.

    ``omega0`` is the frequency at the start of the transport. Derivatives
    come from the supplied callables, from the interpolating spline for
    tabulated programs, or from central finite differences otherwise.
    """

    func: Callable
    omega0: float
    kind: str = "callable"
    d1: Callable | None = None
    d2: Callable | None = None
    grid: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def constant(cls, omega0: float) -> "FrequencyProgram":
        if not omega0 > 0:
            raise InvalidParameterError("omega0 must be positive")
        w = float(omega0)
        return cls(
            lambda t: np.full_like(np.asarray(t, dtype=float), w),
            w,
            "constant",
            lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        )

    @classmethod
    def from_callable(cls, func, omega0, derivative=None, second_derivative=None):
        return cls(func, float(omega0), "callable", derivative, second_derivative)

    @classmethod
    def tabulated(cls, t, omega) -> "FrequencyProgram":
        t = np.asarray(t, dtype=float)
        omega = np.asarray(omega, dtype=float)
        if np.any(np.diff(t) <= 0):
            raise InvalidParameterError("frequency grid must be strictly increasing")
        if np.any(~np.isfinite(omega)) or np.any(omega <= 0):
            raise InvalidParameterError("tabulated frequency must be finite and positive")
        spline = CubicSpline(t, omega)
        return cls(spline, float(omega[0]), "tabulated", spline.derivative(1),
                   spline.derivative(2), grid=t)

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    def __call__(self, t):
        return self.func(t)

    def derivative(self, t, order: int = 1):
        if order == 0:
            return self.func(t)
        if order not in (1, 2):
            raise InvalidParameterError("only first and second derivatives are available")
        analytic = self.d1 if order == 1 else self.d2
        if analytic is not None:
            out = analytic(t)
        else:
            t = np.asarray(t, dtype=float)
            h = 1e-2 / np.abs(self.func(t))
            if order == 1:
                out = (self.func(t + h) - self.func(t - h)) / (2 * h)
            else:
                out = (self.func(t + h) - 2 * self.func(t) + self.func(t - h)) / h**2
        out = np.asarray(out, dtype=float)
        if not np.all(np.isfinite(out)):
            raise FiniteDifferenceError("frequency program is not twice differentiable here")
        return out


@dataclass(frozen=True, eq=False)
class ForcingTerm:
    """Net acceleration f(t) = -q0''(t) + a_res(q0(t)) in m/s^2.

    ``t_start`` marks the beginning of the transport; integrals of the
    forcing start there.
    """

    func: Callable
    t_start: float
    grid: np.ndarray | None = field(default=None, repr=False)

    def __call__(self, t):
        return self.func(t)

    @classmethod
    def zero(cls, t_start: float) -> "ForcingTerm":
        return cls(lambda t: np.zeros_like(np.asarray(t, dtype=float)), float(t_start))

    @classmethod
    def from_profile(cls, profile, a_res: Callable | None = None) -> "ForcingTerm":
        """-q0'' of ``profile`` plus an optional residual acceleration a_res(t).

        Outside the profile interval the forcing vanishes.
        """
        lo, hi = profile.t_start, profile.t_end

        def f(t):
            t = np.asarray(t, dtype=float)
            flat = np.atleast_1d(t)
            out = np.zeros_like(flat)
            inside = (flat >= lo) & (flat <= hi)
            if np.any(inside):
                out[inside] = -profile.acceleration(flat[inside])
                if a_res is not None:
                    out[inside] += a_res(flat[inside])
            return out.reshape(t.shape)

        return cls(f, float(lo))

    @classmethod
    def tabulated(cls, t, values) -> "ForcingTerm":
        t = np.asarray(t, dtype=float)
        values = np.asarray(values, dtype=float)
        if np.any(~np.isfinite(values)):
            raise InvalidForcingError("forcing samples contain NaN or inf")
        spline = CubicSpline(t, values)
        lo, hi = t[0], t[-1]

        def f(tt):
            tt = np.asarray(tt, dtype=float)
            return np.where((tt >= lo) & (tt <= hi), spline(np.clip(tt, lo, hi)), 0.0)

        return cls(f, float(lo), grid=t)


# ---------------------------------------------------------------------------
# Homogeneous dynamics
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class ErmakovSolution:
    t: np.ndarray
    rho: np.ndarray
    rho_dot: np.ndarray
    mu: np.ndarray
    program: FrequencyProgram
    _dense: Callable = field(repr=False, default=None)
    _scale: float = field(repr=False, default=1.0)

    @property
    def mu_dot(self) -> np.ndarray:
        return 1.0 / self.rho**2

    @property
    def omega(self) -> np.ndarray:
        return np.asarray(self.program(self.t), dtype=float)

    def evaluate(self, t):
        """(rho, rho_dot, mu) at arbitrary times inside the solved interval."""
        t = np.asarray(t, dtype=float)
        lo, hi = self.t[0], self.t[-1]
        slack = 1e-12 * max(abs(lo), abs(hi), hi - lo)
        if np.any(t < lo - slack) or np.any(t > hi + slack):
            raise OutOfRangeError(f"t outside solved interval [{lo:g}, {hi:g}]")
        w = self._scale
        s = w * (np.clip(t, lo, hi) - lo)
        r, rp, psi = self._dense(s)
        return r / math.sqrt(w), rp * math.sqrt(w), psi + s


def solve_ermakov(
    fp: FrequencyProgram,
    t_start: float,
    t_end: float,
    n_steps: int = 1000,
    *,
    rho0: float | None = None,
    rho_dot0: float | None = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> ErmakovSolution:
    """Integrate the Ermakov equation and the phase law on [t_start, t_end].

    The state is integrated in the dimensionless time s = omega0 (t - t_start)
    with r = rho sqrt(omega0) and the phase deviation mu - s, which keeps
    absolute tolerances meaningful over many oscillation periods.
    """
    if n_steps < 100:
        raise InvalidParameterError("n_steps must be at least 100")
    if not t_end > t_start:
        raise InvalidParameterError("t_end must exceed t_start")
    w = float(fp.omega0)
    w_start = float(fp(t_start))
    if not w_start > 0:
        raise InvalidParameterError("omega must be positive")
    r0 = math.sqrt(w / w_start) if rho0 is None else rho0 * math.sqrt(w)
    rp0 = 0.0 if rho_dot0 is None else rho_dot0 / math.sqrt(w)

    def rhs(s, y):
        r, rp, _ = y
        ratio = fp(t_start + s / w) / w
        return [rp, -ratio * ratio * r + r**-3, r**-2 - 1.0]

    def collapse(s, y):
        return y[0] - 1e-6

    collapse.terminal = True

    s_end = w * (t_end - t_start)
    sol = solve_ivp(
        rhs,
        (0.0, s_end),
        [r0, rp0, 0.0],
        method="DOP853",
        rtol=rtol,
        atol=atol,
        dense_output=True,
        events=collapse,
    )
    if sol.status == 1:
        raise SingularityError("Ermakov amplitude collapsed towards zero (1/rho^3 blow-up)")
    if not sol.success:
        raise ConvergenceError(f"Ermakov integration failed: {sol.message}")

    t = np.linspace(t_start, t_end, n_steps + 1)
    omega = np.asarray(fp(t), dtype=float)
    if np.any(omega <= 0):
        raise InvalidParameterError("omega(t) must stay positive")
    es = ErmakovSolution(t, None, None, None, fp, sol.sol, w)
    rho, rho_dot, mu = es.evaluate(t)
    object.__setattr__(es, "rho", rho)
    object.__setattr__(es, "rho_dot", rho_dot)
    object.__setattr__(es, "mu", mu)
    return es


def constant_freq_rho(delta: float, theta: float, omega0: float, t):
    """Closed-form Ermakov amplitude for constant frequency and its derivative."""
    if not omega0 > 0:
        raise InvalidParameterError("omega0 must be positive")
    t = np.asarray(t, dtype=float)
    phase = 2.0 * omega0 * t + theta
    arg = math.cosh(delta) + math.sinh(delta) * np.sin(phase)
    rho = np.sqrt(arg / omega0)
    rho_dot = math.sinh(delta) * np.cos(phase) / rho
    return rho, rho_dot


def fit_constant_frequency(rho, rho_dot, omega0: float, t):
    """Recover (delta, theta) of the constant-frequency solution from a state.

    Uses the first integral rho'^2 + omega0^2 rho^2 + rho^-2 = 2 omega0 cosh(delta).
    """
    rho = np.asarray(rho, dtype=float)
    rho_dot = np.asarray(rho_dot, dtype=float)
    c = (rho_dot**2 + omega0**2 * rho**2 + rho**-2) / (2.0 * omega0)
    c = np.maximum(c, 1.0)
    delta = np.arccosh(c)
    s = np.sinh(delta)
    x = omega0 * rho**2
    with np.errstate(invalid="ignore", divide="ignore"):
        phase = np.arctan2((x - c), rho * rho_dot)
    theta = np.where(s > 0, phase - 2.0 * omega0 * np.asarray(t, dtype=float), 0.0)
    theta = np.mod(theta + math.pi, 2 * math.pi) - math.pi
    return delta, theta


def adiabatic_rho_mu(fp: FrequencyProgram, t):
    """Adiabatic expansion of rho and mu' with the two leading corrections."""
    w = np.asarray(fp(t), dtype=float)
    wd = fp.derivative(t, 1)
    wdd = fp.derivative(t, 2)
    rho = w**-0.5 + wdd / (8.0 * w**3.5) - 3.0 * wd**2 / (16.0 * w**4.5)
    mu_dot = w - wdd / (4.0 * w**2) + 3.0 * wd**2 / (8.0 * w**3)
    return rho, mu_dot


# ---------------------------------------------------------------------------
# Particular solution
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class ClassicalTrajectory:
    t: np.ndarray
    zeta: np.ndarray
    u_p: np.ndarray
    u_p_dot: np.ndarray
    a_c: float | None = None
    phi: float | None = None

    def xi(self, omega) -> np.ndarray:
        """Xi(t) = u_p' + i omega u_p along the grid."""
        return self.u_p_dot + 1j * np.asarray(omega) * self.u_p


def _forcing_on(es: ErmakovSolution, f: ForcingTerm) -> Callable:
    if f.grid is not None and (
        f.grid.shape != es.t.shape or not np.allclose(f.grid, es.t, rtol=0, atol=1e-15)
    ):
        warnings.warn("forcing grid differs from the solution grid; resampling", stacklevel=3)
    return f


def greens_particular(es: ErmakovSolution, f: ForcingTerm) -> ClassicalTrajectory:
    """Causal particular solution through the auxiliary function zeta(t).

    zeta(t) = i exp(-i mu(t)) int_{t_start}^t exp(i mu) rho f dt' is
    accumulated with 8-point Gauss-Legendre rules on every grid interval,
    evaluating rho and mu from the dense Ermakov output.
    """
    f = _forcing_on(es, f)
    t = es.t
    lo = t[:-1, None]
    half = 0.5 * np.diff(t)[:, None]
    nodes = lo + half * (_GL_NODES[None, :] + 1.0)
    flat = nodes.ravel()
    rho_n, _, mu_n = es.evaluate(flat)
    fv = np.asarray(f(flat), dtype=float)
    if np.any(np.isnan(fv)):
        raise InvalidForcingError("forcing evaluates to NaN")
    integrand = (np.exp(1j * mu_n) * rho_n * fv).reshape(nodes.shape)
    pieces = (integrand * _GL_WEIGHTS[None, :]).sum(axis=1) * half[:, 0]
    # forcing before t_start does not act
    if f.t_start > t[0]:
        pieces = np.where(t[1:] <= f.t_start, 0.0, pieces)
    acc = np.concatenate([[0.0], np.cumsum(pieces)])
    zeta = 1j * np.exp(-1j * es.mu) * acc
    u_p = es.rho * zeta.real
    u_p_dot = ((es.rho_dot - 1j / es.rho) * zeta).real
    return ClassicalTrajectory(t, zeta, u_p, u_p_dot)


def general_solution(tr: ClassicalTrajectory, es: ErmakovSolution, a_c: float, phi: float):
    """u_c = a_c rho cos(mu + phi) + u_p and its time derivative."""
    if tr.t.shape != es.t.shape or not np.array_equal(tr.t, es.t):
        raise GridMismatchError("trajectory and Ermakov solution use different grids")
    c = np.cos(es.mu + phi)
    s = np.sin(es.mu + phi)
    u = a_c * es.rho * c + tr.u_p
    u_dot = a_c * (es.rho_dot * c - s / es.rho) + tr.u_p_dot
    return u, u_dot


# ---------------------------------------------------------------------------
# Energy transfer
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SuppressionResult:
    """Adiabatic suppression amplitude Xi (m/s) and derived quantities.

    ``norm_sq`` is |Xi~/omega0|^2 with Xi~ = Xi/(b/2); it needs ``b``.
    Energy and quanta need ``mass``.
    """

    xi: complex
    omega0: float
    b: float | None = None
    mass: float | None = None
    hbar: float = HBAR

    @property
    def norm(self) -> float | None:
        if self.b is None:
            return None
        return abs(self.xi) / (0.5 * self.b * self.omega0)

    @property
    def norm_sq(self) -> float | None:
        n = self.norm
        return None if n is None else n * n

    @property
    def energy(self) -> float | None:
        return None if self.mass is None else energy_transfer(self.xi, self.mass)

    @property
    def gamma(self) -> float | None:
        w = self.energy
        return None if w is None else w / (self.hbar * self.omega0)

    def csv_row(self, x_over_2pi: float) -> tuple:
        return (x_over_2pi, self.norm_sq, self.gamma, self.energy)


def energy_transfer(xi: complex, mass: float) -> float:
    """W = m |Xi|^2 / 2 in joules."""
    if not np.isfinite(xi):
        raise InvalidParameterError("Xi must be finite")
    return 0.5 * mass * abs(xi) ** 2


def quanta_transferred(norm_sq: float, mass: float, b: float, omega0: float,
                       hbar: float = HBAR) -> float:
    """Mean number of quanta m b^2 omega0 |Xi~/omega0|^2 / (8 hbar)."""
    return mass * b * b * omega0 * norm_sq / (8.0 * hbar)


def _warn_if_forced(f: ForcingTerm, t1: float, scale: float) -> None:
    val = float(f(t1))
    if abs(val) > 1e-9 * scale:
        warnings.warn(
            f"forcing does not vanish at the readout time (f(t1)={val:.3g} m/s^2)",
            stacklevel=3,
        )


def _forcing_scale(f: ForcingTerm, t0: float, t1: float) -> float:
    probe = np.abs(np.asarray(f(np.linspace(t0, t1, 257)), dtype=float))
    return float(probe.max()) if probe.size else 0.0


def suppression_amplitude_general(
    es: ErmakovSolution,
    f: ForcingTerm,
    t1: float,
    *,
    b: float | None = None,
    mass: float | None = None,
    epsabs: float = 1e-15,
    epsrel: float = 1e-12,
) -> SuppressionResult:
    """Energy-transfer amplitude for arbitrary frequency modulation.

    The two real integrals int rho f cos(dmu) and int rho f sin(dmu) are
    evaluated by adaptive Gauss-Kronrod quadrature, with breakpoints at
    every half turn of the generalized phase.
    """
    lo, hi = es.t[0], es.t[-1]
    if not lo <= t1 <= hi:
        raise OutOfRangeError(f"t1={t1:g} outside solved interval [{lo:g}, {hi:g}]")
    start = max(lo, f.t_start)
    scale = _forcing_scale(f, start, t1)
    _warn_if_forced(f, t1, scale)
    rho1, rhod1, mu1 = (float(v) for v in es.evaluate(t1))
    omega1 = float(es.program(t1))
    if t1 <= start or scale == 0.0:
        return SuppressionResult(0j, es.program.omega0, b, mass)

    def integrand(tp):
        rho, _, mu = es.evaluate(tp)
        dmu = mu1 - mu
        val = rho * float(f(tp))
        return np.array([val * math.cos(dmu), val * math.sin(dmu)])

    # breakpoints roughly every pi of accumulated phase
    n_pieces = int(math.ceil(abs(mu1 - float(es.evaluate(start)[2])) / math.pi)) + 1
    points = np.linspace(start, t1, n_pieces + 1)[1:-1]
    total, err = quad_vec(
        integrand, start, t1, epsabs=epsabs * scale * (t1 - start), epsrel=epsrel,
        points=points if points.size else None, limit=20 * n_pieces + 200, norm="max",
    )
    c_int, s_int = total
    xi = rho1 * (1.0 / rho1**2) * c_int + (rhod1 + 1j * omega1 * rho1) * s_int
    return SuppressionResult(complex(xi), es.program.omega0, b, mass)


def _phase_integral(fp: FrequencyProgram, t_start: float, t_end: float):
    """Dense callable for Phi(t) = int_{t_start}^t omega."""
    if fp.is_constant:
        w = fp.omega0
        return lambda t: w * (np.asarray(t, dtype=float) - t_start)
    w = fp.omega0
    sol = solve_ivp(
        lambda s, y: [fp(t_start + s / w) / w - 1.0],
        (0.0, w * (t_end - t_start)),
        [0.0],
        method="DOP853",
        rtol=1e-12,
        atol=1e-13,
        dense_output=True,
    )
    if not sol.success:
        raise ConvergenceError(sol.message)

    def phi(t):
        s = w * (np.asarray(t, dtype=float) - t_start)
        return sol.sol(s)[0] + s

    return phi


def suppression_amplitude_first_order(
    fp: FrequencyProgram,
    f: ForcingTerm,
    t1: float,
    *,
    b: float | None = None,
    mass: float | None = None,
    epsrel: float = 1e-12,
) -> SuppressionResult:
    """Lowest-order adiabatic amplitude sqrt(w1) int f w^-1/2 exp(i dPhi)."""
    start = f.t_start
    if t1 < start:
        raise OutOfRangeError("t1 precedes the start of the forcing")
    scale = _forcing_scale(f, start, t1)
    _warn_if_forced(f, t1, scale)
    if t1 == start or scale == 0.0:
        return SuppressionResult(0j, fp.omega0, b, mass)
    phi = _phase_integral(fp, start, t1)
    phi1 = float(phi(t1))

    def integrand(tp):
        val = float(f(tp)) / math.sqrt(float(fp(tp)))
        d = phi1 - float(phi(tp))
        return np.array([val * math.cos(d), val * math.sin(d)])

    n_pieces = int(math.ceil(phi1 / math.pi)) + 1
    points = np.linspace(start, t1, n_pieces + 1)[1:-1]
    total, _ = quad_vec(
        integrand, start, t1, epsabs=1e-15 * scale * (t1 - start), epsrel=epsrel,
        points=points if points.size else None, limit=20 * n_pieces + 200, norm="max",
    )
    xi = math.sqrt(float(fp(t1))) * complex(total[0], total[1])
    return SuppressionResult(xi, fp.omega0, b, mass)
