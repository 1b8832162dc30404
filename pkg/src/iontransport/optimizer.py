"""Waveform synthesis by regularized least squares.

At every time step the electrode amplitudes a_m and the offset phi0 are
chosen so that sum_m a_m phi_m(x) - phi0 matches the moving parabola
eta (x - x0)^2 on the window [x0 - dq, x0 + dq], with a Tikhonov penalty
nu^2 |L (a - a*)|^2 keeping the amplitudes bounded.

Positions are in units of the ion height z_ion (x_hat); potentials in volts.
The curvature coefficient is eta_hat = m omega^2 z_ion^2 / (2 Q) in volts.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .constants import ELEMENTARY_CHARGE
from .errors import (
    ConvergenceError,
    CoverageError,
    InvalidParameterError,
    NonConfiningError,
    SingularityError,
)
from .ermakov.dynamics import ForcingTerm, FrequencyProgram, suppression_amplitude_first_order
from .io import write_csv

__all__ = [
    "OptimizationConfig",
    "SyntheticBasis",
    "LinearSystem",
    "WaveformSolution",
    "ResidualSample",
    "PerturbationTrace",
    "NuScanEntry",
    "AspectReport",
    "side_constraint",
    "assemble_system",
    "check_quadrature",
    "solve_tikhonov",
    "tikhonov_objective",
    "generate_waveforms",
    "nu_scan",
    "select_nu",
    "residual_potential",
    "extract_perturbations",
    "CONTROL_RATIO",
    "residual_ratio",
    "residual_dominates",
    "aspect_ratio_scan",
    "feed_back_dynamics",
]


@dataclass(frozen=True)
class OptimizationConfig:
    """Settings of the per-step least-squares problem.

    delta_q
        Half width of the optimization window in electrode widths W.
    nu
        Tikhonov parameter.
    side
        ``identity`` or ``difference`` (first differences of the electrode
        amplitudes).
    a_star
        Reference vector a*_{+0} (length n_el + 1) or None for zero.
    omega
        Target trap frequency in rad/s.
    """

    omega: float
    mass: float
    charge: float = ELEMENTARY_CHARGE
    delta_q: float = 0.25
    nu: float = 1e-3
    side: str = "identity"
    a_star: tuple | None = None
    quad_order: int = 64
    steps_per_period: int = 64

    def __post_init__(self):
        if not self.delta_q > 0:
            raise InvalidParameterError("delta_q must be positive")
        if not self.nu >= 0:
            raise InvalidParameterError("nu must be nonnegative")
        if self.side not in ("identity", "difference"):
            raise InvalidParameterError(f"unknown side constraint {self.side!r}")
        if not (self.omega > 0 and self.mass > 0 and self.charge > 0):
            raise InvalidParameterError("omega, mass and charge must be positive")
        if self.steps_per_period < 32:
            raise InvalidParameterError("need at least 32 time steps per oscillation period")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    def eta_hat(self, z_ion: float, omega: float | None = None) -> float:
        """m omega^2 z_ion^2 / (2 Q) in volts."""
        w = self.omega if omega is None else omega
        return self.mass * w * w * z_ion * z_ion / (2.0 * self.charge)


class SyntheticBasis:
    """Basis of arbitrary functions, mainly for checks of the optimizer.

    ``funcs`` holds callables ``f(x_hat, order)`` for orders 0, 1, 2.
    """

    def __init__(self, funcs: Sequence[Callable], z_ion: float = 1.0, w_hat: float = 1.0,
                 span: tuple[float, float] = (-np.inf, np.inf), a_max: float = np.inf):
        self.funcs = list(funcs)
        self.n_el = len(self.funcs)
        self.z_ion = z_ion
        self.w_hat = w_hat
        self.span = span
        self.a_max = a_max
        self.indices = np.arange(self.n_el)
        self.labels = self.indices + 1

    def basis(self, x_hat, order: int = 0) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x_hat, dtype=float))
        return np.stack([np.broadcast_to(f(x, order), x.shape) for f in self.funcs], axis=1)


# ---------------------------------------------------------------------------
# Per-step linear system
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class LinearSystem:
    """S_{+0} a_{+0} = eta K, with a_{+0} = (a_1..a_n, phi0)."""

    S: np.ndarray
    K: np.ndarray
    eta: float
    x0: float
    half_width: float


def _window(arr, x0: float, cfg: OptimizationConfig) -> float:
    half = cfg.delta_q * arr.w_hat
    lo, hi = arr.span
    if x0 - half < lo or x0 + half > hi:
        raise CoverageError(
            f"optimization window [{x0 - half:.4g}, {x0 + half:.4g}] leaves the array span "
            f"[{lo:.4g}, {hi:.4g}]"
        )
    return half


@lru_cache(maxsize=None)
def _leggauss(order: int):
    return leggauss(order)


def _nodes(x0: float, half: float, order: int):
    z, w = _leggauss(order)
    return x0 + half * z, half * w


def _augmented(arr, x):
    # columns: electrode potentials, then -1 for the offset (phi ~ phi0 + parabola)
    b = arr.basis(x, 0)
    return np.hstack([b, -np.ones((b.shape[0], 1))])


def assemble_system(arr, x0: float, cfg: OptimizationConfig, omega: float | None = None,
                    order: int | None = None) -> LinearSystem:
    """Gram matrix and moment vector for the window centred at ``x0``.

    The last row and column belong to the offset phi0; its normal equation
    sum_m a_m int phi_m - phi0 2dq = eta int (x - x0)^2 closes the system.
    """
    half = _window(arr, x0, cfg)
    x, w = _nodes(x0, half, cfg.quad_order if order is None else order)
    psi = _augmented(arr, x)
    root = psi * np.sqrt(w)[:, None]  # Gauss-Legendre weights are positive
    s = root.T @ root
    k = psi.T @ (w * (x - x0) ** 2)
    return LinearSystem(s, k, cfg.eta_hat(arr.z_ion, omega), float(x0), half)


def side_constraint(kind: str, n_el: int) -> np.ndarray:
    """Operator L acting on a_{+0} (n_el + 1 entries)."""
    if kind == "identity":
        return np.eye(n_el + 1)
    if kind == "difference":
        lmat = np.zeros((n_el - 1, n_el + 1))
        i = np.arange(n_el - 1)
        lmat[i, i] = -1.0
        lmat[i, i + 1] = 1.0
        return lmat
    raise InvalidParameterError(f"unknown side constraint {kind!r}")


def solve_tikhonov(S, K, eta: float, nu: float, L=None, a_star=None) -> np.ndarray:
    """argmin |S a - eta K|^2 + nu^2 |L (a - a*)|^2.

    Solved as the stacked least-squares problem [S; nu L] a = [eta K; nu L a*]
    with an SVD-based solver, which is the rank-revealing route to the
    regularized normal equations.
    """
    S = np.asarray(S, dtype=float)
    K = np.asarray(K, dtype=float)
    n = S.shape[1]
    if S.ndim != 2 or K.shape != (S.shape[0],):
        raise InvalidParameterError("S must be a matrix and K a matching vector")
    if not nu >= 0:
        raise InvalidParameterError("nu must be nonnegative")
    L = np.eye(n) if L is None else np.asarray(L, dtype=float)
    if L.shape[1] != n:
        raise InvalidParameterError("L has the wrong number of columns")
    a_star = np.zeros(n) if a_star is None else np.asarray(a_star, dtype=float)
    rhs = eta * K
    if nu == 0.0:
        if np.linalg.matrix_rank(S) < n:
            raise SingularityError(
                "S^T S is numerically singular; this is a discrete ill-posed problem, use nu > 0"
            )
        return np.linalg.lstsq(S, rhs, rcond=None)[0]
    A = np.vstack([S, nu * L])
    b = np.concatenate([rhs, nu * (L @ a_star)])
    return np.linalg.lstsq(A, b, rcond=None)[0]


def tikhonov_objective(S, K, eta, nu, L, a_star, a) -> float:
    r = S @ a - eta * K
    p = L @ (a - a_star)
    return float(r @ r + nu * nu * (p @ p))


# ---------------------------------------------------------------------------
# Waveforms over a transport
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class WaveformSolution:
    """Amplitudes a_m(t_k) and offsets phi0(t_k) along a transport."""

    t: np.ndarray
    q0_hat: np.ndarray
    q0_ddot_hat: np.ndarray  # (1/z_ion) d^2 q0 / dt^2, in 1/s^2
    amplitudes: np.ndarray  # shape (n_t, n_el)
    phi0: np.ndarray
    residual: np.ndarray  # int |phi_res|^2 dx_hat per step, V^2
    nu: float
    omega0: float
    a_max: float
    labels: np.ndarray

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega0

    @property
    def t_over_T(self) -> np.ndarray:
        return (self.t - self.t[0]) / self.period

    @property
    def max_amplitude(self) -> float:
        return float(np.abs(self.amplitudes).max())

    @property
    def clipped(self) -> bool:
        """True if any amplitude exceeds the bound a_max."""
        return self.max_amplitude > self.a_max

    def to_csv(self, path):
        header = ["t_over_T", "q0_hat"] + [f"a_{k}" for k in self.labels] + ["phi0_volts"]
        rows = (
            [tt, q] + list(a) + [p]
            for tt, q, a, p in zip(self.t_over_T, self.q0_hat, self.amplitudes, self.phi0)
        )
        return write_csv(path, header, rows)


def _time_grid(p, cfg: OptimizationConfig) -> np.ndarray:
    duration = p.t_end - p.t_start
    n = max(int(math.ceil(duration / cfg.period * cfg.steps_per_period)), 2) + 1
    return np.linspace(p.t_start, p.t_end, n)


def _systems(arr, x0s, cfg, omega=None):
    return [assemble_system(arr, float(x0), cfg, omega) for x0 in x0s]


def _filtered(sys: LinearSystem, svd, nu, a_star):
    # identity L: a = V (s U^T eta K + nu^2 V^T a*) / (s^2 + nu^2)
    u, s, vt = svd
    if nu == 0.0 and s[-1] <= s[0] * len(s) * np.finfo(float).eps:
        raise SingularityError(
            "S^T S is numerically singular; this is a discrete ill-posed problem, use nu > 0"
        )
    coef = s * (u.T @ (sys.eta * sys.K)) + nu * nu * (vt @ a_star)
    return vt.T @ (coef / (s * s + nu * nu))


def _solve_all(arr, systems, cfg, nu, svds=None):
    n = arr.n_el + 1
    a_star = np.zeros(n) if cfg.a_star is None else np.asarray(cfg.a_star, dtype=float)
    if cfg.side == "identity" and svds is not None:
        return np.array([_filtered(s, f, nu, a_star) for s, f in zip(systems, svds)])
    L = side_constraint(cfg.side, arr.n_el)
    return np.array([solve_tikhonov(s.S, s.K, s.eta, nu, L, a_star) for s in systems])


def check_quadrature(arr, x0: float, cfg: OptimizationConfig, tol: float = 1e-10):
    """Raise ConvergenceError unless doubling the quadrature order leaves S, K unchanged."""
    a = assemble_system(arr, x0, cfg)
    b = assemble_system(arr, x0, cfg, order=2 * cfg.quad_order)
    scale = max(np.abs(a.S).max(), 1.0)
    change = max(np.abs(a.S - b.S).max(), np.abs(a.K - b.K).max()) / scale
    if change > tol:
        raise ConvergenceError(
            f"Gauss-Legendre order {cfg.quad_order} not converged (change {change:.2e} on doubling)"
        )
    return change


def _step_residual(arr, sys: LinearSystem, sol, order: int) -> float:
    x, w = _nodes(sys.x0, sys.half_width, order)
    res = _augmented(arr, x) @ sol - sys.eta * (x - sys.x0) ** 2
    return float(w @ (res * res))


def _build_solution(arr, p, cfg, t, x0s, systems, sols, nu) -> WaveformSolution:
    residual = np.array([_step_residual(arr, s, a, cfg.quad_order) for s, a in zip(systems, sols)])
    qdd = p.acceleration(t) / arr.z_ion
    return WaveformSolution(
        t, x0s, qdd, sols[:, :-1].copy(), sols[:, -1].copy(), residual, float(nu),
        cfg.omega, float(arr.a_max), np.asarray(arr.labels),
    )


def generate_waveforms(arr, p, cfg: OptimizationConfig) -> WaveformSolution:
    """Solve the regularized window fit at every time step of the transport."""
    t = _time_grid(p, cfg)
    x0s = p.position(t) / arr.z_ion
    check_quadrature(arr, float(x0s[0]), cfg)
    systems = _systems(arr, x0s, cfg)
    sols = _solve_all(arr, systems, cfg, cfg.nu)
    return _build_solution(arr, p, cfg, t, x0s, systems, sols, cfg.nu)


# ---------------------------------------------------------------------------
# Residual potential and perturbations
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class ResidualSample:
    x_hat: np.ndarray
    phi_res: np.ndarray  # V
    dphi_res: np.ndarray  # V per x_hat
    d2phi_res: np.ndarray  # V per x_hat^2
    a_res: np.ndarray  # m/s^2
    a_res_prime: np.ndarray  # 1/s^2


def residual_potential(arr, amplitudes, phi0: float, q0_hat: float, omega: float,
                       cfg: OptimizationConfig, n: int = 201) -> ResidualSample:
    """phi_res = phi - phi0 - m omega^2 (q - q0)^2 / 2Q over the window.

    a_res = -(Q/m) d phi_res / dq and a'_res = -(Q/m) d^2 phi_res / dq^2.
    """
    half = _window(arr, q0_hat, cfg)
    x = np.linspace(q0_hat - half, q0_hat + half, n)
    a = np.asarray(amplitudes, dtype=float)
    eta = cfg.eta_hat(arr.z_ion, omega)
    u = x - q0_hat
    phi = arr.basis(x, 0) @ a - phi0 - eta * u * u
    d1 = arr.basis(x, 1) @ a - 2.0 * eta * u
    d2 = arr.basis(x, 2) @ a - 2.0 * eta
    qm = cfg.charge / cfg.mass
    z = arr.z_ion
    return ResidualSample(x, phi, d1, d2, -qm * d1 / z, -qm * d2 / z**2)


@dataclass(frozen=True, eq=False)
class PerturbationTrace:
    """Lowest-order perturbations along the transport.

    ``omega_ratio_sq`` is (omega(q0)/omega0)^2, negative where the well is
    anti-confining; ``a_res_norm`` is -a_res/(z_ion omega0^2) and
    ``qddot_norm`` is q0''/(z_ion omega0^2).
    """

    t: np.ndarray
    t_over_T: np.ndarray
    omega_ratio_sq: np.ndarray
    a_res_norm: np.ndarray
    qddot_norm: np.ndarray
    omega0: float
    z_ion: float

    @property
    def omega_ratio(self) -> np.ndarray:
        r = self.omega_ratio_sq
        return np.sign(r) * np.sqrt(np.abs(r))

    @property
    def max_frequency_deviation(self) -> float:
        return float(np.abs(self.omega_ratio - 1.0).max())

    @property
    def min_frequency_ratio(self) -> float:
        return float(self.omega_ratio.min())

    def to_csv(self, path):
        header = ["t_over_T", "omega_ratio", "a_res_norm", "qddot_norm"]
        return write_csv(path, header,
                         zip(self.t_over_T, self.omega_ratio, self.a_res_norm, self.qddot_norm))


def extract_perturbations(ws: WaveformSolution, arr, cfg: OptimizationConfig) -> PerturbationTrace:
    """omega(q0)/omega0 and -a_res(q0)/omega0^2 from the synthesized potentials."""
    d1 = np.einsum("ij,ij->i", arr.basis(ws.q0_hat, 1), ws.amplitudes)
    d2 = np.einsum("ij,ij->i", arr.basis(ws.q0_hat, 2), ws.amplitudes)
    two_eta = 2.0 * cfg.eta_hat(arr.z_ion, ws.omega0)
    w0sq = ws.omega0**2
    return PerturbationTrace(
        ws.t.copy(), ws.t_over_T, d2 / two_eta, d1 / two_eta, ws.q0_ddot_hat / w0sq,
        ws.omega0, arr.z_ion,
    )


# ---------------------------------------------------------------------------
# Regularization scan and aspect ratios
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class NuScanEntry:
    nu: float
    residual_norm: float  # sqrt(sum_k int |phi_res|^2), V
    solution_norm: float  # |a - a*| over all steps
    max_amplitude: float
    feasible: bool
    max_frequency_deviation: float
    min_frequency_ratio: float
    solution: WaveformSolution = field(repr=False)
    trace: PerturbationTrace = field(repr=False)


def nu_scan(arr, p, cfg: OptimizationConfig, nus, threads: int = 1) -> list[NuScanEntry]:
    """Solve the transport for each nu; report (residual, solution) norms."""
    t = _time_grid(p, cfg)
    x0s = p.position(t) / arr.z_ion
    check_quadrature(arr, float(x0s[0]), cfg)
    systems = _systems(arr, x0s, cfg)
    a_star = np.zeros(arr.n_el + 1) if cfg.a_star is None else np.asarray(cfg.a_star)
    # one SVD per step serves the whole scan when L is the identity
    svds = [np.linalg.svd(s.S) for s in systems] if cfg.side == "identity" else None

    def run(nu):
        sols = _solve_all(arr, systems, cfg, nu, svds)
        ws = _build_solution(arr, p, cfg, t, x0s, systems, sols, nu)
        tr = extract_perturbations(ws, arr, cfg)
        return NuScanEntry(
            float(nu),
            float(np.sqrt(ws.residual.sum())),
            float(np.linalg.norm(sols - a_star[None, :])),
            ws.max_amplitude,
            not ws.clipped,
            tr.max_frequency_deviation,
            tr.min_frequency_ratio,
            ws,
            tr,
        )

    nus = [float(v) for v in nus]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, nus))
    return [run(nu) for nu in nus]


def select_nu(entries: Sequence[NuScanEntry]) -> NuScanEntry:
    """Best feasible entry: smallest frequency deviation with |a_m| <= a_max.

    Falls back to the smallest amplitude if no entry is feasible.
    """
    feasible = [e for e in entries if e.feasible]
    if feasible:
        return min(feasible, key=lambda e: e.max_frequency_deviation)
    return min(entries, key=lambda e: e.max_amplitude)


@dataclass(frozen=True, eq=False)
class AspectReport:
    """Outcome of the synthesis at one aspect ratio.

    ``residual_ratio`` is max|a_res| / max|q0''| over the transport; the
    transport counts as controlled when it stays below ``CONTROL_RATIO``.
    """

    w_hat: float
    nu: float
    trace: PerturbationTrace
    max_amplitude: float
    feasible: bool
    max_residual: float
    residual_ratio: float
    residual_dominates: bool

    @property
    def controlled(self) -> bool:
        return self.residual_ratio < CONTROL_RATIO

    @property
    def max_frequency_deviation(self) -> float:
        return self.trace.max_frequency_deviation

    @property
    def min_frequency_ratio(self) -> float:
        return self.trace.min_frequency_ratio


# "much smaller" taken as one order of magnitude
CONTROL_RATIO = 0.1


def residual_ratio(trace: PerturbationTrace) -> float:
    """max|a_res| / max|q0''| along the transport."""
    return float(np.abs(trace.a_res_norm).max() / np.abs(trace.qddot_norm).max())


def residual_dominates(trace: PerturbationTrace, phase: float = 0.5,
                       visible: float = 0.05) -> bool:
    """Does the residual acceleration overwhelm the transport acceleration early on?

    True if during the first ``phase`` of the transport |a_res| exceeds
    |q0''| at some step where it is also visible on the scale of the
    transport acceleration, i.e. above ``visible`` * max|q0''|.
    """
    n = len(trace.t)
    early = slice(0, max(int(n * phase), 1))
    ares = np.abs(trace.a_res_norm[early])
    qdd = np.abs(trace.qddot_norm[early])
    scale = np.abs(trace.qddot_norm).max()
    return bool(np.any((ares > qdd) & (ares > visible * scale)))


def aspect_ratio_scan(w_hats, cfg: OptimizationConfig, arr_template, p, nus=None,
                      threads: int = 1) -> list[AspectReport]:
    """Repeat the synthesis for several W_hat at fixed z_ion.

    ``p`` is a transport profile or a callable W_hat -> profile (so the
    transport can span a fixed number of electrode widths). With ``nus``
    the best feasible nu of a logarithmic scan is used, else ``cfg.nu``.
    """
    reports = []
    for w_hat in w_hats:
        arr = arr_template.scaled(float(w_hat))
        prof = p(float(w_hat)) if callable(p) else p
        if nus is None:
            ws = generate_waveforms(arr, prof, cfg)
            tr = extract_perturbations(ws, arr, cfg)
            nu = cfg.nu
        else:
            best = select_nu(nu_scan(arr, prof, cfg, nus, threads))
            ws, tr, nu = best.solution, best.trace, best.nu
        reports.append(AspectReport(
            float(w_hat), nu, tr, ws.max_amplitude, not ws.clipped,
            float(ws.residual.max()), residual_ratio(tr), residual_dominates(tr),
        ))
    return reports


# ---------------------------------------------------------------------------
# Feed back into the dynamics
# ---------------------------------------------------------------------------
def feed_back_dynamics(tr: PerturbationTrace, mass: float, omega0: float, b: float | None = None):
    """Energy transfer of the perturbed transport to lowest adiabatic order.

    omega(t) and f(t) = -q0'' + a_res are interpolated cubically from the
    trace. A trace where the synthesized well stops confining has no
    oscillator to feed back into and raises NonConfiningError.
    """
    ratio_sq = tr.omega_ratio_sq
    if np.any(ratio_sq <= 0):
        k = int(np.argmin(ratio_sq))
        raise NonConfiningError(
            f"synthesized well does not confine at t/T = {tr.t_over_T[k]:.3f} "
            f"((omega/omega0)^2 = {ratio_sq[k]:.3g})"
        )
    fp = FrequencyProgram.tabulated(tr.t, omega0 * np.sqrt(ratio_sq))
    # a_res_norm holds -a_res / (z omega0^2)
    force = ForcingTerm.tabulated(tr.t, -(tr.qddot_norm + tr.a_res_norm) * omega0**2 * tr.z_ion)
    res = suppression_amplitude_first_order(fp, force, float(tr.t[-1]), b=b, mass=mass)
    return replace(res, omega0=omega0)
