"""Quantum observables of the dragged oscillator.

Transition probabilities between number states follow from the classical
energy transfer gamma (in units of hbar omega0) through associated Laguerre
polynomials. Expectation values and dispersions in coherent states are built
from the Ermakov amplitude rho and the classical particular solution u_p.

hbar is explicit everywhere; pass ``hbar=1`` (with unit mass and frequency)
for the dimensionless convention.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .constants import HBAR
from .errors import DomainError, GridMismatchError, InvalidParameterError
from .ermakov.dynamics import constant_freq_rho
from .io import write_csv

__all__ = [
    "TransitionTable",
    "MomentResult",
    "DispersionTrace",
    "gamma_classical",
    "laguerre_assoc",
    "transition_probability",
    "transition_table",
    "default_cutoff",
    "quantum_moments",
    "classical_moments",
    "coherent_expectations",
    "dispersions",
    "squeezing_trace",
]

_RESCALE = 1e100
_DEFECT_TOL = 1e-10


# ---------------------------------------------------------------------------
# Classical energy in quanta
# ---------------------------------------------------------------------------
def gamma_classical(u_c, u_c_dot, omega, mass: float, omega0: float | None = None,
                    hbar: float = HBAR):
    """gamma = m |u_c' + i omega u_c|^2 / (2 hbar omega0).

    ``omega0`` defaults to ``omega``.
    """
    omega0 = omega if omega0 is None else omega0
    xi = np.asarray(u_c_dot) + 1j * np.asarray(omega) * np.asarray(u_c)
    return mass * np.abs(xi) ** 2 / (2.0 * hbar * np.asarray(omega0))


# ---------------------------------------------------------------------------
# Laguerre polynomials
# ---------------------------------------------------------------------------
def _laguerre_log(k: int, a, x: float):
    """sign and log|L_k^a(x)| by the three-term recurrence, vectorized in a.

    The pair (L_{j-1}, L_j) is rescaled whenever it grows large so the
    recurrence never overflows.
    """
    a = np.asarray(a, dtype=float)
    prev = np.zeros_like(a)
    cur = np.ones_like(a)
    log_scale = np.zeros_like(a)
    for j in range(k):
        nxt = ((2 * j + 1 + a - x) * cur - (j + a) * prev) / (j + 1)
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE
        if np.any(big):
            s = np.where(big, np.abs(cur), 1.0)
            cur = cur / s
            prev = prev / s
            log_scale = log_scale + np.log(s)
    with np.errstate(divide="ignore"):
        return np.sign(cur), np.log(np.abs(cur)) + log_scale


def laguerre_assoc(k: int, a: int, x: float) -> float:
    """Associated Laguerre polynomial L_k^a(x)."""
    if k < 0:
        raise DomainError("Laguerre degree must be nonnegative")
    if a < 0:
        raise DomainError("Laguerre order must be nonnegative")
    sign, logabs = _laguerre_log(int(k), float(a), float(x))
    return float(sign * np.exp(logabs))


# ---------------------------------------------------------------------------
# Transition probabilities
# ---------------------------------------------------------------------------
def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not gamma >= 0 or not math.isfinite(gamma):
        raise DomainError("gamma must be finite and nonnegative")
    return gamma


def transition_probability(m: int, n: int, gamma: float) -> float:
    """P_mn = (mu!/nu!) gamma^(nu-mu) exp(-gamma) (L_mu^(nu-mu)(gamma))^2.

    mu = min(m, n), nu = max(m, n); evaluated in log space.
    """
    if m < 0 or n < 0:
        raise DomainError("state indices must be nonnegative")
    gamma = _check_gamma(gamma)
    lo, hi = (m, n) if m <= n else (n, m)
    if gamma == 0.0:
        return 1.0 if m == n else 0.0
    alpha = hi - lo
    sign, logl = _laguerre_log(lo, float(alpha), gamma)
    if sign == 0:
        return 0.0
    logp = gammaln(lo + 1) - gammaln(hi + 1) + alpha * math.log(gamma) - gamma + 2 * logl
    return float(np.exp(logp))


def _probability_matrix(gamma: float, size: int) -> np.ndarray:
    """Full symmetric matrix P[m, n] for 0 <= m, n < size."""
    if gamma == 0.0:
        return np.eye(size)
    alphas = np.arange(size, dtype=float)
    p = np.zeros((size, size))
    lg = gammaln(np.arange(size) + 1.0)
    # walk the degree mu; for each mu all orders alpha are done at once
    prev = np.zeros(size)
    cur = np.ones(size)
    log_scale = np.zeros(size)
    log_g = math.log(gamma)
    for mu in range(size):
        if mu > 0:
            j = mu - 1
            nxt = ((2 * j + 1 + alphas - gamma) * cur - (j + alphas) * prev) / (j + 1)
            prev, cur = cur, nxt
            big = np.abs(cur) > _RESCALE
            if np.any(big):
                s = np.where(big, np.abs(cur), 1.0)
                cur = cur / s
                prev = prev / s
                log_scale = log_scale + np.log(s)
        count = size - mu
        a = alphas[:count]
        with np.errstate(divide="ignore"):
            logl = np.log(np.abs(cur[:count])) + log_scale[:count]
        logp = lg[mu] - lg[mu + np.arange(count)] + a * log_g - gamma + 2 * logl
        vals = np.exp(logp)
        p[mu, mu:] = vals
        p[mu:, mu] = vals
    return p


def default_cutoff(n: int, gamma: float) -> int:
    """n + ceil(10 (1 + gamma)) + 20."""
    return int(n + math.ceil(10.0 * (1.0 + gamma)) + 20)


@dataclass(frozen=True, eq=False)
class TransitionTable:
    """P[m, k] for 0 <= m, k <= cutoff, read at initial state ``n``."""

    gamma: float
    n: int
    cutoff: int
    P: np.ndarray

    @property
    def column(self) -> np.ndarray:
        return self.P[:, self.n]

    @property
    def defect(self) -> float:
        """1 - sum_m P[m, n]."""
        return float(1.0 - self.column.sum())

    @property
    def is_poisson(self) -> bool:
        return self.n == 0

    def mean(self) -> float:
        m = np.arange(self.cutoff + 1)
        return float(m @ self.column)

    def variance(self) -> float:
        m = np.arange(self.cutoff + 1)
        mean = self.mean()
        return float(((m - mean) ** 2) @ self.column)

    def rows(self, all_columns: bool = False):
        cols = range(self.cutoff + 1) if all_columns else (self.n,)
        for k in cols:
            for m in range(self.cutoff + 1):
                yield (m, k, self.P[m, k])

    def to_csv(self, path, all_columns: bool = False):
        return write_csv(path, ["m", "n", "P"], self.rows(all_columns))


def transition_table(n: int, gamma: float, cutoff: int | None = None) -> TransitionTable:
    """Transition probabilities from number state ``n`` up to ``cutoff``."""
    if n < 0:
        raise DomainError("initial state must be nonnegative")
    gamma = _check_gamma(gamma)
    if cutoff is None:
        cutoff = default_cutoff(n, gamma)
    if cutoff < n:
        raise InvalidParameterError("cutoff must be at least n")
    table = TransitionTable(gamma, int(n), int(cutoff), _probability_matrix(gamma, cutoff + 1))
    defect = table.defect
    if cutoff < n + 10.0 * (1.0 + gamma) or abs(defect) > _DEFECT_TOL:
        warnings.warn(
            f"transition table cutoff {cutoff} may be too small: normalization defect {defect:.3e}",
            stacklevel=2,
        )
    return table


# ---------------------------------------------------------------------------
# Energy moments
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class MomentResult:
    """Mean and variance of the energy; ``unit`` names the energy unit."""

    mean: float
    variance: float
    unit: str = "hbar_omega0"

    def in_joules(self, omega0: float, hbar: float = HBAR) -> "MomentResult":
        if self.unit == "J":
            return self
        e = hbar * omega0
        return MomentResult(self.mean * e, self.variance * e * e, "J")


def quantum_moments(n: int, gamma: float, omega0: float | None = None,
                    hbar: float = HBAR) -> MomentResult:
    """<E> = (n + 1/2 + gamma) hbar w0 and var = (2n + 1) gamma (hbar w0)^2.

    In units of hbar omega0 unless ``omega0`` is given, then in joules.
    """
    if n < 0:
        raise DomainError("initial state must be nonnegative")
    gamma = _check_gamma(gamma)
    res = MomentResult(n + 0.5 + gamma, (2 * n + 1) * gamma)
    return res if omega0 is None else res.in_joules(omega0, hbar)


def classical_moments(e0: float, w: float) -> MomentResult:
    """Phase average over initial conditions of energy e0: (e0 + W, 2 e0 W)."""
    if e0 < 0 or w < 0:
        raise DomainError("energies must be nonnegative")
    return MomentResult(e0 + w, 2.0 * e0 * w, "J")


# ---------------------------------------------------------------------------
# Coherent states
# ---------------------------------------------------------------------------
def _same_grid(es, tr):
    if tr.t.shape != es.t.shape or not np.array_equal(tr.t, es.t):
        raise GridMismatchError("trajectory and Ermakov solution use different grids")


def coherent_expectations(alpha: complex, es, tr, mass: float, hbar: float = HBAR):
    """<q>(t) and <p>(t) in the coherent state alpha = |alpha| exp(-i phi)."""
    _same_grid(es, tr)
    amp = abs(alpha)
    phi = -np.angle(alpha)
    c = np.cos(es.mu + phi)
    s = np.sin(es.mu + phi)
    q = math.sqrt(2.0 * hbar / mass) * es.rho * amp * c + tr.u_p
    p = math.sqrt(2.0 * hbar * mass) * amp * (es.rho_dot * c - s / es.rho) + mass * tr.u_p_dot
    return q, p


@dataclass(frozen=True, eq=False)
class DispersionTrace:
    """Position and momentum variances along a time grid."""

    t: np.ndarray
    dq2: np.ndarray  # m^2
    dp2: np.ndarray  # kg^2 m^2 / s^2
    rho: np.ndarray
    rho_dot: np.ndarray
    hbar: float = HBAR

    @property
    def product(self) -> np.ndarray:
        return self.dq2 * self.dp2

    @property
    def expected_product(self) -> np.ndarray:
        """hbar^2 (1 + rho^2 rho'^2) / 4."""
        return 0.25 * self.hbar**2 * (1.0 + (self.rho * self.rho_dot) ** 2)

    def rows(self):
        return zip(self.t, self.dq2, self.dp2, self.product / self.hbar**2)

    def to_csv(self, path):
        header = ["t_s", "dq2_m2", "dp2_kg2m2_per_s2", "product_hbar2"]
        return write_csv(path, header, self.rows())


def _trace(t, rho, rho_dot, mass, hbar) -> DispersionTrace:
    rho = np.asarray(rho, dtype=float)
    rho_dot = np.asarray(rho_dot, dtype=float)
    dq2 = hbar * rho**2 / (2.0 * mass)
    dp2 = hbar * mass * (rho**-2 + rho_dot**2) / 2.0
    return DispersionTrace(np.asarray(t, dtype=float), dq2, dp2, rho, rho_dot, hbar)


def dispersions(es, mass: float, hbar: float = HBAR) -> DispersionTrace:
    """Delta q^2 = hbar rho^2 / 2m, Delta p^2 = hbar m (rho^-2 + rho'^2) / 2."""
    return _trace(es.t, es.rho, es.rho_dot, mass, hbar)


def squeezing_trace(delta: float, theta: float, omega0: float, mass: float, t,
                    hbar: float = HBAR) -> DispersionTrace:
    """Dispersions for the constant-frequency amplitude with squeezing delta."""
    rho, rho_dot = constant_freq_rho(delta, theta, omega0, np.asarray(t, dtype=float))
    return _trace(t, rho, rho_dot, mass, hbar)
