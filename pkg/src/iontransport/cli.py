"""Command-line driver.

    iontransport <command> CONFIG.json [--out DIR] [--threads N]

Commands: suppression, waveforms, quantum, electrodes, aspect-scan, gate-rate.
A run reads one JSON document, validates it against ``CONFIG_SCHEMA`` and
writes CSV files (17 significant digits, unit-bearing headers) plus a JSON
summary to the output directory. Diagnostics go to stderr as
``LEVEL module message`` lines.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .constants import ATOMIC_MASS, ELEMENTARY_CHARGE, HBAR
from .electrodes import (
    ElectrodeArray,
    argmax_geometry_factor,
    axial_frequency,
    axial_frequency_curvature,
    geometry_factor,
    potential_scan,
)
from .ermakov import (
    analytic_erf_suppression,
    analytic_sine_suppression,
    criterion_threshold,
    erf_criterion_transport,
    first_sustained,
    suppression_amplitude_ideal,
)
from .errors import ConfigError, IonTransportError, NonConfiningError
from .io import write_csv
from .optimizer import (
    OptimizationConfig,
    SyntheticBasis,
    aspect_ratio_scan,
    extract_perturbations,
    feed_back_dynamics,
    generate_waveforms,
    nu_scan,
    select_nu,
)
from .profiles import load_tabulated_profile, make_erf_profile, make_sine_profile
from .quantum import quantum_moments, squeezing_trace, transition_table

__all__ = [
    "CONFIG_SCHEMA",
    "GateRateParams",
    "RunConfig",
    "gate_rate_estimate",
    "load_config",
    "run_suppression_scan",
    "run_waveform_synthesis",
    "run_quantum_report",
    "run_electrode_report",
    "run_aspect_scan",
    "main",
]

log = logging.getLogger("iontransport.cli")

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "scenario": {"type": "string"},
        "output_dir": {"type": "string"},
        "constants": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "mass_u": _POS,
                "charge_e": _POS,
                "hbar_si": {"type": "boolean"},
            },
        },
        "profile": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["sine", "erf", "table"]},
                "b_m": _POS,
                "x_over_2pi": _POS,
                "y": _POS,
                "table_csv": {"type": "string"},
            },
        },
        "suppression": {
            "type": "object",
            "additionalProperties": False,
            "required": ["omega0_MHz"],
            "properties": {
                "omega0_MHz": _POS,
                "x_over_2pi_min": _POS,
                "x_over_2pi_max": _POS,
                "points": {"type": "integer", "minimum": 2},
            },
        },
        "array": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["stripes", "quadratic"]},
                "n_el": {"type": "integer", "minimum": 3},
                "w_hat": _POS,
                "z_ion_m": _POS,
                "a_max_V": _POS,
                "unit_voltage_V": _POS,
                "center_label": {"type": "integer"},
            },
        },
        "optimizer": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "omega0_MHz": _POS,
                "a0_V": {"type": "number", "exclusiveMaximum": 0},
                "reference_w_hat": _POS,
                "transport_widths": _POS,
                "delta_q_W": _POS,
                "nu": _NONNEG,
                "nu_scan": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["min", "max"],
                    "properties": {
                        "min": _POS,
                        "max": _POS,
                        "per_decade": {"type": "integer", "minimum": 1},
                    },
                },
                "side": {"enum": ["identity", "difference"]},
                "steps_per_period": {"type": "integer", "minimum": 32},
                "quad_order": {"type": "integer", "minimum": 4},
                "w_hats": {"type": "array", "items": _POS, "minItems": 1},
            },
        },
        "quantum": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n"],
            "properties": {
                "n": {"type": "integer", "minimum": 0},
                "gamma": _NONNEG,
                "cutoff": {"type": "integer", "minimum": 0},
                "all_columns": {"type": "boolean"},
                "dispersion": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["delta"],
                    "properties": {
                        "delta": {"type": "number"},
                        "theta": {"type": "number"},
                        "omega0_MHz": _POS,
                        "periods": _POS,
                        "points": {"type": "integer", "minimum": 2},
                    },
                },
            },
        },
        "electrodes": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "amplitudes_V": {"type": "array", "items": {"type": "number"}},
                "a0_V": {"type": "number"},
                "x_hat_min": {"type": "number"},
                "x_hat_max": {"type": "number"},
                "points": {"type": "integer", "minimum": 2},
            },
        },
        "gate_rate": {
            "type": "object",
            "additionalProperties": False,
            "required": ["nu_com_MHz", "nu_r_MHz", "tau_cool_s", "tau_p_s"],
            "properties": {
                "nu_com_MHz": _POS,
                "nu_r_MHz": _POS,
                "tau_cool_s": _NONNEG,
                "tau_p_s": _NONNEG,
            },
        },
    },
}


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class GateRateParams:
    """Trap frequencies in Hz and cooling / gate-pulse durations in s."""

    nu_com: float
    nu_r: float
    tau_cool: float
    tau_p: float

    def __post_init__(self):
        if not (self.nu_com > 0 and self.nu_r > 0):
            raise ConfigError("trap frequencies must be positive")
        if self.tau_cool < 0 or self.tau_p < 0:
            raise ConfigError("durations must be nonnegative")


def gate_rate_estimate(p: GateRateParams) -> float:
    """Gate time tau_g = 2/nu_COM + 10/nu_r + tau_cool + tau_p in seconds."""
    return 2.0 / p.nu_com + 10.0 / p.nu_r + p.tau_cool + p.tau_p


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    mass: float  # kg
    charge: float  # C
    hbar_si: bool  # False: dispersion traces in units hbar = m = omega0 = 1
    sections: dict = field(repr=False)
    output_dir: Path = Path("out")

    def section(self, name: str) -> dict:
        if name not in self.sections:
            raise ConfigError(f"config has no '{name}' section")
        return self.sections[name]


def _field_path(err) -> str:
    return ".".join(str(p) for p in err.absolute_path) or "<root>"


def parse_config(doc: dict) -> RunConfig:
    """Validate a decoded JSON document and convert units to SI."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        lines = [f"{_field_path(e)}: {e.message}" for e in errors]
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(lines))
    consts = doc.get("constants", {})
    return RunConfig(
        scenario=doc.get("scenario", "unnamed"),
        mass=consts.get("mass_u", 9.01218) * ATOMIC_MASS,
        charge=consts.get("charge_e", 1.0) * ELEMENTARY_CHARGE,
        hbar_si=consts.get("hbar_si", True),
        sections=doc,
        output_dir=Path(doc.get("output_dir", "out")),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return parse_config(doc)


def _mhz(v: float) -> float:
    return 2.0 * math.pi * v * 1e6


def _write_json(path: Path, obj) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def _pmap(func, items, threads: int):
    # order-preserving, so output files do not depend on the thread count
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(func, items))
    return [func(v) for v in items]


# ---------------------------------------------------------------------------
# suppression
# ---------------------------------------------------------------------------
def run_suppression_scan(cfg: RunConfig, out: Path, threads: int = 1) -> Path:
    """|Xi~/omega0|^2 from quadrature and closed form over a range of x/2pi."""
    prof = cfg.section("profile")
    sup = cfg.section("suppression")
    kind = prof["kind"]
    if kind not in ("sine", "erf"):
        raise ConfigError("suppression scans need a sine or erf profile")
    if "b_m" not in prof:
        raise ConfigError("profile.b_m is required for a suppression scan")
    if kind == "erf" and "y" not in prof:
        raise ConfigError("profile.y is required for the erf profile")
    b = prof["b_m"]
    omega0 = _mhz(sup["omega0_MHz"])
    lo, hi = sup.get("x_over_2pi_min", 0.1), sup.get("x_over_2pi_max", 60.0)
    if not hi > lo:
        raise ConfigError("suppression.x_over_2pi_max must exceed x_over_2pi_min")
    grid = np.linspace(lo, hi, sup.get("points", 200))
    thr = criterion_threshold(cfg.mass, b, omega0)

    def row(x2):
        x = 2.0 * math.pi * x2
        t0 = x / omega0
        if kind == "sine":
            p = make_sine_profile(t0, b)
            closed = float(analytic_sine_suppression(x)) ** 2
        else:
            y = prof["y"]
            if 2.0 * x <= y:
                return (x2, math.nan, math.nan, math.nan)
            p = make_erf_profile(t0, y / omega0, b)
            closed = analytic_erf_suppression(x, y, "full") ** 2
        res = suppression_amplitude_ideal(omega0, p, mass=cfg.mass)
        gamma = res.gamma
        return (x2, res.norm_sq, closed, gamma)

    rows = _pmap(row, grid, threads)
    path = write_csv(out / "suppression.csv",
                     ["x_over_2pi", "norm_sq_numeric", "norm_sq_closed_form", "gamma_quanta"], rows)
    numeric = np.array([r[1] for r in rows])
    ok = np.isfinite(numeric)
    sustained = first_sustained(grid[ok], numeric[ok], thr) if ok.any() else None
    summary = {
        "scenario": cfg.scenario,
        "profile": kind,
        "omega0_rad_per_s": omega0,
        "b_m": b,
        "threshold_norm_sq": thr,
        "first_sustained_x_over_2pi": sustained,
    }
    if kind == "erf":
        rec = erf_criterion_transport(thr)
        summary["asymptote_norm_sq"] = analytic_erf_suppression(1.0, prof["y"], "asymptote") ** 2
        summary["criterion_reachable_at_y"] = summary["asymptote_norm_sq"] < thr
        summary["shortest_erf_transport"] = {
            "y": rec.y, "x_over_2pi": rec.x / (2 * math.pi), "cycles": rec.cycles,
        }
    if sustained is None:
        log.warning("criterion |Xi/w0|^2 < %.4g not sustained within the scanned range", thr)
    _write_json(out / "suppression_summary.json", summary)
    log.info("wrote %s (%d rows)", path, len(rows))
    return path


# ---------------------------------------------------------------------------
# waveforms
# ---------------------------------------------------------------------------
def _quadratic_basis(z_ion: float) -> SyntheticBasis:
    def lin(x, k):
        return [x, np.ones_like(x), np.zeros_like(x)][k]

    def sq(x, k):
        return [x * x, 2.0 * x, 2.0 * np.ones_like(x)][k]

    return SyntheticBasis([lin, sq], z_ion=z_ion, w_hat=1.0)


def _array(cfg: RunConfig, w_hat: float | None = None):
    arr_sec = cfg.sections.get("array", {})
    z = arr_sec.get("z_ion_m", 40e-6)
    if arr_sec.get("kind", "stripes") == "quadratic":
        return _quadratic_basis(z)
    n_el = arr_sec.get("n_el", 41)
    if n_el % 2 == 0:
        raise ConfigError("array.n_el must be odd")
    return ElectrodeArray(
        n_el, arr_sec.get("w_hat", 1.0) if w_hat is None else w_hat, z,
        arr_sec.get("unit_voltage_V", 1.0), arr_sec.get("a_max_V", 2.0), arr_sec.get("center_label"),
    )


def _target_omega(cfg: RunConfig) -> float:
    opt = cfg.sections.get("optimizer", {})
    if "omega0_MHz" in opt:
        return _mhz(opt["omega0_MHz"])
    arr_sec = cfg.sections.get("array", {})
    w_ref = opt.get("reference_w_hat", arr_sec.get("w_hat", 1.0))
    return axial_frequency(w_ref, arr_sec.get("z_ion_m", 40e-6), opt.get("a0_V", -2.0), cfg.mass,
                           cfg.charge, arr_sec.get("unit_voltage_V", 1.0))


def _opt_config(cfg: RunConfig, omega: float) -> OptimizationConfig:
    opt = cfg.sections.get("optimizer", {})
    return OptimizationConfig(
        omega=omega, mass=cfg.mass, charge=cfg.charge,
        delta_q=opt.get("delta_q_W", 0.25), nu=opt.get("nu", 1e-8),
        side=opt.get("side", "identity"), quad_order=opt.get("quad_order", 64),
        steps_per_period=opt.get("steps_per_period", 64),
    )


def _transport_profile(cfg: RunConfig, omega: float, w_hat: float, z_ion: float):
    prof = cfg.section("profile")
    opt = cfg.sections.get("optimizer", {})
    b = prof.get("b_m", opt.get("transport_widths", 4.0) * w_hat * z_ion)
    kind = prof["kind"]
    if kind == "table":
        if "table_csv" not in prof:
            raise ConfigError("profile.table_csv is required for a tabulated profile")
        return load_tabulated_profile(prof["table_csv"], b)
    if "x_over_2pi" not in prof:
        raise ConfigError("profile.x_over_2pi is required for waveform synthesis")
    t0 = 2.0 * math.pi * prof["x_over_2pi"] / omega
    if kind == "sine":
        return make_sine_profile(t0, b)
    if "y" not in prof:
        raise ConfigError("profile.y is required for the erf profile")
    return make_erf_profile(t0, prof["y"] / omega, b)


def _nu_grid(cfg: RunConfig):
    scan = cfg.sections.get("optimizer", {}).get("nu_scan")
    if scan is None:
        return None
    lo, hi = math.log10(scan["min"]), math.log10(scan["max"])
    if hi < lo:
        raise ConfigError("optimizer.nu_scan.max must not be below min")
    n = int(round((hi - lo) * scan.get("per_decade", 4))) + 1
    return np.logspace(lo, hi, max(n, 1))


def run_waveform_synthesis(cfg: RunConfig, out: Path, threads: int = 1) -> Path:
    """Waveforms, perturbation trace, nu scan (optional) and a JSON summary."""
    omega = _target_omega(cfg)
    arr = _array(cfg)
    ocfg = _opt_config(cfg, omega)
    p = _transport_profile(cfg, omega, arr.w_hat, arr.z_ion)
    nus = _nu_grid(cfg)
    if nus is None:
        ws = generate_waveforms(arr, p, ocfg)
        tr = extract_perturbations(ws, arr, ocfg)
    else:
        entries = nu_scan(arr, p, ocfg, nus, threads)
        write_csv(out / "nu_scan.csv",
                  ["nu", "residual_norm_V", "solution_norm_V", "max_amplitude_V", "feasible",
                   "max_frequency_deviation", "min_frequency_ratio"],
                  ((e.nu, e.residual_norm, e.solution_norm, e.max_amplitude, e.feasible,
                    e.max_frequency_deviation, e.min_frequency_ratio) for e in entries))
        best = select_nu(entries)
        ws, tr = best.solution, best.trace
    path = ws.to_csv(out / "waveforms.csv")
    tr.to_csv(out / "perturbations.csv")
    if ws.clipped:
        log.warning("amplitudes exceed a_max = %g V (max %.4g V)", ws.a_max, ws.max_amplitude)
    gamma = None
    try:
        gamma = feed_back_dynamics(tr, cfg.mass, omega, b=p.b).gamma
    except NonConfiningError as exc:
        log.warning("no feed-back energy transfer: %s", exc)
    drop = 1.0 - tr.min_frequency_ratio
    if drop > 0.5:
        log.warning("trap frequency drops by %.0f%% during transport", 100 * drop)
    summary = {
        "scenario": cfg.scenario,
        "omega0_rad_per_s": omega,
        "nu": ws.nu,
        "max_amplitude_V": ws.max_amplitude,
        "amplitudes_clipped": ws.clipped,
        "residual_max_V2": float(ws.residual.max()),
        "residual_norm_V": float(np.sqrt(ws.residual.sum())),
        "max_frequency_deviation": tr.max_frequency_deviation,
        "min_frequency_ratio": tr.min_frequency_ratio,
        "frequency_drop_flag": bool(drop > 0.5),
        "max_a_res_norm": float(np.abs(tr.a_res_norm).max()),
        "feed_back_gamma_quanta": gamma,
    }
    _write_json(out / "waveforms_summary.json", summary)
    log.info("wrote %s", path)
    return path


def run_aspect_scan(cfg: RunConfig, out: Path, threads: int = 1) -> Path:
    """Synthesis for several W_hat at fixed z_ion and target frequency."""
    opt = cfg.section("optimizer")
    w_hats = opt.get("w_hats", [0.5, 1.0, 1.5, 2.0])
    omega = _target_omega(cfg)
    template = _array(cfg)
    if not isinstance(template, ElectrodeArray):
        raise ConfigError("aspect-scan needs a stripe electrode array")
    ocfg = _opt_config(cfg, omega)

    def profile(w_hat):
        return _transport_profile(cfg, omega, w_hat, template.z_ion)

    reports = aspect_ratio_scan(w_hats, ocfg, template, profile, _nu_grid(cfg), threads)
    for r in reports:
        r.trace.to_csv(out / f"perturbations_W{r.w_hat:g}.csv")
    path = write_csv(
        out / "aspect_scan.csv",
        ["w_hat", "nu", "max_amplitude_V", "feasible", "max_residual_V2", "residual_ratio",
         "controlled", "residual_dominates_early", "min_frequency_ratio", "max_frequency_deviation"],
        ((r.w_hat, r.nu, r.max_amplitude, r.feasible, r.max_residual, r.residual_ratio,
          r.controlled, r.residual_dominates, r.min_frequency_ratio, r.max_frequency_deviation)
         for r in reports),
    )
    log.info("wrote %s", path)
    return path


# ---------------------------------------------------------------------------
# quantum
# ---------------------------------------------------------------------------
def _derived_gamma(cfg: RunConfig) -> float:
    prof = cfg.section("profile")
    sup = cfg.section("suppression")
    omega0 = _mhz(sup["omega0_MHz"])
    if "b_m" not in prof or "x_over_2pi" not in prof:
        raise ConfigError("deriving gamma needs profile.b_m and profile.x_over_2pi")
    t0 = 2.0 * math.pi * prof["x_over_2pi"] / omega0
    if prof["kind"] == "sine":
        p = make_sine_profile(t0, prof["b_m"])
    elif prof["kind"] == "erf" and "y" in prof:
        p = make_erf_profile(t0, prof["y"] / omega0, prof["b_m"])
    else:
        raise ConfigError("deriving gamma needs a sine or erf profile")
    res = suppression_amplitude_ideal(omega0, p, mass=cfg.mass)
    return res.gamma


def run_quantum_report(cfg: RunConfig, out: Path, threads: int = 1) -> Path:
    """Transition table, energy moments and optional dispersion trace."""
    q = cfg.section("quantum")
    n = q["n"]
    gamma = q["gamma"] if "gamma" in q else _derived_gamma(cfg)
    table = transition_table(n, gamma, q.get("cutoff"))
    path = table.to_csv(out / "transitions.csv", q.get("all_columns", False))
    mom = quantum_moments(n, gamma)
    summary = {
        "scenario": cfg.scenario,
        "n": n,
        "gamma_quanta": gamma,
        "cutoff": table.cutoff,
        "distribution": "poisson" if table.is_poisson else "laguerre",
        "normalization_defect": table.defect,
        "mean_energy_hbar_omega0": mom.mean,
        "energy_variance_hbar_omega0_sq": mom.variance,
        "table_mean_quanta": table.mean(),
        "table_variance_quanta": table.variance(),
    }
    disp = q.get("dispersion")
    if disp is not None:
        if cfg.hbar_si:
            omega0, mass, hbar = _mhz(disp.get("omega0_MHz", 1.0)), cfg.mass, HBAR
        else:
            omega0, mass, hbar = 1.0, 1.0, 1.0
        period = 2.0 * math.pi / omega0
        t = np.linspace(0.0, disp.get("periods", 2.0) * period, disp.get("points", 401))
        trace = squeezing_trace(disp["delta"], disp.get("theta", 0.0), omega0, mass, t, hbar)
        trace.to_csv(out / "dispersions.csv")
    _write_json(out / "quantum_summary.json", summary)
    log.info("wrote %s", path)
    return path


# ---------------------------------------------------------------------------
# electrodes
# ---------------------------------------------------------------------------
def run_electrode_report(cfg: RunConfig, out: Path, threads: int = 1) -> Path:
    """Superposed potential along the axis and single-electrode frequencies."""
    arr = _array(cfg)
    if not isinstance(arr, ElectrodeArray):
        raise ConfigError("electrodes needs a stripe electrode array")
    el = cfg.sections.get("electrodes", {})
    a0 = el.get("a0_V", -2.0)
    if "amplitudes_V" in el:
        amps = np.asarray(el["amplitudes_V"], dtype=float)
        if amps.shape != (arr.n_el,):
            raise ConfigError(f"electrodes.amplitudes_V needs {arr.n_el} entries")
    else:
        amps = np.zeros(arr.n_el)
        amps[arr.half] = a0
    lo, hi = arr.span
    x = np.linspace(el.get("x_hat_min", lo), el.get("x_hat_max", hi), el.get("points", 401))
    path = out / "potential.csv"
    potential_scan(arr, amps, x, path)
    summary = {
        "scenario": cfg.scenario,
        "w_hat": arr.w_hat,
        "z_ion_m": arr.z_ion,
        "geometry_factor": float(geometry_factor(arr.w_hat)),
        "argmax_geometry_factor": argmax_geometry_factor(),
    }
    if a0 < 0:
        args = (arr.w_hat, arr.z_ion, a0, cfg.mass, cfg.charge, arr.unit_voltage)
        summary["axial_frequency_MHz"] = axial_frequency(*args) / (2e6 * math.pi)
        summary["axial_frequency_curvature_MHz"] = axial_frequency_curvature(*args) / (2e6 * math.pi)
    _write_json(out / "electrodes_summary.json", summary)
    log.info("wrote %s", path)
    return path


# ---------------------------------------------------------------------------
# gate rate
# ---------------------------------------------------------------------------
def run_gate_rate(cfg: RunConfig | None, out: Path | None, args) -> float:
    flags = (args.nu_com_MHz, args.nu_r_MHz, args.tau_cool_s, args.tau_p_s)
    if all(v is not None for v in flags):
        g = dict(zip(("nu_com_MHz", "nu_r_MHz", "tau_cool_s", "tau_p_s"), flags))
    elif cfg is not None:
        g = cfg.section("gate_rate")
    else:
        raise ConfigError("gate-rate needs a config with a gate_rate section or all four flags")
    params = GateRateParams(g["nu_com_MHz"] * 1e6, g["nu_r_MHz"] * 1e6, g["tau_cool_s"], g["tau_p_s"])
    tau = gate_rate_estimate(params)
    if out is not None:
        _write_json(out / "gate_rate.json", {"tau_g_s": tau, "rate_per_s": 1.0 / tau, **g})
    print(f"tau_g = {tau * 1e6:.6g} us")
    return tau


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------
_COMMANDS = {
    "suppression": run_suppression_scan,
    "waveforms": run_waveform_synthesis,
    "quantum": run_quantum_report,
    "electrodes": run_electrode_report,
    "aspect-scan": run_aspect_scan,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iontransport", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in _COMMANDS.items():
        p = sub.add_parser(name, help=func.__doc__.splitlines()[0])
        p.add_argument("config", help="JSON run configuration")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        p.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    g = sub.add_parser("gate-rate", help="gate time 2/nu_COM + 10/nu_r + tau_cool + tau_p")
    g.add_argument("config", nargs="?", help="JSON run configuration with a gate_rate section")
    g.add_argument("--out", help="output directory")
    g.add_argument("--threads", type=int, default=1)
    g.add_argument("--nu-com-MHz", type=float, dest="nu_com_MHz")
    g.add_argument("--nu-r-MHz", type=float, dest="nu_r_MHz")
    g.add_argument("--tau-cool-s", type=float, dest="tau_cool_s")
    g.add_argument("--tau-p-s", type=float, dest="tau_p_s")
    return parser


def _setup_logging(verbose: bool) -> None:
    root = logging.getLogger()
    for h in list(root.handlers):
        root.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s %(message)s"))
    root.addHandler(handler)
    root.setLevel(logging.INFO if verbose else logging.WARNING)
    logging.captureWarnings(True)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)
    cfg = None
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        cfg = load_config(args.config) if args.config else None
        out = Path(args.out) if args.out else (cfg.output_dir if cfg else None)
        if args.command == "gate-rate":
            run_gate_rate(cfg, out, args)
        else:
            _COMMANDS[args.command](cfg, out, args.threads)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except (IonTransportError, ArithmeticError, FloatingPointError) as exc:
        where = f"scenario {cfg.scenario!r}: " if cfg is not None else ""
        log.error("%s%s: %s", where, type(exc).__name__, exc)
        return EXIT_NUMERIC
    finally:
        logging.captureWarnings(False)
    return 0


if __name__ == "__main__":
    sys.exit(main())
