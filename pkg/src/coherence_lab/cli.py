"""Command-line interface: simulate, fit, reproduce-paper, schema.

Exit codes: 0 success, 2 config/schema violation, 3 non-convergent
mandatory fit, 4 I/O failure.  Failures print a one-line JSON error
record to stderr.  Outputs are a CSV per data set plus a summary JSON
with fixed top-level keys {config, results, provenance}; identical
(config, seed) invocations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import rng as rng_mod
from .config import RunConfig, SchemaError, default_run_config, load_config, resolved_dict, schema_text
from .data import CurveData
from .dynamics import pi_pulse_power
from .fitting import (fit_exponential_decay, fit_gaussian_envelope, fit_lorentzian,
                      fit_rabi, fit_sinusoid_visibility, fit_voigt)
from .noise import laser_autocorrelation
from .photonstats import (analytic_g2_zero, clicks_to_text, coincidence_histogram,
                          g2_zero, simulate_photon_stream_chunked)
from .protocols import (MichelsonGeometry, default_long_delays, simulate_lifetime,
                        simulate_ple_scan, simulate_rabi_sweep, visibility_series)
from .report import format_table, run_report

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_FIT = 3
EXIT_IO = 4


class FitNotConverged(RuntimeError):
    pass


def _workers_default() -> int:
    env = os.environ.get("COHERENCE_LAB_WORKERS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _write_summary(out: Path, name: str, cfg: RunConfig | None, results: dict,
                   seed: int | None, command: str) -> Path:
    summary = {
        "config": resolved_dict(cfg) if cfg is not None else None,
        "results": results,
        "provenance": {"seed": seed, "version": __version__, "command": command},
    }
    path = out / f"{name}_summary.json"
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return path


def _load_run_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else default_run_config()
    if args.seed is not None:
        from dataclasses import replace
        cfg = replace(cfg, seed=int(args.seed))
    return cfg


def _cmd_simulate(args) -> int:
    cfg = _load_run_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    kind = args.experiment
    results: dict

    if kind == "lifetime":
        t_grid = np.linspace(0.0, cfg.lifetime.t_max_ns, cfg.lifetime.n_points)
        curve = simulate_lifetime(cfg.emitter, t_grid, cfg.lifetime.peak_counts,
                                  rng_mod.substream(cfg.seed, rng_mod.LIFETIME),
                                  seed_label=cfg.seed)
        results = {"n_points": len(curve)}
    elif kind == "rabi":
        shots = args.shots or cfg.rabi.shots
        powers = np.linspace(0.0, cfg.rabi.power_max_uw, cfg.rabi.n_powers)
        curve = simulate_rabi_sweep(powers, cfg.emitter, cfg.diffusion,
                                    cfg.rabi.background_fraction, shots,
                                    rng_mod.substream(cfg.seed, rng_mod.RABI),
                                    pulse_duration_ns=cfg.rabi.pulse_duration_ns,
                                    seed_label=cfg.seed)
        results = {"n_points": len(curve), "shots": shots}
    elif kind == "ple":
        detunings = np.linspace(-0.5 * cfg.ple.span_ghz, 0.5 * cfg.ple.span_ghz,
                                cfg.ple.n_points)
        curve = simulate_ple_scan(detunings, cfg.ple.power_uw, cfg.ple.psat_uw,
                                  cfg.emitter, cfg.diffusion,
                                  rng_mod.substream(cfg.seed, rng_mod.PLE),
                                  peak_counts=cfg.ple.peak_counts, seed_label=cfg.seed)
        results = {"n_points": len(curve)}
    elif kind == "ramsey":
        shots = args.shots or cfg.ramsey.shots
        geometry = MichelsonGeometry()
        emitter = cfg.emitter
        if not cfg.ramsey.include_t1_decay:
            from dataclasses import replace
            emitter = replace(emitter, t1_ns=math.inf)
        delays = default_long_delays(cfg.ramsey.n_delays, geometry)
        power = pi_pulse_power(cfg.emitter.alpha_rad_per_sqrt_uw) / 4.0
        curve = visibility_series(delays, geometry, emitter, cfg.diffusion, power,
                                  shots, cfg.seed, workers=args.workers)
        results = {"n_points": len(curve), "shots": shots,
                   "pulse_power_uw": power,
                   "failed_points": curve.meta.get("failed_points", [])}
    elif kind == "g2":
        hbt = cfg.hbt
        if args.pulses:
            from dataclasses import replace
            hbt = replace(hbt, n_pulses=int(float(args.pulses)))
        clicks = simulate_photon_stream_chunked(hbt, cfg.seed)
        hist = coincidence_histogram(clicks, hbt)
        value = g2_zero(hist)
        curve = CurveData(hist.centers_ns, hist.counts.astype(float),
                          np.sqrt(np.maximum(hist.counts, 1.0)),
                          x_label="delay_ns", y_label="coincidences",
                          meta={"experiment": "g2", "seed": cfg.seed})
        results = {"g2_zero": float(value), "purity": 1.0 - float(value),
                   "analytic_g2_zero": analytic_g2_zero(hbt.p1, hbt.p2),
                   "n_pulses": hbt.n_pulses, "n_clicks": len(clicks),
                   "peak_areas": [float(a) for a in hist.peak_areas]}
        if args.emit_clicks:
            clicks_to_text(clicks, out / "g2_clicks.txt")
    elif kind == "laser":
        delays_ps = np.linspace(0.0, 60.0, 241)
        vis = laser_autocorrelation(delays_ps, cfg.laser)
        curve = CurveData(delays_ps, vis, np.zeros_like(vis),
                          x_label="delay_ps", y_label="visibility",
                          meta={"experiment": "laser_autocorrelation",
                                "coherence_time_ps": cfg.laser.coherence_time_ps})
        results = {"coherence_time_ps": cfg.laser.coherence_time_ps}
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(kind)

    csv_path = out / f"{kind}.csv"
    curve.to_csv(csv_path)
    _write_summary(out, kind, cfg, results, cfg.seed, f"simulate {kind}")
    if args.plot:
        from .plots import plot_curve
        plot_curve(curve, out / f"{kind}.svg", title=kind)
    print(f"wrote {csv_path}")
    return EXIT_OK


_FIT_DISPATCH = {
    "exp": fit_exponential_decay,
    "rabi": fit_rabi,
    "sinusoid": lambda data: fit_sinusoid_visibility(data.x, data.y, data.y_err),
    "ramsey-envelope": fit_gaussian_envelope,
    "lorentzian": fit_lorentzian,
    "voigt": fit_voigt,
}


def _cmd_fit(args) -> int:
    curve = CurveData.from_csv(args.input)
    result = _FIT_DISPATCH[args.model](curve)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = f"fit_{args.model.replace('-', '_')}"
    _write_summary(out, name, None, result.summary_dict(), None, f"fit {args.model}")
    print(json.dumps(result.summary_dict(), indent=2, sort_keys=True))
    if not result.converged:
        raise FitNotConverged(result.message)
    return EXIT_OK


def _cmd_reproduce(args) -> int:
    cfg = _load_run_config(args)
    rows, all_pass = run_report(args.out, cfg=cfg, workers=args.workers,
                                make_plots=args.plot)
    print(format_table(rows))
    if not all_pass:
        raise FitNotConverged("one or more reference comparisons failed")
    return EXIT_OK


def _cmd_schema(args) -> int:
    print(schema_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coherence-lab",
        description="Pulsed-spectroscopy simulator and fitting toolkit for a "
                    "single optical two-level emitter.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file (see `schema`)")
        p.add_argument("--seed", type=int, help="master seed override")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--workers", type=int, default=_workers_default(),
                       help="worker processes (env COHERENCE_LAB_WORKERS)")
        p.add_argument("--plot", action="store_true", help="emit SVG plots")

    sim = sub.add_parser("simulate", help="run one synthetic experiment")
    sim.add_argument("experiment",
                     choices=["lifetime", "rabi", "ple", "ramsey", "g2", "laser"])
    add_common(sim)
    sim.add_argument("--shots", type=int, help="override Monte Carlo shots")
    sim.add_argument("--pulses", help="override pulse count for g2 (accepts 1e7)")
    sim.add_argument("--emit-clicks", action="store_true",
                     help="also export the raw click stream (g2 only)")
    sim.set_defaults(func=_cmd_simulate)

    fit = sub.add_parser("fit", help="fit a CSV data file")
    fit.add_argument("model", choices=sorted(_FIT_DISPATCH))
    fit.add_argument("--input", required=True, help="curvedata-v1 CSV file")
    fit.add_argument("--out", default="out", help="output directory")
    fit.set_defaults(func=_cmd_fit)

    rep = sub.add_parser("reproduce-paper",
                         help="simulate, fit, and check every reference value")
    add_common(rep)
    rep.set_defaults(func=_cmd_reproduce)

    sch = sub.add_parser("schema", help="print the config schema")
    sch.add_argument("--print", action="store_true", help="accepted for symmetry")
    sch.set_defaults(func=_cmd_schema)
    return parser


def _error_record(kind: str, message: str) -> str:
    return json.dumps({"error": {"kind": kind, "message": message}}, sort_keys=True)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(_error_record("schema", str(exc)), file=sys.stderr)
        return EXIT_SCHEMA
    except FitNotConverged as exc:
        print(_error_record("fit", str(exc)), file=sys.stderr)
        return EXIT_FIT
    except OSError as exc:
        print(_error_record("io", str(exc)), file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
