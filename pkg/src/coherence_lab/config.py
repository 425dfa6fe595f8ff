"""Run-configuration schema, validation, and calibrated defaults.

Configs are flat JSON with one object per section.  Every key has a typed
default; unknown sections or keys are rejected before any computation, and
the fully resolved config (defaults included) is embedded in every emitted
summary so no default is silent.

The built-in calibration describes the hBN B center the package ships
with: 1.95 ns lifetime, 436 nm zero-phonon line, first pulse-area
inversion at 11.63 uW, 0.60 ns inhomogeneous coherence time, saturation
at 4.41 uW, and a two-photon probability tuned for g2(0) = 0.07 at
half-unit single-photon probability.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

from .dynamics import EmitterParams
from .noise import LaserModel, SpectralDiffusionModel, sigma_from_t2_star
from .photonstats import HbtConfig, two_photon_prob_for_g2

DEFAULT_SEED = 20260809

ALPHA_DEFAULT = math.pi / (2.0 * math.sqrt(11.63))       # pi-pulse at 11.63 uW
SIGMA_DEFAULT = sigma_from_t2_star(0.60)                 # T2* = 0.60 ns
P2_DEFAULT = two_photon_prob_for_g2(0.5, 0.07)           # g2(0) target 0.07


class SchemaError(ValueError):
    """Configuration file violates the schema."""


@dataclass(frozen=True)
class LifetimeConfig:
    t_max_ns: float = 12.0
    n_points: int = 241
    peak_counts: float = 1_000_000.0


@dataclass(frozen=True)
class RabiConfig:
    power_max_uw: float = 250.0
    n_powers: int = 81
    shots: int = 400
    background_fraction: float = 0.05
    pulse_duration_ns: float = 0.005


@dataclass(frozen=True)
class PleConfig:
    span_ghz: float = 6.0
    n_points: int = 161
    power_uw: float = 4.41
    psat_uw: float = 4.41
    peak_counts: float = 20000.0


@dataclass(frozen=True)
class RamseyConfig:
    n_delays: int = 12
    shots: int = 10000
    n_fringes: int = 4
    points_per_fringe: int = 12
    # The interferometer simulation includes lifetime decay during the
    # delay; the visibility-envelope extraction switches it off so the
    # fitted constant is the pure dephasing time (see report module).
    include_t1_decay: bool = True


# section -> key -> (type, default, unit, description).  Type "float?" is
# nullable; null means "derived from another key", stated in the description.
SCHEMA: dict = {
    "emitter": {
        "t1_ns": ("float", 1.95, "ns", "radiative lifetime"),
        "nu0_ghz": ("float", 687600.0, "GHz", "optical transition frequency (436 nm)"),
        "gamma_phi_per_ns": ("float", 0.0, "1/ns", "pure-dephasing rate"),
        "alpha_rad_per_sqrt_uw": ("float", ALPHA_DEFAULT, "rad/sqrt(uW)",
                                  "pulse-area calibration, area = 2 alpha sqrt(P)"),
        "eps_two_photon": ("float", P2_DEFAULT, "", "per-pulse two-photon probability"),
    },
    "diffusion": {
        "kind": ("str", "static-gaussian", "", "static-gaussian or ornstein-uhlenbeck"),
        "sigma_rad_per_ns": ("float", SIGMA_DEFAULT, "rad/ns",
                             "detuning spread; sqrt(2)/T2* for a 0.60 ns envelope"),
        "tau_corr_ns": ("float", 100.0, "ns", "correlation time (ornstein-uhlenbeck only)"),
    },
    "laser": {
        "nu_center_ghz": ("float", 687600.0, "GHz", "laser center frequency"),
        "bandwidth_ghz": ("float", 300.0, "GHz", "pulse spectral FWHM after shaping"),
        "coherence_time_ps": ("float", 6.3, "ps", "field-autocorrelation 1/e half-width"),
    },
    "hbt": {
        "rep_period_ns": ("float", 12.5, "ns", "excitation period (80 MHz)"),
        "n_pulses": ("int", 10_000_000, "", "number of excitation pulses"),
        "p1": ("float", 0.5, "", "single-photon emission probability per pulse"),
        "p2": ("float?", None, "", "two-photon probability; null = emitter.eps_two_photon"),
        "eta": ("float", 0.1, "", "end-to-end detection efficiency"),
        "jitter_ns": ("float", 0.1, "ns", "detector timing jitter (std)"),
        "bin_ns": ("float", 0.1, "ns", "histogram bin width"),
        "window_peaks": ("int", 5, "", "side peaks on each side of zero delay"),
    },
    "lifetime": {
        "t_max_ns": ("float", 12.0, "ns", "end of the decay histogram"),
        "n_points": ("int", 241, "", "histogram bins"),
        "peak_counts": ("float", 1_000_000.0, "counts", "expected counts at t = 0"),
    },
    "rabi": {
        "power_max_uw": ("float", 250.0, "uW", "top of the power sweep"),
        "n_powers": ("int", 81, "", "sweep points"),
        "shots": ("int", 400, "", "Monte Carlo shots per power"),
        "background_fraction": ("float", 0.05, "", "additive incoherent floor"),
        "pulse_duration_ns": ("float", 0.005, "ns", "drive pulse length"),
    },
    "ple": {
        "span_ghz": ("float", 6.0, "GHz", "full scan span, centered on the line"),
        "n_points": ("int", 161, "", "scan points"),
        "power_uw": ("float", 4.41, "uW", "excitation power of the scan"),
        "psat_uw": ("float", 4.41, "uW", "saturation power"),
        "peak_counts": ("float", 20000.0, "counts", "expected counts at line center"),
    },
    "ramsey": {
        "n_delays": ("int", 12, "", "long-arm positions (multiples of one step)"),
        "shots": ("int", 10000, "", "Monte Carlo shots per interferogram point"),
        "n_fringes": ("int", 4, "", "fringes covered by the short scan"),
        "points_per_fringe": ("int", 12, "", "samples per fringe"),
        "include_t1_decay": ("bool", True, "", "lifetime decay during the delay"),
    },
    "run": {
        "seed": ("int", DEFAULT_SEED, "", "master seed for every derived stream"),
    },
}

_SECTION_BUILDERS = {
    "lifetime": LifetimeConfig,
    "rabi": RabiConfig,
    "ple": PleConfig,
    "ramsey": RamseyConfig,
}


@dataclass(frozen=True)
class RunConfig:
    emitter: EmitterParams
    diffusion: SpectralDiffusionModel
    laser: LaserModel
    hbt: HbtConfig
    lifetime: LifetimeConfig
    rabi: RabiConfig
    ple: PleConfig
    ramsey: RamseyConfig
    seed: int = DEFAULT_SEED


def _coerce(section: str, key: str, kind: str, value):
    path = f"{section}.{key}"
    if kind == "float?" and value is None:
        return None
    try:
        if kind in ("float", "float?"):
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if kind == "int":
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise TypeError
            return int(value)
        if kind == "bool":
            if not isinstance(value, bool):
                raise TypeError
            return value
        if kind == "str":
            if not isinstance(value, str):
                raise TypeError
            return value
    except (TypeError, ValueError):
        raise SchemaError(f"{path}: expected {kind}, got {value!r}") from None
    raise SchemaError(f"{path}: unknown schema type {kind}")


def build_run_config(raw: dict) -> RunConfig:
    """Validate a raw config mapping and construct the typed sections."""
    if not isinstance(raw, dict):
        raise SchemaError("config root must be a JSON object")
    for section in raw:
        if section not in SCHEMA:
            raise SchemaError(f"unknown config section {section!r}")
        if not isinstance(raw[section], dict):
            raise SchemaError(f"section {section!r} must be an object")
        for key in raw[section]:
            if key not in SCHEMA[section]:
                raise SchemaError(f"unknown config key {section}.{key}")

    values: dict = {}
    for section, keys in SCHEMA.items():
        sec_raw = raw.get(section, {})
        values[section] = {
            key: _coerce(section, key, kind, sec_raw.get(key, default))
            for key, (kind, default, _, _) in keys.items()
        }

    try:
        emitter = EmitterParams(**values["emitter"])
        diffusion = SpectralDiffusionModel(
            sigma_rad_per_ns=values["diffusion"]["sigma_rad_per_ns"],
            kind=values["diffusion"]["kind"],
            tau_corr_ns=values["diffusion"]["tau_corr_ns"])
        laser = LaserModel(**values["laser"])
        hbt_vals = dict(values["hbt"])
        if hbt_vals["p2"] is None:
            hbt_vals["p2"] = emitter.eps_two_photon
        hbt = HbtConfig(t1_ns=emitter.t1_ns, **hbt_vals)
        sections = {name: builder(**values[name]) for name, builder in _SECTION_BUILDERS.items()}
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    return RunConfig(emitter=emitter, diffusion=diffusion, laser=laser, hbt=hbt,
                     seed=values["run"]["seed"], **sections)


def load_config(path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    return build_run_config(raw)


def default_run_config() -> RunConfig:
    return build_run_config({})


def b_center() -> EmitterParams:
    """The calibrated emitter the package ships with."""
    return default_run_config().emitter


def resolved_dict(cfg: RunConfig) -> dict:
    """Every configuration value, defaults included, for provenance records."""
    out = {
        "emitter": asdict(cfg.emitter),
        "diffusion": asdict(cfg.diffusion),
        "laser": asdict(cfg.laser),
        "hbt": asdict(cfg.hbt),
        "lifetime": asdict(cfg.lifetime),
        "rabi": asdict(cfg.rabi),
        "ple": asdict(cfg.ple),
        "ramsey": asdict(cfg.ramsey),
        "run": {"seed": cfg.seed},
    }
    return {k: dict(sorted(v.items())) for k, v in sorted(out.items())}


def schema_text() -> str:
    """Printable key list with types, units, and defaults."""
    lines = ["configuration schema (JSON; any key may be omitted to take its default)", ""]
    for section, keys in SCHEMA.items():
        lines.append(f"[{section}]")
        for key, (kind, default, unit, desc) in keys.items():
            unit_part = f" [{unit}]" if unit else ""
            lines.append(f"  {key}: {kind}{unit_part} = {default!r}  -- {desc}")
        lines.append("")
    return "\n".join(lines)
