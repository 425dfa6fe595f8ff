"""End-to-end simulations of the four table-top experiments.

Each protocol produces a CurveData (or Interferogram) record with noise of
the appropriate kind: Poisson counting noise for photon-counting traces,
shot-averaging noise for Monte Carlo ensembles.  Detection is collapsed to
a single scalar efficiency; absolute count rates are configuration, not
physics, so ordinates are either expected counts or normalized signals.

Ramsey interferometry follows the Michelson convention: the optical path
difference is twice the mirror displacement, so fringes repeat every half
wavelength of mirror motion and one long-arm step of 1.25 cm adds
83.39 ps of delay.  The two half-turn pulses are instantaneous rotations;
during the interpulse delay the per-shot transition-frequency offset
drawn from the spectral-diffusion model precesses the coherence, and
averaging over shots produces the Gaussian fringe-contrast decay.  The
second pulse arrives with the carrier phase it accumulated along the
longer path, which is what makes the fringe phase track the optical
transition frequency rather than the laser detuning.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import rng as rng_mod
from .data import CurveData
from .dynamics import (BlochState, EmitterParams, Pulse, area_from_power,
                       pi_pulse_power, propagate_free, propagate_unitary, rotate_bloch)
from .fitting import FitResult, fit_lorentzian, fit_sinusoid_visibility
from .noise import SpectralDiffusionModel, sample_detunings

TWO_PI = 2.0 * math.pi
SPEED_OF_LIGHT_UM_PER_NS = 299792.458
SPEED_OF_LIGHT_CM_PER_NS = 29.9792458

# 80 MHz excitation: the next pulse pair arrives after 12.5 ns.
PULSE_PERIOD_NS = 12.5


@dataclass(frozen=True)
class MichelsonGeometry:
    """Delay-generation geometry of the interferometer.

    The optical path difference is path_factor (= 2 for a retroreflector
    arm) times the mirror displacement.
    """

    step_cm: float = 1.25
    path_factor: float = 2.0

    def __post_init__(self):
        if not self.step_cm > 0:
            raise ValueError("step_cm must be positive")

    @property
    def step_delay_ns(self) -> float:
        """Delay added by one long-arm step."""
        return self.path_factor * self.step_cm / SPEED_OF_LIGHT_CM_PER_NS

    def delay_from_position_ns(self, position_um):
        """Delay added by a short-arm mirror displacement in um."""
        return self.path_factor * np.asarray(position_um, dtype=float) / SPEED_OF_LIGHT_UM_PER_NS


@dataclass
class Interferogram:
    """PSB signal versus short-arm mirror position at one long delay."""

    long_delay_ns: float
    short_scan_positions_um: np.ndarray
    signal: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.short_scan_positions_um = np.asarray(self.short_scan_positions_um, dtype=float)
        self.signal = np.asarray(self.signal, dtype=float)
        if self.short_scan_positions_um.shape != self.signal.shape:
            raise ValueError("positions and signal must have identical shapes")
        if np.any(self.signal < 0):
            raise ValueError("signal must be nonnegative")


def fringe_period_um(nu0_ghz: float, geometry: MichelsonGeometry | None = None) -> float:
    """Mirror-displacement period of the optical fringes (lambda/2 for path_factor 2)."""
    factor = 2.0 if geometry is None else geometry.path_factor
    return SPEED_OF_LIGHT_UM_PER_NS / (factor * nu0_ghz)


def default_scan_positions(nu0_ghz: float, n_fringes: int = 4, points_per_fringe: int = 12,
                           geometry: MichelsonGeometry | None = None) -> np.ndarray:
    period = fringe_period_um(nu0_ghz, geometry)
    n_points = n_fringes * points_per_fringe
    return np.arange(n_points) * (period / points_per_fringe)


def default_long_delays(n_delays: int, geometry: MichelsonGeometry) -> np.ndarray:
    """Multiples of the long-arm step delay, starting at zero."""
    return np.arange(n_delays) * geometry.step_delay_ns


# ---------------------------------------------------------------------------
# lifetime

def simulate_lifetime(params: EmitterParams, t_grid_ns: np.ndarray, peak_counts: float,
                      rng: np.random.Generator, seed_label=None) -> CurveData:
    """Poisson-sampled exponential decay histogram, peak_counts at t = 0."""
    t = np.asarray(t_grid_ns, dtype=float)
    if t.size < 2 or np.any(np.diff(t) <= 0):
        raise ValueError("t_grid_ns must be strictly increasing")
    if not peak_counts > 0:
        raise ValueError("peak_counts must be positive")
    expected = peak_counts * np.exp(-t * params.gamma1_per_ns)
    counts = rng.poisson(expected).astype(float)
    return CurveData(t, counts, np.sqrt(np.maximum(counts, 1.0)),
                     x_label="time_ns", y_label="counts",
                     meta={"experiment": "lifetime", "t1_ns": params.t1_ns,
                           "peak_counts": peak_counts, "seed": seed_label})


# ---------------------------------------------------------------------------
# Rabi power sweep

def simulate_rabi_sweep(powers_uw: np.ndarray, params: EmitterParams,
                        diffusion: SpectralDiffusionModel, background_fraction: float,
                        shots: int, rng: np.random.Generator,
                        pulse_duration_ns: float = 0.005, seed_label=None) -> CurveData:
    """Shot-averaged excited population after one calibrated pulse per power.

    Each shot draws its own transition-frequency offset, which tilts the
    rotation axis during the pulse; an additive incoherent background
    lifts the oscillation minima.  The ordinate is proportional to the
    excited population (single scalar detection chain).
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    if not 0.0 <= background_fraction < 1.0:
        raise ValueError("background_fraction must lie in [0, 1)")
    powers = np.asarray(powers_uw, dtype=float)
    area = area_from_power(params.alpha_rad_per_sqrt_uw, powers)  # (n,)
    omega = area / pulse_duration_ns
    deltas = sample_detunings(diffusion, shots, rng)[:, None]  # (shots, 1)
    final = rotate_bloch(BlochState.ground(), omega[None, :], deltas,
                         pulse_duration_ns)
    pe = np.atleast_2d(final.excited_population)
    y = pe.mean(axis=0) + background_fraction
    y_err = pe.std(axis=0, ddof=0) / math.sqrt(shots)
    return CurveData(powers, y, y_err, x_label="power_uw", y_label="psb_signal",
                     meta={"experiment": "rabi", "shots": shots,
                           "background_fraction": background_fraction,
                           "pulse_duration_ns": pulse_duration_ns,
                           "sigma_rad_per_ns": diffusion.sigma_rad_per_ns,
                           "seed": seed_label})


# ---------------------------------------------------------------------------
# PLE scan

def simulate_ple_scan(detunings_ghz: np.ndarray, power_uw: float, psat_uw: float,
                      params: EmitterParams, diffusion: SpectralDiffusionModel,
                      rng: np.random.Generator, peak_counts: float = 20000.0,
                      seed_label=None) -> CurveData:
    """Poisson-sampled absorption line versus laser detuning."""
    from .noise import ple_lineshape  # local import keeps module load cheap
    if not psat_uw > 0:
        raise ValueError("psat must be positive")
    detunings = np.asarray(detunings_ghz, dtype=float)
    shape = ple_lineshape(detunings, power_uw, psat_uw, params.t1_ns,
                          params.gamma_phi_per_ns, diffusion.sigma_rad_per_ns)
    counts = rng.poisson(peak_counts * shape).astype(float)
    return CurveData(detunings, counts, np.sqrt(np.maximum(counts, 1.0)),
                     x_label="detuning_ghz", y_label="counts",
                     meta={"experiment": "ple", "power_uw": power_uw, "psat_uw": psat_uw,
                           "peak_counts": peak_counts,
                           "sigma_rad_per_ns": diffusion.sigma_rad_per_ns,
                           "seed": seed_label})


# ---------------------------------------------------------------------------
# Ramsey interferometry

def ramsey_population_ideal(tau_ns, nu0_ghz: float):
    """Fringe law (1/2)(1 + cos(2 pi nu0 tau)) of the lossless sequence."""
    tau = np.asarray(tau_ns, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be nonnegative")
    return 0.5 * (1.0 + np.cos(TWO_PI * nu0_ghz * tau))


def ramsey_population_dephased(tau_ns, nu0_ghz: float, t2_star_ns: float):
    """Ensemble-averaged fringes (1/2)(1 + exp(-tau^2/T2*^2) cos(2 pi nu0 tau))."""
    tau = np.asarray(tau_ns, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be nonnegative")
    envelope = np.exp(-((tau / t2_star_ns) ** 2))
    return 0.5 * (1.0 + envelope * np.cos(TWO_PI * nu0_ghz * tau))


def ramsey_engine_population(tau_ns, detuning_offset_rad_per_ns, params: EmitterParams,
                             pulse_power_uw: float):
    """Single-shot Ramsey sequence run through the dynamics operations.

    The laser sits at the nominal line center; ``detuning_offset`` is the
    shot's transition-frequency offset (rad/ns).  Pulses are instantaneous
    equatorial rotations of the calibrated area; the second one carries the
    extra carrier phase -omega_laser * tau picked up along the delayed
    path.  T1 relaxation and homogeneous dephasing act during the delay.
    Broadcasts over tau and detuning arrays.
    """
    tau = np.asarray(tau_ns, dtype=float)
    delta = np.asarray(detuning_offset_rad_per_ns, dtype=float)
    theta = area_from_power(params.alpha_rad_per_sqrt_uw, pulse_power_uw)
    omega_laser = params.omega0_rad_per_ns

    state = propagate_unitary(BlochState.ground(),
                              Pulse("square", 1.0, theta))
    state = propagate_free(state, tau, params, detuning=-delta)
    second = Pulse("square", 1.0, theta, phase_rad=-omega_laser * tau)
    state = propagate_unitary(state, second)
    return state.excited_population


def simulate_ramsey_interferogram(long_delay_ns: float, geometry: MichelsonGeometry,
                                  params: EmitterParams, diffusion: SpectralDiffusionModel,
                                  pulse_power_uw: float, shots: int, rng: np.random.Generator,
                                  positions_um: np.ndarray | None = None,
                                  rep_period_ns: float = PULSE_PERIOD_NS,
                                  seed_label=None) -> Interferogram:
    """Shot-averaged fringe scan at one long-arm delay.

    The pulse power must sit within 5% of the quarter-turn calibration
    point, and the total delay must stay inside one excitation period.
    """
    quarter = pi_pulse_power(params.alpha_rad_per_sqrt_uw) / 4.0
    if abs(pulse_power_uw - quarter) > 0.05 * quarter:
        raise ValueError(f"pulse power {pulse_power_uw} uW is not within 5% of the "
                         f"quarter-turn power {quarter:.4f} uW")
    if positions_um is None:
        positions_um = default_scan_positions(params.nu0_ghz, geometry=geometry)
    positions_um = np.asarray(positions_um, dtype=float)
    span = float(np.ptp(positions_um))
    if span < 3.0 * fringe_period_um(params.nu0_ghz, geometry):
        raise ValueError("short scan must span at least 3 optical fringes")
    tau = long_delay_ns + geometry.delay_from_position_ns(positions_um)
    if np.any(tau < 0):
        raise ValueError("total delay must be nonnegative")
    if np.max(tau) >= rep_period_ns:
        raise ValueError(f"total delay {np.max(tau):.3f} ns reaches the next excitation "
                         f"pulse at {rep_period_ns} ns")

    deltas = sample_detunings(diffusion, shots, rng)[:, None]  # (shots, 1)
    pe = np.atleast_2d(ramsey_engine_population(tau[None, :], deltas, params, pulse_power_uw))
    signal = pe.mean(axis=0)
    return Interferogram(long_delay_ns, positions_um, signal,
                         meta={"experiment": "ramsey_interferogram", "shots": shots,
                               "pulse_power_uw": pulse_power_uw,
                               "long_delay_ns": long_delay_ns, "seed": seed_label})


def _visibility_point(args) -> tuple[int, float, float, bool]:
    (index, long_delay, geometry, params, diffusion, pulse_power_uw, shots,
     master_seed, positions) = args
    stream = rng_mod.substream(master_seed, rng_mod.RAMSEY, index)
    gram = simulate_ramsey_interferogram(long_delay, geometry, params, diffusion,
                                         pulse_power_uw, shots, stream,
                                         positions_um=positions,
                                         seed_label=[master_seed, rng_mod.RAMSEY, index])
    fit = fit_sinusoid_visibility(gram)
    vis = float(fit.estimates.get("visibility", np.nan))
    err = float(fit.errors.get("visibility", np.nan))
    return index, vis, err, bool(fit.converged)


def visibility_series(long_delays_ns: np.ndarray, geometry: MichelsonGeometry,
                      params: EmitterParams, diffusion: SpectralDiffusionModel,
                      pulse_power_uw: float, shots: int, master_seed: int,
                      positions_um: np.ndarray | None = None, workers: int = 1) -> CurveData:
    """Fringe visibility versus long-arm delay.

    Each delay point runs on its own derived random substream, so the
    result is bit-identical for any worker count.  A non-convergent fringe
    fit becomes a NaN visibility and is listed in meta["failed_points"].
    """
    delays = np.asarray(long_delays_ns, dtype=float)
    if np.any(delays >= PULSE_PERIOD_NS):
        raise ValueError("every long delay must stay below the 12.5 ns pulse period")
    tasks = [(i, float(delays[i]), geometry, params, diffusion, pulse_power_uw,
              shots, master_seed, positions_um) for i in range(delays.size)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_visibility_point, tasks))
    else:
        results = [_visibility_point(t) for t in tasks]

    vis = np.full(delays.size, np.nan)
    err = np.zeros(delays.size)
    failed = []
    for index, v, e, ok in results:
        if ok:
            vis[index] = v
            err[index] = e
        else:
            failed.append(index)
    return CurveData(delays, vis, err, x_label="tau_ns", y_label="visibility",
                     meta={"experiment": "ramsey_visibility", "shots": shots,
                           "pulse_power_uw": pulse_power_uw, "seed": master_seed,
                           "sigma_rad_per_ns": diffusion.sigma_rad_per_ns,
                           "failed_points": failed})


# ---------------------------------------------------------------------------
# PLE linewidth versus power (no fixed fit law is claimed for this trend;
# the steady-state broadening curve is available for overlay via
# noise.power_broadened_fwhm_ghz)

def ple_linewidth_series(powers_uw: np.ndarray, detunings_ghz: np.ndarray, psat_uw: float,
                         params: EmitterParams, diffusion: SpectralDiffusionModel,
                         master_seed: int, peak_counts: float = 20000.0) -> CurveData:
    """Fitted Voigt FWHM of the PLE line at each excitation power."""
    from .fitting import fit_voigt
    powers = np.asarray(powers_uw, dtype=float)
    fwhm = np.full(powers.size, np.nan)
    err = np.zeros(powers.size)
    for i, p in enumerate(powers):
        stream = rng_mod.substream(master_seed, rng_mod.PLE, i)
        scan = simulate_ple_scan(detunings_ghz, float(p), psat_uw, params, diffusion,
                                 stream, peak_counts, seed_label=[master_seed, rng_mod.PLE, i])
        fit = fit_voigt(scan)
        if fit.converged:
            fwhm[i] = fit.estimates["fwhm_voigt"]
            err[i] = fit.errors.get("fwhm_lorentz", 0.0)
    return CurveData(powers, fwhm, err, x_label="power_uw", y_label="fwhm_ghz",
                     meta={"experiment": "ple_linewidth_vs_power", "psat_uw": psat_uw,
                           "seed": master_seed})
