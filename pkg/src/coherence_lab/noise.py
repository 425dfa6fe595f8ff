"""Spectral diffusion, dephasing envelopes, line shapes, laser coherence.

Slow wandering of the optical transition frequency (charge noise, local
electric-field drift, strain) is modeled as a random detuning that is
constant within one experimental shot.  Averaging a Ramsey fringe over a
zero-mean Gaussian detuning distribution of angular standard deviation
sigma gives

    <exp(i * delta * tau)> = exp(-sigma^2 tau^2 / 2) = exp(-tau^2 / T2*^2)

which fixes sigma = sqrt(2) / T2*.  The same Gaussian detuning
distribution convolved with the power-broadened homogeneous Lorentzian
produces the Voigt absorption profile probed by PLE spectroscopy.

Two ways of combining homogeneous and inhomogeneous dephasing appear in
practice: the simulation composes the physical envelopes multiplicatively,
exp(-tau/T2_hom) * exp(-tau^2/T_inh^2), while the additive rate relation
1/T2* = 1/T2 + 1/T_inh is provided only as a reporting convention
(`t2_star_additive`); the two are not the same function and neither is
derived from the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import voigt_profile

TWO_PI = 2.0 * math.pi

DIFFUSION_KINDS = ("static-gaussian", "ornstein-uhlenbeck")


@dataclass(frozen=True)
class SpectralDiffusionModel:
    """Distribution of the slowly wandering transition-frequency offset.

    kind "static-gaussian" draws an independent Normal(0, sigma) detuning
    per shot; "ornstein-uhlenbeck" adds a correlation time for sensitivity
    studies.  sigma is angular (rad/ns).
    """

    sigma_rad_per_ns: float
    kind: str = "static-gaussian"
    tau_corr_ns: float | None = None

    def __post_init__(self):
        if self.kind not in DIFFUSION_KINDS:
            raise ValueError(f"unknown diffusion kind {self.kind!r}")
        if self.sigma_rad_per_ns < 0:
            raise ValueError("sigma_rad_per_ns must be nonnegative")
        if self.kind == "ornstein-uhlenbeck":
            if self.tau_corr_ns is None or not self.tau_corr_ns > 0:
                raise ValueError("ornstein-uhlenbeck requires tau_corr_ns > 0")


@dataclass(frozen=True)
class LaserModel:
    """Excitation laser: center frequency, spectral width, field coherence."""

    nu_center_ghz: float = 687600.0  # 436 nm
    bandwidth_ghz: float = 300.0
    coherence_time_ps: float = 6.3

    def __post_init__(self):
        if not (self.nu_center_ghz > 0 and self.bandwidth_ghz > 0 and self.coherence_time_ps > 0):
            raise ValueError("laser parameters must be positive")


def sample_detuning(model: SpectralDiffusionModel, rng: np.random.Generator) -> float:
    """One stationary detuning draw, held fixed for a whole shot."""
    return float(rng.normal(0.0, model.sigma_rad_per_ns))


def sample_detunings(model: SpectralDiffusionModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """Vector of independent per-shot detunings.

    For the ornstein-uhlenbeck kind these are stationary-distribution draws,
    appropriate when shots are separated by much more than tau_corr.
    """
    return rng.normal(0.0, model.sigma_rad_per_ns, size=n)


def ou_trajectory(model: SpectralDiffusionModel, times_ns: np.ndarray,
                  rng: np.random.Generator) -> np.ndarray:
    """Exact mean-reverting walk sampled at the given (increasing) times.

    The stationary standard deviation equals sigma; correlations decay as
    exp(-|t - t'| / tau_corr).  A static-gaussian model is the
    tau_corr -> infinity limit and returns a constant trajectory.
    """
    times = np.asarray(times_ns, dtype=float)
    x = np.empty_like(times)
    x[0] = rng.normal(0.0, model.sigma_rad_per_ns)
    if model.kind == "static-gaussian":
        x[:] = x[0]
        return x
    tau_c = model.tau_corr_ns
    for i in range(1, times.size):
        a = math.exp(-(times[i] - times[i - 1]) / tau_c)
        x[i] = a * x[i - 1] + model.sigma_rad_per_ns * math.sqrt(1.0 - a * a) * rng.normal()
    return x


def ramsey_envelope(tau, t2_star_ns: float):
    """Gaussian fringe-contrast envelope exp(-tau^2 / T2*^2)."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be nonnegative")
    return np.exp(-((tau / t2_star_ns) ** 2))


def sigma_from_t2_star(t2_star_ns: float) -> float:
    """Detuning spread that produces the envelope exp(-tau^2/T2*^2)."""
    if not t2_star_ns > 0:
        raise ValueError("t2_star_ns must be positive")
    return math.sqrt(2.0) / t2_star_ns


def t2_star_from_sigma(sigma_rad_per_ns: float) -> float:
    if not sigma_rad_per_ns > 0:
        raise ValueError("sigma_rad_per_ns must be positive")
    return math.sqrt(2.0) / sigma_rad_per_ns


def t2_star_additive(t2_ns: float, t_inh_ns: float) -> float:
    """Reporting convention 1/T2* = 1/T2 + 1/T_inh on quoted time constants."""
    return 1.0 / (1.0 / t2_ns + 1.0 / t_inh_ns)


def homogeneous_linewidth_ghz(t1_ns: float) -> float:
    """Fourier-limited absorption FWHM 1/(2 pi T1) of a lifetime-limited line."""
    if not t1_ns > 0:
        raise ValueError("t1_ns must be positive")
    return 1.0 / (TWO_PI * t1_ns)


def power_broadened_fwhm_ghz(t1_ns: float, gamma_phi_per_ns: float,
                             power_uw: float, psat_uw: float) -> float:
    """Lorentzian FWHM (Gamma2/pi) sqrt(1 + P/Psat) of the saturated line.

    P/Psat is the on-resonance saturation parameter of the driven two-level
    steady state, whose excited population is (s/2)/(1+s).
    """
    if power_uw < 0:
        raise ValueError("power must be nonnegative")
    if not psat_uw > 0:
        raise ValueError("psat must be positive")
    gamma1 = 0.0 if math.isinf(t1_ns) else 1.0 / t1_ns
    gamma2 = 0.5 * gamma1 + gamma_phi_per_ns
    return (gamma2 / math.pi) * math.sqrt(1.0 + power_uw / psat_uw)


def gaussian_fwhm_from_sigma(sigma_ghz: float) -> float:
    return 2.0 * math.sqrt(2.0 * math.log(2.0)) * sigma_ghz


def voigt_fwhm_olivero(fwhm_gauss: float, fwhm_lorentz: float) -> float:
    """Olivero-Longbothum closed-form width of a Voigt profile (0.02% accurate)."""
    return 0.5346 * fwhm_lorentz + math.sqrt(0.2166 * fwhm_lorentz ** 2 + fwhm_gauss ** 2)


def voigt_peak_normalized(detuning_ghz, sigma_g_ghz: float, fwhm_l_ghz: float):
    """Voigt profile normalized to 1 at line center.

    Gaussian standard deviation sigma_g and Lorentzian FWHM fwhm_l, both in
    GHz.  Degenerates exactly to the pure Lorentzian or pure Gaussian when
    one width vanishes.
    """
    d = np.asarray(detuning_ghz, dtype=float)
    gamma_hwhm = 0.5 * fwhm_l_ghz
    if sigma_g_ghz == 0.0:
        if gamma_hwhm == 0.0:
            return np.where(d == 0.0, 1.0, 0.0)
        return gamma_hwhm ** 2 / (d * d + gamma_hwhm ** 2)
    peak = voigt_profile(0.0, sigma_g_ghz, gamma_hwhm)
    return voigt_profile(d, sigma_g_ghz, gamma_hwhm) / peak


def ple_lineshape(detuning_ghz, power_uw: float, psat_uw: float, t1_ns: float,
                  gamma_phi_per_ns: float = 0.0, sigma_rad_per_ns: float = 0.0):
    """Relative absorption of the wandering line versus laser detuning.

    A power-broadened homogeneous Lorentzian convolved with the Gaussian
    detuning distribution of the spectral-diffusion model; the result is
    normalized to its own maximum, so saturation of the peak amplitude
    drops out and only the width survives.
    """
    fwhm_l = power_broadened_fwhm_ghz(t1_ns, gamma_phi_per_ns, power_uw, psat_uw)
    sigma_g = sigma_rad_per_ns / TWO_PI
    return voigt_peak_normalized(detuning_ghz, sigma_g, fwhm_l)


def profile_fwhm(x: np.ndarray, y: np.ndarray) -> float:
    """Full width at half maximum of a sampled single-peak profile."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    half = 0.5 * y.max()
    above = y >= half
    if not above.any():
        raise ValueError("profile has no points above half maximum")
    i0 = int(np.argmax(above))
    i1 = int(len(y) - 1 - np.argmax(above[::-1]))
    if i0 == 0 or i1 == len(y) - 1:
        raise ValueError("half-maximum crossings fall outside the sampled range")
    left = np.interp(half, [y[i0 - 1], y[i0]], [x[i0 - 1], x[i0]])
    right = np.interp(half, [y[i1 + 1], y[i1]], [x[i1 + 1], x[i1]])
    return float(right - left)


def laser_autocorrelation(delay_ps, laser: LaserModel):
    """Field-autocorrelation fringe visibility exp(-(delay/tau_c)^2).

    Used to rule laser interference out as the origin of nanosecond-scale
    fringes: at one long-arm step of the interferometer (~83 ps) this is
    already indistinguishable from zero while the emitter coherence
    survives.
    """
    delay = np.asarray(delay_ps, dtype=float)
    if np.any(delay < 0):
        raise ValueError("delay must be nonnegative")
    return np.exp(-((delay / laser.coherence_time_ps) ** 2))
