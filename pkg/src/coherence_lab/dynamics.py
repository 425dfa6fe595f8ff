"""Driven, decaying two-level system in the rotating frame.

Units are fixed package-wide: time in ns, ordinary frequency in GHz,
angular frequency in rad/ns (1 GHz = 1/ns, so omega = 2*pi*nu), optical
power in uW, hbar = 1.

The drive Hamiltonian in the frame rotating with the laser is

    H = (Omega/2) * (cos(phi) sx + sin(phi) sy) - (Delta/2) * sz

with Omega the Rabi angular frequency, Delta = omega_laser - omega_emitter
the detuning, phi the drive phase, and sx/sy/sz the Pauli matrices in the
(|g>, |e>) basis.  States are kept in Bloch form (u, v, w) with

    rho = (1/2) * (I + u sx + v sy - w sz)

so that w = rho_ee - rho_gg (w = +1 is the excited state) and
rho_ge = (u - i v)/2.  With this convention a resonant pulse of area pi/2
and phase 0 takes |g> to (u, v, w) = (0, -1, 0); the opposite equatorial
sign is an equally valid convention and no observable distinguishes them.

Coherent segments use the closed-form SU(2) rotation; dissipative segments
use either the exponential-decay closed forms (free evolution) or a
fixed-step RK4 Lindblad integrator with amplitude decay at rate 1/T1 into
|g> and pure dephasing at rate gamma_phi, giving the coherence decay rate
Gamma2 = 1/(2 T1) + gamma_phi.

All functions are pure and broadcast over numpy arrays: Bloch components
and pulse parameters may be arrays of matching shape, which is how the
protocol layer runs many Monte Carlo shots through a single code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |g><e|

# Gaussian drive envelopes are truncated at +/- 3 standard deviations.
_GAUSS_TRUNC_SIGMAS = 3.0


@dataclass(frozen=True)
class EmitterParams:
    """Physical constants of the two-level emitter.

    t1_ns
        Radiative lifetime.  May be ``math.inf`` to switch decay off.
    nu0_ghz
        Optical transition frequency (ordinary frequency; omega0 = 2*pi*nu0).
    gamma_phi_per_ns
        Pure-dephasing rate.
    alpha_rad_per_sqrt_uw
        Pulse-area calibration: a pulse of power P has area 2*alpha*sqrt(P),
        so the excited-state population after one pulse is sin^2(alpha*sqrt(P)).
    eps_two_photon
        Per-pulse probability of a two-photon emission event.
    """

    t1_ns: float
    nu0_ghz: float
    alpha_rad_per_sqrt_uw: float
    gamma_phi_per_ns: float = 0.0
    eps_two_photon: float = 0.0

    def __post_init__(self):
        if not self.t1_ns > 0:
            raise ValueError(f"t1_ns must be positive, got {self.t1_ns}")
        if not self.nu0_ghz > 0:
            raise ValueError(f"nu0_ghz must be positive, got {self.nu0_ghz}")
        if not self.alpha_rad_per_sqrt_uw > 0:
            raise ValueError("alpha_rad_per_sqrt_uw must be positive")
        if self.gamma_phi_per_ns < 0:
            raise ValueError("gamma_phi_per_ns must be nonnegative")
        if not 0.0 <= self.eps_two_photon < 1.0:
            raise ValueError("eps_two_photon must lie in [0, 1)")

    @property
    def omega0_rad_per_ns(self) -> float:
        return TWO_PI * self.nu0_ghz

    @property
    def gamma1_per_ns(self) -> float:
        """Population decay rate 1/T1 (zero for infinite lifetime)."""
        return 0.0 if math.isinf(self.t1_ns) else 1.0 / self.t1_ns

    @property
    def gamma2_per_ns(self) -> float:
        """Coherence decay rate Gamma2 = 1/(2 T1) + gamma_phi."""
        return 0.5 * self.gamma1_per_ns + self.gamma_phi_per_ns

    @property
    def t2_hom_ns(self) -> float:
        """Homogeneous coherence time 1/Gamma2, bounded by 2 T1."""
        g2 = self.gamma2_per_ns
        return math.inf if g2 == 0.0 else 1.0 / g2


@dataclass(frozen=True, eq=False)
class BlochState:
    """Bloch vector (u, v, w); components may be numpy arrays.

    w = +1 is the excited state, w = -1 the ground state,
    rho_ge = (u - i v)/2.
    """

    u: float | np.ndarray
    v: float | np.ndarray
    w: float | np.ndarray

    @classmethod
    def ground(cls) -> "BlochState":
        return cls(0.0, 0.0, -1.0)

    @classmethod
    def excited(cls) -> "BlochState":
        return cls(0.0, 0.0, 1.0)

    @classmethod
    def from_density_matrix(cls, rho: np.ndarray) -> "BlochState":
        rho = np.asarray(rho)
        u = 2.0 * np.real(rho[..., 0, 1])
        v = -2.0 * np.imag(rho[..., 0, 1])
        w = np.real(rho[..., 1, 1] - rho[..., 0, 0])
        return cls(u, v, w)

    def density_matrix(self) -> np.ndarray:
        """2x2 density matrix (last two axes), trace exactly 1."""
        u, v, w = np.broadcast_arrays(self.u, self.v, self.w)
        rho = np.empty(u.shape + (2, 2), dtype=complex)
        rho[..., 0, 0] = 0.5 * (1.0 - w)
        rho[..., 1, 1] = 0.5 * (1.0 + w)
        rho[..., 0, 1] = 0.5 * (u - 1j * v)
        rho[..., 1, 0] = 0.5 * (u + 1j * v)
        return rho

    @property
    def excited_population(self) -> float | np.ndarray:
        return 0.5 * (1.0 + self.w)

    @property
    def coherence(self) -> complex | np.ndarray:
        """Off-diagonal element rho_ge."""
        return 0.5 * (self.u - 1j * self.v)

    @property
    def bloch_norm_sq(self) -> float | np.ndarray:
        """u^2 + v^2 + w^2; equals 1 for pure states, < 1 for mixed ones."""
        return self.u * self.u + self.v * self.v + self.w * self.w


@dataclass(frozen=True)
class Pulse:
    """One drive segment with constant detuning and phase.

    shape "square" has constant amplitude omega_peak.  Shape
    "gaussian-envelope" is a Gaussian truncated at +/-3 sigma spanning the
    pulse duration and rescaled so its integrated area equals
    omega_peak * duration, i.e. omega_peak is the equivalent-square
    amplitude (the true envelope maximum is about 2.4x larger).

    Numeric fields may be numpy arrays; they broadcast together.
    """

    shape: str
    duration_ns: float | np.ndarray
    omega_peak_rad_per_ns: float | np.ndarray
    detuning_rad_per_ns: float | np.ndarray = 0.0
    phase_rad: float | np.ndarray = 0.0

    def __post_init__(self):
        if self.shape not in ("square", "gaussian-envelope"):
            raise ValueError(f"unknown pulse shape {self.shape!r}")
        for name in ("duration_ns", "omega_peak_rad_per_ns", "detuning_rad_per_ns", "phase_rad"):
            val = np.asarray(getattr(self, name), dtype=float)
            if not np.all(np.isfinite(val)):
                raise ValueError(f"pulse parameter {name} must be finite")
        if np.any(np.asarray(self.duration_ns) < 0):
            raise ValueError("duration_ns must be nonnegative")


@dataclass(frozen=True)
class FreeEvolution:
    """Drive-free segment of the given duration."""

    duration_ns: float

    def __post_init__(self):
        if not self.duration_ns >= 0:
            raise ValueError("duration_ns must be nonnegative")


SequenceSegment = Pulse | FreeEvolution


def hamiltonian(omega: float, delta: float, phase: float = 0.0) -> np.ndarray:
    """Rotating-frame drive Hamiltonian (rad/ns, hbar = 1).

    Returns (1/2)(Omega (cos(phi) sx + sin(phi) sy) - Delta sz): traceless,
    Hermitian, with the ground state as the first basis vector.
    """
    h = 0.5 * omega * (math.cos(phase) * SIGMA_X + math.sin(phase) * SIGMA_Y)
    return h - 0.5 * delta * SIGMA_Z


def analytic_resonant_amplitude(omega, t):
    """Excited-state amplitude -i sin(Omega t / 2) for resonant drive from |g>."""
    return -1j * np.sin(0.5 * np.asarray(omega) * np.asarray(t))


def _rotate(state: BlochState, ax: np.ndarray, ay: np.ndarray, az: np.ndarray,
            angle: np.ndarray) -> BlochState:
    """Rodrigues rotation of the Bloch vector.

    Works in the mirrored frame m = (u, v, -w) where the generator axis of
    H = (1/2) h.sigma is h = (Omega cos phi, Omega sin phi, -Delta); the
    axis passed here must be unit length in that frame.
    """
    m1, m2, m3 = state.u, state.v, -state.w
    c = np.cos(angle)
    s = np.sin(angle)
    dot = (ax * m1 + ay * m2 + az * m3) * (1.0 - c)
    r1 = m1 * c + (ay * m3 - az * m2) * s + ax * dot
    r2 = m2 * c + (az * m1 - ax * m3) * s + ay * dot
    r3 = m3 * c + (ax * m2 - ay * m1) * s + az * dot
    return BlochState(r1, r2, -r3)


def rotate_bloch(state: BlochState, omega, delta, duration, phase=0.0) -> BlochState:
    """Closed-form SU(2) rotation for a constant drive.

    Rotation axis (Omega cos phi, Omega sin phi, -Delta)/Omega_eff, angle
    Omega_eff * duration with Omega_eff = sqrt(Omega^2 + Delta^2).  Pure
    rotation: Bloch norm is preserved to rounding.
    """
    omega = np.asarray(omega, dtype=float)
    delta = np.asarray(delta, dtype=float)
    duration = np.asarray(duration, dtype=float)
    phase = np.asarray(phase, dtype=float)
    omega_eff = np.hypot(omega, delta)
    # Unit axis; arbitrary where omega_eff == 0 since the angle is then 0.
    safe = np.where(omega_eff == 0.0, 1.0, omega_eff)
    ax = omega * np.cos(phase) / safe
    ay = omega * np.sin(phase) / safe
    az = -delta / safe
    return _rotate(state, ax, ay, az, omega_eff * duration)


def propagate_unitary(state: BlochState, pulse: Pulse) -> BlochState:
    """Propagate through one pulse, decoherence off.

    Square pulses evolve by the exact detuned rotation.  Gaussian-envelope
    pulses are exact only on resonance (the rotation axis is then constant
    and only the accumulated area matters); off resonance they have no
    closed form and must go through propagate_lindblad.
    """
    if pulse.shape == "square":
        return rotate_bloch(state, pulse.omega_peak_rad_per_ns, pulse.detuning_rad_per_ns,
                            pulse.duration_ns, pulse.phase_rad)
    if np.any(np.asarray(pulse.detuning_rad_per_ns) != 0.0):
        raise ValueError("gaussian-envelope pulses have no closed form off resonance; "
                         "use propagate_lindblad")
    area = pulse_area(pulse)
    return rotate_bloch(state, area, 0.0, 1.0, pulse.phase_rad)


def propagate_free(state: BlochState, tau, params: EmitterParams, detuning=0.0) -> BlochState:
    """Free evolution for time tau at the given rotating-frame detuning.

    The coherence rotates by -detuning*tau and decays as exp(-tau/T2_hom);
    the population relaxes toward the ground state as
    w(tau) = -1 + (w0 + 1) exp(-tau/T1).
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be nonnegative")
    detuning = np.asarray(detuning, dtype=float)
    angle = detuning * tau
    decay_c = np.exp(-params.gamma2_per_ns * tau)
    c, s = np.cos(angle), np.sin(angle)
    # (u + i v) -> exp(-i * detuning * tau) * (u + i v), then shrink.
    u = (state.u * c + state.v * s) * decay_c
    v = (state.v * c - state.u * s) * decay_c
    w = -1.0 + (state.w + 1.0) * np.exp(-params.gamma1_per_ns * tau)
    return BlochState(u, v, w)


def _gauss_envelope_scale(duration: float) -> float:
    """Rescaling that makes the truncated Gaussian integrate to duration."""
    sigma = duration / (2.0 * _GAUSS_TRUNC_SIGMAS)
    integral = sigma * math.sqrt(TWO_PI) * math.erf(_GAUSS_TRUNC_SIGMAS / math.sqrt(2.0))
    return duration / integral


def _drive_amplitude(pulse: Pulse, t):
    """Instantaneous Rabi amplitude Omega(t), t measured from pulse start."""
    omega = np.asarray(pulse.omega_peak_rad_per_ns, dtype=float)
    if pulse.shape == "square":
        return omega
    d = pulse.duration_ns
    sigma = d / (2.0 * _GAUSS_TRUNC_SIGMAS)
    env = np.exp(-0.5 * ((np.asarray(t) - 0.5 * d) / sigma) ** 2)
    return omega * _gauss_envelope_scale(d) * env


def pulse_area(pulse: Pulse):
    """Integrated area of the Rabi envelope, in radians."""
    if pulse.shape == "square":
        return pulse.omega_peak_rad_per_ns * pulse.duration_ns
    # Truncated-Gaussian integral times the normalizing rescale; this is
    # omega_peak * duration up to rounding.
    d = pulse.duration_ns
    sigma = d / (2.0 * _GAUSS_TRUNC_SIGMAS)
    integral = sigma * math.sqrt(TWO_PI) * math.erf(_GAUSS_TRUNC_SIGMAS / math.sqrt(2.0))
    return pulse.omega_peak_rad_per_ns * _gauss_envelope_scale(d) * integral


def area_from_power(alpha: float, power_uw) -> float | np.ndarray:
    """Pulse area 2*alpha*sqrt(P) of a calibrated fixed-duration pulse."""
    power = np.asarray(power_uw, dtype=float)
    if np.any(power < 0):
        raise ValueError("power must be nonnegative")
    return 2.0 * alpha * np.sqrt(power)


def pi_pulse_power(alpha: float) -> float:
    """Power at which the pulse area first reaches pi."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return (math.pi / (2.0 * alpha)) ** 2


def pulse_from_power(power_uw: float, duration_ns: float, params: EmitterParams,
                     shape: str = "square", detuning_rad_per_ns=0.0,
                     phase_rad=0.0) -> Pulse:
    """Build a pulse whose area follows the power calibration of ``params``."""
    area = area_from_power(params.alpha_rad_per_sqrt_uw, power_uw)
    return Pulse(shape=shape, duration_ns=duration_ns,
                 omega_peak_rad_per_ns=area / duration_ns,
                 detuning_rad_per_ns=detuning_rad_per_ns, phase_rad=phase_rad)


def _lindblad_rhs(rho: np.ndarray, h: np.ndarray, gamma1: float, gamma_phi: float) -> np.ndarray:
    drho = -1j * (h @ rho - rho @ h)
    if gamma1 > 0.0:
        # Amplitude decay into |g>: L = sigma_minus at rate gamma1.
        pop_e = rho[..., 1, 1]
        dd = np.zeros_like(rho)
        dd[..., 0, 0] = gamma1 * pop_e
        dd[..., 1, 1] = -gamma1 * pop_e
        dd[..., 0, 1] = -0.5 * gamma1 * rho[..., 0, 1]
        dd[..., 1, 0] = -0.5 * gamma1 * rho[..., 1, 0]
        drho = drho + dd
    if gamma_phi > 0.0:
        # Pure dephasing (gamma_phi/2) (sz rho sz - rho): kills coherences.
        dp = np.zeros_like(rho)
        dp[..., 0, 1] = -gamma_phi * rho[..., 0, 1]
        dp[..., 1, 0] = -gamma_phi * rho[..., 1, 0]
        drho = drho + dp
    return drho


def _segment_hamiltonian(segment: SequenceSegment, t):
    """Hamiltonian matrices at time t within the segment, broadcast-ready."""
    if isinstance(segment, FreeEvolution):
        return np.zeros((2, 2), dtype=complex)
    omega_t = _drive_amplitude(segment, t)
    delta = np.asarray(segment.detuning_rad_per_ns, dtype=float)
    phase = np.asarray(segment.phase_rad, dtype=float)
    omega_t, delta, phase = np.broadcast_arrays(omega_t, delta, phase)
    h = np.zeros(omega_t.shape + (2, 2), dtype=complex)
    off = 0.5 * omega_t * np.exp(-1j * phase)
    h[..., 0, 1] = off
    h[..., 1, 0] = np.conj(off)
    h[..., 0, 0] = -0.5 * delta
    h[..., 1, 1] = 0.5 * delta
    return h


def propagate_lindblad(state: BlochState, segment: SequenceSegment, params: EmitterParams,
                       dt: float) -> BlochState:
    """Fixed-step RK4 integration of the Lindblad master equation.

    dt must not exceed min(duration/200, 1e-3 ns); larger steps are a
    configuration error.  The step actually used divides the duration
    exactly and is never larger than the request.  Trace is preserved to
    rounding and, with decay disabled, the result matches the closed-form
    rotation to well below 1e-6 per Bloch component at these step sizes.
    """
    if isinstance(segment, Pulse) and np.ndim(segment.duration_ns) > 0:
        raise ValueError("propagate_lindblad requires a scalar segment duration")
    duration = float(segment.duration_ns)
    if duration == 0.0:
        return BlochState(np.asarray(state.u, dtype=float) + 0.0,
                          np.asarray(state.v, dtype=float) + 0.0,
                          np.asarray(state.w, dtype=float) + 0.0)
    dt_max = min(duration / 200.0, 1e-3)
    if not 0.0 < dt <= dt_max * (1.0 + 1e-12):
        raise ValueError(f"dt={dt} violates the step-size bound {dt_max:.3e} ns "
                         f"for a {duration} ns segment")
    n_steps = max(1, math.ceil(duration / dt - 1e-12))
    h_step = duration / n_steps

    gamma1 = params.gamma1_per_ns
    gamma_phi = params.gamma_phi_per_ns
    rho = state.density_matrix()

    time_dependent = isinstance(segment, Pulse) and segment.shape == "gaussian-envelope"
    if not time_dependent:
        h_mat = _segment_hamiltonian(segment, 0.0)

    for k in range(n_steps):
        t0 = k * h_step
        if time_dependent:
            h1 = _segment_hamiltonian(segment, t0)
            h2 = _segment_hamiltonian(segment, t0 + 0.5 * h_step)
            h3 = h2
            h4 = _segment_hamiltonian(segment, t0 + h_step)
        else:
            h1 = h2 = h3 = h4 = h_mat
        k1 = _lindblad_rhs(rho, h1, gamma1, gamma_phi)
        k2 = _lindblad_rhs(rho + 0.5 * h_step * k1, h2, gamma1, gamma_phi)
        k3 = _lindblad_rhs(rho + 0.5 * h_step * k2, h3, gamma1, gamma_phi)
        k4 = _lindblad_rhs(rho + h_step * k3, h4, gamma1, gamma_phi)
        rho = rho + (h_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    rho = 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))  # re-hermitize rounding
    return BlochState.from_density_matrix(rho)


def propagate_sequence(state: BlochState, segments, params: EmitterParams,
                       dt: float = 1e-4) -> BlochState:
    """Run a list of segments through the Lindblad integrator."""
    for seg in segments:
        state = propagate_lindblad(state, seg, params, dt)
    return state
