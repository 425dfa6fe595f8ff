"""Monte Carlo photon streams and pulsed second-order autocorrelation.

Each excitation pulse emits 0, 1, or 2 photons with probabilities
(1 - p1 - p2, p1, p2).  Every photon independently survives the detection
chain with probability eta and lands on detector A or B of the
beam-splitter pair with probability 1/2 each, timestamped with the pulse
time plus an exponential emission delay (the radiative lifetime) plus
Gaussian detector jitter.  Two-photon pulses are two independent draws
through the same chain.

The pulsed autocorrelation divides the coincidence counts at zero pulse
separation by the average over the side peaks.  For this source the ideal
ratio is

    g2(0) = 2 p2 / (p1 + 2 p2)^2

independent of eta.  Because the emission delay is not small compared to
the 12.5 ns pulse period, a fraction exp(-rep/T1) of the clicks falls into
the next period; peak integrals therefore assign clicks to pulse slots
(maximum-likelihood for an exponential delay) and apply a first-order
correction for the known crossing probability, keeping the estimator
unbiased without any background subtraction.  The raw delay histogram is
kept alongside for display; its tails genuinely overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng as rng_mod


@dataclass(frozen=True)
class HbtConfig:
    """Source, detection, and analysis parameters of one HBT run."""

    n_pulses: int
    p1: float
    p2: float
    eta: float
    rep_period_ns: float = 12.5
    t1_ns: float = 1.95
    jitter_ns: float = 0.1
    bin_ns: float = 0.1
    window_peaks: int = 5

    def __post_init__(self):
        if self.n_pulses < 1:
            raise ValueError("n_pulses must be at least 1")
        if not (0.0 <= self.p1 and 0.0 <= self.p2 and self.p1 + self.p2 <= 1.0):
            raise ValueError("need p1, p2 >= 0 and p1 + p2 <= 1")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must lie in (0, 1]")
        if not self.rep_period_ns > 0:
            raise ValueError("rep_period_ns must be positive")
        if not self.t1_ns > 0:
            raise ValueError("t1_ns must be positive")
        if self.jitter_ns < 0 or self.jitter_ns >= self.rep_period_ns / 8.0:
            raise ValueError("jitter_ns must lie in [0, rep_period/8)")
        if not 0.0 < self.bin_ns < self.rep_period_ns / 4.0:
            raise ValueError("bin_ns must lie in (0, rep_period/4)")
        if self.window_peaks < 1:
            raise ValueError("window_peaks must be at least 1")

    @property
    def mean_photons(self) -> float:
        return self.p1 + 2.0 * self.p2


@dataclass
class ClickStream:
    """Detector clicks, time-sorted.  detector 0 is A, 1 is B."""

    detector: np.ndarray
    time_ns: np.ndarray

    def __post_init__(self):
        self.detector = np.asarray(self.detector, dtype=np.uint8)
        self.time_ns = np.asarray(self.time_ns, dtype=float)
        if self.detector.shape != self.time_ns.shape:
            raise ValueError("detector and time arrays must match")
        if self.time_ns.size and np.any(np.diff(self.time_ns) < 0):
            raise ValueError("click times must be sorted")
        if self.time_ns.size and self.time_ns[0] < 0:
            raise ValueError("click times must be nonnegative")

    def __len__(self) -> int:
        return self.time_ns.size

    def times_on(self, detector: int) -> np.ndarray:
        return self.time_ns[self.detector == detector]


@dataclass
class CoincidenceHistogram:
    """Delay histogram plus per-peak coincidence integrals.

    counts is the raw histogram of (t_B - t_A) pair delays for display;
    peak_areas are the crossing-corrected pulse-slot integrals used for
    quantitative estimates, indexed by peak_lags (multiples of the pulse
    period).
    """

    centers_ns: np.ndarray
    counts: np.ndarray
    peak_lags: np.ndarray
    peak_areas: np.ndarray
    rep_period_ns: float
    flagged_empty: bool = False
    meta: dict = field(default_factory=dict)


def _emit_clicks(pulse_indices: np.ndarray, cfg: HbtConfig,
                 rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Detection chain for one photon per listed pulse; returns (detector, time)."""
    n = pulse_indices.size
    detected = rng.random(n) < cfg.eta
    idx = pulse_indices[detected]
    n_det = idx.size
    detector = rng.integers(0, 2, size=n_det).astype(np.uint8)
    delay = rng.exponential(cfg.t1_ns, size=n_det)
    if cfg.jitter_ns > 0:
        delay = delay + rng.normal(0.0, cfg.jitter_ns, size=n_det)
    times = idx * cfg.rep_period_ns + delay
    return detector, np.maximum(times, 0.0)


def _assemble_stream(parts: list[tuple[np.ndarray, np.ndarray]]) -> ClickStream:
    detector = np.concatenate([p[0] for p in parts]) if parts else np.empty(0, dtype=np.uint8)
    times = np.concatenate([p[1] for p in parts]) if parts else np.empty(0)
    order = np.argsort(times, kind="stable")
    return ClickStream(detector[order], times[order])


def simulate_photon_stream(cfg: HbtConfig, rng: np.random.Generator) -> ClickStream:
    """Click record of the pulsed single-photon source."""
    u = rng.random(cfg.n_pulses)
    emits_one = u < (cfg.p1 + cfg.p2)          # first photon of the pulse
    emits_two = u < cfg.p2                     # second photon, same pulse
    first = _emit_clicks(np.flatnonzero(emits_one), cfg, rng)
    second = _emit_clicks(np.flatnonzero(emits_two), cfg, rng)
    return _assemble_stream([first, second])


def simulate_poisson_stream(cfg: HbtConfig, rng: np.random.Generator) -> ClickStream:
    """Coherent-state reference: Poisson photon numbers with the same mean.

    Serves as the g2 = 1 oracle for the estimator.
    """
    n_photons = rng.poisson(cfg.mean_photons, size=cfg.n_pulses)
    pulse_of_photon = np.repeat(np.arange(cfg.n_pulses), n_photons)
    return _assemble_stream([_emit_clicks(pulse_of_photon, cfg, rng)])


def simulate_photon_stream_chunked(cfg: HbtConfig, master_seed: int,
                                   chunk_pulses: int = 1_000_000) -> ClickStream:
    """Chunked stream generation with per-chunk derived substreams.

    Chunks are keyed by their index, so partitioning the work across any
    number of workers cannot change the stream; results are bit-identical
    to this sequential reference implementation.
    """
    parts = []
    n_chunks = math.ceil(cfg.n_pulses / chunk_pulses)
    for chunk in range(n_chunks):
        n = min(chunk_pulses, cfg.n_pulses - chunk * chunk_pulses)
        sub_cfg = HbtConfig(n_pulses=n, p1=cfg.p1, p2=cfg.p2, eta=cfg.eta,
                            rep_period_ns=cfg.rep_period_ns, t1_ns=cfg.t1_ns,
                            jitter_ns=cfg.jitter_ns, bin_ns=cfg.bin_ns,
                            window_peaks=cfg.window_peaks)
        stream = simulate_photon_stream(sub_cfg, rng_mod.substream(master_seed, rng_mod.G2, chunk))
        offset = chunk * chunk_pulses * cfg.rep_period_ns
        parts.append((stream.detector, stream.time_ns + offset))
    return _assemble_stream(parts)


def _pair_delays(times_a: np.ndarray, times_b: np.ndarray, max_delay: float) -> np.ndarray:
    """All (t_B - t_A) pair delays with |delay| <= max_delay; A times sorted."""
    lo = np.searchsorted(times_b, times_a - max_delay, side="left")
    hi = np.searchsorted(times_b, times_a + max_delay, side="right")
    counts = hi - lo
    keep = counts > 0
    if not np.any(keep):
        return np.empty(0)
    starts = lo[keep]
    reps = counts[keep]
    total = int(reps.sum())
    # grouped arange: for each kept A-click, indices starts[i]..starts[i]+reps[i]
    within = np.arange(total) - np.repeat(np.cumsum(reps) - reps, reps)
    offsets = np.repeat(starts, reps) + within
    return times_b[offsets] - np.repeat(times_a[keep], reps)


def _slot_areas(times_a: np.ndarray, times_b: np.ndarray, cfg: HbtConfig,
                max_lag: int) -> np.ndarray:
    """Pair counts by pulse-slot difference for lags -max_lag..max_lag.

    Slots start slightly before each pulse (4 sigma of jitter) so detector
    jitter cannot push an on-time click into the previous slot.
    """
    rep = cfg.rep_period_ns
    guard = 4.0 * cfg.jitter_ns
    slots_a = np.floor((times_a + guard) / rep).astype(np.int64)
    slots_b = np.floor((times_b + guard) / rep).astype(np.int64)
    n_slots = int(max(slots_a.max(initial=0), slots_b.max(initial=0))) + 1
    count_a = np.bincount(slots_a, minlength=n_slots).astype(np.int64)
    count_b = np.bincount(slots_b, minlength=n_slots).astype(np.int64)
    areas = np.empty(2 * max_lag + 1, dtype=float)
    for k in range(-max_lag, max_lag + 1):
        if k >= 0:
            areas[k + max_lag] = float(count_a[:n_slots - k] @ count_b[k:]) if k < n_slots else 0.0
        else:
            areas[k + max_lag] = float(count_a[-k:] @ count_b[:n_slots + k]) if -k < n_slots else 0.0
    # Same-slot pairs at lag 0 are genuine A-B pairs already (different
    # detectors), no self-pair correction is needed.
    return areas


def _crossing_probability(cfg: HbtConfig) -> float:
    """Probability that an emission delay crosses into the next pulse slot."""
    guard = 4.0 * cfg.jitter_ns
    return math.exp(-(cfg.rep_period_ns - guard) / cfg.t1_ns)


def coincidence_histogram(clicks: ClickStream, cfg: HbtConfig) -> CoincidenceHistogram:
    """Delay histogram over +/-(window_peaks + 1/2) periods plus peak integrals.

    Peak integrals use pulse-slot pairing with the first-order crossing
    correction described in the module docstring.  An empty or single-click
    stream returns an all-zero, flagged histogram.
    """
    half_span = (cfg.window_peaks + 0.5) * cfg.rep_period_ns
    n_bins = 2 * int(round(half_span / cfg.bin_ns))
    edges = np.linspace(-half_span, half_span, n_bins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    lags = np.arange(-cfg.window_peaks, cfg.window_peaks + 1)

    times_a = clicks.times_on(0)
    times_b = clicks.times_on(1)
    if len(clicks) < 2 or times_a.size == 0 or times_b.size == 0:
        return CoincidenceHistogram(centers, np.zeros(n_bins, dtype=np.int64), lags,
                                    np.zeros(lags.size), cfg.rep_period_ns,
                                    flagged_empty=True)

    delays = _pair_delays(times_a, times_b, half_span)
    counts = np.histogram(delays, bins=edges)[0]

    raw = _slot_areas(times_a, times_b, cfg, cfg.window_peaks + 1)
    p = _crossing_probability(cfg)
    inner = slice(1, raw.size - 1)
    corrected = (raw[inner] - p * (raw[:-2] + raw[2:])) / (1.0 - 2.0 * p)
    corrected = np.maximum(corrected, 0.0)
    return CoincidenceHistogram(centers, counts, lags, corrected, cfg.rep_period_ns,
                                meta={"n_pairs": int(delays.size),
                                      "crossing_probability": p})


def g2_zero(hist: CoincidenceHistogram) -> float:
    """Central peak area over the mean side-peak area, no background correction."""
    if hist.flagged_empty:
        raise ValueError("empty coincidence histogram: g2(0) undefined")
    central = hist.peak_areas[hist.peak_lags == 0]
    sides = hist.peak_areas[hist.peak_lags != 0]
    if central.size != 1:
        raise ValueError("histogram lacks a zero-lag peak")
    nonzero_sides = np.count_nonzero(sides)
    if nonzero_sides < 2:
        raise ValueError("need at least 2 side peaks with counts to normalize g2(0)")
    return float(central[0] / sides.mean())


def analytic_g2_zero(p1: float, p2: float) -> float:
    """Ideal pulsed autocorrelation 2 p2 / (p1 + 2 p2)^2; independent of eta."""
    if p1 + p2 > 1.0 or p1 < 0 or p2 < 0:
        raise ValueError("need p1, p2 >= 0 and p1 + p2 <= 1")
    mu = p1 + 2.0 * p2
    if mu <= 0.0:
        raise ValueError("mean photon number must be positive")
    return 2.0 * p2 / (mu * mu)


def two_photon_prob_for_g2(p1: float, g2_target: float) -> float:
    """Two-photon probability that makes analytic_g2_zero hit the target."""
    if g2_target < 0:
        raise ValueError("g2_target must be nonnegative")
    if g2_target == 0.0:
        return 0.0
    g = g2_target
    disc = (4.0 * g * p1 - 2.0) ** 2 - 16.0 * g * g * p1 * p1
    if disc < 0:
        raise ValueError(f"no two-photon probability reaches g2={g} at p1={p1}")
    return (2.0 - 4.0 * g * p1 - math.sqrt(disc)) / (8.0 * g)


def clicks_to_text(clicks: ClickStream, path) -> None:
    """Two-column export (detector letter, time in ns) for external correlators."""
    letters = np.array(["A", "B"])
    lines = [f"{letters[d]}\t{t!r}" for d, t in zip(clicks.detector, clicks.time_ns)]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def clicks_from_text(path) -> ClickStream:
    detector = []
    times = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        label, value = line.split()
        detector.append(0 if label == "A" else 1)
        times.append(float(value))
    return ClickStream(np.asarray(detector, dtype=np.uint8), np.asarray(times))
