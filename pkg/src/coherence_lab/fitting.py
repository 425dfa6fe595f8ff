"""Nonlinear least-squares estimation for all reported quantities.

The optimizer is a deterministic Levenberg-Marquardt loop with a central
finite-difference Jacobian and simple box bounds (steps are clipped into
the feasible region).  Damping starts at 1e-3 and moves by factors of ten;
convergence is declared when an accepted step reduces the residual sum of
squares by less than 1e-10 relative, or when the gradient infinity-norm
falls below 1e-8.  A stalled or iteration-capped run falls back to
Nelder-Mead and then polishes with one more LM pass, so every fit is
reproducible given (data, initial guess).

Residuals are weighted as (y - f) / max(y_err, 1e-12) when uncertainties
are present, unweighted otherwise.  Parameter standard errors come from
the curvature of the weighted normal equations: (J^T J)^-1 directly when
the weights encode known errors, scaled by the reduced residual variance
when they do not.

Model builders for the concrete experiments (exponential decay, damped
Rabi oscillation, fringe sinusoid, Gaussian visibility envelope,
Lorentzian and Voigt lines) live here as well, each with its
initial-guess heuristic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .data import CurveData
from .noise import voigt_peak_normalized, voigt_fwhm_olivero, gaussian_fwhm_from_sigma

MAX_ITERATIONS = 200
LAMBDA_START = 1e-3
LAMBDA_MAX = 1e12
GRADIENT_TOL = 1e-8
REL_REDUCTION_TOL = 1e-10
WEIGHT_FLOOR = 1e-12


class JacobianError(RuntimeError):
    """Raised when a perturbed model prediction is not finite."""


@dataclass
class FitModel:
    """Prediction function plus everything needed to start and bound a fit."""

    name: str
    param_names: tuple
    units: tuple
    predict: Callable[[np.ndarray, np.ndarray], np.ndarray]
    initial_guess: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None


@dataclass
class FitResult:
    """Estimates, uncertainties, and convergence diagnostics of one fit."""

    model_name: str
    params: np.ndarray
    stderr: np.ndarray
    rss: float
    iterations: int
    converged: bool
    message: str
    estimates: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    units: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    n_points: int = 0

    def summary_dict(self) -> dict:
        return {
            "model": self.model_name,
            "estimates": {k: float(v) for k, v in self.estimates.items()},
            "stderr": {k: float(v) for k, v in self.errors.items()},
            "units": dict(self.units),
            "rss": float(self.rss),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "message": self.message,
            "flags": {k: bool(v) if isinstance(v, (bool, np.bool_)) else v
                      for k, v in self.flags.items()},
            "n_points": int(self.n_points),
        }


def _data_x(data):
    return data.x if hasattr(data, "x") else np.asarray(data, dtype=float)


def finite_diff_jacobian(model: FitModel, params: np.ndarray, data) -> np.ndarray:
    """Central-difference sensitivity matrix d f(x_i) / d p_j.

    Step per parameter is max(1e-6 |p|, 1e-8).  A non-finite prediction at
    a perturbed point raises JacobianError, which the fit driver converts
    into a flagged non-convergence.
    """
    x = _data_x(data)
    params = np.asarray(params, dtype=float)
    n_par = params.size
    jac = np.empty((x.size, n_par))
    for j in range(n_par):
        step = max(1e-6 * abs(params[j]), 1e-8)
        p_hi = params.copy()
        p_lo = params.copy()
        p_hi[j] += step
        p_lo[j] -= step
        f_hi = np.asarray(model.predict(p_hi, x), dtype=float)
        f_lo = np.asarray(model.predict(p_lo, x), dtype=float)
        if not (np.all(np.isfinite(f_hi)) and np.all(np.isfinite(f_lo))):
            raise JacobianError(f"non-finite prediction while perturbing {model.param_names[j]}")
        jac[:, j] = (f_hi - f_lo) / (2.0 * step)
    return jac


def _bounds_arrays(model: FitModel, n_par: int):
    lo = np.full(n_par, -np.inf) if model.lower is None else np.asarray(model.lower, dtype=float)
    hi = np.full(n_par, np.inf) if model.upper is None else np.asarray(model.upper, dtype=float)
    return lo, hi


def _projected_gradient(grad, params, lo, hi):
    g = grad.copy()
    g[(params <= lo) & (g < 0)] = 0.0
    g[(params >= hi) & (g > 0)] = 0.0
    return g


def _finish(model, params, stderr, rss, iterations, converged, message, n_points) -> FitResult:
    estimates = dict(zip(model.param_names, [float(p) for p in params]))
    errors = dict(zip(model.param_names, [float(s) for s in stderr]))
    units = dict(zip(model.param_names, model.units))
    return FitResult(model_name=model.name, params=np.asarray(params, dtype=float),
                     stderr=np.asarray(stderr, dtype=float), rss=float(rss),
                     iterations=int(iterations), converged=bool(converged),
                     message=message, estimates=estimates, errors=errors,
                     units=units, n_points=int(n_points))


def fit_least_squares(model: FitModel, data: CurveData, init=None,
                      _allow_fallback: bool = True) -> FitResult:
    """Levenberg-Marquardt fit of ``model`` to ``data``.

    Deterministic given (data, init).  Singular normal equations or
    non-finite predictions are reported through ``converged=False`` and the
    message field, never raised.
    """
    x, y = data.x, data.y
    weighted = np.any(data.y_err > 0)
    w = 1.0 / np.maximum(data.y_err, WEIGHT_FLOOR) if weighted else np.ones_like(y)

    if init is None:
        if model.initial_guess is None:
            raise ValueError(f"model {model.name} has no initial-guess heuristic; pass init")
        init = model.initial_guess(x, y)
    params = np.asarray(init, dtype=float).copy()
    n_par = params.size
    if y.size < n_par:
        raise ValueError(f"need at least {n_par} points to fit {model.name}, got {y.size}")
    lo, hi = _bounds_arrays(model, n_par)
    params = np.clip(params, lo, hi)

    def residual(p):
        return w * (y - np.asarray(model.predict(p, x), dtype=float))

    def stderr_from(jac, rss_val):
        try:
            cov = np.linalg.inv(jac.T @ jac)
        except np.linalg.LinAlgError:
            return np.full(n_par, np.nan)
        if not weighted:
            dof = max(y.size - n_par, 1)
            cov = cov * (rss_val / dof)
        diag = np.diag(cov).copy()
        diag[diag < 0] = 0.0
        return np.sqrt(diag)

    res = residual(params)
    if not np.all(np.isfinite(res)):
        return _finish(model, params, np.full(n_par, np.nan), np.inf, 0, False,
                       "non-finite model prediction at initial guess", y.size)
    rss = float(res @ res)

    try:
        jac = w[:, None] * finite_diff_jacobian(model, params, x)
    except JacobianError as exc:
        return _finish(model, params, np.full(n_par, np.nan), rss, 0, False, str(exc), y.size)
    grad = jac.T @ res

    if np.max(np.abs(_projected_gradient(grad, params, lo, hi))) < GRADIENT_TOL or rss == 0.0:
        return _finish(model, params, stderr_from(jac, rss), rss, 0, True,
                       "gradient below tolerance at initial guess", y.size)

    lam = LAMBDA_START
    converged = False
    message = "maximum iterations reached"
    iterations = 0
    singular_strikes = 0

    for iterations in range(1, MAX_ITERATIONS + 1):
        jtj = jac.T @ jac
        damp = np.diag(jtj).copy()
        damp[damp <= 0.0] = 1.0  # neutral damping for zero-sensitivity columns
        try:
            step = np.linalg.solve(jtj + lam * np.diag(damp), grad)
        except np.linalg.LinAlgError:
            singular_strikes += 1
            lam *= 10.0
            if singular_strikes >= 8 or lam > LAMBDA_MAX:
                message = "singular normal equations"
                break
            continue
        trial = np.clip(params + step, lo, hi)
        res_t = residual(trial)
        rss_t = float(res_t @ res_t) if np.all(np.isfinite(res_t)) else np.inf

        if rss_t <= rss:
            rel_reduction = (rss - rss_t) / max(rss, 1e-300)
            params, res, rss = trial, res_t, rss_t
            lam = max(lam / 10.0, 1e-14)
            try:
                jac = w[:, None] * finite_diff_jacobian(model, params, x)
            except JacobianError as exc:
                message = str(exc)
                break
            grad = jac.T @ res
            if rel_reduction < REL_REDUCTION_TOL:
                converged, message = True, "relative residual reduction below tolerance"
                break
            if np.max(np.abs(_projected_gradient(grad, params, lo, hi))) < GRADIENT_TOL:
                converged, message = True, "gradient below tolerance"
                break
            if rss < 1e-300:
                converged, message = True, "residual exhausted"
                break
        else:
            lam *= 10.0
            if lam > LAMBDA_MAX:
                message = "damping limit reached (stall)"
                break

    if not converged and _allow_fallback and message != "singular normal equations":
        # Nelder-Mead rescue from the best point, then one LM polish.
        def objective(q):
            r = residual(np.clip(q, lo, hi))
            r = r[np.isfinite(r)]
            return float(r @ r) if r.size == y.size else np.inf

        nm = minimize(objective, params, method="Nelder-Mead",
                      options={"maxiter": 2000, "xatol": 1e-12, "fatol": 1e-14, "adaptive": True})
        polished = fit_least_squares(model, data, init=np.clip(nm.x, lo, hi),
                                     _allow_fallback=False)
        polished.iterations += iterations
        if polished.converged or polished.rss < rss:
            polished.flags["nelder_mead_fallback"] = True
            return polished

    return _finish(model, params, stderr_from(jac, rss), rss, iterations, converged,
                   message, y.size)


# ---------------------------------------------------------------------------
# frequency scan used to start oscillatory fits

def dominant_frequencies(x: np.ndarray, y: np.ndarray, n_grid: int = 1600,
                         max_peaks: int = 2, min_power_ratio: float = 0.25) -> np.ndarray:
    """Strongest fringe frequencies (cycles per x-unit) by dense grid scan.

    A plain O(N K) scan of |sum (y - <y>) exp(-2 pi i f x)|^2; local maxima
    are returned strongest first, dropping peaks below ``min_power_ratio``
    of the strongest.  Handles unevenly spaced x.
    """
    x = np.asarray(x, dtype=float)
    yc = np.asarray(y, dtype=float) - np.mean(y)
    span = float(x.max() - x.min())
    if span <= 0:
        return np.array([])
    min_dx = float(np.min(np.diff(np.sort(x))))
    f_lo = 0.5 / span
    f_hi = 0.5 / max(min_dx, 1e-12)
    freqs = np.linspace(f_lo, f_hi, n_grid)
    phase = 2.0 * math.pi * freqs[:, None] * x[None, :]
    power = (np.cos(phase) @ yc) ** 2 + (np.sin(phase) @ yc) ** 2
    interior = (power[1:-1] >= power[:-2]) & (power[1:-1] > power[2:])
    idx = np.flatnonzero(interior) + 1
    if idx.size == 0:
        idx = np.array([int(np.argmax(power))])
    order = idx[np.argsort(power[idx])[::-1]]
    keep = order[power[order] >= min_power_ratio * power[order[0]]]
    return freqs[keep[:max_peaks]]


# ---------------------------------------------------------------------------
# model builders

def linear_model() -> FitModel:
    return FitModel(
        name="linear", param_names=("slope", "intercept"), units=("y/x", "y"),
        predict=lambda p, x: p[0] * x + p[1],
        initial_guess=lambda x, y: np.array([0.0, float(np.mean(y))]),
    )


def exponential_decay_model() -> FitModel:
    """y = A exp(-t/T1) + B."""

    def predict(p, t):
        amp, t1, offset = p
        return amp * np.exp(-t / abs(t1)) + offset

    def guess(t, y):
        tail = max(3, t.size // 10)
        offset = float(np.mean(y[np.argsort(t)[-tail:]]))
        amp = float(np.max(y) - offset)
        mask = (y - offset) > max(abs(amp) * 1e-3, 1e-12)
        if mask.sum() >= 2 and amp > 0:
            slope = np.polyfit(t[mask], np.log(y[mask] - offset), 1)[0]
            t1 = -1.0 / slope if slope < 0 else float(t.max() - t.min()) / 2.0
        else:
            t1 = float(t.max() - t.min()) / 2.0
        return np.array([amp, max(t1, 1e-9), offset])

    return FitModel(name="exponential_decay",
                    param_names=("amplitude", "t1_ns", "offset"),
                    units=("counts", "ns", "counts"),
                    predict=predict, initial_guess=guess)


def rabi_model() -> FitModel:
    """y = C - A cos(2 alpha sqrt(P)) exp(-beta sqrt(P)), abscissa in uW."""

    def predict(p, power):
        offset, amp, alpha, beta = p
        s = np.sqrt(np.maximum(power, 0.0))
        return offset - amp * np.cos(2.0 * abs(alpha) * s) * np.exp(-abs(beta) * s)

    def guess(power, y):
        s = np.sqrt(np.maximum(power, 0.0))
        freqs = dominant_frequencies(s, y, max_peaks=1)
        alpha = math.pi * freqs[0] if freqs.size else math.pi / max(float(s.max()), 1.0)
        return np.array([float(np.mean(y)), float(np.ptp(y)) / 2.0, alpha, 0.0])

    return FitModel(name="rabi_power_sweep",
                    param_names=("offset", "amplitude", "alpha_rad_per_sqrt_uw",
                                 "damping_per_sqrt_uw"),
                    units=("signal", "signal", "rad/sqrt(uW)", "1/sqrt(uW)"),
                    predict=predict, initial_guess=guess)


def sinusoid_visibility_model() -> FitModel:
    """y = C (1 + V cos(2 pi f x + phi)) with V bounded to [0, 1]."""

    def predict(p, x):
        offset, vis, freq, phase = p
        return offset * (1.0 + vis * np.cos(2.0 * math.pi * freq * x + phase))

    def guess(x, y):
        offset = float(np.mean(y))
        vis = float(np.ptp(y)) / (2.0 * max(abs(offset), 1e-12))
        freqs = dominant_frequencies(x, y, max_peaks=1)
        freq = float(freqs[0]) if freqs.size else 1.0 / max(float(np.ptp(x)), 1e-12)
        z = np.sum((y - offset) * np.exp(-2j * math.pi * freq * x))
        return np.array([offset, min(max(vis, 0.0), 1.0), freq, float(np.angle(z))])

    return FitModel(name="sinusoid_visibility",
                    param_names=("offset", "visibility", "frequency", "phase"),
                    units=("signal", "", "cycles/x", "rad"),
                    predict=predict, initial_guess=guess,
                    lower=np.array([-np.inf, 0.0, 0.0, -np.inf]),
                    upper=np.array([np.inf, 1.0, np.inf, np.inf]))


def gaussian_envelope_model(include_floor: bool = False) -> FitModel:
    """V(tau) = V0 exp(-tau^2 / T^2), optional additive floor (off by default)."""

    if include_floor:
        def predict(p, tau):
            v0, t2s, floor = p
            return v0 * np.exp(-((tau / abs(t2s)) ** 2)) + floor
    else:
        def predict(p, tau):
            v0, t2s = p
            return v0 * np.exp(-((tau / abs(t2s)) ** 2))

    def guess(tau, y):
        v0 = float(np.max(y))
        target = v0 / math.e
        below = np.flatnonzero(y <= target)
        if below.size and below[0] > 0:
            i = below[0]
            t2s = float(np.interp(target, [y[i], y[i - 1]], [tau[i], tau[i - 1]]))
        else:
            t2s = float(tau.max() - tau.min()) / 2.0 or 1.0
        base = [min(v0, 1.0), max(t2s, 1e-9)]
        return np.array(base + [0.0] if include_floor else base)

    names = ("v0", "t2_star_ns") + (("floor",) if include_floor else ())
    units = ("", "ns") + (("",) if include_floor else ())
    lower = np.array([0.0, 1e-9] + ([0.0] if include_floor else []))
    upper = np.array([1.0, np.inf] + ([1.0] if include_floor else []))
    return FitModel(name="gaussian_envelope", param_names=names, units=units,
                    predict=predict, initial_guess=guess, lower=lower, upper=upper)


def _peak_guess(x, y):
    """Offset, peak index, signed amplitude for single-line data."""
    edge = max(2, x.size // 10)
    order = np.argsort(x)
    offset = float(np.mean(np.concatenate([y[order[:edge]], y[order[-edge:]]])))
    dev = y - offset
    peak = int(np.argmax(np.abs(dev)))
    return offset, peak, float(dev[peak])


def _half_width_guess(x, y, offset, peak, amp):
    dev = (y - offset) / amp  # positive at the peak for either sign of amp
    above = dev >= 0.5
    if above[peak]:
        i0 = peak
        while i0 > 0 and above[i0 - 1]:
            i0 -= 1
        i1 = peak
        while i1 < len(y) - 1 and above[i1 + 1]:
            i1 += 1
        if i1 > i0:
            return abs(float(x[i1] - x[i0]))
    return float(np.ptp(x)) / 5.0


def lorentzian_model() -> FitModel:
    """y = B + A (G/2)^2 / ((x - x0)^2 + (G/2)^2), FWHM = G."""

    def predict(p, x):
        center, fwhm, amp, offset = p
        hw = 0.5 * abs(fwhm)
        return offset + amp * hw * hw / ((x - center) ** 2 + hw * hw)

    def guess(x, y):
        offset, peak, amp = _peak_guess(x, y)
        width = _half_width_guess(x, y, offset, peak, amp)
        return np.array([float(x[peak]), width, amp, offset])

    return FitModel(name="lorentzian",
                    param_names=("center", "fwhm", "amplitude", "offset"),
                    units=("x", "x", "y", "y"),
                    predict=predict, initial_guess=guess)


def voigt_model() -> FitModel:
    """y = B + A * Voigt(x - x0; sigma_g, fwhm_l) with unit peak height."""

    def predict(p, x):
        center, sigma_g, fwhm_l, amp, offset = p
        return offset + amp * voigt_peak_normalized(x - center, abs(sigma_g), abs(fwhm_l))

    def guess(x, y):
        offset, peak, amp = _peak_guess(x, y)
        width = _half_width_guess(x, y, offset, peak, amp)
        # split the observed width evenly between the two components
        return np.array([float(x[peak]), width / (2.0 * 2.3548), 0.5 * width, amp, offset])

    return FitModel(name="voigt",
                    param_names=("center", "sigma_gauss", "fwhm_lorentz", "amplitude", "offset"),
                    units=("x", "x", "x", "y", "y"),
                    predict=predict, initial_guess=guess)


# ---------------------------------------------------------------------------
# experiment-level fits

def fit_exponential_decay(data: CurveData) -> FitResult:
    """Lifetime fit y = A exp(-t/T1) + B; flags degenerate inputs."""
    result = fit_least_squares(exponential_decay_model(), data)
    result.params[1] = abs(result.params[1])
    result.estimates["t1_ns"] = abs(result.estimates["t1_ns"])
    scale = max(abs(float(np.ptp(data.y))), 1e-300)
    if result.estimates["t1_ns"] <= 0 or not np.isfinite(result.estimates["t1_ns"]):
        result.converged = False
        result.flags["nonpositive_t1"] = True
    if abs(result.estimates["amplitude"]) < 1e-9 * scale or np.ptp(data.y) == 0:
        result.converged = False
        result.flags["no_decay_detected"] = True
    return result


def fit_rabi(data: CurveData) -> FitResult:
    """Damped power-sweep fit; reports alpha, the pi-pulse power, and an
    aliasing flag when two spectral initializations disagree by over 5%."""
    model = rabi_model()
    primary = fit_least_squares(model, data)
    primary.params[2] = abs(primary.params[2])
    primary.params[3] = abs(primary.params[3])

    s = np.sqrt(np.maximum(data.x, 0.0))
    freqs = dominant_frequencies(s, data.y, max_peaks=2)
    if freqs.size > 1:
        init = model.initial_guess(data.x, data.y)
        init[2] = math.pi * freqs[1]
        secondary = fit_least_squares(model, data, init=init)
        alpha_1, alpha_2 = abs(primary.params[2]), abs(secondary.params[2])
        comparable = secondary.converged and secondary.rss <= 2.0 * max(primary.rss, 1e-300)
        if comparable and abs(alpha_1 - alpha_2) > 0.05 * alpha_1:
            primary.flags["period_ambiguity"] = True
            if secondary.rss < primary.rss:
                secondary.flags.update(primary.flags)
                primary = secondary
                primary.params[2] = abs(primary.params[2])

    alpha = abs(primary.params[2])
    primary.estimates["alpha_rad_per_sqrt_uw"] = alpha
    primary.estimates["damping_per_sqrt_uw"] = abs(primary.params[3])
    if alpha > 0:
        primary.estimates["pi_pulse_power_uw"] = (math.pi / (2.0 * alpha)) ** 2
        primary.errors["pi_pulse_power_uw"] = (
            2.0 * primary.estimates["pi_pulse_power_uw"] / alpha
            * primary.errors.get("alpha_rad_per_sqrt_uw", 0.0))
        primary.units["pi_pulse_power_uw"] = "uW"
    return primary


def fit_sinusoid_visibility(interferogram, y=None, y_err=None) -> FitResult:
    """Fringe fit y = C (1 + V cos(2 pi f x + phi)); V = A/C is bounded to [0, 1].

    Accepts an Interferogram or plain (x, y) arrays.  A flat signal returns
    V = 0 with the converged flag set.
    """
    if y is None:
        x = np.asarray(interferogram.short_scan_positions_um, dtype=float)
        y = np.asarray(interferogram.signal, dtype=float)
    else:
        x = np.asarray(interferogram, dtype=float)
        y = np.asarray(y, dtype=float)
    err = np.zeros_like(y) if y_err is None else np.asarray(y_err, dtype=float)
    data = CurveData(x, y, err, x_label="position_um", y_label="signal")

    scale = max(abs(float(np.mean(y))), 1.0)
    if float(np.ptp(y)) < 1e-12 * scale:
        model = sinusoid_visibility_model()
        result = _finish(model, np.array([float(np.mean(y)), 0.0, 0.0, 0.0]),
                         np.zeros(4), float(np.sum((y - np.mean(y)) ** 2)), 0, True,
                         "flat signal: visibility 0", y.size)
        result.flags["flat_signal"] = True
        result.estimates["visibility"] = 0.0
        result.estimates["amplitude"] = 0.0
        return result

    result = fit_least_squares(sinusoid_visibility_model(), data)
    offset, vis = result.params[0], result.params[1]
    result.estimates["amplitude"] = float(offset * vis)
    result.errors["amplitude"] = float(abs(offset) * result.errors.get("visibility", 0.0))
    result.units["amplitude"] = "signal"
    return result


def fit_gaussian_envelope(data: CurveData, include_floor: bool = False) -> FitResult:
    """Visibility-envelope fit V(tau) = V0 exp(-tau^2/T2*^2) (+ optional floor)."""
    finite = np.isfinite(data.y)
    clean = CurveData(data.x[finite], data.y[finite], data.y_err[finite],
                      data.x_label, data.y_label, data.meta)
    if clean.y.size and float(np.ptp(clean.y)) == 0.0:
        model = gaussian_envelope_model(include_floor)
        result = _finish(model, model.initial_guess(clean.x, clean.y),
                         np.full(len(model.param_names), np.nan), np.inf, 0, False,
                         "constant visibilities: envelope undetermined", clean.y.size)
        result.flags["constant_data"] = True
        return result
    result = fit_least_squares(gaussian_envelope_model(include_floor), clean)
    result.params[1] = abs(result.params[1])
    result.estimates["t2_star_ns"] = abs(result.estimates["t2_star_ns"])
    if clean.y.size < data.y.size:
        result.flags["dropped_points"] = int(data.y.size - clean.y.size)
    return result


def fit_lorentzian(data: CurveData) -> FitResult:
    """Single-line Lorentzian fit; dip data fit with negative amplitude, flagged."""
    result = fit_least_squares(lorentzian_model(), data)
    result.params[1] = abs(result.params[1])
    result.estimates["fwhm"] = abs(result.estimates["fwhm"])
    if result.estimates["amplitude"] < 0:
        result.flags["inverted_line"] = True
    return result


def fit_voigt(data: CurveData) -> FitResult:
    """Voigt line fit; reports the Olivero-Longbothum FWHM of the profile."""
    result = fit_least_squares(voigt_model(), data)
    result.params[1] = abs(result.params[1])
    result.params[2] = abs(result.params[2])
    sigma_g = abs(result.estimates["sigma_gauss"])
    fwhm_l = abs(result.estimates["fwhm_lorentz"])
    result.estimates["sigma_gauss"] = sigma_g
    result.estimates["fwhm_lorentz"] = fwhm_l
    result.estimates["fwhm_gauss"] = gaussian_fwhm_from_sigma(sigma_g)
    result.estimates["fwhm_voigt"] = voigt_fwhm_olivero(result.estimates["fwhm_gauss"], fwhm_l)
    result.units["fwhm_gauss"] = "x"
    result.units["fwhm_voigt"] = "x"
    if result.estimates["amplitude"] < 0:
        result.flags["inverted_line"] = True
    return result
