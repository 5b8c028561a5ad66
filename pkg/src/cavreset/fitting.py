"""Measurement-analysis models and their least-squares inverses.

Four analysis chains, each a forward model plus a fit:

* Ramsey trace with photon-induced dephasing and frequency shift; fitting
  it recovers the residual photon number n0 at the start of the scan.
* Plain exponential decay (log-linear fit), used for effective reset rates.
* ac-Stark spectroscopy: peak positions shifted by 2*chi*n map spectra back
  to photon numbers.
* Repeated-measurement backaction: geometric approach to a steady-state
  probability, parameterized by per-measurement leave/return rates.

Plus the steady-state response of the weakly nonlinear cavity (a real
cubic), which anchors the drive-voltage calibration fit.

Units here follow the data they fit: Ramsey times in us with angular rates
in rad/us; decay samples in ns with rates returned in ordinary MHz;
spectroscopy frequencies in ordinary MHz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import MHZ_TO_RAD_NS, DeviceParams, QubitState, chi_shift
from .errors import (
    ConfigError,
    DegenerateRates,
    InsufficientSamples,
    NoRealRoot,
    NonPositiveSample,
    PeakAtEdge,
)
from .optimize import LMResult, levenberg_marquardt


@dataclass
class FitResult:
    """Named parameters plus convergence metadata from one fit."""

    values: dict[str, float]
    residual_norm: float
    converged: bool
    iterations: int
    covariance_diag: dict[str, float] | None = None

    def to_dict(self) -> dict:
        return {
            "values": dict(self.values),
            "residual_norm": self.residual_norm,
            "converged": self.converged,
            "iterations": self.iterations,
            "covariance_diag": None
            if self.covariance_diag is None
            else dict(self.covariance_diag),
        }


# -- Ramsey ------------------------------------------------------------------


@dataclass(frozen=True)
class RamseyModel:
    """Ramsey signal parameters; all rates angular in rad/us.

    gamma2 is the dephasing rate 1/T2_echo; fringe the deliberate detuning
    of the Ramsey drive; chi and kappa describe the cavity whose leftover
    photons dephase and shift the qubit; n0 is the photon number when the
    scan starts.
    """

    gamma2: float
    fringe: float
    chi: float
    kappa: float
    phi0: float = 0.0
    n0: float = 0.0

    def __post_init__(self) -> None:
        if self.gamma2 < 0.0:
            raise ConfigError(f"gamma2 must be >= 0, got {self.gamma2}")
        if self.kappa <= 0.0:
            raise ConfigError(f"kappa must be > 0, got {self.kappa}")
        if self.n0 < 0.0:
            raise ConfigError(f"n0 must be >= 0, got {self.n0}")

    @classmethod
    def from_device(
        cls,
        params: DeviceParams,
        chi_source: str = "formula",
        fringe: float = 0.0,
        phi0: float = 0.0,
        n0: float = 0.0,
    ) -> "RamseyModel":
        """Fix gamma2, chi, kappa from device values (rad/us).

        chi is the per-photon qubit pull over two, (chi_1 - chi_0)/2: the
        qubit line moves by the full dressed splitting chi_1 - chi_0 per
        photon and the model's phase term carries the factor of two.
        """
        pull = 0.5 * (
            chi_shift(params, QubitState.EXCITED, chi_source)
            - chi_shift(params, QubitState.GROUND, chi_source)
        )
        return cls(
            gamma2=1.0 / params.t2_echo,
            fringe=fringe,
            chi=pull * 2.0 * math.pi,
            kappa=params.kappa * 2.0 * math.pi,
            phi0=phi0,
            n0=n0,
        )


def ramsey_forward(model: RamseyModel, t):
    """Ramsey signal S(t) for t in us (scalar or array), in [0, 1].

    S(t) = (1 - Im exp[-(gamma2 + i*fringe) t + i(phi0 - 2 n0 chi Z(t))]) / 2
    with Z(t) = (1 - exp(-(kappa + 2i chi) t)) / (kappa + 2i chi): the
    integrated cavity response that both dephases (via Im Z) and shifts
    (via Re Z) the qubit while the leftover field decays.
    """
    t = np.asarray(t, dtype=float)
    rate = model.kappa + 2j * model.chi
    z = (1.0 - np.exp(-rate * t)) / rate
    exponent = -(model.gamma2 + 1j * model.fringe) * t + 1j * (
        model.phi0 - 2.0 * model.n0 * model.chi * z
    )
    signal = 0.5 * (1.0 - np.imag(np.exp(exponent)))
    if signal.ndim == 0:
        return float(signal)
    return signal


def fit_ramsey(
    samples: Sequence[tuple[float, float]],
    fixed: Mapping[str, float],
    init: Mapping[str, float] | None = None,
) -> FitResult:
    """Recover (fringe, phi0, n0) from a Ramsey trace.

    fixed must supply gamma2, chi, kappa (rad/us); init may supply fringe,
    phi0, n0 starting values.  n0 is kept non-negative by fitting its
    square root.

    Raises:
        InsufficientSamples: fewer than 10 points or a span under 2/kappa.
    """
    pts = sorted((float(t), float(s)) for t, s in samples)
    if len(pts) < 10:
        raise InsufficientSamples(f"need >= 10 Ramsey samples, got {len(pts)}")
    times = np.array([p[0] for p in pts])
    data = np.array([p[1] for p in pts])
    for key in ("gamma2", "chi", "kappa"):
        if key not in fixed:
            raise ConfigError(f"fixed parameters must include {key}")
    span = float(times[-1] - times[0])
    if span < 2.0 / fixed["kappa"]:
        raise InsufficientSamples(
            f"Ramsey span {span:.4g} us under 2/kappa = {2.0 / fixed['kappa']:.4g} us"
        )
    init = dict(init or {})
    fringe0 = float(init.get("fringe", 0.0))
    phi0_0 = float(init.get("phi0", 0.0))
    n0_0 = max(float(init.get("n0", 0.5)), 1e-4)

    def residuals(p: np.ndarray) -> np.ndarray:
        model = RamseyModel(
            gamma2=fixed["gamma2"],
            fringe=p[0],
            chi=fixed["chi"],
            kappa=fixed["kappa"],
            phi0=p[1],
            n0=p[2] * p[2],
        )
        return ramsey_forward(model, times) - data

    lm = levenberg_marquardt(residuals, [fringe0, phi0_0, math.sqrt(n0_0)])
    u = float(lm.params[2])
    values = {"fringe": float(lm.params[0]), "phi0": float(lm.params[1]), "n0": u * u}
    cov = _named_covariance(lm, ("fringe", "phi0", "n0"), {"n0": (2.0 * u) ** 2})
    return FitResult(
        values=values,
        residual_norm=float(np.sum(lm.residuals**2)),
        converged=lm.success,
        iterations=lm.nfev,
        covariance_diag=cov,
    )


def _named_covariance(
    lm: LMResult, names: Sequence[str], jacobian_sq: Mapping[str, float] | None = None
) -> dict[str, float] | None:
    """Diagonal of the parameter covariance, reparameterizations unfolded."""
    cov = lm.covariance()
    if cov is None:
        return None
    diag = np.diag(cov)
    out = {}
    for k, name in enumerate(names):
        scale = 1.0 if jacobian_sq is None else jacobian_sq.get(name, 1.0)
        out[name] = float(diag[k] * scale)
    return out


# -- exponential decay ---------------------------------------------------------


def exp_decay_fit(samples: Sequence[tuple[float, float]]) -> FitResult:
    """Log-linear fit n(t) = n0 exp(-rate t) with t in ns.

    The returned rate is an ordinary frequency in MHz (the angular slope
    divided by 2*pi*1e-3), matching how cavity decay rates are quoted.

    Raises:
        NonPositiveSample: any n <= 0 (take the log first elsewhere).
        InsufficientSamples: fewer than 3 points.
    """
    pts = [(float(t), float(n)) for t, n in samples]
    if len(pts) < 3:
        raise InsufficientSamples(f"need >= 3 decay samples, got {len(pts)}")
    times = np.array([p[0] for p in pts])
    photons = np.array([p[1] for p in pts])
    if np.any(photons <= 0.0):
        raise NonPositiveSample("decay fit needs strictly positive photon numbers")
    logs = np.log(photons)
    coeffs = np.polyfit(times, logs, 1)
    slope, intercept = float(coeffs[0]), float(coeffs[1])
    fitted = np.polyval(coeffs, times)
    return FitResult(
        values={"n0": math.exp(intercept), "rate": -slope / MHZ_TO_RAD_NS},
        residual_norm=float(np.sum((fitted - logs) ** 2)),
        converged=True,
        iterations=0,
    )


# -- ac-Stark spectroscopy ------------------------------------------------------


def ac_stark_reconstruct(
    spectra: Sequence[tuple[float, Sequence[float], Sequence[float]]],
    chi: float,
    line_center: float,
) -> list[tuple[float, float]]:
    """Photon number per delay from shifted spectroscopy peaks.

    Each entry of spectra is (delay, frequencies, amplitudes); the peak is
    located by a 3-point quadratic interpolation around the maximum sample
    and converted via n = (f_peak - line_center) / (2 chi), all frequencies
    ordinary MHz.  Reconstructed values in [-0.05, 0) clamp to zero; larger
    negatives pass through so a broken model shows up in the output.

    Raises:
        PeakAtEdge: a sweep's maximum sits on its first or last point.
        InsufficientSamples: a sweep has fewer than 5 points.
    """
    if chi == 0.0:
        raise ConfigError("chi must be nonzero to invert the ac-Stark shift")
    out = []
    for delay, freqs, amps in spectra:
        f = np.asarray(freqs, dtype=float)
        a = np.asarray(amps, dtype=float)
        if f.size != a.size:
            raise ConfigError("frequency and amplitude arrays must match")
        if f.size < 5:
            raise InsufficientSamples(
                f"sweep at delay {delay} has {f.size} points, need >= 5"
            )
        k = int(np.argmax(a))
        if k == 0 or k == f.size - 1:
            raise PeakAtEdge(
                f"sweep at delay {delay} peaks at its {'first' if k == 0 else 'last'} point"
            )
        # vertex of the parabola through the three samples around the max
        quad = np.polyfit(f[k - 1 : k + 2], a[k - 1 : k + 2], 2)
        if quad[0] == 0.0:
            peak_freq = float(f[k])
        else:
            peak_freq = float(-quad[1] / (2.0 * quad[0]))
        n = (peak_freq - line_center) / (2.0 * chi)
        if -0.05 <= n < 0.0:
            n = 0.0
        out.append((float(delay), float(n)))
    return out


# -- repeated-measurement backaction ---------------------------------------------


@dataclass(frozen=True)
class BackactionModel:
    """Geometric relaxation of an occupation probability under measurement.

    gamma_out is the per-measurement probability of leaving the initial
    state, gamma_back of returning to it; p0 the probability at the first
    measurement.
    """

    gamma_out: float
    gamma_back: float
    p0: float

    def __post_init__(self) -> None:
        if self.gamma_out < 0.0 or self.gamma_back < 0.0:
            raise ConfigError("rates must be >= 0")
        if self.gamma_out + self.gamma_back >= 1.0:
            raise ConfigError("gamma_out + gamma_back must be < 1")

    @property
    def steady(self) -> float:
        """P_inf = gamma_back / (gamma_out + gamma_back)."""
        total = self.gamma_out + self.gamma_back
        if total == 0.0:
            raise DegenerateRates("steady state undefined at gamma_out = gamma_back = 0")
        return self.gamma_back / total


def backaction_forward(model: BackactionModel, m):
    """P_m for measurement index m >= 1 (scalar or array).

    P_m = (P0 - P_inf) (1 - gamma_out - gamma_back)^(m-1) + P_inf; with
    both rates zero nothing moves and P_m = P0 exactly.
    """
    m_arr = np.asarray(m)
    if np.any(m_arr < 1):
        raise ConfigError("measurement index starts at m = 1")
    total = model.gamma_out + model.gamma_back
    if total == 0.0:
        result = np.full(m_arr.shape, model.p0, dtype=float)
    else:
        steady = model.steady
        contrast = model.p0 - steady
        result = contrast * (1.0 - total) ** (m_arr - 1.0) + steady
    if result.ndim == 0:
        return float(result)
    return result


def _logit(p: float) -> float:
    p = min(max(p, 1e-9), 1.0 - 1e-9)
    return math.log(p / (1.0 - p))


def _sigmoid(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def fit_backaction(samples: Sequence[tuple[float, float]]) -> FitResult:
    """Recover (gamma_out, gamma_back, p0) from repeated-measurement data.

    Rates are kept in (0, 1) by a logistic reparameterization; starting
    values come from the data (tail mean for the steady state, log-slope of
    the deviations for the geometric ratio).  Constant data is degenerate:
    any gamma_out = gamma_back fits it, so that pair is returned with the
    steady state pinned to the constant.

    Raises:
        InsufficientSamples: fewer than 5 distinct m values.
    """
    pts = sorted((float(m), float(p)) for m, p in samples)
    m_vals = np.array([p[0] for p in pts])
    p_vals = np.array([p[1] for p in pts])
    if np.unique(m_vals).size < 5:
        raise InsufficientSamples("need >= 5 distinct measurement indices")

    tail = max(3, m_vals.size // 5)
    p_inf0 = float(np.mean(p_vals[-tail:]))
    p0_0 = float(p_vals[0])
    deviations = p_vals - p_inf0
    dev_scale = float(np.max(np.abs(deviations)))

    if dev_scale < 1e-12:
        # Flat sequence: started in the steady state, ratio unidentifiable.
        value = float(np.mean(p_vals))
        return FitResult(
            values={"gamma_out": 0.05, "gamma_back": 0.05, "p0": value},
            residual_norm=float(np.sum((p_vals - value) ** 2)),
            converged=True,
            iterations=0,
        )

    keep = np.abs(deviations) > 1e-3 * dev_scale
    if int(keep.sum()) >= 2:
        slope = float(np.polyfit(m_vals[keep], np.log(np.abs(deviations[keep])), 1)[0])
        ratio = min(max(math.exp(slope), 1e-6), 1.0 - 1e-6)
    else:
        ratio = 0.9
    gamma_sum = 1.0 - ratio
    gb0 = min(max(p_inf0 * gamma_sum, 1e-6), 0.5)
    go0 = min(max(gamma_sum - gb0, 1e-6), 0.5)

    def residuals(p: np.ndarray) -> np.ndarray:
        go = _sigmoid(p[0])
        gb = _sigmoid(p[1])
        total = go + gb
        steady = gb / total
        return (p[2] - steady) * (1.0 - total) ** (m_vals - 1.0) + steady - p_vals

    lm = levenberg_marquardt(residuals, [_logit(go0), _logit(gb0), p0_0])
    go = _sigmoid(float(lm.params[0]))
    gb = _sigmoid(float(lm.params[1]))
    values = {"gamma_out": go, "gamma_back": gb, "p0": float(lm.params[2])}
    cov = _named_covariance(
        lm,
        ("gamma_out", "gamma_back", "p0"),
        {"gamma_out": (go * (1.0 - go)) ** 2, "gamma_back": (gb * (1.0 - gb)) ** 2},
    )
    return FitResult(
        values=values,
        residual_norm=float(np.sum(lm.residuals**2)),
        converged=lm.success,
        iterations=lm.nfev,
        covariance_diag=cov,
    )


# -- Kerr steady state and drive calibration ----------------------------------------


def kerr_steady_state(
    params: DeviceParams,
    state: QubitState | int,
    drive_amp: float,
    chi_source: str = "formula",
) -> float:
    """Steady-state photon number of the (weakly) Kerr-shifted cavity.

    Solves n [4 (delta + K_c n)^2 + kappa^2] = 4 eps^2 (angular rad/ns
    throughout; delta = Delta_r + chi_j) for the smallest non-negative
    root: the low-photon branch reached by ringing up from vacuum.  The
    root is located by a scan for the first sign change, tightened by
    bisection, then polished by Newton steps.

    Raises:
        NoRealRoot: no bracket found (defensive; the physical sign pattern
            always yields one).
    """
    j = QubitState(state)
    eps = float(drive_amp)
    if eps < 0.0:
        raise ConfigError(f"drive amplitude must be >= 0, got {drive_amp}")
    if eps == 0.0:
        return 0.0
    delta = (params.detuning_r(chi_source) + chi_shift(params, j, chi_source)) * MHZ_TO_RAD_NS
    kappa = params.kappa * MHZ_TO_RAD_NS
    kc = params.kerr_coeff * MHZ_TO_RAD_NS
    if kc == 0.0:
        return 4.0 * eps * eps / (4.0 * delta * delta + kappa * kappa)

    def f(n: float) -> float:
        shifted = delta + kc * n
        return n * (4.0 * shifted * shifted + kappa * kappa) - 4.0 * eps * eps

    def df(n: float) -> float:
        shifted = delta + kc * n
        return 4.0 * shifted * shifted + kappa * kappa + 8.0 * n * shifted * kc

    upper = 8.0 * eps * eps / (kappa * kappa) if kappa > 0.0 else 1.0
    for _ in range(200):
        if f(upper) > 0.0:
            break
        upper *= 2.0
    else:
        raise NoRealRoot("no steady-state bracket found")

    # first sign change pins the lowest branch even when the cubic has
    # three real roots (bistable regime)
    grid = np.linspace(0.0, upper, 513)
    lo = 0.0
    hi = upper
    for left, right in zip(grid[:-1], grid[1:]):
        if f(float(right)) >= 0.0:
            lo, hi = float(left), float(right)
            break

    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    for _ in range(8):
        deriv = df(root)
        if deriv == 0.0:
            break
        step = f(root) / deriv
        candidate = root - step
        if candidate < 0.0 or not math.isfinite(candidate):
            break
        root = candidate
        if abs(step) < 1e-15 * max(root, 1.0):
            break
    return max(root, 0.0)


def fit_kerr_calibration(
    points: Sequence[tuple[float, float]],
    params: DeviceParams,
    state: QubitState | int = QubitState.GROUND,
    chi_source: str = "formula",
) -> FitResult:
    """Fit (volt_to_eps, kerr_khz) to steady-state (V^2, n) calibration data.

    The model is n = kerr_steady_state(eps = volt_to_eps * V) with the Kerr
    coefficient free, reported as an ordinary frequency in kHz.  The
    voltage scale is seeded from the low-power linear slope.

    Raises:
        InsufficientSamples: fewer than 6 points.
    """
    pts = sorted((float(v2), float(n)) for v2, n in points)
    if len(pts) < 6:
        raise InsufficientSamples(f"need >= 6 calibration points, got {len(pts)}")
    v2 = np.array([p[0] for p in pts])
    n_meas = np.array([p[1] for p in pts])
    if np.any(v2 < 0.0):
        raise ConfigError("squared voltages must be >= 0")
    j = QubitState(state)

    delta = (params.detuning_r(chi_source) + chi_shift(params, j, chi_source)) * MHZ_TO_RAD_NS
    kappa = params.kappa * MHZ_TO_RAD_NS
    low = slice(0, 3)
    nz = v2[low] > 0.0
    slope = float(np.mean(n_meas[low][nz] / v2[low][nz]))
    c0 = 0.5 * math.sqrt(max(slope, 1e-30) * (4.0 * delta * delta + kappa * kappa))

    volts = np.sqrt(v2)

    def residuals(p: np.ndarray) -> np.ndarray:
        scale, kerr_khz = float(p[0]), float(p[1])
        trial = params.with_(kerr_coeff=kerr_khz * 1e-3)
        model = np.array(
            [
                kerr_steady_state(trial, j, abs(scale) * v, chi_source)
                for v in volts
            ]
        )
        return model - n_meas

    lm = levenberg_marquardt(residuals, [c0, 0.0])
    values = {"volt_to_eps": abs(float(lm.params[0])), "kerr_khz": float(lm.params[1])}
    return FitResult(
        values=values,
        residual_norm=float(np.sum(lm.residuals**2)),
        converged=lm.success,
        iterations=lm.nfev,
        covariance_diag=_named_covariance(lm, ("volt_to_eps", "kerr_khz")),
    )
