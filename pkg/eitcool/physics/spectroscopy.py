"""Thermometry: sideband ratios, synthetic sideband spectra, AC Stark calibration,
Debye-Waller carrier flops and least-squares fits of Rabi and cooling curves."""

import math
from dataclasses import dataclass
from functools import partial
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
from scipy import optimize

from eitcool.config import tolerance
from eitcool.errors import (
    FitDiverged,
    InconsistentSigns,
    InsufficientData,
    NumericError,
    RatioOutOfRange,
)
from eitcool.models.chain import Branch
from eitcool.models.thermometry import CoolingCurveFit, RabiFit, SidebandPair
from eitcool.utils import get_logger

logger = get_logger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]


# Sideband ratio thermometry

def ratio_to_nbar(r: float) -> float:
    """n = R / (1 - R) for the lower/upper sideband ratio R of a thermal state"""
    if r < 0.0 or r >= 1.0:
        raise RatioOutOfRange(f"sideband ratio must lie in [0, 1), got {r}")
    return r / (1.0 - r)


def nbar_to_ratio(nbar: float) -> float:
    """R = n / (n + 1)"""
    if nbar < 0.0:
        raise ValueError(f"mean phonon number must be non-negative, got {nbar}")
    return nbar / (nbar + 1.0)


def sideband_pair(
    mode_freq: float,
    p_lower: float,
    p_upper: float,
    sigma_lower: float = 0.0,
    sigma_upper: float = 0.0
) -> SidebandPair:
    """
    Mean phonon number and its propagated standard error from one pair of peaks.

    Args:
        mode_freq: Mode frequency, rad/s
        p_lower: Lower (red) sideband peak excitation
        p_upper: Upper (blue) sideband peak excitation
        sigma_lower: Standard error of p_lower
        sigma_upper: Standard error of p_upper

    Raises:
        RatioOutOfRange: p_upper = 0 or p_lower >= p_upper
    """
    if p_upper <= 0.0:
        raise RatioOutOfRange("upper sideband excitation must be positive")
    ratio = p_lower / p_upper
    nbar = ratio_to_nbar(ratio)
    sigma_ratio = math.hypot(sigma_lower / p_upper, p_lower * sigma_upper / p_upper ** 2)
    return SidebandPair(
        mode_freq=mode_freq,
        p_lower=p_lower,
        p_upper=p_upper,
        nbar=nbar,
        nbar_err=sigma_ratio / (1.0 - ratio) ** 2,
    )


@dataclass
class SidebandSpectrum:
    """Synthetic excitation versus detuning from the carrier (rad/s)"""
    detunings: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    centers: np.ndarray  # mode frequencies, highest first


def sideband_spectrum_model(
    spectrum,
    nbars: ArrayLike,
    probe_rabi: float,
    duration: float,
    width: float,
    detunings: Optional[Sequence[float]] = None,
    ion: Optional[int] = None,
    lamb_dicke: Optional[Dict[Branch, np.ndarray]] = None,
    points: int = 20001
) -> SidebandSpectrum:
    """
    Lower and upper sideband spectra of a chain as sums of Gaussian peaks.

    Mode m contributes strength s_m = (eta_m Omega t / 2)^2, with amplitude
    n_m s_m at -w_m (lower) and (n_m + 1) s_m at +w_m (upper). eta_m^2 is the
    mean over ions for a global beam, or that of one ion.

    Args:
        spectrum: ModeSpectrum
        nbars: Mean phonon number per mode in spectrum.all_frequencies() order, or one value for all
        probe_rabi: Probe Rabi frequency, rad/s
        duration: Probe duration, s
        width: Gaussian standard deviation, rad/s
        detunings: Evaluation grid; defaults to both sideband regions
        ion: Ion index for addressed probing
        lamb_dicke: eta matrices per branch; defaults to spectrum.lamb_dicke
        points: Size of the default grid

    Returns:
        SidebandSpectrum; lower/upper evaluated on the same grid
    """
    factors = lamb_dicke or spectrum.lamb_dicke
    if not factors:
        raise ValueError("Lamb-Dicke factors are required (lamb_dicke_factors)")

    modes = spectrum.all_frequencies()
    centers = np.array([freq for _, _, freq in modes])
    eta_sq = []
    for branch, index, _ in modes:
        column = factors[Branch(branch)][:, index]
        eta_sq.append(column[ion] ** 2 if ion is not None else float(np.mean(column ** 2)))
    strength = np.array(eta_sq) * (probe_rabi * duration / 2.0) ** 2

    nbar = np.broadcast_to(np.asarray(nbars, dtype=float), centers.shape)
    if np.any(nbar < 0.0):
        raise ValueError("mean phonon numbers must be non-negative")

    if centers.size > 1:
        spacing = float(np.min(np.abs(np.diff(np.sort(centers)))))
        if probe_rabi >= spacing:
            logger.warning("sideband_peaks_unresolved", probe_rabi=probe_rabi, min_spacing=spacing)

    if detunings is None:
        reach = float(np.max(centers)) + 6.0 * width
        grid = np.linspace(-reach, reach, points)
    else:
        grid = np.asarray(detunings, dtype=float)

    def peaks(sign: float, amplitudes: np.ndarray) -> np.ndarray:
        offsets = grid[:, np.newaxis] - sign * centers[np.newaxis, :]
        return np.sum(amplitudes[np.newaxis, :] * np.exp(-0.5 * (offsets / width) ** 2), axis=1)

    return SidebandSpectrum(
        detunings=grid,
        lower=peaks(-1.0, nbar * strength),
        upper=peaks(1.0, (nbar + 1.0) * strength),
        centers=centers,
    )


# AC Stark calibration

def rabi_to_ac_stark(rabi: float, detuning: float) -> float:
    """delta_ac = Omega^2 / (4 Delta)"""
    if detuning == 0.0:
        raise ValueError("detuning must be nonzero")
    return rabi ** 2 / (4.0 * detuning)


def ac_stark_to_rabi(delta_ac: float, detuning: float) -> float:
    """
    Omega = 2 sqrt(delta_ac Delta).

    Raises:
        InconsistentSigns: shift and detuning of opposite sign
    """
    if detuning == 0.0:
        raise ValueError("detuning must be nonzero")
    product = delta_ac * detuning
    if product < 0.0:
        raise InconsistentSigns(f"AC Stark shift {delta_ac} and detuning {detuning} differ in sign")
    return 2.0 * math.sqrt(product)


# Debye-Waller carrier flops

def _lamb_dicke_advisory(etas: np.ndarray, nbars: np.ndarray) -> None:
    worst = float(np.max(etas ** 2 * (nbars + 0.5))) if etas.size else 0.0
    if worst > tolerance("spectroscopy", "lamb_dicke_advisory"):
        logger.warning("lamb_dicke_advisory", value=worst)


def debye_waller_rabi(base_rabi: ArrayLike, etas: ArrayLike, nbars: ArrayLike) -> Union[float, np.ndarray]:
    """
    Carrier Rabi frequency suppressed by all modes, Omega exp(-sum_m eta_m^2 (n_m + 1/2)).

    etas is one row per ion (ions x modes) or a single per-mode vector; the
    result has one entry per ion, or is a scalar.
    """
    etas = np.asarray(etas, dtype=float)
    nbars = np.asarray(nbars, dtype=float)
    _lamb_dicke_advisory(etas, nbars)
    exponent = np.sum(etas ** 2 * (nbars + 0.5), axis=-1)
    result = np.asarray(base_rabi, dtype=float) * np.exp(-exponent)
    return float(result) if result.ndim == 0 else result


def flop_contrast(rabi: float, etas: np.ndarray, nbars: np.ndarray, t: np.ndarray, quadratic: bool = False) -> np.ndarray:
    """Contrast C(t) of one ion's carrier oscillation"""
    etas = np.asarray(etas, dtype=float)
    nbars = np.asarray(nbars, dtype=float)
    t = np.asarray(t, dtype=float)
    if quadratic:
        contrast = 1.0 - 0.5 * (rabi * t) ** 2 * np.sum(etas ** 4 * nbars ** 2)
    else:
        x = (etas ** 2 * nbars)[np.newaxis, :] * rabi * t[:, np.newaxis]
        contrast = np.prod(1.0 / np.sqrt(1.0 + x ** 2), axis=1)
    return np.clip(contrast, -1.0, 1.0)


def carrier_flop(
    base_rabi: float,
    etas: ArrayLike,
    nbars: ArrayLike,
    t_grid: Sequence[float],
    quadratic: bool = False
) -> np.ndarray:
    """
    P_up(t) = [1 - C(t) cos(Omega_bar t)] / 2 for one ion starting in |down>.

    Args:
        base_rabi: Bare carrier Rabi frequency
        etas: Per-mode Lamb-Dicke factors of the ion
        nbars: Per-mode mean phonon numbers
        t_grid: Times (inverse unit of base_rabi)
        quadratic: Use the short-time contrast 1 - (Omega_bar t)^2 sum eta^4 n^2 / 2

    Returns:
        Excitation probability at every time, in [0, 1]
    """
    t = np.asarray(t_grid, dtype=float)
    rabi = debye_waller_rabi(base_rabi, etas, nbars)
    contrast = flop_contrast(rabi, etas, nbars, t, quadratic=quadratic)
    return 0.5 * (1.0 - contrast * np.cos(rabi * t))


def chain_rabi_flops(
    base_rabi: float,
    lamb_dicke: np.ndarray,
    nbars: ArrayLike,
    t_grid: Sequence[float],
    quadratic: bool = False
) -> np.ndarray:
    """Carrier flops of every ion of a chain; lamb_dicke is ions x modes, result ions x times"""
    lamb_dicke = np.asarray(lamb_dicke, dtype=float)
    return np.vstack([
        carrier_flop(base_rabi, lamb_dicke[i], nbars, t_grid, quadratic=quadratic)
        for i in range(lamb_dicke.shape[0])
    ])


# Fits

def _rabi_model(params: np.ndarray, t: np.ndarray) -> np.ndarray:
    a, b, p0 = params
    bt = b * t
    return 0.5 * (1.0 - (1.0 - a * bt ** 2) * np.cos(bt)) + p0


def _dominant_frequency(t: np.ndarray, y: np.ndarray) -> float:
    """Angular frequency of the largest nonzero FFT peak (data resampled uniformly)"""
    uniform = np.linspace(t[0], t[-1], t.size)
    resampled = np.interp(uniform, t, y)
    spectrum = np.abs(np.fft.rfft(resampled - np.mean(resampled)))
    freqs = np.fft.rfftfreq(t.size, uniform[1] - uniform[0])
    k = 1 + int(np.argmax(spectrum[1:]))
    return 2.0 * math.pi * freqs[k]


def _linear_offset_and_decay(b: float, t: np.ndarray, y: np.ndarray, weights: np.ndarray):
    """For fixed B the model is linear in (P0, A); returns (A, P0, weighted SSE)"""
    bt = b * t
    target = (y - 0.5 * (1.0 - np.cos(bt))) * weights
    design = np.column_stack([np.ones_like(t), 0.5 * bt ** 2 * np.cos(bt)]) * weights[:, np.newaxis]
    coeffs, *_ = np.linalg.lstsq(design, target, rcond=None)
    sse = float(np.sum((design @ coeffs - target) ** 2))
    return coeffs[1], coeffs[0], sse


def _least_squares(residuals, x0: np.ndarray) -> np.ndarray:
    try:
        res = optimize.least_squares(
            residuals,
            x0,
            method="lm",
            xtol=tolerance("spectroscopy", "fit_xtol"),
            ftol=tolerance("spectroscopy", "fit_ftol"),
            gtol=tolerance("spectroscopy", "fit_gtol"),
            max_nfev=tolerance("spectroscopy", "max_nfev"),
        )
    except (ValueError, np.linalg.LinAlgError) as e:
        raise FitDiverged(str(e)) from e
    if not res.success or not np.all(np.isfinite(res.x)):
        raise FitDiverged(f"least squares stopped: {res.message}")
    return res.x


def _check_samples(t: np.ndarray, y: np.ndarray, minimum: int) -> None:
    if t.shape != y.shape or t.ndim != 1:
        raise ValueError("time and value arrays must be 1-D and of equal length")
    if t.size < minimum:
        raise InsufficientData(f"{t.size} samples, need at least {minimum}")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(y))):
        raise ValueError("samples must be finite")


def fit_rabi(
    t: Sequence[float],
    p_up: Sequence[float],
    sigma: Optional[Sequence[float]] = None,
    scan_points: int = 401
) -> RabiFit:
    """
    Fit P(t) = [1 - (1 - A (B t)^2) cos(B t)] / 2 + P0.

    B is seeded by the dominant FFT peak and refined by a scan in which
    (P0, A) are solved linearly, before Levenberg-Marquardt over all three.

    Raises:
        InsufficientData: fewer samples than the configured minimum
        FitDiverged: least squares did not converge
    """
    order = np.argsort(np.asarray(t, dtype=float))
    t = np.asarray(t, dtype=float)[order]
    y = np.asarray(p_up, dtype=float)[order]
    _check_samples(t, y, tolerance("spectroscopy", "min_rabi_samples"))
    weights = np.ones_like(t) if sigma is None else 1.0 / np.asarray(sigma, dtype=float)[order]

    b_seed = _dominant_frequency(t, y)
    if b_seed <= 0.0:
        raise FitDiverged("no oscillation found in the data")
    periods = b_seed * (t[-1] - t[0]) / (2.0 * math.pi)
    if periods < 1.5:
        logger.warning("rabi_fit_short_window", periods=periods)

    candidates = np.linspace(0.5 * b_seed, 1.5 * b_seed, scan_points)
    scores = [_linear_offset_and_decay(b, t, y, weights)[2] for b in candidates]
    b0 = float(candidates[int(np.argmin(scores))])
    a0, p00, _ = _linear_offset_and_decay(b0, t, y, weights)

    def residuals(params: np.ndarray) -> np.ndarray:
        return (_rabi_model(params, t) - y) * weights

    a, b, p0 = _least_squares(residuals, np.array([a0, b0, p00]))
    b = abs(b)
    rms = float(np.sqrt(np.mean((_rabi_model(np.array([a, b, p0]), t) - y) ** 2)))
    if not -0.5 <= p0 <= 0.5:
        raise FitDiverged(f"fitted offset {p0:.3g} outside [-0.5, 0.5]")

    logger.debug("rabi_fit", a=a, b=b, p0=p0, residual=rms)
    return RabiFit(a=float(a), b=float(b), p0=float(p0), residual=rms)


def _fit_row(t: np.ndarray, row: np.ndarray) -> RabiFit:
    return fit_rabi(t, row)


def fit_rabi_chain(
    t: Sequence[float],
    p_matrix: np.ndarray,
    jobs: Optional[int] = None
) -> List[Optional[RabiFit]]:
    """Per-ion Rabi fits of an ions x times matrix; None where a fit failed"""
    from eitcool.orchestrator import GridExecutor

    t = np.asarray(t, dtype=float)
    rows = [np.asarray(row, dtype=float) for row in np.atleast_2d(p_matrix)]
    results = GridExecutor(jobs=jobs).map(partial(_fit_row, t), rows, label="fit_rabi_chain")
    return [None if isinstance(r, NumericError) else r for r in results]


def _cooling_model(params: np.ndarray, s: np.ndarray) -> np.ndarray:
    tau, nbar_ss, nbar0 = params
    return nbar_ss + (nbar0 - nbar_ss) * np.exp(-s / tau)


def fit_cooling_curve(
    t: Sequence[float],
    nbar: Sequence[float],
    sigma: Optional[Sequence[float]] = None
) -> CoolingCurveFit:
    """
    Fit n(t) = n_ss + (n0 - n_ss) exp(-t / tau).

    Constant data cannot determine tau; the fit is then flagged degenerate
    with tau = NaN and n0 = n_ss = mean.

    Raises:
        InsufficientData: fewer samples than the configured minimum
        FitDiverged: least squares did not converge to tau > 0
    """
    order = np.argsort(np.asarray(t, dtype=float))
    t = np.asarray(t, dtype=float)[order]
    y = np.asarray(nbar, dtype=float)[order]
    _check_samples(t, y, tolerance("spectroscopy", "min_curve_samples"))
    weights = np.ones_like(t) if sigma is None else 1.0 / np.asarray(sigma, dtype=float)[order]

    spread = float(np.ptp(y))
    if spread <= tolerance("spectroscopy", "degenerate_spread") * max(1.0, float(np.max(np.abs(y)))):
        mean = float(np.mean(y))
        logger.warning("cooling_curve_degenerate", samples=int(t.size), value=mean)
        return CoolingCurveFit(
            tau=math.nan,
            nbar_ss=mean,
            nbar0=mean,
            residual=float(np.sqrt(np.mean((y - mean) ** 2))),
            degenerate=True,
        )

    t_scale = float(np.max(np.abs(t))) or 1.0
    s = t / t_scale
    nbar_ss0, nbar00 = float(y[-1]), float(y[0])
    # Seed tau at the first crossing of the 1/e level
    level = nbar_ss0 + (nbar00 - nbar_ss0) / math.e
    below = np.nonzero((y - level) * np.sign(nbar00 - nbar_ss0) <= 0.0)[0]
    tau0 = float(s[below[0]] - s[0]) if below.size and below[0] > 0 else 0.3
    tau0 = max(tau0, 1e-3)

    def residuals(params: np.ndarray) -> np.ndarray:
        return (_cooling_model(params, s) - y) * weights

    tau_s, nbar_ss, nbar0 = _least_squares(residuals, np.array([tau0, nbar_ss0, nbar00]))
    if tau_s <= 0.0:
        raise FitDiverged(f"fitted time constant {tau_s * t_scale:.3g} is not positive")

    tau = float(tau_s * t_scale)
    rms = float(np.sqrt(np.mean((_cooling_model(np.array([tau_s, nbar_ss, nbar0]), s) - y) ** 2)))
    logger.debug("cooling_curve_fit", tau=tau, nbar_ss=nbar_ss, nbar0=nbar0, residual=rms)
    return CoolingCurveFit(tau=tau, nbar_ss=float(nbar_ss), nbar0=float(nbar0), residual=rms)
