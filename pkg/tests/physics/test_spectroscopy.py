import math

import numpy as np
import pytest
from scipy.signal import find_peaks

from eitcool.errors import InconsistentSigns, InsufficientData, RatioOutOfRange
from eitcool.models import BeamKind, Branch, TrapConfig
from eitcool.physics.ion_chain import lamb_dicke_factors, transverse_modes
from eitcool.physics.spectroscopy import (
    ac_stark_to_rabi,
    carrier_flop,
    chain_rabi_flops,
    debye_waller_rabi,
    fit_cooling_curve,
    fit_rabi,
    fit_rabi_chain,
    flop_contrast,
    nbar_to_ratio,
    rabi_to_ac_stark,
    ratio_to_nbar,
    sideband_pair,
    sideband_spectrum_model,
)

KHZ = 2.0 * math.pi * 1e3


def _rabi_data(a: float, b: float, p0: float, t: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 - (1.0 - a * (b * t) ** 2) * np.cos(b * t)) + p0


# Sideband ratios

def test_ratio_conversions():
    assert ratio_to_nbar(0.2) == pytest.approx(0.25)
    assert nbar_to_ratio(0.25) == pytest.approx(0.2)
    assert ratio_to_nbar(0.0) == 0.0


@pytest.mark.parametrize("ratio", [-0.1, 1.0, 1.5])
def test_ratio_out_of_range(ratio):
    with pytest.raises(RatioOutOfRange):
        ratio_to_nbar(ratio)


def test_negative_nbar_has_no_ratio():
    with pytest.raises(ValueError):
        nbar_to_ratio(-1.0)


def test_sideband_pair_error_propagation():
    pair = sideband_pair(4.45e6, p_lower=0.1, p_upper=0.5, sigma_lower=0.01, sigma_upper=0.02)
    assert pair.ratio == pytest.approx(0.2)
    assert pair.nbar == pytest.approx(0.25)
    sigma_ratio = math.hypot(0.01 / 0.5, 0.1 * 0.02 / 0.25)
    assert pair.nbar_err == pytest.approx(sigma_ratio / 0.8 ** 2)


def test_sideband_pair_without_errors():
    assert sideband_pair(1.0, 0.1, 0.5).nbar_err == 0.0


@pytest.mark.parametrize("p_lower,p_upper", [(0.5, 0.5), (0.6, 0.5), (0.1, 0.0)])
def test_sideband_pair_rejects_hot_or_empty(p_lower, p_upper):
    with pytest.raises(RatioOutOfRange):
        sideband_pair(1.0, p_lower, p_upper)


# Synthetic sideband spectra

def test_sideband_spectrum_resolves_every_mode(five_ion_trap):
    spectrum = transverse_modes(five_ion_trap)
    factors = lamb_dicke_factors(spectrum, five_ion_trap, BeamKind.RAMAN)
    grid = 2.0 * math.pi * np.linspace(4.1e6, 4.6e6, 50001)
    model = sideband_spectrum_model(
        spectrum, nbars=0.5, probe_rabi=0.5 * KHZ, duration=1e-3, width=KHZ,
        detunings=grid, lamb_dicke=factors,
    )
    peaks, _ = find_peaks(model.upper, height=0.01 * np.max(model.upper))
    assert peaks.size == 10
    np.testing.assert_allclose(np.sort(grid[peaks]), np.sort(model.centers), atol=2.0 * math.pi * 50.0)
    # Lower sidebands live at negative detunings
    assert np.max(model.lower) < 1e-12 * np.max(model.upper)


def test_sideband_heights_give_back_nbar(five_ion_trap):
    spectrum = transverse_modes(five_ion_trap)
    factors = lamb_dicke_factors(spectrum, five_ion_trap, BeamKind.RAMAN)
    centers = np.array([freq for _, _, freq in spectrum.all_frequencies()])
    model = sideband_spectrum_model(
        spectrum, nbars=0.5, probe_rabi=0.5 * KHZ, duration=1e-3, width=KHZ,
        detunings=np.concatenate([-centers, centers]), lamb_dicke=factors, ion=0,
    )
    n = centers.size
    for m in range(n):
        pair = sideband_pair(centers[m], model.lower[m], model.upper[n + m])
        assert pair.nbar == pytest.approx(0.5, rel=1e-6)


def test_sideband_spectrum_needs_lamb_dicke(five_ion_trap):
    with pytest.raises(ValueError):
        sideband_spectrum_model(transverse_modes(five_ion_trap), nbars=0.1, probe_rabi=KHZ, duration=1e-3, width=KHZ)


# AC Stark calibration

def test_ac_stark_conversions():
    assert rabi_to_ac_stark(2.0, 4.0) == pytest.approx(0.25)
    assert ac_stark_to_rabi(0.25, 4.0) == pytest.approx(2.0)
    assert ac_stark_to_rabi(-0.25, -4.0) == pytest.approx(2.0)


def test_ac_stark_sign_mismatch():
    with pytest.raises(InconsistentSigns):
        ac_stark_to_rabi(0.25, -4.0)


def test_ac_stark_needs_detuning():
    with pytest.raises(ValueError):
        rabi_to_ac_stark(1.0, 0.0)


# Debye-Waller flops

def test_debye_waller_suppression():
    assert debye_waller_rabi(1.0, [0.1, 0.2], [1.0, 0.0]) == pytest.approx(math.exp(-0.035))
    rows = debye_waller_rabi(2.0, [[0.1, 0.0], [0.0, 0.1]], [1.0, 3.0])
    np.testing.assert_allclose(rows, [2.0 * math.exp(-0.015), 2.0 * math.exp(-0.035)])


def test_flop_without_motion_is_pure_cosine():
    t = np.linspace(0.0, 10.0, 101)
    p = carrier_flop(1.3, [0.0, 0.0], [0.5, 0.5], t)
    np.testing.assert_allclose(p, 0.5 * (1.0 - np.cos(1.3 * t)), atol=1e-15)


def test_quadratic_contrast_matches_short_times():
    etas, nbars = np.array([0.05, 0.03]), np.array([2.0, 1.0])
    t = np.linspace(0.0, 5.0, 11)
    exact = flop_contrast(1.0, etas, nbars, t)
    approx = flop_contrast(1.0, etas, nbars, t, quadratic=True)
    np.testing.assert_allclose(approx, exact, atol=1e-6)


def _raman_chain_etas(n_ions: int, ax_mhz: float):
    trap = TrapConfig.from_mhz(n_ions=n_ions, ax_mhz=ax_mhz)
    spectrum = transverse_modes(trap)
    factors = lamb_dicke_factors(spectrum, trap, BeamKind.RAMAN)
    modes = spectrum.all_frequencies()
    etas = np.column_stack([factors[Branch(branch)][:, index] for branch, index, _ in modes])
    com = [k for k, (_, index, _) in enumerate(modes) if index == 0]
    return etas, com


def test_hot_chain_flops_dephase():
    etas, _ = _raman_chain_etas(36, 0.2)
    assert etas.shape == (36, 72)

    cold_rabi = debye_waller_rabi(1.0, etas, 0.1)
    hot_rabi = debye_waller_rabi(1.0, etas, 5.0)
    assert np.all(hot_rabi < cold_rabi)

    t = np.array([2.0 * math.pi * 20.0])
    cold = [flop_contrast(r, row, np.full(72, 0.1), t)[0] for r, row in zip(cold_rabi, etas)]
    hot = [flop_contrast(r, row, np.full(72, 5.0), t)[0] for r, row in zip(hot_rabi, etas)]
    assert np.all(np.array(hot) < np.array(cold))

    flops = chain_rabi_flops(1.0, etas, 5.0, np.linspace(0.0, 20.0, 201))
    assert flops.shape == (36, 201)
    assert np.all((flops >= 0.0) & (flops <= 1.0))


def test_broadband_cooling_gives_faster_chain_flops():
    etas, com = _raman_chain_etas(36, 0.2)
    assert len(com) == 2
    broadband = np.full(etas.shape[1], 0.1)
    com_only = np.full(etas.shape[1], 5.0)
    com_only[com] = 0.1

    t = np.linspace(0.0, 20.0, 200)
    fits_broadband = fit_rabi_chain(t, chain_rabi_flops(1.0, etas, broadband, t))
    fits_com_only = fit_rabi_chain(t, chain_rabi_flops(1.0, etas, com_only, t))
    assert all(f is not None for f in fits_broadband + fits_com_only)

    b_broadband = np.array([f.b for f in fits_broadband])
    b_com_only = np.array([f.b for f in fits_com_only])
    assert np.all(b_broadband > b_com_only)
    assert b_broadband.mean() > 1.02 * b_com_only.mean()
    np.testing.assert_allclose(b_broadband, debye_waller_rabi(1.0, etas, broadband), rtol=1e-3)


# Fits

def test_fit_rabi_recovers_parameters():
    t = np.linspace(0.0, 20.0, 200)
    fit = fit_rabi(t, _rabi_data(5e-4, 1.3, 0.01, t))
    assert fit.a == pytest.approx(5e-4, rel=1e-6)
    assert fit.b == pytest.approx(1.3, rel=1e-6)
    assert fit.p0 == pytest.approx(0.01, abs=1e-8)
    assert fit.residual < 1e-8


def test_fit_rabi_recovers_quadratic_flop():
    etas, nbars = np.array([0.1, 0.08]), np.array([3.0, 2.0])
    t = np.linspace(0.0, 20.0, 200)
    fit = fit_rabi(t, carrier_flop(1.5, etas, nbars, t, quadratic=True))
    assert fit.b == pytest.approx(debye_waller_rabi(1.5, etas, nbars), rel=1e-6)
    assert fit.a == pytest.approx(0.5 * np.sum(etas ** 4 * nbars ** 2), rel=1e-6)
    assert fit.p0 == pytest.approx(0.0, abs=1e-8)


def test_fit_rabi_accepts_unsorted_samples(rng):
    t = np.linspace(0.0, 20.0, 120)
    order = rng.permutation(t.size)
    y = _rabi_data(0.0, 0.9, 0.0, t)
    fit = fit_rabi(t[order], y[order])
    assert fit.b == pytest.approx(0.9, rel=1e-6)


def test_fit_rabi_needs_samples():
    t = np.linspace(0.0, 1.0, 5)
    with pytest.raises(InsufficientData):
        fit_rabi(t, np.zeros(5))


def test_fit_rabi_chain_per_ion():
    t = np.linspace(0.0, 20.0, 160)
    rows = np.vstack([_rabi_data(0.0, b, 0.0, t) for b in (0.8, 1.1)])
    fits = fit_rabi_chain(t, rows)
    assert [f.b for f in fits] == pytest.approx([0.8, 1.1], rel=1e-6)


def test_fit_cooling_curve_recovers_parameters():
    t = np.linspace(0.0, 1e-3, 30)
    nbar = 0.05 + (8.0 - 0.05) * np.exp(-t / 2e-4)
    fit = fit_cooling_curve(t, nbar)
    assert fit.tau == pytest.approx(2e-4, rel=1e-6)
    assert fit.nbar_ss == pytest.approx(0.05, abs=1e-6)
    assert fit.nbar0 == pytest.approx(8.0, rel=1e-6)
    assert fit.rate == pytest.approx((8.0 - 0.05) / 2e-4, rel=1e-5)
    assert not fit.degenerate


def test_fit_cooling_curve_constant_data_is_degenerate():
    fit = fit_cooling_curve([0.0, 1.0, 2.0, 3.0], [0.4, 0.4, 0.4, 0.4])
    assert fit.degenerate
    assert math.isnan(fit.tau)
    assert fit.nbar_ss == fit.nbar0 == pytest.approx(0.4)
    assert fit.rate == 0.0


def test_fit_cooling_curve_needs_samples():
    with pytest.raises(InsufficientData):
        fit_cooling_curve([0.0, 1.0, 2.0], [3.0, 2.0, 1.0])
