import math

import numpy as np
import pytest
from scipy import optimize

from eitcool.errors import UnstableChain
from eitcool.models import BeamKind, Branch, TrapConfig
from eitcool.physics.ion_chain import (
    axial_modes,
    equilibrium_positions,
    lamb_dicke_factors,
    scaled_equilibrium,
    single_ion_lamb_dicke,
    transverse_modes,
    zigzag_margin,
)

MHZ = 2.0 * math.pi * 1e6


def _mhz(values) -> np.ndarray:
    return np.asarray(values) / MHZ


# Equilibrium

def test_single_ion_sits_at_trap_centre():
    assert np.array_equal(scaled_equilibrium(1), [0.0])


def test_two_and_three_ion_positions():
    np.testing.assert_allclose(scaled_equilibrium(2), [-(0.25 ** (1 / 3)), 0.25 ** (1 / 3)], atol=1e-10)
    root = 1.25 ** (1 / 3)
    np.testing.assert_allclose(scaled_equilibrium(3), [-root, 0.0, root], atol=1e-10)


@pytest.mark.parametrize("n_ions", [4, 9, 20])
def test_equilibrium_is_sorted_and_symmetric(n_ions):
    u = scaled_equilibrium(n_ions)
    assert np.all(np.diff(u) > 0.0)
    np.testing.assert_allclose(u, -u[::-1], atol=1e-12)


def test_equilibrium_rejects_empty_chain():
    with pytest.raises(ValueError):
        scaled_equilibrium(0)


def test_positions_in_metres():
    trap = TrapConfig.from_mhz(n_ions=2, ax_mhz=1.0)
    z = equilibrium_positions(trap)
    assert z[1] - z[0] == pytest.approx(2.0 * 0.25 ** (1 / 3) * trap.length_scale)
    # A few micrometres for Yb+ at 1 MHz
    assert 1e-6 < z[1] - z[0] < 1e-5


# Normal modes

def test_two_ion_transverse_modes():
    trap = TrapConfig.from_mhz(n_ions=2, ax_mhz=1.0, alpha_mhz=4.45, beta_mhz=4.30)
    spectrum = transverse_modes(trap)
    np.testing.assert_allclose(
        _mhz(spectrum.frequencies[Branch.ALPHA]), [4.45, math.sqrt(4.45 ** 2 - 1.0)], rtol=1e-9
    )
    np.testing.assert_allclose(
        _mhz(spectrum.frequencies[Branch.BETA]), [4.30, math.sqrt(4.30 ** 2 - 1.0)], rtol=1e-9
    )
    np.testing.assert_allclose(spectrum.eigenvectors[Branch.ALPHA][:, 0], [math.sqrt(0.5)] * 2, atol=1e-12)
    labels = [(branch, index) for branch, index, _ in spectrum.all_frequencies()]
    assert labels == [("alpha", 0), ("alpha", 1), ("beta", 0), ("beta", 1)]


def test_transverse_modes_follow_axial_eigenvalues(five_ion_trap):
    spectrum = transverse_modes(five_ion_trap)
    axial, _ = axial_modes(five_ion_trap)
    mu = (axial / five_ion_trap.omega_ax) ** 2
    assert mu[:2] == pytest.approx([1.0, 3.0], rel=1e-9)
    for branch in (Branch.ALPHA, Branch.BETA):
        expected = np.sqrt(five_ion_trap.transverse_frequency(branch) ** 2 - (mu - 1.0) / 2.0 * five_ion_trap.omega_ax ** 2)
        np.testing.assert_allclose(spectrum.frequencies[branch], expected, rtol=1e-9)


def test_mode_vectors_orthonormal(five_ion_trap):
    spectrum = transverse_modes(five_ion_trap)
    for branch in (Branch.ALPHA, Branch.BETA):
        b = spectrum.eigenvectors[branch]
        np.testing.assert_allclose(b.T @ b, np.eye(5), atol=1e-10)
        assert np.all(np.diff(spectrum.frequencies[branch]) < 0.0)


def test_forty_ion_chain_needs_lower_axial_frequency():
    assert zigzag_margin(TrapConfig.from_mhz(n_ions=40, ax_mhz=0.29)) < 0.0
    with pytest.raises(UnstableChain):
        transverse_modes(TrapConfig.from_mhz(n_ions=40, ax_mhz=0.29))

    ax_mhz = optimize.brentq(
        lambda f: zigzag_margin(TrapConfig.from_mhz(n_ions=40, ax_mhz=f)) - 0.08, 0.05, 0.29, xtol=1e-9
    )
    spectrum = transverse_modes(TrapConfig.from_mhz(n_ions=40, ax_mhz=ax_mhz))
    assert len(spectrum.all_frequencies()) == 80
    assert spectrum.span / MHZ == pytest.approx(4.45 - 4.30 * math.sqrt(0.08), abs=1e-3)
    assert spectrum.span / MHZ > 3.0


def test_single_ion_margin_is_one():
    assert zigzag_margin(TrapConfig.from_mhz(n_ions=1, ax_mhz=1.0)) == pytest.approx(1.0)


def test_margin_falls_with_chain_length():
    margins = [zigzag_margin(TrapConfig.from_mhz(n_ions=n, ax_mhz=0.3)) for n in range(2, 41)]
    assert margins[0] == pytest.approx(1.0 - (0.3 / 4.30) ** 2)
    assert np.all(np.diff(margins) < 0.0)


# Lamb-Dicke factors

def test_single_ion_lamb_dicke_value():
    eta = single_ion_lamb_dicke(4.45 * MHZ, 2.0 * math.pi / 369.5e-9)
    assert eta == pytest.approx(0.0438, abs=1e-4)


def test_lamb_dicke_factors_single_ion():
    trap = TrapConfig.from_mhz(n_ions=1, ax_mhz=1.0)
    spectrum = transverse_modes(trap)
    eit = lamb_dicke_factors(spectrum, trap, BeamKind.EIT)
    raman = lamb_dicke_factors(spectrum, trap, BeamKind.RAMAN)
    k = trap.wavevector(BeamKind.EIT)
    for branch in (Branch.ALPHA, Branch.BETA):
        expected = single_ion_lamb_dicke(trap.transverse_frequency(branch), k) * trap.projection(branch)
        assert eit[branch][0, 0] == pytest.approx(expected, rel=1e-12)
    # Counter-propagating 355 nm pair
    ratio = raman[Branch.ALPHA][0, 0] / eit[Branch.ALPHA][0, 0]
    assert ratio == pytest.approx(2.0 * 369.5 / 355.0, rel=1e-12)


def test_lamb_dicke_sum_rule(five_ion_trap):
    spectrum = transverse_modes(five_ion_trap)
    factors = lamb_dicke_factors(spectrum, five_ion_trap, BeamKind.EIT)
    k = five_ion_trap.wavevector(BeamKind.EIT)
    for branch in (Branch.ALPHA, Branch.BETA):
        per_mode = np.sum(factors[branch] ** 2, axis=0)
        single = np.array([
            single_ion_lamb_dicke(w, k) * five_ion_trap.projection(branch)
            for w in spectrum.frequencies[branch]
        ])
        np.testing.assert_allclose(per_mode, single ** 2, rtol=1e-9)


def test_com_mode_couples_equally(five_ion_trap):
    spectrum = transverse_modes(five_ion_trap)
    factors = lamb_dicke_factors(spectrum, five_ion_trap, BeamKind.RAMAN)
    com = factors[Branch.BETA][:, 0]
    np.testing.assert_allclose(com, np.full(5, com[0]), rtol=1e-9)
