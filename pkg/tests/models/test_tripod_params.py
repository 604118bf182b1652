import math

import pytest
from pydantic import ValidationError

from eitcool.models import TripodParams


def test_published_parameter_sets(fig1, fig2):
    assert (fig1.omega_1, fig1.omega_0, fig1.omega_m1) == (2.0, 0.35, 0.7)
    assert fig1.two_photon_detuning == 0.0
    assert fig2.two_photon_detuning == pytest.approx(0.04)
    assert fig1.spectator_driven


def test_overrides_reach_presets():
    p = TripodParams.fig1(omega_m1=0.0)
    assert not p.spectator_driven
    assert p.omega_1 == 2.0


def test_zeeman_splitting_in_linewidths(fig1):
    assert fig1.zeeman_splitting == pytest.approx(7.7 / 19.6)


def test_from_mhz_scales_by_linewidth():
    p = TripodParams.from_mhz(
        gamma_mhz=20.0,
        omega_1=40.0, omega_0=10.0, omega_m1=0.0,
        delta_1=80.0, delta_0=82.0, delta_m1=70.0,
    )
    assert p.omega_1 == pytest.approx(2.0)
    assert p.delta_0 == pytest.approx(4.1)
    assert p.gamma == pytest.approx(2.0 * math.pi * 20e6)
    assert p.to_mhz()["delta_m1"] == pytest.approx(70.0)


def test_rabi_frequencies_must_be_non_negative():
    with pytest.raises(ValidationError):
        TripodParams.fig1(omega_0=-0.1)


def test_linewidth_must_be_positive():
    with pytest.raises(ValidationError):
        TripodParams.fig1(gamma=0.0)


def test_params_are_frozen(fig1):
    with pytest.raises(ValidationError):
        fig1.omega_1 = 3.0


def test_probe_detuning_copy(fig1):
    shifted = fig1.with_probe_detuning(4.6)
    assert shifted.delta_0 == 4.6
    assert fig1.delta_0 == 4.47
    assert shifted.delta_1 == fig1.delta_1


def test_updated_validates(fig1):
    assert fig1.updated(omega_1=1.5).omega_1 == 1.5
    with pytest.raises(ValidationError):
        fig1.updated(omega_1=-1.0)
