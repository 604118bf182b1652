"""Shared fixtures: published laser parameter sets and trap configurations"""

import numpy as np
import pytest

from eitcool.models import TrapConfig, TripodParams


@pytest.fixture
def fig1() -> TripodParams:
    """Level-scheme parameters: Omega_1 = 2.0, Omega_0 = 0.35, Delta_0 = Delta_1 = 4.47"""
    return TripodParams.fig1()


@pytest.fixture
def fig1_lambda() -> TripodParams:
    """fig1 with the sigma+ leg off (closed Lambda system)"""
    return TripodParams.fig1(omega_m1=0.0)


@pytest.fixture
def fig2() -> TripodParams:
    """Single-ion experiment parameters"""
    return TripodParams.fig2()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20241019)


@pytest.fixture
def five_ion_trap() -> TrapConfig:
    return TrapConfig.from_mhz(n_ions=5, ax_mhz=0.3, alpha_mhz=4.45, beta_mhz=4.30)


@pytest.fixture(autouse=True)
def sequential_grid(monkeypatch):
    """Keep worker pools out of unit tests unless a test asks for them"""
    from eitcool.config import settings

    monkeypatch.setattr(settings, "parallel", False)
