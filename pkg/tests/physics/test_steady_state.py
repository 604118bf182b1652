import math

import numpy as np
import pytest

from eitcool.errors import NonUniqueSteadyState, StepTooLarge
from eitcool.models import IDX_E, TripodParams
from eitcool.physics.atom_model import build_hamiltonian
from eitcool.physics.steady_state import (
    DensityMatrix,
    absorption_spectrum,
    analytic_rho_ee,
    bright_resonance,
    build_liouvillian,
    cooling_bandwidth,
    cooling_bandwidth_series,
    evolve,
    excited_population,
    numeric_cooling_bandwidth,
    solve_steady_state,
    spectral_gap,
)

LASERS_OFF = dict(omega_1=0.0, omega_0=0.0, omega_m1=0.0, delta_1=0.0, delta_0=0.0, delta_m1=0.0)


def _random_density(rng: np.random.Generator) -> DensityMatrix:
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = a @ a.conj().T
    return DensityMatrix(rho / np.trace(rho))


def _random_tripod(rng: np.random.Generator) -> TripodParams:
    """Draw with every pair of detunings apart, so no ground-state pair goes dark"""
    while True:
        detunings = rng.uniform(1.0, 6.0, size=3)
        gaps = np.abs(detunings[:, None] - detunings[None, :])[np.triu_indices(3, k=1)]
        if np.all(gaps >= 0.3):
            break
    o1, o0, om1 = rng.uniform(0.1, 3.0, size=3)
    return TripodParams(
        omega_1=o1, omega_0=o0, omega_m1=om1,
        delta_1=detunings[0], delta_0=detunings[1], delta_m1=detunings[2],
    )


def _assert_evolve_agrees(p: TripodParams) -> None:
    l = build_liouvillian(p)
    rho_ss = solve_steady_state(l)
    # dt * ||L|| = 1 stays inside the RK4 stability bound
    dt = 1.0 / float(np.linalg.norm(l.matrix, 2))
    late = evolve(DensityMatrix.maximally_mixed(), l, 40.0 / spectral_gap(l), dt=dt)
    assert np.max(np.abs(late.entries - rho_ss.entries)) < 1e-8


# Liouvillian

def test_no_decay_spectrum_is_energy_differences(fig1):
    l = build_liouvillian(fig1, decay_rate=0.0)
    energies = np.linalg.eigvalsh(build_hamiltonian(fig1))
    expected = np.sort((energies[None, :] - energies[:, None]).ravel())
    eigenvalues = np.linalg.eigvals(l.matrix)
    np.testing.assert_allclose(np.real(eigenvalues), 0.0, atol=1e-10)
    np.testing.assert_allclose(np.sort(np.imag(eigenvalues)), expected, atol=1e-10)


def test_liouvillian_preserves_trace(fig1, rng):
    l = build_liouvillian(fig1)
    for _ in range(5):
        rho = _random_density(rng)
        assert abs(np.trace(l.apply(rho.entries))) < 1e-12


def test_liouvillian_spectrum_is_dissipative(fig2):
    eigenvalues = np.linalg.eigvals(build_liouvillian(fig2).matrix)
    assert np.max(np.real(eigenvalues)) == pytest.approx(0.0, abs=1e-10)
    assert spectral_gap(build_liouvillian(fig2)) > 0.0


def test_closed_lambda_follows_spectator(fig1, fig1_lambda):
    assert not build_liouvillian(fig1).closed_lambda
    assert build_liouvillian(fig1_lambda).closed_lambda
    assert build_liouvillian(fig1_lambda, closed_lambda=False).levels == (0, 1, 2, 3)


# Steady state

def test_steady_state_is_density_matrix(fig2):
    l = build_liouvillian(fig2)
    rho = solve_steady_state(l)
    assert rho.violations() == []
    assert np.linalg.norm(l.matrix @ rho.vec) < 1e-10
    assert 0.0 < rho.rho_ee < 0.5


def test_lasers_off_has_no_unique_steady_state():
    with pytest.raises(NonUniqueSteadyState) as info:
        solve_steady_state(build_liouvillian(TripodParams(**LASERS_OFF)))
    assert info.value.dimension > 1


def test_dark_resonance_empties_excited_state(fig1_lambda):
    assert excited_population(fig1_lambda) < 1e-8


def test_steady_state_agrees_with_long_evolution(rng):
    for _ in range(10):
        _assert_evolve_agrees(_random_tripod(rng))


@pytest.mark.slow
def test_steady_state_agrees_with_long_evolution_100_draws(rng):
    for _ in range(100):
        _assert_evolve_agrees(_random_tripod(rng))


# Time evolution

def test_spontaneous_decay_is_exponential():
    l = build_liouvillian(TripodParams(**LASERS_OFF), closed_lambda=False)
    rho = evolve(DensityMatrix.pure(IDX_E), l, 1.5)
    assert rho.rho_ee == pytest.approx(math.exp(-1.5), rel=1e-8)


def test_evolution_keeps_density_matrix_properties(fig1, rng):
    rho = evolve(_random_density(rng), build_liouvillian(fig1), 3.0)
    assert rho.violations(hermitian_tol=1e-10, trace_tol=1e-10, positivity_tol=1e-10) == []


def test_evolve_zero_time_returns_initial_state(fig1):
    rho0 = DensityMatrix.maximally_mixed()
    assert evolve(rho0, build_liouvillian(fig1), 0.0) is rho0


def test_evolve_rejects_unstable_step(fig1):
    with pytest.raises(StepTooLarge):
        evolve(DensityMatrix.maximally_mixed(), build_liouvillian(fig1), 20.0, dt=10.0)


def test_evolve_rejects_negative_time(fig1):
    with pytest.raises(ValueError):
        evolve(DensityMatrix.maximally_mixed(), build_liouvillian(fig1), -1.0)


# Absorption spectrum

def test_spectrum_has_dark_dip_and_bright_peak(fig1_lambda):
    grid = np.linspace(4.0, 5.2, 241)
    curve = absorption_spectrum(fig1_lambda, grid)
    assert curve.failed == []
    k_dark = int(np.argmin(np.abs(grid - fig1_lambda.delta_1)))
    assert curve.rho_ee[k_dark] < 1e-8
    assert grid[int(np.argmax(curve.rho_ee))] == pytest.approx(bright_resonance(fig1_lambda), abs=0.04)
    assert np.all((curve.rho_ee >= 0.0) & (curve.rho_ee <= 1.0))


def test_spectrum_without_probe_is_zero(fig1):
    curve = absorption_spectrum(fig1.updated(omega_0=0.0), np.linspace(3.5, 5.5, 21))
    assert np.all(curve.rho_ee < 1e-9)


def test_spectrum_rejects_empty_grid(fig1):
    with pytest.raises(ValueError):
        absorption_spectrum(fig1, [])


# Closed forms

def test_analytic_rho_ee_vanishes_at_two_photon_resonance(fig1):
    assert analytic_rho_ee(fig1) == 0.0
    assert analytic_rho_ee(fig1, simplified=True) == 0.0


@pytest.mark.parametrize("delta_0", [4.6, 4.68, 4.9, 5.2])
def test_weak_probe_formula_matches_master_equation(fig1_lambda, delta_0):
    p = fig1_lambda.updated(omega_0=0.02, delta_0=delta_0)
    assert analytic_rho_ee(p, simplified=True) == pytest.approx(excited_population(p), rel=0.05)


@pytest.mark.parametrize("delta_0", [4.6, 4.68, 4.9])
def test_full_formula_matches_master_equation(fig1_lambda, delta_0):
    p = fig1_lambda.updated(omega_0=0.1, delta_0=delta_0)
    assert analytic_rho_ee(p) == pytest.approx(excited_population(p), rel=0.1)


def test_cooling_bandwidth_values(fig1):
    assert cooling_bandwidth(fig1) == pytest.approx(0.175, abs=1e-3)
    assert cooling_bandwidth(fig1, exact=False) == pytest.approx(0.741, abs=1e-3)
    assert cooling_bandwidth_series(fig1) == pytest.approx(0.185, abs=1e-3)


def test_cooling_bandwidth_series_is_small_pump_limit(fig1):
    p = fig1.updated(omega_1=0.05)
    assert cooling_bandwidth(p) == pytest.approx(cooling_bandwidth_series(p), rel=1e-3)


def test_cooling_bandwidth_needs_blue_detuning(fig1):
    with pytest.raises(ValueError):
        cooling_bandwidth(fig1.updated(delta_1=-1.0, delta_0=-1.0))


def test_numeric_cooling_window_matches_closed_form(fig1_lambda):
    p = fig1_lambda.updated(omega_0=0.05)
    window = numeric_cooling_bandwidth(p)
    assert window.onset == pytest.approx(0.0384, abs=0.01)
    assert window.width == pytest.approx(cooling_bandwidth(p), rel=0.3)
