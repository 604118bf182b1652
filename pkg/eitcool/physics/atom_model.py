"""Tripod Hamiltonian, dressed-state decomposition and motional sideband coupling.

Energies and couplings are in units of Gamma. Dressed-state vectors live on
the effective Lambda subsystem with component order (|0>, |1>, |e>); every
eigenvector has its largest-magnitude component made real and positive.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from eitcool.config import settings, tolerance
from eitcool.errors import DegenerateSystem, TwoPhotonMismatch
from eitcool.models.tripod import IDX_0, IDX_1, IDX_E, IDX_M1, TripodParams
from eitcool.utils import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class DressedSystem:
    """Analytic eigensystem of the effective Lambda Hamiltonian"""
    e_dark: float
    e_bright_plus: float
    e_bright_minus: float
    dark_vec: np.ndarray
    bright_plus_vec: np.ndarray
    bright_minus_vec: np.ndarray
    omega_bar: float      # sqrt(Omega_0^2 + Omega_1^2)
    omega_prime: float    # sqrt(Delta^2 + Omega^2)
    delta: float
    omega_0: float
    omega_1: float
    # Unit factors applied to the textbook-convention vectors by the phase rule
    phases: Tuple[complex, complex, complex] = (1.0, 1.0, 1.0)

    @property
    def splitting(self) -> float:
        """E_B+ - E_D = (Omega' - Delta) / 2"""
        return self.e_bright_plus - self.e_dark

    @property
    def energies(self) -> np.ndarray:
        """(E_D, E_B+, E_B-)"""
        return np.array([self.e_dark, self.e_bright_plus, self.e_bright_minus])

    @property
    def basis(self) -> np.ndarray:
        """3x3 matrix with columns |D>, |B+>, |B->"""
        return np.column_stack([self.dark_vec, self.bright_plus_vec, self.bright_minus_vec])


@dataclass(frozen=True)
class NumericDressedSpectrum:
    """Eigensystem from direct diagonalization, eigenvalues ascending"""
    energies: np.ndarray
    vectors: np.ndarray  # columns, phase-fixed

    @property
    def composition(self) -> np.ndarray:
        """Bare-state weight |<bare|dressed>|^2; column k sums to 1"""
        return np.abs(self.vectors) ** 2


@dataclass(frozen=True)
class SidebandCoupling:
    """Effective dark to bright-plus sideband coupling"""
    omega_f: float       # units of Gamma
    eta: float
    splitting: float     # E_B+ - E_D, units of Gamma
    mode_freq: float     # units of Gamma

    @property
    def resonance_mismatch(self) -> float:
        """|E_B+ - E_D - omega|: how far the mode is from the dressed splitting"""
        return abs(self.splitting - self.mode_freq)


def fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate a vector so its largest-magnitude component is real positive (ties: lowest index)"""
    vec = np.asarray(vec, dtype=complex)
    k = int(np.argmax(np.abs(vec)))
    pivot = vec[k]
    if pivot == 0:
        return vec
    return vec * (np.conj(pivot) / abs(pivot))


def build_hamiltonian(p: TripodParams) -> np.ndarray:
    """
    Four-level atom-laser Hamiltonian without spontaneous emission.

    Args:
        p: Laser configuration

    Returns:
        4x4 complex Hermitian matrix over (|-1>, |0>, |1>, |e>) with the ground
        detunings on the diagonal and Omega_i / 2 between |i> and |e>
    """
    h = np.zeros((4, 4), dtype=complex)
    h[IDX_M1, IDX_M1] = p.delta_m1
    h[IDX_0, IDX_0] = p.delta_0
    h[IDX_1, IDX_1] = p.delta_1
    for idx, omega in ((IDX_M1, p.omega_m1), (IDX_0, p.omega_0), (IDX_1, p.omega_1)):
        h[idx, IDX_E] = omega / 2.0
        h[IDX_E, idx] = omega / 2.0
    return h


def lambda_hamiltonian(p: TripodParams) -> np.ndarray:
    """3x3 block over (|0>, |1>, |e>); the sigma+ leg is dropped"""
    full = build_hamiltonian(p)
    keep = [IDX_0, IDX_1, IDX_E]
    return full[np.ix_(keep, keep)]


def _radicals(delta: float, omega: float) -> Tuple[float, float, float]:
    """Omega', Omega' - Delta and Omega' + Delta without cancellation"""
    omega_prime = math.hypot(delta, omega)
    if delta >= 0.0:
        plus = omega_prime + delta
        minus = omega ** 2 / plus
    else:
        minus = omega_prime - delta
        plus = omega ** 2 / minus
    return omega_prime, minus, plus


def dressed_states(p: TripodParams, tolerance_gamma: Optional[float] = None) -> DressedSystem:
    """
    Analytic dark and bright states of the effective Lambda system.

    Args:
        p: Laser configuration; Omega_-1 is ignored
        tolerance_gamma: Allowed |Delta_0 - Delta_1|; defaults to settings

    Returns:
        DressedSystem with E_D = Delta and E_B+- = (Delta +- Omega') / 2

    Raises:
        DegenerateSystem: Omega_0 = Omega_1 = 0
        TwoPhotonMismatch: the Lambda legs are not two-photon resonant
    """
    tol = settings.two_photon_tolerance if tolerance_gamma is None else tolerance_gamma
    omega = math.hypot(p.omega_0, p.omega_1)
    if omega == 0.0:
        raise DegenerateSystem("Omega_0^2 + Omega_1^2 = 0")
    if abs(p.delta_0 - p.delta_1) > tol:
        raise TwoPhotonMismatch(
            f"|Delta_0 - Delta_1| = {abs(p.delta_0 - p.delta_1):.3g} exceeds {tol:.3g}; "
            "use numeric_dressed_states"
        )

    delta = p.delta_1
    omega_prime, minus, plus = _radicals(delta, omega)

    dark = np.array([p.omega_1, -p.omega_0, 0.0], dtype=complex) / omega
    bright_plus = np.array([p.omega_0, p.omega_1, minus], dtype=complex) / math.sqrt(2.0 * omega_prime * minus)
    bright_minus = np.array([-p.omega_0, -p.omega_1, plus], dtype=complex) / math.sqrt(2.0 * omega_prime * plus)

    fixed = [fix_phase(v) for v in (dark, bright_plus, bright_minus)]
    phases = tuple(
        complex(np.vdot(raw, new)) for raw, new in zip((dark, bright_plus, bright_minus), fixed)
    )

    return DressedSystem(
        e_dark=delta,
        e_bright_plus=(delta + omega_prime) / 2.0,
        e_bright_minus=(delta - omega_prime) / 2.0,
        dark_vec=fixed[0],
        bright_plus_vec=fixed[1],
        bright_minus_vec=fixed[2],
        omega_bar=omega,
        omega_prime=omega_prime,
        delta=delta,
        omega_0=p.omega_0,
        omega_1=p.omega_1,
        phases=phases,
    )


def numeric_dressed_states(p: TripodParams, lambda_only: bool = False) -> NumericDressedSpectrum:
    """
    Dressed states by direct Hermitian diagonalization.

    Works for any detunings (e.g. Delta_0 != Delta_1). With lambda_only the
    3x3 block over (|0>, |1>, |e>) is used, otherwise the full tripod.
    """
    h = lambda_hamiltonian(p) if lambda_only else build_hamiltonian(p)
    energies, vectors = np.linalg.eigh(h)
    fixed = np.column_stack([fix_phase(vectors[:, k]) for k in range(vectors.shape[1])])
    return NumericDressedSpectrum(energies=energies, vectors=fixed)


def inversion_matrix(ds: DressedSystem) -> np.ndarray:
    """
    Coefficients expressing the bare states in the dressed basis.

    Row k holds the amplitudes of |0>, |1>, |e> (k = 0, 1, 2) on
    (|D>, |B+>, |B->), so inversion_matrix(ds) @ ds.basis.T reproduces the
    identity.
    """
    omega = ds.omega_bar
    omega_0, omega_1 = ds.omega_0, ds.omega_1
    _, minus, plus = _radicals(ds.delta, omega)
    root = math.sqrt(2.0 * ds.omega_prime)

    textbook = np.array([
        [omega_1 / omega, omega_0 / (root * math.sqrt(minus)), -omega_0 / (root * math.sqrt(plus))],
        [-omega_0 / omega, omega_1 / (root * math.sqrt(minus)), -omega_1 / (root * math.sqrt(plus))],
        [0.0, omega / (root * math.sqrt(plus)), omega / (root * math.sqrt(minus))],
    ], dtype=complex)
    # Vectors were multiplied by phases; undo that on the coefficients
    return textbook * np.conj(np.array(ds.phases))[np.newaxis, :]


def effective_sideband_coupling(
    p: TripodParams,
    eta: float,
    mode_freq: float,
    nbar: Optional[float] = None
) -> SidebandCoupling:
    """
    Effective Rabi frequency of the |D, n> <-> |B+, n-1> sideband.

    Args:
        p: Laser configuration (Delta = Delta_1)
        eta: Lamb-Dicke parameter of the pump leg
        mode_freq: Motional frequency, units of Gamma
        nbar: Optional mean phonon number for the Lamb-Dicke advisory

    Returns:
        SidebandCoupling with Omega_f = -Omega_0 Omega_1 / sqrt(2 Omega' (Omega' + Delta))

    Raises:
        DegenerateSystem: Omega_0 = Omega_1 = 0
    """
    omega = math.hypot(p.omega_0, p.omega_1)
    if omega == 0.0:
        raise DegenerateSystem("Omega_0^2 + Omega_1^2 = 0")

    delta = p.delta_1
    omega_prime, minus, plus = _radicals(delta, omega)
    omega_f = -p.omega_0 * p.omega_1 / math.sqrt(2.0 * omega_prime * plus)

    if nbar is not None:
        ld = eta ** 2 * (nbar + 0.5)
        if ld > tolerance("atom_model", "lamb_dicke_advisory"):
            logger.warning("lamb_dicke_advisory", eta=eta, nbar=nbar, value=ld)

    return SidebandCoupling(omega_f=omega_f, eta=eta, splitting=minus / 2.0, mode_freq=mode_freq)


def dressed_sideband_matrix_element(p: TripodParams, eta: float) -> float:
    """
    <D| H_I |B+> of the |1>-|e> motional coupling (eta Omega_1 / 2)(|1><e| + h.c.),
    projected numerically on the diagonalized Lambda block.

    With the dressed-state phase rule this equals eta * Omega_f / 2 whenever
    the |0> amplitude dominates the dark state (Omega_1 >= Omega_0).
    """
    spectrum = numeric_dressed_states(p, lambda_only=True)
    vectors = spectrum.vectors
    # Dark state: the eigenvector with no excited-state amplitude
    k_dark = int(np.argmin(np.abs(vectors[2, :])))
    k_plus = int(np.argmax(spectrum.energies))
    coupling = np.zeros((3, 3), dtype=complex)
    coupling[1, 2] = eta * p.omega_1 / 2.0
    coupling[2, 1] = eta * p.omega_1 / 2.0
    element = np.vdot(vectors[:, k_dark], coupling @ vectors[:, k_plus])
    return float(np.real(element))


def lindblad_ops(gamma: float, closed_lambda: bool = False) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Collapse operators b_j = sqrt(gamma / 3) |j><e| for j = -1, 0, 1.

    Args:
        gamma: Total decay rate of |e> (any consistent unit)
        closed_lambda: Route the decay only into |0> and |1> (gamma / 2 each);
            the |-1> channel is then the zero matrix

    Returns:
        (b_-1, b_0, b_1), each 4x4
    """
    if gamma < 0.0:
        raise ValueError(f"decay rate must be non-negative, got {gamma}")
    ops = []
    for idx in (IDX_M1, IDX_0, IDX_1):
        b = np.zeros((4, 4), dtype=complex)
        if closed_lambda:
            if idx != IDX_M1:
                b[idx, IDX_E] = math.sqrt(gamma / 2.0)
        else:
            b[idx, IDX_E] = math.sqrt(gamma / 3.0)
        ops.append(b)
    return ops[0], ops[1], ops[2]
