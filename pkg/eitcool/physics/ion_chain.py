"""Linear ion chain: equilibrium, normal modes and Lamb-Dicke factors.

Positions are solved in units of the length scale
l = (e^2 / (4 pi eps0 M w_ax^2))^(1/3), where the axial potential energy is
sum u_i^2 / 2 + sum_{i<j} 1 / |u_i - u_j| (in units of M w_ax^2 l^2).
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
from scipy import constants as cons
from scipy import optimize

from eitcool.config import tolerance
from eitcool.errors import NoConvergence, UnstableChain
from eitcool.models.chain import YB171_MASS, BeamKind, Branch, TrapConfig
from eitcool.utils import get_logger

logger = get_logger(__name__)


@dataclass
class ModeSpectrum:
    """
    Transverse normal modes of both branches.

    frequencies[branch][m] are angular frequencies in descending order (COM
    first); eigenvectors[branch][i, m] is the amplitude b_im of ion i in mode m.
    """
    n_ions: int
    positions: np.ndarray  # scaled equilibrium positions
    frequencies: Dict[Branch, np.ndarray]
    eigenvectors: Dict[Branch, np.ndarray]
    lamb_dicke: Dict[Branch, np.ndarray] = field(default_factory=dict)

    def all_frequencies(self) -> List[Tuple[str, int, float]]:
        """(branch, index within branch, frequency) for all 2N modes, highest first"""
        modes = [
            (branch.value, m, float(freq))
            for branch in (Branch.ALPHA, Branch.BETA)
            for m, freq in enumerate(self.frequencies[branch])
        ]
        return sorted(modes, key=lambda item: -item[2])

    @property
    def span(self) -> float:
        """Highest minus lowest transverse frequency over both branches"""
        freqs = np.concatenate([self.frequencies[b] for b in (Branch.ALPHA, Branch.BETA)])
        return float(np.max(freqs) - np.min(freqs))


def _separations(u: np.ndarray) -> np.ndarray:
    d = u[:, np.newaxis] - u[np.newaxis, :]
    np.fill_diagonal(d, np.inf)
    return d


def _potential(u: np.ndarray) -> float:
    d = np.abs(_separations(u))
    return 0.5 * float(np.sum(u ** 2)) + 0.5 * float(np.sum(1.0 / d))


def _gradient(u: np.ndarray) -> np.ndarray:
    d = _separations(u)
    return u - np.sum(np.sign(d) / d ** 2, axis=1)


def _coulomb_curvature(u: np.ndarray) -> np.ndarray:
    """K_ij = 1 / |u_i - u_j|^3 with zero diagonal"""
    return 1.0 / np.abs(_separations(u)) ** 3


def _hessian(u: np.ndarray) -> np.ndarray:
    k = _coulomb_curvature(u)
    h = -2.0 * k
    h[np.diag_indices_from(h)] = 1.0 + 2.0 * np.sum(k, axis=1)
    return h


def scaled_equilibrium(n_ions: int) -> np.ndarray:
    """
    Equilibrium positions in units of l.

    Raises:
        NoConvergence: force residual above tolerance after polishing
    """
    if n_ions < 1:
        raise ValueError(f"n_ions must be >= 1, got {n_ions}")
    if n_ions == 1:
        return np.zeros(1)

    # Uniform seed with the approximate minimum spacing 2 N^-0.56
    spacing = 2.0 * n_ions ** -0.56
    seed = (np.arange(n_ions) - (n_ions - 1) / 2.0) * spacing
    res = optimize.minimize(
        _potential,
        seed,
        method="trust-exact",
        jac=_gradient,
        hess=_hessian,
        options={"maxiter": tolerance("ion_chain", "max_iterations"), "gtol": 1e-10},
    )
    u = np.sort(res.x)

    gtol = tolerance("ion_chain", "gradient")
    for _ in range(tolerance("ion_chain", "newton_polish_steps")):
        g = _gradient(u)
        if np.linalg.norm(g) < gtol:
            break
        u = u - np.linalg.solve(_hessian(u), g)

    u = 0.5 * (u - u[::-1])
    residual = float(np.linalg.norm(_gradient(u)))
    if residual >= gtol:
        raise NoConvergence(f"equilibrium force residual {residual:.3g} for N = {n_ions}")
    logger.debug("equilibrium_found", n_ions=n_ions, residual=residual, iterations=res.nit)
    return u


def equilibrium_positions(cfg: TrapConfig) -> np.ndarray:
    """Sorted equilibrium positions in metres, symmetric about 0"""
    return scaled_equilibrium(cfg.n_ions) * cfg.length_scale


def transverse_matrix(u: np.ndarray, ratio: float) -> np.ndarray:
    """
    Transverse Hessian in units of M w_ax^2.

    B_ii = r^2 - sum_j 1/d_ij^3, B_ij = 1/d_ij^3, r = w_t / w_ax.
    """
    k = _coulomb_curvature(u)
    b = k.copy()
    b[np.diag_indices_from(b)] = ratio ** 2 - np.sum(k, axis=1)
    return b


def _sign_fixed(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column positive"""
    fixed = vectors.copy()
    for m in range(fixed.shape[1]):
        k = int(np.argmax(np.abs(fixed[:, m])))
        if fixed[k, m] < 0.0:
            fixed[:, m] = -fixed[:, m]
    return fixed


def _branch_modes(u: np.ndarray, ratio: float) -> Tuple[np.ndarray, np.ndarray]:
    """(eigenvalues, eigenvectors) in descending order"""
    eigenvalues, vectors = np.linalg.eigh(transverse_matrix(u, ratio))
    return eigenvalues[::-1], _sign_fixed(vectors[:, ::-1])


def transverse_modes(cfg: TrapConfig) -> ModeSpectrum:
    """
    Transverse normal modes of both branches from one axial equilibrium.

    Returns:
        ModeSpectrum with 2N modes, COM first in each branch

    Raises:
        UnstableChain: a squared mode frequency is <= 0 (zigzag)
    """
    u = scaled_equilibrium(cfg.n_ions)
    frequencies = {}
    eigenvectors = {}
    for branch in (Branch.ALPHA, Branch.BETA):
        ratio = cfg.transverse_frequency(branch) / cfg.omega_ax
        eigenvalues, vectors = _branch_modes(u, ratio)
        if eigenvalues[-1] <= 0.0:
            raise UnstableChain(
                f"{branch.value} branch: lowest squared frequency {eigenvalues[-1]:.4g} w_ax^2 "
                f"(N = {cfg.n_ions}); lower the axial frequency"
            )
        frequencies[branch] = cfg.omega_ax * np.sqrt(eigenvalues)
        eigenvectors[branch] = vectors

    spectrum = ModeSpectrum(n_ions=cfg.n_ions, positions=u, frequencies=frequencies, eigenvectors=eigenvectors)
    logger.info("transverse_modes_computed", n_ions=cfg.n_ions, span_mhz=spectrum.span / (2e6 * math.pi))
    return spectrum


def axial_modes(cfg: TrapConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Axial normal modes: angular frequencies ascending (COM first) and eigenvectors"""
    u = scaled_equilibrium(cfg.n_ions)
    eigenvalues, vectors = np.linalg.eigh(_hessian(u))
    return cfg.omega_ax * np.sqrt(eigenvalues), _sign_fixed(vectors)


def zigzag_margin(cfg: TrapConfig) -> float:
    """(lowest beta-branch frequency)^2 / w_beta^2; <= 0 means the linear chain is unstable"""
    u = scaled_equilibrium(cfg.n_ions)
    ratio = cfg.omega_beta / cfg.omega_ax
    eigenvalues = np.linalg.eigvalsh(transverse_matrix(u, ratio))
    return float(eigenvalues[0] / ratio ** 2)


def single_ion_lamb_dicke(mode_freq: float, wavevector: float, mass: float = YB171_MASS) -> float:
    """eta = k sqrt(hbar / (2 M w)) for unit projection"""
    return wavevector * math.sqrt(cons.hbar / (2.0 * mass * mode_freq))


def lamb_dicke_factors(
    spectrum: ModeSpectrum,
    cfg: TrapConfig,
    beam: BeamKind
) -> Dict[Branch, np.ndarray]:
    """
    Per-ion, per-mode Lamb-Dicke parameters.

    Args:
        spectrum: Transverse modes of the chain
        cfg: Trap and beam geometry
        beam: EIT (single-photon k) or Raman (|dk| = 2k)

    Returns:
        eta[branch][i, m] = k proj sqrt(hbar / (2 M w_m)) b_im
    """
    k = cfg.wavevector(beam)
    factors = {}
    for branch in (Branch.ALPHA, Branch.BETA):
        zero_point = np.sqrt(cons.hbar / (2.0 * cfg.ion_mass * spectrum.frequencies[branch]))
        factors[branch] = k * cfg.projection(branch) * spectrum.eigenvectors[branch] * zero_point[np.newaxis, :]
    return factors
