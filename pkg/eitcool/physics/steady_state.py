"""Liouvillian, steady states, time evolution and absorption spectra.

Density matrices are vectorized by column stacking, vec(rho)[i + 4 j] =
rho[i, j], so vec(A rho B) = (B^T kron A) vec(rho). Time is in units of 1/Gamma.
"""

import math
from dataclasses import dataclass, field
from functools import partial
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from eitcool.config import settings, tolerance
from eitcool.errors import NoConvergence, NonUniqueSteadyState, NumericError, StepTooLarge
from eitcool.models.tripod import IDX_0, IDX_1, IDX_E, IDX_M1, TripodParams
from eitcool.physics.atom_model import build_hamiltonian, lindblad_ops
from eitcool.utils import get_logger

logger = get_logger(__name__)

DIM = 4
ALL_LEVELS = (IDX_M1, IDX_0, IDX_1, IDX_E)
LAMBDA_LEVELS = (IDX_0, IDX_1, IDX_E)


def _vec_index(i: int, j: int) -> int:
    return i + DIM * j


@dataclass(frozen=True)
class DensityMatrix:
    """4x4 density matrix over (|-1>, |0>, |1>, |e>)"""
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (DIM, DIM):
            raise ValueError(f"density matrix must be {DIM}x{DIM}, got {entries.shape}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_vec(cls, vec: np.ndarray) -> "DensityMatrix":
        """Inverse of column stacking"""
        return cls(np.asarray(vec, dtype=complex).reshape((DIM, DIM), order="F"))

    @classmethod
    def pure(cls, index: int) -> "DensityMatrix":
        """|index><index|"""
        entries = np.zeros((DIM, DIM), dtype=complex)
        entries[index, index] = 1.0
        return cls(entries)

    @classmethod
    def maximally_mixed(cls, levels: Sequence[int] = ALL_LEVELS) -> "DensityMatrix":
        """Equal populations on the given levels"""
        entries = np.zeros((DIM, DIM), dtype=complex)
        for k in levels:
            entries[k, k] = 1.0 / len(levels)
        return cls(entries)

    @property
    def vec(self) -> np.ndarray:
        return self.entries.flatten(order="F")

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.entries)).copy()

    @property
    def rho_ee(self) -> float:
        """Excited-state population"""
        return float(np.real(self.entries[IDX_E, IDX_E]))

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def violations(
        self,
        hermitian_tol: float = 1e-12,
        trace_tol: float = 1e-12,
        positivity_tol: float = 1e-10
    ) -> List[str]:
        """Names of the density-matrix properties this matrix breaks (empty when valid)"""
        problems = []
        scale = max(1.0, float(np.max(np.abs(self.entries))))
        if np.max(np.abs(self.entries - self.entries.conj().T)) > hermitian_tol * scale:
            problems.append("hermiticity")
        if abs(self.trace - 1.0) > trace_tol:
            problems.append("trace")
        hermitian_part = 0.5 * (self.entries + self.entries.conj().T)
        if np.min(np.linalg.eigvalsh(hermitian_part)) < -positivity_tol:
            problems.append("positivity")
        return problems


@dataclass(frozen=True)
class Liouvillian:
    """
    Generator of d vec(rho)/dt = L vec(rho).

    levels lists the states the dynamics can populate. With the spectator
    leg off (Omega_-1 = 0) the decay closes onto |0>, |1> and |-1> is left
    out, so the steady state is sought on the Lambda block only.
    """
    matrix: np.ndarray
    params: TripodParams
    decay_rate: float = 1.0
    closed_lambda: bool = False
    hamiltonian: Optional[np.ndarray] = None

    @property
    def levels(self) -> Tuple[int, ...]:
        return LAMBDA_LEVELS if self.closed_lambda else ALL_LEVELS

    @property
    def block_indices(self) -> np.ndarray:
        """vec indices of the coherences among the populated levels"""
        return np.array([_vec_index(i, j) for j in self.levels for i in self.levels])

    def block(self) -> np.ndarray:
        idx = self.block_indices
        return self.matrix[np.ix_(idx, idx)]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """L acting on a 4x4 matrix, returned as a 4x4 matrix"""
        vec = np.asarray(rho, dtype=complex).flatten(order="F")
        return (self.matrix @ vec).reshape((DIM, DIM), order="F")


@dataclass
class AbsorptionCurve:
    """rho_ee versus probe detuning; failed points hold NaN"""
    detunings: np.ndarray
    rho_ee: np.ndarray
    failed: List[int] = field(default_factory=list)

    def __post_init__(self):
        self.detunings = np.asarray(self.detunings, dtype=float)
        self.rho_ee = np.asarray(self.rho_ee, dtype=float)
        ok = np.isfinite(self.rho_ee)
        if np.any((self.rho_ee[ok] < 0.0) | (self.rho_ee[ok] > 1.0)):
            raise ValueError("rho_ee must lie in [0, 1]")


@dataclass(frozen=True)
class CoolingWindow:
    """Numeric cooling window measured from the carrier, units of Gamma"""
    onset: float        # first omega where rho_ee(D0 + w) = 2 rho_ee(D0 - w)
    bright_peak: float  # omega at the maximum of rho_ee(D0 + w)

    @property
    def width(self) -> float:
        return self.bright_peak - self.onset


def _superoperator_terms(h: np.ndarray, ops: Sequence[np.ndarray]) -> np.ndarray:
    eye = np.eye(DIM, dtype=complex)
    lv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for b in ops:
        bdb = b.conj().T @ b
        lv += np.kron(b.conj(), b) - 0.5 * np.kron(eye, bdb) - 0.5 * np.kron(bdb.T, eye)
    return lv


def build_liouvillian(
    p: TripodParams,
    decay_rate: float = 1.0,
    closed_lambda: Optional[bool] = None
) -> Liouvillian:
    """
    Coherent evolution plus the trace-preserving Lindblad dissipator.

    Args:
        p: Laser configuration
        decay_rate: Total decay of |e> in units of Gamma (0 gives the pure commutator)
        closed_lambda: Decay only into |0> and |1>; defaults to True when
            the sigma+ leg is off

    Returns:
        Liouvillian over column-stacked 4x4 density matrices
    """
    if closed_lambda is None:
        closed_lambda = not p.spectator_driven
    h = build_hamiltonian(p)
    ops = lindblad_ops(decay_rate, closed_lambda=closed_lambda)
    return Liouvillian(
        matrix=_superoperator_terms(h, ops),
        params=p,
        decay_rate=decay_rate,
        closed_lambda=closed_lambda,
        hamiltonian=h,
    )


def _finalize(vec: np.ndarray) -> DensityMatrix:
    rho = DensityMatrix.from_vec(vec).entries
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho / np.real(np.trace(rho)))


def _residual(l: Liouvillian, rho: DensityMatrix) -> float:
    return float(np.linalg.norm(l.matrix @ rho.vec))


def solve_steady_state(l: Liouvillian) -> DensityMatrix:
    """
    Unique steady state of a dissipative Liouvillian.

    The null-space dimension is read off the singular values first; a simple
    zero eigenvalue is then solved as the bordered system [L; tr] x = [0; 1].
    If the residual is too large the state is relaxed by time evolution over
    many inverse spectral gaps.

    Raises:
        NonUniqueSteadyState: null space dimension > 1
        NoConvergence: neither path reaches the residual tolerance
    """
    block = l.block()
    n = block.shape[0]
    singular = np.linalg.svd(block, compute_uv=False)
    s_max = singular[0]
    if s_max == 0.0:
        raise NonUniqueSteadyState(n)
    null_dim = int(np.sum(singular <= tolerance("steady_state", "rel_null") * s_max))
    if null_dim > 1:
        raise NonUniqueSteadyState(null_dim)

    size = len(l.levels)
    trace_row = np.zeros(n, dtype=complex)
    for k in range(size):
        trace_row[k + size * k] = 1.0
    bordered = np.vstack([block, trace_row])
    rhs = np.zeros(n + 1, dtype=complex)
    rhs[-1] = 1.0
    x = np.linalg.lstsq(bordered, rhs, rcond=None)[0]

    vec = np.zeros(DIM * DIM, dtype=complex)
    vec[l.block_indices] = x
    rho = _finalize(vec)
    residual = _residual(l, rho)
    limit = tolerance("steady_state", "residual")

    if residual > limit:
        logger.warning("steady_state_bordered_residual", residual=residual, limit=limit)
        horizon = tolerance("steady_state", "fallback_gaps") / spectral_gap(l)
        rho = _finalize(evolve(DensityMatrix.maximally_mixed(l.levels), l, horizon).vec)
        residual = _residual(l, rho)
        if residual > limit:
            raise NoConvergence(f"steady state residual {residual:.3g} exceeds {limit:.3g}")

    if "positivity" in rho.violations():
        raise NoConvergence("steady state has negative eigenvalues")

    logger.debug("steady_state_solved", residual=residual, rho_ee=rho.rho_ee)
    return rho


def _rk4_propagator(generator: np.ndarray, dt: float) -> np.ndarray:
    """One classic RK4 step of a linear system: sum_{k<=4} (dt L)^k / k!"""
    step = dt * generator
    propagator = np.eye(generator.shape[0], dtype=complex)
    term = np.eye(generator.shape[0], dtype=complex)
    for k in range(1, 5):
        term = term @ step / k
        propagator = propagator + term
    return propagator


def default_time_step(l: Liouvillian) -> float:
    """dt = dt_scale / max(1, ||H||_2) in units of 1/Gamma"""
    h = l.hamiltonian if l.hamiltonian is not None else build_hamiltonian(l.params)
    return tolerance("steady_state", "dt_scale") / max(1.0, float(np.linalg.norm(h, 2)))


def evolve(
    rho0: DensityMatrix,
    l: Liouvillian,
    t: float,
    dt: Optional[float] = None
) -> DensityMatrix:
    """
    Fixed-step RK4 integration of the master equation.

    Args:
        rho0: Initial state
        l: Liouvillian
        t: Final time, 1/Gamma
        dt: Step; defaults to default_time_step(l)

    Returns:
        rho(t); rho0 itself when t = 0

    Raises:
        StepTooLarge: dt * ||L||_2 outside the RK4 stability bound
    """
    if t < 0.0:
        raise ValueError(f"t must be non-negative, got {t}")
    if t == 0.0:
        return rho0
    dt = default_time_step(l) if dt is None else dt
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")

    norm = float(np.linalg.norm(l.matrix, 2))
    bound = tolerance("steady_state", "rk4_stability")
    if dt * norm > bound:
        raise StepTooLarge(f"dt * ||L|| = {dt * norm:.3g} exceeds {bound}")

    steps = int(math.floor(t / dt))
    remainder = t - steps * dt
    vec = rho0.vec
    if steps > 0:
        vec = np.linalg.matrix_power(_rk4_propagator(l.matrix, dt), steps) @ vec
    if remainder > 1e-15 * t:
        vec = _rk4_propagator(l.matrix, remainder) @ vec

    logger.debug("evolved", t=t, dt=dt, steps=steps)
    return DensityMatrix.from_vec(vec)


def spectral_gap(l: Liouvillian) -> float:
    """Smallest nonzero decay rate |Re lambda| of L on the populated block"""
    eigenvalues = np.linalg.eigvals(l.block())
    scale = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    threshold = tolerance("steady_state", "rel_null") * max(scale, 1.0)
    rates = np.abs(np.real(eigenvalues))
    rates = rates[rates > threshold]
    if rates.size == 0:
        raise NoConvergence("Liouvillian has no dissipative relaxation")
    return float(np.min(rates))


def excited_population(p: TripodParams) -> float:
    """Steady-state rho_ee from the full master equation"""
    return solve_steady_state(build_liouvillian(p)).rho_ee


def _rho_ee_at(p: TripodParams, delta_0: float) -> float:
    return excited_population(p.with_probe_detuning(delta_0))


def default_probe_grid(p: TripodParams) -> np.ndarray:
    half = settings.spectrum_half_width
    return np.linspace(p.delta_1 - half, p.delta_1 + half, settings.spectrum_points)


def absorption_spectrum(
    p: TripodParams,
    delta0_grid: Optional[Sequence[float]] = None,
    jobs: Optional[int] = None
) -> AbsorptionCurve:
    """
    Steady-state rho_ee across a probe-detuning grid.

    Points where the solver fails are recorded in AbsorptionCurve.failed and
    hold NaN; they never abort the sweep.
    """
    from eitcool.orchestrator import GridExecutor

    grid = default_probe_grid(p) if delta0_grid is None else np.asarray(delta0_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("probe-detuning grid is empty")
    if not np.all(np.isfinite(grid)):
        raise ValueError("probe-detuning grid must be finite")

    results = GridExecutor(jobs=jobs).map(partial(_rho_ee_at, p), grid.tolist(), label="absorption_spectrum")
    values = np.empty(grid.size)
    failed = []
    for i, r in enumerate(results):
        if isinstance(r, NumericError):
            values[i] = np.nan
            failed.append(i)
        else:
            values[i] = min(max(r, 0.0), 1.0)

    logger.info("absorption_spectrum_computed", points=int(grid.size), failed=len(failed))
    return AbsorptionCurve(detunings=grid, rho_ee=values, failed=failed)


def _clip_population(value: float, source: str) -> float:
    report = tolerance("steady_state", "clip_report")
    if value < -report or value > 1.0 + report:
        logger.warning("rho_ee_clipped", source=source, value=value)
    return min(max(value, 0.0), 1.0)


def analytic_rho_ee(p: TripodParams, simplified: bool = False) -> float:
    """
    Closed-form rho_ee of the effective Lambda system (Omega_-1 ignored).

    Args:
        p: Laser configuration
        simplified: Use the weak-probe limit
            2 D^2 Omega_0^2 / (D^2 + 4 (Omega_1^2 / 4 - D Delta_0)^2)

    Returns:
        rho_ee clipped to [0, 1]; exactly 0 at two-photon resonance
    """
    d = p.delta_0 - p.delta_1
    if d == 0.0:
        return 0.0
    gamma = 1.0
    o0, o1 = p.omega_0, p.omega_1

    if simplified:
        value = 2.0 * d ** 2 * o0 ** 2 / (d ** 2 * gamma ** 2 + 4.0 * (o1 ** 2 / 4.0 - d * p.delta_0) ** 2)
        return _clip_population(value, "simplified")

    if o0 == 0.0 or o1 == 0.0:
        return 0.0
    omega_sq = o0 ** 2 + o1 ** 2
    z = (
        8.0 * d ** 2 * o1 ** 2 * o0 ** 2 * gamma
        + 2.0 * d ** 2 * gamma ** 3 * omega_sq
        - 4.0 * p.delta_0 * d * o1 ** 4 * gamma
        + 0.5 * omega_sq ** 3 * gamma
        + 8.0 * d ** 2 * gamma * (p.delta_1 ** 2 * o0 ** 2 + p.delta_0 ** 2 * o1 ** 2)
        + 4.0 * p.delta_1 * d * o0 ** 4 * gamma
    )
    value = 4.0 * d ** 2 * o0 ** 2 * o1 ** 2 * gamma / z
    return _clip_population(value, "full")


def bright_resonance(p: TripodParams) -> float:
    """Probe detuning of the weak-probe bright-state maximum, (sqrt(D1^2 + O1^2) + D1) / 2"""
    return 0.5 * (math.hypot(p.delta_1, p.omega_1) + p.delta_1)


def cooling_bandwidth(p: TripodParams, exact: bool = True) -> float:
    """
    Cooling bandwidth from the sideband-dominance condition, units of Gamma.

    exact=True evaluates
    [2 (1 + sqrt2) D1 + sqrt(D1^2 + O1^2) - sqrt(((3 + 2 sqrt2) D1)^2 + O1^2)] / 2;
    exact=False the quoted small-Omega form (1 + sqrt2) / (3/2 + sqrt2) O1^2 / D1.
    """
    d1, o1 = p.delta_1, p.omega_1
    if d1 <= 0.0:
        raise ValueError(f"cooling bandwidth needs Delta_1 > 0, got {d1}")
    root2 = math.sqrt(2.0)
    if exact:
        c = 3.0 + 2.0 * root2
        return 0.5 * (2.0 * (1.0 + root2) * d1 + math.hypot(d1, o1) - math.hypot(c * d1, o1))
    return (1.0 + root2) / (1.5 + root2) * o1 ** 2 / d1


def cooling_bandwidth_series(p: TripodParams) -> float:
    """Leading small-Omega_1 term of the exact bandwidth: (sqrt2 - 1) / 2 * O1^2 / D1"""
    if p.delta_1 <= 0.0:
        raise ValueError(f"cooling bandwidth needs Delta_1 > 0, got {p.delta_1}")
    return (math.sqrt(2.0) - 1.0) / 2.0 * p.omega_1 ** 2 / p.delta_1


def numeric_cooling_bandwidth(
    p: TripodParams,
    points: int = 301,
    omega_min: float = 1e-3
) -> CoolingWindow:
    """
    Cooling window from the full master-equation spectrum around the carrier p.delta_0.

    The onset is the first root of rho_ee(D0 + w) - 2 rho_ee(D0 - w) scanning
    up from small w; the upper edge is the bright-state maximum of rho_ee(D0 + w).

    Raises:
        NoConvergence: no onset below the bright peak
    """
    carrier = p.delta_0
    omega_max = 2.0 * max(bright_resonance(p) - carrier, 0.05) + 0.5
    grid = np.linspace(omega_min, omega_max, points)

    def upper(w: float) -> float:
        return _rho_ee_at(p, carrier + w)

    def dominance(w: float) -> float:
        return upper(w) - 2.0 * _rho_ee_at(p, carrier - w)

    blue = np.array([upper(w) for w in grid])
    j = int(np.argmax(blue))
    lo, hi = grid[max(j - 1, 0)], grid[min(j + 1, points - 1)]
    peak = optimize.minimize_scalar(lambda w: -upper(w), bounds=(lo, hi), method="bounded",
                                    options={"xatol": 1e-8}).x

    f = np.array([dominance(w) for w in grid[: j + 1]])
    crossings = np.nonzero((f[:-1] < 0.0) & (f[1:] >= 0.0))[0]
    if crossings.size == 0:
        raise NoConvergence("no cooling onset below the bright resonance")
    k = int(crossings[0])
    onset = optimize.brentq(dominance, grid[k], grid[k + 1], xtol=1e-10)

    logger.debug("numeric_cooling_bandwidth", onset=onset, bright_peak=peak)
    return CoolingWindow(onset=float(onset), bright_peak=float(peak))
