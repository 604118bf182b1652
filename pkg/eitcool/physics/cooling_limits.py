"""Steady-state phonon limits, cooling rates, parameter scans and probe optimization"""

import math
from functools import partial
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from eitcool.config import tolerance
from eitcool.errors import NoMinimumInWindow, NotCooling, NumericError
from eitcool.models.cooling import CoolingDynamics, CoolingResult, ScanGrid, SpectatorScheme
from eitcool.models.tripod import TripodParams
from eitcool.physics.steady_state import excited_population
from eitcool.utils import get_logger

logger = get_logger(__name__)

RhoSource = Callable[[TripodParams], float]


def phonon_limit(
    p: TripodParams,
    mode_freq: float,
    eta: Optional[float] = None,
    rho_ee: Optional[RhoSource] = None
) -> CoolingResult:
    """
    Steady-state mean phonon number of one mode,

        n = [rho(D0) + rho(D0 - w)] / [rho(D0 + w) - rho(D0 - w)],

    with the sidebands evaluated by shifting only the probe detuning.

    Args:
        p: Laser configuration (carrier at p.delta_0)
        mode_freq: Mode frequency w, units of Gamma
        eta: Lamb-Dicke parameter; when given the result carries the rate
            W = eta^2 Gamma [rho(D0 + w) - rho(D0 - w)] in 1/s
        rho_ee: Source of rho_ee(p); defaults to the master-equation solver

    Returns:
        CoolingResult; cooling=False and nbar_ss=None when the denominator is <= 0
    """
    if mode_freq <= 0.0:
        raise ValueError(f"mode frequency must be positive, got {mode_freq}")
    source = rho_ee or excited_population

    carrier = source(p)
    red = source(p.with_probe_detuning(p.delta_0 - mode_freq))
    blue = source(p.with_probe_detuning(p.delta_0 + mode_freq))
    difference = blue - red

    cooling = difference > 0.0
    nbar = (carrier + red) / difference if cooling else None
    rate = eta ** 2 * p.gamma * difference if (eta is not None and cooling) else None

    if not cooling:
        logger.debug("not_cooling", mode_freq=mode_freq, delta_0=p.delta_0, difference=difference)

    return CoolingResult(
        mode_freq=mode_freq,
        delta0=p.delta_0,
        nbar_ss=nbar,
        cooling=cooling,
        rate=rate,
        rho_ee_carrier=carrier,
        rho_ee_red=red,
        rho_ee_blue=blue,
    )


def _limit_at_frequency(p: TripodParams, mode_freq: float) -> CoolingResult:
    return phonon_limit(p, mode_freq)


def _limit_at_probe(p: TripodParams, mode_freq: float, delta_0: float) -> CoolingResult:
    return phonon_limit(p.with_probe_detuning(delta_0), mode_freq)


def _drop_failures(results: List) -> List[Optional[CoolingResult]]:
    return [None if isinstance(r, NumericError) else r for r in results]


def cooling_curve(
    p: TripodParams,
    omega_grid: Sequence[float],
    jobs: Optional[int] = None
) -> List[Optional[CoolingResult]]:
    """Phonon limit across mode frequencies; None where the solver failed"""
    from eitcool.orchestrator import GridExecutor

    results = GridExecutor(jobs=jobs).map(partial(_limit_at_frequency, p), list(omega_grid), label="cooling_curve")
    return _drop_failures(results)


def probe_detuning_curve(
    p: TripodParams,
    mode_freq: float,
    delta0_grid: Sequence[float],
    jobs: Optional[int] = None
) -> List[Optional[CoolingResult]]:
    """Phonon limit of one mode versus probe detuning; None where the solver failed"""
    from eitcool.orchestrator import GridExecutor

    fn = partial(_limit_at_probe, p, mode_freq)
    results = GridExecutor(jobs=jobs).map(fn, list(delta0_grid), label="probe_detuning_curve")
    return _drop_failures(results)


def cooling_dynamics(
    p: TripodParams,
    eta: float,
    mode_freq: float,
    nbar0: float,
    t_grid: Sequence[float]
) -> CoolingDynamics:
    """
    Rate-equation approach n(t) = n_ss + (n0 - n_ss) exp(-W t).

    Args:
        p: Laser configuration
        eta: Lamb-Dicke parameter of the mode
        mode_freq: Mode frequency, units of Gamma
        nbar0: Initial mean phonon number (e.g. after Doppler cooling)
        t_grid: Times in seconds

    Returns:
        CoolingDynamics with W in 1/s

    Raises:
        NotCooling: W <= 0
    """
    if nbar0 < 0.0:
        raise ValueError(f"initial phonon number must be non-negative, got {nbar0}")
    ld = eta ** 2 * (nbar0 + 0.5)
    if ld > tolerance("atom_model", "lamb_dicke_advisory"):
        logger.warning("lamb_dicke_advisory", eta=eta, nbar=nbar0, value=ld)

    result = phonon_limit(p, mode_freq, eta=eta)
    if not result.cooling:
        raise NotCooling(
            f"heating dominates at w = {mode_freq:.4g}, Delta_0 = {p.delta_0:.4g} "
            f"(rho_blue - rho_red = {result.sideband_difference:.3g})"
        )

    rate = result.rate
    times = np.asarray(t_grid, dtype=float)
    nbar = result.nbar_ss + (nbar0 - result.nbar_ss) * np.exp(-rate * times)

    logger.info("cooling_dynamics_computed", rate=rate, nbar_ss=result.nbar_ss, e_folding_s=1.0 / rate)
    return CoolingDynamics(
        times=times.tolist(),
        nbar=nbar.tolist(),
        rate=rate,
        nbar_ss=result.nbar_ss,
        nbar0=nbar0,
    )


def _objective(p: TripodParams, mode_freq: float, delta_0: float) -> float:
    """Phonon limit as a minimization target; non-cooling points are +inf"""
    try:
        result = phonon_limit(p.with_probe_detuning(delta_0), mode_freq)
    except NumericError as e:
        logger.debug("optimizer_point_failed", delta_0=delta_0, error=str(e))
        return math.inf
    return result.nbar_ss if result.cooling else math.inf


def optimize_probe_detuning(
    p: TripodParams,
    mode_freq: float,
    search_window: Tuple[float, float],
    xtol: Optional[float] = None,
    prescan_points: Optional[int] = None
) -> Tuple[float, float]:
    """
    Probe detuning that minimizes the phonon limit of one mode.

    A coarse scan of the window brackets the best point, then golden-section
    search refines it.

    Args:
        p: Laser configuration (delta_0 is ignored)
        mode_freq: Mode frequency, units of Gamma
        search_window: (low, high) probe detunings, units of Gamma
        xtol: Absolute tolerance on Delta_0
        prescan_points: Size of the bracketing scan

    Returns:
        (Delta_0*, n*)

    Raises:
        NoMinimumInWindow: no point of the window cools
    """
    lo, hi = search_window
    if lo > hi:
        raise ValueError(f"search window must satisfy low <= high, got {search_window}")
    xtol = tolerance("cooling_limits", "golden_xtol") if xtol is None else xtol
    points = tolerance("cooling_limits", "prescan_points") if prescan_points is None else prescan_points
    objective = partial(_objective, p, mode_freq)

    if lo == hi:
        value = objective(lo)
        if math.isinf(value):
            raise NoMinimumInWindow(f"Delta_0 = {lo} does not cool w = {mode_freq}")
        return lo, value

    grid = np.linspace(lo, hi, max(points, 3))
    values = np.array([objective(d) for d in grid])
    if np.all(np.isinf(values)):
        raise NoMinimumInWindow(f"no cooling for w = {mode_freq} in [{lo}, {hi}]")

    j = int(np.argmin(values))
    if 0 < j < grid.size - 1:
        b = grid[j]
        # scipy's golden tolerance is relative to |x|
        rel = xtol / max(abs(b), 1e-12) / 2.0
        res = optimize.minimize_scalar(
            objective,
            bracket=(grid[j - 1], b, grid[j + 1]),
            method="golden",
            options={"xtol": rel},
        )
        best_x, best_f = float(res.x), float(res.fun)
    else:
        # Minimum on the window edge: refine between the edge and its neighbour
        k = 1 if j == 0 else grid.size - 2
        a, c = sorted((grid[j], grid[k]))
        res = optimize.minimize_scalar(objective, bounds=(a, c), method="bounded", options={"xatol": xtol})
        best_x, best_f = float(res.x), float(res.fun)
        if not best_f <= values[j]:
            best_x, best_f = float(grid[j]), float(values[j])

    logger.info("probe_detuning_optimized", mode_freq=mode_freq, delta_0=best_x, nbar=best_f)
    return best_x, best_f


def _optimize_row(
    mode_freq: float,
    window: Tuple[float, float],
    p: TripodParams
) -> Tuple[float, float]:
    return optimize_probe_detuning(p, mode_freq, window)


def _cell(item: Tuple[TripodParams, float]) -> Optional[float]:
    p, mode_freq = item
    result = phonon_limit(p, mode_freq)
    return result.nbar_ss


def scan_cooling(
    p_base: TripodParams,
    omega_axis: Sequence[float],
    rabi_axis: Sequence[float],
    optimize_probe: bool = True,
    scheme: SpectatorScheme = SpectatorScheme.BASE,
    com_freq: Optional[float] = None,
    search_window: Optional[Tuple[float, float]] = None,
    jobs: Optional[int] = None
) -> ScanGrid:
    """
    Phonon limit over (pump Rabi frequency, mode frequency).

    For every Omega_1 the sigma+ leg follows the scheme. With optimize_probe
    the probe detuning is first tuned to minimize the COM-mode limit.

    Args:
        p_base: Base configuration
        omega_axis: Mode frequencies, units of Gamma
        rabi_axis: Pump Rabi frequencies, units of Gamma
        optimize_probe: Optimize Delta_0 per row (else keep p_base.delta_0)
        scheme: sigma+ leg configuration
        com_freq: Mode used for the optimization; defaults to max(omega_axis),
            the COM mode when the axis ends at the top of the transverse band
        search_window: Delta_0 window; defaults to [Delta_1 - 0.1, Delta_1 + 0.3]
        jobs: Worker count

    Returns:
        ScanGrid whose None cells mark heating or failed solves
    """
    from eitcool.orchestrator import GridExecutor

    omega_axis = [float(w) for w in omega_axis]
    rabi_axis = [float(r) for r in rabi_axis]
    if not omega_axis or not rabi_axis:
        raise ValueError("scan axes must be nonempty")
    if min(omega_axis) <= 0.0 or min(rabi_axis) <= 0.0:
        raise ValueError("scan axes must be positive")

    executor = GridExecutor(jobs=jobs)
    rows = []
    for omega_1 in rabi_axis:
        delta_m1, omega_m1 = scheme.spectator(omega_1, p_base.delta_m1, p_base.omega_m1)
        rows.append(p_base.updated(omega_1=omega_1, delta_m1=delta_m1, omega_m1=omega_m1))

    optimal_delta0: List[Optional[float]] = []
    optimal_nbar: List[Optional[float]] = []
    if optimize_probe:
        com = max(omega_axis) if com_freq is None else com_freq
        window = search_window or (p_base.delta_1 - 0.1, p_base.delta_1 + 0.3)
        outcomes = executor.map(partial(_optimize_row, com, window), rows, label="scan_optimize")
        tuned = []
        for p_row, outcome in zip(rows, outcomes):
            if isinstance(outcome, NumericError):
                optimal_delta0.append(None)
                optimal_nbar.append(None)
                tuned.append(None)
            else:
                optimal_delta0.append(outcome[0])
                optimal_nbar.append(outcome[1])
                tuned.append(p_row.with_probe_detuning(outcome[0]))
    else:
        tuned = rows
        optimal_delta0 = [p.delta_0 for p in rows]
        optimal_nbar = [None for _ in rows]

    cells = [(p_row, w) for p_row in tuned if p_row is not None for w in omega_axis]
    flat = iter(executor.map(_cell, cells, label="scan_cells"))
    values: List[List[Optional[float]]] = []
    for p_row in tuned:
        if p_row is None:
            values.append([None] * len(omega_axis))
            continue
        row = []
        for _ in omega_axis:
            value = next(flat)
            row.append(None if isinstance(value, NumericError) else value)
        values.append(row)

    logger.info(
        "scan_completed",
        rows=len(rabi_axis),
        columns=len(omega_axis),
        scheme=scheme.value,
        heating_cells=sum(v is None for row in values for v in row),
    )
    return ScanGrid(
        omega_axis=omega_axis,
        rabi_axis=rabi_axis,
        values=values,
        optimal_delta0=optimal_delta0,
        optimal_nbar=optimal_nbar,
        scheme=scheme,
    )


def chain_cooling_limits(
    p: TripodParams,
    spectrum,
    gamma: Optional[float] = None,
    jobs: Optional[int] = None
) -> List[Tuple[str, int, Optional[CoolingResult]]]:
    """
    Phonon limit of every transverse mode of a chain.

    Args:
        p: Laser configuration
        spectrum: ModeSpectrum with angular mode frequencies (rad/s)
        gamma: Linewidth used to convert to units of Gamma; defaults to p.gamma

    Returns:
        (branch, mode index, result) for the 2N modes, highest frequency first
    """
    gamma = p.gamma if gamma is None else gamma
    modes = spectrum.all_frequencies()
    results = cooling_curve(p, [freq / gamma for _, _, freq in modes], jobs=jobs)
    return [(branch, index, result) for (branch, index, _), result in zip(modes, results)]
