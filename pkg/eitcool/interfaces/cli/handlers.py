"""Command handlers: resolve parameters, call the physics modules, tabulate"""

import math
from typing import Any, Callable, Dict, Optional

import numpy as np

from eitcool.errors import ConfigError, NumericError
from eitcool.interfaces.cli.config_loader import ParamReader, load_samples
from eitcool.models import BeamKind, Branch, Command, CommandOutput, RunConfig, SpectatorScheme
from eitcool.physics.cooling_limits import (
    cooling_curve,
    cooling_dynamics,
    optimize_probe_detuning,
    phonon_limit,
    scan_cooling,
)
from eitcool.physics.ion_chain import lamb_dicke_factors, transverse_modes, zigzag_margin
from eitcool.physics.spectroscopy import fit_cooling_curve, fit_rabi, sideband_pair
from eitcool.physics.steady_state import absorption_spectrum, default_probe_grid, excited_population
from eitcool.utils import get_logger

logger = get_logger(__name__)

TO_ANGULAR_MHZ = 2.0 * math.pi * 1e6


def _finite(value: Optional[float]) -> Optional[float]:
    """None for missing or non-finite values (written as blank cells)"""
    if value is None or not math.isfinite(value):
        return None
    return float(value)


class CommandHandlers:
    """One handler per CLI command; each returns a CommandOutput"""

    def __init__(self, config: RunConfig):
        self.config = config
        self.reader = ParamReader(config)
        self.jobs = config.jobs

        self._handlers: Dict[Command, Callable[[], CommandOutput]] = {
            Command.SPECTRUM: self.cmd_spectrum,
            Command.COOLING_LIMIT: self.cmd_cooling_limit,
            Command.DYNAMICS: self.cmd_dynamics,
            Command.SCAN: self.cmd_scan,
            Command.OPTIMIZE: self.cmd_optimize,
            Command.CHAIN_MODES: self.cmd_chain_modes,
            Command.THERMOMETRY: self.cmd_thermometry,
            Command.RABI_FIT: self.cmd_rabi_fit,
        }

    def dispatch(self) -> CommandOutput:
        """Run the configured command"""
        logger.info("command_started", command=self.config.command.value)
        return self._handlers[self.config.command]()

    def _laser_params(self) -> Dict[str, Any]:
        p = self.reader.tripod()
        return {
            "gamma_mhz": self.reader.gamma_mhz,
            **p.model_dump(),
            "mhz": p.to_mhz(),
        }

    def cmd_spectrum(self) -> CommandOutput:
        """rho_ee versus probe detuning"""
        p = self.reader.tripod()
        grid = self.reader.grid("delta0")
        if grid is None:
            grid = default_probe_grid(p)

        curve = absorption_spectrum(p, grid, jobs=self.jobs)
        if len(curve.failed) == grid.size:
            # Re-raise the first point's failure
            excited_population(p.with_probe_detuning(float(grid[0])))

        rows = [
            [float(d), _finite(value)]
            for d, value in zip(curve.detunings, curve.rho_ee)
        ]
        return CommandOutput(
            columns=["delta0_over_gamma", "rho_ee"],
            rows=rows,
            summary={"points": int(grid.size), "failed": list(curve.failed)},
            resolved_params=self._laser_params(),
        )

    def cmd_cooling_limit(self) -> CommandOutput:
        """Phonon limit versus mode frequency at fixed lasers"""
        p = self.reader.tripod()
        grid = self.reader.grid("omega")
        if np.any(grid <= 0.0):
            raise ConfigError("omega grid: mode frequencies must be positive")

        results = cooling_curve(p, grid.tolist(), jobs=self.jobs)
        if all(r is None for r in results):
            phonon_limit(p, float(grid[0]))

        rows = []
        for w, result in zip(grid, results):
            nbar = result.nbar_ss if result is not None else None
            cooling = result.cooling if result is not None else None
            rows.append([float(w), float(w) * self.reader.gamma_mhz, nbar, cooling])
        return CommandOutput(
            columns=["omega_over_gamma", "omega_MHz", "nbar", "cooling"],
            rows=rows,
            summary={
                "failed": [i for i, r in enumerate(results) if r is None],
                "heating": [i for i, r in enumerate(results) if r is not None and not r.cooling],
            },
            resolved_params=self._laser_params(),
        )

    def cmd_dynamics(self) -> CommandOutput:
        """nbar(t) of one mode from the rate equation"""
        p = self.reader.tripod()
        mode_freq = self.reader.frequency("mode_freq")
        eta = self.reader.scalar("eta")
        nbar0 = self.reader.scalar("nbar0", 10.0)
        if mode_freq <= 0.0:
            raise ConfigError("mode_freq must be positive")
        t_us = self.reader.grid("t")

        try:
            result = cooling_dynamics(p, eta, mode_freq, nbar0, (t_us * 1e-6).tolist())
        except ValueError as e:
            raise ConfigError(str(e)) from None

        rows = [[float(t), nbar] for t, nbar in zip(t_us, result.nbar)]
        return CommandOutput(
            columns=["t_us", "nbar"],
            rows=rows,
            summary={
                "rate_per_s": result.rate,
                "tau_us": result.e_folding_time * 1e6,
                "nbar_ss": result.nbar_ss,
                "initial_rate_quanta_per_s": result.initial_rate,
            },
            resolved_params={**self._laser_params(), "mode_freq": mode_freq, "eta": eta, "nbar0": nbar0},
        )

    def _window(self, default: Optional[tuple] = None) -> Optional[tuple]:
        low = self.reader.frequency("window_low")
        high = self.reader.frequency("window_high")
        if low is None and high is None:
            return default
        if low is None or high is None:
            raise ConfigError("window_low and window_high must be given together")
        if low > high:
            raise ConfigError(f"search window must satisfy low <= high, got [{low}, {high}]")
        return low, high

    def cmd_scan(self) -> CommandOutput:
        """Phonon limit over pump Rabi frequency and mode frequency"""
        p = self.reader.tripod()
        omega_axis = self.reader.grid("omega")
        rabi_axis = self.reader.grid("rabi1")
        try:
            scheme = SpectatorScheme(self.reader.scalar("scheme", SpectatorScheme.BASE.value))
        except ValueError:
            choices = ", ".join(s.value for s in SpectatorScheme)
            raise ConfigError(f"scheme: choose one of {choices}") from None
        optimize_probe = self.reader.scalar("optimize_probe", True)

        try:
            grid = scan_cooling(
                p,
                omega_axis.tolist(),
                rabi_axis.tolist(),
                optimize_probe=optimize_probe,
                scheme=scheme,
                com_freq=self.reader.frequency("com_freq"),
                search_window=self._window(),
                jobs=self.jobs,
            )
        except ValueError as e:
            raise ConfigError(str(e)) from None

        rows = []
        for rabi, delta0, values in zip(grid.rabi_axis, grid.optimal_delta0, grid.values):
            for w, nbar in zip(grid.omega_axis, values):
                rows.append([rabi, w, nbar, delta0])
        return CommandOutput(
            columns=["rabi1_over_gamma", "omega_over_gamma", "nbar", "optimal_delta0_over_gamma"],
            rows=rows,
            summary={
                "scheme": scheme.value,
                "row_minimum": grid.row_minimum(),
                "low_window_width_over_gamma": grid.low_window_width(),
                "optimal_nbar": grid.optimal_nbar,
            },
            resolved_params=self._laser_params(),
        )

    def cmd_optimize(self) -> CommandOutput:
        """Best probe detuning for one mode"""
        p = self.reader.tripod()
        mode_freq = self.reader.frequency("mode_freq")
        if mode_freq <= 0.0:
            raise ConfigError("mode_freq must be positive")
        window = self._window()

        delta0, nbar = optimize_probe_detuning(
            p, mode_freq, window, prescan_points=self.reader.scalar("prescan_points")
        )
        return CommandOutput(
            columns=["delta0_over_gamma", "nbar"],
            rows=[[delta0, nbar]],
            summary={"delta0_MHz": delta0 * self.reader.gamma_mhz},
            resolved_params={**self._laser_params(), "mode_freq": mode_freq, "search_window": list(window)},
        )

    def cmd_chain_modes(self) -> CommandOutput:
        """Transverse modes of a chain with per-ion EIT and Raman Lamb-Dicke factors"""
        cfg = self.reader.trap()
        spectrum = transverse_modes(cfg)
        eit = lamb_dicke_factors(spectrum, cfg, BeamKind.EIT)
        raman = lamb_dicke_factors(spectrum, cfg, BeamKind.RAMAN)

        ions = range(cfg.n_ions)
        columns = (
            ["branch", "index", "freq_MHz"]
            + [f"eta_eit_ion{i}" for i in ions]
            + [f"eta_raman_ion{i}" for i in ions]
        )
        rows = []
        for branch_name, m, freq in spectrum.all_frequencies():
            branch = Branch(branch_name)
            rows.append(
                [branch_name, m, freq / TO_ANGULAR_MHZ]
                + [float(v) for v in eit[branch][:, m]]
                + [float(v) for v in raman[branch][:, m]]
            )
        return CommandOutput(
            columns=columns,
            rows=rows,
            summary={
                "modes": len(rows),
                "span_MHz": spectrum.span / TO_ANGULAR_MHZ,
                "zigzag_margin": zigzag_margin(cfg),
                "positions_um": (spectrum.positions * cfg.length_scale * 1e6).tolist(),
            },
            resolved_params=cfg.model_dump(),
        )

    def cmd_thermometry(self) -> CommandOutput:
        """Sideband-ratio nbar, or a cooling-curve fit when data is given"""
        data = self.reader.scalar("data")
        if data is not None:
            return self._cooling_curve_fit(data)

        missing = [k for k in ("mode_mhz", "p_lower", "p_upper") if self.reader.scalar(k) is None]
        if missing:
            raise ConfigError(f"thermometry needs data or {', '.join(missing)}")
        mode_mhz = self.reader.scalar("mode_mhz")
        pair = sideband_pair(
            mode_mhz * TO_ANGULAR_MHZ,
            self.reader.scalar("p_lower"),
            self.reader.scalar("p_upper"),
            self.reader.scalar("sigma_lower", 0.0),
            self.reader.scalar("sigma_upper", 0.0),
        )
        return CommandOutput(
            columns=["mode_MHz", "ratio", "nbar", "nbar_err"],
            rows=[[mode_mhz, pair.ratio, pair.nbar, pair.nbar_err]],
            summary={"nbar": pair.nbar},
            resolved_params=dict(self.config.values),
        )

    def _cooling_curve_fit(self, data: str) -> CommandOutput:
        t_us, nbar, sigma = load_samples(data)
        fit = fit_cooling_curve(t_us, nbar, sigma)
        rate = fit.rate * 1e6
        return CommandOutput(
            columns=["tau_us", "nbar_ss", "nbar0", "rate_quanta_per_s", "degenerate"],
            rows=[[_finite(fit.tau), fit.nbar_ss, fit.nbar0, rate, fit.degenerate]],
            summary={"residual": fit.residual, "samples": int(t_us.size)},
            resolved_params=dict(self.config.values),
        )

    def cmd_rabi_fit(self) -> CommandOutput:
        """Fit a carrier Rabi flop (t in us); B is reported as B / 2pi in MHz"""
        t_us, p_up, sigma = load_samples(self.reader.scalar("data"))
        fit = fit_rabi(t_us, p_up, sigma)
        return CommandOutput(
            columns=["A", "B_MHz", "P0", "residual"],
            rows=[[fit.a, fit.b / (2.0 * math.pi), fit.p0, fit.residual]],
            summary={"samples": int(t_us.size), "b_rad_per_us": fit.b},
            resolved_params=dict(self.config.values),
        )


def execute(config: RunConfig) -> CommandOutput:
    """
    Run one command.

    Raises:
        ConfigError: parameters rejected during resolution
        NumericError: the computation failed
    """
    try:
        return CommandHandlers(config).dispatch()
    except NumericError:
        raise
    except ValueError as e:
        # pydantic ValidationError is a ValueError
        raise ConfigError(str(e)) from None
