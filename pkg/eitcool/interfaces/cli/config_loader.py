"""Flat key = value configuration: parsing, validation and unit resolution"""

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError
from scipy import constants as cons

from eitcool.config import settings
from eitcool.errors import ConfigError
from eitcool.models import Command, GridSpec, OutputFormat, RunConfig, TrapConfig, TripodParams
from eitcool.utils import get_logger

logger = get_logger(__name__)

LASER_KEYS = ("omega_1", "omega_0", "omega_m1", "delta_1", "delta_0", "delta_m1")
FREQUENCY_UNITS = ("gamma", "mhz")
COMMON_SCALARS = {"preset": str, "gamma_mhz": float, "delta_B_mhz": float}
PRESETS = {"fig1": TripodParams.fig1, "fig2": TripodParams.fig2}
TRAP_SCALARS = {
    "n_ions": int,
    "axial_mhz": float,
    "alpha_mhz": float,
    "beta_mhz": float,
    "theta_deg": float,
    "mass_u": float,
}


@dataclass(frozen=True)
class CommandSchema:
    """Keys a command accepts; a name in required must be present in some form"""
    laser: bool = True
    frequencies: Tuple[str, ...] = ()
    grids: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    scalars: Dict[str, type] = field(default_factory=dict)
    required: Tuple[str, ...] = ()


SCHEMAS: Dict[Command, CommandSchema] = {
    Command.SPECTRUM: CommandSchema(grids={"delta0": FREQUENCY_UNITS}),
    Command.COOLING_LIMIT: CommandSchema(grids={"omega": FREQUENCY_UNITS}, required=("omega",)),
    Command.DYNAMICS: CommandSchema(
        frequencies=("mode_freq",),
        grids={"t": ("us",)},
        scalars={"eta": float, "nbar0": float},
        required=("mode_freq", "eta", "t"),
    ),
    Command.SCAN: CommandSchema(
        frequencies=("com_freq", "window_low", "window_high"),
        grids={"omega": FREQUENCY_UNITS, "rabi1": FREQUENCY_UNITS},
        scalars={"optimize_probe": bool, "scheme": str},
        required=("omega", "rabi1"),
    ),
    Command.OPTIMIZE: CommandSchema(
        frequencies=("mode_freq", "window_low", "window_high"),
        scalars={"prescan_points": int},
        required=("mode_freq", "window_low", "window_high"),
    ),
    Command.CHAIN_MODES: CommandSchema(laser=False, scalars=dict(TRAP_SCALARS), required=("n_ions",)),
    Command.THERMOMETRY: CommandSchema(
        laser=False,
        scalars={
            "data": str,
            "mode_mhz": float,
            "p_lower": float,
            "p_upper": float,
            "sigma_lower": float,
            "sigma_upper": float,
        },
    ),
    Command.RABI_FIT: CommandSchema(laser=False, scalars={"data": str}, required=("data",)),
}

_GRID_KEY = re.compile(r"^(?P<axis>[a-z0-9]+)_(?P<unit>[a-z]+)_(?P<part>start|stop|count)$")
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, str]:
    """
    Parse `key = value` lines; `#` starts a comment.

    Raises:
        ConfigError: malformed line or repeated key
    """
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        key = key.replace("-", "_")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def parse_flag_overrides(tokens: Sequence[str]) -> Dict[str, str]:
    """Turn ['--key', 'value', '--other=v'] into a dict; dashes in keys become underscores"""
    values: Dict[str, str] = {}
    i = 0
    tokens = list(tokens)
    while i < len(tokens):
        token = tokens[i]
        if not token.startswith("--"):
            raise ConfigError(f"unexpected argument {token!r}")
        name = token[2:]
        if "=" in name:
            key, value = name.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(tokens):
                raise ConfigError(f"flag {token} needs a value")
            key, value = name, tokens[i + 1]
            i += 2
        values[key.replace("-", "_")] = value
    return values


def _convert(key: str, raw: str, kind: type) -> Any:
    try:
        if kind is bool:
            lowered = raw.strip().lower()
            if lowered in _TRUE:
                return True
            if lowered in _FALSE:
                return False
            raise ValueError(raw)
        if kind is int:
            return int(raw)
        if kind is float:
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError(raw)
            return value
        return raw
    except ValueError:
        raise ConfigError(f"{key}: cannot read {raw!r} as {kind.__name__}") from None


def _frequency_names(schema: CommandSchema) -> Tuple[str, ...]:
    return (LASER_KEYS if schema.laser else ()) + schema.frequencies


def build_run_config(
    command: Command,
    raw: Dict[str, str],
    output: Path,
    fmt: OutputFormat,
    jobs: Optional[int]
) -> RunConfig:
    """
    Validate and type every key against the command's schema.

    Raises:
        ConfigError: unknown, malformed or missing keys, or an empty grid
    """
    schema = SCHEMAS[command]
    scalars = dict(schema.scalars)
    if schema.laser:
        scalars.update(COMMON_SCALARS)
    frequency_names = _frequency_names(schema)

    values: Dict[str, Any] = {}
    grid_parts: Dict[str, Dict[str, str]] = {}
    grid_units: Dict[str, str] = {}
    unknown: List[str] = []

    for key, text in raw.items():
        if key in scalars:
            values[key] = _convert(key, text, scalars[key])
            continue
        match = _GRID_KEY.match(key)
        if match and match["axis"] in schema.grids:
            axis, unit = match["axis"], match["unit"]
            if unit not in schema.grids[axis]:
                raise ConfigError(f"{key}: unit must be one of {', '.join(schema.grids[axis])}")
            if grid_units.setdefault(axis, unit) != unit:
                raise ConfigError(f"{axis} grid mixes units {grid_units[axis]} and {unit}")
            grid_parts.setdefault(axis, {})[match["part"]] = text
            continue
        base, _, unit = key.rpartition("_")
        if base in frequency_names and unit in FREQUENCY_UNITS:
            if any(f"{base}_{u}" in values for u in FREQUENCY_UNITS):
                raise ConfigError(f"{base} given in more than one unit")
            values[key] = _convert(key, text, float)
            continue
        unknown.append(key)

    if unknown:
        raise ConfigError(f"unknown key(s) for {command.value}: {', '.join(sorted(unknown))}")

    grids: Dict[str, GridSpec] = {}
    for axis, parts in grid_parts.items():
        unit = grid_units[axis]
        for part in ("start", "stop", "count"):
            if part not in parts:
                raise ConfigError(f"{axis}_{unit}_{part}: missing (grids need start, stop and count)")
        count = _convert(f"{axis}_{unit}_count", parts["count"], int)
        if count <= 0:
            raise ConfigError(f"{axis}_{unit}_count: grid is empty")
        grids[axis] = GridSpec(
            start=_convert(f"{axis}_{unit}_start", parts["start"], float),
            stop=_convert(f"{axis}_{unit}_stop", parts["stop"], float),
            count=count,
            unit=unit,
        )

    for name in schema.required:
        present = (
            name in values
            or name in grids
            or any(f"{name}_{u}" in values for u in FREQUENCY_UNITS)
        )
        if not present:
            if name in schema.grids:
                hint = f"{name}_{schema.grids[name][0]}_start/stop/count"
            elif name in frequency_names:
                hint = f"{name}_gamma or {name}_mhz"
            else:
                hint = name
            raise ConfigError(f"missing required key: {hint}")

    return RunConfig(command=command, values=values, grids=grids, output=output, format=fmt, jobs=jobs)


class ParamReader:
    """Unit-resolving accessors over a validated RunConfig"""

    def __init__(self, config: RunConfig):
        self.config = config
        self.values = config.values

    @property
    def gamma_mhz(self) -> float:
        return self.values.get("gamma_mhz", settings.gamma_mhz)

    def frequency(self, name: str, default: Optional[float] = None) -> Optional[float]:
        """Frequency in units of Gamma from name_gamma or name_mhz"""
        if f"{name}_gamma" in self.values:
            return self.values[f"{name}_gamma"]
        if f"{name}_mhz" in self.values:
            return self.values[f"{name}_mhz"] / self.gamma_mhz
        return default

    def scalar(self, name: str, default: Any = None) -> Any:
        return self.values.get(name, default)

    def grid(self, axis: str) -> Optional[np.ndarray]:
        """Grid values; frequency axes in units of Gamma, others as given"""
        spec = self.config.grids.get(axis)
        if spec is None:
            return None
        values = spec.values()
        return values / self.gamma_mhz if spec.unit == "mhz" else values

    def tripod(self) -> TripodParams:
        """TripodParams from preset defaults overridden by explicit keys"""
        preset = self.values.get("preset")
        base: Dict[str, float] = {}
        if preset is not None:
            if preset not in PRESETS:
                raise ConfigError(f"preset: unknown value {preset!r} (choose {', '.join(PRESETS)})")
            base = PRESETS[preset]().model_dump(include=set(LASER_KEYS))
        for name in LASER_KEYS:
            value = self.frequency(name)
            if value is not None:
                base[name] = value
        missing = [name for name in LASER_KEYS if name not in base]
        if missing:
            raise ConfigError(
                "missing required key(s): " + ", ".join(f"{m}_gamma" for m in missing)
                + " (or _mhz, or a preset)"
            )
        try:
            return TripodParams(
                gamma=2.0 * math.pi * self.gamma_mhz * 1e6,
                delta_B=2.0 * math.pi * self.values.get("delta_B_mhz", 7.7) * 1e6,
                **base,
            )
        except ValidationError as e:
            raise ConfigError(f"invalid laser parameters: {e}") from None

    def trap(self) -> TrapConfig:
        """TrapConfig from MHz trap frequencies; axial_mhz is required for more than one ion"""
        n_ions = self.values["n_ions"]
        if n_ions > 1 and "axial_mhz" not in self.values:
            raise ConfigError("missing required key: axial_mhz (needed for n_ions > 1)")
        extra: Dict[str, Any] = {}
        if "theta_deg" in self.values:
            extra["beam_angle_theta"] = math.radians(self.values["theta_deg"])
        if "mass_u" in self.values:
            extra["ion_mass"] = self.values["mass_u"] * cons.atomic_mass
        try:
            return TrapConfig.from_mhz(
                n_ions=n_ions,
                ax_mhz=self.values.get("axial_mhz", 1.0),
                alpha_mhz=self.values.get("alpha_mhz", 4.45),
                beta_mhz=self.values.get("beta_mhz", 4.30),
                **extra,
            )
        except ValidationError as e:
            raise ConfigError(f"invalid trap parameters: {e}") from None


def load_samples(path: Path) -> Tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
    """
    Read (t, value[, sigma]) columns from delimited text.

    Commas or whitespace separate fields; '#' comments and a non-numeric
    header row are skipped.

    Raises:
        OSError: unreadable file
        ConfigError: malformed rows
    """
    text = Path(path).read_text(encoding="utf-8")
    rows: List[List[float]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f for f in re.split(r"[,\s]+", line) if f]
        try:
            rows.append([float(f) for f in fields])
        except ValueError:
            if not rows:
                continue
            raise ConfigError(f"{path}:{lineno}: non-numeric field in {raw.strip()!r}") from None
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1 or widths.pop() not in (2, 3):
        raise ConfigError(f"{path}: every row needs 2 or 3 columns (t, value[, sigma])")
    data = np.array(rows)
    sigma = data[:, 2] if data.shape[1] == 3 else None
    return data[:, 0], data[:, 1], sigma
