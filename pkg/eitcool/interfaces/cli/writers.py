"""Data and manifest writers"""

import csv
import io
import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from eitcool import __version__
from eitcool.models import CommandOutput, GridSpec, OutputFormat, RunConfig
from eitcool.utils import get_logger

logger = get_logger(__name__)


def format_cell(value: Any) -> str:
    """CSV cell: %.12g for numbers, blank for missing or non-finite values"""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "" if not math.isfinite(value) else "%.12g" % value
    return str(value)


def _json_value(value: Any) -> Any:
    """JSON-safe value: NaN and inf become null, numpy scalars and paths become builtins"""
    if isinstance(value, dict):
        return {str(k): _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_json_value(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    return value


def render_csv(output: CommandOutput) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(output.columns)
    for row in output.rows:
        writer.writerow([format_cell(v) for v in row])
    return buffer.getvalue()


def render_json(command: str, output: CommandOutput) -> str:
    payload = {
        "version": __version__,
        "command": command,
        "columns": output.columns,
        "rows": _json_value(output.rows),
    }
    return json.dumps(payload, indent=2) + "\n"


def write_atomic(path: Path, content: str) -> None:
    """
    Write through a temp file in the same directory, then replace.

    Raises:
        OSError: directory not writable
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_path = path.with_suffix(path.suffix + ".tmp")
    try:
        temp_path.write_text(content, encoding="utf-8")
        temp_path.replace(path)
    except OSError:
        temp_path.unlink(missing_ok=True)
        raise
    logger.info("file_written", filepath=str(path), size=len(content))


def manifest_path(data_path: Path) -> Path:
    return data_path.with_name(data_path.name + ".manifest.json")


def write_outputs(
    config: RunConfig,
    output: CommandOutput,
    wall_time_s: float,
    started_at: Optional[str] = None
) -> Dict[str, Path]:
    """
    Write the data file and its manifest.

    The data file holds no timestamps so repeated runs are byte-identical;
    timing lives in the manifest only.

    Returns:
        {"data": path, "manifest": path}
    """
    command = config.command.value
    if config.format == OutputFormat.JSON:
        content = render_json(command, output)
    else:
        content = render_csv(output)
    write_atomic(config.output, content)

    grid_specs: Dict[str, GridSpec] = config.grids
    manifest = {
        "command": command,
        "version": __version__,
        "resolved_params": _json_value(output.resolved_params),
        "grid_specs": {axis: spec.model_dump() for axis, spec in grid_specs.items()},
        "inputs": _json_value(config.values),
        "format": config.format.value,
        "jobs": config.jobs,
        "wall_time_s": wall_time_s,
        "started_at": started_at,
        "summary": _json_value(output.summary),
    }
    path = manifest_path(config.output)
    write_atomic(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return {"data": config.output, "manifest": path}
