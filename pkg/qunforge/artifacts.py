"""
Result artifacts: JSON and CSV writers with fixed numeric precision.

Every artifact carries the schema version, the build description and the
seed it was produced with, and nothing time-dependent, so re-running the same
manifest yields byte-identical files.
"""

import csv
import io
import json
import logging
import math
import subprocess
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SIGNIFICANT_DIGITS = 12

_build_cache: dict = {}


def round_significant(value: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    if value == 0 or not math.isfinite(value):
        return float(value)
    return float(f"{value:.{digits - 1}e}")


def normalize(obj: Any) -> Any:
    """Plain JSON types with floats rounded to SIGNIFICANT_DIGITS."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_significant(float(obj))
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [normalize(v) for v in obj]
    return obj


def build_description(base_path: Optional[Union[str, Path]] = None) -> str:
    """`git describe` of the working tree, or "unknown" outside a repository."""
    key = str(base_path or Path(__file__).parent)
    if key in _build_cache:
        return _build_cache[key]
    description = "unknown"
    try:
        result = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            capture_output=True,
            text=True,
            cwd=key,
            timeout=10,
        )
        if result.returncode == 0 and result.stdout.strip():
            description = result.stdout.strip()
    except (FileNotFoundError, subprocess.TimeoutExpired) as e:
        logger.debug(f"git describe unavailable: {e}")
    _build_cache[key] = description
    return description


def render_json(payload: dict, seed: int) -> str:
    document = {"schema": SCHEMA_VERSION, "build": build_description(), "seed": seed}
    document.update(normalize(payload))
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def write_json(path: Union[str, Path], payload: dict, seed: int) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(render_json(payload, seed))
    logger.info(f"Wrote {path}")
    return path


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(round_significant(float(value)))
    return str(value)


def render_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]], seed: int) -> str:
    buffer = io.StringIO()
    buffer.write(f"# schema: {SCHEMA_VERSION}; build: {build_description()}; seed: {seed}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def write_csv(
    path: Union[str, Path], columns: Sequence[str], rows: List[Sequence[Any]], seed: int
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(render_csv(columns, rows, seed))
    logger.info(f"Wrote {path}")
    return path
