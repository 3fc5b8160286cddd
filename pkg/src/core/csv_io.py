"""CSV and JSON readers/writers with a fixed, round-trip-exact float format."""
import json
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import pandas as pd

from ..models.path import PlanarPath
from .errors import ConfigError

FLOAT_FORMAT = "%.17g"
PathLike = Union[str, Path]


def write_frame(frame: pd.DataFrame, path: PathLike) -> Path:
    """Write with 17 significant digits, '.' decimals, '\\n' line endings, UTF-8."""
    path = Path(path)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
    return path


def read_frame(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def read_path_csv(path: PathLike, closed: bool = False) -> PlanarPath:
    """Polyline from a CSV with header x_plus, x_minus."""
    try:
        frame = read_frame(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ConfigError(f"cannot read path file {path}: {e}")
    missing = {"x_plus", "x_minus"} - set(frame.columns)
    if missing:
        raise ConfigError(f"path file {path} lacks column(s) {sorted(missing)}")
    vertices = frame[["x_plus", "x_minus"]].to_numpy(dtype=float)
    return PlanarPath(vertices, closed=closed)


def write_path_csv(path_obj: PlanarPath, path: PathLike) -> Path:
    frame = pd.DataFrame(path_obj.vertices, columns=["x_plus", "x_minus"])
    return write_frame(frame, path)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return None
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def write_json(data: Dict[str, Any], path: PathLike) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_json_config(path: PathLike) -> Dict[str, Any]:
    """Parse a JSON config; syntax errors carry line and column."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON in {path} at line {e.lineno}, column {e.colno}: {e.msg}")
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return data
