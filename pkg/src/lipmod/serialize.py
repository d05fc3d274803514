"""JSON ingestion and report encoding shared by the command line tool."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import DimensionError, InputError
from .hulls import PointCloud
from .linsys import LinearSystem
from .norms import NormSpec

_SPECIAL = {"inf": math.inf, "+inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def to_jsonable(obj):
    """Recursively convert numpy values; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def as_float(value) -> float:
    """Parse a number that may have been serialized as ``"inf"``."""
    if isinstance(value, str):
        key = value.strip().lower()
        if key in _SPECIAL:
            return _SPECIAL[key]
        try:
            return float(key)
        except ValueError:
            raise InputError(f"not a number: {value!r}") from None
    return float(value)


def load_json(path) -> object:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def parse_vector(text) -> np.ndarray:
    """A vector given as JSON text (``"[1, 2]"``) or a bare number."""
    if isinstance(text, str):
        try:
            text = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"cannot parse vector {text!r}") from exc
    v = np.atleast_1d(np.asarray(text, dtype=float))
    if v.ndim != 1 or not np.all(np.isfinite(v)):
        raise InputError("vectors must be flat lists of finite numbers")
    return v


def system_from_json(data: dict) -> LinearSystem:
    """``{"n": int, "norm": "l1|l2|linf", "points": [[a..., b], ...]}``."""
    if not isinstance(data, dict) or "points" not in data:
        raise InputError("system files need a 'points' list")
    pts = np.asarray(data["points"], dtype=float)
    if pts.ndim != 2:
        raise InputError("'points' must be a list of equal-length rows")
    n = int(data.get("n", pts.shape[1] - 1))
    if pts.shape[1] != n + 1:
        raise DimensionError(f"points must have n+1 = {n + 1} coordinates")
    return LinearSystem(n, PointCloud(pts), NormSpec.parse(data.get("norm", "l2")))


def system_to_json(sys: LinearSystem) -> dict:
    return {"n": sys.n, "norm": sys.spec.name, "points": sys.U.points.tolist()}


def cloud_from_json(data) -> tuple[PointCloud, NormSpec | None]:
    """A point list, or ``{"points": [...], "norm": ...}`` (system files too)."""
    if isinstance(data, dict):
        spec = NormSpec.parse(data["norm"]) if "norm" in data else None
        return PointCloud(data["points"]), spec
    return PointCloud(data), None
