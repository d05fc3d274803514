"""l1 / l2 / linf norms on the variable space and the coefficient-space norm.

Points of the coefficient space R^{n+1} are split as ``(a, b)`` with
``a`` the first ``n`` coordinates; their norm is ``max(||a||_*, |b|)``
where ``||.||_*`` is the dual of the norm chosen on R^n.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InputError

_NAMES = {1: "l1", 2: "l2", np.inf: "linf"}
_BY_NAME = {"l1": 1, "l2": 2, "linf": np.inf, "1": 1, "2": 2, "inf": np.inf}
_DUAL = {1: np.inf, 2: 2, np.inf: 1}


@dataclass(frozen=True)
class NormSpec:
    """Which lp norm lives on R^n (p in {1, 2, inf})."""

    p: float = 2

    def __post_init__(self):
        p = float(self.p)
        if p not in (1.0, 2.0, np.inf):
            raise InputError(f"unsupported norm exponent {self.p!r}; use 1, 2 or inf")
        object.__setattr__(self, "p", p)

    @classmethod
    def parse(cls, value) -> "NormSpec":
        if isinstance(value, NormSpec):
            return value
        if isinstance(value, str):
            key = value.strip().lower()
            if key not in _BY_NAME:
                raise InputError(f"unknown norm {value!r}; expected l1, l2 or linf")
            return cls(_BY_NAME[key])
        return cls(value)

    @property
    def dual_p(self) -> float:
        return float(_DUAL[self.p])

    def dual(self) -> "NormSpec":
        return NormSpec(self.dual_p)

    @property
    def name(self) -> str:
        return _NAMES[self.p]

    def __str__(self):
        return self.name


L1 = NormSpec(1)
L2 = NormSpec(2)
LINF = NormSpec(np.inf)


def _as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError("expected a nonempty vector")
    if not np.all(np.isfinite(v)):
        raise InputError("vector entries must be finite")
    return v


def lp_norm(v: np.ndarray, p: float, axis=-1) -> np.ndarray:
    """Vectorised lp norm along ``axis`` for p in {1, 2, inf}."""
    v = np.asarray(v, dtype=float)
    if p == 1:
        return np.abs(v).sum(axis=axis)
    if p == 2:
        return np.sqrt((v * v).sum(axis=axis))
    return np.abs(v).max(axis=axis)


def norm_value(v, spec: NormSpec = L2, mode: str = "primal") -> float:
    """Primal or dual norm of ``v`` under ``spec``."""
    v = _as_vector(v)
    if mode == "primal":
        p = spec.p
    elif mode == "dual":
        p = spec.dual_p
    else:
        raise InputError(f"mode must be 'primal' or 'dual', got {mode!r}")
    return float(lp_norm(v, p))


def coeff_norm(pt, spec: NormSpec = L2) -> float:
    """Norm of a coefficient vector ``(a, b)``: ``max(||a||_*, |b|)``."""
    pt = _as_vector(pt)
    if pt.size < 2:
        raise DimensionError("coefficient vectors need dimension n+1 >= 2")
    return max(float(lp_norm(pt[:-1], spec.dual_p)), abs(float(pt[-1])))


def coeff_norms(points: np.ndarray, spec: NormSpec = L2) -> np.ndarray:
    """Row-wise :func:`coeff_norm` of an (m, n+1) array."""
    points = np.asarray(points, dtype=float)
    return np.maximum(lp_norm(points[..., :-1], spec.dual_p), np.abs(points[..., -1]))


def unit_dual_aligned(x: np.ndarray, spec: NormSpec) -> np.ndarray:
    """A vector ``w`` with ``||w||_* = 1`` and ``w'x = ||x||``.

    For ``x = 0`` any dual-unit vector qualifies; the first basis vector is
    returned.
    """
    x = _as_vector(x)
    w = np.zeros_like(x)
    if not np.any(x):
        w[0] = 1.0
        return w
    if spec.p == 2:
        y = x / np.abs(x).max()  # rescale first so tiny vectors do not underflow
        return y / np.sqrt(y @ y)
    if spec.p == 1:
        return np.sign(x)
    j = int(np.argmax(np.abs(x)))
    w[j] = np.sign(x[j])
    return w
