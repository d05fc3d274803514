"""Solver tolerances and Monte Carlo sweep settings."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

from .errors import InputError


@dataclass(frozen=True)
class ToleranceConfig:
    feas_tol: float = 1e-9
    active_tol: float = 1e-7
    solver_tol: float = 1e-10
    max_iter: int = 100_000

    def __post_init__(self):
        for name in ("feas_tol", "active_tol", "solver_tol"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive")
        if int(self.max_iter) < 1:
            raise InputError("max_iter must be a positive integer")
        object.__setattr__(self, "max_iter", int(self.max_iter))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict | None) -> "ToleranceConfig":
        return cls(**_known(cls, data or {}))


DEFAULT_TOL = ToleranceConfig()

PERTURBATION_KINDS = ("jitter", "add_point", "drop_point")


@dataclass(frozen=True)
class SweepConfig:
    """Schedule of Hausdorff-ball radii for the empirical modulus estimators."""

    deltas: tuple = (1e-1, 1e-2, 1e-3)
    samples_per_delta: int = 1000
    seed: int = 0
    perturbation_kinds: tuple = ("jitter",)
    mode: str = "lip"
    threads: int = field(default=1, compare=False)

    def __post_init__(self):
        deltas = tuple(float(d) for d in self.deltas)
        if not deltas or any(d <= 0 for d in deltas):
            raise InputError("deltas must be a nonempty list of positive reals")
        if any(b >= a for a, b in zip(deltas, deltas[1:])):
            raise InputError("deltas must be strictly decreasing")
        if int(self.samples_per_delta) < 1:
            raise InputError("samples_per_delta must be >= 1")
        kinds = tuple(self.perturbation_kinds)
        bad = set(kinds) - set(PERTURBATION_KINDS)
        if bad or not kinds:
            raise InputError(f"unknown perturbation kinds {sorted(bad)}")
        if self.mode not in ("lip", "calm"):
            raise InputError("mode must be 'lip' or 'calm'")
        object.__setattr__(self, "deltas", deltas)
        object.__setattr__(self, "perturbation_kinds", kinds)
        object.__setattr__(self, "samples_per_delta", int(self.samples_per_delta))
        object.__setattr__(self, "seed", int(self.seed) & (2**64 - 1))
        object.__setattr__(self, "threads", max(1, int(self.threads)))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["deltas"] = list(self.deltas)
        d["perturbation_kinds"] = list(self.perturbation_kinds)
        d.pop("threads")
        return d

    @classmethod
    def from_dict(cls, data: dict | None) -> "SweepConfig":
        return cls(**_known(cls, data or {}))


def _known(cls, data: dict) -> dict:
    names = {f.name for f in fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise InputError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    return dict(data)
