"""Run configuration shared by the CLI and the experiment drivers.

Precedence is built-in defaults < JSON config file < command-line flags;
the merged config is embedded in every output manifest so artifacts stay
auditable and reruns reproducible.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

import numpy as np

from .eikonal import SolverConfig
from .errors import InputFormatError


@dataclass(frozen=True)
class RunConfig:
    degree: int = 10
    def_degree: int = 10
    viscosity: float = 0.2
    grid: int = 24
    boundary_weight: float = 100.0
    theta_samples: int = 512
    r_samples: int = 64
    k_order: int = 3
    seed: int = 0
    jobs: int | None = None
    resample_points: int = 256
    max_iter: int = 60
    tol: float = 1e-10

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            degree=self.degree,
            q_per_axis=self.grid,
            boundary_weight=self.boundary_weight,
            viscosity=self.viscosity,
            max_iter=self.max_iter,
            tol=self.tol,
        )

    def r_grid(self) -> np.ndarray:
        from .moments import default_r_grid

        return default_r_grid(self.r_samples)

    def to_dict(self) -> dict:
        return asdict(self)

    def merged(self, overrides: dict) -> "RunConfig":
        """New config with non-None override values applied."""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise InputFormatError(f"unknown config keys: {sorted(unknown)}")
        data = self.to_dict()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig(**data)


def load_config_file(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputFormatError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputFormatError("config file must hold a JSON object")
    return data
