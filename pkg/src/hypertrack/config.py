"""Tracker configuration: every tunable scalar in one serializable record."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class TrackerConfig:
    """All fixed parameters of the tracking pipeline.

    ``mass_cap`` is the per-coordinate bound of the relaxed mode-seeking
    problem; ``None`` resolves to ``1/(order+1)``, the tightest value that
    still forces at least ``order+1`` correspondences into every mode.
    """

    order: int = 3                       # hypergraph order k (1, 2 or 3)
    assoc_weight: float = 10.0           # weight of the association term
    geom_weight: float = 15.0            # weight of the geometric term
    assoc_scale_sq: float = 1.0          # sigma^2 of the association kernel
    geom_scale_sq: float = 1.0           # sigma^2 of the geometric kernel
    appearance_threshold: float = 0.3    # minimum association confidence kept
    max_matches_per_target: int = 5      # vertex-reduction cap per target part
    max_edges_per_vertex: int = 100      # hyperedge sampling budget scale
    lambdas: tuple[float, float, float] = (3.25, 1.0, -1.0)  # map values: reliable, candidate, background
    mass_cap: float | None = None
    rng_seed: int = 0
    convergence_tol: float = 1e-8
    update_budget_factor: int = 200      # max pairwise updates per start = factor * N
    support_threshold: float = 1e-6
    refine_samples: int = 200
    feature_alpha: float = 0.9           # EMA weight on the old feature
    miss_limit: int = 5                  # consecutive missed frames before removal
    search_scale: float = 3.0
    fg_threshold: float = 0.5
    sparsity_factor: float = 2.0         # admission radius = factor * mean diameter
    rejection_factor: int = 20           # sampling draw budget = factor * eta
    degenerate_angle: float = 1e-6       # radians; triangles flatter than this are discarded

    def __post_init__(self):
        if self.mass_cap is None:
            object.__setattr__(self, "mass_cap", 1.0 / (self.order + 1))
        self.validate()

    def validate(self) -> None:
        if self.order not in (1, 2, 3):
            raise ValueError(f"order must be 1, 2 or 3, got {self.order}")
        if not (0.0 < self.mass_cap <= 1.0):
            raise ValueError("mass_cap must lie in (0, 1]")
        if 1.0 / self.mass_cap < self.order + 1 - 1e-9:
            raise ValueError(f"1/mass_cap must be >= order+1 ({self.order + 1}), got {1.0 / self.mass_cap:g}")
        if self.assoc_scale_sq <= 0 or self.geom_scale_sq <= 0:
            raise ValueError("kernel scales must be positive")
        if self.max_matches_per_target < 1:
            raise ValueError("max_matches_per_target must be >= 1")
        if self.max_edges_per_vertex < 0:
            raise ValueError("max_edges_per_vertex must be >= 0")
        if not (0.0 <= self.appearance_threshold <= 1.0):
            raise ValueError("appearance_threshold must lie in [0, 1]")
        if not (0.0 < self.feature_alpha <= 1.0):
            raise ValueError("feature_alpha must lie in (0, 1]")
        if self.miss_limit < 1:
            raise ValueError("miss_limit must be >= 1")
        if self.search_scale <= 0:
            raise ValueError("search_scale must be positive")
        if self.convergence_tol <= 0 or self.support_threshold <= 0:
            raise ValueError("tolerances must be positive")
        if self.update_budget_factor < 1 or self.rejection_factor < 1:
            raise ValueError("budget factors must be >= 1")
        if self.refine_samples < 0:
            raise ValueError("refine_samples must be >= 0")
        if len(self.lambdas) != 3:
            raise ValueError("lambdas must have exactly three entries")

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        data["lambdas"] = list(self.lambdas)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "TrackerConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "lambdas" in kwargs:
            kwargs["lambdas"] = tuple(kwargs["lambdas"])
        return cls(**kwargs)

    @classmethod
    def from_json_file(cls, path: str | Path) -> "TrackerConfig":
        with Path(path).open("r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_json_file(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
