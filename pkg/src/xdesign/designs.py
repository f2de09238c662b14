"""The six-design catalog and its assignment replay rules.

Each design is an implementable randomization scheme: it draws treatment for
its own assignment unit (user, cluster, budget pool, region-time block, or a
mixture) and replays that assignment over a panel. The effective number of
assignment units drives power; the operational-cost inputs are pre-registered
scores, not measurements.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from .errors import ConfigurationError, PlanningError
from .mechanisms import MechanismPoint
from .panel import Panel

__all__ = [
    "DesignKind",
    "OpCostInputs",
    "DesignSpec",
    "AssignmentTable",
    "replay",
    "effective_units",
    "default_catalog",
]

DesignKind = Literal["user", "cluster", "switchback", "budget_split", "two_stage", "mixed"]

KINDS: tuple[str, ...] = ("user", "cluster", "switchback", "budget_split", "two_stage", "mixed")


@dataclass(frozen=True)
class OpCostInputs:
    """Pre-registered operational subscores in [0, 1] and their aggregation weights."""

    effort: float
    orchestration: float
    rollback: float
    platform: float
    w_effort: float = 1.0
    w_orchestration: float = 1.0
    w_rollback: float = 1.0
    w_platform: float = 1.0

    def __post_init__(self) -> None:
        for name in ("effort", "orchestration", "rollback", "platform"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigurationError(f"op-cost subscore {name} must lie in [0, 1]")
        weights = (self.w_effort, self.w_orchestration, self.w_rollback, self.w_platform)
        if any(w < 0 for w in weights):
            raise ConfigurationError("op-cost weights must be >= 0")
        if sum(weights) <= 0:
            raise ConfigurationError("op-cost weight sum must be > 0")

    @classmethod
    def flat(cls, level: float) -> "OpCostInputs":
        """Equal subscores at ``level`` with equal weights."""
        return cls(level, level, level, level)


@dataclass(frozen=True)
class DesignSpec:
    """One candidate design in the catalog."""

    kind: str
    treat_prob: float = 0.5
    block_length: int = 1
    saturation_levels: tuple[float, ...] = (0.25, 0.75)
    mixture_prob: float = 0.5
    op_cost_inputs: OpCostInputs = field(default_factory=lambda: OpCostInputs.flat(0.5))
    all_treated: bool = False
    name: str = ""

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown design kind {self.kind!r}")
        if not 0.0 < self.treat_prob < 1.0:
            raise ConfigurationError("treat_prob must lie in (0, 1)")
        if self.block_length < 1:
            raise ConfigurationError("block_length must be >= 1")
        if not self.saturation_levels:
            raise ConfigurationError("saturation_levels must be non-empty")
        if any(not 0.0 <= s <= 1.0 for s in self.saturation_levels):
            raise ConfigurationError("saturation levels must lie in [0, 1]")
        if not 0.0 <= self.mixture_prob <= 1.0:
            raise ConfigurationError("mixture_prob must lie in [0, 1]")
        if not self.name:
            object.__setattr__(self, "name", self.kind)

    def with_overrides(self, **kwargs) -> "DesignSpec":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class AssignmentTable:
    """A replayed assignment: per-cell treatment and assignment-unit labels.

    ``z[i, t]`` is 0/1 treatment, ``labels[i, t]`` an integer code identifying
    the assignment unit that drew the cell's treatment. All cells sharing a
    label share one draw.
    """

    z: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        z = np.asarray(self.z, dtype=np.int8)
        labels = np.asarray(self.labels, dtype=np.int64)
        if z.shape != labels.shape or z.ndim != 2:
            raise ConfigurationError("z and labels must share one (n_units, n_periods) shape")
        if not np.all((z == 0) | (z == 1)):
            raise ConfigurationError("z must be 0/1")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "labels", labels)

    @property
    def n_assignment_units(self) -> int:
        return len(np.unique(self.labels))

    def treated_fraction(self) -> float:
        return float(self.z.mean())


def _tile(per_unit: np.ndarray, n_periods: int) -> np.ndarray:
    return np.repeat(per_unit[:, None], n_periods, axis=1)


def replay(
    design: DesignSpec,
    panel: Panel,
    theta: MechanismPoint | None = None,
    seed: int | np.random.SeedSequence = 0,
) -> AssignmentTable:
    """Draw one assignment for ``design`` over the panel. Deterministic in ``seed``.

    ``theta`` is accepted for signature symmetry with the rest of the pipeline;
    none of the shipped assignment rules depends on the mechanism.
    """
    del theta
    rng = np.random.default_rng(seed)
    n, t = panel.n_units, panel.n_periods
    p = design.treat_prob

    if design.kind == "user":
        draws = np.ones(n, dtype=np.int8) if design.all_treated else (rng.random(n) < p).astype(np.int8)
        z = _tile(draws, t)
        labels = _tile(np.arange(n, dtype=np.int64), t)
    elif design.kind in ("cluster", "budget_split"):
        codes = panel.cluster_codes if design.kind == "cluster" else panel.budget_codes
        n_groups = codes.max() + 1
        draws = np.ones(n_groups, dtype=np.int8) if design.all_treated else (rng.random(n_groups) < p).astype(np.int8)
        z = _tile(draws[codes], t)
        labels = _tile(codes, t)
    elif design.kind == "switchback":
        codes = panel.region_codes
        n_regions = codes.max() + 1
        n_blocks = (t + design.block_length - 1) // design.block_length
        draws = (
            np.ones((n_regions, n_blocks), dtype=np.int8)
            if design.all_treated
            else (rng.random((n_regions, n_blocks)) < p).astype(np.int8)
        )
        block_of_period = np.arange(t) // design.block_length
        z = draws[codes][:, block_of_period]
        labels = (codes[:, None] * n_blocks + block_of_period[None, :]).astype(np.int64)
    elif design.kind == "two_stage":
        codes = panel.cluster_codes
        n_clusters = codes.max() + 1
        levels = np.asarray(design.saturation_levels, dtype=float)
        level_idx = rng.integers(0, len(levels), size=n_clusters)
        unit_u = rng.random(n)
        per_unit = (
            np.ones(n, dtype=np.int8)
            if design.all_treated
            else (unit_u < levels[level_idx][codes]).astype(np.int8)
        )
        z = _tile(per_unit, t)
        labels = _tile(codes, t)
    elif design.kind == "mixed":
        codes = panel.cluster_codes
        n_clusters = codes.max() + 1
        whole_cluster = rng.random(n_clusters) < design.mixture_prob
        cluster_draws = (rng.random(n_clusters) < p).astype(np.int8)
        unit_draws = (rng.random(n) < p).astype(np.int8)
        per_unit = np.where(whole_cluster[codes], cluster_draws[codes], unit_draws).astype(np.int8)
        if design.all_treated:
            per_unit = np.ones(n, dtype=np.int8)
        label_per_unit = np.where(
            whole_cluster[codes], codes, n_clusters + np.arange(n, dtype=np.int64)
        ).astype(np.int64)
        z = _tile(per_unit, t)
        labels = _tile(label_per_unit, t)
    else:  # pragma: no cover - guarded by DesignSpec
        raise ConfigurationError(f"unknown design kind {design.kind!r}")

    return AssignmentTable(z=z, labels=labels)


def effective_units(
    design: DesignSpec,
    panel: Panel,
    t_weeks: int,
    periods_per_week: int | None = None,
) -> int:
    """Effective count of independent randomization draws over a ``t_weeks`` horizon.

    Only switchbacks accrue units with duration: one per region-block. The
    other designs are bounded by the panel's group structure. ``periods_per_week``
    defaults to the panel's periods spread evenly over ``t_weeks``.
    """
    if t_weeks < 1:
        raise ConfigurationError("t_weeks must be >= 1")
    if design.kind == "user":
        n = panel.n_units
    elif design.kind in ("cluster", "two_stage"):
        n = panel.n_clusters
    elif design.kind == "budget_split":
        n = panel.n_budget_groups
    elif design.kind == "switchback":
        if periods_per_week is None:
            periods_per_week = max(1, panel.n_periods // t_weeks)
        n = panel.n_regions * int(periods_per_week * t_weeks // design.block_length)
    elif design.kind == "mixed":
        n = int(design.mixture_prob * panel.n_clusters + (1.0 - design.mixture_prob) * panel.n_units)
    else:  # pragma: no cover
        raise ConfigurationError(f"unknown design kind {design.kind!r}")
    if n < 2:
        raise PlanningError(f"insufficient assignment units for design {design.name!r} (n={n})")
    return n


# Pre-registered operational-cost levels per design kind: user randomization is
# routine; blocking/scheduling designs are mid-cost; new allocation machinery
# (budget splits, saturation, multi-axis mixtures) is expensive.
_OP_COST_LEVELS = {
    "user": 0.10,
    "cluster": 0.40,
    "switchback": 0.40,
    "budget_split": 0.80,
    "two_stage": 0.80,
    "mixed": 0.80,
}


def default_catalog() -> list[DesignSpec]:
    """The six-design catalog with pre-registered op-cost presets."""
    return [
        DesignSpec(kind=kind, op_cost_inputs=OpCostInputs.flat(_OP_COST_LEVELS[kind]))
        for kind in KINDS
    ]
