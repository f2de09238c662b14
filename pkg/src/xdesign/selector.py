"""Normalization, risk aggregation, and the robust (worst-case) design decision."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .risk import ComponentScores, PlanningWeights

__all__ = [
    "RiskSurface",
    "RobustDecision",
    "normalize",
    "risk_surface",
    "robust_select",
    "dominance_audit",
    "weight_winner_search",
    "regime_threshold",
]


def normalize(raw: np.ndarray) -> np.ndarray:
    """Scale each component by its largest absolute value across designs and grid points.

    Components that are identically zero stay zero (0/0 guard). Positive
    scaling preserves within-component ordering.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 3 or raw.shape[2] != 6 or raw.size == 0:
        raise ConfigurationError("raw surface must have shape (n_designs, n_grid, 6)")
    scale = np.abs(raw).max(axis=(0, 1))
    safe = np.where(scale > 0, scale, 1.0)
    return raw / safe


@dataclass(frozen=True)
class RiskSurface:
    """Raw and normalized component scores plus the aggregated risk per cell."""

    raw: np.ndarray  # (n_designs, n_grid, 6)
    normalized: np.ndarray  # same shape, each component in [-1, 1]
    risks: np.ndarray  # (n_designs, n_grid)
    weights: PlanningWeights
    scale: np.ndarray  # (6,) per-component normalizers
    se: np.ndarray | None = None  # normalized replication standard errors

    @property
    def n_designs(self) -> int:
        return self.raw.shape[0]

    @property
    def n_grid(self) -> int:
        return self.raw.shape[1]

    def entry(self, design_index: int, theta_index: int) -> dict:
        return {
            "raw": self.raw[design_index, theta_index],
            "normalized": self.normalized[design_index, theta_index],
            "risk": float(self.risks[design_index, theta_index]),
        }


def risk_surface(scores: list[list[ComponentScores]], weights: PlanningWeights) -> RiskSurface:
    """Normalize a grid of component scores and aggregate into weighted risks."""
    if not scores or not scores[0]:
        raise ConfigurationError("score grid must be non-empty")
    n_grid = len(scores[0])
    if any(len(row) != n_grid for row in scores):
        raise ConfigurationError("every design needs a score at every grid point")
    raw = np.array([[cell.as_vector() for cell in row] for row in scores])
    normalized = normalize(raw)
    scale = np.abs(raw).max(axis=(0, 1))
    safe = np.where(scale > 0, scale, 1.0)
    se_raw = np.array([[cell.se for cell in row] for row in scores])
    return RiskSurface(
        raw=raw,
        normalized=normalized,
        risks=normalized @ weights.as_vector(),
        weights=weights,
        scale=scale,
        se=se_raw / safe,
    )


@dataclass(frozen=True)
class RobustDecision:
    """Worst-case risks, the selected design, and the certified shortlist."""

    q: tuple[float, ...]
    selected: int
    epsilon_t: float
    shortlist: tuple[int, ...]
    worst_theta: tuple[int, ...]
    separation_margin: float


def robust_select(
    surface: RiskSurface,
    shortlist_fraction: float = 0.10,
    epsilon_t: float | None = None,
    epsilon_mode: str = "fraction",
) -> RobustDecision:
    """Pick the design minimizing worst-case risk over the grid.

    The planning-error budget defaults to ``shortlist_fraction`` times the best
    worst-case risk; ``epsilon_mode="stderr"`` instead plugs the worst
    normalized replication standard error per component into the weighted
    budget, and an explicit ``epsilon_t`` overrides both. The shortlist
    contains every design within twice the budget of the winner, ordered by
    worst-case risk (ties by catalog order).
    """
    if shortlist_fraction < 0:
        raise ConfigurationError("shortlist_fraction must be >= 0")
    if epsilon_mode not in ("fraction", "stderr"):
        raise ConfigurationError(f"unknown epsilon_mode {epsilon_mode!r}")
    risks = surface.risks
    if not np.all(np.isfinite(risks)):
        raise ConfigurationError("risk surface contains non-finite cells")
    q = risks.max(axis=1)
    worst = risks.argmax(axis=1)
    selected = int(q.argmin())  # argmin takes the first (catalog-order) minimizer

    if epsilon_t is not None:
        eps = float(epsilon_t)
    elif epsilon_mode == "stderr":
        if surface.se is None:
            raise ConfigurationError("stderr epsilon mode needs replication standard errors")
        eps = float(surface.weights.as_vector() @ surface.se.max(axis=(0, 1)))
    else:
        eps = shortlist_fraction * float(q[selected])

    cutoff = float(q[selected]) + 2.0 * eps
    members = [d for d in range(len(q)) if q[d] <= cutoff]
    members.sort(key=lambda d: (q[d], d))
    if len(q) > 1:
        margin = float(np.sort(q)[1] - q[selected])
    else:
        margin = 0.0
    return RobustDecision(
        q=tuple(float(x) for x in q),
        selected=selected,
        epsilon_t=eps,
        shortlist=tuple(members),
        worst_theta=tuple(int(w) for w in worst),
        separation_margin=margin,
    )


def dominance_audit(raw: np.ndarray) -> int | None:
    """Return the design that weakly dominates all others on every raw component
    at every grid point, or None when no such design exists."""
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 3:
        raise ConfigurationError("raw surface must have shape (n_designs, n_grid, 6)")
    for d in range(raw.shape[0]):
        if np.all(raw[d][None, :, :] <= raw + 1e-15):
            return d
    return None


def weight_winner_search(
    raw: np.ndarray, n_samples: int = 1000, seed: int = 0
) -> set[int]:
    """Winners of random nonnegative weightings at random grid points.

    When no design componentwise-dominates, distinct winners appear for
    different weightings; a singleton result is evidence of dominance.
    """
    raw = np.asarray(raw, dtype=float)
    rng = np.random.default_rng(seed)
    winners: set[int] = set()
    n_grid = raw.shape[1]
    for _ in range(n_samples):
        w = rng.random(raw.shape[2])
        k = int(rng.integers(0, n_grid))
        winners.add(int((raw[:, k, :] @ w).argmin()))
    return winners


def regime_threshold(
    d1_components,
    d2_components,
    g1: float,
    g2: float,
    weights: PlanningWeights,
) -> float:
    """Interference intensity above which design 2's surrogate risk undercuts design 1's.

    ``d*_components`` are the five non-geometry normalized scores (variance,
    mde, contamination, op cost, mismatch); ``g1 > g2`` are the designs'
    geometry coefficients. Requires a positive weighted geometry gap.
    """
    c1 = np.asarray(d1_components, dtype=float)
    c2 = np.asarray(d2_components, dtype=float)
    if c1.shape != (5,) or c2.shape != (5,):
        raise ConfigurationError("non-geometry component vectors must have length 5")
    w = weights.as_vector()[1:]
    denom = weights.geometry * (g1 - g2)
    if denom <= 0:
        raise ConfigurationError("threshold needs g1 > g2 and a positive geometry weight")
    return float(w @ (c2 - c1) / denom)
