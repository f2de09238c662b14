"""Executable stress tests for the selector's guarantees.

Each check constructs a controlled scenario in which the relevant bound or
equality can be verified numerically: transport bias bounds, minimax tightness
of the geometry penalty, finite-catalog approximation, MDE scaling with
duration, the mechanism-intensity regime sweep, and the low-vs-high
replication oracle comparison. Every check is deterministic given its seed and
returns a JSON-ready report dict with a top-level ``passed`` flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .designs import DesignSpec, default_catalog, effective_units, replay
from .errors import ConfigurationError
from .exposure import wasserstein1_1d
from .mechanisms import LOCALITIES, AmbiguityGrid, MechanismPoint
from .panel import CalibrationScales, Panel, SyntheticPanelConfig, calibrate_scales, generate_synthetic_panel
from .risk import PlanningWeights, mde, score_grid, variance_component
from .selector import dominance_audit, risk_surface, robust_select, weight_winner_search

__all__ = [
    "TransportScenario",
    "SweepConfig",
    "SweepResult",
    "OracleConfig",
    "default_transport_scenarios",
    "transport_bound_check",
    "minimax_tightness_check",
    "random_smooth_surface",
    "catalog_approximation_check",
    "mde_grid",
    "default_sweep_mapping",
    "default_sweep_config",
    "regime_sweep",
    "default_oracle_config",
    "oracle_comparison",
    "dominance_check",
]

TOLERANCE = 1e-9


# ---------------------------------------------------------------------------
# Transport bound and minimax tightness


@dataclass(frozen=True)
class TransportScenario:
    """One bias-vs-bound case: a baseline sample, a shift, and a response class."""

    family: str = "beta"  # "beta" | "normal" | "point"
    params: tuple[float, ...] = (2.0, 5.0)
    shift: float = 0.3
    lipschitz: float = 1.0
    n: int = 400
    response: str = "piecewise_linear"  # "piecewise_linear" | "linear"

    def __post_init__(self) -> None:
        if self.lipschitz <= 0:
            raise ConfigurationError("lipschitz must be > 0")
        if self.n < 1:
            raise ConfigurationError("sample size must be >= 1")
        if self.family not in ("beta", "normal", "point"):
            raise ConfigurationError(f"unknown sample family {self.family!r}")
        if self.response not in ("piecewise_linear", "linear"):
            raise ConfigurationError(f"unknown response family {self.response!r}")


def _draw_baseline(scenario: TransportScenario, rng: np.random.Generator) -> np.ndarray:
    if scenario.family == "beta":
        a, b = scenario.params
        return rng.beta(a, b, scenario.n)
    if scenario.family == "normal":
        mu, sd = scenario.params
        return rng.normal(mu, sd, scenario.n)
    (x0,) = scenario.params
    return np.full(scenario.n, float(x0))


def _make_response(
    scenario: TransportScenario, lo: float, hi: float, rng: np.random.Generator
) -> Callable[[np.ndarray], np.ndarray]:
    L = scenario.lipschitz
    if scenario.response == "linear":
        return lambda x: L * x
    # Piecewise-linear with slopes clipped to [-L, L]: Lipschitz by construction.
    n_knots = 9
    xs = np.linspace(lo - 1e-9, hi + 1e-9, n_knots)
    slopes = rng.uniform(-L, L, n_knots - 1)
    ys = np.concatenate([[0.0], np.cumsum(slopes * np.diff(xs))])
    return lambda x: np.interp(x, xs, ys)


def default_transport_scenarios(count: int = 100, seed: int = 2024) -> list[TransportScenario]:
    """Seeded beta-shift scenarios with random Lipschitz constants."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        out.append(
            TransportScenario(
                family="beta",
                params=(float(rng.uniform(0.6, 5.0)), float(rng.uniform(0.6, 5.0))),
                shift=float(rng.uniform(-1.0, 1.0)),
                lipschitz=float(rng.uniform(0.25, 4.0)),
                n=400,
                response="piecewise_linear",
            )
        )
    return out


def transport_bound_check(
    scenarios: Sequence[TransportScenario], seed: int = 0, tolerance: float = TOLERANCE
) -> dict:
    """Verify |mean r(P) - mean r(Q)| <= L * W1(P, Q) per scenario.

    Q is P shifted by the scenario's shift; r is drawn from the scenario's
    Lipschitz response family.
    """
    cases = []
    for i, sc in enumerate(scenarios):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, i)))
        p = _draw_baseline(sc, rng)
        q = p + sc.shift
        r = _make_response(sc, float(min(p.min(), q.min())), float(max(p.max(), q.max())), rng)
        bias = abs(float(r(p).mean()) - float(r(q).mean()))
        bound = sc.lipschitz * wasserstein1_1d(p, q)
        cases.append(
            {
                "family": sc.family,
                "shift": sc.shift,
                "lipschitz": sc.lipschitz,
                "bias": bias,
                "bound": bound,
                "pass": bias <= bound + tolerance,
            }
        )
    return {
        "check": "transport_bound",
        "passed": all(c["pass"] for c in cases),
        "tolerance": tolerance,
        "cases": cases,
    }


def minimax_tightness_check(
    L_values: Sequence[float],
    delta_values: Sequence[float],
    n: int = 64,
    origin: float = 0.2,
    tolerance: float = TOLERANCE,
) -> dict:
    """Point-mass construction attaining the geometry penalty exactly.

    With P a point mass, Q its shift by delta, and the steepest admissible
    linear response, the attained gap equals the penalty, so every ratio is 1.
    A zero shift is reported as ratio 1 by convention (0/0 guard).
    """
    cases = []
    for L in L_values:
        for delta in delta_values:
            p = np.full(n, origin)
            q = p + delta
            gap = abs(float(L * p.mean()) - float(L * q.mean()))
            penalty = L * wasserstein1_1d(p, q)
            ratio = gap / penalty if penalty > 0 else 1.0
            cases.append(
                {
                    "lipschitz": float(L),
                    "shift": float(delta),
                    "ratio": ratio,
                    "pass": abs(ratio - 1.0) <= tolerance,
                }
            )
    return {
        "check": "minimax_tightness",
        "passed": all(c["pass"] for c in cases),
        "tolerance": tolerance,
        "cases": cases,
    }


# ---------------------------------------------------------------------------
# Finite-catalog approximation


def random_smooth_surface(seed: int = 0) -> tuple[Callable[[np.ndarray], np.ndarray], float]:
    """A random low-frequency Fourier surface on [0, 1] and a bound on its slope."""
    rng = np.random.default_rng(seed)
    n_terms = int(rng.integers(3, 7))
    freqs = rng.integers(1, 5, n_terms)
    amps = rng.uniform(0.1, 1.0, n_terms)
    phases = rng.uniform(0.0, 2.0 * math.pi, n_terms)
    offset = float(rng.uniform(0.0, 2.0))

    def f(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        total = np.full_like(x, offset)
        for a, k, ph in zip(amps, freqs, phases):
            total = total + a * np.sin(2.0 * math.pi * k * x + ph)
        return total

    lipschitz = float(np.sum(2.0 * math.pi * freqs * amps))
    return f, lipschitz


def catalog_approximation_check(
    surface: Callable[[np.ndarray], np.ndarray],
    lipschitz: float,
    catalog_sizes: Sequence[int],
    dense_points: int = 100_000,
    tolerance: float = TOLERANCE,
) -> dict:
    """Compare uniform-grid catalog gaps with the Lipschitz-net bound.

    The global minimum is approximated by a dense scan; a size-k uniform grid
    is a net of radius 1 / (2 (k - 1)), so the observed gap must stay below
    lipschitz * radius.
    """
    if any(k < 2 for k in catalog_sizes):
        raise ConfigurationError("catalog sizes must be >= 2")
    dense = np.linspace(0.0, 1.0, dense_points)
    global_min = float(surface(dense).min())
    cases = []
    for k in catalog_sizes:
        catalog = np.linspace(0.0, 1.0, int(k))
        gap = float(surface(catalog).min()) - global_min
        radius = 1.0 / (2.0 * (k - 1))
        cases.append(
            {
                "size": int(k),
                "radius": radius,
                "gap": gap,
                "bound": lipschitz * radius,
                "pass": gap <= lipschitz * radius + tolerance,
            }
        )
    return {
        "check": "catalog_approximation",
        "passed": all(c["pass"] for c in cases),
        "lipschitz": lipschitz,
        "tolerance": tolerance,
        "cases": cases,
    }


# ---------------------------------------------------------------------------
# MDE grid


def mde_grid(
    designs: Sequence[DesignSpec],
    panel: Panel,
    weights: PlanningWeights,
    durations: Sequence[int],
    seed: int = 0,
) -> dict:
    """Planning MDE per design and duration.

    Each design's assignment-unit variance comes from one seeded replay
    aggregated over the panel's baseline outcomes; duration enters only
    through the effective assignment-unit count.
    """
    if any(d < 1 for d in durations):
        raise ConfigurationError("durations must be >= 1 week")
    rows = []
    for d_idx, design in enumerate(designs):
        table = replay(design, panel, None, seed=np.random.SeedSequence(entropy=(seed, d_idx)))
        v = variance_component(panel.baseline, table)
        cells = {}
        for t_weeks in durations:
            n_eff = effective_units(design, panel, int(t_weeks), weights.periods_per_week)
            cells[int(t_weeks)] = mde(v, n_eff, weights)
        rows.append({"design": design.name, "variance": v, "mde": cells})
    return {"check": "mde_grid", "durations": [int(d) for d in durations], "rows": rows, "passed": True}


# ---------------------------------------------------------------------------
# Regime sweep


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def default_sweep_mapping(gamma: float) -> tuple[float, float, float]:
    """Piecewise schedule from a scalar intensity to the three channel intensities.

    Ordered so that graph spillover ramps first, budget spillover peaks
    mid-sweep and recedes, and carryover dominates the top of the range.
    """
    g = 0.3 * _clamp01(3.0 * gamma - 0.5)
    b = 0.5 * _clamp01(2.0 * gamma - 0.4) * (1.0 - max(0.0, 2.0 * gamma - 1.4))
    lam = 0.2 * _clamp01(2.0 * gamma - 1.0)
    return g, b, lam


@dataclass(frozen=True)
class SweepConfig:
    """Mechanism-intensity sweep: grid, neighborhood locality, replications."""

    gamma_grid: tuple[float, ...] = tuple(round(0.1 * i, 2) for i in range(11))
    locality: str = "cluster"
    reps: int = 20
    seed: int = 0
    mapping: Callable[[float], tuple[float, float, float]] | None = None

    def __post_init__(self) -> None:
        if len(self.gamma_grid) < 2 or any(
            b <= a for a, b in zip(self.gamma_grid, self.gamma_grid[1:])
        ):
            raise ConfigurationError("gamma_grid must be strictly increasing with >= 2 points")
        if self.locality not in LOCALITIES:
            raise ConfigurationError(f"locality must be one of {LOCALITIES}")
        if self.reps < 1:
            raise ConfigurationError("reps must be >= 1")

    def theta(self, gamma: float) -> MechanismPoint:
        mapping = self.mapping or default_sweep_mapping
        g, b, lam = mapping(gamma)
        return MechanismPoint(g, b, lam, self.locality)


@dataclass(frozen=True)
class SweepResult:
    gammas: tuple[float, ...]
    thetas: tuple[MechanismPoint, ...]
    design_names: tuple[str, ...]
    risks: np.ndarray  # (n_gammas, n_designs), normalized within each gamma
    winners: tuple[int, ...]

    @property
    def winner_names(self) -> tuple[str, ...]:
        return tuple(self.design_names[w] for w in self.winners)

    @property
    def distinct_winners(self) -> tuple[str, ...]:
        seen: list[str] = []
        for name in self.winner_names:
            if name not in seen:
                seen.append(name)
        return tuple(seen)


def regime_sweep(
    cfg: SweepConfig,
    panel: Panel,
    calib: CalibrationScales,
    catalog: Sequence[DesignSpec],
    weights: PlanningWeights,
    max_workers: int | None = None,
) -> SweepResult:
    """Winner map over the intensity sweep.

    Components are recomputed per sweep point and normalized within that point
    across the catalog, so each column of the risk table is a self-contained
    design ranking.
    """
    catalog = list(catalog)
    risks = np.empty((len(cfg.gamma_grid), len(catalog)))
    winners = []
    thetas = []
    for g_idx, gamma in enumerate(cfg.gamma_grid):
        theta = cfg.theta(gamma)
        thetas.append(theta)
        grid = AmbiguityGrid((theta,))
        scores = score_grid(
            panel, catalog, grid, calib, weights,
            reps=cfg.reps, master_seed=cfg.seed, max_workers=max_workers,
        )
        surface = risk_surface(scores, weights)
        risks[g_idx] = surface.risks[:, 0]
        winners.append(int(surface.risks[:, 0].argmin()))
    return SweepResult(
        gammas=tuple(float(g) for g in cfg.gamma_grid),
        thetas=tuple(thetas),
        design_names=tuple(d.name for d in catalog),
        risks=risks,
        winners=tuple(winners),
    )


def default_sweep_config(
    reps: int = 20, seed: int = 0
) -> tuple[SweepConfig, SyntheticPanelConfig, dict, list[DesignSpec]]:
    """The shipped sweep setup: grid, panel shape, calibration, and catalog.

    Tuned so the interference regimes separate the catalog: user randomization
    is cheapest under weak interference, cluster randomization takes the early
    clustered-spillover band (its control arm sees no treated neighbors while
    every other design pays the contamination penalty), and the single-region
    per-period switchback wins once carryover dominates: lagged treatment
    inflates the between-unit spread of every constant-assignment design but
    averages out across alternating time blocks.
    """
    sweep = SweepConfig(reps=reps, seed=seed, locality="cluster")
    panel_cfg = SyntheticPanelConfig(
        n_units=2000,
        n_clusters=50,
        n_budget_groups=6,
        n_regions=1,
        n_periods=40,
        baseline_mean=10.0,
        baseline_sd=1.0,
    )
    calib_overrides = {
        "direct_effect": 1.0,
        "spill_scale": 0.5,
        "carry_scale": 1.0,
        "noise_sd": 0.5,
    }
    catalog = [
        d.with_overrides(saturation_levels=(0.15, 0.85)) if d.kind == "two_stage" else d
        for d in default_catalog()
    ]
    return sweep, panel_cfg, calib_overrides, catalog


# ---------------------------------------------------------------------------
# Oracle comparison


@dataclass(frozen=True)
class OracleConfig:
    """Controlled synthetic setup for the low-vs-high replication comparison.

    Shaped so the robust winner is decisively separated (few clusters make the
    cluster-unit designs power-starved), keeping the few-replay selection
    stable across seeds.
    """

    panel: SyntheticPanelConfig = field(
        default_factory=lambda: SyntheticPanelConfig(
            n_units=200, n_clusters=5, n_budget_groups=4, n_regions=3, n_periods=8
        )
    )
    grid: AmbiguityGrid = field(
        default_factory=lambda: AmbiguityGrid.from_axes(
            graph_spill=(0.0, 0.3),
            budget_spill=(0.0, 0.5),
            carryover=(0.0, 0.2),
            localities=("cluster",),
        )
    )
    weights: PlanningWeights = field(
        default_factory=lambda: PlanningWeights(t_weeks=2, periods_per_week=4)
    )
    calib_overrides: tuple[tuple[str, float], ...] = (("direct_effect", 1.0),)
    shortlist_fraction: float = 0.10


def default_oracle_config() -> OracleConfig:
    return OracleConfig()


def oracle_comparison(
    cfg: OracleConfig | None = None,
    low_reps: int = 45,
    high_reps: int = 260,
    seed: int = 0,
    max_workers: int | None = None,
) -> dict:
    """Compare a few-replay selection against a high-replication oracle run.

    Both runs share the panel and the replication seed schedule, so the
    low-rep run replays a prefix of the oracle's draws. Passes when both runs
    select the same design and the worst-case risk gap stays inside the
    oracle run's certificate band (twice its planning tolerance).
    """
    cfg = cfg or default_oracle_config()
    panel = generate_synthetic_panel(cfg.panel, seed=seed)
    calib = calibrate_scales(panel, **dict(cfg.calib_overrides))
    catalog = default_catalog()

    def run(reps: int):
        scores = score_grid(
            panel, catalog, cfg.grid, calib, cfg.weights,
            reps=reps, master_seed=seed, max_workers=max_workers,
        )
        return robust_select(risk_surface(scores, cfg.weights), cfg.shortlist_fraction)

    low = run(low_reps)
    high = run(high_reps)
    risk_gap = abs(low.q[low.selected] - high.q[high.selected])
    passed = low.selected == high.selected and risk_gap <= 2.0 * high.epsilon_t
    return {
        "check": "oracle_comparison",
        "passed": passed,
        "selected_low": catalog[low.selected].name,
        "selected_high": catalog[high.selected].name,
        "low_reps": low_reps,
        "high_reps": high_reps,
        "risk_gap": risk_gap,
        "epsilon_t": high.epsilon_t,
        "q_low": dict(zip((d.name for d in catalog), low.q)),
        "q_high": dict(zip((d.name for d in catalog), high.q)),
    }


# ---------------------------------------------------------------------------
# Dominance audit fixtures


def dominance_check(seed: int = 0, n_weight_samples: int = 1000) -> dict:
    """Exercise the dominance audit on constructed crossing and dominating surfaces."""
    rng = np.random.default_rng(seed)
    base = rng.uniform(0.2, 1.0, size=(4, 5, 6))
    dominating = base.copy()
    dominating[0] = base.min(axis=0) - 0.05  # strictly below every competitor

    crossing = base.copy()
    # Force a trade: design 0 best on the first component, worst on the second.
    crossing[0, :, 0] = 0.01
    crossing[0, :, 1] = 2.0
    crossing[1, :, 0] = 2.0
    crossing[1, :, 1] = 0.01

    dom_result = dominance_audit(dominating)
    cross_result = dominance_audit(crossing)
    winners = weight_winner_search(crossing, n_samples=n_weight_samples, seed=seed)
    passed = dom_result == 0 and cross_result is None and len(winners) >= 2
    return {
        "check": "dominance_audit",
        "passed": passed,
        "dominating_audit": dom_result,
        "crossing_audit": cross_result,
        "distinct_weight_winners": sorted(int(w) for w in winners),
    }
