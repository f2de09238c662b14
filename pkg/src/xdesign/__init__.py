"""Robust randomization-design selection for online experiments under interference.

The library replays a catalog of implementable designs (user, cluster,
switchback, budget split, two-stage saturation, mixed) over a unit-by-period
panel, scores each design against a grid of plausible interference mechanisms,
and picks the design minimizing worst-case planning risk, returning a
certified shortlist when the risk surface is too flat for a unique answer.
"""

from .designs import AssignmentTable, DesignSpec, OpCostInputs, default_catalog, effective_units, replay
from .errors import (
    CalibrationError,
    ConfigurationError,
    IngestionError,
    PlanningError,
    XDesignError,
)
from .exposure import ExposurePanel, exposure_features, geometry_score, wasserstein1_1d
from .mechanisms import (
    AmbiguityGrid,
    MechanismPoint,
    OutcomeStrengths,
    default_grid,
    launch_effect,
    outcome_strengths,
)
from .panel import (
    CalibrationScales,
    CsvSchema,
    Panel,
    SyntheticPanelConfig,
    UnitRecord,
    calibrate_scales,
    ess_share,
    generate_synthetic_panel,
    ingest_log_csv,
)
from .risk import (
    ComponentScores,
    PlanningWeights,
    component_scores,
    contamination,
    estimand_mismatch,
    mde,
    operational_cost,
    score_grid,
    simulate_outcomes,
    variance_component,
)
from .selector import (
    RiskSurface,
    RobustDecision,
    dominance_audit,
    normalize,
    regime_threshold,
    risk_surface,
    robust_select,
    weight_winner_search,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguityGrid",
    "AssignmentTable",
    "CalibrationError",
    "CalibrationScales",
    "ComponentScores",
    "ConfigurationError",
    "CsvSchema",
    "DesignSpec",
    "ExposurePanel",
    "IngestionError",
    "MechanismPoint",
    "OpCostInputs",
    "OutcomeStrengths",
    "Panel",
    "PlanningError",
    "PlanningWeights",
    "RiskSurface",
    "RobustDecision",
    "SyntheticPanelConfig",
    "UnitRecord",
    "XDesignError",
    "calibrate_scales",
    "component_scores",
    "contamination",
    "default_catalog",
    "default_grid",
    "dominance_audit",
    "effective_units",
    "ess_share",
    "estimand_mismatch",
    "exposure_features",
    "generate_synthetic_panel",
    "geometry_score",
    "ingest_log_csv",
    "launch_effect",
    "mde",
    "normalize",
    "operational_cost",
    "outcome_strengths",
    "regime_threshold",
    "replay",
    "risk_surface",
    "robust_select",
    "score_grid",
    "simulate_outcomes",
    "variance_component",
    "wasserstein1_1d",
    "weight_winner_search",
]
