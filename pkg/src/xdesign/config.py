"""Run configuration: one nested JSON document describing a reproducible run.

The config names the panel source (synthetic spec or CSV path), calibration
overrides, the ambiguity grid, catalog overrides, planning weights, replication
count, and the master seed. Command-line flags may override only seed, reps,
output directory, and formats.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .designs import DesignSpec, OpCostInputs, default_catalog
from .errors import ConfigurationError
from .mechanisms import AmbiguityGrid, default_grid
from .panel import CalibrationScales, CsvSchema, Panel, SyntheticPanelConfig, calibrate_scales, generate_synthetic_panel, ingest_log_csv
from .risk import PlanningWeights

__all__ = ["RunConfig", "load_config", "config_digest"]

_TOP_KEYS = {
    "panel", "calibration", "grid", "catalog", "weights", "reps", "seed",
    "out", "formats", "shortlist_fraction", "epsilon_mode", "sweep", "diagnostics",
}
_FORMATS = ("json", "csv", "svg")


def _check_keys(section: str, data: dict, allowed: set[str]) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ConfigurationError(f"unknown {section} key {sorted(unknown)[0]!r}")


def _build_design(entry: dict) -> DesignSpec:
    _check_keys(
        "catalog entry",
        entry,
        {
            "kind", "name", "treat_prob", "block_length", "saturation_levels",
            "mixture_prob", "all_treated", "op_cost_level", "op_cost",
        },
    )
    if "kind" not in entry:
        raise ConfigurationError("catalog entry missing 'kind'")
    kwargs: dict[str, Any] = {"kind": entry["kind"]}
    for key in ("name", "treat_prob", "block_length", "mixture_prob", "all_treated"):
        if key in entry:
            kwargs[key] = entry[key]
    if "saturation_levels" in entry:
        kwargs["saturation_levels"] = tuple(entry["saturation_levels"])
    if "op_cost" in entry and "op_cost_level" in entry:
        raise ConfigurationError("catalog entry sets both op_cost and op_cost_level")
    if "op_cost_level" in entry:
        kwargs["op_cost_inputs"] = OpCostInputs.flat(float(entry["op_cost_level"]))
    elif "op_cost" in entry:
        oc = entry["op_cost"]
        _check_keys(
            "op_cost",
            oc,
            {"effort", "orchestration", "rollback", "platform",
             "w_effort", "w_orchestration", "w_rollback", "w_platform"},
        )
        kwargs["op_cost_inputs"] = OpCostInputs(**oc)
    else:
        base = {d.kind: d.op_cost_inputs for d in default_catalog()}
        kwargs["op_cost_inputs"] = base.get(entry["kind"], OpCostInputs.flat(0.5))
    return DesignSpec(**kwargs)


@dataclass(frozen=True)
class RunConfig:
    """Parsed, validated run configuration."""

    data: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        _check_keys("config", self.data, _TOP_KEYS)
        panel = self.data.get("panel", {"synthetic": {}})
        if not isinstance(panel, dict) or len(panel) != 1 or next(iter(panel)) not in ("synthetic", "csv"):
            raise ConfigurationError("panel must have exactly one source: 'synthetic' or 'csv'")
        if self.reps < 1:
            raise ConfigurationError("reps must be >= 1")
        for fmt in self.formats:
            if fmt not in _FORMATS:
                raise ConfigurationError(f"unknown format {fmt!r}")
        if self.data.get("epsilon_mode", "fraction") not in ("fraction", "stderr"):
            raise ConfigurationError("epsilon_mode must be 'fraction' or 'stderr'")

    @property
    def reps(self) -> int:
        return int(self.data.get("reps", 10))

    @property
    def seed(self) -> int:
        return int(self.data.get("seed", 0))

    @property
    def out_dir(self) -> Path:
        return Path(self.data.get("out", "out"))

    @property
    def formats(self) -> tuple[str, ...]:
        return tuple(self.data.get("formats", list(_FORMATS)))

    @property
    def shortlist_fraction(self) -> float:
        return float(self.data.get("shortlist_fraction", 0.10))

    @property
    def epsilon_mode(self) -> str:
        return str(self.data.get("epsilon_mode", "fraction"))

    @property
    def diagnostics_options(self) -> dict:
        opts = self.data.get("diagnostics", {})
        _check_keys("diagnostics", opts, {"tolerance", "checks", "transport_count", "seed"})
        return opts

    def with_overrides(
        self,
        seed: int | None = None,
        reps: int | None = None,
        out: str | None = None,
        formats: tuple[str, ...] | None = None,
    ) -> "RunConfig":
        data = dict(self.data)
        if seed is not None:
            data["seed"] = seed
        if reps is not None:
            data["reps"] = reps
        if out is not None:
            data["out"] = out
        if formats is not None:
            data["formats"] = list(formats)
        return RunConfig(data)

    # Builders -------------------------------------------------------------

    def build_panel(self) -> Panel:
        source = self.data.get("panel", {"synthetic": {}})
        if "synthetic" in source:
            spec = dict(source["synthetic"])
            _check_keys(
                "synthetic panel",
                spec,
                {"n_units", "n_clusters", "n_budget_groups", "n_regions",
                 "n_periods", "baseline_mean", "baseline_sd"},
            )
            return generate_synthetic_panel(SyntheticPanelConfig(**spec), seed=self.seed)
        spec = dict(source["csv"])
        _check_keys("csv panel", spec, {"path", "schema"})
        if "path" not in spec:
            raise ConfigurationError("csv panel source needs a 'path'")
        schema = CsvSchema(**spec.get("schema", {}))
        with open(spec["path"], "r", encoding="utf-8", newline="") as handle:
            return ingest_log_csv(handle, schema)

    def build_calibration(self, panel: Panel) -> CalibrationScales:
        overrides = dict(self.data.get("calibration", {}))
        _check_keys(
            "calibration",
            overrides,
            {"direct_effect", "spill_scale", "carry_scale", "graph_frac", "budget_frac", "noise_sd"},
        )
        return calibrate_scales(panel, **overrides)

    def build_grid(self) -> AmbiguityGrid:
        spec = self.data.get("grid")
        if not spec:
            return default_grid()
        _check_keys("grid", spec, {"graph_spill", "budget_spill", "carryover", "localities"})
        kwargs = {}
        for key in ("graph_spill", "budget_spill", "carryover", "localities"):
            if key in spec:
                kwargs[key] = tuple(spec[key])
        return AmbiguityGrid.from_axes(**kwargs)

    def build_catalog(self) -> list[DesignSpec]:
        entries = self.data.get("catalog")
        if not entries:
            return default_catalog()
        catalog = [_build_design(dict(entry)) for entry in entries]
        names = [d.name for d in catalog]
        if len(set(names)) != len(names):
            raise ConfigurationError("catalog design names must be unique")
        return catalog

    def build_weights(self) -> PlanningWeights:
        spec = dict(self.data.get("weights", {}))
        _check_keys(
            "weights",
            spec,
            {"geometry", "variance", "mde", "contamination", "op_cost", "mismatch",
             "alpha", "beta", "t_weeks", "periods_per_week"},
        )
        return PlanningWeights(**spec)

    def sweep_options(self) -> dict:
        opts = dict(self.data.get("sweep", {}))
        _check_keys("sweep", opts, {"gamma_grid", "locality", "reps", "seed"})
        return opts


def load_config(path: str | Path | None) -> RunConfig:
    """Read a JSON run config; a missing path falls back to the built-in defaults."""
    if path is None:
        return RunConfig({})
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigurationError("config root must be a JSON object")
    return RunConfig(data)


def config_digest(config: RunConfig) -> str:
    """Stable digest of the effective configuration."""
    canonical = json.dumps(config.data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
