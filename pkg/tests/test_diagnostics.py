"""Tests for the theorem-level stress checks and the regime sweep."""

import numpy as np
import pytest

from xdesign import PlanningWeights, SyntheticPanelConfig, default_catalog, generate_synthetic_panel
from xdesign.diagnostics import (
    SweepConfig,
    TransportScenario,
    catalog_approximation_check,
    default_sweep_mapping,
    default_transport_scenarios,
    dominance_check,
    mde_grid,
    minimax_tightness_check,
    oracle_comparison,
    random_smooth_surface,
    regime_sweep,
    transport_bound_check,
)
from xdesign.errors import ConfigurationError
from xdesign.panel import calibrate_scales


class TestTransportBound:
    def test_zero_shift_zero_bias(self):
        report = transport_bound_check([TransportScenario(shift=0.0)], seed=1)
        assert report["passed"]
        assert report["cases"][0]["bias"] <= 1e-9

    def test_point_mass_linear_response_is_tight(self):
        sc = TransportScenario(family="point", params=(0.4,), shift=0.3, lipschitz=2.0, response="linear")
        report = transport_bound_check([sc], seed=0)
        case = report["cases"][0]
        assert case["bias"] == pytest.approx(0.6, abs=1e-12)
        assert case["bound"] == pytest.approx(0.6, abs=1e-12)
        assert case["pass"]

    def test_hundred_beta_scenarios_pass(self):
        report = transport_bound_check(default_transport_scenarios(100, seed=7), seed=3)
        assert report["passed"]
        assert len(report["cases"]) == 100

    def test_forced_negative_tolerance_can_fail(self):
        # Tightness harness: an impossible tolerance must be reported as failure.
        sc = TransportScenario(family="point", params=(0.4,), shift=0.3, lipschitz=2.0, response="linear")
        report = transport_bound_check([sc], seed=0, tolerance=-1e-6)
        assert not report["passed"]


class TestMinimaxTightness:
    def test_ratios_are_one(self):
        report = minimax_tightness_check((0.5, 1.0, 2.0), (0.1, 0.3, 0.6))
        assert report["passed"]
        for case in report["cases"]:
            assert case["ratio"] == pytest.approx(1.0, abs=1e-9)

    def test_zero_shift_convention(self):
        report = minimax_tightness_check((1.0,), (0.0,))
        assert report["cases"][0]["ratio"] == 1.0

    def test_scaling_lipschitz_keeps_ratio(self):
        report = minimax_tightness_check((0.01, 100.0), (0.5,))
        assert all(c["ratio"] == pytest.approx(1.0, abs=1e-9) for c in report["cases"])


class TestCatalogApproximation:
    def test_exact_minimizer_in_catalog(self):
        report = catalog_approximation_check(lambda x: (np.asarray(x) - 0.5) ** 2, 1.0, (3,))
        assert report["cases"][0]["gap"] == pytest.approx(0.0, abs=1e-9)

    def test_absolute_value_worked_example(self):
        report = catalog_approximation_check(lambda x: np.abs(np.asarray(x) - 0.37), 1.0, (3,))
        case = report["cases"][0]
        assert case["gap"] == pytest.approx(0.13, abs=1e-4)
        assert case["bound"] == pytest.approx(0.25, abs=1e-12)
        assert case["pass"]

    def test_random_smooth_surfaces_pass(self):
        for seed in range(20):
            surface, lipschitz = random_smooth_surface(seed)
            report = catalog_approximation_check(surface, lipschitz, (5, 10, 20, 40))
            assert report["passed"], seed

    def test_radius_shrinks_with_size(self):
        surface, lipschitz = random_smooth_surface(1)
        report = catalog_approximation_check(surface, lipschitz, (5, 10, 20, 40))
        radii = [c["radius"] for c in report["cases"]]
        assert radii == sorted(radii, reverse=True)

    def test_small_catalog_rejected(self):
        with pytest.raises(ConfigurationError):
            catalog_approximation_check(lambda x: x, 1.0, (1,))


@pytest.fixture(scope="module")
def small_panel():
    return generate_synthetic_panel(
        SyntheticPanelConfig(n_units=120, n_clusters=6, n_budget_groups=4, n_regions=2, n_periods=8),
        seed=4,
    )


class TestMdeGrid:
    def test_switchback_duration_scaling(self, small_panel):
        weights = PlanningWeights(t_weeks=2, periods_per_week=4)
        designs = default_catalog()
        report = mde_grid(designs, small_panel, weights, durations=(1, 2, 4), seed=0)
        sb = next(r for r in report["rows"] if r["design"] == "switchback")
        # Doubling duration doubles blocks: MDE falls by 1/sqrt(2).
        assert sb["mde"][2] == pytest.approx(sb["mde"][1] / np.sqrt(2), rel=1e-9)
        assert sb["mde"][4] == pytest.approx(sb["mde"][1] / 2, rel=1e-9)

    def test_user_mde_duration_constant(self, small_panel):
        weights = PlanningWeights(t_weeks=2, periods_per_week=4)
        report = mde_grid(default_catalog(), small_panel, weights, durations=(1, 2, 4, 8), seed=0)
        user = next(r for r in report["rows"] if r["design"] == "user")
        values = list(user["mde"].values())
        assert values == [values[0]] * 4

    def test_monotone_nonincreasing_in_duration(self, small_panel):
        weights = PlanningWeights(t_weeks=2, periods_per_week=4)
        report = mde_grid(default_catalog(), small_panel, weights, durations=(1, 2, 4, 8), seed=0)
        for row in report["rows"]:
            values = [row["mde"][d] for d in (1, 2, 4, 8)]
            assert all(b <= a + 1e-12 for a, b in zip(values, values[1:])), row["design"]


class TestSweepMapping:
    def test_regime_order(self):
        # Graph ramps first, budget peaks mid-sweep, carryover rises last.
        g0, b0, l0 = default_sweep_mapping(0.0)
        assert (g0, b0, l0) == (0.0, 0.0, 0.0)
        g_mid, b_mid, l_mid = default_sweep_mapping(0.5)
        assert g_mid == pytest.approx(0.3)
        assert b_mid > 0
        assert l_mid == 0.0
        g1, b1, l1 = default_sweep_mapping(1.0)
        assert l1 == pytest.approx(0.2)
        assert b1 < max(default_sweep_mapping(0.7)[1], b_mid)

    def test_strictly_increasing_grid_required(self):
        with pytest.raises(ConfigurationError):
            SweepConfig(gamma_grid=(0.0, 0.0, 1.0))


class TestRegimeSweepSmall:
    def test_winner_map_deterministic(self, small_panel):
        calib = calibrate_scales(small_panel, direct_effect=1.0)
        weights = PlanningWeights(t_weeks=2, periods_per_week=4)
        cfg = SweepConfig(gamma_grid=(0.0, 0.5, 1.0), reps=3, seed=2)
        a = regime_sweep(cfg, small_panel, calib, default_catalog(), weights)
        b = regime_sweep(cfg, small_panel, calib, default_catalog(), weights)
        assert a.winners == b.winners
        assert np.array_equal(a.risks, b.risks)
        assert a.risks.shape == (3, 6)
        # Per-point normalization keeps each column a valid ranking.
        assert np.all(a.risks > 0)


class TestOracleComparison:
    def test_identical_rep_counts_identical_decision(self):
        report = oracle_comparison(low_reps=8, high_reps=8, seed=3)
        assert report["selected_low"] == report["selected_high"]
        assert report["risk_gap"] == pytest.approx(0.0, abs=1e-12)

    def test_shipped_default_matches(self):
        report = oracle_comparison(seed=0)
        assert report["passed"]
        assert report["selected_low"] == report["selected_high"]


class TestDominanceCheck:
    def test_constructed_fixtures(self):
        report = dominance_check(seed=0)
        assert report["passed"]
        assert report["dominating_audit"] == 0
        assert report["crossing_audit"] is None
        assert len(report["distinct_weight_winners"]) >= 2
