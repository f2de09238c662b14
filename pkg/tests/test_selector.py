"""Tests for normalization, risk aggregation, robust selection, and its certificates."""

import numpy as np
import pytest

from xdesign import (
    ComponentScores,
    ConfigurationError,
    PlanningWeights,
    RiskSurface,
    dominance_audit,
    normalize,
    regime_threshold,
    risk_surface,
    robust_select,
    weight_winner_search,
)

W = PlanningWeights()
WEIGHT_VECTOR = np.array([1.00, 0.80, 0.75, 0.45, 0.45, 0.65])


def scores_from_vector(vec, reps=1) -> ComponentScores:
    g, v, m, c, o, e = vec
    return ComponentScores(geometry=g, variance=v, mde=m, contamination=c,
                           op_cost=o, mismatch=e, reps=reps)


def surface_from_array(raw: np.ndarray) -> RiskSurface:
    grid = [[scores_from_vector(raw[d, k]) for k in range(raw.shape[1])] for d in range(raw.shape[0])]
    return risk_surface(grid, W)


class TestNormalize:
    def test_divides_by_component_max(self):
        raw = np.zeros((2, 1, 6))
        raw[0, 0] = [2, 2, 2, 2, 2, 2]
        raw[1, 0] = [4, 4, 4, 4, 4, 4]
        out = normalize(raw)
        assert np.allclose(out[0, 0], 0.5)
        assert np.allclose(out[1, 0], 1.0)

    def test_zero_component_stays_zero(self):
        raw = np.zeros((2, 2, 6))
        out = normalize(raw)
        assert np.all(out == 0.0)

    def test_preserves_within_component_order(self):
        rng = np.random.default_rng(0)
        raw = rng.uniform(0, 5, size=(4, 3, 6))
        out = normalize(raw)
        for comp in range(6):
            flat_raw = raw[:, :, comp].ravel()
            flat_out = out[:, :, comp].ravel()
            assert np.array_equal(np.argsort(flat_raw), np.argsort(flat_out))

    def test_shape_validation(self):
        with pytest.raises(ConfigurationError):
            normalize(np.zeros((2, 3)))


class TestRiskSurface:
    def test_weighted_sum_recomputable(self):
        rng = np.random.default_rng(1)
        raw = rng.uniform(0.1, 3.0, size=(3, 4, 6))
        surface = surface_from_array(raw)
        manual = surface.normalized @ WEIGHT_VECTOR
        assert np.max(np.abs(surface.risks - manual)) < 1e-12

    def test_all_ones_sum_to_weight_total(self):
        raw = np.ones((2, 2, 6))
        surface = surface_from_array(raw)
        assert np.allclose(surface.risks, 4.10)

    def test_geometry_only_weights(self):
        raw = np.random.default_rng(2).uniform(0.5, 2.0, size=(3, 2, 6))
        w = PlanningWeights(geometry=1.0, variance=0, mde=0, contamination=0, op_cost=0, mismatch=0)
        grid = [[scores_from_vector(raw[d, k]) for k in range(2)] for d in range(3)]
        surface = risk_surface(grid, w)
        assert np.allclose(surface.risks, surface.normalized[:, :, 0])

    def test_zero_vector_zero_risk(self):
        raw = np.zeros((2, 1, 6))
        assert np.all(surface_from_array(raw).risks == 0.0)

    def test_ragged_grid_rejected(self):
        a = scores_from_vector([1, 1, 1, 1, 1, 1])
        with pytest.raises(ConfigurationError):
            risk_surface([[a, a], [a]], W)


class TestRobustSelect:
    def test_dominating_design_selected_and_shortlisted(self):
        raw = np.ones((3, 4, 6))
        raw[1] = 0.2  # design 1 lowest everywhere
        decision = robust_select(surface_from_array(raw))
        assert decision.selected == 1
        assert 1 in decision.shortlist

    def test_shortlist_arithmetic(self):
        # Worst-case risks {1.0, 1.15, 1.5} and fraction 0.10: cutoff 1.2.
        surface = RiskSurface(
            raw=np.zeros((3, 1, 6)),
            normalized=np.zeros((3, 1, 6)),
            risks=np.array([[1.0], [1.15], [1.5]]),
            weights=W,
            scale=np.ones(6),
        )
        decision = robust_select(surface, shortlist_fraction=0.10)
        assert decision.selected == 0
        assert decision.epsilon_t == pytest.approx(0.1)
        assert decision.shortlist == (0, 1)
        assert decision.separation_margin == pytest.approx(0.15)

    def test_tie_breaks_by_catalog_order(self):
        surface = RiskSurface(
            raw=np.zeros((3, 1, 6)),
            normalized=np.zeros((3, 1, 6)),
            risks=np.array([[2.0], [1.0], [1.0]]),
            weights=W,
            scale=np.ones(6),
        )
        decision = robust_select(surface)
        assert decision.selected == 1
        assert decision.shortlist[0] == 1
        assert 2 in decision.shortlist

    def test_worst_theta_recorded(self):
        risks = np.array([[1.0, 3.0, 2.0], [2.5, 0.5, 1.0]])
        surface = RiskSurface(
            raw=np.zeros((2, 3, 6)), normalized=np.zeros((2, 3, 6)),
            risks=risks, weights=W, scale=np.ones(6),
        )
        decision = robust_select(surface)
        assert decision.worst_theta == (1, 0)
        assert decision.q == (3.0, 2.5)

    def test_explicit_epsilon_overrides_fraction(self):
        surface = RiskSurface(
            raw=np.zeros((2, 1, 6)), normalized=np.zeros((2, 1, 6)),
            risks=np.array([[1.0], [1.05]]), weights=W, scale=np.ones(6),
        )
        tight = robust_select(surface, epsilon_t=0.01)
        assert tight.shortlist == (0,)
        loose = robust_select(surface, epsilon_t=0.5)
        assert loose.shortlist == (0, 1)

    def test_stderr_epsilon_mode(self):
        cells = [
            [ComponentScores(1, 1, 1, 1, 1, 1, reps=4, se=(0.1, 0, 0, 0, 0, 0))],
            [ComponentScores(2, 2, 2, 2, 2, 2, reps=4, se=(0.3, 0, 0, 0, 0, 0))],
        ]
        surface = risk_surface(cells, W)
        decision = robust_select(surface, epsilon_mode="stderr")
        # max normalized geometry se = 0.3 / 2 = 0.15, weighted by w_g = 1.
        assert decision.epsilon_t == pytest.approx(0.15)


class TestDominanceAudit:
    def test_componentwise_minimum_detected(self):
        rng = np.random.default_rng(3)
        raw = rng.uniform(0.5, 1.5, size=(4, 5, 6))
        raw[2] = raw.min(axis=0) - 0.1
        assert dominance_audit(raw) == 2

    def test_crossing_components_return_none(self):
        raw = np.ones((2, 1, 6))
        raw[0, 0, 0], raw[0, 0, 1] = 0.1, 2.0
        raw[1, 0, 0], raw[1, 0, 1] = 2.0, 0.1
        assert dominance_audit(raw) is None

    def test_weight_search_finds_multiple_winners_on_crossing(self):
        rng = np.random.default_rng(4)
        raw = rng.uniform(0.4, 1.2, size=(3, 6, 6))
        raw[0, :, 0] = 0.01
        raw[0, :, 1] = 3.0
        raw[1, :, 0] = 3.0
        raw[1, :, 1] = 0.01
        assert dominance_audit(raw) is None
        winners = weight_winner_search(raw, n_samples=1000, seed=0)
        assert len(winners) >= 2

    def test_weight_search_single_winner_under_dominance(self):
        raw = np.ones((3, 2, 6))
        raw[1] = 0.1
        winners = weight_winner_search(raw, n_samples=500, seed=1)
        assert winners == {1}


class TestRegimeThreshold:
    def test_equal_non_geometry_components_zero(self):
        comps = [0.3, 0.4, 0.2, 0.5, 0.1]
        assert regime_threshold(comps, comps, g1=1.0, g2=0.4, weights=W) == 0.0

    def test_worked_example(self):
        # Weighted non-geometry gap 0.2 and geometry gap w_g * 0.5 -> 0.4.
        w = PlanningWeights(geometry=1.0, variance=1.0, mde=0, contamination=0, op_cost=0, mismatch=0)
        d1 = [0.0, 0, 0, 0, 0]
        d2 = [0.2, 0, 0, 0, 0]
        assert regime_threshold(d1, d2, g1=1.0, g2=0.5, weights=w) == pytest.approx(0.4)

    def test_equal_geometry_errors(self):
        with pytest.raises(ConfigurationError):
            regime_threshold([0] * 5, [0] * 5, g1=1.0, g2=1.0, weights=W)

    def test_threshold_is_the_crossing_point(self):
        # Above the threshold design 2's surrogate risk is lower; below, higher.
        rng = np.random.default_rng(5)
        for _ in range(20):
            d1 = rng.uniform(0, 1, 5)
            d2 = rng.uniform(0, 1, 5)
            g1, g2 = 0.9, 0.3
            gamma_star = regime_threshold(d1, d2, g1, g2, W)

            def surrogate(gamma, g, comps):
                return W.geometry * gamma * g + float(np.array([W.variance, W.mde, W.contamination, W.op_cost, W.mismatch]) @ comps)

            for gamma in (gamma_star + 0.05, gamma_star + 1.0):
                assert surrogate(gamma, g2, d2) < surrogate(gamma, g1, d1) + 1e-9
            for gamma in (gamma_star - 0.05, gamma_star - 1.0):
                assert surrogate(gamma, g2, d2) > surrogate(gamma, g1, d1) - 1e-9


class TestSelectorCertificate:
    """Perturbed-surface guarantees: excess risk, exact recovery, shortlist coverage."""

    def run_trials(self, n_trials=200, seed=0):
        rng = np.random.default_rng(seed)
        results = []
        for _ in range(n_trials):
            n_designs, n_grid = 6, 10
            true_comps = rng.uniform(0.0, 1.0, size=(n_designs, n_grid, 6))
            eps_components = rng.uniform(0.005, 0.03, size=6)
            noise = rng.uniform(-1.0, 1.0, size=true_comps.shape) * eps_components
            observed = true_comps + noise

            true_risks = true_comps @ WEIGHT_VECTOR
            true_q = true_risks.max(axis=1)
            eps_t = float(WEIGHT_VECTOR @ eps_components)

            surface = RiskSurface(
                raw=observed, normalized=observed,
                risks=observed @ WEIGHT_VECTOR, weights=W, scale=np.ones(6),
            )
            decision = robust_select(surface, epsilon_t=eps_t)
            true_best = int(true_q.argmin())
            margin = float(np.sort(true_q)[1] - true_q.min())
            results.append(
                {
                    "excess": float(true_q[decision.selected] - true_q[true_best]),
                    "eps_t": eps_t,
                    "margin": margin,
                    "recovered": decision.selected == true_best,
                    "covered": true_best in decision.shortlist,
                }
            )
        return results

    def test_excess_risk_bounded_by_2eps(self):
        for r in self.run_trials():
            assert r["excess"] <= 2 * r["eps_t"] + 1e-12

    def test_exact_recovery_under_margin(self):
        trials = self.run_trials()
        with_margin = [r for r in trials if r["margin"] > 2 * r["eps_t"]]
        assert len(with_margin) >= 50  # construction sanity: margins do occur
        assert all(r["recovered"] for r in with_margin)

    def test_shortlist_always_covers_true_optimum(self):
        assert all(r["covered"] for r in self.run_trials())


class TestDeterminism:
    def test_risk_surface_independent_of_grid_order(self):
        rng = np.random.default_rng(6)
        raw = rng.uniform(0.2, 2.0, size=(3, 5, 6))
        surface = surface_from_array(raw)
        perm = rng.permutation(5)
        permuted = surface_from_array(raw[:, perm, :])
        assert np.allclose(np.sort(surface.risks, axis=1), np.sort(permuted.risks, axis=1))
        d1 = robust_select(surface)
        d2 = robust_select(permuted)
        assert d1.selected == d2.selected
        assert d1.q == d2.q
