"""Plan from a logged dataset: CSV ingestion, support stress, and its effect on the decision.

Logs from an adaptive policy often cover the action space unevenly. The
effective-sample-size share of the logged propensities summarizes that thinness
and feeds the contamination and estimand-mismatch components as a support
stress, pushing the decision toward designs that are robust to it.
"""

import csv
import io

import numpy as np

import xdesign as xd


def fake_log(n_units: int, n_periods: int, adaptive: bool, seed: int) -> str:
    """A toy logged dataset in the default CSV schema."""
    rng = np.random.default_rng(seed)
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["unit_id", "period", "outcome", "cluster_id", "budget_id", "region_id", "propensity"])
    for i in range(n_units):
        for t in range(1, n_periods + 1):
            if adaptive:
                # Heavily skewed propensities: a few actions soak up the mass.
                propensity = float(np.clip(rng.beta(0.3, 3.0), 1e-4, 1.0))
            else:
                propensity = 0.5
            writer.writerow([
                f"u{i:03d}", t, f"{rng.normal(10.0, 1.0):.5f}",
                f"c{i % 12}", f"b{i % 5}", f"r{i % 2}", f"{propensity:.6f}",
            ])
    return buffer.getvalue()


def decide(panel: xd.Panel):
    calib = xd.calibrate_scales(panel, direct_effect=1.0)
    weights = xd.PlanningWeights(t_weeks=2, periods_per_week=4)
    scores = xd.score_grid(panel, xd.default_catalog(), xd.default_grid(), calib, weights,
                           reps=8, master_seed=0)
    decision = xd.robust_select(xd.risk_surface(scores, weights))
    names = [d.name for d in xd.default_catalog()]
    return names[decision.selected], [names[i] for i in decision.shortlist], decision


def main() -> None:
    for label, adaptive in (("uniform logging", False), ("adaptive logging", True)):
        panel = xd.ingest_log_csv(fake_log(240, 8, adaptive, seed=11))
        share = xd.ess_share(panel.propensities)
        selected, shortlist, decision = decide(panel)
        spread = max(decision.q) - min(decision.q)
        print(f"{label}:")
        print(f"  propensity range [{panel.propensities.min():.5f}, {panel.propensities.max():.5f}]")
        print(f"  effective-sample share = {share:.4f} -> support stress = {1 - share:.4f}")
        print(f"  selected: {selected}; shortlist: {', '.join(shortlist)}")
        print(f"  risk spread {spread:.3f}, margin {decision.separation_margin:.3f} "
              f"vs tolerance {2 * decision.epsilon_t:.3f}")
    print("\nthe stress term hits contamination and estimand mismatch for every")
    print("design equally, so it compresses relative differences on those")
    print("components; the recommendation should be read off the shortlist and")
    print("the margin-vs-tolerance comparison, not the single winner.")


if __name__ == "__main__":
    main()
