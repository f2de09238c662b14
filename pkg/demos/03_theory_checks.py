"""Stress the guarantees behind the selector with controlled constructions.

Four numerical checks: the transport bound on exposure-response bias, its
worst-case tightness, the finite-catalog approximation gap, and how planning
MDE scales with duration and assignment-unit counts.
"""

from pathlib import Path

import xdesign as xd
from xdesign.diagnostics import (
    catalog_approximation_check,
    default_transport_scenarios,
    mde_grid,
    minimax_tightness_check,
    random_smooth_surface,
    transport_bound_check,
)
from xdesign.svg import write_heat_table, write_scatter

OUT = Path(__file__).parent / "out"


def main() -> None:
    OUT.mkdir(exist_ok=True)

    # 1. Bias of any smooth exposure response is bounded by L * W1.
    report = transport_bound_check(default_transport_scenarios(100, seed=2024), seed=0)
    worst = max(c["bias"] - c["bound"] for c in report["cases"])
    print(f"transport bound: {len(report['cases'])} beta-shift scenarios, "
          f"all pass = {report['passed']}, worst slack = {worst:.2e}")
    write_scatter(OUT / "03_transport.svg",
                  [(c["bound"], c["bias"]) for c in report["cases"]],
                  "Observed bias vs transport bound",
                  x_label="L * W1", y_label="bias")

    # 2. The bound is attained exactly by the steepest admissible response.
    report = minimax_tightness_check((0.5, 1.0, 2.0), (0.1, 0.3, 0.6))
    ratios = sorted({round(c["ratio"], 12) for c in report["cases"]})
    print(f"minimax tightness: attained/penalty ratios = {ratios}")

    # 3. A finite catalog is near-optimal when the risk surface is smooth.
    surface, lipschitz = random_smooth_surface(seed=5)
    report = catalog_approximation_check(surface, lipschitz, (5, 10, 20, 40))
    print("catalog approximation (gap <= bound):")
    for case in report["cases"]:
        print(f"  size {case['size']:>2}: gap {case['gap']:.4f} <= bound {case['bound']:.4f}")

    # 4. MDE shrinks with duration only for designs that accrue assignment units.
    panel = xd.generate_synthetic_panel(
        xd.SyntheticPanelConfig(n_units=400, n_clusters=10, n_budget_groups=5,
                                n_regions=2, n_periods=16),
        seed=3,
    )
    weights = xd.PlanningWeights(t_weeks=2, periods_per_week=8)
    durations = (1, 2, 4, 8)
    report = mde_grid(xd.default_catalog(), panel, weights, durations, seed=0)
    print("planning MDE by design and duration (weeks):")
    header = "".join(f"{d:>8}w" for d in durations)
    print(f"  {'design':<13}{header}")
    for row in report["rows"]:
        cells = "".join(f"{row['mde'][d]:>9.4f}" for d in durations)
        print(f"  {row['design']:<13}{cells}")
    print("only the switchback row falls with duration: more weeks mean more blocks.")
    write_heat_table(OUT / "03_mde.svg",
                     [row["design"] for row in report["rows"]],
                     [f"{d}w" for d in durations],
                     [[row["mde"][d] for d in durations] for row in report["rows"]],
                     "Planning MDE by design and duration")
    print(f"\nwrote {OUT / '03_transport.svg'} and {OUT / '03_mde.svg'}")


if __name__ == "__main__":
    main()
