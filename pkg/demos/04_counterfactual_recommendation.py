"""Counterfactual what-if queries and minimal-change recommendations.

Walks one at-risk student (all columns on the z scale) through the full
abduction / action / prediction pipeline:

  1. abduct the latent noise that explains the observed row,
  2. replay hypothetical interventions while holding that noise fixed,
  3. solve for the exact single-node value that reaches the pass mark,
  4. ask for the minimum-norm combined change across all actionable nodes.
"""

from __future__ import annotations

import math

from causal_advisor import (
    Intervention,
    LinearScm,
    MixedGraph,
    NodeEquation,
    Observation,
    counterfactual,
    recommend_min_change,
    solve_required_intervention,
)

N13, N16, N34, N39 = range(4)
LABELS = ("node13", "node16", "node34", "node39")
PASS_MARK = -0.901


def student_scm() -> LinearScm:
    graph = MixedGraph(
        LABELS,
        directed=[(N13, N16), (N34, N16), (N13, N39), (N16, N39), (N34, N39)],
    )
    return LinearScm(
        graph=graph,
        equations=(
            NodeEquation((), (), 0.0, 1.0),
            NodeEquation((N13, N34), (0.6, 0.4), 0.0, 0.48),
            NodeEquation((), (), 0.0, 1.0),
            NodeEquation((N13, N16, N34), (0.486, 0.19, 0.187), 0.0, 0.553503),
        ),
    )


def main() -> None:
    scm = student_scm()
    obs = Observation({N13: 0.06, N16: -2.57, N34: -0.365, N39: -1.29})
    print("observed row:", {LABELS[v]: x for v, x in sorted(obs.values.items())})
    print(f"pass mark   : outcome >= {PASS_MARK}")

    # Step 1: the outcome noise is whatever the equation cannot explain.
    echo = counterfactual(scm, obs, Intervention({}))
    u_outcome = echo.abducted_noise[N39]
    print(f"\nabducted outcome noise: {u_outcome:+.6f}")
    print(f"empty intervention reproduces the row: "
          f"{math.isclose(echo.counterfactual_values[N39], -1.29, abs_tol=1e-9)}")

    # Step 2: what if node13 had been 0.861, everything else as observed?
    what_if = counterfactual(
        scm, obs, Intervention({N13: 0.861, N16: -2.57, N34: -0.365})
    )
    outcome = what_if.counterfactual_values[N39]
    print(f"\ndo(node13 = 0.861): outcome {outcome:+.6f}"
          f"  passes: {outcome >= PASS_MARK}")

    # Step 3: the exact node13 value that lands on the mark, others held.
    exact = solve_required_intervention(
        scm, obs, target=N39, target_value=PASS_MARK, free=N13, held={N16, N34}
    )
    print(f"exact node13 value for the mark: {exact:.6f}")

    # Step 4: smallest combined shift over all three actionable nodes.
    plan = recommend_min_change(
        scm, obs, target=N39, threshold=PASS_MARK, actionable={N13, N16, N34}
    )
    deltas = {v: x - obs.values[v] for v, x in plan.assignments.items()}
    print("\nminimum-norm plan (all nodes move):")
    for v in sorted(deltas):
        print(f"  {LABELS[v]}: {obs.values[v]:+.3f} -> "
              f"{plan.assignments[v]:+.3f}  (delta {deltas[v]:+.3f})")
    norm = math.sqrt(sum(d * d for d in deltas.values()))
    print(f"  total movement (L2): {norm:.3f}")

    replay = counterfactual(scm, obs, plan)
    achieved = replay.counterfactual_values[N39]
    print(f"  replayed outcome: {achieved:+.6f}  passes: {achieved >= PASS_MARK}")

    # Single-node alternative: one hard change, mediation left intact.
    single = recommend_min_change(
        scm, obs, target=N39, threshold=PASS_MARK,
        actionable={N13, N16, N34}, mode="single",
    )
    (node, value), = single.assignments.items()
    print(f"\ncheapest single change: set {LABELS[node]} to {value:+.3f}"
          f"  (moves {abs(value - obs.values[node]):.3f})")
    outcome = counterfactual(scm, obs, single).counterfactual_values[N39]
    print(f"  replayed outcome: {outcome:+.6f}  passes: {outcome >= PASS_MARK}")


if __name__ == "__main__":
    main()
