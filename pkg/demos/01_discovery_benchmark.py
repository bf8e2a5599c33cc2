"""Recover a known causal structure from synthetic data with PC and GES.

Generates the eight-column chain benchmark (six features feeding an outcome
y, plus an instrument x7 -> x3), runs both discovery algorithms, and compares
the results against the CPDAG of the true graph.  Also sweeps the sample size
to show how edge errors shrink as n grows.
"""

from __future__ import annotations

import warnings

import numpy as np

from causal_advisor import (
    OrientationConflictWarning,
    SynthConfig,
    dag_to_cpdag,
    generate_chain_synthetic,
    ges_discover,
    pc_discover,
    shd,
)


def edge_names(graph):
    labels = graph.node_labels
    directed = sorted(f"{labels[a]} -> {labels[b]}" for a, b in graph.directed)
    undirected = sorted(f"{labels[a]} -- {labels[b]}" for a, b in graph.undirected)
    return directed + undirected


def main() -> None:
    bundle = generate_chain_synthetic(SynthConfig(n=5000, seed=0))
    data = bundle.dataset
    target = dag_to_cpdag(bundle.truth_dag)

    print(f"dataset: {data.values.shape[0]} rows x {len(data.column_names)} columns")
    print("true CPDAG:")
    for e in edge_names(target):
        print(f"  {e}")

    pc = pc_discover(data)
    ges = ges_discover(data)
    print(f"\nPC  SHD vs truth: {shd(pc, target)}")
    print(f"GES SHD vs truth: {shd(ges, target)}")
    print(f"PC and GES agree: {pc == ges}")
    print("PC output:")
    for e in edge_names(pc):
        print(f"  {e}")

    # Small samples leave the CI tests underpowered, so errors appear
    # (including conflicting collider proposals, silenced here).
    print("\nsample-size sweep (mean SHD over 10 seeds):")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OrientationConflictWarning)
        for n in (200, 1000, 5000):
            errs = []
            for seed in range(10):
                b = generate_chain_synthetic(SynthConfig(n=n, seed=seed))
                errs.append(shd(pc_discover(b.dataset), dag_to_cpdag(b.truth_dag)))
            print(f"  n={n:5d}  mean SHD {np.mean(errs):.2f}")


if __name__ == "__main__":
    main()
