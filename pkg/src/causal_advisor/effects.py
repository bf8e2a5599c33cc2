"""Backdoor adjustment sets and average treatment effect estimation.

The adjustment policy is deliberately simple: in a DAG the parents of the
treatment block every backdoor path, so we adjust for exactly that set and
estimate the effect by ordinary least squares. Mediators are never included,
which makes the estimate a total effect.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CycleError, InvalidQueryError, SizeMismatchError, UnknownNodeError
from .graphs import MixedGraph, ancestors
from .stats import Dataset, ols_fit

__all__ = ["AteResult", "backdoor_adjustment_set", "estimate_ate"]


@dataclass(frozen=True)
class AteResult:
    """Adjusted and naive effect of one treatment column on one outcome."""

    treatment: int
    outcome: int
    adjustment_set: frozenset[int]
    effect: float
    std_error: float
    p_value: float
    naive_effect: float


def _check_query(g: MixedGraph, treatment: int, outcome: int) -> None:
    for v in (treatment, outcome):
        if not 0 <= v < len(g.node_labels):
            raise UnknownNodeError(f"node index {v} out of range")
    if treatment == outcome:
        raise InvalidQueryError("treatment and outcome must be distinct nodes")
    if not g.is_dag():
        raise CycleError("effect estimation requires a fully directed acyclic graph")


def backdoor_adjustment_set(g: MixedGraph, treatment: int, outcome: int) -> frozenset[int]:
    """Return the treatment's parent set, a valid backdoor set in a DAG.

    Raises InvalidQueryError if the outcome is an ancestor of the treatment,
    since no backdoor adjustment identifies a causal effect in that direction.
    """
    _check_query(g, treatment, outcome)
    if outcome in ancestors(g, treatment):
        raise InvalidQueryError(
            f"outcome {g.node_labels[outcome]!r} is an ancestor of treatment "
            f"{g.node_labels[treatment]!r}; the requested effect is not causal"
        )
    return frozenset(g.parents(treatment))


def estimate_ate(d: Dataset, g: MixedGraph, treatment: int, outcome: int) -> AteResult:
    """Estimate the average treatment effect by backdoor-adjusted regression.

    The effect is the treatment coefficient in the OLS of the outcome on the
    treatment plus its parents; naive_effect omits the adjustment set.
    """
    if tuple(d.column_names) != tuple(g.node_labels):
        raise SizeMismatchError(
            "dataset columns must match graph node labels exactly"
        )
    adj = backdoor_adjustment_set(g, treatment, outcome)
    regressors = sorted({treatment} | adj)
    fit = ols_fit(d, outcome, regressors)
    naive = ols_fit(d, outcome, [treatment])
    return AteResult(
        treatment=treatment,
        outcome=outcome,
        adjustment_set=adj,
        effect=fit.coefficients[treatment],
        std_error=fit.std_errors[treatment],
        p_value=fit.p_values[treatment],
        naive_effect=naive.coefficients[treatment],
    )
