"""Linear-Gaussian structural causal models and counterfactual queries.

An SCM assigns every node an equation: value = intercept + sum of
coefficient * parent + noise. Counterfactuals follow the
abduction/action/prediction recipe: infer each individual's noise from
the observed row, sever the intervened nodes, and propagate forward
with the noise held fixed. On top of that sit the inverse queries: what
intervention value hits a required target, and what least-change
combination of actionable nodes reaches a threshold.

All work happens in whatever units the fitted data used (normalized
z-scores throughout the service layer); the engine itself is
unit-agnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DataValidationError,
    InvalidQueryError,
    MissingValueError,
    NumericalError,
    RankDeficiencyError,
    SizeMismatchError,
    UnknownNodeError,
    ZeroEffectError,
)
from .graphs import MixedGraph, topological_sort
from .stats import Dataset, ols_fit


@dataclass(frozen=True)
class NodeEquation:
    """One structural equation: parents, matched coefficients, intercept,
    and the variance of the exogenous noise term."""

    parents: tuple[int, ...]
    coefficients: tuple[float, ...]
    intercept: float
    noise_variance: float


@dataclass(frozen=True)
class LinearScm:
    """A DAG plus one linear equation per node.

    Immutable; interventions return a new model. Equation parent lists
    must match the graph exactly, so the two views never drift apart.
    """

    graph: MixedGraph
    equations: tuple[NodeEquation, ...]

    def __post_init__(self):
        g = self.graph
        order = topological_sort(g)  # raises CycleError unless a DAG
        if len(self.equations) != g.node_count:
            raise SizeMismatchError(
                f"{len(self.equations)} equations for {g.node_count} nodes"
            )
        for v in order:
            eq = self.equations[v]
            if set(eq.parents) != g.parents(v):
                raise DataValidationError(
                    f"equation parents for node {g.node_labels[v]!r} do not match the graph"
                )
            if len(eq.parents) != len(eq.coefficients):
                raise SizeMismatchError(
                    f"node {g.node_labels[v]!r}: {len(eq.parents)} parents, "
                    f"{len(eq.coefficients)} coefficients"
                )
            if eq.noise_variance < 0:
                raise DataValidationError(
                    f"node {g.node_labels[v]!r}: negative noise variance"
                )
            values = [*eq.coefficients, eq.intercept, eq.noise_variance]
            if not all(math.isfinite(x) for x in values):
                raise MissingValueError(
                    f"node {g.node_labels[v]!r}: non-finite equation term"
                )

    @property
    def node_labels(self) -> tuple[str, ...]:
        return self.graph.node_labels

    @property
    def node_count(self) -> int:
        return self.graph.node_count

    def index_of(self, label: str) -> int:
        return self.graph.index_of(label)


def _finite_map(values: dict, kind: str) -> dict[int, float]:
    out = {}
    for node, value in values.items():
        v = float(value)
        if not math.isfinite(v):
            raise MissingValueError(f"non-finite {kind} value for node {node}")
        out[int(node)] = v
    return out


@dataclass(frozen=True)
class Observation:
    """One individual's observed value per node, in model units."""

    values: dict[int, float]

    def __init__(self, values: dict):
        object.__setattr__(self, "values", _finite_map(values, "observed"))

    def require(self, node: int) -> float:
        if node not in self.values:
            raise MissingValueError(f"observation is missing node {node}")
        return self.values[node]


@dataclass(frozen=True)
class Intervention:
    """Do-assignments: node -> forced value. May be empty."""

    assignments: dict[int, float]

    def __init__(self, assignments: dict):
        object.__setattr__(
            self, "assignments", _finite_map(assignments, "intervention")
        )

    def is_empty(self) -> bool:
        return not self.assignments


@dataclass(frozen=True)
class CounterfactualResult:
    """Abducted noise, the full counterfactual value map, and which
    nodes were forced. Intervened nodes carry their do-values exactly."""

    abducted_noise: dict[int, float]
    counterfactual_values: dict[int, float]
    intervened: frozenset[int]


def fit_linear_scm(d: Dataset, g: MixedGraph) -> LinearScm:
    """Fit each node on its graph parents by ordinary least squares.

    Parentless nodes reduce to intercept = sample mean with the sample
    variance as noise. The graph must be a DAG whose labels match the
    dataset's columns.

    Raises
    ------
    RankDeficiencyError
        Naming the node whose parent columns are collinear.
    """
    if g.node_labels != d.column_names:
        raise SizeMismatchError("graph labels do not match dataset columns")
    topological_sort(g)  # DAG check
    equations = []
    for v in range(g.node_count):
        parents = tuple(sorted(g.parents(v)))
        try:
            fit = ols_fit(d, v, list(parents))
        except RankDeficiencyError as exc:
            raise RankDeficiencyError(
                f"node {g.node_labels[v]!r}: {exc}"
            ) from exc
        equations.append(
            NodeEquation(
                parents=parents,
                coefficients=tuple(fit.coefficients[p] for p in parents),
                intercept=fit.intercept,
                noise_variance=fit.residual_variance,
            )
        )
    return LinearScm(graph=g, equations=tuple(equations))


def abduct_noise(
    scm: LinearScm, obs: Observation, nodes: set[int] | frozenset[int] | None = None
) -> dict[int, float]:
    """Infer exogenous noise for the requested nodes (default: all).

    noise = observed − intercept − Σ coefficient · observed parent.

    Raises
    ------
    MissingValueError
        When the observation lacks a requested node or one of its parents.
    """
    wanted = sorted(set(nodes)) if nodes is not None else list(range(scm.node_count))
    out: dict[int, float] = {}
    for v in wanted:
        if not (0 <= v < scm.node_count):
            raise UnknownNodeError(f"node {v} outside the model")
        eq = scm.equations[v]
        residual = obs.require(v) - eq.intercept
        for p, c in zip(eq.parents, eq.coefficients):
            residual -= c * obs.require(p)
        out[v] = residual
    return out


def intervene(scm: LinearScm, i: Intervention) -> LinearScm:
    """Mutilated model: each assigned node loses its incoming edges and
    becomes the constant do-value with zero noise."""
    for node in i.assignments:
        if not (0 <= node < scm.node_count):
            raise UnknownNodeError(f"cannot intervene on unknown node {node}")
    if i.is_empty():
        return scm
    cut = set(i.assignments)
    edges = [(a, b) for a, b in scm.graph.directed if b not in cut]
    graph = MixedGraph(scm.node_labels, directed=edges)
    equations = []
    for v in range(scm.node_count):
        if v in cut:
            equations.append(
                NodeEquation((), (), intercept=i.assignments[v], noise_variance=0.0)
            )
        else:
            equations.append(scm.equations[v])
    return LinearScm(graph=graph, equations=tuple(equations))


def counterfactual(
    scm: LinearScm, obs: Observation, i: Intervention
) -> CounterfactualResult:
    """Pearl's three-step counterfactual for one observed individual.

    Abduction recovers the noise behind every non-intervened node,
    action severs the assigned nodes, prediction propagates values in
    topological order with the noise held fixed. The empty intervention
    therefore reproduces the observation.
    """
    cut = frozenset(i.assignments)
    noise = abduct_noise(
        scm, obs, nodes=set(range(scm.node_count)) - cut
    )
    mutilated = intervene(scm, i)
    values: dict[int, float] = {}
    for v in topological_sort(mutilated.graph):
        if v in cut:
            values[v] = i.assignments[v]
            continue
        eq = mutilated.equations[v]
        total = eq.intercept + noise[v]
        for p, c in zip(eq.parents, eq.coefficients):
            total += c * values[p]
        values[v] = total
    return CounterfactualResult(
        abducted_noise=noise, counterfactual_values=values, intervened=cut
    )


def composite_coefficient(scm: LinearScm, source: int, target: int) -> float:
    """Total linear effect of a unit change at source on target.

    Sum over all directed paths of the product of edge coefficients,
    computed by one forward pass in topological order.
    """
    for v in (source, target):
        if not (0 <= v < scm.node_count):
            raise UnknownNodeError(f"node {v} outside the model")
    effect = {source: 1.0}
    for v in topological_sort(scm.graph):
        if v == source:
            continue
        eq = scm.equations[v]
        total = 0.0
        for p, c in zip(eq.parents, eq.coefficients):
            if p in effect:
                total += c * effect[p]
        if total != 0.0:
            effect[v] = total
    return effect.get(target, 0.0)


def solve_required_intervention(
    scm: LinearScm,
    obs: Observation,
    target: int,
    target_value: float,
    free: int,
    held: set[int] | frozenset[int],
) -> float:
    """Do-value for one free node that drives the target to a required value.

    All ``held`` nodes are pinned at their observed values, the free
    node is the only moving part, and the composed linear map is
    inverted directly: the counterfactual outcome is affine in the
    do-value with slope equal to the composite path coefficient.

    Raises
    ------
    ZeroEffectError
        When no causal path from the free node reaches the target in
        the mutilated graph.
    """
    held = set(held)
    if free in held:
        raise InvalidQueryError("free node may not be held")
    if target == free or target in held:
        raise InvalidQueryError("target must stay un-intervened")
    pin = {h: obs.require(h) for h in held}
    pin[free] = obs.require(free)
    mutilated = intervene(scm, Intervention(pin))
    slope = composite_coefficient(mutilated, free, target)
    if slope == 0.0:
        raise ZeroEffectError(
            f"node {scm.node_labels[free]!r} has no effect on "
            f"{scm.node_labels[target]!r} under the given holds"
        )
    base = counterfactual(scm, obs, Intervention(pin)).counterfactual_values[target]
    value = obs.require(free) + (target_value - base) / slope
    if not math.isfinite(value):
        raise NumericalError("required intervention is not finite")
    return value


def recommend_min_change(
    scm: LinearScm,
    obs: Observation,
    target: int,
    threshold: float,
    actionable: set[int] | frozenset[int],
    mode: str = "all",
) -> Intervention:
    """Smallest intervention on actionable nodes reaching the threshold.

    In ``"all"`` mode (default) every actionable node is pinned
    simultaneously — parents severed — and the returned do-values are
    the observed values plus the least-norm shift
    ``delta = gap * c / ||c||^2``, where c holds each node's composite
    coefficient on the target and gap is the shortfall. In ``"single"``
    mode only the one node with the cheapest sufficient shift is
    intervened on, and its effect propagates through mediators. If the
    observed outcome already meets the threshold, the intervention is
    empty.

    The returned intervention is guaranteed to reach the threshold when
    replayed through ``counterfactual``: the exact solve lands on the
    threshold only up to rounding, so if the replay falls short the gap
    is widened — first by the smallest sufficient relative margin (at
    most 1e-10), then, when the gap is so small that a relative margin
    cannot move the outcome by even one representable step, by the
    replayed shortfall itself — until an actual replay clears the
    threshold.

    Raises
    ------
    ZeroEffectError
        When no actionable node can move the target.
    """
    if mode not in ("all", "single"):
        raise InvalidQueryError(f"unknown recommendation mode {mode!r}")
    nodes = sorted(set(actionable))
    if not nodes:
        raise InvalidQueryError("actionable set is empty")
    if target in nodes:
        raise InvalidQueryError("target may not be actionable")
    observed_outcome = obs.require(target)
    gap = threshold - observed_outcome
    if gap <= 0.0:
        return Intervention({})

    def verified(build) -> Intervention:
        widened = gap
        intervention = build(widened)
        for margin in (1e-12, 1e-11, 1e-10):
            replay = counterfactual(scm, obs, intervention)
            if replay.counterfactual_values[target] >= threshold:
                return intervention
            widened = gap * (1.0 + margin)
            intervention = build(widened)
        # A relative margin is powerless when the gap sits orders of
        # magnitude below the outcome itself (gap * 1e-10 can round to
        # nothing next to the outcome); widen by the replayed shortfall,
        # at least one representable step of the outcome, until it clears.
        step = math.ulp(max(1.0, abs(threshold), abs(observed_outcome)))
        for _ in range(64):
            replay = counterfactual(scm, obs, intervention)
            value = replay.counterfactual_values[target]
            if value >= threshold:
                return intervention
            widened += max(threshold - value, step)
            intervention = build(widened)
        raise NumericalError(
            "recommendation replay cannot be verified to reach the threshold"
        )

    if mode == "all":
        pin = {v: obs.require(v) for v in nodes}
        mutilated = intervene(scm, Intervention(pin))
        coeffs = [composite_coefficient(mutilated, v, target) for v in nodes]
        norm_sq = sum(c * c for c in coeffs)
        if norm_sq == 0.0:
            raise ZeroEffectError("no actionable node affects the target")
        return verified(
            lambda g: Intervention(
                {v: obs.require(v) + g * c / norm_sq for v, c in zip(nodes, coeffs)}
            )
        )

    best: tuple[float, int, float] | None = None  # (|shift|, node, slope)
    for v in nodes:
        mutilated = intervene(scm, Intervention({v: obs.require(v)}))
        slope = composite_coefficient(mutilated, v, target)
        if slope == 0.0:
            continue
        shift = gap / slope
        if best is None or abs(shift) < best[0]:
            best = (abs(shift), v, slope)
    if best is None:
        raise ZeroEffectError("no actionable node affects the target")
    _, node, slope = best
    return verified(lambda g: Intervention({node: obs.require(node) + g / slope}))
