"""Causal structure discovery: constraint-based PC and greedy score search.

Both algorithms take a :class:`~causal_advisor.stats.Dataset` plus
:class:`~causal_advisor.graphs.BackgroundKnowledge` and return a CPDAG
as a :class:`~causal_advisor.graphs.MixedGraph`. Knowledge acts as a
prior constraint, not a post-hoc filter: pairs forbidden in both
directions never enter the skeleton or the move set, and forced
directions are applied before collider orientation and Meek closure.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DataValidationError,
    KnowledgeConflictError,
    NumericalError,
    OrientationConflictWarning,
    RankDeficiencyError,
    SizeMismatchError,
    UnknownNodeError,
)
from .graphs import (
    BackgroundKnowledge,
    MixedGraph,
    PdagWorkspace,
    d_separated,
    dag_to_cpdag,
)
from .stats import Dataset, correlation_matrix, fisher_z_from_corr

def _norm(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class PcConfig:
    """Settings for the PC algorithm.

    ``max_conditioning_size`` of None applies the default rule: 3 for
    datasets with 20 or more columns, otherwise unlimited. ``stable``
    freezes neighbor sets per search depth so results are independent
    of evaluation order. ``ci_oracle`` replaces the statistical test
    with d-separation queries on a known DAG, for exactness testing.
    """

    alpha: float = 0.05
    max_conditioning_size: int | None = None
    stable: bool = True
    ci_oracle: MixedGraph | None = None

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie in (0,1), got {self.alpha}")
        if self.max_conditioning_size is not None and self.max_conditioning_size < 0:
            raise ValueError("max_conditioning_size must be non-negative")

    def effective_max_conditioning(self, p: int) -> int:
        if self.max_conditioning_size is not None:
            return self.max_conditioning_size
        return 3 if p >= 20 else p - 2


@dataclass(frozen=True)
class GesConfig:
    """Settings for greedy score-based search.

    ``penalty_multiplier`` scales the BIC complexity term; ``max_parents``
    of None leaves parent sets unbounded.
    """

    penalty_multiplier: float = 1.0
    max_parents: int | None = None

    def __post_init__(self):
        if self.penalty_multiplier <= 0.0:
            raise ValueError("penalty_multiplier must be positive")
        if self.max_parents is not None and self.max_parents < 0:
            raise ValueError("max_parents must be non-negative")


def _check_inputs(d: Dataset, k: BackgroundKnowledge) -> None:
    if d.n_cols < 2:
        raise DataValidationError("discovery needs at least 2 columns")
    if k.node_count != d.n_cols:
        raise SizeMismatchError(
            f"knowledge covers {k.node_count} nodes, dataset has {d.n_cols}"
        )


# ---------------------------------------------------------------------------
# PC
# ---------------------------------------------------------------------------

def _pc_skeleton(d, k, cfg):
    """Adjacency sets plus separating sets after the PC edge-removal phase."""
    p = d.n_cols
    if cfg.ci_oracle is not None:
        if cfg.ci_oracle.node_count != p:
            raise SizeMismatchError("ci_oracle node count differs from dataset")

        def independent(a, b, cond):
            return d_separated(cfg.ci_oracle, a, b, set(cond))
    else:
        corr = correlation_matrix(d)
        n = d.n_rows

        def independent(a, b, cond):
            return fisher_z_from_corr(corr, n, a, b, set(cond), cfg.alpha).independent

    protected = {_norm(a, b) for a, b in k.required}
    adj: list[set[int]] = [set() for _ in range(p)]
    for a, b in itertools.combinations(range(p), 2):
        if k.pair_excluded(a, b) and (a, b) not in protected:
            continue
        adj[a].add(b)
        adj[b].add(a)

    sepsets: dict[tuple[int, int], frozenset[int]] = {}
    max_depth = cfg.effective_max_conditioning(p)
    depth = 0
    while depth <= max_depth:
        frozen = [sorted(adj[v]) for v in range(p)] if cfg.stable else None
        pairs = sorted(
            (a, b) for a, b in itertools.combinations(range(p), 2) if b in adj[a]
        )
        candidates_left = False
        for a, b in pairs:
            if b not in adj[a] or (a, b) in protected:
                continue
            removed = False
            for base, other in ((a, b), (b, a)):
                pool = frozen[base] if cfg.stable else sorted(adj[base])
                pool = [v for v in pool if v != other]
                if len(pool) >= depth:
                    candidates_left = True
                for cond in itertools.combinations(pool, depth):
                    if independent(a, b, cond):
                        adj[a].discard(b)
                        adj[b].discard(a)
                        sepsets[(a, b)] = frozenset(cond)
                        removed = True
                        break
                if removed:
                    break
        if not candidates_left:
            break
        depth += 1

    for a, b in protected:
        if b not in adj[a]:
            raise KnowledgeConflictError(
                f"required edge ({a},{b}) lost during skeleton search"
            )
    return adj, sepsets


def _apply_knowledge_orientations(ws: PdagWorkspace, k: BackgroundKnowledge) -> None:
    """Orient every still-undirected pair whose direction knowledge forces."""
    for a, b in sorted(ws.und):
        forced = k.forced_direction(a, b)
        if forced is not None:
            ws.orient(*forced)
    for a, b in sorted(k.required):
        if ws.is_undirected(a, b):
            ws.orient(a, b)
        elif ws.adjacent(a, b) and not ws.is_directed(a, b):
            raise KnowledgeConflictError(
                f"required edge ({a},{b}) oriented against the requirement"
            )


def _apply_vstructures(
    ws: PdagWorkspace, sepsets: dict[tuple[int, int], frozenset[int]]
) -> None:
    """Orient colliders from separating sets, collecting proposals first.

    All proposals are gathered before any is applied, so the outcome
    does not depend on iteration order. An edge proposed in both
    directions, or against an existing (knowledge) orientation, is left
    as is and a warning is recorded.
    """
    proposals: dict[tuple[int, int], set[tuple[int, int]]] = {}
    for c in range(ws.node_count):
        for a, b in itertools.combinations(sorted(ws.neighbors(c)), 2):
            if ws.adjacent(a, b):
                continue
            sep = sepsets.get(_norm(a, b))
            if sep is None or c in sep:
                continue
            proposals.setdefault(_norm(a, c), set()).add((a, c))
            proposals.setdefault(_norm(b, c), set()).add((b, c))
    for pair in sorted(proposals):
        dirs = proposals[pair]
        if len(dirs) > 1:
            warnings.warn(
                f"conflicting collider orientations for edge {pair}; left undirected",
                OrientationConflictWarning,
                stacklevel=2,
            )
            continue
        (x, y) = next(iter(dirs))
        if ws.is_undirected(x, y):
            ws.orient(x, y)
        elif ws.is_directed(y, x):
            warnings.warn(
                f"collider orientation {x}->{y} contradicts a prior constraint; kept {y}->{x}",
                OrientationConflictWarning,
                stacklevel=2,
            )


def pc_discover(
    d: Dataset,
    k: BackgroundKnowledge | None = None,
    cfg: PcConfig | None = None,
) -> MixedGraph:
    """Run the PC algorithm and return the discovered CPDAG.

    Phases: skeleton search with recorded separating sets, knowledge
    orientation, collider orientation, Meek closure. With
    ``cfg.stable`` (default) the output is a deterministic function of
    the data and configuration.

    Raises
    ------
    KnowledgeConflictError
        When required edges cannot be honored.
    """
    cfg = cfg or PcConfig()
    k = k if k is not None else BackgroundKnowledge.empty(d.n_cols)
    _check_inputs(d, k)
    adj, sepsets = _pc_skeleton(d, k, cfg)
    pairs = {
        _norm(a, b)
        for a in range(d.n_cols)
        for b in adj[a]
    }
    ws = PdagWorkspace.from_skeleton(d.n_cols, pairs)
    _apply_knowledge_orientations(ws, k)
    _apply_vstructures(ws, sepsets)
    ws.meek_close()
    return ws.to_mixed(d.column_names)


# ---------------------------------------------------------------------------
# Score-based search
# ---------------------------------------------------------------------------

def bic_local_score(
    d: Dataset,
    node: int,
    parents: set[int] | frozenset[int],
    cfg: GesConfig | None = None,
) -> float:
    """Gaussian BIC contribution of one node given a parent set.

    Log-likelihood of the node's column regressed on its parents (with
    intercept, maximum-likelihood variance) minus
    ``penalty_multiplier * (|parents| + 2) / 2 * ln(n)``. Higher is
    better, and summing over nodes scores a whole DAG.

    Raises
    ------
    RankDeficiencyError
        When the parent columns are collinear.
    """
    cfg = cfg or GesConfig()
    pa = sorted(set(parents))
    if node in pa:
        raise ValueError("parent set may not contain the node itself")
    for v in [node, *pa]:
        if not (0 <= v < d.n_cols):
            raise UnknownNodeError(f"node {v} outside dataset")
    if cfg.max_parents is not None and len(pa) > cfg.max_parents:
        raise ValueError(f"parent set exceeds max_parents={cfg.max_parents}")
    n = d.n_rows
    y = d.values[:, node]
    X = np.column_stack([np.ones(n), d.values[:, pa]]) if pa else np.ones((n, 1))
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise RankDeficiencyError("collinear parent columns")
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    sigma2 = float(resid @ resid) / n
    if sigma2 <= 0.0 or not math.isfinite(sigma2):
        raise NumericalError("zero residual variance; likelihood unbounded")
    loglik = -0.5 * n * (math.log(2.0 * math.pi * sigma2) + 1.0)
    penalty = cfg.penalty_multiplier * (len(pa) + 2) / 2.0 * math.log(n)
    return loglik - penalty


def _und_neighbors(ws: PdagWorkspace, v: int) -> set[int]:
    return {u for u in ws.neighbors(v) if ws.is_undirected(u, v)}


def _dir_parents(ws: PdagWorkspace, v: int) -> set[int]:
    return {u for u in ws.neighbors(v) if ws.is_directed(u, v)}


def _is_clique(ws: PdagWorkspace, nodes) -> bool:
    return all(ws.adjacent(a, b) for a, b in itertools.combinations(sorted(nodes), 2))


def _blocks_semidirected(ws: PdagWorkspace, src: int, dst: int, blocked) -> bool:
    """True when every semi-directed path src..dst meets ``blocked``.

    Semi-directed paths follow directed edges forward and undirected
    edges either way.
    """
    stack, seen = [src], {src}
    while stack:
        v = stack.pop()
        for u in sorted(ws.neighbors(v)):
            if not (ws.is_directed(v, u) or ws.is_undirected(v, u)):
                continue
            if u == dst:
                return False
            if u not in seen and u not in blocked:
                seen.add(u)
                stack.append(u)
    return True


def _subsets(items: list[int]):
    """All subsets of items, smallest first; capped for very wide fan-ins."""
    max_size = len(items) if len(items) <= 10 else 3
    for r in range(max_size + 1):
        yield from itertools.combinations(items, r)


def _recomplete(ws: PdagWorkspace) -> PdagWorkspace:
    """Extend the PDAG to a consistent DAG and return its CPDAG workspace."""
    edges = ws.extend_to_dag()
    dag = MixedGraph([str(v) for v in range(ws.node_count)], directed=edges)
    cp = dag_to_cpdag(dag)
    out = PdagWorkspace(ws.node_count)
    for a, b in cp.undirected:
        out.add_undirected(a, b)
    for a, b in cp.directed:
        out.add_directed(a, b)
    return out


def _ges_search(d, k, cfg):
    """Greedy equivalence search over CPDAG states.

    Forward phase applies the best valid Insert(X, Y, T) while any has
    a positive score delta; the backward phase does the same with
    Delete(X, Y, H). Returns the final workspace plus the accepted
    deltas of both phases.
    """
    p = d.n_cols
    cache: dict[tuple[int, frozenset[int]], float] = {}

    def local(node: int, pa: frozenset[int]) -> float:
        key = (node, pa)
        if key not in cache:
            cache[key] = bic_local_score(d, node, pa, cfg)
        return cache[key]

    def delta_or_none(node: int, without: frozenset[int], with_: frozenset[int]):
        if cfg.max_parents is not None and len(with_) > cfg.max_parents:
            return None
        try:
            return local(node, with_) - local(node, without)
        except RankDeficiencyError:
            return None

    required_pairs = {_norm(a, b) for a, b in k.required}
    ws = PdagWorkspace(p)
    for a, b in sorted(k.required):
        ws.add_directed(a, b)
    if k.required:
        ws = _recomplete(ws)

    forward_deltas: list[float] = []
    while True:
        best = None  # (delta, x, y, t_subset)
        for y in range(p):
            pa_y = frozenset(_dir_parents(ws, y))
            und_y = _und_neighbors(ws, y)
            for x in range(p):
                if x == y or ws.adjacent(x, y) or k.is_forbidden(x, y):
                    continue
                na = {n for n in und_y if ws.adjacent(n, x)}
                t_pool = sorted(n for n in und_y if not ws.adjacent(n, x))
                for t_sub in _subsets(t_pool):
                    block = na | set(t_sub)
                    if not _is_clique(ws, block):
                        continue
                    if not _blocks_semidirected(ws, y, x, block):
                        continue
                    base = frozenset(block | pa_y)
                    delta = delta_or_none(y, base, base | {x})
                    if delta is not None and delta > 0.0 and (
                        best is None or delta > best[0]
                    ):
                        best = (delta, x, y, t_sub)
        if best is None:
            break
        delta, x, y, t_sub = best
        ws.add_directed(x, y)
        for t in t_sub:
            ws.orient(t, y)
        ws = _recomplete(ws)
        forward_deltas.append(delta)

    backward_deltas: list[float] = []
    while True:
        best = None  # (delta, x, y, h_subset)
        for y in range(p):
            pa_y = frozenset(_dir_parents(ws, y))
            und_y = _und_neighbors(ws, y)
            for x in range(p):
                if x == y or _norm(x, y) in required_pairs:
                    continue
                if not (ws.is_undirected(x, y) or ws.is_directed(x, y)):
                    continue
                na = {n for n in und_y if n != x and ws.adjacent(n, x)}
                for h_sub in _subsets(sorted(na)):
                    keep = na - set(h_sub)
                    if not _is_clique(ws, keep):
                        continue
                    base = frozenset(keep | pa_y) - {x}
                    # positive when the fit is better without x
                    delta = delta_or_none(y, base | {x}, base)
                    if delta is not None and delta > 0.0 and (
                        best is None or delta > best[0]
                    ):
                        best = (delta, x, y, h_sub)
        if best is None:
            break
        delta, x, y, h_sub = best
        ws.remove_edge(x, y)
        for h in h_sub:
            if ws.is_undirected(y, h):
                ws.orient(y, h)
            if ws.is_undirected(x, h):
                ws.orient(x, h)
        ws = _recomplete(ws)
        backward_deltas.append(delta)

    return ws, forward_deltas, backward_deltas


def ges_discover(
    d: Dataset,
    k: BackgroundKnowledge | None = None,
    cfg: GesConfig | None = None,
) -> MixedGraph:
    """Greedy equivalence search; returns the highest-scoring CPDAG found.

    Starting from the empty graph (plus any required edges), a forward
    phase repeatedly applies the single edge insertion with the largest
    positive improvement of the penalized Gaussian likelihood, then a
    backward phase applies the best score-improving deletions until no
    move helps. Search states are equivalence classes, so the result
    does not depend on arbitrary orientation choices among
    score-equivalent DAGs. Knowledge orientations are re-applied to the
    final CPDAG.
    """
    cfg = cfg or GesConfig()
    k = k if k is not None else BackgroundKnowledge.empty(d.n_cols)
    _check_inputs(d, k)
    ws, _, _ = _ges_search(d, k, cfg)
    _apply_knowledge_orientations(ws, k)
    ws.meek_close()
    for a, b in sorted(ws.dir):
        if k.is_forbidden(a, b):
            warnings.warn(
                f"data compels edge {a}->{b} against the given knowledge",
                OrientationConflictWarning,
                stacklevel=2,
            )
    return ws.to_mixed(d.column_names)
