"""Graph structures for causal analysis.

A single :class:`MixedGraph` type holds DAGs, skeletons, and CPDAGs
(equivalence-class representatives): it keeps one set of directed edges
and one set of undirected edges over integer node ids. Node ids are
0-based column indices into the dataset the graph describes, with
human-readable labels carried alongside.

The module also provides the graphical primitives the rest of the
toolkit needs: topological order, d-separation, DAG-to-CPDAG conversion
(v-structures plus Meek-rule closure), structural Hamming distance, and
temporal/edge background knowledge.
"""

from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass, field

from .errors import (
    CycleError,
    KnowledgeConflictError,
    SizeMismatchError,
    UnknownNodeError,
)

NodeId = int


def _norm_pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class MixedGraph:
    """Graph with directed and undirected edges over nodes 0..n-1.

    Immutable after construction; all operations on it are pure
    functions, so instances can be shared freely across threads.

    Parameters
    ----------
    node_labels : sequence of str
        One label per node; node count is ``len(node_labels)``.
    directed : iterable of (from, to) pairs
    undirected : iterable of unordered pairs (stored with min first)
    """

    node_labels: tuple[str, ...]
    directed: frozenset[tuple[int, int]] = frozenset()
    undirected: frozenset[tuple[int, int]] = frozenset()

    def __init__(self, node_labels, directed=(), undirected=()):
        labels = tuple(str(s) for s in node_labels)
        n = len(labels)
        dir_edges = frozenset((int(a), int(b)) for a, b in directed)
        und_edges = frozenset(_norm_pair(int(a), int(b)) for a, b in undirected)
        for a, b in itertools.chain(dir_edges, und_edges):
            if a == b:
                raise ValueError(f"self-loop on node {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise UnknownNodeError(f"edge ({a},{b}) outside 0..{n - 1}")
        for a, b in und_edges:
            if (a, b) in dir_edges or (b, a) in dir_edges:
                raise ValueError(f"pair ({a},{b}) is both directed and undirected")
        object.__setattr__(self, "node_labels", labels)
        object.__setattr__(self, "directed", dir_edges)
        object.__setattr__(self, "undirected", und_edges)

    @property
    def node_count(self) -> int:
        return len(self.node_labels)

    def index_of(self, label: str) -> NodeId:
        try:
            return self.node_labels.index(label)
        except ValueError:
            raise UnknownNodeError(f"unknown node {label!r}") from None

    def has_directed(self, a: NodeId, b: NodeId) -> bool:
        return (a, b) in self.directed

    def has_undirected(self, a: NodeId, b: NodeId) -> bool:
        return _norm_pair(a, b) in self.undirected

    def adjacent(self, a: NodeId, b: NodeId) -> bool:
        return (
            (a, b) in self.directed
            or (b, a) in self.directed
            or _norm_pair(a, b) in self.undirected
        )

    def parents(self, v: NodeId) -> set[NodeId]:
        return {a for a, b in self.directed if b == v}

    def children(self, v: NodeId) -> set[NodeId]:
        return {b for a, b in self.directed if a == v}

    def neighbors(self, v: NodeId) -> set[NodeId]:
        """All adjacent nodes, whatever the edge kind."""
        out = {b for a, b in self.directed if a == v}
        out |= {a for a, b in self.directed if b == v}
        for a, b in self.undirected:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out

    def is_dag(self) -> bool:
        """True when the graph has no undirected edges and no directed cycle."""
        if self.undirected:
            return False
        try:
            topological_sort(self)
        except CycleError:
            return False
        return True

    def edge_status(self, a: NodeId, b: NodeId) -> str:
        """Status of the unordered pair: 'none', 'undirected', '->' or '<-'.

        Orientation is reported relative to the (a, b) argument order.
        """
        if (a, b) in self.directed:
            return "->"
        if (b, a) in self.directed:
            return "<-"
        if _norm_pair(a, b) in self.undirected:
            return "undirected"
        return "none"


def _require_dag(g: MixedGraph) -> None:
    if g.undirected:
        raise CycleError("graph has undirected edges; a DAG is required")
    # cycle check happens in topological_sort


def topological_sort(g: MixedGraph) -> list[NodeId]:
    """Order nodes so every directed edge goes forward.

    Ties are broken by ascending node index, making the order
    deterministic for golden tests.

    Raises
    ------
    CycleError
        If the graph has a directed cycle or undirected edges.
    """
    _require_dag(g)
    n = g.node_count
    indegree = [0] * n
    children: list[list[int]] = [[] for _ in range(n)]
    for a, b in g.directed:
        indegree[b] += 1
        children[a].append(b)
    ready = sorted(v for v in range(n) if indegree[v] == 0)
    order: list[int] = []
    heapq.heapify(ready)
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for c in children[v]:
            indegree[c] -= 1
            if indegree[c] == 0:
                heapq.heappush(ready, c)
    if len(order) != n:
        stuck = [v for v in range(n) if indegree[v] > 0]
        raise CycleError(f"directed cycle through nodes {stuck}")
    return order


def ancestors(g: MixedGraph, v: NodeId) -> set[NodeId]:
    """All nodes with a directed path into ``v`` (excluding ``v``)."""
    seen: set[int] = set()
    stack = list(g.parents(v))
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        stack.extend(g.parents(u))
    return seen


def descendants(g: MixedGraph, v: NodeId) -> set[NodeId]:
    """All nodes reachable from ``v`` by directed paths (excluding ``v``)."""
    seen: set[int] = set()
    stack = list(g.children(v))
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        stack.extend(g.children(u))
    return seen


def d_separated(
    g: MixedGraph, a: NodeId, b: NodeId, conditioning: set[NodeId] | frozenset[NodeId]
) -> bool:
    """Decide whether ``a`` and ``b`` are d-separated given ``conditioning``.

    Standard semantics over forks, chains, colliders and collider
    descendants, via the linear-time reachability formulation: ``b`` is
    reachable from ``a`` along some active path iff they are dependent.
    Symmetric in (a, b).
    """
    _require_dag(g)
    topological_sort(g)  # raises CycleError on cyclic input
    cond = set(conditioning)
    if a == b:
        raise ValueError("a and b must differ")
    if a in cond or b in cond:
        raise ValueError("endpoints may not appear in the conditioning set")
    for v in [a, b, *cond]:
        if not (0 <= v < g.node_count):
            raise UnknownNodeError(f"node {v} outside graph")

    parent_map = {v: g.parents(v) for v in range(g.node_count)}
    child_map = {v: g.children(v) for v in range(g.node_count)}

    # conditioning nodes and their ancestors: colliders open only here
    anc_of_cond = set(cond)
    stack = list(cond)
    while stack:
        v = stack.pop()
        for p in parent_map[v]:
            if p not in anc_of_cond:
                anc_of_cond.add(p)
                stack.append(p)

    UP, DOWN = 0, 1  # arrived from a child / from a parent
    visited: set[tuple[int, int]] = set()
    queue: deque[tuple[int, int]] = deque([(a, UP)])
    while queue:
        v, d = queue.popleft()
        if (v, d) in visited:
            continue
        visited.add((v, d))
        if v == b and v not in cond:
            return False
        if d == UP and v not in cond:
            for p in parent_map[v]:
                queue.append((p, UP))
            for c in child_map[v]:
                queue.append((c, DOWN))
        elif d == DOWN:
            if v not in cond:
                for c in child_map[v]:
                    queue.append((c, DOWN))
            if v in anc_of_cond:
                for p in parent_map[v]:
                    queue.append((p, UP))
    return True


# ---------------------------------------------------------------------------
# Orientation workspace and Meek rules
# ---------------------------------------------------------------------------

class PdagWorkspace:
    """Mutable partially-directed graph used during orientation.

    Discovery builds one from a skeleton, seeds it with knowledge and
    collider orientations, then closes it under the Meek rules.
    """

    def __init__(self, node_count: int):
        self.node_count = node_count
        self.dir: set[tuple[int, int]] = set()
        self.und: set[tuple[int, int]] = set()
        self._adj: list[set[int]] = [set() for _ in range(node_count)]

    @classmethod
    def from_skeleton(cls, node_count: int, pairs) -> "PdagWorkspace":
        ws = cls(node_count)
        for a, b in pairs:
            ws.add_undirected(a, b)
        return ws

    def add_undirected(self, a: int, b: int) -> None:
        self.und.add(_norm_pair(a, b))
        self._adj[a].add(b)
        self._adj[b].add(a)

    def add_directed(self, a: int, b: int) -> None:
        self.dir.add((a, b))
        self._adj[a].add(b)
        self._adj[b].add(a)

    def remove_edge(self, a: int, b: int) -> None:
        """Drop whatever edge joins a and b."""
        self.und.discard(_norm_pair(a, b))
        self.dir.discard((a, b))
        self.dir.discard((b, a))
        self._adj[a].discard(b)
        self._adj[b].discard(a)

    def copy(self) -> "PdagWorkspace":
        dup = PdagWorkspace(self.node_count)
        dup.dir = set(self.dir)
        dup.und = set(self.und)
        dup._adj = [set(s) for s in self._adj]
        return dup

    def adjacent(self, a: int, b: int) -> bool:
        return b in self._adj[a]

    def is_undirected(self, a: int, b: int) -> bool:
        return _norm_pair(a, b) in self.und

    def is_directed(self, a: int, b: int) -> bool:
        return (a, b) in self.dir

    def orient(self, a: int, b: int) -> None:
        """Turn the undirected edge a—b into a→b."""
        pair = _norm_pair(a, b)
        if pair not in self.und:
            raise ValueError(f"edge {pair} is not undirected")
        self.und.discard(pair)
        self.dir.add((a, b))

    def unorient(self, a: int, b: int) -> None:
        """Turn a directed edge between a and b back into a—b."""
        self.dir.discard((a, b))
        self.dir.discard((b, a))
        self.und.add(_norm_pair(a, b))

    def neighbors(self, v: int) -> set[int]:
        return set(self._adj[v])

    def meek_close(self) -> None:
        """Apply the four Meek orientation rules to a fixpoint.

        The closure is confluent from a consistent seed, so the result
        does not depend on rule ordering.
        """
        changed = True
        while changed:
            changed = False
            for a, b in sorted(self.und):
                for x, y in ((a, b), (b, a)):
                    if self._meek_applies(x, y):
                        self.orient(x, y)
                        changed = True
                        break

    def _meek_applies(self, a: int, b: int) -> bool:
        # R1: c -> a, a - b, c and b non-adjacent  =>  a -> b
        for c in self._adj[a]:
            if self.is_directed(c, a) and c != b and not self.adjacent(c, b):
                return True
        # R2: a -> c -> b with a - b  =>  a -> b
        for c in self._adj[a]:
            if self.is_directed(a, c) and self.is_directed(c, b):
                return True
        # R3: a - c -> b and a - d -> b, c and d non-adjacent  =>  a -> b
        into_b = [c for c in self._adj[a] if self.is_undirected(a, c) and self.is_directed(c, b)]
        for c, d in itertools.combinations(into_b, 2):
            if not self.adjacent(c, d):
                return True
        # R4: a adjacent to c, c -> d, d -> b, c and b non-adjacent  =>  a -> b
        # (either orientation of the a~c edge would force a -> b; see tests)
        for c in self._adj[a]:
            if c == b or self.adjacent(c, b):
                continue
            for d in self._adj[b]:
                if d != a and self.is_directed(c, d) and self.is_directed(d, b):
                    return True
        return False

    def to_mixed(self, node_labels) -> MixedGraph:
        return MixedGraph(node_labels, directed=self.dir, undirected=self.und)

    def extend_to_dag(self) -> set[tuple[int, int]]:
        """Directed edge set of a DAG consistent with this PDAG.

        Keeps every directed edge and orients every undirected edge
        without creating new v-structures or cycles (the peel-a-sink
        construction). Raises CycleError when no consistent extension
        exists.
        """
        dirs = set(self.dir)
        unds = set(self.und)
        active = set(range(self.node_count))
        oriented: set[tuple[int, int]] = set()
        while active:
            chosen = -1
            for x in sorted(active):
                if any((x, y) in dirs for y in self._adj[x] if y in active):
                    continue  # x still has outgoing directed edges
                und_nb = [
                    u
                    for u in self._adj[x]
                    if u in active and _norm_pair(x, u) in unds
                ]
                all_nb = [u for u in self._adj[x] if u in active]
                if all(
                    u == w or w in self._adj[u]
                    for u in und_nb
                    for w in all_nb
                ):
                    chosen = x
                    break
            if chosen < 0:
                raise CycleError("partially directed graph has no consistent extension")
            for u in self._adj[chosen]:
                if u in active and _norm_pair(chosen, u) in unds:
                    oriented.add((u, chosen))
            active.discard(chosen)
        return dirs | oriented


def dag_to_cpdag(g: MixedGraph) -> MixedGraph:
    """Completed partially directed graph of ``g``'s equivalence class.

    Keeps the skeleton, directs the v-structures, closes under the Meek
    rules, and leaves every other edge undirected. Every DAG in the
    Markov equivalence class maps to the same CPDAG.

    Raises
    ------
    CycleError
        On input that is not a DAG.
    """
    _require_dag(g)
    topological_sort(g)  # cycle check
    ws = PdagWorkspace.from_skeleton(
        g.node_count, (_norm_pair(a, b) for a, b in g.directed)
    )
    for c in range(g.node_count):
        pa = sorted(g.parents(c))
        for a, b in itertools.combinations(pa, 2):
            if not g.adjacent(a, b):
                if ws.is_undirected(a, c):
                    ws.orient(a, c)
                if ws.is_undirected(b, c):
                    ws.orient(b, c)
    ws.meek_close()
    return ws.to_mixed(g.node_labels)


def shd(a: MixedGraph, b: MixedGraph) -> int:
    """Structural Hamming distance between two mixed graphs.

    Counts node pairs whose edge status differs — absent vs undirected
    vs directed-with-this-orientation — one unit per differing pair.

    Raises
    ------
    SizeMismatchError
        If the graphs have different node counts.
    """
    if a.node_count != b.node_count:
        raise SizeMismatchError(
            f"node counts differ: {a.node_count} vs {b.node_count}"
        )
    total = 0
    for i, j in itertools.combinations(range(a.node_count), 2):
        if a.edge_status(i, j) != b.edge_status(i, j):
            total += 1
    return total


# ---------------------------------------------------------------------------
# Background knowledge
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BackgroundKnowledge:
    """Temporal tiers plus forbidden/required directed edges.

    Tiers are an ordered partition of (a subset of) the nodes: an edge
    from a later tier into an earlier tier is implicitly forbidden.
    Edges within a tier, or touching untiered nodes, are unconstrained
    by the tiers. Explicit ``forbidden``/``required`` entries are
    ordered (from, to) pairs.
    """

    node_count: int
    tiers: tuple[tuple[int, ...], ...] = ()
    forbidden: frozenset[tuple[int, int]] = frozenset()
    required: frozenset[tuple[int, int]] = frozenset()
    _tier_of: dict = field(default_factory=dict, repr=False, compare=False)

    def __init__(self, node_count: int, tiers=(), forbidden=(), required=()):
        object.__setattr__(self, "node_count", int(node_count))
        tier_tuples = tuple(tuple(int(v) for v in t) for t in tiers)
        object.__setattr__(self, "tiers", tier_tuples)
        object.__setattr__(
            self, "forbidden", frozenset((int(a), int(b)) for a, b in forbidden)
        )
        object.__setattr__(
            self, "required", frozenset((int(a), int(b)) for a, b in required)
        )
        tier_of: dict[int, int] = {}
        for rank, tier in enumerate(tier_tuples):
            for v in tier:
                if not (0 <= v < node_count):
                    raise UnknownNodeError(f"tier node {v} outside 0..{node_count - 1}")
                if v in tier_of:
                    raise KnowledgeConflictError(f"node {v} appears in two tiers")
                tier_of[v] = rank
        object.__setattr__(self, "_tier_of", tier_of)
        for a, b in self.forbidden | self.required:
            if a == b:
                raise KnowledgeConflictError(f"self-loop constraint on node {a}")
            if not (0 <= a < node_count and 0 <= b < node_count):
                raise UnknownNodeError(f"constraint ({a},{b}) outside graph")
        for a, b in self.required:
            if self.is_forbidden(a, b):
                raise KnowledgeConflictError(
                    f"edge ({a},{b}) is both required and forbidden"
                )
        self._check_required_acyclic()

    def _check_required_acyclic(self) -> None:
        adj: dict[int, list[int]] = {}
        for a, b in self.required:
            adj.setdefault(a, []).append(b)
        state: dict[int, int] = {}  # 1 = in progress, 2 = done

        def visit(v: int) -> None:
            state[v] = 1
            for w in adj.get(v, ()):
                s = state.get(w)
                if s == 1:
                    raise KnowledgeConflictError("required edges form a directed cycle")
                if s is None:
                    visit(w)
            state[v] = 2

        for v in list(adj):
            if v not in state:
                visit(v)

    @classmethod
    def empty(cls, node_count: int) -> "BackgroundKnowledge":
        return cls(node_count)

    def tier_of(self, v: NodeId) -> int | None:
        return self._tier_of.get(v)

    def is_forbidden(self, a: NodeId, b: NodeId) -> bool:
        """True when a→b is disallowed, explicitly or by the tiers."""
        if (a, b) in self.forbidden:
            return True
        ta, tb = self._tier_of.get(a), self._tier_of.get(b)
        return ta is not None and tb is not None and ta > tb

    def pair_excluded(self, a: NodeId, b: NodeId) -> bool:
        """True when neither direction between a and b is allowed."""
        return self.is_forbidden(a, b) and self.is_forbidden(b, a)

    def forced_direction(self, a: NodeId, b: NodeId) -> tuple[int, int] | None:
        """The only allowed direction for the pair, or None if both are open."""
        fab, fba = self.is_forbidden(a, b), self.is_forbidden(b, a)
        if fab and not fba:
            return (b, a)
        if fba and not fab:
            return (a, b)
        return None

    def is_unconstrained(self) -> bool:
        return not self.tiers and not self.forbidden and not self.required
