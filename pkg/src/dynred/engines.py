"""Dynamic-problem engines.

An engine owns a mutable instance (graph or set system) behind a uniform
API: engine_new (preprocess), engine_update, engine_query, engine_checkpoint,
engine_rollback. Queries recompute from current state; what is being measured
throughout the package is how many updates and queries a reduction spends,
never how fast a single query runs.

Mode legality: insert-type updates are rejected in decremental mode and
delete-type updates in incremental mode. Rollback is legal in every mode,
bypasses those checks, and is accounted separately in rollback_ops.

The query routines are written here from scratch, independent of oracles.py,
so the two layers can check each other.
"""

from __future__ import annotations

import heapq
import sys
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import limits
from .model import (
    ActivateNode,
    AddToScope,
    AllStReachable,
    CostCounters,
    DeactivateNode,
    DeleteEdge,
    Diameter,
    DomainError,
    Graph,
    GuardError,
    HasPerfectMatching,
    InducedConnected,
    InsertEdge,
    InsertSet,
    IntersectSets,
    IsEmpty,
    KAugFreeMatchingSize,
    MaxSccSize,
    MaxWeightPmWeight,
    Member,
    ModeError,
    MoreThanTwoSccs,
    ReachCountLessThan,
    RemoveFromScope,
    SccCount2VsK,
    SetSystem,
    StConnected,
    StDistance,
    StReachable,
    StateError,
    StronglyConnected,
    UnionIsUniverse,
)


class Mode(Enum):
    FULL = "full"
    INCREMENTAL = "inc"
    DECREMENTAL = "dec"


class ProblemKind(Enum):
    ST_REACH = "st-reach"
    REACH_COUNT = "reach-count"
    SC = "sc"
    SC2 = "sc2"
    SCC_2_VS_K = "scc-2-vs-k"
    MAX_SCC = "max-scc"
    ST_SET_REACH = "st-set-reach"
    DIAMETER = "diameter"
    ST_SUBCONN = "st-subconn"
    CONN_SUB = "conn-sub"
    BPMATCH = "bpmatch"
    KBPM = "kbpm"
    BWMATCH = "bwmatch"
    ST_SP = "st-sp"
    SUB_UNION = "sub-union"
    PP = "pp"
    EMPTY_PP = "empty-pp"


SET_KINDS = {ProblemKind.SUB_UNION, ProblemKind.PP, ProblemKind.EMPTY_PP}
GRAPH_KINDS = {k for k in ProblemKind} - SET_KINDS

# kinds whose state includes a toggleable node set
NODE_OP_KINDS = {ProblemKind.ST_SUBCONN, ProblemKind.CONN_SUB}

QUERY_FOR_KIND = {
    ProblemKind.ST_REACH: StReachable,
    ProblemKind.REACH_COUNT: ReachCountLessThan,
    ProblemKind.SC: StronglyConnected,
    ProblemKind.SC2: MoreThanTwoSccs,
    ProblemKind.SCC_2_VS_K: SccCount2VsK,
    ProblemKind.MAX_SCC: MaxSccSize,
    ProblemKind.ST_SET_REACH: AllStReachable,
    ProblemKind.DIAMETER: Diameter,
    ProblemKind.ST_SUBCONN: StConnected,
    ProblemKind.CONN_SUB: InducedConnected,
    ProblemKind.BPMATCH: HasPerfectMatching,
    ProblemKind.KBPM: KAugFreeMatchingSize,
    ProblemKind.BWMATCH: MaxWeightPmWeight,
    ProblemKind.ST_SP: StDistance,
    ProblemKind.SUB_UNION: UnionIsUniverse,
    ProblemKind.PP: Member,
    ProblemKind.EMPTY_PP: IsEmpty,
}

INSERT_TYPE = (InsertEdge, ActivateNode, AddToScope, InsertSet, IntersectSets)
DELETE_TYPE = (DeleteEdge, DeactivateNode, RemoveFromScope)


@dataclass(frozen=True)
class Checkpoint:
    serial: int
    depth: int


class EngineState:
    """Owned instance plus undo log, live checkpoints and cost counters."""

    def __init__(self, kind: ProblemKind, mode: Mode):
        self.kind = kind
        self.mode = mode
        self.graph: Graph | None = None
        self.sets: SetSystem | None = None
        self.scope: set[int] | None = None
        self.counters = CostCounters()
        self._undo: list[tuple] = []
        self._live: dict[int, int] = {}
        self._serial = 0
        # SUB_UNION: per-element count of scoped sets containing it
        self._cover: list[int] | None = None
        self._covered = 0

    def __repr__(self):
        return f"EngineState({self.kind.value}, {self.mode.value}, depth={len(self._undo)})"


def _as_mode(mode) -> Mode:
    if isinstance(mode, Mode):
        return mode
    try:
        return Mode(mode)
    except ValueError:
        raise DomainError(f"unknown mode {mode!r}")


def _as_kind(kind) -> ProblemKind:
    if isinstance(kind, ProblemKind):
        return kind
    try:
        return ProblemKind(kind)
    except ValueError:
        raise DomainError(f"unknown problem kind {kind!r}")


def engine_new(kind, mode, instance, *, scope=None) -> EngineState:
    """Load an instance. preprocess_units = nodes + edges (graphs) or
    universe + total set sizes (set systems)."""
    kind = _as_kind(kind)
    mode = _as_mode(mode)
    state = EngineState(kind, mode)
    if kind in GRAPH_KINDS:
        if not isinstance(instance, Graph):
            raise DomainError(f"{kind.value} expects a Graph instance")
        _check_graph_shape(kind, instance)
        if instance.node_count > limits.MAX_STATE_NODES:
            raise GuardError(f"{instance.node_count} nodes exceed the state cap")
        state.graph = instance.copy()
        state.counters.preprocess_units = instance.node_count + instance.edge_count
        if scope is not None:
            raise DomainError("scope applies only to set-system kinds")
    else:
        if not isinstance(instance, SetSystem):
            raise DomainError(f"{kind.value} expects a SetSystem instance")
        state.sets = instance.copy()
        state.counters.preprocess_units = (instance.universe_size
                                           + sum(len(s) for s in instance.sets))
        if kind is ProblemKind.SUB_UNION:
            state.scope = set()
            state._cover = [0] * instance.universe_size
            if scope is not None:
                for i in scope:
                    _scope_add(state, i)
        elif scope is not None:
            raise DomainError("scope applies only to sub-union engines")
    return state


def _check_graph_shape(kind: ProblemKind, g: Graph) -> None:
    need_directed = {
        ProblemKind.ST_REACH, ProblemKind.REACH_COUNT, ProblemKind.SC,
        ProblemKind.SC2, ProblemKind.SCC_2_VS_K, ProblemKind.MAX_SCC,
        ProblemKind.ST_SET_REACH,
    }
    need_undirected = {
        ProblemKind.DIAMETER, ProblemKind.ST_SUBCONN, ProblemKind.CONN_SUB,
        ProblemKind.BPMATCH, ProblemKind.KBPM, ProblemKind.BWMATCH,
    }
    if kind in need_directed and not g.directed:
        raise DomainError(f"{kind.value} needs a directed graph")
    if kind in need_undirected and g.directed:
        raise DomainError(f"{kind.value} needs an undirected graph")
    if kind in (ProblemKind.ST_REACH, ProblemKind.ST_SUBCONN, ProblemKind.ST_SP):
        if g.s is None or g.t is None:
            raise DomainError(f"{kind.value} needs s and t")
        if g.s == g.t:
            raise DomainError(f"{kind.value} needs distinct s and t")
    if kind is ProblemKind.REACH_COUNT and g.s is None:
        raise DomainError("reach-count needs a source s")
    if kind is ProblemKind.ST_SET_REACH and (g.s_set is None or g.t_set is None):
        raise DomainError("st-set-reach needs s_set and t_set")
    if kind in NODE_OP_KINDS and g.active is None:
        raise DomainError(f"{kind.value} needs an active node set")
    if kind in (ProblemKind.BWMATCH, ProblemKind.ST_SP) and not g.weighted:
        raise DomainError(f"{kind.value} needs a weighted graph")
    if kind in (ProblemKind.BPMATCH, ProblemKind.KBPM) and g.weighted:
        raise DomainError(f"{kind.value} needs an unweighted graph")
    if kind in (ProblemKind.BPMATCH, ProblemKind.KBPM, ProblemKind.BWMATCH):
        _bipartition(g)  # raises DomainError if not bipartite


# ---------------------------------------------------------------------------
# updates


def _scope_add(state: EngineState, i: int) -> None:
    state.sets.get(i)  # range check
    if i in state.scope:
        raise StateError(f"set {i} already in scope")
    state.scope.add(i)
    for x in state.sets.get(i):
        state._cover[x] += 1
        if state._cover[x] == 1:
            state._covered += 1


def _scope_remove(state: EngineState, i: int) -> None:
    if i not in state.scope:
        raise StateError(f"set {i} not in scope")
    state.scope.discard(i)
    for x in state.sets.get(i):
        state._cover[x] -= 1
        if state._cover[x] == 0:
            state._covered -= 1


def _check_op_allowed(state: EngineState, op) -> None:
    kind = state.kind
    if isinstance(op, (InsertEdge, DeleteEdge)):
        if kind not in GRAPH_KINDS:
            raise DomainError(f"edge updates not supported by {kind.value}")
    elif isinstance(op, (ActivateNode, DeactivateNode)):
        if kind not in NODE_OP_KINDS:
            raise DomainError(f"node activation not supported by {kind.value}")
    elif isinstance(op, (AddToScope, RemoveFromScope)):
        if kind is not ProblemKind.SUB_UNION:
            raise DomainError(f"scope updates not supported by {kind.value}")
    elif isinstance(op, (InsertSet, IntersectSets)):
        if kind not in (ProblemKind.PP, ProblemKind.EMPTY_PP):
            raise DomainError(f"set updates not supported by {kind.value}")
    else:
        raise DomainError(f"unknown update {op!r}")


def _apply_update(state: EngineState, op) -> int | None:
    """Apply op, push its inverse onto the undo log, return a new set id if any."""
    g = state.graph
    if isinstance(op, InsertEdge):
        if g.weighted and op.w is None:
            raise DomainError("weighted graph needs an edge weight")
        g.add_edge(op.u, op.v, op.w)
        state._undo.append(("del_edge", op.u, op.v))
        return None
    if isinstance(op, DeleteEdge):
        w = g.remove_edge(op.u, op.v)
        state._undo.append(("ins_edge", op.u, op.v, w))
        return None
    if isinstance(op, ActivateNode):
        if not (0 <= op.v < g.node_count):
            raise DomainError(f"node {op.v} out of range")
        if op.v in g.active:
            raise StateError(f"node {op.v} already active")
        g.active.add(op.v)
        state._undo.append(("deact", op.v))
        return None
    if isinstance(op, DeactivateNode):
        if op.v not in g.active:
            raise StateError(f"node {op.v} not active")
        g.active.discard(op.v)
        state._undo.append(("act", op.v))
        return None
    if isinstance(op, AddToScope):
        _scope_add(state, op.set_id)
        state._undo.append(("scope_del", op.set_id))
        return None
    if isinstance(op, RemoveFromScope):
        _scope_remove(state, op.set_id)
        state._undo.append(("scope_add", op.set_id))
        return None
    if isinstance(op, InsertSet):
        if len(state.sets) >= limits.MAX_SETS:
            raise GuardError("set count cap reached")
        new_id = state.sets.append_set(op.members)
        state._undo.append(("pop_set",))
        return new_id
    if isinstance(op, IntersectSets):
        if len(state.sets) >= limits.MAX_SETS:
            raise GuardError("set count cap reached")
        a, b = state.sets.get(op.i), state.sets.get(op.j)
        new_id = state.sets.append_set(a & b)
        state._undo.append(("pop_set",))
        return new_id
    raise DomainError(f"unknown update {op!r}")


def check_mode_legality(mode: Mode, op) -> None:
    """Raise ModeError when op's type family is illegal in the given mode."""
    if mode is Mode.DECREMENTAL and isinstance(op, INSERT_TYPE):
        raise ModeError(f"{type(op).__name__} is insert-type, illegal in decremental mode")
    if mode is Mode.INCREMENTAL and isinstance(op, DELETE_TYPE):
        raise ModeError(f"{type(op).__name__} is delete-type, illegal in incremental mode")


def engine_update(state: EngineState, op) -> int | None:
    """Apply one update. Returns the fresh set id for InsertSet/IntersectSets."""
    _check_op_allowed(state, op)
    check_mode_legality(state.mode, op)
    result = _apply_update(state, op)
    state.counters.updates += 1
    return result


# ---------------------------------------------------------------------------
# checkpoint / rollback


def engine_checkpoint(state: EngineState) -> Checkpoint:
    state._serial += 1
    cp = Checkpoint(serial=state._serial, depth=len(state._undo))
    state._live[cp.serial] = cp.depth
    return cp


def _undo_entry(state: EngineState, entry: tuple) -> None:
    tag = entry[0]
    g = state.graph
    if tag == "del_edge":
        g.remove_edge(entry[1], entry[2])
    elif tag == "ins_edge":
        g.add_edge(entry[1], entry[2], entry[3])
    elif tag == "deact":
        g.active.discard(entry[1])
    elif tag == "act":
        g.active.add(entry[1])
    elif tag == "scope_del":
        _scope_remove(state, entry[1])
    elif tag == "scope_add":
        _scope_add(state, entry[1])
    elif tag == "pop_set":
        state.sets.pop_set()
    else:
        raise StateError(f"corrupt undo entry {entry!r}")


def engine_rollback(state: EngineState, cp: Checkpoint) -> None:
    """Unwind the undo log back to cp. Consumes cp and every checkpoint taken
    after it. Legal in every mode; each undone update counts as one rollback op."""
    depth = state._live.get(cp.serial)
    if depth is None:
        raise StateError("checkpoint is not live (already rolled back or foreign)")
    if depth != cp.depth:
        raise StateError("checkpoint depth mismatch")
    while len(state._undo) > depth:
        entry = state._undo.pop()
        _undo_entry(state, entry)
        state.counters.rollback_ops += 1
    dead = [s for s, d in state._live.items() if d >= depth]
    for s in dead:
        del state._live[s]


# ---------------------------------------------------------------------------
# query internals (independent of oracles.py)


def _active_nodes(g: Graph) -> set[int] | None:
    if g.active is None:
        return None
    allowed = set(g.active)
    for v in (g.s, g.t):
        if v is not None:
            allowed.add(v)
    return allowed


def _bfs_from(g: Graph, src: int, allowed: set[int] | None = None) -> set[int]:
    if allowed is not None and src not in allowed:
        return set()
    seen = {src}
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for v in g.out_neighbors(u):
                if v in seen or (allowed is not None and v not in allowed):
                    continue
                seen.add(v)
                nxt.append(v)
        frontier = nxt
    return seen


def _tarjan_scc_sizes(g: Graph) -> list[int]:
    """Sizes of strongly connected components, iterative Tarjan."""
    n = g.node_count
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    sizes: list[int] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, iter(g.out_neighbors(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            u, it = work[-1]
            advanced = False
            for v in it:
                if index[v] == -1:
                    index[v] = low[v] = counter
                    counter += 1
                    stack.append(v)
                    on_stack[v] = True
                    work.append((v, iter(g.out_neighbors(v))))
                    advanced = True
                    break
                if on_stack[v]:
                    low[u] = min(low[u], index[v])
            if advanced:
                continue
            work.pop()
            if work:
                p = work[-1][0]
                low[p] = min(low[p], low[u])
            if low[u] == index[u]:
                size = 0
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    size += 1
                    if w == u:
                        break
                sizes.append(size)
    return sizes


def _all_pairs_diameter(g: Graph) -> int | None:
    """Diameter by frontier BFS in matrix form; None when disconnected."""
    n = g.node_count
    if n == 0:
        return None
    adj = np.zeros((n, n), dtype=np.float32)
    for u in range(n):
        for v in g.out_neighbors(u):
            adj[u, v] = 1.0
    visited = np.eye(n, dtype=bool)
    frontier = np.eye(n, dtype=bool)
    diam = 0
    while frontier.any():
        nxt = ((frontier.astype(np.float32) @ adj) > 0) & ~visited
        if not nxt.any():
            break
        diam += 1
        visited |= nxt
        frontier = nxt
    if not visited.all():
        return None
    return diam


def _dijkstra_st(g: Graph) -> int | None:
    dist = {g.s: 0}
    heap = [(0, g.s)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        if u == g.t:
            return d
        for v in g.out_neighbors(u):
            nd = d + g.weight(u, v)
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist.get(g.t)


def _bipartition(g: Graph) -> tuple[list[int], list[int]]:
    """Two-color by BFS, smallest id of each component on the left.
    Raises DomainError when an odd cycle exists."""
    color = [-1] * g.node_count
    left: list[int] = []
    right: list[int] = []
    for root in range(g.node_count):
        if color[root] != -1:
            continue
        color[root] = 0
        queue = [root]
        for u in queue:
            for v in g.neighbors(u):
                if color[v] == -1:
                    color[v] = color[u] ^ 1
                    queue.append(v)
                elif color[v] == color[u]:
                    raise DomainError("graph is not bipartite")
        for u in queue:
            (left if color[u] == 0 else right).append(u)
    left.sort()
    right.sort()
    return left, right


def compute_kaug_free_matching(g: Graph, k: int | None = None) -> dict[int, int]:
    """Phase-based matching: repeatedly find the shortest augmenting length L
    and flip a maximal disjoint set of length-L paths; stop once L > k.

    With k=None this runs to a maximum matching. Each phase uses one layered
    BFS plus vertex-disjoint DFS extraction, so the number of phases is at
    most (k+3)/2 for odd k. Returns a node -> mate map (both directions).
    """
    if k is not None and (k < 1 or k % 2 == 0):
        raise DomainError("k must be a positive odd integer")
    left, _right = _bipartition(g)
    mate: dict[int, int] = {}
    INF = float("inf")
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 2 * g.node_count + 100))
    while True:
        # layered BFS over left vertices; dist counts matched-edge hops
        dist: dict[int, float] = {}
        queue: list[int] = []
        for u in left:
            if u not in mate:
                dist[u] = 0
                queue.append(u)
        found = INF
        for u in queue:
            du = dist[u]
            if du >= found:
                continue
            for v in g.neighbors(u):
                w = mate.get(v)
                if w is None:
                    found = min(found, du + 1)
                elif w not in dist:
                    dist[w] = du + 1
                    queue.append(w)
        if found == INF:
            break
        length = 2 * found - 1  # edges on the augmenting path
        if k is not None and length > k:
            break

        def dfs(u: int) -> bool:
            du = dist.get(u)
            if du is None:
                return False
            for v in g.neighbors(u):
                w = mate.get(v)
                if w is None:
                    if du + 1 == found:
                        mate[v] = u
                        mate[u] = v
                        return True
                elif dist.get(w) == du + 1 and dfs(w):
                    mate[v] = u
                    mate[u] = v
                    return True
            dist.pop(u, None)  # dead end for this phase
            return False

        for u in left:
            if u not in mate:
                dfs(u)
    return mate


def _max_weight_pm(g: Graph) -> int | None:
    """Maximum-weight perfect matching via the assignment solver; None if no PM."""
    from scipy.optimize import linear_sum_assignment

    left, right = _bipartition(g)
    if len(left) != len(right):
        return None
    if not left:
        return 0
    r_index = {v: j for j, v in enumerate(right)}
    top = max(w for _, _, w in g.weighted_edges()) if g.edge_count else 1
    forbidden = -(1 + g.node_count * top)
    cost = np.full((len(left), len(right)), forbidden, dtype=np.int64)
    for i, u in enumerate(left):
        for v in g.neighbors(u):
            cost[i, r_index[v]] = g.weight(u, v)
    rows, cols = linear_sum_assignment(cost, maximize=True)
    total = 0
    for i, j in zip(rows, cols):
        if cost[i, j] == forbidden:
            return None  # some left node forced onto a non-edge: no PM
        total += int(cost[i, j])
    return total


# ---------------------------------------------------------------------------
# queries


def engine_query(state: EngineState, q):
    expected = QUERY_FOR_KIND[state.kind]
    if not isinstance(q, expected):
        raise DomainError(
            f"{state.kind.value} answers {expected.__name__}, got {type(q).__name__}")
    state.counters.queries += 1
    g = state.graph
    kind = state.kind

    if kind is ProblemKind.ST_REACH:
        return g.t in _bfs_from(g, g.s)
    if kind is ProblemKind.REACH_COUNT:
        if q.limit < 0:
            raise DomainError("limit must be nonnegative")
        return len(_bfs_from(g, g.s)) - 1 < q.limit
    if kind is ProblemKind.SC:
        return g.node_count <= 1 or len(_tarjan_scc_sizes(g)) == 1
    if kind is ProblemKind.SC2:
        return len(_tarjan_scc_sizes(g)) > 2
    if kind is ProblemKind.SCC_2_VS_K:
        if q.k < 2:
            raise DomainError("k must be at least 2")
        return len(_tarjan_scc_sizes(g)) > q.k
    if kind is ProblemKind.MAX_SCC:
        sizes = _tarjan_scc_sizes(g)
        return max(sizes) if sizes else 0
    if kind is ProblemKind.ST_SET_REACH:
        for s in sorted(g.s_set):
            if not g.t_set <= _bfs_from(g, s):
                return False
        return True
    if kind is ProblemKind.DIAMETER:
        return _all_pairs_diameter(g)
    if kind is ProblemKind.ST_SUBCONN:
        return g.t in _bfs_from(g, g.s, _active_nodes(g))
    if kind is ProblemKind.CONN_SUB:
        nodes = set(g.active)
        if len(nodes) <= 1:
            return True
        start = min(nodes)
        return _bfs_from(g, start, nodes) == nodes
    if kind is ProblemKind.BPMATCH:
        mate = compute_kaug_free_matching(g)
        return len(mate) == g.node_count
    if kind is ProblemKind.KBPM:
        mate = compute_kaug_free_matching(g, q.k)
        return len(mate) // 2
    if kind is ProblemKind.BWMATCH:
        return _max_weight_pm(g)
    if kind is ProblemKind.ST_SP:
        return _dijkstra_st(g)
    if kind is ProblemKind.SUB_UNION:
        return state._covered == state.sets.universe_size
    if kind is ProblemKind.PP:
        if not (0 <= q.u < state.sets.universe_size):
            raise DomainError(f"element {q.u} outside universe")
        return q.u in state.sets.get(q.i)
    if kind is ProblemKind.EMPTY_PP:
        return len(state.sets.get(q.i)) == 0
    raise DomainError(f"unhandled kind {kind}")


# ---------------------------------------------------------------------------
# handle interface

# Reductions drive engines through handle objects so that a wrapper
# (wrappers.py) can stand in for a real engine. The shared surface is:
# .kind .mode .counters .update(op) .query(q) .checkpoint() .rollback(cp)


class DirectEngine:
    """Engine handle backed directly by an EngineState."""

    def __init__(self, kind, mode, instance, *, scope=None):
        self._state = engine_new(kind, mode, instance, scope=scope)

    @property
    def kind(self) -> ProblemKind:
        return self._state.kind

    @property
    def mode(self) -> Mode:
        return self._state.mode

    @property
    def counters(self) -> CostCounters:
        return self._state.counters

    @property
    def state(self) -> EngineState:
        return self._state

    def update(self, op):
        return engine_update(self._state, op)

    def query(self, q):
        return engine_query(self._state, q)

    def checkpoint(self) -> Checkpoint:
        return engine_checkpoint(self._state)

    def rollback(self, cp: Checkpoint) -> None:
        engine_rollback(self._state, cp)


def direct_factory(kind, mode, instance, *, scope=None) -> DirectEngine:
    return DirectEngine(kind, mode, instance, scope=scope)
