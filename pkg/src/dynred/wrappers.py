"""Problem-to-problem engine wrappers.

Each wrapper presents one problem kind while internally running an engine for
a different kind. Updates are translated with constant fan-out and the inner
engine can itself be a wrapper, so wrappers compose.

A wrapper's own counters record the traffic it received (outer view); the
cost actually spent inside is on `handle.inner.counters`. Checkpoints wrap
the inner checkpoint together with the outer update depth so rollback_ops
stay correct on both levels.

Suppressed updates (fan-out zero) are ops that provably cannot change any
answer of the outer problem; they are mode-checked and counted but forwarded
nowhere, and their state is deliberately not tracked.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engines import Mode, ProblemKind, check_mode_legality, direct_factory
from .model import (
    ActivateNode,
    AddToScope,
    ConstructionError,
    CostCounters,
    DeactivateNode,
    DeleteEdge,
    DomainError,
    Graph,
    HasPerfectMatching,
    InducedConnected,
    InsertEdge,
    MaxWeightPmWeight,
    RemoveFromScope,
    SetSystem,
    StConnected,
    StDistance,
    StReachable,
    StronglyConnected,
    UnionIsUniverse,
)


@dataclass(frozen=True)
class WrapperCheckpoint:
    inner_cp: object
    outer_depth: int


class _WrapperBase:
    """Common handle plumbing: legality, counting, checkpointing."""

    outer_kind: ProblemKind = None  # set by subclasses
    query_type = None

    def __init__(self, kind, mode):
        kind = ProblemKind(kind) if not isinstance(kind, ProblemKind) else kind
        if kind is not self.outer_kind:
            raise DomainError(
                f"{type(self).__name__} serves {self.outer_kind.value}, got {kind.value}")
        self.mode = Mode(mode) if not isinstance(mode, Mode) else mode
        self.kind = kind
        self.counters = CostCounters()
        self._outer_depth = 0
        self.inner = None  # subclasses attach after building the inner instance

    def update(self, op):
        check_mode_legality(self.mode, op)
        for inner_op in self._translate(op):
            self.inner.update(inner_op)
        self.counters.updates += 1
        self._outer_depth += 1
        return None

    def query(self, q):
        if not isinstance(q, self.query_type):
            raise DomainError(
                f"{self.outer_kind.value} answers {self.query_type.__name__},"
                f" got {type(q).__name__}")
        answer = self._answer(q)
        self.counters.queries += 1
        return answer

    def checkpoint(self) -> WrapperCheckpoint:
        return WrapperCheckpoint(self.inner.checkpoint(), self._outer_depth)

    def rollback(self, cp: WrapperCheckpoint) -> None:
        self.inner.rollback(cp.inner_cp)
        self.counters.rollback_ops += self._outer_depth - cp.outer_depth
        self._outer_depth = cp.outer_depth

    def _translate(self, op) -> list:
        raise NotImplementedError

    def _answer(self, q):
        raise NotImplementedError


# ---------------------------------------------------------------------------
# subgraph s-t connectivity via directed reachability


class SubconnViaStreach(_WrapperBase):
    """Node-toggled undirected connectivity on top of a reachability engine.

    Every node v splits into v_in = v and v_out = n + v. Undirected edges
    become the two arcs (u_out, v_in) and (v_out, u_in); an active node
    contributes the arc (v_in, v_out). Toggling a node is one arc op
    (fan-out 1), an edge op is two arc ops (fan-out 2).
    """

    outer_kind = ProblemKind.ST_SUBCONN
    query_type = StConnected

    def __init__(self, kind, mode, instance: Graph, inner_factory, *, scope=None):
        super().__init__(kind, mode)
        if scope is not None:
            raise DomainError("scope applies only to set-system kinds")
        if instance.directed or instance.s is None or instance.t is None:
            raise DomainError("needs an undirected graph with s and t")
        if instance.active is None:
            raise DomainError("needs an active node set")
        n = instance.node_count
        self._n = n
        always_on = set(instance.active) | {instance.s, instance.t}
        h = Graph(2 * n, directed=True, s=n + instance.s, t=instance.t)
        for u, v in instance.edges():
            h.add_edge(n + u, v)
            h.add_edge(n + v, u)
        for v in sorted(always_on):
            h.add_edge(v, n + v)
        if h.node_count != 2 * n:
            raise ConstructionError("node budget violated")
        if h.edge_count != 2 * instance.edge_count + len(always_on):
            raise ConstructionError("edge budget violated")
        self._st = {instance.s, instance.t}
        self.counters.preprocess_units = instance.node_count + instance.edge_count
        self.inner = inner_factory(ProblemKind.ST_REACH, self.mode, h)

    def _translate(self, op):
        n = self._n
        if isinstance(op, ActivateNode):
            if op.v in self._st:
                return []  # s and t are implicitly always on
            return [InsertEdge(op.v, n + op.v)]
        if isinstance(op, DeactivateNode):
            if op.v in self._st:
                return []
            return [DeleteEdge(op.v, n + op.v)]
        if isinstance(op, InsertEdge):
            return [InsertEdge(n + op.u, op.v), InsertEdge(n + op.v, op.u)]
        if isinstance(op, DeleteEdge):
            return [DeleteEdge(n + op.u, op.v), DeleteEdge(n + op.v, op.u)]
        raise DomainError(f"unsupported update {type(op).__name__}")

    def _answer(self, q):
        return self.inner.query(StReachable())


def subconn_via_streach(inner_factory=direct_factory):
    def factory(kind, mode, instance, *, scope=None):
        return SubconnViaStreach(kind, mode, instance, inner_factory, scope=scope)
    return factory


# ---------------------------------------------------------------------------
# directed reachability via perfect matching


def _split_ids(n: int, s: int, t: int):
    """Id maps for the split graph on 2n - 2 nodes: out-copies of V minus t
    in [0, n-1), in-copies of V minus s in [n-1, 2n-2)."""
    def out_id(v: int) -> int:
        return v - (v > t)

    def in_id(v: int) -> int:
        return (n - 1) + v - (v > s)

    return out_id, in_id


class StreachViaBpm(_WrapperBase):
    """s-t reachability as perfect-matching existence on a split graph.

    Arcs (u, v) become edges {u_out, v_in}; each ordinary node carries a
    permanent pair edge {v_in, v_out}. A perfect matching traces an s-to-t
    path through forced chains, so it exists iff t is reachable. Arcs into s
    or out of t cannot lie on such a path and are suppressed (fan-out 0).
    """

    outer_kind = ProblemKind.ST_REACH
    query_type = StReachable

    def __init__(self, kind, mode, instance: Graph, inner_factory, *, scope=None):
        super().__init__(kind, mode)
        if scope is not None:
            raise DomainError("scope applies only to set-system kinds")
        if not instance.directed or instance.s is None or instance.t is None:
            raise DomainError("needs a directed graph with s and t")
        n = instance.node_count
        s, t = instance.s, instance.t
        self._s, self._t = s, t
        self._out_id, self._in_id = _split_ids(n, s, t)
        h = Graph(2 * n - 2)
        pair_edges = 0
        for v in range(n):
            if v != s and v != t:
                h.add_edge(self._out_id(v), self._in_id(v))
                pair_edges += 1
        mapped = 0
        for u, v in instance.edges():
            if u == t or v == s:
                continue
            h.add_edge(self._out_id(u), self._in_id(v))
            mapped += 1
        if h.node_count != 2 * n - 2:
            raise ConstructionError("node budget violated")
        if h.edge_count != pair_edges + mapped:
            raise ConstructionError("edge budget violated")
        self.counters.preprocess_units = instance.node_count + instance.edge_count
        self.inner = inner_factory(ProblemKind.BPMATCH, self.mode, h)

    def _translate(self, op):
        if isinstance(op, InsertEdge):
            if op.u == self._t or op.v == self._s:
                return []
            return [InsertEdge(self._out_id(op.u), self._in_id(op.v))]
        if isinstance(op, DeleteEdge):
            if op.u == self._t or op.v == self._s:
                return []
            return [DeleteEdge(self._out_id(op.u), self._in_id(op.v))]
        raise DomainError(f"unsupported update {type(op).__name__}")

    def _answer(self, q):
        return self.inner.query(HasPerfectMatching())


def streach_via_bpm(inner_factory=direct_factory):
    def factory(kind, mode, instance, *, scope=None):
        return StreachViaBpm(kind, mode, instance, inner_factory, scope=scope)
    return factory


# ---------------------------------------------------------------------------
# shortest path via max-weight perfect matching


class StspViaBwm(_WrapperBase):
    """s-t shortest path distance through a max-weight perfect matching.

    Split graph as in StreachViaBpm; pair edges weigh B = max_weight + 1 and
    an arc of weight w maps to B - w (always >= 1). The best matching swaps
    pair edges for one forced s-to-t chain and never keeps a cycle, giving
    weight offset - dist. The offset law is confirmed on a 3-node probe at
    construction time.
    """

    outer_kind = ProblemKind.ST_SP
    query_type = StDistance

    def __init__(self, kind, mode, instance: Graph, inner_factory, *, scope=None):
        super().__init__(kind, mode)
        if scope is not None:
            raise DomainError("scope applies only to set-system kinds")
        if not instance.weighted or instance.s is None or instance.t is None:
            raise DomainError("needs a weighted graph with s and t")
        if instance.max_weight is None:
            raise DomainError("needs a declared max_weight")
        self._directed = instance.directed
        n = instance.node_count
        s, t = instance.s, instance.t
        self._s, self._t = s, t
        self._base = instance.max_weight + 1
        self._out_id, self._in_id = _split_ids(n, s, t)
        self._offset = self._pick_offset(n)
        h = Graph(2 * n - 2, weighted=True, max_weight=self._base)
        for v in range(n):
            if v != s and v != t:
                h.add_edge(self._out_id(v), self._in_id(v), self._base)
        for u, v, w in instance.weighted_edges():
            for a, b in self._arc_pairs(u, v):
                h.add_edge(self._out_id(a), self._in_id(b), self._base - w)
        if h.node_count != 2 * n - 2:
            raise ConstructionError("node budget violated")
        self.counters.preprocess_units = instance.node_count + instance.edge_count
        self.inner = inner_factory(ProblemKind.BWMATCH, self.mode, h)

    def _arc_pairs(self, u, v):
        """Arcs carried by one stored edge, with degenerate endpoints dropped."""
        arcs = [(u, v)] if self._directed else [(u, v), (v, u)]
        return [(a, b) for a, b in arcs if a != self._t and b != self._s]

    def _pick_offset(self, n: int) -> int:
        law = _validated_offset_law()
        return (n - 1) * self._base if law == "n-1" else n * self._base

    def _translate(self, op):
        if isinstance(op, InsertEdge):
            if op.w is None:
                raise DomainError("weighted update needs a weight")
            if not (1 <= op.w <= self._base - 1):
                raise DomainError(f"weight {op.w} outside [1, {self._base - 1}]")
            return [InsertEdge(self._out_id(a), self._in_id(b), self._base - op.w)
                    for a, b in self._arc_pairs(op.u, op.v)]
        if isinstance(op, DeleteEdge):
            return [DeleteEdge(self._out_id(a), self._in_id(b))
                    for a, b in self._arc_pairs(op.u, op.v)]
        raise DomainError(f"unsupported update {type(op).__name__}")

    def _answer(self, q):
        w = self.inner.query(MaxWeightPmWeight())
        if w is None:
            return None
        return self._offset - w


_OFFSET_LAW: str | None = None


def _validated_offset_law() -> str:
    """Confirm the matching-weight offset on a three-node probe path; cached.

    Probe: s -> a -> t with unit weights, so dist = 2, n = 3, B = 2. The
    matching weight W must satisfy offset - W = 2 for exactly one of the
    candidate offsets (n-1)B and nB.
    """
    global _OFFSET_LAW
    if _OFFSET_LAW is not None:
        return _OFFSET_LAW
    from .engines import engine_new, engine_query

    probe = Graph(4, weighted=True, max_weight=2)
    # nodes: s_out=0, a_out=1, a_in=2, t_in=3 with B = 2
    probe.add_edge(1, 2, 2)      # pair edge for a
    probe.add_edge(0, 2, 1)      # arc s -> a, weight B - 1
    probe.add_edge(1, 3, 1)      # arc a -> t
    w = engine_query(engine_new(ProblemKind.BWMATCH, Mode.FULL, probe),
                     MaxWeightPmWeight())
    if (3 - 1) * 2 - w == 2:
        _OFFSET_LAW = "n-1"
    elif 3 * 2 - w == 2:
        _OFFSET_LAW = "n"
    else:
        raise ConstructionError(f"probe matching weight {w} fits no offset law")
    return _OFFSET_LAW


def stsp_via_bwm(inner_factory=direct_factory):
    def factory(kind, mode, instance, *, scope=None):
        return StspViaBwm(kind, mode, instance, inner_factory, scope=scope)
    return factory


# ---------------------------------------------------------------------------
# reachability via strong connectivity


class StreachViaSc(_WrapperBase):
    """s-t reachability as strong connectivity after adding return arcs.

    Permanent arcs (v, s) and (t, v) for every other node v (plus (t, s) when
    s and t are the only nodes) make the whole graph strongly connected
    exactly when t is reachable from s. Outer ops that coincide with a
    permanent arc, or that target arcs into s / out of t, are suppressed:
    such arcs cannot change s-to-t reachability.
    """

    outer_kind = ProblemKind.ST_REACH
    query_type = StReachable

    def __init__(self, kind, mode, instance: Graph, inner_factory, *, scope=None):
        super().__init__(kind, mode)
        if scope is not None:
            raise DomainError("scope applies only to set-system kinds")
        if not instance.directed or instance.s is None or instance.t is None:
            raise DomainError("needs a directed graph with s and t")
        n = instance.node_count
        s, t = instance.s, instance.t
        self._s, self._t = s, t
        h = Graph(n, directed=True)
        permanent = 0
        for v in range(n):
            if v not in (s, t):
                h.add_edge(v, s)
                h.add_edge(t, v)
                permanent += 2
        if n == 2:
            h.add_edge(t, s)
            permanent += 1
        mapped = 0
        for u, v in instance.edges():
            if v == s or u == t:
                continue
            h.add_edge(u, v)
            mapped += 1
        if h.edge_count != permanent + mapped:
            raise ConstructionError("edge budget violated")
        self.counters.preprocess_units = instance.node_count + instance.edge_count
        self.inner = inner_factory(ProblemKind.SC, self.mode, h)

    def _translate(self, op):
        if isinstance(op, (InsertEdge, DeleteEdge)):
            if op.v == self._s or op.u == self._t:
                return []  # shadowed by a permanent arc or irrelevant to s -> t
            cls = InsertEdge if isinstance(op, InsertEdge) else DeleteEdge
            return [cls(op.u, op.v)]
        raise DomainError(f"unsupported update {type(op).__name__}")

    def _answer(self, q):
        return self.inner.query(StronglyConnected())


def streach_via_sc(inner_factory=direct_factory):
    def factory(kind, mode, instance, *, scope=None):
        return StreachViaSc(kind, mode, instance, inner_factory, scope=scope)
    return factory


# ---------------------------------------------------------------------------
# scoped union via induced connectivity


class SubunionViaConnsub(_WrapperBase):
    """Scope-union coverage as connectivity of an induced star-of-sets graph.

    Universe elements occupy [0, nU), one node per set follows, then a hub
    adjacent to every set node. Elements and hub are always active; a set
    node is active while the set is in scope. The active subgraph is
    connected exactly when every element is covered by some scoped set.
    """

    outer_kind = ProblemKind.SUB_UNION
    query_type = UnionIsUniverse

    def __init__(self, kind, mode, instance: SetSystem, inner_factory, *, scope=None):
        super().__init__(kind, mode)
        if not isinstance(instance, SetSystem):
            raise DomainError("needs a SetSystem instance")
        n_u = instance.universe_size
        k = len(instance.sets)
        self._n_u = n_u
        hub = n_u + k
        scope = set(scope) if scope is not None else set()
        for i in scope:
            instance.get(i)  # range check
        g = Graph(n_u + k + 1,
                  active=set(range(n_u)) | {hub} | {n_u + i for i in scope})
        edges = 0
        for i, members in enumerate(instance.sets):
            for u in sorted(members):
                g.add_edge(n_u + i, u)
                edges += 1
            g.add_edge(hub, n_u + i)
            edges += 1
        if g.node_count != n_u + k + 1 or g.edge_count != edges:
            raise ConstructionError("size budget violated")
        self.counters.preprocess_units = n_u + sum(len(x) for x in instance.sets)
        self._scoped = set(scope)
        self.inner = inner_factory(ProblemKind.CONN_SUB, self.mode, g)

    def _translate(self, op):
        if isinstance(op, AddToScope):
            return [ActivateNode(self._n_u + op.set_id)]
        if isinstance(op, RemoveFromScope):
            return [DeactivateNode(self._n_u + op.set_id)]
        raise DomainError(f"unsupported update {type(op).__name__}")

    def _answer(self, q):
        return self.inner.query(InducedConnected())


def subunion_via_connsub(inner_factory=direct_factory):
    def factory(kind, mode, instance, *, scope=None):
        return SubunionViaConnsub(kind, mode, instance, inner_factory, scope=scope)
    return factory
