"""Triangle detection routed through dynamic graph, matching and set engines.

Every graph-backed routine here runs anchor stages: visit the vertices in
ascending id, install a handful of updates that specialize the gadget to the
stage vertex, ask one query whose answer says whether that vertex lies in a
triangle, and restore the gadget (inverse updates in full mode, rollback
otherwise). The set-system routines instead walk the edges with one
intersection and one query each.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .engines import Mode, ProblemKind, direct_factory
from .model import (
    ActivateNode,
    ConstructionError,
    CostCounters,
    DeactivateNode,
    DeleteEdge,
    DomainError,
    Graph,
    InsertEdge,
    IntersectSets,
    IsEmpty,
    KAugFreeMatchingSize,
    Member,
    SetSystem,
    StConnected,
    StReachable,
)

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class TriangleWitness:
    """Either a full vertex triple or just an anchor known to sit in a triangle."""

    u: int | None = None
    v: int | None = None
    w: int | None = None
    anchor: int | None = None

    def verify(self, g: Graph) -> bool:
        if self.u is not None and self.v is not None and self.w is not None:
            if len({self.u, self.v, self.w}) != 3:
                return False
            return (g.has_edge(self.u, self.v) and g.has_edge(self.v, self.w)
                    and g.has_edge(self.u, self.w))
        if self.anchor is None:
            return False
        nb = sorted(g.out_neighbors(self.anchor))
        for i, a in enumerate(nb):
            for b in nb[i + 1:]:
                if g.has_edge(a, b):
                    return True
        return False


def _require_undirected(g: Graph) -> None:
    if g.directed:
        raise DomainError("triangle reductions take undirected graphs")


def _as_mode(mode) -> Mode:
    return mode if isinstance(mode, Mode) else Mode(mode)


def _anchor_stage(handle, mode, install, uninstall, query, interpret) -> bool:
    """One stage: install, query, and restore only when the stage missed.

    A hit returns immediately with the gadget left specialized, so the
    caller's early return reports honest counters for the partial run.
    """
    if mode is Mode.FULL:
        for op in install:
            handle.update(op)
        hit = interpret(handle.query(query))
        if not hit:
            for op in uninstall:
                handle.update(op)
        return hit
    cp = handle.checkpoint()
    for op in install:
        handle.update(op)
    hit = interpret(handle.query(query))
    if not hit:
        handle.rollback(cp)
    return hit


# ---------------------------------------------------------------------------
# reachability gadgets


def build_streach_gadget(g: Graph) -> Graph:
    """Directed four-layer host with endpoints for per-vertex reach stages.

    Vertex copies sit at offsets 0, n, 2n and 3n; s = 4n and t = 4n + 1 start
    with no incident arcs. Each source edge {u, v} contributes layer-to-layer
    arcs in both labelings, so once a stage opens s -> x and 3n + x -> t, the
    endpoints connect exactly when x closes a triangle.
    """
    n = g.node_count
    h = Graph(4 * n + 2, directed=True, s=4 * n, t=4 * n + 1)
    for u, v in g.edges():
        for a, b in ((u, v), (v, u)):
            h.add_edge(a, n + b)
            h.add_edge(n + a, 2 * n + b)
            h.add_edge(2 * n + a, 3 * n + b)
    return h


def triangle_via_streach(g: Graph, *, mode="full", factory=direct_factory):
    """Anchor search with two arc insertions and one reach query per vertex."""
    _require_undirected(g)
    mode = _as_mode(mode)
    if mode is Mode.DECREMENTAL:
        raise DomainError(
            "deletions-only runs go through triangle_via_streach_decremental")
    n = g.node_count
    h = build_streach_gadget(g)
    handle = factory(ProblemKind.ST_REACH, mode, h)
    s, t = 4 * n, 4 * n + 1
    for x in range(n):
        install = [InsertEdge(s, x), InsertEdge(3 * n + x, t)]
        uninstall = [DeleteEdge(s, x), DeleteEdge(3 * n + x, t)]
        if _anchor_stage(handle, mode, install, uninstall, StReachable(), bool):
            return x, handle.counters
    return None, handle.counters


@dataclass(frozen=True)
class TreeLayout:
    """Node ids of the two routing trees, heap-indexed (slot 0 unused).

    Slots [1, leaf_count) are internal nodes, slot 1 being the root (s for
    the out-tree, t for the in-tree); slots [leaf_count, 2*leaf_count) are
    the leaves in vertex order, real copies first, then inert dummies.
    """

    leaf_count: int
    s_nodes: tuple[int, ...]
    t_nodes: tuple[int, ...]


def build_streach_trees(g: Graph) -> tuple[Graph, TreeLayout]:
    """Four-layer host plus two binary routing trees for deletions-only runs.

    The out-tree fans from s down to the first-layer copies and the in-tree
    funnels last-layer copies into t; leaf counts are padded to a power of
    two with dummy leaves that carry no other arcs.
    """
    n = g.node_count
    leaves = 1
    while leaves < n:
        leaves *= 2
    s, t = 4 * n, 4 * n + 1
    internal = max(leaves - 2, 0)
    dummies = leaves - n
    base = 4 * n + 2
    h = Graph(base + 2 * (internal + dummies), directed=True, s=s, t=t)
    for u, v in g.edges():
        for a, b in ((u, v), (v, u)):
            h.add_edge(a, n + b)
            h.add_edge(n + a, 2 * n + b)
            h.add_edge(2 * n + a, 3 * n + b)

    def layout(root, internal_base, leaf_base, dummy_base):
        nodes = [-1] * (2 * leaves)
        if leaves == 1:
            nodes[1] = leaf_base if n == 1 else dummy_base
            return tuple(nodes)
        nodes[1] = root
        for hh in range(2, leaves):
            nodes[hh] = internal_base + hh - 2
        for j in range(leaves):
            nodes[leaves + j] = leaf_base + j if j < n else dummy_base + (j - n)
        return tuple(nodes)

    s_nodes = layout(s, base, 0, base + internal)
    t_nodes = layout(t, base + internal + dummies, 3 * n,
                     base + 2 * internal + dummies)
    if leaves == 1:
        h.add_edge(s, s_nodes[1])
        h.add_edge(t_nodes[1], t)
    else:
        for hh in range(1, leaves):
            for child in (2 * hh, 2 * hh + 1):
                h.add_edge(s_nodes[hh], s_nodes[child])
                h.add_edge(t_nodes[child], t_nodes[hh])
    return h, TreeLayout(leaves, s_nodes, t_nodes)


def triangle_via_streach_decremental(g: Graph, *, factory=direct_factory):
    """Anchor search by deletions only, via the routing trees.

    A depth-first sweep keeps exactly one root-to-leaf path open per stage:
    descending into a subtree deletes the sibling edge in both trees, and
    backtracking restores it with a rollback. Every tree edge is therefore
    deleted at most once and restored at most once, and the stage for leaf x
    queries reachability with x's copies as the only open leaves.
    """
    _require_undirected(g)
    n = g.node_count
    h, lay = build_streach_trees(g)
    handle = factory(ProblemKind.ST_REACH, Mode.DECREMENTAL, h)
    leaves = lay.leaf_count
    found = None

    def visit(hh: int) -> None:
        nonlocal found
        if hh >= leaves:
            j = hh - leaves
            if j < n and handle.query(StReachable()):
                found = j
            return
        for keep, cut in ((2 * hh, 2 * hh + 1), (2 * hh + 1, 2 * hh)):
            cp = handle.checkpoint()
            handle.update(DeleteEdge(lay.s_nodes[hh], lay.s_nodes[cut]))
            handle.update(DeleteEdge(lay.t_nodes[cut], lay.t_nodes[hh]))
            visit(keep)
            if found is not None:
                return
            handle.rollback(cp)

    visit(1)
    return found, handle.counters


# ---------------------------------------------------------------------------
# activation gadget


def build_subconn_gadget(g: Graph, *, start_active: bool) -> Graph:
    """Bipartite host on two vertex copies with always-on endpoints.

    Copies sit at v and n + v; s = 2n adjoins every first copy and
    t = 2n + 1 every second copy. Each source edge {u, v} appears once as
    the cross edge between the smaller id's first copy and the larger id's
    second copy. Copies start inactive unless start_active.
    """
    n = g.node_count
    h = Graph(2 * n + 2, s=2 * n, t=2 * n + 1,
              active=set(range(2 * n)) if start_active else set())
    for u, v in g.edges():
        a, b = (u, v) if u < v else (v, u)
        h.add_edge(a, n + b)
    for v in range(n):
        h.add_edge(2 * n, v)
        h.add_edge(2 * n + 1, n + v)
    return h


def triangle_via_subconn(g: Graph, *, mode="full", factory=direct_factory):
    """Anchor search by activating each vertex's neighborhood.

    With exactly the copies of N(x) active, s and t connect exactly when
    some cross edge has both endpoints in the neighborhood, i.e. when x
    closes a triangle. Deletions-only runs start all-active and deactivate
    the non-neighbors instead.
    """
    _require_undirected(g)
    mode = _as_mode(mode)
    n = g.node_count
    h = build_subconn_gadget(g, start_active=(mode is Mode.DECREMENTAL))
    handle = factory(ProblemKind.ST_SUBCONN, mode, h)
    for x in range(n):
        nbrs = sorted(g.out_neighbors(x))
        if mode is Mode.DECREMENTAL:
            nbr_set = g.out_neighbors(x)
            install = [op for v in range(n) if v not in nbr_set
                       for op in (DeactivateNode(v), DeactivateNode(n + v))]
            uninstall: list = []
        else:
            install = [op for v in nbrs
                       for op in (ActivateNode(v), ActivateNode(n + v))]
            uninstall = [op for v in nbrs
                         for op in (DeactivateNode(v), DeactivateNode(n + v))]
        if _anchor_stage(handle, mode, install, uninstall, StConnected(), bool):
            return x, handle.counters
    return None, handle.counters


# ---------------------------------------------------------------------------
# matching gadgets


def build_5bpm_gadget(g: Graph, *, pair_edges: bool = True) -> Graph:
    """Two-copy matching host for neighborhood-deletion stages.

    Layer offsets: first copies at 0, their private partners at n, second
    copies at 2n, partners at 3n. Each source edge {u, v} appears between
    the copy layers in both labelings. Private pair edges are omitted when
    pair_edges is false so insertion-only runs can add them per stage.
    """
    n = g.node_count
    h = Graph(4 * n)
    for u, v in g.edges():
        for a, b in ((u, v), (v, u)):
            h.add_edge(a, 2 * n + b)
    if pair_edges:
        for v in range(n):
            h.add_edge(n + v, v)
            h.add_edge(3 * n + v, 2 * n + v)
    return h


def triangle_via_5bpm(g: Graph, *, mode="full", factory=direct_factory):
    """Anchor search via matchings free of length-5 augmenting paths.

    Stage x removes the private pair edges of N(x)'s copies; any such
    matching then exceeds 2(n - |N(x)|) exactly when two neighbors of x are
    adjacent. Insertion-only runs start without pair edges and insert the
    complement family per stage.
    """
    _require_undirected(g)
    mode = _as_mode(mode)
    n = g.node_count
    h = build_5bpm_gadget(g, pair_edges=(mode is not Mode.INCREMENTAL))
    handle = factory(ProblemKind.KBPM, mode, h)
    for x in range(n):
        nbr_set = g.out_neighbors(x)
        threshold = 2 * (n - len(nbr_set))
        if mode is Mode.INCREMENTAL:
            install = [op for v in range(n) if v not in nbr_set
                       for op in (InsertEdge(n + v, v), InsertEdge(3 * n + v, 2 * n + v))]
            uninstall: list = []
        else:
            nbrs = sorted(nbr_set)
            install = [op for v in nbrs
                       for op in (DeleteEdge(n + v, v), DeleteEdge(3 * n + v, 2 * n + v))]
            uninstall = [op for v in nbrs
                         for op in (InsertEdge(n + v, v), InsertEdge(3 * n + v, 2 * n + v))]
        if _anchor_stage(handle, mode, install, uninstall, KAugFreeMatchingSize(5),
                         lambda size, threshold=threshold: size > threshold):
            return x, handle.counters
    return None, handle.counters


def build_17bpm_gadget(g: Graph, *, anchor_pairs: bool = True) -> Graph:
    """Eight-layer matching host for two-deletion stages.

    Layers sit at offsets k*n for k in 0..7, paired as (0,1), (2,3), (4,5),
    (6,7). Each source edge {u, v} appears in both labelings between layers
    1 -> 2, 3 -> 4 and 5 -> 6; every vertex carries a private pair edge in
    each layer pair. The outer pairs (0,1) and (6,7) are omitted when
    anchor_pairs is false so insertion-only runs can add them per stage.
    """
    n = g.node_count
    h = Graph(8 * n)
    for u, v in g.edges():
        for a, b in ((u, v), (v, u)):
            h.add_edge(n + a, 2 * n + b)
            h.add_edge(3 * n + a, 4 * n + b)
            h.add_edge(5 * n + a, 6 * n + b)
    for v in range(n):
        h.add_edge(2 * n + v, 3 * n + v)
        h.add_edge(4 * n + v, 5 * n + v)
        if anchor_pairs:
            h.add_edge(v, n + v)
            h.add_edge(6 * n + v, 7 * n + v)
    return h


def triangle_via_17bpm(g: Graph, *, mode="full", factory=direct_factory):
    """Anchor search via matchings free of length-17 augmenting paths.

    Stage x removes only x's two outer pair edges; the matching size is at
    most 4n - 2 when x lies in no triangle and exactly 4n - 1 when it does
    (anything else trips a construction check). Four updates per full-mode
    stage, one query each.
    """
    _require_undirected(g)
    mode = _as_mode(mode)
    n = g.node_count
    h = build_17bpm_gadget(g, anchor_pairs=(mode is not Mode.INCREMENTAL))
    handle = factory(ProblemKind.KBPM, mode, h)

    def interpret(size: int) -> bool:
        if size <= 4 * n - 2:
            return False
        if size != 4 * n - 1:
            raise ConstructionError(
                f"matching size {size} exceeds the miss bound but is not {4 * n - 1}")
        return True

    for x in range(n):
        if mode is Mode.INCREMENTAL:
            install = [op for v in range(n) if v != x
                       for op in (InsertEdge(v, n + v),
                                  InsertEdge(6 * n + v, 7 * n + v))]
            uninstall: list = []
        else:
            install = [DeleteEdge(x, n + x), DeleteEdge(6 * n + x, 7 * n + x)]
            uninstall = [InsertEdge(x, n + x), InsertEdge(6 * n + x, 7 * n + x)]
        if _anchor_stage(handle, mode, install, uninstall,
                         KAugFreeMatchingSize(17), interpret):
            return x, handle.counters
    return None, handle.counters


# ---------------------------------------------------------------------------
# set-system routes


def triangle_via_empty_pp(g: Graph, *, factory=direct_factory):
    """Edge scan over neighborhood sets: one intersection and one emptiness
    query per edge; N(u) and N(v) share a member exactly when {u, v} closes
    a triangle."""
    _require_undirected(g)
    n = g.node_count
    ss = SetSystem(n, [sorted(g.out_neighbors(u)) for u in range(n)])
    handle = factory(ProblemKind.EMPTY_PP, Mode.FULL, ss)
    for u, v in g.edges():
        i = handle.update(IntersectSets(u, v))
        if not handle.query(IsEmpty(i)):
            return True, handle.counters
    return False, handle.counters


def _cube_ceil(m: int) -> int:
    d = 1
    while d * d * d < m:
        d += 1
    return d


def triangle_via_pp(g: Graph, *, factory=direct_factory, seed: int = 0):
    """Two-phase membership detection over neighborhood sets.

    The degree threshold is the cube root of the edge count. High-degree
    vertices each get an exact non-neighbor set; folding those over every
    vertex's high-degree neighbors makes the membership query along an edge
    fail exactly when the endpoints share a high-degree neighbor. Edges
    between two low-degree endpoints run the same scheme over hashed
    neighborhoods with several independent multiply-shift functions: a real
    shared neighbor collides under every function, so triangles are never
    missed, while spurious collisions must survive all functions to produce
    a false alarm.
    """
    _require_undirected(g)
    n = g.node_count
    total = CostCounters()
    edges = g.edges()
    m = len(edges)
    if m == 0:
        return False, total
    delta = _cube_ceil(m)
    deg = [g.degree(v) for v in range(n)]
    nbrs = [sorted(g.out_neighbors(v)) for v in range(n)]

    high = [v for v in range(n) if deg[v] >= delta]
    if high:
        index = {j: i for i, j in enumerate(high)}
        high_sets = [[a for a in range(n) if not g.has_edge(j, a)] for j in high]
        handle = factory(ProblemKind.PP, Mode.FULL, SetSystem(n, high_sets))
        folded: list[int | None] = []
        for b in range(n):
            acc = None
            hn = [c for c in nbrs[b] if deg[c] >= delta]
            if hn:
                acc = index[hn[0]]
                for c in hn[1:]:
                    acc = handle.update(IntersectSets(acc, index[c]))
            folded.append(acc)
        hit = False
        for a, b in edges:
            if folded[b] is not None and not handle.query(Member(folded[b], a)):
                hit = True
                break
        total.absorb(handle.counters)
        if hit:
            return True, total

    suspects = [(a, b) for a, b in edges if deg[a] < delta and deg[b] < delta]
    if not suspects:
        return False, total
    rounds = max(1, math.ceil(2 * math.log2(n)))
    bits = (max(4 * delta * delta, 2) - 1).bit_length()
    buckets = 1 << bits
    rng = random.Random(seed)
    for _ in range(rounds):
        mul = rng.getrandbits(64) | 1
        add = rng.getrandbits(64)

        def hashed(x: int, mul=mul, add=add) -> int:
            return ((mul * x + add) & _MASK64) >> (64 - bits)

        image = [{hashed(c) for c in nbrs[a]} for a in range(n)]
        hash_sets = [[a for a in range(n) if j not in image[a]]
                     for j in range(buckets)]
        handle = factory(ProblemKind.PP, Mode.FULL, SetSystem(n, hash_sets))
        folded = []
        for b in range(n):
            acc = None
            if nbrs[b]:
                vals = [hashed(c) for c in nbrs[b]]
                acc = vals[0]
                for j in vals[1:]:
                    acc = handle.update(IntersectSets(acc, j))
            folded.append(acc)
        survivors = []
        for a, b in suspects:
            if not handle.query(Member(folded[b], a)):
                survivors.append((a, b))
        total.absorb(handle.counters)
        suspects = survivors
        if not suspects:
            return False, total
    return True, total


# ---------------------------------------------------------------------------
# degree splitting


def split_by_degree(g: Graph, threshold: int, dense_routine) -> TriangleWitness | None:
    """Wedge-scan low-degree vertices, then defer to a dense-side routine.

    Every triangle with a vertex of degree at most threshold is caught by
    scanning that vertex's neighbor pairs; the remainder can only live in
    the subgraph induced by the high-degree vertices, which is relabeled and
    passed to dense_routine (a callable returning an anchor id in the
    subgraph or None). Returned witnesses are verified against g.
    """
    _require_undirected(g)
    if threshold < 0:
        raise DomainError("threshold must be nonnegative")
    n = g.node_count
    for x in range(n):
        nb = sorted(g.out_neighbors(x))
        if len(nb) > threshold:
            continue
        for i, a in enumerate(nb):
            for b in nb[i + 1:]:
                if g.has_edge(a, b):
                    witness = TriangleWitness(u=x, v=a, w=b)
                    if not witness.verify(g):
                        raise ConstructionError("wedge scan produced a bad triple")
                    return witness
    high = [v for v in range(n) if g.degree(v) > threshold]
    if len(high) < 3:
        return None
    pos = {v: i for i, v in enumerate(high)}
    sub = Graph(len(high))
    for u, v in g.edges():
        if u in pos and v in pos:
            sub.add_edge(pos[u], pos[v])
    anchor = dense_routine(sub)
    if anchor is None:
        return None
    witness = TriangleWitness(anchor=high[anchor])
    if not witness.verify(g):
        raise ConstructionError("dense routine returned a vertex not in any triangle")
    return witness
