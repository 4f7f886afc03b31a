"""Listing triangle pairs of a tripartite graph through connectivity probes.

An instance has parts A and B of equal size and a smaller part C; every
A/B vertex keeps a capped number of C-neighbors.  The goal is to list all
pairs (a, b) in E_AB that close a triangle through some c in C, stopping
early once more than a configured number of pairs has been reported.

The listing drives a block binary search over B: a probe asks whether a
fixed a forms a triangle with any of its B-neighbors inside a block of
contiguous B-indices.  Probes are answered either by a fully dynamic
subgraph-connectivity engine (activate the copies, query, roll back) or,
through the decremental adapter, by an edge-deletion-only reachability
engine that prunes two routing trees instead of activating nodes.
"""

import math
import random
from bisect import bisect_left
from dataclasses import dataclass, field

from .engines import Mode, ProblemKind, direct_factory
from .limits import TRIPARTITE_MAX_SIDE
from .model import (
    ActivateNode,
    ConstructionError,
    CostCounters,
    DeleteEdge,
    DomainError,
    Graph,
    GuardError,
    StConnected,
    StReachable,
)
from .triangle_reductions import TreeLayout

CAP_FACTOR = 2  # slack multiplier in the degree and pair-count caps

OVERFLOW = "overflow"  # distinguished list_pairs result, not an error


def _ceil_log2(x: int) -> int:
    return max(0, (x - 1).bit_length())


@dataclass
class TripartiteInstance:
    """Tripartite graph with index-based parts A, B (size `side`) and C.

    Edge sets hold 0-based index pairs: e_ab over A x B, e_ac over A x C,
    e_bc over B x C.  degree_cap bounds every A/B vertex's C-degree and
    delta caps how many pairs a listing run may report.
    """

    n_c: int
    r: int
    side: int
    e_ab: frozenset = field(default_factory=frozenset)
    e_ac: frozenset = field(default_factory=frozenset)
    e_bc: frozenset = field(default_factory=frozenset)
    degree_cap: int = 0
    delta: int = 0

    def validate(self) -> None:
        if self.n_c < 1 or self.r < 1 or self.side < 1:
            raise DomainError("parts must be nonempty")
        for a, b in self.e_ab:
            if not (0 <= a < self.side and 0 <= b < self.side):
                raise DomainError(f"ab edge ({a},{b}) out of range")
        for name, pairs in (("ac", self.e_ac), ("bc", self.e_bc)):
            degrees: dict[int, int] = {}
            for u, c in pairs:
                if not (0 <= u < self.side and 0 <= c < self.n_c):
                    raise DomainError(f"{name} edge ({u},{c}) out of range")
                degrees[u] = degrees.get(u, 0) + 1
            worst = max(degrees.values(), default=0)
            if worst > self.degree_cap:
                raise DomainError(
                    f"{name} degree {worst} exceeds cap {self.degree_cap}")
        if len(self.e_ab) > CAP_FACTOR * self.n_c * self.r:
            raise DomainError(
                f"{len(self.e_ab)} ab edges exceed cap {CAP_FACTOR * self.n_c * self.r}")

    def c_neighbors_of_a(self, a: int) -> list[int]:
        return sorted(c for x, c in self.e_ac if x == a)

    def c_neighbors_of_b(self, b: int) -> list[int]:
        return sorted(c for x, c in self.e_bc if x == b)


def _derived_side(n_c: int, r: int) -> int:
    """Exact ceil(r * sqrt(n_c)) without floating point."""
    t = r * r * n_c
    s = math.isqrt(t)
    return s if s * s == t else s + 1


def _default_delta(n_c: int, r: int) -> int:
    return max(1, -(-CAP_FACTOR * n_c * n_c // r))


def gen_tripartite_instance(n_c: int, r: int, density: float, seed: int) -> TripartiteInstance:
    """Sample an instance under the degree and pair-count caps, reproducibly."""
    if n_c < 1 or r < 1:
        raise DomainError("n_c and r must be positive")
    if not 0 <= density <= 1:
        raise DomainError(f"density {density} outside [0, 1]")
    side = _derived_side(n_c, r)
    if side > TRIPARTITE_MAX_SIDE:
        raise GuardError(f"side {side} exceeds {TRIPARTITE_MAX_SIDE}")
    rng = random.Random(seed)
    degree_cap = -(-CAP_FACTOR * n_c // r)
    parts = []
    for _ in range(2):
        edges = set()
        for u in range(side):
            picks = [c for c in range(n_c) if rng.random() < density]
            if len(picks) > degree_cap:
                picks = rng.sample(picks, degree_cap)
            edges.update((u, c) for c in picks)
        parts.append(edges)
    e_ac, e_bc = parts
    ab = [(a, b) for a in range(side) for b in range(side)
          if rng.random() < density]
    ab_cap = CAP_FACTOR * n_c * r
    if len(ab) > ab_cap:
        ab = rng.sample(ab, ab_cap)
    inst = TripartiteInstance(
        n_c=n_c, r=r, side=side,
        e_ab=frozenset(ab), e_ac=frozenset(e_ac), e_bc=frozenset(e_bc),
        degree_cap=degree_cap, delta=_default_delta(n_c, r))
    inst.validate()
    return inst


def dump_instance(inst: TripartiteInstance) -> str:
    lines = [f"parts {inst.side} {inst.n_c} {inst.r}"]
    for tag, pairs in (("ab", inst.e_ab), ("ac", inst.e_ac), ("bc", inst.e_bc)):
        for u, v in sorted(pairs):
            lines.append(f"{tag} {u} {v}")
    return "\n".join(lines) + "\n"


def load_instance(text: str) -> TripartiteInstance:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("parts "):
        raise DomainError("missing partition header line")
    try:
        side, n_c, r = (int(x) for x in lines[0].split()[1:])
    except ValueError as exc:
        raise DomainError(f"bad header: {lines[0]!r}") from exc
    buckets: dict[str, set] = {"ab": set(), "ac": set(), "bc": set()}
    for ln in lines[1:]:
        fields = ln.split()
        if len(fields) != 3 or fields[0] not in buckets:
            raise DomainError(f"bad edge line: {ln!r}")
        try:
            buckets[fields[0]].add((int(fields[1]), int(fields[2])))
        except ValueError as exc:
            raise DomainError(f"bad edge line: {ln!r}") from exc
    inst = TripartiteInstance(
        n_c=n_c, r=r, side=side,
        e_ab=frozenset(buckets["ab"]), e_ac=frozenset(buckets["ac"]),
        e_bc=frozenset(buckets["bc"]),
        degree_cap=-(-CAP_FACTOR * n_c // r), delta=_default_delta(n_c, r))
    inst.validate()
    return inst


def brute_force_pairs(inst: TripartiteInstance) -> list[tuple[int, int]]:
    """All (a, b) in E_AB sharing a C-neighbor; the listing reference answer."""
    ac: dict[int, set] = {}
    for a, c in inst.e_ac:
        ac.setdefault(a, set()).add(c)
    bc: dict[int, set] = {}
    for b, c in inst.e_bc:
        bc.setdefault(b, set()).add(c)
    return sorted((a, b) for a, b in inst.e_ab
                  if ac.get(a, set()) & bc.get(b, set()))


def brute_force_triangles(inst: TripartiteInstance) -> list[tuple[int, int, int]]:
    ac: dict[int, set] = {}
    for a, c in inst.e_ac:
        ac.setdefault(a, set()).add(c)
    bc: dict[int, set] = {}
    for b, c in inst.e_bc:
        bc.setdefault(b, set()).add(c)
    out = []
    for a, b in inst.e_ab:
        for c in sorted(ac.get(a, set()) & bc.get(b, set())):
            out.append((a, b, c))
    return sorted(out)


def _b_adjacency(inst: TripartiteInstance) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {}
    for a, b in inst.e_ab:
        adj.setdefault(a, []).append(b)
    for lst in adj.values():
        lst.sort()
    return adj


class SubconnProbe:
    """Block probe over a fully dynamic subgraph-connectivity engine.

    The engine's graph keeps C and the terminals always active while every
    A/B copy starts inactive; a probe activates one a-copy plus its
    B-neighbors inside the block, queries, and rolls the activations back.
    """

    def __init__(self, inst: TripartiteInstance, factory=direct_factory):
        inst.validate()
        self.inst = inst
        side, n_c = inst.side, inst.n_c
        self.levels = _ceil_log2(side)
        self._b_adj = _b_adjacency(inst)
        s, t = 2 * side + n_c, 2 * side + n_c + 1
        h = Graph(2 * side + n_c + 2, s=s, t=t,
                  active=set(range(2 * side, 2 * side + n_c)) | {s, t})
        for a, c in inst.e_ac:
            h.add_edge(a, 2 * side + c)
        for b, c in inst.e_bc:
            h.add_edge(side + b, 2 * side + c)
        for a in range(side):
            h.add_edge(s, a)
        for b in range(side):
            h.add_edge(side + b, t)
        if h.edge_count != len(inst.e_ac) + len(inst.e_bc) + 2 * side:
            raise ConstructionError("edge budget violated")
        self.eng = factory(ProblemKind.ST_SUBCONN, Mode.FULL, h)

    @property
    def counters(self) -> CostCounters:
        return self.eng.counters

    def block_members(self, a: int, i: int, j: int) -> list[int]:
        """B-neighbors of a inside block j of level i (1-indexed blocks)."""
        if not 0 <= a < self.inst.side:
            raise DomainError(f"a {a} out of range")
        if not 0 <= i <= self.levels or not 1 <= j <= 1 << i:
            raise DomainError(f"block ({i},{j}) out of range")
        size = (1 << self.levels) >> i
        lo = (j - 1) * size
        lst = self._b_adj.get(a, [])
        return lst[bisect_left(lst, lo):bisect_left(lst, lo + size)]

    def probe(self, a: int, i: int, j: int) -> bool:
        members = self.block_members(a, i, j)
        side = self.inst.side
        if not members:
            return self.eng.query(StConnected())
        cp = self.eng.checkpoint()
        self.eng.update(ActivateNode(a))
        for b in members:
            self.eng.update(ActivateNode(side + b))
        answer = self.eng.query(StConnected())
        self.eng.rollback(cp)
        return answer


def build_subconn_probe(inst: TripartiteInstance, factory=direct_factory) -> SubconnProbe:
    return SubconnProbe(inst, factory)


def triangle_probe(probe, a: int, i: int, j: int) -> bool:
    """Does a close a triangle with some B-neighbor in block (i, j)?"""
    return probe.probe(a, i, j)


def list_pairs(inst: TripartiteInstance, probe, delta: int | None = None):
    """Binary-search listing of all triangle pairs, or OVERFLOW past delta.

    Descends the block tree only below positive probes, so a pair is
    reported exactly when its leaf block answers yes; blocks holding no
    real B-index are never probed.
    """
    if delta is None:
        delta = inst.delta
    side = inst.side
    levels = _ceil_log2(side)
    block_count = 1 << levels
    pairs: list[tuple[int, int]] = []
    overflow = False

    def search(a: int, i: int, j: int) -> None:
        nonlocal overflow
        if not triangle_probe(probe, a, i, j):
            return
        if i == levels:
            pairs.append((a, j - 1))
            if len(pairs) > delta:
                overflow = True
            return
        for cj in (2 * j - 1, 2 * j):
            if (cj - 1) * (block_count >> (i + 1)) >= side:
                continue  # dummy-only block
            search(a, i + 1, cj)
            if overflow:
                return

    for a in range(side):
        search(a, 0, 1)
        if overflow:
            return OVERFLOW, probe.counters
    return sorted(pairs), probe.counters


def pairs_to_triangles(inst: TripartiteInstance, pairs) -> list[tuple[int, int, int]]:
    """Expand listed pairs to full triangles by scanning their C-neighborhoods."""
    ac: dict[int, set] = {}
    for a, c in inst.e_ac:
        ac.setdefault(a, set()).add(c)
    bc: dict[int, set] = {}
    for b, c in inst.e_bc:
        bc.setdefault(b, set()).add(c)
    out = []
    for a, b in pairs:
        for c in sorted(ac.get(a, set()) | bc.get(b, set())):
            if c in ac.get(a, set()) and c in bc.get(b, set()):
                out.append((a, b, c))
    return sorted(set(out))


class DecrementalTraceAdapter:
    """Probe answered by a decremental reachability engine.

    Two routing trees stand in for activation: an out-tree below s over the
    A-copies and an in-tree above t over the B-copies.  A probe deletes the
    boundary edges that cut every leaf except a on the s-side and except
    the block's B-neighbors on the t-side, queries, and rolls back.
    """

    def __init__(self, inst: TripartiteInstance, streach_factory=direct_factory):
        inst.validate()
        self.inst = inst
        side, n_c = inst.side, inst.n_c
        self.levels = _ceil_log2(side)
        self._b_adj = _b_adjacency(inst)
        leaves = max(2, 1 << self.levels)
        self._tree_leaves = leaves
        base = 2 * side + n_c
        s, t = base, base + 1
        ids = iter(range(base + 2, base + 2 + 2 * (leaves - 2) + 2 * (leaves - side)))
        s_nodes = [-1, s] + [next(ids) for _ in range(leaves - 2)]
        s_nodes += list(range(side)) + [next(ids) for _ in range(leaves - side)]
        t_nodes = [-1, t] + [next(ids) for _ in range(leaves - 2)]
        t_nodes += list(range(side, 2 * side)) + [next(ids) for _ in range(leaves - side)]
        self._layout = TreeLayout(leaves, tuple(s_nodes), tuple(t_nodes))
        h = Graph(base + 2 + 2 * (leaves - 2) + 2 * (leaves - side),
                  directed=True, s=s, t=t)
        for hh in range(1, leaves):
            for child in (2 * hh, 2 * hh + 1):
                if self._leaf_is_dummy(child):
                    continue
                h.add_edge(s_nodes[hh], s_nodes[child])
                h.add_edge(t_nodes[child], t_nodes[hh])
        for a, c in inst.e_ac:
            h.add_edge(a, 2 * side + c)
        for b, c in inst.e_bc:
            h.add_edge(2 * side + c, side + b)
        self.eng = streach_factory(ProblemKind.ST_REACH, Mode.DECREMENTAL, h)

    def _leaf_is_dummy(self, heap_index: int) -> bool:
        return heap_index >= self._tree_leaves and (
            heap_index - self._tree_leaves >= self.inst.side)

    @property
    def counters(self) -> CostCounters:
        return self.eng.counters

    def _prune(self, nodes, kept_leaves, toward_root: bool) -> int:
        """Delete the boundary edges that cut every leaf outside kept_leaves."""
        leaves = self._tree_leaves
        kept = [False] * (2 * leaves)
        for x in kept_leaves:
            kept[leaves + x] = True
        for hh in range(leaves - 1, 0, -1):
            kept[hh] = kept[2 * hh] or kept[2 * hh + 1]
        deletions = 0
        for hh in range(1, leaves):
            if not kept[hh] and hh != 1:
                continue
            for child in (2 * hh, 2 * hh + 1):
                if kept[child] or self._leaf_is_dummy(child):
                    continue
                if kept[hh] or hh == 1:
                    u, v = ((nodes[child], nodes[hh]) if toward_root
                            else (nodes[hh], nodes[child]))
                    self.eng.update(DeleteEdge(u, v))
                    deletions += 1
        return deletions

    def probe(self, a: int, i: int, j: int) -> bool:
        if not 0 <= a < self.inst.side:
            raise DomainError(f"a {a} out of range")
        if not 0 <= i <= self.levels or not 1 <= j <= 1 << i:
            raise DomainError(f"block ({i},{j}) out of range")
        size = (1 << self.levels) >> i
        lo = (j - 1) * size
        lst = self._b_adj.get(a, [])
        members = lst[bisect_left(lst, lo):bisect_left(lst, lo + size)]
        log = max(1, self.levels)
        cp = self.eng.checkpoint()
        if members:
            deletions = self._prune(self._layout.s_nodes, {a}, toward_root=False)
            deletions += self._prune(self._layout.t_nodes, set(members), toward_root=True)
        else:
            # no candidate partner: cutting s from its tree already forces no
            deletions = self._prune(self._layout.s_nodes, set(), toward_root=False)
        answer = self.eng.query(StReachable())
        self.eng.rollback(cp)
        if deletions > 2 * len(members) * log + 2 * log:
            raise ConstructionError(
                f"probe deleted {deletions} edges for {len(members)} members")
        return answer


def decremental_trace_adapter(inst: TripartiteInstance,
                              streach_factory=direct_factory) -> DecrementalTraceAdapter:
    return DecrementalTraceAdapter(inst, streach_factory)
