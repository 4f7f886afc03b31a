"""Core instance types, update/query vocabulary, parsing, and run reports.

Node ids are dense 0-based ints. Gadget builders elsewhere allocate nodes in
contiguous blocks so tests can address them by offset arithmetic.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional


class ParseError(ValueError):
    """Malformed input text. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DomainError(ValueError):
    """Instance or argument outside an operation's domain."""


class GuardError(RuntimeError):
    """Desk-scale size guard tripped (see limits.py for the caps)."""


class ModeError(RuntimeError):
    """Update variant not legal in the engine's mode."""


class StateError(RuntimeError):
    """Update or rollback inconsistent with current state."""


class ConstructionError(RuntimeError):
    """A built gadget violated one of its own size or sanity contracts."""


# ---------------------------------------------------------------------------
# cost accounting


@dataclass
class CostCounters:
    preprocess_units: int = 0
    updates: int = 0
    queries: int = 0
    rollback_ops: int = 0

    def as_dict(self) -> dict:
        # key order is part of the report contract
        return {
            "preprocess_units": self.preprocess_units,
            "updates": self.updates,
            "queries": self.queries,
            "rollback_ops": self.rollback_ops,
        }

    def snapshot(self) -> "CostCounters":
        return CostCounters(self.preprocess_units, self.updates, self.queries, self.rollback_ops)

    def absorb(self, other: "CostCounters") -> None:
        """Fold another engine's totals into this one (multi-engine reductions)."""
        self.preprocess_units += other.preprocess_units
        self.updates += other.updates
        self.queries += other.queries
        self.rollback_ops += other.rollback_ops


# ---------------------------------------------------------------------------
# graphs


def edge_key(u: int, v: int, directed: bool) -> tuple[int, int]:
    if directed or u <= v:
        return (u, v)
    return (v, u)


class Graph:
    """Mutable graph with optional weights, distinguished vertices and an active set.

    Invariants enforced on every mutation: ids in [0, node_count), no self-loops,
    no duplicate edges, weights are ints in [1, max_weight].
    """

    def __init__(
        self,
        node_count: int,
        *,
        directed: bool = False,
        weighted: bool = False,
        max_weight: int | None = None,
        s: int | None = None,
        t: int | None = None,
        s_set: frozenset[int] | None = None,
        t_set: frozenset[int] | None = None,
        active: set[int] | None = None,
    ):
        if node_count < 0:
            raise DomainError("node_count must be nonnegative")
        if weighted and max_weight is not None and max_weight < 1:
            raise DomainError("max_weight must be >= 1")
        self.node_count = node_count
        self.directed = directed
        self.weighted = weighted
        self.max_weight = max_weight if weighted else None
        self._adj: list[set[int]] = [set() for _ in range(node_count)]
        self._w: dict[tuple[int, int], int] = {}
        self.edge_count = 0
        for name, v in (("s", s), ("t", t)):
            if v is not None and not (0 <= v < node_count):
                raise DomainError(f"{name} out of range")
        self.s = s
        self.t = t
        for name, vs in (("s_set", s_set), ("t_set", t_set)):
            if vs is not None and any(not (0 <= v < node_count) for v in vs):
                raise DomainError(f"{name} contains an out-of-range id")
        self.s_set = frozenset(s_set) if s_set is not None else None
        self.t_set = frozenset(t_set) if t_set is not None else None
        if active is not None and any(not (0 <= v < node_count) for v in active):
            raise DomainError("active set contains an out-of-range id")
        self.active: set[int] | None = set(active) if active is not None else None

    # -- mutation

    def _check_ids(self, u: int, v: int) -> None:
        if not (0 <= u < self.node_count) or not (0 <= v < self.node_count):
            raise DomainError(f"edge ({u},{v}) out of range for {self.node_count} nodes")
        if u == v:
            raise DomainError(f"self-loop ({u},{u}) not allowed")

    def add_edge(self, u: int, v: int, w: int | None = None) -> None:
        self._check_ids(u, v)
        key = edge_key(u, v, self.directed)
        if key in self._w or (not self.weighted and self.has_edge(u, v)):
            raise StateError(f"duplicate edge ({u},{v})")
        if self.weighted:
            if w is None:
                raise DomainError(f"edge ({u},{v}) missing weight on weighted graph")
            if not isinstance(w, int) or w < 1:
                raise DomainError(f"edge ({u},{v}) weight must be a positive int")
            if self.max_weight is not None and w > self.max_weight:
                raise DomainError(f"edge ({u},{v}) weight {w} exceeds cap {self.max_weight}")
            self._w[key] = w
        else:
            if w is not None:
                raise DomainError(f"edge ({u},{v}) carries weight on unweighted graph")
            self._w[key] = 0  # presence marker; weight unused
        self._adj[u].add(v)
        if not self.directed:
            self._adj[v].add(u)
        self.edge_count += 1

    def remove_edge(self, u: int, v: int) -> int | None:
        self._check_ids(u, v)
        key = edge_key(u, v, self.directed)
        if key not in self._w:
            raise StateError(f"missing edge ({u},{v})")
        w = self._w.pop(key)
        self._adj[u].discard(v)
        if not self.directed:
            self._adj[v].discard(u)
        self.edge_count -= 1
        return w if self.weighted else None

    def has_edge(self, u: int, v: int) -> bool:
        return edge_key(u, v, self.directed) in self._w

    def weight(self, u: int, v: int) -> int:
        key = edge_key(u, v, self.directed)
        if key not in self._w:
            raise StateError(f"missing edge ({u},{v})")
        if not self.weighted:
            raise DomainError("graph is unweighted")
        return self._w[key]

    # -- access

    def out_neighbors(self, u: int) -> set[int]:
        return self._adj[u]

    neighbors = out_neighbors

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self._w.keys())

    def weighted_edges(self) -> list[tuple[int, int, int]]:
        return sorted((u, v, w) for (u, v), w in self._w.items())

    def degree(self, u: int) -> int:
        if self.directed:
            raise DomainError("degree is defined on undirected graphs")
        return len(self._adj[u])

    def copy(self) -> "Graph":
        g = Graph(
            self.node_count,
            directed=self.directed,
            weighted=self.weighted,
            max_weight=self.max_weight,
            s=self.s,
            t=self.t,
            s_set=self.s_set,
            t_set=self.t_set,
            active=set(self.active) if self.active is not None else None,
        )
        g._adj = [set(a) for a in self._adj]
        g._w = dict(self._w)
        g.edge_count = self.edge_count
        return g

    def _state_tuple(self):
        return (
            self.node_count,
            self.directed,
            self.weighted,
            self.s,
            self.t,
            tuple(sorted(self.s_set)) if self.s_set is not None else None,
            tuple(sorted(self.t_set)) if self.t_set is not None else None,
            tuple(sorted(self.active)) if self.active is not None else None,
            tuple(sorted(self._w.items())),
        )

    def __eq__(self, other) -> bool:
        # max_weight is declared capacity, not structure
        return isinstance(other, Graph) and self._state_tuple() == other._state_tuple()

    def __hash__(self):
        return hash(self._state_tuple())

    def digest(self) -> str:
        return hashlib.sha256(repr(self._state_tuple()).encode()).hexdigest()

    def to_text(self) -> str:
        head = f"{self.node_count} {self.edge_count} "
        head += "directed" if self.directed else "undirected"
        if self.weighted:
            head += " weighted"
        lines = [head]
        for (u, v), w in sorted(self._w.items()):
            lines.append(f"{u} {v} {w}" if self.weighted else f"{u} {v}")
        return "\n".join(lines) + "\n"

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"Graph(n={self.node_count}, m={self.edge_count}, {kind})"


def parse_graph(text: str) -> Graph:
    """Parse the edge-list format: "n m directed|undirected [weighted]" then one edge per line."""
    lines = text.splitlines()
    body = [(i + 1, ln.strip()) for i, ln in enumerate(lines) if ln.strip()]
    if not body:
        raise ParseError("empty graph text")
    ln_no, head = body[0]
    toks = head.split()
    if len(toks) not in (3, 4):
        raise ParseError("header must be 'n m directed|undirected [weighted]'", ln_no)
    try:
        n, m = int(toks[0]), int(toks[1])
    except ValueError:
        raise ParseError("header counts must be integers", ln_no)
    if toks[2] not in ("directed", "undirected"):
        raise ParseError(f"unknown orientation {toks[2]!r}", ln_no)
    weighted = False
    if len(toks) == 4:
        if toks[3] != "weighted":
            raise ParseError(f"unknown header flag {toks[3]!r}", ln_no)
        weighted = True
    if n < 0 or m < 0:
        raise ParseError("negative counts in header", ln_no)
    g = Graph(n, directed=(toks[2] == "directed"), weighted=weighted,
              max_weight=(1 if weighted else None))
    g.max_weight = None  # set after all weights are read
    seen = 0
    max_w = 0
    for ln_no, ln in body[1:]:
        toks = ln.split()
        want = 3 if weighted else 2
        if len(toks) != want:
            raise ParseError(f"expected {want} tokens on edge line", ln_no)
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise ParseError("edge tokens must be integers", ln_no)
        u, v = vals[0], vals[1]
        w = vals[2] if weighted else None
        if weighted and w is not None and w < 1:
            raise ParseError(f"non-positive weight {w}", ln_no)
        try:
            g.add_edge(u, v, w)
        except (DomainError, StateError) as exc:
            raise ParseError(str(exc), ln_no)
        if weighted:
            max_w = max(max_w, w)
        seen += 1
    if seen != m:
        raise ParseError(f"header promised {m} edges, found {seen}")
    if weighted:
        g.max_weight = max(max_w, 1)
    return g


# ---------------------------------------------------------------------------
# CNF formulas


class CnfFormula:
    """CNF over variables 1..var_count; clauses are lists of signed ints.

    The clause count is capped at CLAUSE_CAP_FACTOR * var_count, a documented
    requirement on inputs standing in for sparsification.
    """

    CLAUSE_CAP_FACTOR = 4

    def __init__(self, var_count: int, clauses: list[list[int]],
                 clause_cap_factor: int | None = None):
        if var_count < 0:
            raise DomainError("var_count must be nonnegative")
        cap = (clause_cap_factor if clause_cap_factor is not None
               else self.CLAUSE_CAP_FACTOR) * var_count
        if len(clauses) > cap:
            raise DomainError(
                f"{len(clauses)} clauses exceed the {cap} cap for {var_count} variables")
        for cl in clauses:
            for lit in cl:
                if lit == 0 or abs(lit) > var_count:
                    raise DomainError(f"literal {lit} out of range for {var_count} variables")
        self.var_count = var_count
        self.clauses = [list(cl) for cl in clauses]

    @property
    def clause_count(self) -> int:
        return len(self.clauses)

    def _state_tuple(self):
        return (self.var_count, tuple(tuple(cl) for cl in self.clauses))

    def __eq__(self, other):
        return isinstance(other, CnfFormula) and self._state_tuple() == other._state_tuple()

    def __hash__(self):
        return hash(self._state_tuple())

    def digest(self) -> str:
        return hashlib.sha256(repr(self._state_tuple()).encode()).hexdigest()

    def to_text(self) -> str:
        lines = [f"p cnf {self.var_count} {len(self.clauses)}"]
        for cl in self.clauses:
            lines.append(" ".join(str(l) for l in cl) + " 0")
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return f"CnfFormula(n={self.var_count}, clauses={len(self.clauses)})"


def parse_cnf(text: str) -> CnfFormula:
    """Parse DIMACS CNF. Clause and variable counts must match the header."""
    n = m = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for ln_no, raw in enumerate(text.splitlines(), start=1):
        ln = raw.strip()
        if not ln or ln.startswith("c"):
            continue
        if ln.startswith("p"):
            if n is not None:
                raise ParseError("duplicate problem line", ln_no)
            toks = ln.split()
            if len(toks) != 4 or toks[1] != "cnf":
                raise ParseError("problem line must be 'p cnf <vars> <clauses>'", ln_no)
            try:
                n, m = int(toks[2]), int(toks[3])
            except ValueError:
                raise ParseError("problem line counts must be integers", ln_no)
            if n < 0 or m < 0:
                raise ParseError("negative counts in problem line", ln_no)
            continue
        if n is None:
            raise ParseError("clause before problem line", ln_no)
        for tok in ln.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal token {tok!r}", ln_no)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                if abs(lit) > n:
                    raise ParseError(f"literal {lit} exceeds variable count {n}", ln_no)
                current.append(lit)
    if n is None:
        raise ParseError("missing problem line")
    if current:
        raise ParseError("unterminated clause at end of input")
    if len(clauses) != m:
        raise ParseError(f"header promised {m} clauses, found {len(clauses)}")
    try:
        return CnfFormula(n, clauses)
    except DomainError as exc:
        raise ParseError(str(exc))


# ---------------------------------------------------------------------------
# set systems


class SetSystem:
    """Append-only collection of subsets of [0, universe_size). Ids are stable."""

    def __init__(self, universe_size: int, sets: Iterable[Iterable[int]] = ()):
        if universe_size < 0:
            raise DomainError("universe_size must be nonnegative")
        self.universe_size = universe_size
        self.sets: list[frozenset[int]] = []
        for members in sets:
            self.append_set(members)

    def append_set(self, members: Iterable[int]) -> int:
        fs = frozenset(members)
        if any(not (0 <= x < self.universe_size) for x in fs):
            raise DomainError("set member outside universe")
        self.sets.append(fs)
        return len(self.sets) - 1

    def pop_set(self) -> None:
        # only used by rollback; ids above the popped one never existed afterwards
        if not self.sets:
            raise StateError("no sets to pop")
        self.sets.pop()

    def get(self, i: int) -> frozenset[int]:
        if not (0 <= i < len(self.sets)):
            raise StateError(f"set id {i} out of range")
        return self.sets[i]

    def __len__(self):
        return len(self.sets)

    def _state_tuple(self):
        return (self.universe_size, tuple(tuple(sorted(s)) for s in self.sets))

    def __eq__(self, other):
        return isinstance(other, SetSystem) and self._state_tuple() == other._state_tuple()

    def digest(self) -> str:
        return hashlib.sha256(repr(self._state_tuple()).encode()).hexdigest()

    def copy(self) -> "SetSystem":
        out = SetSystem(self.universe_size)
        out.sets = list(self.sets)
        return out

    def __repr__(self):
        return f"SetSystem(universe={self.universe_size}, sets={len(self.sets)})"


# ---------------------------------------------------------------------------
# update and query vocabulary


@dataclass(frozen=True)
class InsertEdge:
    u: int
    v: int
    w: int | None = None


@dataclass(frozen=True)
class DeleteEdge:
    u: int
    v: int


@dataclass(frozen=True)
class ActivateNode:
    v: int


@dataclass(frozen=True)
class DeactivateNode:
    v: int


@dataclass(frozen=True)
class InsertSet:
    members: frozenset[int]


@dataclass(frozen=True)
class IntersectSets:
    i: int
    j: int


@dataclass(frozen=True)
class AddToScope:
    set_id: int


@dataclass(frozen=True)
class RemoveFromScope:
    set_id: int


UpdateOp = (InsertEdge | DeleteEdge | ActivateNode | DeactivateNode
            | InsertSet | IntersectSets | AddToScope | RemoveFromScope)


@dataclass(frozen=True)
class StConnected:
    """s and t connected in the subgraph induced by the active set plus {s,t}."""


@dataclass(frozen=True)
class StReachable:
    pass


@dataclass(frozen=True)
class ReachCountLessThan:
    """Is |reachable from s, excluding s itself| < limit?"""
    limit: int


@dataclass(frozen=True)
class StronglyConnected:
    pass


@dataclass(frozen=True)
class MoreThanTwoSccs:
    pass


@dataclass(frozen=True)
class SccCount2VsK:
    """True iff the SCC count exceeds k (callers promise it is 2 or > k)."""
    k: int


@dataclass(frozen=True)
class MaxSccSize:
    pass


@dataclass(frozen=True)
class InducedConnected:
    """Is the subgraph induced by the active set connected? (<=1 node: yes)"""


@dataclass(frozen=True)
class UnionIsUniverse:
    pass


@dataclass(frozen=True)
class HasPerfectMatching:
    pass


@dataclass(frozen=True)
class KAugFreeMatchingSize:
    """Size of a matching with no augmenting path of length <= k (k odd)."""
    k: int


@dataclass(frozen=True)
class MaxWeightPmWeight:
    pass


@dataclass(frozen=True)
class StDistance:
    pass


@dataclass(frozen=True)
class AllStReachable:
    """Every node of t_set reachable from every node of s_set."""


@dataclass(frozen=True)
class Diameter:
    pass


@dataclass(frozen=True)
class Member:
    i: int
    u: int


@dataclass(frozen=True)
class IsEmpty:
    i: int


QueryOp = (StConnected | StReachable | ReachCountLessThan | StronglyConnected
           | MoreThanTwoSccs | SccCount2VsK | MaxSccSize | InducedConnected
           | UnionIsUniverse | HasPerfectMatching | KAugFreeMatchingSize
           | MaxWeightPmWeight | StDistance | AllStReachable | Diameter
           | Member | IsEmpty)


# ---------------------------------------------------------------------------
# run reports


@dataclass
class RunReport:
    reduction: str
    mode: str | None
    instance_digest: str
    answer: object
    oracle_answer: object
    counters: CostCounters
    seed: int
    elapsed_ms: int


def emit_report(report: RunReport) -> str:
    """Serialize a run report as JSON with a fixed key order."""
    payload = {
        "reduction": report.reduction,
        "mode": report.mode,
        "instance_digest": report.instance_digest,
        "answer": report.answer,
        "oracle_answer": report.oracle_answer,
        "counters": report.counters.as_dict(),
        "seed": report.seed,
        "elapsed_ms": report.elapsed_ms,
    }
    return json.dumps(payload, separators=(", ", ": "))
