"""Satisfiability through dynamic graph and set-system engines.

Shared shape of every routine here: a block U of the first ceil(delta * n)
variables is folded into explicit "assignment nodes", one per assignment of
U. The remaining variables are enumerated stage by stage; each stage installs
a handful of updates describing which clauses the stage assignment leaves
unsatisfied, asks the engine one query that decides whether some assignment
node completes the stage, and then restores the engine (inverse updates in
full mode, checkpoint/rollback in incremental and decremental mode).

The formula is satisfiable iff some stage can be completed, so the routines
return on the first positive stage and otherwise run all 2^(n - |U|) stages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import limits
from .engines import Mode, ProblemKind, direct_factory
from .model import (
    AddToScope,
    AllStReachable,
    CnfFormula,
    ConstructionError,
    CostCounters,
    DeleteEdge,
    Diameter,
    DomainError,
    Graph,
    GuardError,
    InsertEdge,
    IntersectSets,
    IsEmpty,
    MaxSccSize,
    MoreThanTwoSccs,
    ReachCountLessThan,
    RemoveFromScope,
    SccCount2VsK,
    SetSystem,
    UnionIsUniverse,
)


# ---------------------------------------------------------------------------
# fail tables: which block assignments fail which clauses


@dataclass
class FailTable:
    """Per-clause failing-assignment sets for one or two variable blocks.

    Block b covers variables (b*split, (b+1)*split], and bit i of an
    assignment index is the value of the (i+1)-th variable of the block.
    fail[b][j] is the set of block-b assignments satisfying no literal of
    clause j inside that block. Stage bits cover the leftover variables.
    """

    var_count: int
    split: int
    assign_count: int
    stage_bits: int
    blocks: int
    fail: list[list[frozenset[int]]]
    _stage_pos: list[int]
    _stage_neg: list[int]

    def stage_satisfies(self, j: int, r: int) -> bool:
        """Does stage assignment r satisfy clause j via a leftover variable?"""
        return bool(r & self._stage_pos[j]) or bool(self._stage_neg[j] & ~r)

    def unsat_indices(self, r: int) -> list[int]:
        return [j for j in range(len(self._stage_pos)) if not self.stage_satisfies(j, r)]


def _block_fail_set(clause: list[int], lo: int, hi: int, bits: int) -> frozenset[int]:
    """Assignments of variables (lo, hi] satisfying no clause literal there."""
    pos = neg = 0
    for lit in clause:
        v = abs(lit)
        if lo < v <= hi:
            bit = 1 << (v - lo - 1)
            if lit > 0:
                pos |= bit
            else:
                neg |= bit
    if pos & neg:
        return frozenset()  # complementary literals: every assignment satisfies one
    free = ((1 << bits) - 1) & ~pos & ~neg
    out = []
    sub = free
    while True:
        out.append(sub | neg)
        if sub == 0:
            break
        sub = (sub - 1) & free
    return frozenset(out)


def compute_split(var_count: int, delta: Fraction) -> int:
    if not (0 < delta <= 1):
        raise DomainError("delta must lie in (0, 1]")
    return math.ceil(Fraction(delta) * var_count)


def build_fail_table(formula: CnfFormula, delta, *, blocks: int = 1) -> FailTable:
    if blocks not in (1, 2):
        raise DomainError("blocks must be 1 or 2")
    delta = Fraction(delta)
    n = formula.var_count
    split = compute_split(n, delta)
    if blocks * split > n:
        raise DomainError(
            f"{blocks} blocks of {split} variables do not fit into {n}")
    if split > limits.ASSIGN_BLOCK_MAX_BITS:
        raise GuardError(
            f"block of {split} variables exceeds the {limits.ASSIGN_BLOCK_MAX_BITS} cap")
    fail = [
        [_block_fail_set(cl, b * split, (b + 1) * split, split) for cl in formula.clauses]
        for b in range(blocks)
    ]
    base = blocks * split
    stage_pos, stage_neg = [], []
    for cl in formula.clauses:
        pos = neg = 0
        for lit in cl:
            v = abs(lit)
            if v > base:
                bit = 1 << (v - base - 1)
                if lit > 0:
                    pos |= bit
                else:
                    neg |= bit
        stage_pos.append(pos)
        stage_neg.append(neg)
    return FailTable(
        var_count=n,
        split=split,
        assign_count=1 << split,
        stage_bits=n - base,
        blocks=blocks,
        fail=fail,
        _stage_pos=stage_pos,
        _stage_neg=stage_neg,
    )


# ---------------------------------------------------------------------------
# shared driver plumbing


def _engine_digest(handle):
    while getattr(handle, "inner", None) is not None:
        handle = handle.inner
    st = handle.state
    if st.graph is not None:
        return st.graph.digest()
    scope = tuple(sorted(st.scope)) if st.scope is not None else None
    return (st.sets.digest(), scope)


class _StageLoop:
    """Runs the install/query/restore cycle for one reduction.

    In full mode the installer's updates are undone by explicit inverse
    updates; otherwise a checkpoint is taken and rolled back. With
    check_isolation the engine state digest is compared after every stage.
    """

    def __init__(self, handle, mode: Mode, check_isolation: bool):
        self.handle = handle
        self.mode = mode
        self.check = check_isolation
        self._base = _engine_digest(handle) if check_isolation else None

    def run_stage(self, install_ops, uninstall_ops, query, interpret) -> bool:
        h = self.handle
        if self.mode is Mode.FULL:
            for op in install_ops:
                h.update(op)
            sat_here = interpret(h.query(query))
            for op in uninstall_ops:
                h.update(op)
        else:
            cp = h.checkpoint()
            for op in install_ops:
                h.update(op)
            sat_here = interpret(h.query(query))
            h.rollback(cp)
        if self.check and _engine_digest(h) != self._base:
            raise ConstructionError("stage was not isolated: state digest drifted")
        return sat_here


def _as_mode(mode) -> Mode:
    return mode if isinstance(mode, Mode) else Mode(mode)


# ---------------------------------------------------------------------------
# single-block reductions


def sat_via_ssr(formula: CnfFormula, *, delta=Fraction(1, 2), mode="full",
                factory=direct_factory, check_isolation=False):
    """Satisfiability via source reach counting.

    Clause nodes point at the assignments failing them; the source points at
    the clauses the stage leaves unsatisfied. The stage is completable iff
    some assignment node escapes the source's reach, i.e. the reach count
    (source excluded) stays below assign_count + out-degree of the source.
    """
    mode = _as_mode(mode)
    t = build_fail_table(formula, delta)
    a_count, c_count = t.assign_count, len(formula.clauses)
    src = a_count + c_count
    g = Graph(a_count + c_count + 1, directed=True, s=src)
    for j in range(c_count):
        for phi in sorted(t.fail[0][j]):
            g.add_edge(a_count + j, phi)
    if mode is Mode.DECREMENTAL:
        for j in range(c_count):
            g.add_edge(src, a_count + j)
    handle = factory(ProblemKind.REACH_COUNT, mode, g)
    loop = _StageLoop(handle, mode, check_isolation)
    answer = False
    for r in range(1 << t.stage_bits):
        unsat = t.unsat_indices(r)
        if mode is Mode.DECREMENTAL:
            unsat_set = set(unsat)
            ops = [DeleteEdge(src, a_count + j) for j in range(c_count)
                   if j not in unsat_set]
            undo: list = []
        else:
            ops = [InsertEdge(src, a_count + j) for j in unsat]
            undo = [DeleteEdge(src, a_count + j) for j in unsat]
        query = ReachCountLessThan(a_count + len(unsat))
        if loop.run_stage(ops, undo, query, lambda ans: ans):
            answer = True
            break
    return answer, handle.counters


def _kept_clauses(t: FailTable) -> list[int]:
    """Clauses that some block assignment fails. The others hold complementary
    literals inside the block, are satisfied by every block assignment, and
    would show up as stray components, so the SCC-shaped routines drop them."""
    return [j for j, f in enumerate(t.fail[0]) if f]


def sat_via_sc2(formula: CnfFormula, *, delta=Fraction(1, 2), mode="full",
                factory=direct_factory, check_isolation=False):
    """Satisfiability via the two-or-more SCC gap.

    Permanent arcs: every assignment node points at a collector s, every
    clause node at its failing assignments. Per stage, s points at the
    unsatisfied clauses (closing cycles through their failing assignments)
    while a second collector s2 pairs up with the satisfied clauses. An
    assignment failing no unsatisfied clause survives as its own singleton
    SCC, so the stage is completable iff there are more than two SCCs.
    """
    mode = _as_mode(mode)
    t = build_fail_table(formula, delta)
    kept = _kept_clauses(t)
    a_count, k = t.assign_count, len(kept)
    s, s2 = a_count + k, a_count + k + 1
    g = Graph(a_count + k + 2, directed=True)
    for phi in range(a_count):
        g.add_edge(phi, s)
    for pos, j in enumerate(kept):
        for phi in sorted(t.fail[0][j]):
            g.add_edge(a_count + pos, phi)
    if mode is Mode.DECREMENTAL:
        for pos in range(k):
            c = a_count + pos
            g.add_edge(s, c)
            g.add_edge(s2, c)
            g.add_edge(c, s2)
    handle = factory(ProblemKind.SC2, mode, g)
    loop = _StageLoop(handle, mode, check_isolation)
    answer = False
    for r in range(1 << t.stage_bits):
        unsat = {j for j in kept if not t.stage_satisfies(j, r)}
        ops: list = []
        undo: list = []
        for pos, j in enumerate(kept):
            c = a_count + pos
            if j in unsat:
                if mode is Mode.DECREMENTAL:
                    ops += [DeleteEdge(s2, c), DeleteEdge(c, s2)]
                else:
                    ops.append(InsertEdge(s, c))
                    undo.append(DeleteEdge(s, c))
            else:
                if mode is Mode.DECREMENTAL:
                    ops.append(DeleteEdge(s, c))
                else:
                    ops += [InsertEdge(s2, c), InsertEdge(c, s2)]
                    undo += [DeleteEdge(s2, c), DeleteEdge(c, s2)]
        if loop.run_stage(ops, undo, MoreThanTwoSccs(), lambda ans: ans):
            answer = True
            break
    return answer, handle.counters


def sat_via_max_scc(formula: CnfFormula, *, delta=Fraction(1, 2), mode="full",
                    factory=direct_factory, check_isolation=False):
    """Satisfiability via the largest SCC size.

    Same cycle structure as sat_via_sc2 but without the second collector.
    The big SCC holds s, the d unsatisfied clauses and every assignment
    failing one of them; an assignment survives outside iff the stage is
    completable, which caps the SCC at d + assign_count.
    """
    mode = _as_mode(mode)
    t = build_fail_table(formula, delta)
    kept = _kept_clauses(t)
    a_count, k = t.assign_count, len(kept)
    s = a_count + k
    g = Graph(a_count + k + 1, directed=True)
    for phi in range(a_count):
        g.add_edge(phi, s)
    for pos, j in enumerate(kept):
        for phi in sorted(t.fail[0][j]):
            g.add_edge(a_count + pos, phi)
    if mode is Mode.DECREMENTAL:
        for pos in range(k):
            g.add_edge(s, a_count + pos)
    handle = factory(ProblemKind.MAX_SCC, mode, g)
    loop = _StageLoop(handle, mode, check_isolation)
    answer = False
    for r in range(1 << t.stage_bits):
        unsat = [j for j in kept if not t.stage_satisfies(j, r)]
        unsat_set = set(unsat)
        if mode is Mode.DECREMENTAL:
            ops = [DeleteEdge(s, a_count + pos) for pos, j in enumerate(kept)
                   if j not in unsat_set]
            undo: list = []
        else:
            ops = [InsertEdge(s, a_count + pos) for pos, j in enumerate(kept)
                   if j in unsat_set]
            undo = [DeleteEdge(s, a_count + pos) for pos, j in enumerate(kept)
                    if j in unsat_set]
        d = len(unsat)
        if loop.run_stage(ops, undo, MaxSccSize(),
                          lambda size, d=d: size <= d + a_count):
            answer = True
            break
    return answer, handle.counters


def sat_via_appx_scc(formula: CnfFormula, *, k: int = 3, delta=Fraction(1, 2),
                     mode="full", factory=direct_factory, check_isolation=False):
    """Satisfiability via a 2-versus-more-than-k SCC count gap.

    The sc2 construction with every assignment node cloned k times: an
    uncompletable stage collapses to exactly two SCCs, a completable one
    yields at least k surviving singleton clones on top of them, so counting
    only has to separate "2" from "more than k".
    """
    if k < 2:
        raise DomainError("clone count k must be at least 2")
    mode = _as_mode(mode)
    t = build_fail_table(formula, delta)
    kept = _kept_clauses(t)
    a_count, kc = t.assign_count, len(kept)
    clause_base = k * a_count
    s, s2 = clause_base + kc, clause_base + kc + 1
    g = Graph(clause_base + kc + 2, directed=True)
    for copy in range(k):
        for phi in range(a_count):
            g.add_edge(copy * a_count + phi, s)
    for pos, j in enumerate(kept):
        c = clause_base + pos
        for phi in sorted(t.fail[0][j]):
            for copy in range(k):
                g.add_edge(c, copy * a_count + phi)
    if mode is Mode.DECREMENTAL:
        for pos in range(kc):
            c = clause_base + pos
            g.add_edge(s, c)
            g.add_edge(s2, c)
            g.add_edge(c, s2)
    handle = factory(ProblemKind.SCC_2_VS_K, mode, g)
    loop = _StageLoop(handle, mode, check_isolation)
    answer = False
    for r in range(1 << t.stage_bits):
        unsat = {j for j in kept if not t.stage_satisfies(j, r)}
        ops: list = []
        undo: list = []
        for pos, j in enumerate(kept):
            c = clause_base + pos
            if j in unsat:
                if mode is Mode.DECREMENTAL:
                    ops += [DeleteEdge(s2, c), DeleteEdge(c, s2)]
                else:
                    ops.append(InsertEdge(s, c))
                    undo.append(DeleteEdge(s, c))
            else:
                if mode is Mode.DECREMENTAL:
                    ops.append(DeleteEdge(s, c))
                else:
                    ops += [InsertEdge(s2, c), InsertEdge(c, s2)]
                    undo += [DeleteEdge(s2, c), DeleteEdge(c, s2)]
        if loop.run_stage(ops, undo, SccCount2VsK(k), lambda ans: ans):
            answer = True
            break
    return answer, handle.counters


# ---------------------------------------------------------------------------
# two-block reductions


def sat_via_st_reach(formula: CnfFormula, *, delta=Fraction(1, 4), mode="full",
                     factory=direct_factory, check_isolation=False):
    """Satisfiability via all-pairs set reachability over two variable blocks.

    Left assignment nodes point at the clauses they fail, mirrored clause
    nodes point at the right-block assignments failing them, and each stage
    bridges clause to mirror for the clauses it leaves unsatisfied. Every
    left-right pair is connected iff no pair of block assignments completes
    the stage, so satisfiability is the negation of the query.
    """
    mode = _as_mode(mode)
    t = build_fail_table(formula, delta, blocks=2)
    a_count, c_count = t.assign_count, len(formula.clauses)
    left_c = a_count
    right_c = a_count + c_count
    right_a = a_count + 2 * c_count
    g = Graph(2 * a_count + 2 * c_count, directed=True,
              s_set=frozenset(range(a_count)),
              t_set=frozenset(range(right_a, right_a + a_count)))
    for j in range(c_count):
        for phi in sorted(t.fail[0][j]):
            g.add_edge(phi, left_c + j)
        for psi in sorted(t.fail[1][j]):
            g.add_edge(right_c + j, right_a + psi)
    if mode is Mode.DECREMENTAL:
        for j in range(c_count):
            g.add_edge(left_c + j, right_c + j)
    handle = factory(ProblemKind.ST_SET_REACH, mode, g)
    loop = _StageLoop(handle, mode, check_isolation)
    answer = False
    for r in range(1 << t.stage_bits):
        unsat = t.unsat_indices(r)
        if mode is Mode.DECREMENTAL:
            unsat_set = set(unsat)
            ops = [DeleteEdge(left_c + j, right_c + j) for j in range(c_count)
                   if j not in unsat_set]
            undo: list = []
        else:
            ops = [InsertEdge(left_c + j, right_c + j) for j in unsat]
            undo = [DeleteEdge(left_c + j, right_c + j) for j in unsat]
        if loop.run_stage(ops, undo, AllStReachable(), lambda blocked: not blocked):
            answer = True
            break
    return answer, handle.counters


def sat_via_diam(formula: CnfFormula, *, delta=Fraction(1, 4), mode="full",
                 factory=direct_factory, check_isolation=False):
    """Satisfiability via a diameter 3-versus-4 gap.

    Undirected double-block layout with collectors s (left), s2 (right) and
    a hub adjacent to every clause node and both collectors. Any two nodes
    sit within distance 3 except a left-right assignment pair with no shared
    stage-bridged failed clause, which sits at exactly 4. So the diameter is
    4 iff some pair completes the stage, and 3 otherwise.
    """
    mode = _as_mode(mode)
    t = build_fail_table(formula, delta, blocks=2)
    a_count, c_count = t.assign_count, len(formula.clauses)
    left_c = a_count
    right_c = a_count + c_count
    right_a = a_count + 2 * c_count
    s = right_a + a_count
    s2 = s + 1
    hub = s + 2
    g = Graph(2 * a_count + 2 * c_count + 3)
    for j in range(c_count):
        for phi in sorted(t.fail[0][j]):
            g.add_edge(phi, left_c + j)
        for psi in sorted(t.fail[1][j]):
            g.add_edge(right_c + j, right_a + psi)
        g.add_edge(hub, left_c + j)
        g.add_edge(hub, right_c + j)
    for phi in range(a_count):
        g.add_edge(s, phi)
        g.add_edge(s2, right_a + phi)
    g.add_edge(hub, s)
    g.add_edge(hub, s2)
    if mode is Mode.DECREMENTAL:
        for j in range(c_count):
            g.add_edge(left_c + j, right_c + j)
    handle = factory(ProblemKind.DIAMETER, mode, g)

    # fast path: a block assignment failing no clause at all completes every
    # stage on its own, so the formula is satisfiable outright
    all_left = set().union(*t.fail[0]) if t.fail[0] else set()
    all_right = set().union(*t.fail[1]) if t.fail[1] else set()
    if len(all_left) < a_count or len(all_right) < a_count:
        return True, handle.counters

    loop = _StageLoop(handle, mode, check_isolation)

    def interpret(d):
        if d not in (3, 4):
            raise ConstructionError(f"diameter {d} outside the promised gap")
        return d == 4

    answer = False
    for r in range(1 << t.stage_bits):
        unsat = t.unsat_indices(r)
        if mode is Mode.DECREMENTAL:
            unsat_set = set(unsat)
            ops = [DeleteEdge(left_c + j, right_c + j) for j in range(c_count)
                   if j not in unsat_set]
            undo: list = []
        else:
            ops = [InsertEdge(left_c + j, right_c + j) for j in unsat]
            undo = [DeleteEdge(left_c + j, right_c + j) for j in unsat]
        if loop.run_stage(ops, undo, Diameter(), interpret):
            answer = True
            break
    return answer, handle.counters


# ---------------------------------------------------------------------------
# set-system reductions


def sat_via_subunion(formula: CnfFormula, *, delta=Fraction(1, 2), mode="full",
                     factory=direct_factory, check_isolation=False):
    """Satisfiability via scoped set union coverage.

    One set per clause holding the assignments that fail it; a stage scopes
    the unsatisfied clauses. Their union covers the whole assignment space
    iff no assignment completes the stage.
    """
    mode = _as_mode(mode)
    t = build_fail_table(formula, delta)
    c_count = len(formula.clauses)
    ss = SetSystem(t.assign_count, [sorted(f) for f in t.fail[0]])
    scope = set(range(c_count)) if mode is Mode.DECREMENTAL else None
    handle = factory(ProblemKind.SUB_UNION, mode, ss, scope=scope)
    loop = _StageLoop(handle, mode, check_isolation)
    answer = False
    for r in range(1 << t.stage_bits):
        unsat = t.unsat_indices(r)
        if mode is Mode.DECREMENTAL:
            unsat_set = set(unsat)
            ops = [RemoveFromScope(j) for j in range(c_count) if j not in unsat_set]
            undo: list = []
        else:
            ops = [AddToScope(j) for j in unsat]
            undo = [RemoveFromScope(j) for j in unsat]
        if loop.run_stage(ops, undo, UnionIsUniverse(), lambda covered: not covered):
            answer = True
            break
    return answer, handle.counters


def sat_via_empty_pp(formula: CnfFormula, *, delta=Fraction(1, 2), mode="full",
                     factory=direct_factory):
    """Satisfiability via emptiness of iterated set intersections.

    One set per clause holding the assignments that satisfy it, plus the full
    assignment space as a seed. Each stage folds the unsatisfied clauses'
    sets together with intersection updates; the fold result is empty iff no
    assignment completes the stage. Intersections only ever add sets, so this
    runs in full mode with no undo; intermediate sets simply accumulate.
    """
    mode = _as_mode(mode)
    if mode is not Mode.FULL:
        raise DomainError("intersection folding runs in full mode only")
    t = build_fail_table(formula, delta)
    a_count = t.assign_count
    sat_sets = [sorted(set(range(a_count)) - f) for f in t.fail[0]]
    universe_id = len(sat_sets)
    ss = SetSystem(a_count, sat_sets + [range(a_count)])
    handle = factory(ProblemKind.EMPTY_PP, mode, ss)
    answer = False
    for r in range(1 << t.stage_bits):
        unsat = t.unsat_indices(r)
        acc = universe_id
        for j in unsat:
            acc = handle.update(IntersectSets(acc, j))
        if not handle.query(IsEmpty(acc)):
            answer = True
            break
    return answer, handle.counters
