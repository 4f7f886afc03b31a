"""End-to-end acceptance checks. Each criterion is one test, so the pytest
report carries exactly one pass/fail line per criterion."""

import math
import random
import time

import pytest

from dynred.engines import DirectEngine, Mode, ProblemKind
from dynred.generators import random_bipartite, random_graph
from dynred.model import DeleteEdge, Graph, InsertEdge, KAugFreeMatchingSize
from dynred.oracles import oracle_all_triangles, oracle_triangle
from dynred.triangle_reductions import (
    build_17bpm_gadget,
    triangle_via_pp,
    triangle_via_streach_decremental,
)
from dynred.verify import run_suite

SEED = 20260819


@pytest.fixture(scope="module")
def seth_run():
    start = time.perf_counter()
    out = run_suite("seth", trials=200, seed=SEED, max_n=12)
    out["_elapsed_s"] = time.perf_counter() - start
    return out


@pytest.fixture(scope="module")
def triangle_run():
    return run_suite("triangle", trials=300, seed=SEED + 1, max_n=40)


@pytest.fixture(scope="module")
def apsp_run():
    return run_suite("apsp", trials=200, seed=SEED + 2, max_n=24)


@pytest.fixture(scope="module")
def threesum_run():
    return run_suite("threesum", trials=200, seed=SEED + 3, max_n=32)


@pytest.fixture(scope="module")
def engines_run():
    return run_suite("engines", trials=500, seed=SEED + 4, max_n=12)


def _fails(summary, prefix=""):
    return {prop: tally for prop, tally in summary["properties"].items()
            if prop.startswith(prefix) and tally["fail"]}


def test_criterion_01_sat_reductions_match_oracle(seth_run):
    assert not _fails(seth_run, "answer:"), seth_run["violations"]
    assert not _fails(seth_run, "stage-isolation"), seth_run["violations"]
    for name in ("ssr", "sc2", "appx-scc", "max-scc", "st-reach", "diam",
                 "subunion", "connsub", "empty-pp"):
        assert f"answer:{name}" in seth_run["properties"]
    # three modes per modal reduction, all 200 trials
    assert seth_run["properties"]["answer:ssr"]["pass"] == 600
    assert seth_run["properties"]["answer:connsub"]["pass"] == 600
    assert seth_run["_elapsed_s"] <= 300


def test_criterion_02_ssr_counter_exactness(seth_run):
    counts = seth_run["properties"].get("ssr-query-count")
    bound = seth_run["properties"].get("ssr-update-bound")
    assert counts and counts["fail"] == 0 and counts["pass"] >= 1
    assert bound and bound["fail"] == 0
    assert not _fails(seth_run, "sc2-update-bound"), seth_run["violations"]


def test_criterion_03_triangle_reductions_match_oracle(triangle_run):
    for prop in ("anchor:", "exists:", "witness:"):
        assert not _fails(triangle_run, prop), triangle_run["violations"]
    props = triangle_run["properties"]
    assert props["anchor:tri-streach"]["pass"] == 600  # 2 modes x 300
    assert props["anchor:tri-subconn"]["pass"] == 900  # 3 modes x 300
    assert props["anchor:tri-5bpm"]["pass"] == 900
    assert props["anchor:tri-17bpm"]["pass"] == 900
    assert props["anchor:tri-streach-dec"]["pass"] == 300
    assert props["exists:tri-empty-pp"]["pass"] == 300
    assert props["witness:tri-split"]["pass"] == 300


def test_criterion_04_matching_threshold_law():
    rng = random.Random(SEED + 5)
    for _ in range(100):
        n = rng.randint(3, 14)
        g = random_graph(rng, n, rng.choice((0.2, 0.35, 0.5, 0.7)))
        h = build_17bpm_gadget(g)
        eng = DirectEngine(ProblemKind.KBPM, Mode.FULL, h)
        in_triangle = {v for t in oracle_all_triangles(g) for v in t[:3]}
        for x in range(n):
            eng.update(DeleteEdge(x, n + x))
            eng.update(DeleteEdge(6 * n + x, 7 * n + x))
            size = eng.query(KAugFreeMatchingSize(17))
            eng.update(InsertEdge(x, n + x))
            eng.update(InsertEdge(6 * n + x, 7 * n + x))
            if x in in_triangle:
                assert size == 4 * n - 1, (g.to_text(), x, size)
            else:
                assert size <= 4 * n - 2, (g.to_text(), x, size)


def test_criterion_05_randomized_membership_error_rates():
    rng = random.Random(SEED + 6)
    false_positives = 0
    for trial in range(300):
        if trial % 2 == 0:
            half = rng.randint(2, 6)
            g = random_bipartite(rng, half, half, rng.choice((0.3, 0.6)))
        else:
            g = random_graph(rng, rng.randint(3, 12),
                             rng.choice((0.15, 0.3, 0.5)))
        has_triangle = oracle_triangle(g) is not None
        found, _ = triangle_via_pp(g, seed=rng.getrandbits(32))
        if has_triangle:
            assert found, f"missed triangle on trial {trial}"
        elif found:
            false_positives += 1
    assert false_positives <= 3, false_positives  # 1% of 300


class _DeletionLog:
    """Engine wrapper recording every edge deletion."""

    def __init__(self, kind, mode, instance):
        self.inner = DirectEngine(kind, mode, instance)
        self.initial_edges = set(instance.edges())
        self.deleted = []

    def __getattr__(self, name):
        return getattr(self.inner, name)

    def update(self, op):
        if isinstance(op, DeleteEdge):
            self.deleted.append((op.u, op.v))
        return self.inner.update(op)


def test_criterion_06_decremental_tree_accounting():
    rng = random.Random(SEED + 7)
    graphs = []
    for n in (2, 4, 8, 16, 32):  # leaf counts line up exactly
        path = Graph(n)
        for v in range(n - 1):
            path.add_edge(v, v + 1)
        graphs.append(path)
    for _ in range(20):
        half = rng.randint(2, 9)
        graphs.append(random_bipartite(rng, half, half, 0.4))
    for g in graphs:
        if oracle_triangle(g) is not None:
            continue
        logs = []

        def factory(kind, mode, instance):
            log = _DeletionLog(kind, mode, instance)
            logs.append(log)
            return log

        anchor, c = triangle_via_streach_decremental(g, factory=factory)
        assert anchor is None
        n = g.node_count
        leaves = max(2, 1 << max(0, (n - 1).bit_length()))
        budget = 4 * (2 * leaves - 2)
        assert c.updates == c.rollback_ops
        assert c.updates + c.rollback_ops <= budget
        if n == leaves:
            assert c.updates + c.rollback_ops == budget, (n, c.as_dict())
        log = logs[0]
        assert len(log.deleted) == len(set(log.deleted))  # each edge once
        assert set(log.deleted) <= log.initial_edges


def test_criterion_07_minweight_routines_match_brute_force(apsp_run):
    assert not _fails(apsp_run), apsp_run["violations"]
    props = apsp_run["properties"]
    for prop in ("answer:mwt-stsp-dec", "answer:mwt-stsp-inc",
                 "answer:mwt-bwm", "answer:mwt-bwm-inc",
                 "counters:mwt-stsp", "counters:mwt-stsp-inc",
                 "counters:mwt-bwm", "counters:mwt-bwm-inc",
                 "stages:mwt-stsp"):
        assert props[prop] == {"pass": 200, "fail": 0}, prop


def test_criterion_08_pair_listing_matches_brute_force(threesum_run):
    assert not _fails(threesum_run), threesum_run["violations"]
    props = threesum_run["properties"]
    assert props["pairs:brute-force"] == {"pass": 200, "fail": 0}
    assert props["probe-call-bound"] == {"pass": 200, "fail": 0}
    assert props["activation-bound"] == {"pass": 200, "fail": 0}
    assert props["triangles:brute-force"] == {"pass": 200, "fail": 0}


def test_criterion_09_wrapper_fidelity(engines_run):
    assert not _fails(engines_run, "wrapper:"), engines_run["violations"]
    props = engines_run["properties"]
    for name in ("subconn-via-streach", "streach-via-bpm", "streach-via-sc",
                 "stsp-via-bwm", "subunion-via-connsub"):
        assert props[f"wrapper:{name}"] == {"pass": 500, "fail": 0}, name


def test_criterion_10_rollback_soundness(engines_run):
    assert not _fails(engines_run, "rollback:"), engines_run["violations"]
    props = engines_run["properties"]
    for kind in ProblemKind:
        assert props[f"rollback:{kind.value}"] == {"pass": 500, "fail": 0}
