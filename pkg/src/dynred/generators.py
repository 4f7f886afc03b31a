"""Seeded random instance generators for tests and the verify suites."""

from __future__ import annotations

import random

from .model import CnfFormula, DomainError, Graph, SetSystem


def random_cnf(rng: random.Random, var_count: int, clause_count: int | None = None,
               width: int = 3) -> CnfFormula:
    """Random CNF with nonempty clauses of up to `width` distinct variables."""
    if var_count < 1:
        raise DomainError("need at least one variable")
    if clause_count is None:
        clause_count = rng.randint(0, 3 * var_count)
    clauses = []
    for _ in range(clause_count):
        k = rng.randint(1, min(width, var_count))
        chosen = rng.sample(range(1, var_count + 1), k)
        clauses.append([v if rng.random() < 0.5 else -v for v in chosen])
    return CnfFormula(var_count, clauses)


def random_graph(rng: random.Random, n: int, p: float, *, directed: bool = False,
                 weighted: bool = False, max_weight: int = 9, **kw) -> Graph:
    g = Graph(n, directed=directed, weighted=weighted,
              max_weight=max_weight if weighted else None, **kw)
    for u in range(n):
        targets = range(n) if directed else range(u + 1, n)
        for v in targets:
            if u == v:
                continue
            if rng.random() < p:
                g.add_edge(u, v, rng.randint(1, max_weight) if weighted else None)
    return g


def random_bipartite(rng: random.Random, nl: int, nr: int, p: float, *,
                     weighted: bool = False, max_weight: int = 9) -> Graph:
    g = Graph(nl + nr, weighted=weighted, max_weight=max_weight if weighted else None)
    for u in range(nl):
        for v in range(nl, nl + nr):
            if rng.random() < p:
                g.add_edge(u, v, rng.randint(1, max_weight) if weighted else None)
    return g


def random_set_system(rng: random.Random, universe: int, nsets: int,
                      p: float) -> SetSystem:
    return SetSystem(universe,
                     [[x for x in range(universe) if rng.random() < p]
                      for _ in range(nsets)])
