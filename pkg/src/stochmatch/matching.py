"""Query-limited matching algorithms and baselines.

All algorithms run against an EdgeOracle that hides the realization and
meters per-vertex query budgets. The adaptive algorithm re-plans each
round from a maximum matching over edges not yet known to be missing; the
non-adaptive one commits to a union of edge-disjoint maximum matchings
before seeing any answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from stochmatch import _engine
from stochmatch.graph import Graph, Matching
from stochmatch.stochastic import EdgeOracle


@dataclass(frozen=True)
class TheoryParams:
    """Round/path-length parameters backing the approximation guarantee."""

    epsilon: float
    p_min: float
    L: int
    R: int
    alpha: float
    gamma: float

    def guarantee_lhs(self) -> float:
        """(alpha/gamma) * (1 - (1-gamma)^R), to compare against 1 - epsilon."""
        return (self.alpha / self.gamma) * (1.0 - (1.0 - self.gamma) ** self.R)


def derive_params(epsilon: float, p_min: float) -> TheoryParams:
    """Derive (L, R, alpha, gamma) from a target gap and minimum probability.

    L is the smallest odd integer >= 4/epsilon - 1 and R uses the natural
    logarithm of 2/epsilon. R is advisory; algorithms take R directly.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0,1), got {epsilon}")
    if not 0.0 < p_min <= 1.0:
        raise ValueError(f"p_min must be in (0,1], got {p_min}")
    L = max(1, math.ceil(4.0 / epsilon - 1.0))
    if L % 2 == 0:
        L += 1
    alpha = p_min ** ((L + 1) // 2)
    gamma = alpha * (1.0 + 2.0 / (L + 1))
    R = math.ceil(math.log(2.0 / epsilon) / alpha)
    return TheoryParams(epsilon=epsilon, p_min=p_min, L=L, R=R, alpha=alpha, gamma=gamma)


@dataclass(frozen=True)
class RunReport:
    """Outcome of one algorithm run against one oracle.

    budget_max counts distinct queried edges incident to the busiest
    vertex; issued_max (tracked only by the random baseline, where the two
    notions differ) counts the most selections any single vertex made."""

    final: Matching
    queried_per_round: tuple[tuple[int, ...], ...]
    exists_per_round: tuple[int, ...]
    trace: tuple[int, ...]
    budget_max: int
    issued_max: int = -1

    @property
    def rounds(self) -> int:
        return len(self.queried_per_round)

    @property
    def queries_total(self) -> int:
        return sum(len(q) for q in self.queried_per_round)

    @property
    def size(self) -> int:
        return self.final.size

    def to_lines(self) -> list[str]:
        return [
            f"{r} {len(q)} {self.exists_per_round[r]} {self.trace[r]}"
            for r, q in enumerate(self.queried_per_round)
        ]


def _report(g: Graph, oracle: EdgeOracle, rounds_q: list[list[int]], trace: list[int]) -> RunReport:
    exists = tuple(sum(1 for e in q if oracle.known(e)) for q in rounds_q)
    final_ids = [e for e in range(g.m) if oracle.known(e)]
    mate = _engine.matching_on_edges(g.n, final_ids, *g.endpoint_lists)
    return RunReport(
        final=Matching.from_mates(g, mate),
        queried_per_round=tuple(tuple(q) for q in rounds_q),
        exists_per_round=exists,
        trace=tuple(trace),
        budget_max=oracle.max_vertex_queries,
    )


def _aug_path_o_edges(n: int, m_mate, o_mate, cap: int | None) -> list[list[tuple[int, int]]]:
    """Per augmenting path of M in O (+) M, the O-side endpoint pairs.

    Walks each symmetric-difference component from its M-exposed end; a
    component augments M iff it is an odd path whose end edges are O edges.
    """
    visited = bytearray(n)
    paths: list[list[tuple[int, int]]] = []
    for s in range(n):
        if visited[s] or m_mate[s] >= 0:
            continue
        o = o_mate[s]
        if o < 0 or o == m_mate[s]:
            continue
        visited[s] = 1
        visited[o] = 1
        oedges = [(s, o)]
        length = 1
        cur = o
        augmenting = False
        while True:
            t = m_mate[cur]
            if t < 0:
                augmenting = True
                break
            visited[t] = 1
            length += 1
            u = o_mate[t]
            if u < 0:
                break
            visited[u] = 1
            length += 1
            oedges.append((t, u))
            cur = u
        if augmenting and (cap is None or length <= cap):
            paths.append(oedges)
    return paths


def adaptive_match(g: Graph, oracle: EdgeOracle, R: int, length_cap: int | None = None) -> RunReport:
    """Adaptive query algorithm: R rounds of augmenting-path queries.

    Each round computes a maximum matching O_r over all edges not known to
    be missing, queries the untested edges on augmenting paths of the
    current matching in O_r (+) M_{r-1}, and rebuilds the matching over
    every edge known to exist. At most one new edge per vertex is queried
    per round. length_cap optionally drops augmenting paths longer than
    the cap before querying (off by default).
    """
    if R < 0:
        raise ValueError("round count must be >= 0")
    n = g.n
    eu, ev = g.endpoint_lists
    adj_nbr, adj_eid = g.adjacency
    alive = bytearray(b"\x01" * g.m)  # not known-missing
    o_mate: list[int] | None = None
    m_mate = [-1] * n
    # adjacency over known-existing edges, grown incrementally
    ex_nbr: list[list[int]] = [[] for _ in range(n)]
    ex_eid: list[list[int]] = [[] for _ in range(n)]
    rounds_q: list[list[int]] = []
    trace: list[int] = []
    for _ in range(R):
        if o_mate is None:
            o_mate = _engine.greedy_mates(n, eu, ev, alive)
        _engine.maximum_mates(n, adj_nbr, adj_eid, o_mate, alive)
        paths = _aug_path_o_edges(n, m_mate, o_mate, length_cap)
        queried: list[int] = []
        for oedges in paths:
            for u, v in oedges:
                eid = g.edge_id(u, v)
                if oracle.queried[eid]:
                    continue
                queried.append(eid)
                if oracle.query(eid):
                    ex_nbr[u].append(v)
                    ex_eid[u].append(eid)
                    ex_nbr[v].append(u)
                    ex_eid[v].append(eid)
                else:
                    alive[eid] = 0
                    if o_mate[u] == v:
                        o_mate[u] = -1
                        o_mate[v] = -1
        rounds_q.append(queried)
        _engine.maximum_mates(n, ex_nbr, ex_eid, m_mate, None)
        trace.append(_engine.matching_size(m_mate))
    report = _report(g, oracle, rounds_q, trace)
    return report


def nonadaptive_select_rounds(g: Graph, R: int) -> list[list[int]]:
    """R rounds of successively removed maximum matchings (edge ids)."""
    if R < 1:
        raise ValueError("round count must be >= 1")
    n = g.n
    eu, ev = g.endpoint_lists
    adj_nbr, adj_eid = g.adjacency
    alive = bytearray(b"\x01" * g.m)
    rounds: list[list[int]] = []
    for _ in range(R):
        mate = _engine.greedy_mates(n, eu, ev, alive)
        _engine.maximum_mates(n, adj_nbr, adj_eid, mate, alive)
        pairs = _engine.mate_pairs(mate)
        if not pairs:
            rounds.append([])
            continue
        ids = sorted(
            int(e)
            for e in g.edge_ids(
                np.fromiter((p[0] for p in pairs), dtype=np.int64),
                np.fromiter((p[1] for p in pairs), dtype=np.int64),
            )
        )
        for e in ids:
            alive[e] = 0
        rounds.append(ids)
    return rounds


def nonadaptive_select(g: Graph, R: int) -> frozenset[int]:
    """The edge set W_R queried by the non-adaptive algorithm.

    Query-free planning: a pure function of (g, R)."""
    return frozenset(e for ids in nonadaptive_select_rounds(g, R) for e in ids)


def nonadaptive_select_strategic(g: Graph, R: int, selector) -> frozenset[int]:
    """As nonadaptive_select but with caller-controlled matching choice.

    selector(round_index, g, selected) must return the edge ids of a
    maximum matching of the residual graph (validated); selected is the
    frozenset of ids removed in earlier rounds.
    """
    if R < 1:
        raise ValueError("round count must be >= 1")
    n = g.n
    eu, ev = g.endpoint_lists
    adj_nbr, adj_eid = g.adjacency
    alive = bytearray(b"\x01" * g.m)
    chosen: set[int] = set()
    for r in range(R):
        ids = sorted(int(e) for e in selector(r, g, frozenset(chosen)))
        mate = [-1] * n
        for e in ids:
            if not 0 <= e < g.m or not alive[e]:
                raise ValueError(f"selector returned unavailable edge id {e} in round {r}")
            u = eu[e]
            v = ev[e]
            if mate[u] >= 0 or mate[v] >= 0:
                raise ValueError(f"selector returned a non-matching in round {r}")
            mate[u] = v
            mate[v] = u
        best = _engine.greedy_mates(n, eu, ev, alive)
        _engine.maximum_mates(n, adj_nbr, adj_eid, best, alive)
        if len(ids) != _engine.matching_size(best):
            raise ValueError(
                f"selector matching in round {r} has size {len(ids)}, "
                f"residual maximum is {_engine.matching_size(best)}"
            )
        for e in ids:
            alive[e] = 0
        chosen.update(ids)
    return frozenset(chosen)


def _match_preselected(g: Graph, oracle: EdgeOracle, rounds: list[list[int]]) -> RunReport:
    """Query a pre-selected schedule and keep a maximum matching of the
    edges found to exist; the trace grows round by round."""
    n = g.n
    eu, ev = g.endpoint_lists
    mate = [-1] * n
    ex_nbr: list[list[int]] = [[] for _ in range(n)]
    ex_eid: list[list[int]] = [[] for _ in range(n)]
    trace: list[int] = []
    for ids in rounds:
        for eid in ids:
            if oracle.query(eid):
                u = eu[eid]
                v = ev[eid]
                ex_nbr[u].append(v)
                ex_eid[u].append(eid)
                ex_nbr[v].append(u)
                ex_eid[v].append(eid)
        _engine.maximum_mates(n, ex_nbr, ex_eid, mate, None)
        trace.append(_engine.matching_size(mate))
    return _report(g, oracle, rounds, trace)


def nonadaptive_match(g: Graph, oracle: EdgeOracle, R: int) -> RunReport:
    """Query W_R = nonadaptive_select(g, R); output the maximum matching
    over the queried edges that exist."""
    return _match_preselected(g, oracle, nonadaptive_select_rounds(g, R))


def nonadaptive_match_strategic(g: Graph, oracle: EdgeOracle, R: int, selector) -> RunReport:
    ids = sorted(nonadaptive_select_strategic(g, R, selector))
    return _match_preselected(g, oracle, [ids])


def naive_random(g: Graph, oracle: EdgeOracle, b: int, seed: int) -> RunReport:
    """Every vertex picks min(b, degree) incident edges uniformly at
    random; the union is queried in one round."""
    if b < 0:
        raise ValueError("budget must be >= 0")
    rng = np.random.Generator(np.random.PCG64(seed))
    _, adj_eid = g.adjacency
    picked = bytearray(g.m)
    issued_max = 0
    for v in range(g.n):
        ids = adj_eid[v]
        if not ids:
            continue
        if b >= len(ids):
            take = ids
        else:
            take = rng.choice(len(ids), size=b, replace=False)
            take = [ids[i] for i in take]
        issued_max = max(issued_max, len(take))
        for e in take:
            picked[e] = 1
    schedule = [e for e in range(g.m) if picked[e]]
    rep = _match_preselected(g, oracle, [schedule])
    return RunReport(
        final=rep.final,
        queried_per_round=rep.queried_per_round,
        exists_per_round=rep.exists_per_round,
        trace=rep.trace,
        budget_max=rep.budget_max,
        issued_max=issued_max,
    )


def naive_scheduled(g: Graph, oracle: EdgeOracle, R: int, seed: int) -> RunReport:
    """The fixed-order scheduling baseline.

    Scanning vertices in ascending order, each vertex schedules queries to
    uniformly random eligible neighbours; a vertex is eligible as long as
    fewer than R scheduled queries touch it, and the cap applies to the
    scheduling vertex too, so no vertex ends up in more than R scheduled
    queries.
    """
    if R < 1:
        raise ValueError("round count must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    adj_nbr, adj_eid = g.adjacency
    counts = [0] * g.n
    sched = bytearray(g.m)
    schedule: list[int] = []
    for v in range(g.n):
        room = R - counts[v]
        if room <= 0:
            continue
        nbrs = adj_nbr[v]
        eids = adj_eid[v]
        eligible = [
            i
            for i in range(len(nbrs))
            if not sched[eids[i]] and counts[nbrs[i]] < R
        ]
        if not eligible:
            continue
        k = min(room, len(eligible))
        if k >= len(eligible):
            take = eligible
        else:
            take = rng.choice(len(eligible), size=k, replace=False)
            take = [eligible[i] for i in take]
        for i in take:
            e = eids[i]
            sched[e] = 1
            schedule.append(e)
            counts[v] += 1
            counts[nbrs[i]] += 1
    schedule.sort()
    return _match_preselected(g, oracle, [schedule])


def single_matching_baseline(g: Graph, oracle: EdgeOracle) -> RunReport:
    """Query one maximum matching and keep the edges that exist."""
    m = max_matching_ids(g)
    return _match_preselected(g, oracle, [sorted(m)])


def max_matching_ids(g: Graph) -> frozenset[int]:
    eu, ev = g.endpoint_lists
    mate = _engine.greedy_mates(g.n, eu, ev)
    adj_nbr, adj_eid = g.adjacency
    _engine.maximum_mates(g.n, adj_nbr, adj_eid, mate)
    return Matching.from_mates(g, mate).edges
