"""Undirected graphs, maximum matching, and alternating-structure extraction.

Vertices are 0-based ints. Edges are identified everywhere by a stable
edge index into the construction order; probabilities, realizations and
query oracles all key off that index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from stochmatch import _engine
from stochmatch.errors import InstanceTooLargeError

ORACLE_EDGE_CAP = 24

AUGMENTING = "augmenting-path"
ALTERNATING = "alternating-path"
CYCLE = "alternating-cycle"


class Graph:
    """Immutable simple graph with indexed edges.

    Edge endpoints are stored as numpy arrays (normalized u < v); python
    adjacency lists are built lazily for the search code. `meta` carries
    generator metadata such as vertex classes.
    """

    def __init__(self, n: int, edges, meta: dict | None = None):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        self.n = n
        if isinstance(edges, tuple) and len(edges) == 2 and isinstance(edges[0], np.ndarray):
            eu, ev = edges
            eu = np.asarray(eu, dtype=np.int64)
            ev = np.asarray(ev, dtype=np.int64)
        else:
            pairs = list(edges)
            eu = np.fromiter((p[0] for p in pairs), dtype=np.int64, count=len(pairs))
            ev = np.fromiter((p[1] for p in pairs), dtype=np.int64, count=len(pairs))
        swap = eu > ev
        if swap.any():
            eu2 = np.where(swap, ev, eu)
            ev = np.where(swap, eu, ev)
            eu = eu2
        if len(eu) and (eu.min() < 0 or ev.max() >= n):
            raise ValueError("edge endpoint out of range")
        if (eu == ev).any():
            raise ValueError("self-loops are not allowed")
        keys = eu * n + ev
        if len(np.unique(keys)) != len(keys):
            raise ValueError("duplicate edges are not allowed")
        self.m = len(eu)
        self.edge_u = eu
        self.edge_v = ev
        self.meta = dict(meta) if meta else {}
        self._key_perm = np.argsort(keys, kind="stable")
        self._key_sorted = keys[self._key_perm]
        self._eu_list: list[int] | None = None
        self._ev_list: list[int] | None = None
        self._adj: tuple[list[list[int]], list[list[int]]] | None = None

    def edge(self, eid: int) -> tuple[int, int]:
        return int(self.edge_u[eid]), int(self.edge_v[eid])

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.edge_u.tolist(), self.edge_v.tolist()))

    @property
    def endpoint_lists(self) -> tuple[list[int], list[int]]:
        if self._eu_list is None:
            self._eu_list = self.edge_u.tolist()
            self._ev_list = self.edge_v.tolist()
        return self._eu_list, self._ev_list

    @property
    def adjacency(self) -> tuple[list[list[int]], list[list[int]]]:
        """(adj_nbr, adj_eid): per-vertex neighbours and incident edge ids,
        in ascending edge-id order."""
        if self._adj is None:
            adj_nbr: list[list[int]] = [[] for _ in range(self.n)]
            adj_eid: list[list[int]] = [[] for _ in range(self.n)]
            eu, ev = self.endpoint_lists
            for eid in range(self.m):
                u = eu[eid]
                v = ev[eid]
                adj_nbr[u].append(v)
                adj_eid[u].append(eid)
                adj_nbr[v].append(u)
                adj_eid[v].append(eid)
            self._adj = (adj_nbr, adj_eid)
        return self._adj

    def incident(self, v: int) -> list[int]:
        return self.adjacency[1][v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[0][v])

    def edge_id(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        key = u * self.n + v
        pos = np.searchsorted(self._key_sorted, key)
        if pos >= self.m or self._key_sorted[pos] != key:
            raise KeyError(f"no edge ({u}, {v})")
        return int(self._key_perm[pos])

    def edge_ids(self, us, vs) -> np.ndarray:
        """Vectorized edge-id lookup for endpoint arrays."""
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        lo = np.minimum(us, vs)
        hi = np.maximum(us, vs)
        keys = lo * self.n + hi
        pos = np.searchsorted(self._key_sorted, keys)
        pos = np.clip(pos, 0, self.m - 1)
        if not (self._key_sorted[pos] == keys).all():
            raise KeyError("lookup of a non-edge pair")
        return self._key_perm[pos]

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class Matching:
    """A set of pairwise vertex-disjoint edge ids."""

    edges: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.edges)

    def validate(self, g: Graph) -> None:
        seen: set[int] = set()
        for eid in self.edges:
            if not 0 <= eid < g.m:
                raise ValueError(f"edge id {eid} out of range")
            u, v = g.edge(eid)
            if u in seen or v in seen:
                raise ValueError("matching edges share a vertex")
            seen.add(u)
            seen.add(v)

    def mates(self, g: Graph) -> list[int]:
        mate = [-1] * g.n
        for eid in self.edges:
            u, v = g.edge(eid)
            mate[u] = v
            mate[v] = u
        return mate

    @staticmethod
    def from_mates(g: Graph, mate) -> "Matching":
        pairs = _engine.mate_pairs(mate)
        if not pairs:
            return Matching(frozenset())
        us = np.fromiter((p[0] for p in pairs), dtype=np.int64, count=len(pairs))
        vs = np.fromiter((p[1] for p in pairs), dtype=np.int64, count=len(pairs))
        return Matching(frozenset(g.edge_ids(us, vs).tolist()))


@dataclass(frozen=True)
class AltPath:
    """One connected component of the symmetric difference of two matchings."""

    vertices: tuple[int, ...]
    edge_ids: tuple[int, ...]
    kind: str  # AUGMENTING | ALTERNATING | CYCLE

    @property
    def length(self) -> int:
        return len(self.edge_ids)


def max_matching(g: Graph) -> Matching:
    """Maximum-cardinality matching; deterministic for a fixed graph."""
    eu, ev = g.endpoint_lists
    mate = _engine.greedy_mates(g.n, eu, ev)
    adj_nbr, adj_eid = g.adjacency
    _engine.maximum_mates(g.n, adj_nbr, adj_eid, mate)
    return Matching.from_mates(g, mate)


def max_matching_oracle(g: Graph) -> Matching:
    """Exact maximum matching by exhaustive search over edge subsets.

    Test oracle only; refuses graphs with more than ORACLE_EDGE_CAP edges.
    """
    if g.m > ORACLE_EDGE_CAP:
        raise InstanceTooLargeError(
            f"oracle limited to {ORACLE_EDGE_CAP} edges, got {g.m}"
        )
    eu, ev = g.endpoint_lists
    m = g.m
    best_size = 0
    best: list[int] = []
    chosen: list[int] = []
    used = bytearray(g.n)

    def rec(i: int) -> None:
        nonlocal best_size, best
        if len(chosen) + (m - i) <= best_size:
            return
        if i == m:
            if len(chosen) > best_size:
                best_size = len(chosen)
                best = list(chosen)
            return
        u = eu[i]
        v = ev[i]
        if not used[u] and not used[v]:
            used[u] = used[v] = 1
            chosen.append(i)
            rec(i + 1)
            chosen.pop()
            used[u] = used[v] = 0
        rec(i + 1)

    rec(0)
    return Matching(frozenset(best))


def symmetric_difference(m1: Matching, m2: Matching, g: Graph) -> list[AltPath]:
    """Connected components of m1 (+) m2, classified.

    Augmenting-path components are the ones that augment m1 (odd length,
    both end edges in m2).
    """
    xor = m1.edges ^ m2.edges
    inc: dict[int, list[int]] = {}
    for eid in sorted(xor):
        u, v = g.edge(eid)
        inc.setdefault(u, []).append(eid)
        inc.setdefault(v, []).append(eid)
    seen: set[int] = set()
    comps: list[AltPath] = []

    def walk(start: int, first_eid: int) -> tuple[list[int], list[int]]:
        verts = [start]
        eids = []
        cur = start
        eid = first_eid
        while True:
            seen.add(eid)
            eids.append(eid)
            u, v = g.edge(eid)
            cur = v if u == cur else u
            verts.append(cur)
            nxt = [e for e in inc[cur] if e not in seen]
            if not nxt:
                return verts, eids
            eid = nxt[0]

    # open paths first, from their smallest endpoint
    for s in sorted(inc):
        if len(inc[s]) == 1 and inc[s][0] not in seen:
            verts, eids = walk(s, inc[s][0])
            if len(eids) % 2 == 1 and eids[0] in m2.edges and eids[-1] in m2.edges:
                kind = AUGMENTING
            else:
                kind = ALTERNATING
            comps.append(AltPath(tuple(verts), tuple(eids), kind))
    # remaining components are cycles
    for s in sorted(inc):
        unvisited = [e for e in inc[s] if e not in seen]
        if unvisited:
            verts, eids = walk(s, unvisited[0])
            comps.append(AltPath(tuple(verts), tuple(eids), CYCLE))
    return comps


def short_augmenting_paths(m1: Matching, m2: Matching, g: Graph, L: int) -> list[AltPath]:
    """Augmenting-path components of m1 (+) m2 of length at most L.

    L must be odd and >= 1. The returned paths are vertex-disjoint and each
    one independently augments m1 by one edge.
    """
    if L < 1 or L % 2 == 0:
        raise ValueError(f"path length bound must be odd and >= 1, got {L}")
    return [
        p
        for p in symmetric_difference(m1, m2, g)
        if p.kind == AUGMENTING and p.length <= L
    ]


def apply_alt_paths(m: Matching, paths, g: Graph) -> Matching:
    """Apply alternating paths to a matching (symmetric difference)."""
    edges = set(m.edges)
    for p in paths:
        edges ^= set(p.edge_ids)
    out = Matching(frozenset(edges))
    out.validate(g)
    return out


def parse_graph_text(text: str) -> tuple[Graph, str]:
    """Parse the graph file format: `n m` then m lines `u v`.

    Returns the graph and any leftover text (e.g. an appended probability
    model section).
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError("first line must be 'n m'")
    n, m = int(head[0]), int(head[1])
    if len(lines) < 1 + m:
        raise ValueError(f"expected {m} edge lines, got {len(lines) - 1}")
    pairs = []
    for ln in lines[1 : 1 + m]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line: {ln!r}")
        pairs.append((int(parts[0]), int(parts[1])))
    g = Graph(n, pairs)
    leftover = "\n".join(lines[1 + m :])
    return g, leftover


def format_graph(g: Graph) -> str:
    out = [f"{g.n} {g.m}"]
    eu, ev = g.endpoint_lists
    out.extend(f"{eu[i]} {ev[i]}" for i in range(g.m))
    return "\n".join(out) + "\n"
