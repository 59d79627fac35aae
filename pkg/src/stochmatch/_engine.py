"""Internal maximum-matching engine.

Phase-based multi-root augmenting search with blossom contraction over
plain mate arrays. A phase grows alternating trees from every exposed
vertex at once and applies every vertex-disjoint augmentation it runs
into; phases repeat until one completes without augmenting, which
certifies maximality. All scans go in ascending vertex/edge order so
results are deterministic.
"""

from __future__ import annotations

from collections import deque


def greedy_mates(n: int, edge_u, edge_v, alive=None) -> list[int]:
    """Maximal matching by a single ascending scan over the edge list."""
    mate = [-1] * n
    if alive is None:
        for i in range(len(edge_u)):
            u = edge_u[i]
            if mate[u] >= 0:
                continue
            v = edge_v[i]
            if mate[v] < 0:
                mate[u] = v
                mate[v] = u
    else:
        for i in range(len(edge_u)):
            if not alive[i]:
                continue
            u = edge_u[i]
            if mate[u] >= 0:
                continue
            v = edge_v[i]
            if mate[v] < 0:
                mate[u] = v
                mate[v] = u
    return mate


def maximum_mates(n: int, adj_nbr, adj_eid, mate: list[int], alive=None) -> list[int]:
    """Grow `mate` (modified in place) into a maximum matching.

    adj_nbr / adj_eid: per-vertex parallel lists of neighbours and edge ids.
    alive: optional bytearray over edge ids; dead edges are ignored. Matched
    edges must all be alive.
    """
    while _phase(n, adj_nbr, adj_eid, mate, alive):
        pass
    return mate


def _phase(n, adj_nbr, adj_eid, mate, alive) -> int:
    even = bytearray(n)
    parent = [-1] * n
    base = list(range(n))
    root = [-1] * n
    members: dict[int, list[int]] = {}
    mark = [0] * n
    stamp = 0

    q: deque[int] = deque()
    for v in range(n):
        if mate[v] < 0:
            even[v] = 1
            root[v] = v
            members[v] = [v]
            q.append(v)

    augments = 0
    pop = q.popleft
    push = q.append
    while q:
        v = pop()
        if not even[v]:
            continue
        rv = root[v]
        nbrs = adj_nbr[v]
        eids = adj_eid[v]
        for i in range(len(nbrs)):
            if alive is not None and not alive[eids[i]]:
                continue
            to = nbrs[i]
            if base[v] == base[to] or mate[v] == to:
                continue
            if even[to]:
                rt = root[to]
                if rt != rv:
                    _flip_up(v, to, mate, parent)
                    _flip_up(to, v, mate, parent)
                    augments += 1
                    for x in members.pop(rv):
                        even[x] = 0
                        parent[x] = -1
                        base[x] = x
                        root[x] = -1
                    for x in members.pop(rt):
                        even[x] = 0
                        parent[x] = -1
                        base[x] = x
                        root[x] = -1
                    break  # v's own tree is gone
                stamp += 1
                b = _lca(v, to, base, parent, mate, mark, stamp)
                _contract(v, to, b, base, parent, mate, even, push, members[rv])
            elif parent[to] < 0:
                # unlabeled; necessarily matched since every exposed vertex
                # started as an even root
                w = mate[to]
                parent[to] = v
                even[w] = 1
                root[to] = rv
                root[w] = rv
                mem = members[rv]
                mem.append(to)
                mem.append(w)
                push(w)
    return augments


def _lca(a, b, base, parent, mate, mark, stamp):
    x = base[a]
    while True:
        mark[x] = stamp
        m = mate[x]
        if m < 0:
            break
        x = base[parent[m]]
    y = base[b]
    while mark[y] != stamp:
        y = base[parent[mate[y]]]
    return y


def _contract(v, to, b, base, parent, mate, even, push, mem):
    bloss = set()
    for x, child in ((v, to), (to, v)):
        while base[x] != b:
            m = mate[x]
            bloss.add(base[x])
            bloss.add(base[m])
            parent[x] = child
            child = m
            x = parent[m]
    if not bloss:
        return
    for x in mem:
        if base[x] in bloss:
            base[x] = b
            if not even[x]:
                even[x] = 1
                push(x)


def _flip_up(u, partner, mate, parent):
    x = mate[u]
    mate[u] = partner
    while x >= 0:
        px = parent[x]
        nxt = mate[px]
        mate[x] = px
        mate[px] = x
        x = nxt


def adjacency_for_edges(n: int, edge_ids, edge_u, edge_v):
    """Per-vertex adjacency restricted to the given edge ids (ascending)."""
    adj_nbr: list[list[int]] = [[] for _ in range(n)]
    adj_eid: list[list[int]] = [[] for _ in range(n)]
    for eid in edge_ids:
        u = edge_u[eid]
        v = edge_v[eid]
        adj_nbr[u].append(v)
        adj_eid[u].append(eid)
        adj_nbr[v].append(u)
        adj_eid[v].append(eid)
    return adj_nbr, adj_eid


def matching_on_edges(n: int, edge_ids, edge_u, edge_v, init_mate=None) -> list[int]:
    """Maximum matching over an explicit edge-id subset, as a mate array."""
    ids = sorted(edge_ids)
    adj_nbr, adj_eid = adjacency_for_edges(n, ids, edge_u, edge_v)
    if init_mate is None:
        mate = [-1] * n
        for eid in ids:
            u = edge_u[eid]
            if mate[u] >= 0:
                continue
            v = edge_v[eid]
            if mate[v] < 0:
                mate[u] = v
                mate[v] = u
    else:
        mate = list(init_mate)
    return maximum_mates(n, adj_nbr, adj_eid, mate)


def mate_pairs(mate) -> list[tuple[int, int]]:
    """Matched (u, v) pairs with u < v, ascending."""
    return [(u, v) for u, v in enumerate(mate) if 0 <= u < v]


def matching_size(mate) -> int:
    return sum(1 for u, v in enumerate(mate) if 0 <= u < v)
