"""Stochastic k-set packing: local search and query algorithms.

Sets are identified by index into the instance's collection, elements by
index below the universe size. Augmenting structures (C, D) add the sets
of C and drop the packed sets of D; searches enumerate connected
candidate collections depth-first in ascending index order, so results
are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from stochmatch import _exact
from stochmatch.errors import InstanceTooLargeError
from stochmatch.stochastic import SetOracle

PACKING_ORACLE_CAP = 24
STRUCTURE_SIZE_CAP = 4


class KSetInstance:
    """A universe of elements and a collection of sets of size <= k."""

    def __init__(self, n_elements: int, sets, k: int, probs=None, allow_duplicates: bool = False):
        if n_elements < 0 or k < 1:
            raise ValueError("bad universe size or k")
        canon = []
        for s in sets:
            t = tuple(sorted(s))
            if not t:
                raise ValueError("empty set not allowed")
            if len(t) > k:
                raise ValueError(f"set {t} exceeds k={k}")
            if len(set(t)) != len(t):
                raise ValueError(f"set {t} repeats an element")
            if t[0] < 0 or t[-1] >= n_elements:
                raise ValueError(f"set {t} has out-of-range elements")
            canon.append(t)
        if not allow_duplicates and len(set(canon)) != len(canon):
            raise ValueError("duplicate sets are not allowed")
        self.n_elements = n_elements
        self.sets: tuple[tuple[int, ...], ...] = tuple(canon)
        self.k = k
        if probs is not None:
            probs = np.asarray(probs, dtype=np.float64)
            if len(probs) != len(canon) or ((probs < 0) | (probs > 1)).any():
                raise ValueError("per-set probabilities malformed")
        self.probs = probs
        self._by_element: list[list[int]] | None = None
        self._pair_graph = None

    @property
    def size(self) -> int:
        return len(self.sets)

    @property
    def by_element(self) -> list[list[int]]:
        """element -> ascending ids of sets containing it."""
        if self._by_element is None:
            table: list[list[int]] = [[] for _ in range(self.n_elements)]
            for sid, s in enumerate(self.sets):
                for x in s:
                    table[x].append(sid)
            self._by_element = table
        return self._by_element

    @staticmethod
    def from_graph(g, probs=None) -> "KSetInstance":
        """Edges of a graph as a 2-set instance."""
        return KSetInstance(g.n, [g.edge(i) for i in range(g.m)], 2, probs=probs)

    def pair_graph(self):
        """For k=2: (eu, ev, adj_nbr, adj_eid) with set ids as edge ids."""
        if self.k != 2:
            raise ValueError("pair graph needs k=2")
        if self._pair_graph is None:
            from stochmatch import _engine

            eu = [s[0] for s in self.sets]
            ev = [s[1] for s in self.sets]
            adj = _engine.adjacency_for_edges(self.n_elements, range(self.size), eu, ev)
            self._pair_graph = (eu, ev, adj[0], adj[1])
        return self._pair_graph

    def __repr__(self) -> str:
        return f"KSetInstance(|U|={self.n_elements}, |A|={self.size}, k={self.k})"


@dataclass(frozen=True)
class Packing:
    """Pairwise-disjoint set ids."""

    sets: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.sets)

    def validate(self, inst: KSetInstance) -> None:
        seen: set[int] = set()
        for sid in self.sets:
            if not 0 <= sid < inst.size:
                raise ValueError(f"set id {sid} out of range")
            for x in inst.sets[sid]:
                if x in seen:
                    raise ValueError("packing sets overlap")
                seen.add(x)


@dataclass(frozen=True)
class AugStructure:
    """Sets to add (C) and packed sets to drop (D); |C| > |D|."""

    add: tuple[int, ...]
    remove: tuple[int, ...]


def hs_guarantee(s: int, k: int) -> tuple[float, float]:
    """(ratio, eta): the approximation ratio a size-<=s local optimum
    provably supports, and eta = 2/k - ratio.

    s=1 is plain maximality (1/k). For k=2, structures of size s cover
    augmenting paths of length 2s-1, giving s/(s+1). For k>=3 and s>=2
    the classical two-swap bound 2/(k+1) is used.
    """
    if s < 1:
        raise ValueError("structure size must be >= 1")
    if s == 1:
        ratio = 1.0 / k
    elif k == 2:
        ratio = s / (s + 1.0)
    else:
        ratio = 2.0 / (k + 1.0)
    return ratio, 2.0 / k - ratio


def lemma_count_bound(opt_size: int, b_size: int, k: int, s: int) -> int:
    """Guaranteed number of disjoint augmenting structures for a packing of
    size b_size, floor-tolerant: max(0, ceil(x)) of the fractional bound."""
    import math

    ratio, _eta = hs_guarantee(s, k)
    x = (opt_size - b_size / ratio) / (k * s)
    return max(0, math.ceil(x - 1e-12))


def _check_s(s: int) -> None:
    if not 1 <= s <= STRUCTURE_SIZE_CAP:
        raise ValueError(f"structure size must be in 1..{STRUCTURE_SIZE_CAP}, got {s}")


def packing_oracle(inst: KSetInstance) -> Packing:
    """Exact maximum packing by exhaustive search (test oracle)."""
    if inst.size > PACKING_ORACLE_CAP:
        raise InstanceTooLargeError(
            f"packing oracle limited to {PACKING_ORACLE_CAP} sets, got {inst.size}"
        )
    m = inst.size
    sets = inst.sets
    used = bytearray(inst.n_elements)
    best: list[int] = []
    best_size = -1
    chosen: list[int] = []

    def rec(i: int) -> None:
        nonlocal best, best_size
        if len(chosen) + (m - i) <= best_size:
            return
        if i == m:
            if len(chosen) > best_size:
                best_size = len(chosen)
                best = list(chosen)
            return
        s = sets[i]
        if all(not used[x] for x in s):
            for x in s:
                used[x] = 1
            chosen.append(i)
            rec(i + 1)
            chosen.pop()
            for x in s:
                used[x] = 0
        rec(i + 1)

    rec(0)
    return Packing(frozenset(best))


def greedy_packing(inst: KSetInstance, allowed=None, order=None) -> set[int]:
    """Maximal packing by scanning sets (ascending or in a given order)."""
    used = bytearray(inst.n_elements)
    out: set[int] = set()
    ids = order if order is not None else range(inst.size)
    for sid in ids:
        if allowed is not None and sid not in allowed:
            continue
        s = inst.sets[sid]
        if all(not used[x] for x in s):
            for x in s:
                used[x] = 1
            out.add(sid)
    return out


def _find_one_structure(inst: KSetInstance, b_ids: set[int], s: int, pool) -> tuple[list[int], set[int]] | None:
    """First augmenting structure (C, D) with |C| <= s, in ascending DFS
    order over connected candidate collections; None if locally optimal.

    pool: sorted candidate set ids (disjoint from b_ids).
    """
    sets = inst.sets
    by_elem = inst.by_element
    pool_set = set(pool)
    # element -> owning packed set id
    owner: dict[int, int] = {}
    for b in b_ids:
        for x in sets[b]:
            owner[x] = b

    def conflicts(sid: int) -> set[int]:
        return {owner[x] for x in sets[sid] if x in owner}

    def grow(c_list: list[int], c_elems: set[int], d_set: set[int]) -> tuple[list[int], set[int]] | None:
        if len(c_list) > len(d_set):
            return c_list, d_set
        # even filling C up to s sets cannot beat a drop list this long
        if len(c_list) == s or len(d_set) >= s:
            return None
        seed = c_list[0]
        # candidates touch an element of some dropped set, stay disjoint
        # from C, and sit above the seed (lower seeds were already tried)
        cand: set[int] = set()
        for d in d_set:
            for x in sets[d]:
                for t in by_elem[x]:
                    if t > seed and t in pool_set and t not in c_list:
                        cand.add(t)
        for t in sorted(cand):
            ts = sets[t]
            hit = False
            for x in ts:
                if x in c_elems:
                    hit = True
                    break
            if hit:
                continue
            nd = d_set | conflicts(t)
            if len(c_list) + 1 <= len(nd) and len(nd) >= s:
                continue
            got = grow(c_list + [t], c_elems | set(ts), nd)
            if got is not None:
                return got
        return None

    for c0 in pool:
        d0 = conflicts(c0)
        if len(d0) >= s:
            continue
        got = grow([c0], set(sets[c0]), d0)
        if got is not None:
            return got
    return None


def find_aug_structures(inst: KSetInstance, B: Packing, s: int, allowed=None) -> list[AugStructure]:
    """Greedy collection of disjoint augmenting structures for B.

    Each found structure's added sets (and every non-packed set touching
    them) leave the candidate pool, so the returned C-collections are
    pairwise disjoint in both sets and elements. Returns [] when B admits
    no structure of size <= s.
    """
    _check_s(s)
    B.validate(inst)
    b_ids = set(B.sets)
    sets = inst.sets
    by_elem = inst.by_element
    if allowed is None:
        pool = [i for i in range(inst.size) if i not in b_ids]
    else:
        pool = sorted(i for i in allowed if i not in b_ids)
    out: list[AugStructure] = []
    while True:
        got = _find_one_structure(inst, b_ids, s, pool)
        if got is None:
            return out
        c_list, d_set = got
        out.append(AugStructure(tuple(c_list), tuple(sorted(d_set))))
        dropped: set[int] = set()
        for c in c_list:
            dropped.add(c)
            for x in sets[c]:
                for t in by_elem[x]:
                    if t not in b_ids:
                        dropped.add(t)
        pool = [i for i in pool if i not in dropped]


def apply_structure(b_ids: set[int], st: AugStructure) -> set[int]:
    out = (b_ids - set(st.remove)) | set(st.add)
    return out


def local_search_packing(inst: KSetInstance, s: int, allowed=None, order=None) -> Packing:
    """Greedy packing improved by size-<=s augmenting structures until
    none exists."""
    _check_s(s)
    b = greedy_packing(inst, allowed=allowed, order=order)
    while True:
        sts = find_aug_structures(inst, Packing(frozenset(b)), s, allowed=allowed)
        if not sts:
            p = Packing(frozenset(b))
            p.validate(inst)
            return p
        for st in sts:
            b = apply_structure(b, st)


@dataclass(frozen=True)
class KSetRunReport:
    """Outcome of one packing-algorithm run against one set oracle."""

    final: Packing
    queried_per_round: tuple[tuple[int, ...], ...]
    exists_per_round: tuple[int, ...]
    trace: tuple[int, ...]
    budget_max: int

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


def adaptive_kset(inst: KSetInstance, oracle: SetOracle, R: int, s: int = 3) -> KSetRunReport:
    """Adaptive packing: per round, query disjoint augmenting structures
    and apply the ones whose added sets all exist."""
    if R < 0:
        raise ValueError("round count must be >= 0")
    _check_s(s)
    surviving = bytearray(b"\x01" * inst.size)
    b: set[int] = set()
    rounds_q: list[list[int]] = []
    exists_ct: list[int] = []
    trace: list[int] = []
    for _ in range(R):
        pool = [i for i in range(inst.size) if surviving[i] and i not in b]
        sts = find_aug_structures(inst, Packing(frozenset(b)), s, allowed=pool)
        queried: list[int] = []
        n_exist = 0
        for st in sts:
            all_exist = True
            for c in st.add:
                fresh = not oracle.queried[c]
                ans = oracle.query(c)
                if fresh:
                    queried.append(c)
                    if ans:
                        n_exist += 1
                if not ans:
                    all_exist = False
                    surviving[c] = 0
            if all_exist:
                b = apply_structure(b, st)
        rounds_q.append(queried)
        exists_ct.append(n_exist)
        trace.append(len(b))
    final = Packing(frozenset(b))
    final.validate(inst)
    return KSetRunReport(
        final=final,
        queried_per_round=tuple(tuple(q) for q in rounds_q),
        exists_per_round=tuple(exists_ct),
        trace=tuple(trace),
        budget_max=oracle.max_element_queries,
    )


def nonadaptive_kset_select(inst: KSetInstance, R: int, s: int = 3) -> list[list[int]]:
    """Phase-1 planning: R disjoint local-search solutions O_1..O_R,
    each removed from the instance before the next. Query-free."""
    if R < 1:
        raise ValueError("round count must be >= 1")
    _check_s(s)
    remaining = set(range(inst.size))
    plan: list[list[int]] = []
    for _ in range(R):
        o = local_search_packing(inst, s, allowed=remaining)
        ids = sorted(o.sets)
        plan.append(ids)
        remaining -= o.sets
    return plan


def nonadaptive_kset(inst: KSetInstance, oracle: SetOracle, R: int, s: int = 3) -> KSetRunReport:
    """Non-adaptive packing: the queried collection is fixed up front as
    the union of the planned solutions; the staged pass then queries O_1,
    keeps what exists, and augments with structures drawn from each later
    O_r in turn."""
    plan = nonadaptive_kset_select(inst, R, s)
    rounds_q: list[list[int]] = []
    exists_ct: list[int] = []
    trace: list[int] = []
    q: set[int] = set()
    first = []
    n_exist = 0
    for sid in plan[0]:
        if oracle.query(sid):
            q.add(sid)
            n_exist += 1
        first.append(sid)
    rounds_q.append(first)
    exists_ct.append(n_exist)
    trace.append(len(q))
    for r in range(1, R):
        o_r = plan[r]
        sts = find_aug_structures(inst, Packing(frozenset(q)), s, allowed=o_r)
        queried: list[int] = []
        n_exist = 0
        for st in sts:
            all_exist = True
            for c in st.add:
                fresh = not oracle.queried[c]
                ans = oracle.query(c)
                if fresh:
                    queried.append(c)
                    if ans:
                        n_exist += 1
                if not ans:
                    all_exist = False
            if all_exist:
                q = apply_structure(q, st)
        rounds_q.append(queried)
        exists_ct.append(n_exist)
        trace.append(len(q))
    final = Packing(frozenset(q))
    final.validate(inst)
    return KSetRunReport(
        final=final,
        queried_per_round=tuple(tuple(x) for x in rounds_q),
        exists_per_round=tuple(exists_ct),
        trace=tuple(trace),
        budget_max=oracle.max_element_queries,
    )


def kset_subadditivity_check(inst: KSetInstance, probs, part_a) -> bool:
    """Exact check that splitting the collection cannot raise the expected
    optimum: E[opt(A)] <= E[opt(A1)] + E[opt(A2)] for A2 = A minus A1."""
    table = _exact.kset_opt_by_mask(inst.sets)
    exp = _exact.expected_by_subset(table, _set_probs(inst, probs))
    full = (1 << inst.size) - 1
    a1 = 0
    for sid in part_a:
        a1 |= 1 << sid
    a2 = full & ~a1
    return exp[full] <= exp[a1] + exp[a2] + 1e-9


def kset_subadditivity_all(inst: KSetInstance, probs) -> int:
    """Number of violating partitions over every 2-coloring of the sets."""
    table = _exact.kset_opt_by_mask(inst.sets)
    exp = _exact.expected_by_subset(table, _set_probs(inst, probs))
    full = (1 << inst.size) - 1
    whole = exp[full]
    bad = 0
    for a1 in range(1 << (inst.size - 1) if inst.size else 1):
        if whole > exp[a1] + exp[full & ~a1] + 1e-9:
            bad += 1
    return bad


def _set_probs(inst: KSetInstance, probs) -> np.ndarray:
    if probs is None:
        if inst.probs is None:
            raise ValueError("no per-set probabilities available")
        return inst.probs
    if np.isscalar(probs):
        return np.full(inst.size, float(probs))
    return np.asarray(probs, dtype=np.float64)


def parse_kset_text(text: str) -> KSetInstance:
    """Parse the instance format: `|U| |A| k` then |A| lines of elements,
    each optionally ending with a per-set probability (token with a dot)."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty instance file")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError("first line must be '|U| |A| k'")
    n, m, k = int(head[0]), int(head[1]), int(head[2])
    if len(lines) < 1 + m:
        raise ValueError(f"expected {m} set lines")
    sets = []
    probs: list[float] | None = None
    for i, ln in enumerate(lines[1 : 1 + m]):
        parts = ln.split()
        p = None
        if parts and ("." in parts[-1] or "e" in parts[-1].lower()):
            p = float(parts[-1])
            parts = parts[:-1]
        sets.append(tuple(int(x) for x in parts))
        if p is not None:
            if probs is None:
                if i != 0:
                    raise ValueError("either all set lines carry a probability or none")
                probs = []
            probs.append(p)
        elif probs is not None:
            raise ValueError("either all set lines carry a probability or none")
    return KSetInstance(n, sets, k, probs=probs)


def format_kset(inst: KSetInstance) -> str:
    out = [f"{inst.n_elements} {inst.size} {inst.k}"]
    for i, s in enumerate(inst.sets):
        line = " ".join(str(x) for x in s)
        if inst.probs is not None:
            line += f" {inst.probs[i]:.17g}"
        out.append(line)
    return "\n".join(out) + "\n"
