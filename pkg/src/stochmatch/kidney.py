"""Simplified kidney-exchange pool generation and the query experiment.

Pairs carry blood types and a sensitization class; the directed
compatibility graph feeds cycle enumeration, cycles become sets over pair
indices with success probability (1-f)^length, and the experiment grid
plans R rounds of non-adaptive set queries before committing to a final
packing. The generator is a deliberately small stand-in driven by the
constant tables below; experiment acceptance is trend-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from stochmatch import _engine
from stochmatch.bench import RatioRecord, packing_value
from stochmatch.ksets import KSetInstance, local_search_packing, nonadaptive_kset_select
from stochmatch.stochastic import trial_seed

BLOOD_TYPES = ("O", "A", "B", "AB")
BLOOD_FREQS = (0.44, 0.42, 0.10, 0.04)
PRA_CLASSES = ("low", "medium", "high")
PRA_FREQS = (0.70, 0.20, 0.10)
# virtual-crossmatch failure probability per patient sensitization class
PRA_FAIL = {"low": 0.05, "medium": 0.45, "high": 0.90}

_COMPAT_SALT = 0xC0FFEE
_F_STRIDE = 1 << 40


def abo_compatible(donor: str, patient: str) -> bool:
    if donor == "O":
        return True
    if donor == "AB":
        return patient == "AB"
    return patient in (donor, "AB")


@dataclass(frozen=True)
class PairPool:
    """Incompatible patient-donor pairs."""

    patient_bt: tuple[str, ...]
    donor_bt: tuple[str, ...]
    pra: tuple[str, ...]
    seed: int

    @property
    def n(self) -> int:
        return len(self.patient_bt)


@dataclass(frozen=True)
class CycleInstance:
    """Directed compatibility edges over pair indices."""

    n_pairs: int
    edges: tuple[tuple[int, int], ...]


def gen_pool(n: int, seed: int) -> PairPool:
    """Sample pairs from the blood-type and sensitization tables, keeping
    only internally incompatible ones, until n are collected."""
    if n < 1:
        raise ValueError("pool size must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    pts: list[str] = []
    dns: list[str] = []
    pra: list[str] = []
    while len(pts) < n:
        k = max(64, 2 * (n - len(pts)))
        p_bt = rng.choice(len(BLOOD_TYPES), size=k, p=BLOOD_FREQS)
        d_bt = rng.choice(len(BLOOD_TYPES), size=k, p=BLOOD_FREQS)
        cls = rng.choice(len(PRA_CLASSES), size=k, p=PRA_FREQS)
        cross = rng.random(k)
        for i in range(k):
            if len(pts) == n:
                break
            patient = BLOOD_TYPES[p_bt[i]]
            donor = BLOOD_TYPES[d_bt[i]]
            c = PRA_CLASSES[cls[i]]
            compatible = abo_compatible(donor, patient) and cross[i] >= PRA_FAIL[c]
            if not compatible:
                pts.append(patient)
                dns.append(donor)
                pra.append(c)
    return PairPool(tuple(pts), tuple(dns), tuple(pra), seed)


def build_compat(pool: PairPool) -> CycleInstance:
    """Directed edge (u, v) iff donor u is ABO-compatible with patient v
    and the virtual crossmatch draw succeeds (seeded by the pool)."""
    n = pool.n
    rng = np.random.Generator(np.random.PCG64(pool.seed ^ _COMPAT_SALT))
    fail = np.array([PRA_FAIL[c] for c in pool.pra])
    draws = rng.random((n, n))
    edges: list[tuple[int, int]] = []
    for u in range(n):
        donor = pool.donor_bt[u]
        row = draws[u]
        for v in range(n):
            if u == v:
                continue
            if abo_compatible(donor, pool.patient_bt[v]) and row[v] >= fail[v]:
                edges.append((u, v))
    return CycleInstance(n, tuple(edges))


def enumerate_cycles(instance: CycleInstance, k_max: int) -> list[tuple[int, ...]]:
    """Directed simple cycles of length 2..k_max as ordered pair tuples.

    Cycles are rotated to start at their smallest pair; for 3-cycles both
    orientations of a triple are distinct exchanges (different edges).
    """
    if k_max not in (2, 3):
        raise ValueError("cycle cap must be 2 or 3")
    n = instance.n_pairs
    out_nbrs: list[list[int]] = [[] for _ in range(n)]
    has = set(instance.edges)
    for u, v in instance.edges:
        out_nbrs[u].append(v)
    for lst in out_nbrs:
        lst.sort()
    cycles: list[tuple[int, ...]] = []
    for u in range(n):
        for v in out_nbrs[u]:
            if v > u and (v, u) in has:
                cycles.append((u, v))
    if k_max == 3:
        for u in range(n):
            for v in out_nbrs[u]:
                if v <= u:
                    continue
                for w in out_nbrs[v]:
                    if w <= u or w == v:
                        continue
                    if (w, u) in has:
                        cycles.append((u, v, w))
    return cycles


def cycles_to_instance(n_pairs: int, cycles, f: float) -> KSetInstance:
    """Cycles as a packing instance with success probability (1-f)^len."""
    if not 0.0 <= f <= 1.0:
        raise ValueError("failure rate must be in [0,1]")
    k = max((len(c) for c in cycles), default=2)
    probs = np.array([(1.0 - f) ** len(c) for c in cycles])
    return KSetInstance(n_pairs, cycles, k, probs=probs, allow_duplicates=True)


def final_packing(
    inst: KSetInstance,
    known_exist: set[int],
    known_fail: set[int],
    s: int = 3,
    probs=None,
) -> list[int]:
    """Committed packing after querying: max-cardinality packing over the
    non-failed sets, preferring known-existing then higher-probability sets
    in the greedy order."""
    if probs is None:
        probs = inst.probs if inst.probs is not None else np.ones(inst.size)
    if inst.k == 2:
        eu, ev, adj_nbr, adj_eid = inst.pair_graph()
        alive = bytearray(b"\x01" * inst.size)
        for sid in known_fail:
            alive[sid] = 0
        mate = [-1] * inst.n_elements
        for sid in sorted(known_exist, key=lambda i: (-float(probs[i]), i)):
            a, b = inst.sets[sid]
            if mate[a] < 0 and mate[b] < 0:
                mate[a] = b
                mate[b] = a
        _engine.maximum_mates(inst.n_elements, adj_nbr, adj_eid, mate, alive)
        by_pair: dict[tuple[int, int], int] = {}
        for sid in range(inst.size):
            if alive[sid]:
                by_pair.setdefault(inst.sets[sid], sid)
        chosen = []
        for a, b in _engine.mate_pairs(mate):
            sid = by_pair.get((a, b))
            if sid is not None:
                chosen.append(sid)
        return sorted(chosen)
    allowed = [i for i in range(inst.size) if i not in known_fail]
    order = sorted(
        allowed,
        key=lambda i: (0 if i in known_exist else 1, -float(probs[i]), i),
    )
    return sorted(local_search_packing(inst, s, allowed=set(allowed), order=order).sets)


def run_experiment(
    n: int,
    f_grid,
    R_grid,
    k_max: int,
    trials: int,
    seed: int,
    s: int = 3,
    include_empty: bool = False,
) -> list[RatioRecord]:
    """Grid experiment: plan R rounds of set selection, query the plan,
    commit to a final packing, and compare realized value to omniscient.

    Trials with an empty omniscient packing are dropped from the ratio
    unless include_empty is set, in which case they count as fraction 1.
    """
    pool = gen_pool(n, seed)
    compat = build_compat(pool)
    cycles = enumerate_cycles(compat, k_max)
    if not cycles:
        raise ValueError("compatibility graph admits no cycles")
    R_grid = sorted(set(int(r) for r in R_grid))
    if min(R_grid) < 0:
        raise ValueError("R must be >= 0")
    r_max = max(R_grid)
    inst0 = cycles_to_instance(n, cycles, 0.0)
    plan = nonadaptive_kset_select(inst0, r_max, s) if r_max >= 1 else []
    plan_prefix: dict[int, list[int]] = {}
    for r in R_grid:
        ids: list[int] = []
        for o in plan[:r]:
            ids.extend(o)
        plan_prefix[r] = ids
    budget_by_r: dict[int, int] = {}
    counts = np.zeros(n, dtype=np.int64)
    done = 0
    for r in R_grid:
        for o in plan[done:r]:
            for sid in o:
                for x in inst0.sets[sid]:
                    counts[x] += 1
        done = max(done, r)
        budget_by_r[r] = int(counts.max()) if r > 0 else 0

    records = []
    lens = np.array([len(c) for c in cycles])
    for fi, f in enumerate(f_grid):
        probs_f = (1.0 - f) ** lens
        base_f = seed ^ ((fi + 1) * _F_STRIDE)
        bits_by_trial = []
        omni_by_trial = []
        for t in range(trials):
            rng = np.random.Generator(np.random.PCG64(trial_seed(base_f, t)))
            bits = rng.random(inst0.size) < probs_f
            bits_by_trial.append(bits)
            omni_by_trial.append(packing_value(inst0, np.flatnonzero(bits), s=s))
        for r in R_grid:
            queried = plan_prefix[r]
            alg_vals = []
            for t in range(trials):
                bits = bits_by_trial[t]
                known_exist = {sid for sid in queried if bits[sid]}
                known_fail = {sid for sid in queried if not bits[sid]}
                chosen = final_packing(inst0, known_exist, known_fail, s=s, probs=probs_f)
                alg_vals.append(int(sum(1 for sid in chosen if bits[sid])))
            rec = _aggregate(alg_vals, omni_by_trial, include_empty)
            records.append(
                RatioRecord(
                    family="kidney",
                    params=f"n={n};k_max={k_max};seed={seed};s={s}",
                    algorithm="nonadaptive-plan",
                    R=r,
                    p_or_f=float(f),
                    trials=trials,
                    alg_mean=rec[0],
                    omni_mean=rec[1],
                    omni_se=rec[2],
                    ratio=rec[3],
                    ci=rec[4],
                    budget_max=budget_by_r[r],
                    extra={"f": float(f), "k_max": k_max, "n": n},
                )
            )
    return records


def _aggregate(alg_vals, omni_vals, include_empty: bool):
    from stochmatch.bench import _mc_stats, paired_ratio

    if include_empty:
        fracs = [a / o if o > 0 else 1.0 for a, o in zip(alg_vals, omni_vals)]
        am, _ = _mc_stats(alg_vals)
        om, ose = _mc_stats(omni_vals)
        fm, fse = _mc_stats(fracs)
        return am, om, ose, fm, 1.96 * fse
    kept = [(a, o) for a, o in zip(alg_vals, omni_vals) if o > 0]
    if not kept:
        return math.nan, 0.0, 0.0, math.nan, math.nan
    a = [x[0] for x in kept]
    o = [x[1] for x in kept]
    am, _ = _mc_stats(a)
    om, ose = _mc_stats(o)
    ratio, ci = paired_ratio(a, o)
    return am, om, ose, ratio, ci


KIDNEY_EXTRA_COLS = ["f", "k_max", "n"]


def format_pool(pool: PairPool) -> str:
    out = [
        "# generator kidney-pool",
        f"# n {pool.n}",
        f"# seed {pool.seed}",
        f"{pool.n}",
    ]
    for i in range(pool.n):
        out.append(f"{pool.patient_bt[i]} {pool.donor_bt[i]} {pool.pra[i]}")
    return "\n".join(out) + "\n"


def parse_pool(text: str) -> PairPool:
    seed = 0
    rows = []
    count = None
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        if ln.startswith("#"):
            parts = ln[1:].split()
            if len(parts) == 2 and parts[0] == "seed":
                seed = int(parts[1])
            continue
        if count is None:
            count = int(ln)
            continue
        p, d, c = ln.split()
        if p not in BLOOD_TYPES or d not in BLOOD_TYPES or c not in PRA_CLASSES:
            raise ValueError(f"bad pool line: {ln!r}")
        rows.append((p, d, c))
    if count is None or len(rows) != count:
        raise ValueError("pool line count mismatch")
    return PairPool(
        tuple(r[0] for r in rows),
        tuple(r[1] for r in rows),
        tuple(r[2] for r in rows),
        seed,
    )
