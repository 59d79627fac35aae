"""Omniscient-optimum estimation, ratio evaluation, and graph generators.

The omniscient value is the expected maximum matching (packing) size when
the whole realization is visible. Small instances are enumerated exactly;
larger ones use seed-paired Monte Carlo, where each trial's realization is
shared by the algorithm run and the omniscient side to cut variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from stochmatch import _engine, _exact
from stochmatch.errors import InstanceTooLargeError
from stochmatch.graph import Graph
from stochmatch.ksets import KSetInstance, local_search_packing
from stochmatch.matching import (
    RunReport,
    adaptive_match,
    naive_random,
    naive_scheduled,
    nonadaptive_match,
    nonadaptive_match_strategic,
    single_matching_baseline,
)
from stochmatch.stochastic import (
    EdgeOracle,
    ProbModel,
    sample_realization,
    sample_set_realization,
    trial_seed,
)

EXACT_EDGE_CAP = 20
EXACT_AUTO_LIMIT = 16
_ALG_SEED_SALT = 0x9E3779B97F4A7C15

CSV_COLUMNS = [
    "family",
    "params",
    "algorithm",
    "R",
    "p_or_f",
    "trials",
    "alg_mean",
    "omni_mean",
    "omni_se",
    "ratio",
    "ci",
]


@dataclass(frozen=True)
class OmniscientEstimate:
    mean: float
    se: float
    trials: int
    mode: str  # "exact-enumeration" | "monte-carlo"


@dataclass
class RatioRecord:
    family: str
    params: str
    algorithm: str
    R: int
    p_or_f: float
    trials: int
    alg_mean: float
    omni_mean: float
    omni_se: float
    ratio: float
    ci: float
    budget_max: int = 0   # not part of the CSV schema
    issued_max: int = -1  # per-vertex selections, random baseline only
    extra: dict = field(default_factory=dict)  # appended columns (kidney)

    @property
    def flagged(self) -> bool:
        """Ratio exceeding 1 beyond sampling noise."""
        return self.ratio > 1.0 + 3.0 * self.ci + 1e-12

    def csv_values(self, extra_cols: list[str] | None = None) -> list[str]:
        vals = [
            self.family,
            self.params,
            self.algorithm,
            str(self.R),
            _fmt(self.p_or_f),
            str(self.trials),
            _fmt(self.alg_mean),
            _fmt(self.omni_mean),
            _fmt(self.omni_se),
            _fmt(self.ratio),
            _fmt(self.ci),
        ]
        for c in extra_cols or []:
            vals.append(_fmt(self.extra[c]) if c in self.extra else "")
        return vals


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(float(x), ".6g")


def format_csv(records, extra_cols: list[str] | None = None, header_comments: list[str] | None = None) -> str:
    lines = [f"# {c}" for c in header_comments or []]
    lines.append(",".join(CSV_COLUMNS + (extra_cols or [])))
    for r in records:
        lines.append(",".join(r.csv_values(extra_cols)))
    return "\n".join(lines) + "\n"


def _mc_stats(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    mean = float(arr.mean())
    se = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return mean, se


def _matching_size_of(g: Graph, bits) -> int:
    eu, ev = g.endpoint_lists
    alive = bytearray(bits.astype(np.uint8).tobytes())
    mate = _engine.greedy_mates(g.n, eu, ev, alive)
    _engine.maximum_mates(g.n, *g.adjacency, mate, alive)
    return _engine.matching_size(mate)


def omniscient_matching(
    g: Graph,
    model: ProbModel,
    trials: int = 10_000,
    base_seed: int = 0,
    mode: str = "auto",
) -> OmniscientEstimate:
    """E[size of maximum matching of the realized edge set].

    mode "exact" enumerates all 2^m realizations (m <= 20); "monte-carlo"
    averages seeded trials; "auto" picks exact when m <= 16.
    """
    if mode == "auto":
        mode = "exact" if g.m <= EXACT_AUTO_LIMIT else "monte-carlo"
    if mode == "exact":
        if g.m > EXACT_EDGE_CAP:
            raise InstanceTooLargeError(f"exact omniscient mode capped at {EXACT_EDGE_CAP} edges")
        table = _exact.matching_opt_by_mask(g)
        exp = _exact.expected_by_subset(table, model.probs_for(g))
        return OmniscientEstimate(float(exp[-1]), 0.0, 0, "exact-enumeration")
    vals = []
    for t in range(trials):
        r = sample_realization(model, g, trial_seed(base_seed, t))
        vals.append(_matching_size_of(g, r.bits))
    mean, se = _mc_stats(vals)
    if not 0.0 <= mean <= g.n / 2:
        raise AssertionError("omniscient matching estimate out of range")
    return OmniscientEstimate(mean, se, trials, "monte-carlo")


def _packing_value_exact2(inst: KSetInstance, ids) -> int:
    eu, ev, adj_nbr, adj_eid = inst.pair_graph()
    alive = bytearray(inst.size)
    for i in ids:
        alive[i] = 1
    mate = _engine.greedy_mates(inst.n_elements, eu, ev, alive)
    _engine.maximum_mates(inst.n_elements, adj_nbr, adj_eid, mate, alive)
    return _engine.matching_size(mate)


def packing_value(inst: KSetInstance, existing_ids, s: int = 3) -> int:
    """Best packing size over the given existing sets: exact matching for
    k=2, local search otherwise."""
    ids = [int(i) for i in existing_ids]
    if inst.k == 2:
        return _packing_value_exact2(inst, ids)
    return local_search_packing(inst, s, allowed=set(ids)).size


def omniscient_kset(
    inst: KSetInstance,
    probs=None,
    trials: int = 10_000,
    base_seed: int = 0,
    mode: str = "auto",
    s: int = 3,
) -> OmniscientEstimate:
    """E[size of maximum packing of the realized sets].

    Exact mode enumerates all set subsets. Monte Carlo evaluates each
    realization exactly for k=2 and with size-s local search for k>=3
    (a lower-bound proxy, recorded in the mode string).
    """
    pr = inst.probs if probs is None else (
        np.full(inst.size, float(probs)) if np.isscalar(probs) else np.asarray(probs, dtype=np.float64)
    )
    if pr is None:
        raise ValueError("no per-set probabilities available")
    if mode == "auto":
        mode = "exact" if inst.size <= EXACT_AUTO_LIMIT else "monte-carlo"
    if mode == "exact":
        table = _exact.kset_opt_by_mask(inst.sets)
        exp = _exact.expected_by_subset(table, pr)
        return OmniscientEstimate(float(exp[-1]), 0.0, 0, "exact-enumeration")
    vals = []
    for t in range(trials):
        r = sample_set_realization(pr, trial_seed(base_seed, t))
        vals.append(packing_value(inst, r.existing_ids(), s=s))
    mean, se = _mc_stats(vals)
    label = "monte-carlo" if inst.k == 2 else "monte-carlo-local-search"
    return OmniscientEstimate(mean, se, trials, label)


ALGORITHMS = ("adaptive", "nonadaptive", "nonadaptive-strategic", "naive-random", "naive-scheduled", "single", "query-all")


def _run_algorithm(alg: str, g: Graph, oracle: EdgeOracle, R: int, seed: int, params: dict) -> RunReport:
    from stochmatch.matching import _match_preselected

    if "_rounds" in params:
        return _match_preselected(g, oracle, params["_rounds"])
    if alg == "adaptive":
        return adaptive_match(g, oracle, R, length_cap=params.get("length_cap"))
    if alg == "nonadaptive":
        return nonadaptive_match(g, oracle, R)
    if alg == "nonadaptive-strategic":
        return nonadaptive_match_strategic(g, oracle, R, params["selector"])
    if alg == "naive-random":
        return naive_random(g, oracle, params["b"], seed)
    if alg == "naive-scheduled":
        return naive_scheduled(g, oracle, R, seed)
    if alg == "single":
        return single_matching_baseline(g, oracle)
    if alg == "query-all":
        return _match_preselected(g, oracle, [list(range(g.m))])
    raise ValueError(f"unknown algorithm id {alg!r}")


def _preselect_rounds(alg: str, g: Graph, R: int, params: dict) -> None:
    """Selection for the non-adaptive algorithms and the single-matching
    baseline is realization-free; hoist it out of the trial loop."""
    from stochmatch.matching import max_matching_ids, nonadaptive_select_rounds, nonadaptive_select_strategic

    if alg == "nonadaptive":
        params["_rounds"] = nonadaptive_select_rounds(g, R)
    elif alg == "nonadaptive-strategic":
        params["_rounds"] = [sorted(nonadaptive_select_strategic(g, R, params["selector"]))]
    elif alg == "single":
        params["_rounds"] = [sorted(max_matching_ids(g))]
    elif alg == "query-all":
        params["_rounds"] = [list(range(g.m))]


def evaluate(
    algorithm: str,
    g: Graph,
    model: ProbModel,
    R: int,
    trials: int,
    base_seed: int,
    alg_params: dict | None = None,
    family: str = "",
    params: str = "",
    p_or_f: float | None = None,
) -> RatioRecord:
    """Run seed-paired trials of an algorithm and compare to omniscient.

    Trial t draws the realization from trial_seed(base_seed, t); the same
    realization feeds the algorithm's oracle and, in Monte Carlo mode, the
    omniscient side. The ratio is the ratio of means; ci is a 95% delta-
    method half-width.
    """
    alg_params = dict(alg_params) if alg_params else {}
    _preselect_rounds(algorithm, g, R, alg_params)
    exact = g.m <= EXACT_AUTO_LIMIT
    omni_exact = None
    if exact:
        omni_exact = omniscient_matching(g, model, mode="exact")
    alg_vals: list[float] = []
    omni_vals: list[float] = []
    budget_max = 0
    issued_max = -1
    for t in range(trials):
        seed = trial_seed(base_seed, t)
        realization = sample_realization(model, g, seed)
        oracle = EdgeOracle(g, realization)
        report = _run_algorithm(algorithm, g, oracle, R, seed ^ _ALG_SEED_SALT, alg_params)
        alg_vals.append(report.size)
        budget_max = max(budget_max, report.budget_max)
        issued_max = max(issued_max, report.issued_max)
        if not exact:
            omni_vals.append(_matching_size_of(g, realization.bits))
    alg_mean, alg_se = _mc_stats(alg_vals)
    if exact:
        omni_mean, omni_se = omni_exact.mean, 0.0
        ratio = alg_mean / omni_mean if omni_mean > 0 else math.nan
        ci = 1.96 * alg_se / omni_mean if omni_mean > 0 else math.nan
    else:
        omni_mean, omni_se = _mc_stats(omni_vals)
        ratio, ci = paired_ratio(alg_vals, omni_vals)
    if p_or_f is None:
        p_or_f = model.p if model.variant == "uniform" else math.nan
    return RatioRecord(
        family=family or g.meta.get("family", ""),
        params=params or g.meta.get("params", ""),
        algorithm=algorithm,
        R=R,
        p_or_f=p_or_f,
        trials=trials,
        alg_mean=alg_mean,
        omni_mean=omni_mean,
        omni_se=omni_se,
        ratio=ratio,
        ci=ci,
        budget_max=budget_max,
        issued_max=issued_max,
    )


def paired_ratio(alg_vals, omni_vals) -> tuple[float, float]:
    """Ratio of means with a delta-method 95% half-width for paired trials."""
    a = np.asarray(alg_vals, dtype=np.float64)
    o = np.asarray(omni_vals, dtype=np.float64)
    t = len(a)
    ob = o.mean()
    if ob <= 0:
        return math.nan, math.nan
    r = a.mean() / ob
    if t < 2:
        return float(r), math.nan
    saa = a.var(ddof=1)
    soo = o.var(ddof=1)
    sao = float(np.cov(a, o, ddof=1)[0, 1])
    var = (saa - 2.0 * r * sao + r * r * soo) / (t * ob * ob)
    return float(r), 1.96 * math.sqrt(max(var, 0.0))


def matching_subadditivity_check(g: Graph, model: ProbModel, edge_subset) -> bool:
    """Exact check that E[M(E)] <= E[M(E1)] + E[M(E\\E1)]."""
    table = _exact.matching_opt_by_mask(g)
    exp = _exact.expected_by_subset(table, model.probs_for(g))
    full = (1 << g.m) - 1
    a1 = 0
    for e in edge_subset:
        a1 |= 1 << e
    return exp[full] <= exp[a1] + exp[full & ~a1] + 1e-9


def matching_subadditivity_all(g: Graph, model: ProbModel) -> int:
    """Number of violating edge-set partitions (exact, all 2-colorings)."""
    table = _exact.matching_opt_by_mask(g)
    exp = _exact.expected_by_subset(table, model.probs_for(g))
    full = (1 << g.m) - 1
    whole = exp[full]
    bad = 0
    for a1 in range(1 << max(g.m - 1, 0)):
        if whole > exp[a1] + exp[full & ~a1] + 1e-9:
            bad += 1
    return bad


# ---------------------------------------------------------------------------
# generators


def gen_disjoint_edges(n: int) -> Graph:
    """n vertices matched in n/2 disjoint edges."""
    if n < 2 or n % 2:
        raise ValueError("need a positive even vertex count")
    edges = [(2 * i, 2 * i + 1) for i in range(n // 2)]
    return Graph(n, edges, meta={"family": "disjoint-edges", "params": f"n={n}"})


def gen_complete_bipartite(n: int) -> Graph:
    """K_{n,n}: left vertices 0..n-1, right n..2n-1."""
    if n < 1:
        raise ValueError("side size must be >= 1")
    eu = np.repeat(np.arange(n), n)
    ev = np.tile(np.arange(n, 2 * n), n)
    return Graph(
        2 * n,
        (eu, ev),
        meta={
            "family": "complete-bipartite",
            "params": f"n={n}",
            "classes": {"U": list(range(n)), "V": list(range(n, 2 * n))},
        },
    )


def gen_erdos_renyi(n: int, d: float, seed: int) -> Graph:
    """Random graph with expected degree d."""
    if n < 1:
        raise ValueError("vertex count must be >= 1")
    if d < 0:
        raise ValueError("expected degree must be >= 0")
    p = min(d / (n - 1), 1.0) if n > 1 else 0.0
    rng = np.random.Generator(np.random.PCG64(seed))
    iu = np.triu_indices(n, k=1)
    keep = rng.random(len(iu[0])) < p
    return Graph(
        n,
        (iu[0][keep], iu[1][keep]),
        meta={"family": "erdos-renyi", "params": f"n={n};d={d:g};seed={seed}"},
    )


def _left_regular(rng, left, right, deg) -> tuple[np.ndarray, np.ndarray]:
    """Each left vertex picks deg distinct random right endpoints."""
    deg = min(deg, len(right))
    eu = np.repeat(left, deg)
    ev = np.empty(len(left) * deg, dtype=np.int64)
    right = np.asarray(right)
    for i in range(len(left)):
        ev[i * deg : (i + 1) * deg] = rng.choice(right, size=deg, replace=False)
    return eu, ev


def gen_example31(t: int, R0: int, seed: int) -> Graph:
    """Four-class construction: random degree-R0 bipartite layers A-B and
    C-D, complete bipartite between B and C; |A|=|B|=t/2, |C|=|D|=t.

    Vertex indices are shuffled (seeded) so that index order behaves like
    a random processing order.
    """
    if t < 2 or t % 2:
        raise ValueError("t must be positive and even")
    if R0 < 1:
        raise ValueError("degree must be >= 1")
    h = t // 2
    n = 3 * t
    rng = np.random.Generator(np.random.PCG64(seed))
    A = np.arange(0, h)
    B = np.arange(h, t)
    C = np.arange(t, 2 * t)
    D = np.arange(2 * t, 3 * t)
    ab_u, ab_v = _left_regular(rng, A, B, R0)
    cd_u, cd_v = _left_regular(rng, C, D, R0)
    bc_u = np.repeat(B, t)
    bc_v = np.tile(C, h)
    perm = rng.permutation(n)
    eu = perm[np.concatenate([ab_u, bc_u, cd_u])]
    ev = perm[np.concatenate([ab_v, bc_v, cd_v])]
    classes = {
        "A": sorted(perm[A].tolist()),
        "B": sorted(perm[B].tolist()),
        "C": sorted(perm[C].tolist()),
        "D": sorted(perm[D].tolist()),
    }
    return Graph(
        n,
        (eu, ev),
        meta={
            "family": "example31",
            "params": f"t={t};R0={R0};seed={seed}",
            "classes": classes,
        },
    )


def gen_figure3(t: int) -> Graph:
    """Adversarial construction: perfect matching between B and C plus
    complete bipartite A-B and C-D; |A|=|D|=t/2, |B|=|C|=t.

    Class halves B1/B2 and C1/C2 are recorded for the adversarial
    selector; the B-C matching pairs B[i] with C[i].
    """
    if t < 2 or t % 2:
        raise ValueError("t must be positive and even")
    h = t // 2
    A = np.arange(0, h)
    B = np.arange(h, h + t)
    C = np.arange(h + t, h + 2 * t)
    D = np.arange(h + 2 * t, h + 2 * t + h)
    pm_u, pm_v = B, C
    ab_u = np.repeat(A, t)
    ab_v = np.tile(B, h)
    cd_u = np.repeat(C, h)
    cd_v = np.tile(D, t)
    eu = np.concatenate([pm_u, ab_u, cd_u])
    ev = np.concatenate([pm_v, ab_v, cd_v])
    classes = {
        "A": A.tolist(),
        "B": B.tolist(),
        "C": C.tolist(),
        "D": D.tolist(),
        "B1": B[:h].tolist(),
        "B2": B[h:].tolist(),
        "C1": C[:h].tolist(),
        "C2": C[h:].tolist(),
    }
    return Graph(
        3 * t,
        (eu, ev),
        meta={"family": "figure3", "params": f"t={t}", "classes": classes},
    )


def figure3_selector(g: Graph):
    """Adversarial maximum-matching schedule for gen_figure3 graphs.

    Round 1 takes the B1-C1 half of the matching plus perfect matchings
    A-B2 and C2-D; round 2 takes B2-C2, A-B1 and C1-D; later rounds take
    shifted disjoint perfect matchings A-B1 and C1-D only.
    """
    cls = g.meta["classes"]
    A = cls["A"]
    D = cls["D"]
    B1, B2, C1, C2 = cls["B1"], cls["B2"], cls["C1"], cls["C2"]
    h = len(A)

    def pairs_to_ids(pairs):
        us = np.fromiter((p[0] for p in pairs), dtype=np.int64, count=len(pairs))
        vs = np.fromiter((p[1] for p in pairs), dtype=np.int64, count=len(pairs))
        return [int(e) for e in g.edge_ids(us, vs)]

    def selector(r: int, graph: Graph, selected) -> list[int]:
        if r == 0:
            pairs = (
                [(B1[i], C1[i]) for i in range(h)]
                + [(A[j], B2[j]) for j in range(h)]
                + [(C2[j], D[j]) for j in range(h)]
            )
        elif r == 1:
            pairs = (
                [(B2[i], C2[i]) for i in range(h)]
                + [(A[j], B1[j]) for j in range(h)]
                + [(C1[j], D[j]) for j in range(h)]
            )
        else:
            shift = r - 1
            if shift >= h:
                raise ValueError("adversarial schedule exhausted")
            pairs = [(A[j], B1[(j + shift) % h]) for j in range(h)] + [
                (C1[(j + shift) % h], D[j]) for j in range(h)
            ]
        return pairs_to_ids(pairs)

    return selector


def gen_appendixA(t: int, beta: float) -> Graph:
    """Perfect matching between B and C plus complete bipartite A-B and
    C-D with |A|=|D|=floor(t^beta), |B|=|C|=t."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must be in (0,1)")
    a = int(t**beta)
    if a < 1:
        raise ValueError("t^beta must be >= 1")
    B = np.arange(0, t)
    C = np.arange(t, 2 * t)
    A = np.arange(2 * t, 2 * t + a)
    D = np.arange(2 * t + a, 2 * t + 2 * a)
    ab_u = np.repeat(A, t)
    ab_v = np.tile(B, a)
    cd_u = np.repeat(C, a)
    cd_v = np.tile(D, t)
    eu = np.concatenate([B, ab_u, cd_u])
    ev = np.concatenate([C, ab_v, cd_v])
    classes = {"A": A.tolist(), "B": B.tolist(), "C": C.tolist(), "D": D.tolist()}
    return Graph(
        2 * t + 2 * a,
        (eu, ev),
        meta={"family": "appendixA", "params": f"t={t};beta={beta:g}", "classes": classes},
    )
