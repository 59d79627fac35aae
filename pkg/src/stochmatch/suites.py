"""Replication suite runners behind the CLI's `replicate` subcommand.

Each suite returns (records, extra_cols, header_comments); the CLI turns
that into a CSV file. Default trial counts are sized for desk-scale runs
and can be overridden; seeds are fixed so outputs are reproducible.
"""

from __future__ import annotations

import math

from stochmatch.bench import (
    RatioRecord,
    evaluate,
    figure3_selector,
    gen_appendixA,
    gen_complete_bipartite,
    gen_example31,
    gen_figure3,
    omniscient_matching,
)
from stochmatch.kidney import KIDNEY_EXTRA_COLS, run_experiment
from stochmatch.stochastic import ProbModel

DEFAULT_SEED = 20240501

SUITES = (
    "example31",
    "figure3",
    "appendixA",
    "lemmaB1",
    "kidney-2cycle",
    "kidney-23cycle",
)


def example31_budget(n: int, p: float) -> int:
    """Per-vertex schedule budget ceil(2 ln(n) / p) for the naive baseline."""
    return math.ceil(2.0 * math.log(n) / p)


def suite_example31(
    t: int = 1600,
    p: float = 0.5,
    trials_naive: int = 20,
    trials_adaptive: int = 10,
    adaptive_R: int = 10,
    seed: int = DEFAULT_SEED,
) -> tuple[list[RatioRecord], list[str], list[str]]:
    n = 3 * t
    R0 = example31_budget(n, p)
    g = gen_example31(t, R0, seed)
    model = ProbModel.uniform(p)
    recs = [
        evaluate(
            "naive-scheduled", g, model, R0, trials_naive, seed, p_or_f=p
        ),
        evaluate(
            "adaptive", g, model, adaptive_R, trials_adaptive, seed, p_or_f=p
        ),
    ]
    comments = [f"suite=example31 t={t} p={p:g} R0={R0} seed={seed}"]
    return recs, [], comments


def suite_figure3(
    t: int = 200,
    p: float = 0.5,
    trials: int = 2000,
    seed: int = DEFAULT_SEED,
) -> tuple[list[RatioRecord], list[str], list[str]]:
    g = gen_figure3(t)
    R = math.ceil(math.log2(3 * t))
    model = ProbModel.uniform(p)
    rec = evaluate(
        "nonadaptive-strategic",
        g,
        model,
        R,
        trials,
        seed,
        alg_params={"selector": figure3_selector(g)},
        p_or_f=p,
    )
    comments = [f"suite=figure3 t={t} p={p:g} R={R} seed={seed}"]
    return [rec], [], comments


def suite_appendixA(
    beta: float = 0.75,
    p: float = 0.5,
    ts: tuple[int, ...] = (256, 4096),
    trials: tuple[int, ...] = (40, 6),
    seed: int = DEFAULT_SEED,
) -> tuple[list[RatioRecord], list[str], list[str]]:
    recs = []
    for t, tr in zip(ts, trials):
        g = gen_appendixA(t, beta)
        b = math.ceil(t**0.5)
        recs.append(
            evaluate(
                "naive-random",
                g,
                ProbModel.uniform(p),
                0,
                tr,
                seed,
                alg_params={"b": b},
                p_or_f=p,
            )
        )
    comments = [f"suite=appendixA beta={beta:g} p={p:g} b=ceil(sqrt(t)) seed={seed}"]
    return recs, [], comments


def lemma_b1_bound(n: int, p: float) -> float:
    """n - (10 / ln(1/(1-p))) * ln(n)."""
    return n - (10.0 / math.log(1.0 / (1.0 - p))) * math.log(n)


def suite_lemmaB1(
    ns: tuple[int, ...] = (100, 200),
    ps: tuple[float, ...] = (0.3, 0.5),
    trials: int = 300,
    seed: int = DEFAULT_SEED,
) -> tuple[list[RatioRecord], list[str], list[str]]:
    recs = []
    for n in ns:
        g = gen_complete_bipartite(n)
        for p in ps:
            est = omniscient_matching(g, ProbModel.uniform(p), trials=trials, base_seed=seed, mode="monte-carlo")
            bound = lemma_b1_bound(n, p)
            recs.append(
                RatioRecord(
                    family="complete-bipartite",
                    params=f"n={n}",
                    algorithm="omniscient-mc",
                    R=0,
                    p_or_f=p,
                    trials=trials,
                    alg_mean=est.mean,
                    omni_mean=est.mean,
                    omni_se=est.se,
                    ratio=est.mean / bound if bound > 0 else math.inf,
                    ci=1.96 * est.se / bound if bound > 0 else 0.0,
                )
            )
    comments = [
        f"suite=lemmaB1 trials={trials} seed={seed}",
        "ratio column is mc_mean / (n - 10*ln(n)/ln(1/(1-p))); >= 1 passes",
    ]
    return recs, [], comments


def suite_kidney(
    k_max: int,
    n: int = 250,
    trials: int = 500,
    f_grid: tuple[float, ...] = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9),
    R_grid: tuple[int, ...] = (0, 1, 2, 3, 4, 5),
    seed: int = DEFAULT_SEED,
    s: int = 3,
    include_empty: bool = False,
) -> tuple[list[RatioRecord], list[str], list[str]]:
    recs = run_experiment(
        n, f_grid, R_grid, k_max, trials, seed, s=s, include_empty=include_empty
    )
    comments = [
        f"suite=kidney-{k_max}cycle n={n} trials={trials} seed={seed} s={s} include_empty={include_empty}",
        "empty-omniscient trials dropped from ratio" if not include_empty else "empty-omniscient trials count as fraction 1",
        "final-packing tie-breaks: known-existing first, then higher success probability, then lowest set index",
    ]
    return recs, KIDNEY_EXTRA_COLS, comments


def run_suite(name: str, seed: int = DEFAULT_SEED, trials: int | None = None, include_empty: bool = False):
    """Dispatch a named suite; trials overrides the suite's default."""
    if name == "example31":
        kw = {}
        if trials is not None:
            kw = {"trials_naive": trials, "trials_adaptive": max(1, trials // 2)}
        return suite_example31(seed=seed, **kw)
    if name == "figure3":
        return suite_figure3(seed=seed, **({"trials": trials} if trials else {}))
    if name == "appendixA":
        kw = {"trials": (trials, max(2, trials // 6))} if trials else {}
        return suite_appendixA(seed=seed, **kw)
    if name == "lemmaB1":
        return suite_lemmaB1(seed=seed, **({"trials": trials} if trials else {}))
    if name == "kidney-2cycle":
        return suite_kidney(2, seed=seed, include_empty=include_empty, **({"trials": trials} if trials else {}))
    if name == "kidney-23cycle":
        return suite_kidney(
            3,
            n=100,
            s=2,
            seed=seed,
            include_empty=include_empty,
            **({"trials": trials} if trials else {"trials": 200}),
        )
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
