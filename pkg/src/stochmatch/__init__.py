"""Query-limited stochastic matching and k-set packing toolkit.

Provides general-graph maximum matching, edge/set query oracles with
per-vertex budget accounting, adaptive and non-adaptive query algorithms
with naive baselines, omniscient-optimum estimation, instance generators,
and a simplified kidney-exchange experiment pipeline.
"""

from stochmatch.graph import (
    AltPath,
    Graph,
    Matching,
    max_matching,
    max_matching_oracle,
    short_augmenting_paths,
    symmetric_difference,
)
from stochmatch.stochastic import (
    EdgeOracle,
    ProbModel,
    Realization,
    SetOracle,
    edge_prob,
    f_delta,
    sample_realization,
    sample_set_realization,
    sample_vertex_params,
    trial_seed,
)
from stochmatch.matching import (
    RunReport,
    TheoryParams,
    adaptive_match,
    derive_params,
    naive_random,
    naive_scheduled,
    nonadaptive_match,
    nonadaptive_select,
    nonadaptive_select_strategic,
    single_matching_baseline,
)
from stochmatch.ksets import (
    AugStructure,
    KSetInstance,
    Packing,
    adaptive_kset,
    find_aug_structures,
    kset_subadditivity_check,
    local_search_packing,
    nonadaptive_kset,
    nonadaptive_kset_select,
    packing_oracle,
)
from stochmatch.bench import (
    OmniscientEstimate,
    RatioRecord,
    evaluate,
    gen_appendixA,
    gen_complete_bipartite,
    gen_disjoint_edges,
    gen_erdos_renyi,
    gen_example31,
    gen_figure3,
    omniscient_kset,
    omniscient_matching,
)
from stochmatch.kidney import (
    CycleInstance,
    PairPool,
    build_compat,
    enumerate_cycles,
    gen_pool,
    run_experiment,
)

__all__ = [
    "AltPath",
    "AugStructure",
    "CycleInstance",
    "EdgeOracle",
    "Graph",
    "KSetInstance",
    "Matching",
    "OmniscientEstimate",
    "Packing",
    "PairPool",
    "ProbModel",
    "Realization",
    "RunReport",
    "SetOracle",
    "TheoryParams",
    "adaptive_kset",
    "adaptive_match",
    "build_compat",
    "derive_params",
    "edge_prob",
    "enumerate_cycles",
    "evaluate",
    "f_delta",
    "find_aug_structures",
    "gen_appendixA",
    "gen_complete_bipartite",
    "gen_disjoint_edges",
    "gen_erdos_renyi",
    "gen_example31",
    "gen_figure3",
    "gen_pool",
    "kset_subadditivity_check",
    "local_search_packing",
    "max_matching",
    "max_matching_oracle",
    "naive_random",
    "naive_scheduled",
    "nonadaptive_kset",
    "nonadaptive_kset_select",
    "nonadaptive_match",
    "nonadaptive_select",
    "nonadaptive_select_strategic",
    "omniscient_kset",
    "omniscient_matching",
    "packing_oracle",
    "run_experiment",
    "sample_realization",
    "sample_set_realization",
    "sample_vertex_params",
    "short_augmenting_paths",
    "single_matching_baseline",
    "symmetric_difference",
    "trial_seed",
]

__version__ = "0.1.0"
