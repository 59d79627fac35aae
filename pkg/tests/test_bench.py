import math

import numpy as np
import pytest

from conftest import random_graph
from stochmatch.bench import (
    CSV_COLUMNS,
    evaluate,
    figure3_selector,
    format_csv,
    gen_appendixA,
    gen_complete_bipartite,
    gen_disjoint_edges,
    gen_erdos_renyi,
    gen_example31,
    gen_figure3,
    matching_subadditivity_all,
    matching_subadditivity_check,
    omniscient_kset,
    omniscient_matching,
    paired_ratio,
)
from stochmatch.errors import InstanceTooLargeError
from stochmatch.graph import Graph
from stochmatch.ksets import KSetInstance
from stochmatch.matching import nonadaptive_select_strategic
from stochmatch.stochastic import ProbModel

K3 = Graph(3, [(0, 1), (1, 2), (0, 2)])


class TestOmniscientMatching:
    def test_single_edge_exact(self):
        g = Graph(2, [(0, 1)])
        for p in (0.2, 0.7):
            est = omniscient_matching(g, ProbModel.uniform(p), mode="exact")
            assert est.mean == pytest.approx(p)
            assert est.se == 0.0 and est.mode == "exact-enumeration"

    def test_k3_exact(self):
        est = omniscient_matching(K3, ProbModel.uniform(0.5), mode="exact")
        assert est.mean == pytest.approx(0.875)

    def test_k22_exact(self):
        est = omniscient_matching(gen_complete_bipartite(2), ProbModel.uniform(0.5), mode="exact")
        assert est.mean == pytest.approx(1.375)

    def test_exact_cap(self):
        g = gen_complete_bipartite(5)  # 25 edges
        with pytest.raises(InstanceTooLargeError):
            omniscient_matching(g, ProbModel.uniform(0.5), mode="exact")

    def test_monte_carlo_agrees_with_exact(self, rng):
        for _ in range(6):
            g = random_graph(rng, 7, edge_cap=12)
            if g.m == 0:
                continue
            p = rng.choice([0.3, 0.5, 0.8])
            model = ProbModel.uniform(p)
            exact = omniscient_matching(g, model, mode="exact")
            mc = omniscient_matching(g, model, trials=4000, base_seed=rng.getrandbits(32), mode="monte-carlo")
            assert abs(mc.mean - exact.mean) <= 4 * max(mc.se, 1e-9)

    def test_auto_mode_selection(self):
        g = Graph(2, [(0, 1)])
        assert omniscient_matching(g, ProbModel.uniform(0.5)).mode == "exact-enumeration"
        big = gen_complete_bipartite(5)
        assert (
            omniscient_matching(big, ProbModel.uniform(0.5), trials=50).mode
            == "monte-carlo"
        )


class TestOmniscientKset:
    def test_single_set(self):
        inst = KSetInstance(2, [(0, 1)], 2)
        assert omniscient_kset(inst, 0.3, mode="exact").mean == pytest.approx(0.3)

    def test_two_disjoint_sets(self):
        inst = KSetInstance(4, [(0, 1), (2, 3)], 2)
        assert omniscient_kset(inst, 0.3, mode="exact").mean == pytest.approx(0.6)

    def test_triangle_as_sets_mirrors_k3(self):
        inst = KSetInstance(3, [(0, 1), (1, 2), (0, 2)], 2)
        assert omniscient_kset(inst, 0.5, mode="exact").mean == pytest.approx(0.875)

    def test_mc_close_to_exact(self):
        inst = KSetInstance(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)], 2)
        exact = omniscient_kset(inst, 0.5, mode="exact")
        mc = omniscient_kset(inst, 0.5, trials=4000, base_seed=5, mode="monte-carlo")
        assert abs(mc.mean - exact.mean) <= 4 * mc.se

    def test_needs_probs(self):
        inst = KSetInstance(2, [(0, 1)], 2)
        with pytest.raises(ValueError):
            omniscient_kset(inst)


class TestEvaluate:
    def test_query_all_reference_is_one(self):
        # m > 16 forces paired Monte Carlo, where query-all equals the
        # omniscient side trial by trial
        g = gen_disjoint_edges(40)
        rec = evaluate("query-all", g, ProbModel.uniform(0.5), 1, 400, 9)
        assert rec.ratio == pytest.approx(1.0, abs=1e-9)

    def test_single_baseline_ratio_tends_to_p(self):
        # on a dense instance with a perfect matching the one-matching
        # baseline keeps about a p fraction of the omniscient optimum
        g = gen_complete_bipartite(12)
        p = 0.4
        rec = evaluate("single", g, ProbModel.uniform(p), 1, 500, 3)
        assert rec.ratio == pytest.approx(p / 0.95, abs=0.05)

    def test_single_baseline_expected_size_on_disjoint_edges(self):
        g = gen_disjoint_edges(40)
        p = 0.4
        rec = evaluate("single", g, ProbModel.uniform(p), 1, 800, 3)
        assert rec.alg_mean == pytest.approx(p * 20, rel=0.08)
        assert rec.ratio == pytest.approx(1.0, abs=1e-9)

    def test_ratio_monotone_in_R(self):
        g = gen_complete_bipartite(6)
        model = ProbModel.uniform(0.4)
        recs = [evaluate("nonadaptive", g, model, R, 400, 17) for R in (1, 2, 4)]
        for a, b in zip(recs, recs[1:]):
            assert b.ratio >= a.ratio - 2 * (a.ci + b.ci)

    def test_exact_mode_for_small_graphs(self):
        g = Graph(2, [(0, 1)])
        rec = evaluate("adaptive", g, ProbModel.uniform(0.5), 1, 2000, 5)
        assert rec.omni_se == 0.0
        assert rec.omni_mean == pytest.approx(0.5)
        assert rec.ratio == pytest.approx(1.0, abs=0.06)

    def test_unknown_algorithm(self):
        with pytest.raises(ValueError):
            evaluate("nope", K3, ProbModel.uniform(0.5), 1, 10, 1)

    def test_budget_recorded(self):
        g = gen_complete_bipartite(6)
        rec = evaluate("adaptive", g, ProbModel.uniform(0.5), 3, 50, 2)
        assert 1 <= rec.budget_max <= 3

    def test_algorithms_run_under_vertex_param_model(self):
        # the correlated-probability model changes only the sampling side
        from stochmatch.stochastic import sample_vertex_params

        g = gen_complete_bipartite(6)
        model = sample_vertex_params(g.n, "uniform01", 11)
        for alg, R in (("adaptive", 3), ("nonadaptive", 3), ("single", 1)):
            rec = evaluate(alg, g, model, R, 60, 4)
            assert 0.0 <= rec.ratio <= 1.0 + 3 * rec.ci
            assert rec.budget_max <= R


class TestPairedRatio:
    def test_identical_series_ratio_one(self):
        r, ci = paired_ratio([2, 3, 4, 5], [2, 3, 4, 5])
        assert r == pytest.approx(1.0)
        assert ci == pytest.approx(0.0, abs=1e-6)

    def test_zero_omniscient(self):
        r, ci = paired_ratio([0, 0], [0, 0])
        assert math.isnan(r)


class TestGenerators:
    def test_disjoint_edges(self):
        g = gen_disjoint_edges(100)
        assert g.n == 100 and g.m == 50
        with pytest.raises(ValueError):
            gen_disjoint_edges(7)

    def test_complete_bipartite_counts(self):
        g = gen_complete_bipartite(7)
        assert g.n == 14 and g.m == 49
        with pytest.raises(ValueError):
            gen_complete_bipartite(0)

    def test_erdos_renyi_degree(self):
        degs = []
        for seed in range(30):
            g = gen_erdos_renyi(60, 5.0, seed)
            degs.append(2 * g.m / g.n)
        assert np.mean(degs) == pytest.approx(5.0, abs=0.5)
        with pytest.raises(ValueError):
            gen_erdos_renyi(0, 2.0, 1)

    def test_example31_structure(self):
        g = gen_example31(4, 1, seed=2)
        assert g.n == 12 and g.m == 2 + 4 + 8
        cls = g.meta["classes"]
        assert len(cls["A"]) == len(cls["B"]) == 2
        assert len(cls["C"]) == len(cls["D"]) == 4
        with pytest.raises(ValueError):
            gen_example31(5, 1, seed=2)

    def test_example31_complete_bc(self):
        g = gen_example31(8, 2, seed=3)
        cls = g.meta["classes"]
        b, c = set(cls["B"]), set(cls["C"])
        bc = sum(
            1
            for i in range(g.m)
            if {int(g.edge_u[i]), int(g.edge_v[i])} <= (b | c)
            and len({int(g.edge_u[i]), int(g.edge_v[i])} & b) == 1
        )
        assert bc == len(b) * len(c)

    def test_figure3_structure(self):
        t = 10
        g = gen_figure3(t)
        assert g.n == 3 * t and g.m == t + t * t
        cls = g.meta["classes"]
        assert len(cls["A"]) == len(cls["D"]) == t // 2
        assert len(cls["B1"]) == len(cls["B2"]) == t // 2
        with pytest.raises(ValueError):
            gen_figure3(9)

    def test_appendixA_structure(self):
        t, beta = 16, 0.75
        a = int(t**beta)
        g = gen_appendixA(t, beta)
        assert g.n == 2 * t + 2 * a
        assert g.m == t + 2 * a * t
        with pytest.raises(ValueError):
            gen_appendixA(16, 1.5)
        with pytest.raises(ValueError):
            gen_appendixA(16, 0.0)


class TestFigure3Selector:
    def test_round_one_matches_construction(self):
        t = 8
        g = gen_figure3(t)
        sel = figure3_selector(g)
        cls = g.meta["classes"]
        ids = sel(0, g, frozenset())
        pairs = {tuple(sorted(g.edge(e))) for e in ids}
        expect = set()
        for i in range(t // 2):
            expect.add(tuple(sorted((cls["B1"][i], cls["C1"][i]))))
            expect.add(tuple(sorted((cls["A"][i], cls["B2"][i]))))
            expect.add(tuple(sorted((cls["C2"][i], cls["D"][i]))))
        assert pairs == expect

    def test_schedule_is_valid_throughout(self):
        t, R = 12, 6
        g = gen_figure3(t)
        ids = nonadaptive_select_strategic(g, R, figure3_selector(g))
        # the whole B-C matching plus one A-side and one D-side pm per round
        assert len(ids) == t + R * t


class TestSubadditivityMatching:
    def test_single_partition(self):
        g = Graph(4, [(0, 1), (1, 2), (2, 3)])
        assert matching_subadditivity_check(g, ProbModel.uniform(0.5), [0, 2])

    def test_all_partitions_random_graphs(self, rng):
        for _ in range(15):
            g = random_graph(rng, 8, edge_cap=10)
            if g.m == 0:
                continue
            p = rng.choice([0.3, 0.5, 0.9])
            assert matching_subadditivity_all(g, ProbModel.uniform(p)) == 0


class TestCsv:
    def test_header_and_determinism(self):
        g = gen_disjoint_edges(6)
        rec = evaluate("single", g, ProbModel.uniform(0.5), 1, 50, 4, family="disjoint-edges")
        text1 = format_csv([rec], header_comments=["cfg=x"])
        text2 = format_csv([rec], header_comments=["cfg=x"])
        assert text1 == text2
        lines = text1.strip().splitlines()
        assert lines[0] == "# cfg=x"
        assert lines[1] == ",".join(CSV_COLUMNS)
        assert lines[2].startswith("disjoint-edges,")
