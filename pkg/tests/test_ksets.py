import random

import numpy as np
import pytest

from stochmatch.errors import InstanceTooLargeError
from stochmatch.graph import Graph, max_matching
from stochmatch.ksets import (
    AugStructure,
    KSetInstance,
    Packing,
    adaptive_kset,
    find_aug_structures,
    format_kset,
    greedy_packing,
    hs_guarantee,
    kset_subadditivity_all,
    kset_subadditivity_check,
    lemma_count_bound,
    local_search_packing,
    nonadaptive_kset,
    nonadaptive_kset_select,
    packing_oracle,
    parse_kset_text,
)
from stochmatch.matching import adaptive_match
from stochmatch.stochastic import (
    EdgeOracle,
    Realization,
    SetOracle,
    sample_set_realization,
    trial_seed,
)

# greedy takes the big set; the optimum swaps it for the two 2-sets
ESCAPE3 = KSetInstance(5, [(0, 1, 2), (2, 3, 4), (0, 3), (1, 4)], 3)


def random_instance(rng: random.Random, k: int, max_sets: int, n_elements: int | None = None):
    n = n_elements or rng.randint(k + 1, 3 * k + 4)
    target = rng.randint(1, max_sets)
    seen = set()
    sets = []
    for _ in range(target * 4):
        size = rng.randint(1, k)
        if size > n:
            continue
        s = tuple(sorted(rng.sample(range(n), size)))
        if s not in seen:
            seen.add(s)
            sets.append(s)
        if len(sets) == target:
            break
    if not sets:
        sets = [(0,)]
    return KSetInstance(n, sets, k)


def set_oracle(inst, bits) -> SetOracle:
    return SetOracle(list(inst.sets), inst.n_elements, Realization(np.asarray(bits, dtype=bool)))


class TestKSetInstance:
    def test_validation(self):
        with pytest.raises(ValueError):
            KSetInstance(3, [(0, 1, 2)], 2)  # exceeds k
        with pytest.raises(ValueError):
            KSetInstance(3, [(0, 0)], 2)  # repeated element
        with pytest.raises(ValueError):
            KSetInstance(2, [(0, 2)], 2)  # out of range
        with pytest.raises(ValueError):
            KSetInstance(3, [()], 2)  # empty set
        with pytest.raises(ValueError):
            KSetInstance(3, [(0, 1), (1, 0)], 2)  # duplicate

    def test_duplicates_opt_in(self):
        inst = KSetInstance(3, [(0, 1), (0, 1)], 2, allow_duplicates=True)
        assert inst.size == 2
        assert packing_oracle(inst).size == 1

    def test_by_element(self):
        inst = KSetInstance(4, [(0, 1), (1, 2), (3,)], 2)
        assert inst.by_element == [[0], [0, 1], [1], [2]]


class TestPackingOracle:
    def test_disjoint_pair(self):
        inst = KSetInstance(4, [(0, 1), (2, 3)], 2)
        assert sorted(packing_oracle(inst).sets) == [0, 1]

    def test_triangle_two_sets(self):
        inst = KSetInstance(3, [(0, 1), (1, 2), (0, 2)], 2)
        assert packing_oracle(inst).size == 1

    def test_escapes_greedy(self):
        assert sorted(packing_oracle(ESCAPE3).sets) == [2, 3]

    def test_too_large(self):
        inst = KSetInstance(30, [(i,) for i in range(25)], 1)
        with pytest.raises(InstanceTooLargeError):
            packing_oracle(inst)


class TestLocalSearch:
    def test_small_instances_reach_optimum(self, rng):
        for _ in range(100):
            inst = random_instance(rng, rng.choice([2, 3]), 4)
            got = local_search_packing(inst, 4)
            assert got.size == packing_oracle(inst).size

    def test_escape3_with_s2(self):
        assert sorted(local_search_packing(ESCAPE3, 2).sets) == [2, 3]

    def test_s1_equals_greedy_for_pairs(self, rng):
        for _ in range(50):
            inst = random_instance(rng, 2, 10)
            assert local_search_packing(inst, 1).sets == frozenset(greedy_packing(inst))

    def test_k2_unrestricted_matches_graph_matching(self, rng):
        # |A| <= 8 so any augmenting path fits in 4 added sets
        for _ in range(80):
            n = rng.randint(3, 8)
            pairs = sorted(
                {
                    tuple(sorted(rng.sample(range(n), 2)))
                    for _ in range(rng.randint(1, 8))
                }
            )[:8]
            inst = KSetInstance(n, pairs, 2)
            g = Graph(n, pairs)
            assert local_search_packing(inst, 4).size == max_matching(g).size

    def test_guarantee_table(self):
        assert hs_guarantee(1, 2) == (0.5, 0.5)
        assert hs_guarantee(3, 2) == (0.75, 0.25)
        ratio, eta = hs_guarantee(2, 3)
        assert ratio == 0.5 and eta == pytest.approx(2 / 3 - 0.5)

    def test_ratio_guarantee_fuzz(self, rng):
        for _ in range(120):
            k = rng.choice([2, 3])
            s = rng.choice([1, 2, 3])
            inst = random_instance(rng, k, 12)
            got = local_search_packing(inst, s)
            ratio, _ = hs_guarantee(s, k)
            opt = packing_oracle(inst).size
            assert got.size >= ratio * opt - 1e-9
            # local optimality: no structure of size <= s remains
            assert find_aug_structures(inst, got, s) == []

    def test_rejects_bad_s(self):
        with pytest.raises(ValueError):
            local_search_packing(ESCAPE3, 0)
        with pytest.raises(ValueError):
            local_search_packing(ESCAPE3, 5)


class TestFindAugStructures:
    def test_empty_packing_disjoint_sets(self):
        inst = KSetInstance(6, [(0, 1), (2, 3), (4, 5)], 2)
        sts = find_aug_structures(inst, Packing(frozenset()), 1)
        assert [st.add for st in sts] == [(0,), (1,), (2,)]
        assert all(st.remove == () for st in sts)

    def test_empty_at_optimum(self):
        inst = KSetInstance(4, [(0, 1), (2, 3)], 2)
        best = packing_oracle(inst)
        assert find_aug_structures(inst, best, 4) == []

    def test_escape_structure(self):
        sts = find_aug_structures(ESCAPE3, Packing(frozenset({0})), 2)
        assert sts == [AugStructure(add=(2, 3), remove=(0,))]

    def test_structures_are_disjoint_and_augmenting(self, rng):
        for _ in range(120):
            k = rng.choice([2, 3])
            inst = random_instance(rng, k, 12)
            b = frozenset(greedy_packing(inst, order=rng.sample(range(inst.size), inst.size)))
            drop = frozenset(x for x in b if rng.random() < 0.5)
            b = b - drop
            s = rng.choice([1, 2, 3])
            sts = find_aug_structures(inst, Packing(b), s)
            seen_sets: set[int] = set()
            seen_elems: set[int] = set()
            cur = set(b)
            for st in sts:
                assert len(st.add) <= s and len(st.remove) <= s
                assert len(st.add) > len(st.remove)
                assert not (set(st.add) & seen_sets)
                elems = {x for sid in st.add for x in inst.sets[sid]}
                assert not (elems & seen_elems)
                seen_sets |= set(st.add)
                seen_elems |= elems
                new = (cur - set(st.remove)) | set(st.add)
                assert len(new) > len(cur)
                Packing(frozenset(new)).validate(inst)
                cur = new

    def test_lemma_count_bound(self, rng):
        for _ in range(120):
            k = rng.choice([2, 3])
            s = rng.choice([1, 2, 3])
            inst = random_instance(rng, k, 12)
            opt = packing_oracle(inst).size
            b = frozenset(
                sid for sid in greedy_packing(inst) if rng.random() < 0.6
            )
            sts = find_aug_structures(inst, Packing(b), s)
            assert len(sts) >= lemma_count_bound(opt, len(b), k, s)


class TestAdaptiveKset:
    def test_single_set(self):
        inst = KSetInstance(2, [(0, 1)], 2)
        rep = adaptive_kset(inst, set_oracle(inst, [True]), 1, s=2)
        assert rep.size == 1

    def test_zero_rounds(self):
        inst = KSetInstance(2, [(0, 1)], 2)
        rep = adaptive_kset(inst, set_oracle(inst, [True]), 0, s=2)
        assert rep.size == 0

    def test_element_budget(self, rng):
        for _ in range(60):
            inst = random_instance(rng, rng.choice([2, 3]), 10)
            R = rng.randint(1, 4)
            bits = [rng.random() < 0.6 for _ in range(inst.size)]
            oracle = set_oracle(inst, bits)
            rep = adaptive_kset(inst, oracle, R, s=rng.choice([1, 2, 3]))
            assert rep.budget_max <= R
            assert all(a <= b for a, b in zip(rep.trace, rep.trace[1:]))
            rep.final.validate(inst)
            for sid in rep.final.sets:
                assert oracle.known(sid) is True

    def test_all_or_nothing_vs_matching_recompute(self):
        # path a-b-c-d-e-f as 2-sets; realization kills (0,1) and (4,5)
        pairs = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]
        inst = KSetInstance(6, pairs, 2)
        g = Graph(6, pairs)
        bits = np.array([False, True, True, True, False])
        # the packing route with s=1 cannot trade set 2 for sets 1 and 3
        rep_k = adaptive_kset(inst, set_oracle(inst, bits), 2, s=1)
        assert sorted(rep_k.final.sets) == [2]
        # the matching route re-solves over everything known to exist
        rep_m = adaptive_match(g, EdgeOracle(g, Realization(bits.copy())), 2)
        assert rep_m.size == 2
        # with s=2 the packing route finds the swap too
        rep_k2 = adaptive_kset(inst, set_oracle(inst, bits), 2, s=2)
        assert rep_k2.size == 2


class TestNonadaptiveKset:
    def test_selection_is_query_free_and_disjoint(self, rng):
        for _ in range(40):
            inst = random_instance(rng, rng.choice([2, 3]), 12)
            R = rng.randint(1, 4)
            plan = nonadaptive_kset_select(inst, R, s=2)
            again = nonadaptive_kset_select(inst, R, s=2)
            assert plan == again
            flat = [sid for o in plan for sid in o]
            assert len(flat) == len(set(flat))
            counts = [0] * inst.n_elements
            for o in plan:
                for sid in o:
                    for x in inst.sets[sid]:
                        counts[x] += 1
            assert max(counts, default=0) <= R

    def test_single_round_keeps_existing(self):
        inst = KSetInstance(4, [(0, 1), (2, 3)], 2)
        rep = nonadaptive_kset(inst, set_oracle(inst, [True, False]), 1, s=2)
        assert sorted(rep.final.sets) == [0]

    def test_all_exist_reaches_local_optimum(self):
        inst = KSetInstance(6, [(0, 1), (2, 3), (4, 5)], 2)
        rep = nonadaptive_kset(inst, set_oracle(inst, [True] * 3), 2, s=2)
        assert rep.size == 3

    def test_budget(self, rng):
        for _ in range(40):
            inst = random_instance(rng, rng.choice([2, 3]), 10)
            R = rng.randint(1, 4)
            bits = [rng.random() < 0.5 for _ in range(inst.size)]
            oracle = set_oracle(inst, bits)
            rep = nonadaptive_kset(inst, oracle, R, s=2)
            assert rep.budget_max <= R
            rep.final.validate(inst)

    def test_k4_theorem5_ratio(self):
        # K4 as 2-sets; exact omniscient by enumeration; Theorem-5 bound at
        # k=2 with eta=0.1 is 0.45
        from stochmatch.bench import omniscient_kset

        g = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
        inst = KSetInstance.from_graph(g)
        omni = omniscient_kset(inst, 0.5, mode="exact")
        total = 0
        trials = 10_000
        for t in range(trials):
            bits = sample_set_realization([0.5] * 6, trial_seed(77, t))
            rep = nonadaptive_kset(inst, set_oracle(inst, bits.bits), 3, s=2)
            total += rep.size
        ratio = (total / trials) / omni.mean
        assert ratio >= 0.5 * (1 - 0.1)


class TestSubadditivity:
    def test_whole_collection_partition(self):
        inst = KSetInstance(4, [(0, 1), (2, 3), (0, 2)], 2)
        assert kset_subadditivity_check(inst, 0.5, [0, 1, 2])

    def test_deterministic_probability_one(self):
        inst = KSetInstance(4, [(0, 1), (1, 2), (2, 3)], 2)
        assert kset_subadditivity_check(inst, 1.0, [0])

    def test_all_partitions_random_instances(self, rng):
        for _ in range(20):
            inst = random_instance(rng, 2, 6)
            assert kset_subadditivity_all(inst, 0.5) == 0


class TestKsetFiles:
    def test_roundtrip(self):
        inst = KSetInstance(5, [(0, 1, 2), (3, 4)], 3, probs=[0.25, 0.5])
        inst2 = parse_kset_text(format_kset(inst))
        assert inst2.sets == inst.sets and inst2.k == 3
        assert np.allclose(inst2.probs, [0.25, 0.5])

    def test_roundtrip_without_probs(self):
        inst = KSetInstance(4, [(0, 1), (2, 3)], 2)
        inst2 = parse_kset_text(format_kset(inst))
        assert inst2.sets == inst.sets and inst2.probs is None

    def test_rejects_mixed_probability_lines(self):
        with pytest.raises(ValueError):
            parse_kset_text("4 2 2\n0 1 0.5\n2 3\n")
