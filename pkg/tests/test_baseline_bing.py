import random

import pytest

from taxoquest.fixtures import demo_hierarchy
from taxoquest.hierarchy import Hierarchy
from taxoquest.oracle import TargetSet, TruthfulOracle
from taxoquest.penalty import set_penalty
from taxoquest.session import MULTI, SINGLE, init_session, apply_answer
from taxoquest.engines import BingEngine, KbmDpEngine, run_session
from taxoquest.baseline_bing import bing_next_question_multi, bing_next_question_single

from conftest import random_targets, random_tree


def star(n):
    return Hierarchy([None] + [0] * (n - 1), [f"s{i}" for i in range(n)])


def chain(n):
    return Hierarchy([None] + list(range(n - 1)), [f"c{i}" for i in range(n)])


def complete_binary(levels):
    parent = [None]
    for v in range(1, 2 ** levels - 1):
        parent.append((v - 1) // 2)
    return Hierarchy(parent, [f"b{i}" for i in range(len(parent))])


class TestSingleVariant:
    def test_star_worst_case(self):
        # Root target on a star: every question can only eliminate one leaf,
        # so exactness costs n - 1 questions.
        h = star(12)
        targets = TargetSet(frozenset([h.root]))
        res = run_session(h, BingEngine(h, 1, SINGLE),
                          TruthfulOracle(h, targets), b=50, k=1)
        assert res.questions_asked == h.n - 1
        assert res.selection.members == (h.root,)
        assert set_penalty(h, res.selection.members, [h.root]) == 0

    def test_balanced_tree_splits_evenly(self):
        h = complete_binary(4)          # 15 vertices
        st = init_session(h, SINGLE, 10, 1)
        q = bing_next_question_single(h, st)
        assert h.parent[q] == h.root    # subtree of 7 vs rest of 8

    def test_demo_exact_search(self):
        h = demo_hierarchy()
        targets = TargetSet(frozenset([h.id_of("v5")]))
        res = run_session(h, BingEngine(h, 1, SINGLE),
                          TruthfulOracle(h, targets), b=50, k=1)
        assert res.questions_asked <= h.n
        assert res.selection.members == (h.id_of("v5"),)

    @pytest.mark.parametrize("seed", range(8))
    def test_always_terminates_exactly(self, seed):
        rng = random.Random(seed)
        h = random_tree(rng, rng.randint(2, 40))
        t = rng.randrange(h.n)
        res = run_session(h, BingEngine(h, 1, SINGLE),
                          TruthfulOracle(h, TargetSet(frozenset([t]))),
                          b=h.n, k=1)
        assert res.state.p_vertices() == [t]
        assert res.selection.members == (t,)

    @pytest.mark.parametrize("seed", range(6))
    def test_realized_pruning_meets_guarantee(self, seed):
        rng = random.Random(100 + seed)
        h = random_tree(rng, 30)
        t = rng.randrange(h.n)
        oracle = TruthfulOracle(h, TargetSet(frozenset([t])))
        st = init_session(h, SINGLE, 30, 1)
        from taxoquest.algo_dp import subtree_p_counts
        while not st.terminated:
            counts = subtree_p_counts(h, st).tolist()
            q = bing_next_question_single(h, st, counts)
            guaranteed = min(counts[q], st.p_size - counts[q])
            before = st.p_size
            apply_answer(st, h, q, oracle(q))
            assert before - st.p_size >= guaranteed


class TestMultiVariant:
    def test_chain_balances_path_against_subtree(self):
        h = chain(9)
        st = init_session(h, MULTI, 10, 2)
        q = bing_next_question_multi(h, st)
        # min(#above, #below-incl-self) peaks at the middle of the chain;
        # the deeper of the two middle candidates wins the tie.
        assert min(q, 9 - q) == 4

    def test_empty_pool_raises(self):
        h = chain(2)
        st = init_session(h, MULTI, 5, 1)
        from taxoquest.oracle import Answer
        apply_answer(st, h, 1, Answer.NO)
        with pytest.raises(ValueError):
            bing_next_question_multi(h, st)

    def test_demo_not_better_than_exact_engine(self):
        h = demo_hierarchy()
        targets = TargetSet.create(h, [h.id_of("v5"), h.id_of("v8")])
        res_bing = run_session(h, BingEngine(h, 2, MULTI),
                               TruthfulOracle(h, targets), b=10, k=2)
        res_dp = run_session(h, KbmDpEngine(h, 2),
                             TruthfulOracle(h, targets), b=10, k=2)
        t = list(targets.members)
        assert set_penalty(h, res_dp.selection.members, t) <= \
            set_penalty(h, res_bing.selection.members, t)

    @pytest.mark.parametrize("seed", range(6))
    def test_sessions_run_clean(self, seed):
        rng = random.Random(200 + seed)
        h = random_tree(rng, rng.randint(3, 40))
        targets = random_targets(rng, h, 3)
        res = run_session(h, BingEngine(h, 3, MULTI),
                          TruthfulOracle(h, targets), b=15, k=3)
        assert len(res.selection.members) <= 3
