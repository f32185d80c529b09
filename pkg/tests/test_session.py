import json
import random

import pytest

from taxoquest.fixtures import demo_hierarchy
from taxoquest.hierarchy import Hierarchy
from taxoquest.oracle import Answer, TruthfulOracle
from taxoquest.penalty import set_penalty
from taxoquest.session import (
    MULTI, SINGLE, SessionError, apply_answer, export_log, finalize_selection,
    init_session,
)

from conftest import play_random_session, random_targets, random_tree


@pytest.fixture
def demo():
    return demo_hierarchy()


class TestInit:
    def test_single_uniform_prior(self, demo):
        st = init_session(demo, SINGLE, 2, 1)
        assert all(abs(p - 0.1) < 1e-12 for p in st.pr)
        assert st.p_size == 10
        assert st.y_vertices() == [demo.root]
        assert not st.terminated

    def test_multi_prior_scales_with_k(self, demo):
        st = init_session(demo, MULTI, 2, 2)
        assert all(abs(p - 0.2) < 1e-12 for p in st.pr)

    def test_single_forces_k1(self, demo):
        st = init_session(demo, SINGLE, 2, 5)
        assert st.k == 1

    def test_single_vertex_tree_terminates_at_birth(self):
        h = Hierarchy([None], ["root"])
        st = init_session(h, MULTI, 3, 1)
        assert st.terminated
        sel = finalize_selection(st, h)
        assert sel.members == (h.root,)

    def test_k_too_large(self, demo):
        with pytest.raises(ValueError):
            init_session(demo, MULTI, 2, 11)

    def test_bad_budget(self, demo):
        with pytest.raises(ValueError):
            init_session(demo, MULTI, 0, 1)


class TestSingleRules:
    def test_no_prunes_subtree(self, demo):
        st = init_session(demo, SINGLE, 2, 1)
        apply_answer(st, demo, demo.id_of("v3"), Answer.NO)
        survivors = {demo.label[v] for v in st.p_vertices()}
        assert survivors == {"v0", "v1", "v2", "v4", "v5", "v9"}
        for v in st.p_vertices():
            assert abs(st.pr[v] - 1 / 6) < 1e-12
        assert st.anchor == demo.root

    def test_yes_restricts_to_subtree_and_moves_anchor(self, demo):
        st = init_session(demo, SINGLE, 2, 1)
        v1 = demo.id_of("v1")
        apply_answer(st, demo, v1, Answer.YES)
        assert st.anchor == v1
        assert st.y_vertices() == [v1]
        assert set(st.p_vertices()) == set(demo.subtree_vertices(v1))


class TestMultiRules:
    def test_yes_prunes_strict_ancestors(self, demo):
        st = init_session(demo, MULTI, 2, 2)
        v3 = demo.id_of("v3")
        apply_answer(st, demo, v3, Answer.YES)
        gone = {demo.label[v] for v in range(10) if not st.p_member[v]}
        assert gone == {"v0", "v1"}
        assert {demo.label[v] for v in st.y_vertices()} == {"v0", "v1", "v3"}
        for v in st.p_vertices():
            assert abs(st.pr[v] - 0.25) < 1e-12

    def test_yes_at_leaf_prunes_only_path(self, demo):
        st = init_session(demo, MULTI, 2, 2)
        v9 = demo.id_of("v9")
        apply_answer(st, demo, v9, Answer.YES)
        gone = {demo.label[v] for v in range(10) if not st.p_member[v]}
        assert gone == {"v0", "v1", "v5"}
        assert st.p_member[v9]

    def test_second_yes_with_no_new_pruning_keeps_pr(self, demo):
        st = init_session(demo, MULTI, 3, 2)
        apply_answer(st, demo, demo.id_of("v3"), Answer.YES)
        before = list(st.pr)
        apply_answer(st, demo, demo.id_of("v5"), Answer.YES)
        assert st.pr == before

    def test_probability_clamp(self):
        # Chain r -> a -> b with k = 2: after pruning to one potential
        # target the scaled probability would exceed 1 and must clamp.
        h = Hierarchy([None, 0, 1], ["r", "a", "b"])
        st = init_session(h, MULTI, 3, 2)
        apply_answer(st, h, 2, Answer.YES)   # b certain-ish, prunes r, a
        assert st.p_vertices() == [2]
        assert st.pr[2] == 1.0


class TestGuards:
    def test_question_must_be_in_pool(self, demo):
        st = init_session(demo, SINGLE, 2, 1)
        with pytest.raises(SessionError):
            apply_answer(st, demo, demo.root, Answer.YES)   # root is in Y
        apply_answer(st, demo, demo.id_of("v3"), Answer.NO)
        with pytest.raises(SessionError):
            apply_answer(st, demo, demo.id_of("v6"), Answer.NO)  # evicted

    def test_budget_exhaustion_terminates(self, demo):
        st = init_session(demo, MULTI, 1, 2)
        apply_answer(st, demo, demo.id_of("v3"), Answer.NO)
        assert st.terminated
        assert st.budget_remaining == 0
        with pytest.raises(SessionError):
            apply_answer(st, demo, demo.id_of("v2"), Answer.NO)

    def test_log_length_bounded_by_budget(self, demo, rng):
        for _ in range(20):
            b = rng.randint(1, 6)
            st = init_session(demo, MULTI, b, 2)
            while not st.terminated:
                pool = st.pool()
                q = pool[rng.randrange(len(pool))]
                apply_answer(st, demo, q, rng.choice([Answer.YES, Answer.NO]))
            assert len(st.log) <= b


class TestInvariantsUnderTruthfulPlay:
    @pytest.mark.parametrize("seed", range(10))
    def test_multi_invariants(self, seed):
        rng = random.Random(seed)
        h = random_tree(rng, rng.randint(2, 40))
        targets = random_targets(rng, h, 3)
        prev_p, prev_y = None, None
        for st in play_random_session(h, targets, MULTI, 50, 3, rng):
            p = set(st.p_vertices())
            y = set(st.y_vertices())
            assert y & p or st.p_size == 0, "confirmed and potential sets must meet"
            assert targets.members <= p
            if prev_p is not None:
                assert p <= prev_p
                assert y >= prev_y
            prev_p, prev_y = p, y

    @pytest.mark.parametrize("seed", range(10))
    def test_single_probability_mass(self, seed):
        rng = random.Random(100 + seed)
        h = random_tree(rng, rng.randint(2, 40))
        targets = random_targets(rng, h, 1)
        for st in play_random_session(h, targets, SINGLE, 50, 1, rng):
            assert abs(sum(st.pr) - 1.0) < 1e-9

    @pytest.mark.parametrize("seed", range(6))
    def test_no_answer_empties_subtree(self, seed):
        rng = random.Random(200 + seed)
        h = random_tree(rng, 30)
        targets = random_targets(rng, h, 2)
        oracle = TruthfulOracle(h, targets)
        st = init_session(h, MULTI, 30, 2)
        while not st.terminated:
            pool = st.pool()
            q = pool[rng.randrange(len(pool))]
            ans = oracle(q)
            apply_answer(st, h, q, ans)
            if ans is Answer.NO:
                assert all(not st.p_member[u] for u in h.subtree_vertices(q))
            else:
                w = h.parent[q]
                while w is not None:
                    assert not st.p_member[w]
                    w = h.parent[w]


class TestFinalize:
    def test_root_only_session(self, demo):
        st = init_session(demo, MULTI, 1, 2)
        apply_answer(st, demo, demo.id_of("v2"), Answer.NO)
        sel = finalize_selection(st, demo)
        assert sel.members == (demo.root,)

    def test_demo_walkthrough(self, demo):
        st = init_session(demo, MULTI, 2, 2)
        apply_answer(st, demo, demo.id_of("v3"), Answer.YES)
        apply_answer(st, demo, demo.id_of("v5"), Answer.YES)
        sel = finalize_selection(st, demo)
        assert {demo.label[v] for v in sel.members} == {"v3", "v5"}
        targets = [demo.id_of("v5"), demo.id_of("v8")]
        assert set_penalty(demo, sel.members, targets) == 1

    def test_single_returns_anchor(self, demo):
        st = init_session(demo, SINGLE, 2, 1)
        apply_answer(st, demo, demo.id_of("v1"), Answer.YES)
        sel = finalize_selection(st, demo)
        assert sel.members == (demo.id_of("v1"),)


class TestLogExport:
    def test_jsonl_shape(self, demo):
        st = init_session(demo, MULTI, 2, 2)
        apply_answer(st, demo, demo.id_of("v3"), Answer.YES)
        lines = export_log(st, demo).splitlines()
        assert len(lines) == 1
        rec = json.loads(lines[0])
        assert rec["q"] == "v3"
        assert rec["answer"] == "Yes"
        assert rec["p_size"] == 8
        assert rec["y_size"] == 3
        assert rec["penalty_so_far"] == 8

    def test_penalties_filled_by_replay(self, demo):
        st = init_session(demo, MULTI, 2, 2)
        apply_answer(st, demo, demo.id_of("v3"), Answer.YES)
        apply_answer(st, demo, demo.id_of("v5"), Answer.YES)
        recs = [json.loads(x) for x in export_log(st, demo).splitlines()]
        assert [r["penalty_so_far"] for r in recs] == [8, 7]

    def test_single_mode_penalty_is_anchor_cover(self, demo):
        st = init_session(demo, SINGLE, 2, 1)
        apply_answer(st, demo, demo.id_of("v3"), Answer.NO)
        rec = json.loads(export_log(st, demo).splitlines()[0])
        assert rec["penalty_so_far"] == 9     # depths of the six survivors
