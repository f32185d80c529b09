import random

import pytest

from taxoquest import fixtures
from taxoquest.fixtures import demo_hierarchy
from taxoquest.hierarchy import Hierarchy
from taxoquest.oracle import Answer
from taxoquest.algo_single import dfs_gain_all, naive_gain_single, stbis_next_question
from taxoquest.session import SINGLE, apply_answer, init_session

from conftest import play_random_session, random_targets, random_tree


@pytest.fixture
def demo():
    return demo_hierarchy()


def fresh_single(demo, b=2):
    return init_session(demo, SINGLE, b, 1)


class TestReferenceRound1:
    def test_all_rows(self, demo):
        comp = dfs_gain_all(demo, fresh_single(demo))
        ref = fixtures.SINGLE_ROUND1
        for lab, expect in ref["g_yes"].items():
            row = comp.rows[demo.id_of(lab)]
            assert row.g_yes == expect
            assert row.g_no == ref["g_no"][lab]
            assert abs(row.p_yes - ref["p_yes"][lab]) < 1e-9
            assert abs(row.p_no - ref["p_no"][lab]) < 1e-9
            assert abs(row.gain - ref["gain"][lab]) < fixtures.CELL_TOLERANCE

    def test_first_question(self, demo):
        assert demo.label[stbis_next_question(demo, fresh_single(demo))] == \
            fixtures.SINGLE_QUESTION1


class TestReferenceRound2:
    def test_gains_after_no(self, demo):
        st = fresh_single(demo)
        apply_answer(st, demo, demo.id_of(fixtures.SINGLE_QUESTION1), Answer.NO)
        comp = dfs_gain_all(demo, st)
        for lab, expect in fixtures.SINGLE_ROUND2_GAIN.items():
            row = comp.rows[demo.id_of(lab)]
            assert abs(row.gain - expect) < fixtures.CELL_TOLERANCE
        for lab in fixtures.SINGLE_ROUND2_PRUNED:
            assert demo.id_of(lab) not in comp.rows

    def test_tie_breaks_to_deeper(self, demo):
        # v1 and v5 tie exactly in round two; the deeper candidate wins.
        st = fresh_single(demo)
        apply_answer(st, demo, demo.id_of(fixtures.SINGLE_QUESTION1), Answer.NO)
        assert demo.label[stbis_next_question(demo, st)] == fixtures.SINGLE_QUESTION2


class TestNaiveOracle:
    def test_reference_cells(self, demo):
        st = fresh_single(demo)
        row = naive_gain_single(demo, st, demo.id_of("v2"))
        assert row.g_yes == 20
        assert row.g_no == 1

    def test_leaf_probability_is_prior(self, demo):
        st = fresh_single(demo)
        row = naive_gain_single(demo, st, demo.id_of("v9"))
        assert abs(row.p_yes - st.pr[demo.id_of("v9")]) < 1e-12
        assert row.pool_after_yes == 1

    @pytest.mark.parametrize("seed", range(12))
    def test_dfs_equals_naive_everywhere(self, seed):
        rng = random.Random(seed)
        h = random_tree(rng, rng.randint(2, 40))
        targets = random_targets(rng, h, 1)
        for st in play_random_session(h, targets, SINGLE, 12, 1, rng):
            if st.terminated:
                break
            comp = dfs_gain_all(h, st)
            assert set(comp.rows) == set(st.pool())
            for v, row in comp.rows.items():
                ref = naive_gain_single(h, st, v)
                assert row.g_yes == ref.g_yes
                assert row.g_no == ref.g_no
                assert row.pool_after_yes == ref.pool_after_yes
                assert abs(row.p_yes - ref.p_yes) < 1e-9
                assert abs(row.p_no - ref.p_no) < 1e-9
                assert abs(row.gain - ref.gain) < 1e-9


class TestStructure:
    def test_bottom_up_identity(self, demo):
        # cover(v) accumulated by the traversal must satisfy
        # cover(v) = sum(cover(children)) + pool_size(v) - 1 at every vertex.
        st = fresh_single(demo)
        comp = dfs_gain_all(demo, st)
        cover = {v: comp.anchor_cover - row.g_yes for v, row in comp.rows.items()}
        size = {v: row.pool_after_yes for v, row in comp.rows.items()}
        for v in comp.rows:
            kids = [c for c in demo.children[v] if st.p_member[c]]
            assert cover[v] == sum(cover[c] for c in kids) + size[v] - 1

    def test_traversal_is_linear_in_pool(self, demo):
        st = fresh_single(demo)
        comp = dfs_gain_all(demo, st)
        assert comp.vertex_visits == st.p_size
        apply_answer(st, demo, demo.id_of("v3"), Answer.NO)
        comp = dfs_gain_all(demo, st)
        assert comp.vertex_visits == st.p_size

    def test_per_question_work_scales_linearly(self):
        # Doubling the tree doubles the traversal, nothing worse: the whole
        # per-question cost is a constant number of operations per visit.
        rng = random.Random(99)
        visits = []
        for n in (1000, 2000, 4000):
            h = random_tree(rng, n)
            st = init_session(h, SINGLE, 5, 1)
            comp = dfs_gain_all(h, st)
            visits.append(comp.vertex_visits)
            assert comp.vertex_visits <= n
        assert visits[1] <= 2 * visits[0]
        assert visits[2] <= 2 * visits[1]

    def test_two_vertex_chain(self):
        h = Hierarchy([None, 0], ["r", "a"])
        st = init_session(h, SINGLE, 1, 1)
        assert stbis_next_question(h, st) == 1

    def test_empty_pool_raises(self):
        h = Hierarchy([None, 0], ["r", "a"])
        st = init_session(h, SINGLE, 2, 1)
        apply_answer(st, h, 1, Answer.NO)
        with pytest.raises(ValueError):
            stbis_next_question(h, st)


class TestEndToEnd:
    def test_target_found_with_ample_budget(self, demo):
        from taxoquest.engines import StbisEngine, run_session
        from taxoquest.oracle import TargetSet, TruthfulOracle

        t5 = demo.id_of("v5")
        res = run_session(
            demo, StbisEngine(demo), TruthfulOracle(demo, TargetSet(frozenset([t5]))),
            b=50, k=1)
        assert res.selection.members == (t5,)
        assert res.state.p_vertices() == [t5]
