import random

import pytest

from taxoquest.fixtures import demo_hierarchy
from taxoquest.oracle import (
    Answer, NoisyOracle, NoisyOracleConfig, TargetSet, TruthfulOracle,
    dump_target_sets, load_target_sets, truthful_answer, validate_independence,
)

from conftest import random_targets, random_tree


@pytest.fixture(scope="module")
def demo():
    return demo_hierarchy()


@pytest.fixture(scope="module")
def demo_targets(demo):
    return TargetSet.create(demo, [demo.id_of("v2"), demo.id_of("v8")])


class TestTruthful:
    def test_demo_answers(self, demo, demo_targets):
        assert truthful_answer(demo, demo_targets, demo.id_of("v3")) is Answer.YES
        assert truthful_answer(demo, demo_targets, demo.id_of("v5")) is Answer.NO
        assert truthful_answer(demo, demo_targets, demo.root) is Answer.YES

    @pytest.mark.parametrize("seed", range(6))
    def test_no_propagates_down(self, seed):
        rng = random.Random(seed)
        h = random_tree(rng, 40)
        targets = random_targets(rng, h, 3)
        oracle = TruthfulOracle(h, targets)
        for q in range(h.n):
            if oracle(q) is Answer.NO:
                for u in h.subtree_vertices(q):
                    assert oracle(u) is Answer.NO

    @pytest.mark.parametrize("seed", range(6))
    def test_membership_characterization(self, seed):
        # A vertex is a target exactly when it answers Yes and every child
        # answers No.
        rng = random.Random(50 + seed)
        h = random_tree(rng, 40)
        targets = random_targets(rng, h, 3)
        oracle = TruthfulOracle(h, targets)
        for t in range(h.n):
            member = t in targets.members
            implied = oracle(t) is Answer.YES and all(
                oracle(c) is Answer.NO for c in h.children[t])
            assert member == implied


class TestIndependence:
    def test_demo_pairs(self, demo):
        assert validate_independence(demo, [demo.id_of("v2"), demo.id_of("v8")])
        assert not validate_independence(demo, [demo.id_of("v1"), demo.id_of("v5")])
        assert validate_independence(demo, [demo.id_of("v4")])

    def test_create_rejects_related(self, demo):
        with pytest.raises(ValueError):
            TargetSet.create(demo, [demo.id_of("v1"), demo.id_of("v5")])
        with pytest.raises(ValueError):
            TargetSet.create(demo, [])


class TestNoisy:
    def test_zero_noise_is_truthful(self, demo, demo_targets):
        cfg = NoisyOracleConfig(difficult_fraction=1.0, wrong_probability=0.0, rng_seed=3)
        noisy = NoisyOracle(demo, demo_targets, cfg, is_difficult=True)
        truth = TruthfulOracle(demo, demo_targets)
        for q in range(demo.n):
            assert noisy(q) is truth(q)

    def test_certain_noise_flips_everything(self, demo, demo_targets):
        cfg = NoisyOracleConfig(difficult_fraction=1.0, wrong_probability=1.0, rng_seed=3)
        noisy = NoisyOracle(demo, demo_targets, cfg, is_difficult=True)
        truth = TruthfulOracle(demo, demo_targets)
        for q in range(demo.n):
            assert noisy(q) is truth(q).flipped()

    def test_easy_objects_never_flip(self, demo, demo_targets):
        cfg = NoisyOracleConfig(difficult_fraction=0.5, wrong_probability=1.0, rng_seed=3)
        noisy = NoisyOracle(demo, demo_targets, cfg, is_difficult=False)
        truth = TruthfulOracle(demo, demo_targets)
        for q in range(demo.n):
            assert noisy(q) is truth(q)

    def test_flip_rate_in_binomial_band(self, demo, demo_targets):
        # 1000 draws at p = 0.1: a four-sigma band around the mean is
        # roughly [62, 138]; assert the slightly wider [60, 140].
        cfg = NoisyOracleConfig(difficult_fraction=1.0, wrong_probability=0.1, rng_seed=11)
        noisy = NoisyOracle(demo, demo_targets, cfg, is_difficult=True)
        truth = TruthfulOracle(demo, demo_targets)
        flips = 0
        for i in range(1000):
            q = i % demo.n
            if noisy(q) is not truth(q):
                flips += 1
        assert 60 <= flips <= 140

    def test_replay_determinism(self, demo, demo_targets):
        cfg = NoisyOracleConfig(difficult_fraction=1.0, wrong_probability=0.3, rng_seed=7)
        seq = [i % demo.n for i in range(50)]
        runs = []
        for _ in range(2):
            noisy = NoisyOracle(demo, demo_targets, cfg, is_difficult=True)
            runs.append([noisy(q) for q in seq])
        assert runs[0] == runs[1]

    def test_config_validation(self):
        with pytest.raises(ValueError):
            NoisyOracleConfig(difficult_fraction=1.5, wrong_probability=0.1)
        with pytest.raises(ValueError):
            NoisyOracleConfig(difficult_fraction=0.5, wrong_probability=-0.1)


class TestTargetFiles:
    def test_roundtrip(self, demo):
        sets = [
            TargetSet.create(demo, [demo.id_of("v2"), demo.id_of("v8")]),
            TargetSet.create(demo, [demo.id_of("v5")]),
        ]
        text = dump_target_sets(sets, demo)
        back = load_target_sets(text, demo)
        assert [t.members for t in back] == [t.members for t in sets]

    def test_unknown_label(self, demo):
        with pytest.raises(ValueError):
            load_target_sets('[["nope"]]', demo)
