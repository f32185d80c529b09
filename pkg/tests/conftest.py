from __future__ import annotations

import random

import pytest

from taxoquest.hierarchy import Hierarchy
from taxoquest.oracle import TargetSet, TruthfulOracle, validate_independence
from taxoquest.session import apply_answer, init_session


def random_tree(rng: random.Random, n: int, max_children: int = 4) -> Hierarchy:
    """Uniform random attachment tree with a degree cap, for property tests."""
    parent = [None] * n
    degree = [0] * n
    eligible = [0]
    for v in range(1, n):
        i = rng.randrange(len(eligible))
        p = eligible[i]
        parent[v] = p
        degree[p] += 1
        if degree[p] >= max_children:
            eligible[i] = eligible[-1]
            eligible.pop()
        eligible.append(v)
    return Hierarchy(parent, [f"n{i}" for i in range(n)])


def random_targets(rng: random.Random, h: Hierarchy, max_count: int) -> TargetSet:
    """Random independent target set of size 1..max_count (best effort)."""
    want = rng.randint(1, max_count)
    order = list(range(h.n))
    rng.shuffle(order)
    chosen = []
    for v in order:
        if all(not h.is_ancestor(v, c) and not h.is_ancestor(c, v) for c in chosen):
            chosen.append(v)
            if len(chosen) == want:
                break
    assert chosen, "a singleton target set always exists"
    assert validate_independence(h, chosen)
    return TargetSet(frozenset(chosen))


def play_random_session(h: Hierarchy, targets: TargetSet, mode: str, b: int,
                        k: int, rng: random.Random):
    """Yield the session state before each round of a randomly-played game.

    Questions are drawn uniformly from the legal pool and answered
    truthfully, which reaches a scattering of (P, Y) states that greedy
    engines would never visit; useful for oracle-equivalence sweeps.
    """
    oracle = TruthfulOracle(h, targets)
    state = init_session(h, mode, b, k)
    while True:
        yield state
        if state.terminated:
            return
        pool = state.pool()
        q = pool[rng.randrange(len(pool))]
        apply_answer(state, h, q, oracle(q))


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
