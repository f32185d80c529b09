"""Greedy pruned-count baseline.

Asks the vertex maximizing the number of potential targets that are pruned
no matter which answer comes back, i.e. the worst case over the two
answers.  The single-target variant halves P around the candidate subtree;
the multi-target variant can only prune the candidate's strict ancestors on
a Yes.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .hierarchy import Hierarchy
from .session import MULTI, SINGLE, SessionState
from .algo_dp import subtree_p_counts


def bing_next_question_single(h: Hierarchy, state: SessionState,
                              counts: Optional[Sequence[int]] = None) -> int:
    """Argmax of min(|P & des(v)|, |P| - |P & des(v)|) over the pool."""
    if state.mode != SINGLE:
        raise ValueError("single-target variant requires a single-target session")
    if counts is None:
        counts = subtree_p_counts(h, state).tolist()
    total = state.p_size
    depth = h.depth
    pm, ym = state.p_member, state.y_member
    best = None
    best_key = None
    for v in range(state.n):
        if not pm[v] or ym[v]:
            continue
        inside = counts[v]
        key = (min(inside, total - inside), depth[v], -v)
        if best_key is None or key > best_key:
            best_key = key
            best = v
    if best is None:
        raise ValueError("no askable candidate: P minus Y is empty")
    return best


def bing_next_question_multi(h: Hierarchy, state: SessionState,
                             counts: Optional[Sequence[int]] = None) -> int:
    """Argmax of min(#potential strict ancestors, |P & des(v)|).

    A Yes prunes only the candidate's potential ancestors, a No prunes its
    whole potential subtree; the guaranteed progress is the smaller of the
    two.
    """
    if state.mode != MULTI:
        raise ValueError("multi-target variant requires a multi-target session")
    if counts is None:
        counts = subtree_p_counts(h, state).tolist()
    depth = h.depth
    parent = h.parent
    pm, ym = state.p_member, state.y_member

    # Number of potential targets strictly above each vertex, one pass down.
    above = [0] * state.n
    for v in h.pre_order:
        p = parent[v]
        if p is not None:
            above[v] = above[p] + (1 if pm[p] else 0)

    best = None
    best_key = None
    for v in range(state.n):
        if not pm[v] or ym[v]:
            continue
        key = (min(above[v], counts[v]), depth[v], -v)
        if best_key is None or key > best_key:
            best_key = key
            best = v
    if best is None:
        raise ValueError("no askable candidate: P minus Y is empty")
    return best
