"""Expected-gain question selection for the single-target search.

The candidate pool is always inside the subtree of the current anchor (the
deepest Yes vertex).  One bottom-up pass over that subtree, restricted to
surviving potential targets, yields for every candidate the probability of
a Yes answer and both answer gains; the naive per-vertex evaluation is kept
as an independent oracle for tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict

from .hierarchy import Hierarchy
from .session import SINGLE, SessionState


@dataclass(frozen=True)
class SingleGainRow:
    vertex: int
    p_yes: float
    p_no: float
    g_yes: int
    g_no: int
    gain: float
    pool_after_yes: int      # |P ∩ des(vertex)|, survivors if the answer is Yes


class GainComputation:
    """Bundle of per-candidate rows plus traversal instrumentation."""

    def __init__(self, rows: Dict[int, SingleGainRow], anchor_cover: int,
                 pool_total: int, vertex_visits: int):
        self.rows = rows
        self.anchor_cover = anchor_cover     # f({anchor}, P)
        self.pool_total = pool_total         # |P|
        self.vertex_visits = vertex_visits


def dfs_gain_all(h: Hierarchy, state: SessionState) -> GainComputation:
    """All candidate rows in one traversal of the anchor's live subtree.

    Uses the bottom-up identities
        cover(v) = sum(cover(c) for live children c) + live(v) - 1
        p_yes(v) = pr(v) + sum(p_yes(c))
    and then per candidate
        g_yes(v) = cover(anchor) - cover(v)
        g_no(v)  = cover(v) + dist(anchor, v) * live(v)
    """
    if state.mode != SINGLE:
        raise ValueError("dfs_gain_all requires a single-target session")
    s = state.anchor
    pm = state.p_member
    pr = state.pr
    depth = h.depth
    children = h.children

    cnt: Dict[int, int] = {}
    cover: Dict[int, int] = {}
    psum: Dict[int, float] = {}
    visits = 0

    # Iterative post-order over the P-restricted subtree of the anchor.
    stack = [(s, False)]
    while stack:
        v, done = stack.pop()
        if not done:
            visits += 1
            stack.append((v, True))
            for c in children[v]:
                if pm[c]:
                    stack.append((c, False))
            continue
        c_total = 1
        f_total = 0
        p_total = pr[v]
        for c in children[v]:
            if pm[c]:
                c_total += cnt[c]
                f_total += cover[c] + cnt[c]
                p_total += psum[c]
        cnt[v] = c_total
        cover[v] = f_total
        psum[v] = p_total

    anchor_cover = cover[s]
    depth_s = depth[s]
    rows: Dict[int, SingleGainRow] = {}
    for v, c_total in cnt.items():
        if v == s:
            continue
        p_yes = psum[v]
        p_no = 1.0 - p_yes
        g_yes = anchor_cover - cover[v]
        g_no = cover[v] + (depth[v] - depth_s) * c_total
        rows[v] = SingleGainRow(
            vertex=v, p_yes=p_yes, p_no=p_no, g_yes=g_yes, g_no=g_no,
            gain=g_yes * p_yes + g_no * p_no, pool_after_yes=c_total,
        )
    return GainComputation(rows, anchor_cover, cnt[s], visits)


def naive_gain_single(h: Hierarchy, state: SessionState, v: int) -> SingleGainRow:
    """Direct evaluation of one candidate row; test oracle for the DFS path."""
    if state.mode != SINGLE:
        raise ValueError("naive_gain_single requires a single-target session")
    s = state.anchor
    pm = state.p_member
    pr = state.pr
    depth = h.depth

    anchor_cover = 0
    for u in h.subtree_vertices(s):
        if pm[u]:
            anchor_cover += depth[u] - depth[s]

    cnt = 0
    cover = 0
    p_yes = 0.0
    for u in h.subtree_vertices(v):
        if pm[u]:
            cnt += 1
            cover += depth[u] - depth[v]
            p_yes += pr[u]
    p_no = 1.0 - p_yes
    g_yes = anchor_cover - cover
    g_no = cover + (depth[v] - depth[s]) * cnt
    return SingleGainRow(
        vertex=v, p_yes=p_yes, p_no=p_no, g_yes=g_yes, g_no=g_no,
        gain=g_yes * p_yes + g_no * p_no, pool_after_yes=cnt,
    )


def stbis_next_question(h: Hierarchy, state: SessionState) -> int:
    """Candidate with the largest expected gain; deeper wins ties, then
    smaller id.

    The survivor probability is uniform over P in this implementation, so
    the comparison runs on exact integer numerators
        g_yes * |P & des(v)| + g_no * (|P| - |P & des(v)|)
    and reports no float-rounding artifacts on ties.
    """
    comp = dfs_gain_all(h, state)
    ym = state.y_member
    total = comp.pool_total
    depth = h.depth
    best = None
    best_key = None
    for v, row in comp.rows.items():
        if ym[v]:
            continue
        num = row.g_yes * row.pool_after_yes + row.g_no * (total - row.pool_after_yes)
        key = (num, depth[v], -v)
        if best_key is None or key > best_key:
            best_key = key
            best = v
    if best is None:
        raise ValueError("no askable candidate: P minus Y is empty")
    return best
