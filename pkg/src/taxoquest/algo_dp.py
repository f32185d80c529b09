"""Exact potential-penalty computation via tree DP with knapsack combination.

For every vertex u that still matters (it or a descendant is a potential
target) the table holds, for every ancestor depth wd and every selection
budget j, the cheapest way to cover the potential targets in u's subtree
given that the nearest selected vertex above sits at depth wd.  Child
subtrees merge through a small knapsack over the selection budget.

Question evaluation never mutates the committed table: hypothetical Yes/No
answers re-derive fresh values along the candidate's root path only, reading
committed child blocks as-is, and the overlay is discarded afterwards.
"""

from __future__ import annotations

import weakref
from typing import Dict, List, Optional, Tuple

import numpy as np

from .hierarchy import Hierarchy
from .penalty import SelectionSet
from .session import MULTI, SessionState


class DpTable:
    """Committed cover-cost table for one (P, Y, k) state.

    blocks[u][wd][j] is the optimal cost inside u's subtree with at most j
    selections below, the nearest selected ancestor at depth wd; None for
    vertices whose subtree holds no potential target.  sel_cost[u][j] is the
    variant with u itself selected, present only for Yes-candidates.
    """

    def __init__(self, h: Hierarchy, state: SessionState, k: int):
        self.h = h
        self.k = k
        self.root = h.root
        self.p_member = list(state.p_member)
        self.y_member = list(state.y_member)
        self.inf = h.n * (h.height + 2) + 1
        self.states_built = 0
        self.overlay_states = 0

        n = h.n
        children = h.children
        pm = self.p_member

        cnt = [0] * n
        for u in reversed(h.pre_order):
            c = 1 if pm[u] else 0
            for x in children[u]:
                c += cnt[x]
            cnt[u] = c
        self.subtree_p_count = cnt
        self.live_children: List[List[int]] = [
            [x for x in children[u] if cnt[x] > 0] if cnt[u] > 0 else []
            for u in range(n)
        ]

        self.blocks: List[Optional[List[List[int]]]] = [None] * n
        self.sel_cost: List[Optional[List[int]]] = [None] * n
        self._build()

    def _build(self) -> None:
        h = self.h
        k = self.k
        k1 = k + 1
        inf = self.inf
        pm = self.p_member
        ym = self.y_member
        depth = h.depth
        blocks = self.blocks
        root = self.root

        for u in reversed(h.pre_order):
            if self.subtree_p_count[u] == 0:
                continue
            du = depth[u]
            kids = self.live_children[u]
            sel = None
            selectable = ym[u]
            in_p = pm[u]
            width = du if u != root else 1
            if not kids:
                # leaf of the live tree: nothing below to combine
                if selectable:
                    sel = [inf] + [0] * k
                    self.sel_cost[u] = sel
                    rows = [[du - wd] + [0] * k if in_p else [0] * k1
                            for wd in range(width)]
                else:
                    rows = [[du - wd if in_p else 0] * k1 for wd in range(width)]
            elif len(kids) == 1:
                # one child: its non-increasing row passes through unchanged,
                # and when this vertex adds no cover cost and no selection
                # choice the child's row can be shared outright
                cb = blocks[kids[0]]
                if selectable:
                    crow = cb[du]
                    sel = [inf] + crow[:k]
                    self.sel_cost[u] = sel
                    rows = []
                    for wd in range(width):
                        C = cb[wd]
                        base = (du - wd) if in_p else 0
                        row = [base + c for c in C] if base else list(C)
                        for j in range(1, k1):
                            if sel[j] < row[j]:
                                row[j] = sel[j]
                        rows.append(row)
                elif in_p:
                    rows = [[(du - wd) + c for c in cb[wd]] for wd in range(width)]
                else:
                    rows = cb[:width]
            else:
                kid_blocks = [blocks[x] for x in kids]
                if selectable:
                    kn = _knapsack([cb[du] for cb in kid_blocks], k)
                    sel = [inf] + kn[:k]
                    self.sel_cost[u] = sel
                rows = []
                for wd in range(width):
                    kn = _knapsack([cb[wd] for cb in kid_blocks], k)
                    base = (du - wd) if in_p else 0
                    if base:
                        row = [base + c for c in kn]
                    else:
                        row = kn
                    if sel is not None:
                        for j in range(1, k1):
                            if sel[j] < row[j]:
                                row[j] = sel[j]
                    rows.append(row)
            blocks[u] = rows
            self.states_built += width + (1 if sel is not None else 0)

    def value(self, u: int, wd: int, j: int) -> int:
        rows = self.blocks[u]
        if rows is None:
            return 0
        return rows[wd][j]

    def root_value(self) -> int:
        if self.blocks[self.root] is None:
            return 0
        return self.blocks[self.root][0][self.k]


def _knapsack(rows: list, k: int) -> List[int]:
    """Knapsack-merge child cost rows (all at one ancestor depth).

    F[j] is the cheapest total over the children seen so far spending at
    most j selections below them; child rows are non-increasing in j, so
    the at-most semantics is closed under merging.  The descending in-place
    update only ever reads not-yet-overwritten entries.
    """
    if len(rows) == 1:
        return list(rows[0])
    F = [0] * (k + 1)
    for C in rows:
        c0 = C[0]
        for j in range(k, 0, -1):
            best = F[j] + c0
            for i in range(1, j + 1):
                t = F[j - i] + C[i]
                if t < best:
                    best = t
            F[j] = best
        F[0] += c0
    return F


def _combine_children(kid_blocks: list, wd: int, k: int, inf: int) -> List[int]:
    """Knapsack-merge the wd-slot rows of whole child blocks."""
    if not kid_blocks:
        return [0] * (k + 1)
    return _knapsack([rows[wd] for rows in kid_blocks], k)


def build_dp(h: Hierarchy, state: SessionState, k: Optional[int] = None) -> DpTable:
    """Committed table for the session's current (P, Y) at budget k."""
    if state.mode != MULTI:
        raise ValueError("the cover-cost table applies to multi-target sessions")
    return DpTable(h, state, state.k if k is None else k)


# -- hypothetical evaluations ------------------------------------------------


def calg_yes(h: Hierarchy, state: SessionState, table: DpTable, u: int,
             k: Optional[int] = None) -> int:
    """Root cost if reach(u) were answered Yes.

    Hypothetically u's strict ancestors leave P and the whole root path
    becomes selectable.  Values are recomputed bottom-up along that path in
    an overlay; every ancestor depth can now host a selection, so the full
    slot range is refreshed at each path vertex.
    """
    k = table.k if k is None else k
    if u == table.root:
        raise ValueError("the root is never a legal question")
    inf = table.inf
    depth = h.depth
    pm = table.p_member
    root = table.root

    fresh: Optional[List[List[int]]] = None
    prev = -1
    v = u
    while True:
        dv = depth[v]
        kid_blocks = [
            fresh if x == prev else table.blocks[x]
            for x in table.live_children[v]
        ]
        if fresh is not None and prev not in table.live_children[v]:
            raise AssertionError("path child must stay live in a Yes overlay")
        kn_sel = _combine_children(kid_blocks, dv, k, inf)
        sel = [inf] + kn_sel[:k]
        in_p = pm[v] if v == u else False
        width = dv if v != root else 1
        rows = []
        for wd in range(width):
            kn = _combine_children(kid_blocks, wd, k, inf)
            base = (dv - wd) if in_p else 0
            row = [base + c for c in kn] if base else kn
            for j in range(1, k + 1):
                if sel[j] < row[j]:
                    row[j] = sel[j]
            rows.append(row)
        table.overlay_states += width + 1
        if v == root:
            return rows[0][k]
        fresh = rows
        prev = v
        v = h.parent[v]


def calg_no(h: Hierarchy, state: SessionState, table: DpTable, u: int,
            k: Optional[int] = None) -> int:
    """Root cost if reach(u) were answered No.

    u's subtree drops out of P entirely; only ancestors are re-derived, and
    only at the ancestor depths that stay selectable (Yes-candidates plus
    the root fallback), because the top-level read can only thread through
    selectable vertices.
    """
    k = table.k if k is None else k
    if u == table.root:
        raise ValueError("the root is never a legal question")
    inf = table.inf
    depth = h.depth
    pm = table.p_member
    ym = table.y_member
    root = table.root

    path = h.root_path(u)               # root .. u; path[i] has depth i
    prev = u
    prev_rows: Optional[Dict[int, List[int]]] = None
    for v in reversed(path[:-1]):
        dv = depth[v]
        kids = [x for x in table.live_children[v] if x != prev]
        kid_blocks = [table.blocks[x] for x in kids]

        sel = None
        if ym[v]:
            kn_sel = _combine_mixed(kid_blocks, prev_rows, dv, k)
            sel = [inf] + kn_sel[:k]
        wds = [0] + [i for i in range(1, dv) if ym[path[i]]]
        rows: Dict[int, List[int]] = {}
        for wd in wds:
            kn = _combine_mixed(kid_blocks, prev_rows, wd, k)
            base = (dv - wd) if pm[v] else 0
            row = [base + c for c in kn] if base else kn
            if sel is not None:
                for j in range(1, k + 1):
                    if sel[j] < row[j]:
                        row[j] = sel[j]
            rows[wd] = row
        table.overlay_states += len(wds) + (1 if sel is not None else 0)
        if v == root:
            return rows[0][k]
        prev = v
        prev_rows = rows
    raise AssertionError("path walk must end at the root")


def _combine_mixed(kid_blocks: list, on_path: Optional[Dict[int, List[int]]],
                   wd: int, k: int) -> List[int]:
    rows = [blocks[wd] for blocks in kid_blocks]
    if on_path is not None:
        rows.append(on_path[wd])
    if not rows:
        return [0] * (k + 1)
    return _knapsack(rows, k)


# -- answer probabilities and subtree aggregates -------------------------------

_layout_cache: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _np_layout(h: Hierarchy):
    hit = _layout_cache.get(h)
    if hit is None:
        hit = (
            np.asarray(h.pre_order, dtype=np.int64),
            np.asarray(h.euler_in, dtype=np.int64),
            np.asarray(h.euler_out, dtype=np.int64),
            np.asarray(h.depth, dtype=np.int64),
        )
        _layout_cache[h] = hit
    return hit


def multi_answer_probabilities(h: Hierarchy, state: SessionState) -> Tuple[np.ndarray, np.ndarray]:
    """Per-vertex probabilities that reach(v) answers Yes / No.

    The No-probability is the product of (1 - pr) over potential targets in
    v's subtree; evicted vertices carry pr = 0 and drop out automatically.
    Vertices with pr = 1 (certain targets) force the product to zero and are
    counted separately to keep the log-sum finite.
    """
    pre, ein, eout, _ = _np_layout(h)
    pr = np.asarray(state.pr, dtype=np.float64)[pre]
    certain = pr >= 1.0
    logs = np.log1p(-np.where(certain, 0.0, pr))
    logs[certain] = 0.0
    log_sum = np.concatenate(([0.0], np.cumsum(logs)))
    ones = np.concatenate(([0], np.cumsum(certain.astype(np.int64))))
    span_logs = log_sum[eout] - log_sum[ein]
    span_ones = ones[eout] - ones[ein]
    p_no = np.where(span_ones > 0, 0.0, np.exp(span_logs))
    return 1.0 - p_no, p_no


def subtree_p_counts(h: Hierarchy, state: SessionState) -> np.ndarray:
    """|P & des(v)| for every v, via prefix sums over the pre-order layout."""
    pre, ein, eout, _ = _np_layout(h)
    member = np.asarray(state.p_member, dtype=np.int64)[pre]
    csum = np.concatenate(([0], np.cumsum(member)))
    return csum[eout] - csum[ein]


def subtree_p_depth_sums(h: Hierarchy, state: SessionState) -> np.ndarray:
    """Sum of depth(t) over potential targets t below every vertex."""
    pre, ein, eout, depths = _np_layout(h)
    member = np.asarray(state.p_member, dtype=np.int64)[pre]
    csum = np.concatenate(([0], np.cumsum(member * depths[pre])))
    return csum[eout] - csum[ein]


# -- question selection and extraction ---------------------------------------


def kbm_dp_next_question(h: Hierarchy, state: SessionState,
                         table: Optional[DpTable] = None,
                         probs: Optional[Tuple[np.ndarray, np.ndarray]] = None,
                         gains_out: Optional[Dict[int, Tuple[int, int]]] = None) -> int:
    """Exact expected-gain argmax over the whole candidate pool.

    `gains_out`, when given, receives every candidate's exact (Yes, No)
    gain pair; instrumentation for the bound-pruned variant's premise.
    """
    if table is None:
        table = build_dp(h, state)
    if probs is None:
        probs = multi_answer_probabilities(h, state)
    p_yes, p_no = probs
    g = table.root_value()
    depth = h.depth
    pm, ym = state.p_member, state.y_member

    best = None
    best_key = None
    for v in range(state.n):
        if not pm[v] or ym[v]:
            continue
        gy = g - calg_yes(h, state, table, v)
        gn = g - calg_no(h, state, table, v)
        if gains_out is not None:
            gains_out[v] = (gy, gn)
        gain = gy * float(p_yes[v]) + gn * float(p_no[v])
        key = (gain, depth[v], -v)
        if best_key is None or key > best_key:
            best_key = key
            best = v
    if best is None:
        raise ValueError("no askable candidate: P minus Y is empty")
    return best


def extract_selection(table: DpTable, k: Optional[int] = None) -> SelectionSet:
    """Backtrack one optimal selection out of the committed table.

    Walks the argmin choices top-down, re-deriving each knapsack split;
    f(S, P) of the result equals the committed root value.  On cost ties a
    vertex is selected only when it is itself a potential target, which
    makes the endgame selection equal to P once P is fully confirmed.
    """
    k = table.k if k is None else k
    h = table.h
    if table.blocks[table.root] is None:
        return SelectionSet((), k)

    inf = table.inf
    depth = h.depth
    pm = table.p_member
    chosen: List[int] = []
    stack: List[Tuple[int, int, int]] = [(table.root, 0, k)]
    while stack:
        u, wd, j = stack.pop()
        rows = table.blocks[u]
        if rows is None:
            continue
        du = depth[u]
        kids = table.live_children[u]
        kid_blocks = [table.blocks[x] for x in kids]
        sel = table.sel_cost[u]
        take = False
        if sel is not None and j >= 1:
            base = (du - wd) if pm[u] else 0
            plain = base + _combine_children(kid_blocks, wd, table.k, inf)[j]
            if sel[j] < plain or (sel[j] == plain and pm[u]):
                take = True
        if take:
            chosen.append(u)
            budget = j - 1
            slot = du
        else:
            budget = j
            slot = wd
        if budget <= 0 or not kids:
            continue
        # Re-run the knapsack keeping per-child prefix states, then walk back.
        states = [[0] * (table.k + 1)]
        F = states[0]
        for x in kids:
            C = table.blocks[x][slot]
            G = [0] * (table.k + 1)
            for jj in range(table.k + 1):
                best = F[jj] + C[0]
                for i in range(1, jj + 1):
                    t = F[jj - i] + C[i]
                    if t < best:
                        best = t
                G[jj] = best
            states.append(G)
            F = G
        rem = budget
        for idx in range(len(kids) - 1, -1, -1):
            C = table.blocks[kids[idx]][slot]
            prevF = states[idx]
            pick = 0
            for i in range(0, rem + 1):
                if prevF[rem - i] + C[i] == states[idx + 1][rem]:
                    pick = i
                    break
            if pick > 0:
                stack.append((kids[idx], slot, pick))
            rem -= pick
    return SelectionSet(tuple(sorted(chosen)), k)
