"""Upper-bound pruning over the exact expected-gain sweep.

Gains tend to shrink as questions accumulate, so last round's exact gains
serve as (heuristic) upper bounds for this round.  Candidates are visited
in descending bound order and evaluation stops as soon as the best exact
gain seen beats the next bound; skipped candidates keep their carried
bounds for later rounds.  Round one uses a precomputed, target-independent
gain cache, so its bounds are exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple, Union

from .hierarchy import Hierarchy
from .session import MULTI, SessionState, init_session
from .algo_dp import DpTable, build_dp, calg_no, calg_yes, multi_answer_probabilities


@dataclass
class FirstRoundCache:
    """Exact first-question gains for every vertex, fixed by (tree, k)."""

    tree_hash: str
    k: int
    g_yes: List[int]
    g_no: List[int]

    def to_json(self) -> str:
        return json.dumps({
            "tree_hash": self.tree_hash,
            "k": self.k,
            "g_yes": self.g_yes,
            "g_no": self.g_no,
        })

    @staticmethod
    def from_json(text: str) -> "FirstRoundCache":
        doc = json.loads(text)
        return FirstRoundCache(doc["tree_hash"], doc["k"],
                               list(doc["g_yes"]), list(doc["g_no"]))


def cache_sidecar_path(directory: Union[str, Path], h: Hierarchy, k: int) -> Path:
    """Canonical sidecar location, keyed by tree content hash and k."""
    return Path(directory) / f"gains-{h.content_hash()[:16]}-k{k}.json"


def load_or_precompute_first_round(h: Hierarchy, k: int,
                                   directory: Union[str, Path]) -> FirstRoundCache:
    """Reuse the sidecar when it matches this tree and k, else recompute it."""
    path = cache_sidecar_path(directory, h, k)
    if path.exists():
        cache = FirstRoundCache.from_json(path.read_text())
        if cache.tree_hash == h.content_hash() and cache.k == k:
            return cache
    cache = precompute_first_round(h, k)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(cache.to_json())
    return cache


def precompute_first_round(h: Hierarchy, k: int) -> FirstRoundCache:
    """Exact gains of every vertex for the opening question.

    The opening state (everything potential, only the root confirmed) does
    not depend on the hidden targets, so the result can be shared by every
    session on the same tree and serialized to a sidecar file.
    """
    state = init_session(h, MULTI, b=1, k=k)
    if state.terminated:
        n = h.n
        return FirstRoundCache(h.content_hash(), k, [0] * n, [0] * n)
    table = build_dp(h, state)
    g = table.root_value()
    g_yes = [0] * h.n
    g_no = [0] * h.n
    for v in range(h.n):
        if v == h.root:
            continue
        g_yes[v] = g - calg_yes(h, state, table, v)
        g_no[v] = g - calg_no(h, state, table, v)
    return FirstRoundCache(h.content_hash(), k, g_yes, g_no)


@dataclass
class GainBounds:
    """Carried per-vertex gain caps, refreshed whenever a vertex is evaluated."""

    ub_g_yes: List[int]
    ub_g_no: List[int]
    evaluations: int = 0
    rounds: int = 0
    monotone: bool = True      # no evaluated gain ever exceeded its carried bound

    @staticmethod
    def from_cache(cache: FirstRoundCache) -> "GainBounds":
        return GainBounds(list(cache.g_yes), list(cache.g_no))


@dataclass
class RoundStats:
    evaluated: Dict[int, Tuple[int, int]] = field(default_factory=dict)
    pool_size: int = 0


def kbm_dp_plus_next_question(h: Hierarchy, state: SessionState,
                              bounds: GainBounds,
                              table: Optional[DpTable] = None,
                              probs=None,
                              stats: Optional[RoundStats] = None) -> int:
    """Bound-ordered exact-gain search with early cutoff.

    The returned vertex has the maximum exact expected gain among every
    candidate whose bound was opened; with valid bounds that is the global
    argmax under the usual deeper-then-smaller-id tie order.
    """
    if table is None:
        table = build_dp(h, state)
    if probs is None:
        probs = multi_answer_probabilities(h, state)
    p_yes, p_no = probs
    g = table.root_value()
    depth = h.depth
    pm, ym = state.p_member, state.y_member
    uby, ubn = bounds.ub_g_yes, bounds.ub_g_no

    order = []
    for v in range(state.n):
        if not pm[v] or ym[v]:
            continue
        bar = uby[v] * float(p_yes[v]) + ubn[v] * float(p_no[v])
        order.append((-bar, -depth[v], v))
    order.sort()
    if stats is not None:
        stats.pool_size = len(order)

    best = None
    best_key = None
    best_gain = 0.0
    for neg_bar, _, v in order:
        if best is not None and best_gain > -neg_bar:
            break
        gy = g - calg_yes(h, state, table, v)
        gn = g - calg_no(h, state, table, v)
        if gy > uby[v] or gn > ubn[v]:
            bounds.monotone = False
        gain = gy * float(p_yes[v]) + gn * float(p_no[v])
        bounds.evaluations += 1
        if stats is not None:
            stats.evaluated[v] = (gy, gn)
        key = (gain, depth[v], -v)
        if best_key is None or key > best_key:
            best_key = key
            best = v
            best_gain = gain
    if best is None:
        raise ValueError("no askable candidate: P minus Y is empty")
    bounds.rounds += 1
    return best


def update_bounds_after_answer(bounds: GainBounds,
                               exact_rows: Dict[int, Tuple[int, int]],
                               skipped: Optional[Set[int]] = None) -> GainBounds:
    """Evaluated candidates carry fresh exact gains into the next round;
    everything else keeps its previous bound."""
    for v, (gy, gn) in exact_rows.items():
        bounds.ub_g_yes[v] = gy
        bounds.ub_g_no[v] = gn
    return bounds
