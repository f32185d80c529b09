"""Approximate potential penalty from independent per-vertex cover credits.

Each Yes-candidate x earns a selected-gain credit |P & des(x)| * depth(x);
the approximation charges the root cover cost for everything and refunds
the k largest credits, deliberately ignoring that nested candidates cover
overlapping ground.  That slack is priced by the lower/upper bound pair
checked in approximation_bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .hierarchy import Hierarchy
from .penalty import brute_force_potential_penalty
from .session import MULTI, SessionState
from .algo_dp import (
    multi_answer_probabilities,
    subtree_p_counts,
    subtree_p_depth_sums,
)


@dataclass(frozen=True)
class SelectedGain:
    vertex: int
    ig: int


class TopkStructure:
    """Committed cover credits of the Yes-candidates, largest first."""

    def __init__(self, entries: Iterable[SelectedGain]):
        self.entries: List[SelectedGain] = sorted(
            entries, key=lambda e: (-e.ig, e.vertex))

    @staticmethod
    def from_state(h: Hierarchy, state: SessionState,
                   counts: Optional[Sequence[int]] = None) -> "TopkStructure":
        if counts is None:
            counts = subtree_p_counts(h, state).tolist()
        depth = h.depth
        return TopkStructure(
            SelectedGain(v, int(counts[v]) * depth[v])
            for v in range(state.n) if state.y_member[v]
        )

    def topk_sum(self, k: int, exclude: frozenset = frozenset(),
                 extras: Sequence[int] = ()) -> int:
        """Sum of the k largest credits after swapping some entries out.

        `exclude` names committed vertices to drop, `extras` supplies the
        replacement credit values; the committed collection itself is never
        touched, so candidate evaluation is rollback-free.
        """
        ex_sorted = sorted(extras, reverse=True)
        total = 0
        taken = 0
        i = j = 0
        entries = self.entries
        while taken < k:
            base = None
            while i < len(entries):
                if entries[i].vertex in exclude:
                    i += 1
                    continue
                base = entries[i].ig
                break
            nxt = ex_sorted[j] if j < len(ex_sorted) else None
            if base is None and nxt is None:
                break
            if nxt is None or (base is not None and base >= nxt):
                total += base
                i += 1
            else:
                total += nxt
                j += 1
            taken += 1
        return total

    def snapshot(self) -> Tuple[Tuple[int, int], ...]:
        return tuple((e.vertex, e.ig) for e in self.entries)


def approx_penalty(h: Hierarchy, state: SessionState, k: Optional[int] = None) -> int:
    """Root cover cost minus the k best independent credits."""
    if state.mode != MULTI:
        raise ValueError("approx_penalty applies to multi-target sessions")
    k = state.k if k is None else k
    counts = subtree_p_counts(h, state)
    froot = int(subtree_p_depth_sums(h, state)[h.root])
    structure = TopkStructure.from_state(h, state, counts.tolist())
    return froot - structure.topk_sum(k)


def kbm_topk_next_question(h: Hierarchy, state: SessionState,
                           probs=None, counts=None, depth_sums=None) -> int:
    """Expected-gain argmax with the approximate penalty on both branches.

    Per candidate only the root path is touched: a Yes prunes the path
    members above it out of P and enrolls the path as Yes-candidates, a No
    removes the candidate's subtree; in both cases the affected credits are
    recomputed into a scratch view and merged with the committed top list.
    """
    if state.mode != MULTI:
        raise ValueError("kbm_topk_next_question applies to multi-target sessions")
    k = state.k
    if probs is None:
        probs = multi_answer_probabilities(h, state)
    p_yes, p_no = probs
    if counts is None:
        counts = subtree_p_counts(h, state).tolist()
    if depth_sums is None:
        depth_sums = subtree_p_depth_sums(h, state).tolist()

    depth = h.depth
    parent = h.parent
    pm, ym = state.p_member, state.y_member
    froot = int(depth_sums[h.root])
    structure = TopkStructure.from_state(h, state, counts)
    gprime = froot - structure.topk_sum(k)

    best = None
    best_key = None
    for u in range(state.n):
        if not pm[u] or ym[u]:
            continue

        # Walk the root path once, collecting credit adjustments for both
        # hypothetical answers.
        yes_extras = [counts[u] * depth[u]]        # u itself joins Y
        no_extras = []
        exclude = set()
        removed = 0
        removed_depth = 0
        cnt_u = counts[u]
        v = parent[u]
        while v is not None:
            if ym[v]:
                exclude.add(v)
                no_extras.append((counts[v] - cnt_u) * depth[v])
            if pm[v]:
                removed += 1
                removed_depth += depth[v]
            yes_extras.append((counts[v] - removed) * depth[v])
            v = parent[v]

        ex = frozenset(exclude)
        val_yes = (froot - removed_depth) - structure.topk_sum(k, ex, yes_extras)
        val_no = (froot - depth_sums[u]) - structure.topk_sum(k, ex, no_extras)
        gain = (gprime - val_yes) * float(p_yes[u]) + (gprime - val_no) * float(p_no[u])
        key = (gain, depth[u], -u)
        if best_key is None or key > best_key:
            best_key = key
            best = u
    if best is None:
        raise ValueError("no askable candidate: P minus Y is empty")
    return best


def approximation_bounds(h: Hierarchy, state: SessionState,
                    k: Optional[int] = None) -> Tuple[int, int, int]:
    """(lower bound, upper bound, approximate penalty) for the current state.

    The exact potential penalty comes from the enumeration oracle, so this
    is a test-scale check.  Raises AssertionError if the sandwich fails.
    """
    k = state.k if k is None else k
    pset = state.p_vertices()
    if not pset:
        return 0, 0, 0
    yset = state.y_vertices()
    g, _ = brute_force_potential_penalty(h, yset, pset, k)
    froot = int(subtree_p_depth_sums(h, state)[h.root])
    gp = approx_penalty(h, state, k)
    lb = g - (k - 1) * (froot - g)
    ub = g
    if not lb <= gp <= ub:
        raise AssertionError(
            f"approximation bound violated: lb={lb} gprime={gp} ub={ub}")
    return lb, ub, gp
