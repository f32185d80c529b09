"""Distance penalties between selections and target sets.

Penalties are plain hop counts, kept as integers throughout.  The selection
set is always evaluated as if the root were a free extra member, so every
target has a finite cover cost even for an empty selection.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Tuple

from .hierarchy import Hierarchy


class BruteForceLimitError(RuntimeError):
    """Raised when an exhaustive enumeration would be unreasonably large."""


@dataclass(frozen=True)
class SelectionSet:
    """Up to `capacity` chosen vertices, stored as a sorted id tuple."""

    members: Tuple[int, ...]
    capacity: int

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(set(self.members))))
        if len(self.members) > self.capacity:
            raise ValueError(
                f"selection of size {len(self.members)} exceeds capacity {self.capacity}"
            )


def pairwise_penalty(h: Hierarchy, v: int, t: int) -> int:
    """Cost of using v to stand for target t.

    The distance from v when v lies above t, otherwise the full penalty
    dist(root, t), i.e. the depth of t.
    """
    if h.is_ancestor(v, t):
        return h.depth[t] - h.depth[v]
    return h.depth[t]


def set_penalty(h: Hierarchy, selection: Iterable[int], targets: Iterable[int]) -> int:
    """Sum over targets of the best cover cost from selection + root."""
    sel = list(selection)
    total = 0
    for t in targets:
        best = h.depth[t]
        dt = h.depth[t]
        for v in sel:
            if h.is_ancestor(v, t):
                d = dt - h.depth[v]
                if d < best:
                    best = d
        total += best
    return total


def brute_force_potential_penalty(
    h: Hierarchy,
    yset: Iterable[int],
    pset: Iterable[int],
    k: int,
    limit: int = 2_000_000,
) -> Tuple[int, SelectionSet]:
    """Exact minimum of set_penalty(S, pset) over S subset of yset, |S| <= k.

    Test-scale oracle: enumerates every selection.  Ties break toward the
    lexicographically smallest sorted id tuple.  Raises BruteForceLimitError
    when the enumeration would exceed `limit` penalty evaluations.
    """
    ys = sorted(set(yset))
    ps = sorted(set(pset))
    if not ps:
        return 0, SelectionSet((), k)

    count = sum(_ncr(len(ys), r) for r in range(0, min(k, len(ys)) + 1))
    if count * max(len(ps), 1) > limit:
        raise BruteForceLimitError(
            f"{count} selections x {len(ps)} targets exceeds enumeration limit"
        )

    # Precompute per-target cover costs from each candidate once.
    root_cost = {t: h.depth[t] for t in ps}
    cover = {
        v: {t: h.depth[t] - h.depth[v] for t in ps if h.is_ancestor(v, t)}
        for v in ys
    }

    best_val: Optional[int] = None
    best_sel: Tuple[int, ...] = ()
    for r in range(0, min(k, len(ys)) + 1):
        for combo in combinations(ys, r):
            val = 0
            for t in ps:
                c = root_cost[t]
                for v in combo:
                    d = cover[v].get(t)
                    if d is not None and d < c:
                        c = d
                val += c
            if best_val is None or val < best_val or (val == best_val and combo < best_sel):
                best_val = val
                best_sel = combo
    return best_val, SelectionSet(best_sel, k)


def _ncr(n: int, r: int) -> int:
    if r > n:
        return 0
    out = 1
    for i in range(r):
        out = out * (n - i) // (i + 1)
    return out
