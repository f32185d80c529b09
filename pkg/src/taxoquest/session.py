"""Interactive search session: state updates, budgets, termination.

One session is a strictly serial ask/answer loop.  The session owns the
potential-target set P, the answered-Yes candidate pool Y, the per-vertex
target probability, and the question log; question *selection* lives in the
algorithm modules and only reads this state.

Single-target mode keeps Y collapsed to the single deepest Yes vertex,
multi-target mode accumulates the union of ancestor sets of Yes answers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional

from .hierarchy import Hierarchy
from .oracle import Answer

SINGLE = "single"
MULTI = "multi"


class SessionError(RuntimeError):
    pass


@dataclass
class QuestionRecord:
    question: int
    answer: Answer
    p_size_after: int
    y_size_after: int
    penalty_so_far: Optional[int] = None


@dataclass
class SessionState:
    mode: str
    n: int
    k: int
    budget_remaining: int
    p_member: List[bool]
    y_member: List[bool]
    pr: List[float]
    p_size: int
    y_size: int
    anchor: int                      # single mode: deepest Yes vertex
    log: List[QuestionRecord] = field(default_factory=list)
    terminated: bool = False

    def pool(self) -> List[int]:
        """Current legal questions: vertices in P but not in Y."""
        pm, ym = self.p_member, self.y_member
        return [v for v in range(self.n) if pm[v] and not ym[v]]

    def p_vertices(self) -> List[int]:
        return [v for v in range(self.n) if self.p_member[v]]

    def y_vertices(self) -> List[int]:
        return [v for v in range(self.n) if self.y_member[v]]


def init_session(h: Hierarchy, mode: str, b: int, k: int) -> SessionState:
    """Fresh state: P = all vertices, Y = {root}, uniform probability.

    The root's Yes is implied and not charged against the budget.  Single
    mode forces k = 1 and a 1/n prior; multi mode uses k/n.
    """
    if mode not in (SINGLE, MULTI):
        raise ValueError(f"unknown mode {mode!r}")
    if b < 1:
        raise ValueError("budget must be at least 1")
    if mode == SINGLE:
        k = 1
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > h.n:
        raise ValueError(f"k={k} exceeds vertex count {h.n}")

    n = h.n
    prior = (1.0 / n) if mode == SINGLE else min(k / n, 1.0)
    state = SessionState(
        mode=mode,
        n=n,
        k=k,
        budget_remaining=b,
        p_member=[True] * n,
        y_member=[False] * n,
        pr=[prior] * n,
        p_size=n,
        y_size=1,
        anchor=h.root,
    )
    state.y_member[h.root] = True
    _check_termination(state)
    return state


def apply_answer(state: SessionState, h: Hierarchy, q: int, answer: Answer) -> SessionState:
    """Advance the session by one answered question.

    Mutates and returns `state`.  Pruning rules:
      Yes, single: P <- des(q) & P, Y <- {q}
      Yes, multi:  P <- P - (anc(q) - {q}), Y <- Y | anc(q)
      No, both:    P <- P - des(q)
    Probabilities are renormalized over the surviving P.
    """
    if state.terminated:
        raise SessionError("session already terminated")
    if state.budget_remaining <= 0:
        raise SessionError("question budget exhausted")
    if not (state.p_member[q] and not state.y_member[q]):
        raise SessionError(f"vertex {q} is not a legal question (must be in P and not in Y)")

    pm, ym = state.p_member, state.y_member
    old_size = state.p_size

    if answer is Answer.YES:
        if state.mode == SINGLE:
            keep = [False] * state.n
            for v in h.subtree_vertices(q):
                keep[v] = pm[v]
            removed = old_size - sum(keep)
            state.p_member = keep
            state.p_size = old_size - removed
            for v in range(state.n):
                ym[v] = False
            ym[q] = True
            state.y_size = 1
            state.anchor = q
        else:
            v = h.parent[q]
            while v is not None:
                if pm[v]:
                    pm[v] = False
                    state.p_size -= 1
                v = h.parent[v]
            v = q
            while v is not None:
                if not ym[v]:
                    ym[v] = True
                    state.y_size += 1
                v = h.parent[v]
    else:
        for v in h.subtree_vertices(q):
            if pm[v]:
                pm[v] = False
                state.p_size -= 1

    renormalize(state, old_size)
    state.budget_remaining -= 1
    state.log.append(QuestionRecord(q, answer, state.p_size, state.y_size))
    _check_termination(state)
    return state


def renormalize(state: SessionState, old_p_size: int) -> None:
    """Zero evicted vertices, scale survivors by |P_old|/|P_new|, clamp at 1.

    The clamp matters only in multi mode when P shrinks below k: the
    No-probability product needs pr <= 1, and pr = 1 reads as a certain
    target.
    """
    new_size = state.p_size
    if new_size == old_p_size:
        return
    pr, pm = state.pr, state.p_member
    if new_size == 0:
        for v in range(state.n):
            pr[v] = 0.0
        return
    factor = old_p_size / new_size
    for v in range(state.n):
        if pm[v]:
            scaled = pr[v] * factor
            pr[v] = scaled if scaled < 1.0 else 1.0
        else:
            pr[v] = 0.0


def _check_termination(state: SessionState) -> None:
    pm, ym = state.p_member, state.y_member
    # P subset of Y means the remaining potential targets are all confirmed.
    pool_empty = all(ym[v] or not pm[v] for v in range(state.n))
    if pool_empty or state.budget_remaining <= 0 or state.p_size == 0:
        state.terminated = True


def candidates_exhausted(state: SessionState) -> bool:
    return all(state.y_member[v] or not state.p_member[v] for v in range(state.n))


def finalize_selection(state: SessionState, h: Hierarchy):
    """Best selection for the session as it stands.

    Single mode returns the anchor (the deepest confirmed Yes vertex).
    Multi mode extracts the argmin selection from the cover-cost table.
    Always non-empty: with nothing else confirmed the root stands in, and
    if wrong answers emptied P the deepest Yes-candidates are returned.
    """
    from .algo_dp import build_dp, extract_selection
    from .penalty import SelectionSet

    if state.mode == SINGLE:
        return SelectionSet((state.anchor,), 1)

    if state.p_size == 0:
        ys = sorted(state.y_vertices(), key=lambda v: (-h.depth[v], v))
        return SelectionSet(tuple(ys[: state.k]), state.k)

    table = build_dp(h, state)
    sel = extract_selection(table)
    if not sel.members:
        return SelectionSet((h.root,), state.k)
    return sel


def export_log(state: SessionState, h: Hierarchy) -> str:
    """Question log as JSON lines, one record per answered question.

    penalty_so_far is the potential penalty (best selection against the
    surviving candidates) after that answer; missing values are filled by
    replaying the log, so exporting is independent of which engine ran the
    session.
    """
    if any(rec.penalty_so_far is None for rec in state.log):
        _fill_log_penalties(state, h)
    rows = []
    for rec in state.log:
        rows.append(json.dumps({
            "q": h.label[rec.question],
            "answer": rec.answer.value,
            "p_size": rec.p_size_after,
            "y_size": rec.y_size_after,
            "penalty_so_far": rec.penalty_so_far,
        }))
    return "\n".join(rows)


def _fill_log_penalties(state: SessionState, h: Hierarchy) -> None:
    from .algo_dp import build_dp

    replay = init_session(h, state.mode, max(len(state.log), 1), state.k)
    for rec in state.log:
        apply_answer(replay, h, rec.question, rec.answer)
        if state.mode == SINGLE:
            s = replay.anchor
            ds = h.depth[s]
            rec.penalty_so_far = sum(
                h.depth[v] - ds for v in replay.p_vertices())
        else:
            rec.penalty_so_far = build_dp(h, replay).root_value()
