"""Question-selection engines behind one small interface.

An engine owns whatever per-session scratch its strategy needs (cover-cost
tables, carried gain bounds, credit structures) and exposes: the session
mode it runs in, the next question for a state, an answer hook, and the
final selection.  The driver below runs full ask/answer loops against an
oracle and can snapshot the would-be selection at budget checkpoints.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from .hierarchy import Hierarchy
from .oracle import Answer
from .penalty import SelectionSet
from .session import (
    MULTI, SINGLE, SessionState, apply_answer, finalize_selection, init_session,
)
from .algo_single import stbis_next_question
from .algo_dp import kbm_dp_next_question
from .algo_topk import kbm_topk_next_question
from .algo_dp_plus import (
    FirstRoundCache, GainBounds, RoundStats,
    kbm_dp_plus_next_question, precompute_first_round, update_bounds_after_answer,
)
from .baseline_bing import bing_next_question_multi, bing_next_question_single

ALGORITHMS = ("stbis", "kbm-dp", "kbm-topk", "kbm-dp-plus", "bing",
              "bing-single", "bing-multi")


class StbisEngine:
    name = "stbis"
    mode = SINGLE

    def __init__(self, h: Hierarchy, k: int = 1):
        self.h = h

    def next_question(self, state: SessionState) -> int:
        return stbis_next_question(self.h, state)

    def on_answer(self, state: SessionState, q: int, answer: Answer) -> None:
        pass

    def finalize(self, state: SessionState) -> SelectionSet:
        return finalize_selection(state, self.h)


class KbmDpEngine:
    name = "kbm-dp"
    mode = MULTI

    def __init__(self, h: Hierarchy, k: int, record_gains: bool = False):
        self.h = h
        self.k = k
        self.evaluations = 0
        self.rounds = 0
        self.gain_history: List[Dict[int, tuple]] = [] if record_gains else None

    def next_question(self, state: SessionState) -> int:
        self.evaluations += sum(
            1 for v in range(state.n)
            if state.p_member[v] and not state.y_member[v])
        self.rounds += 1
        if self.gain_history is None:
            return kbm_dp_next_question(self.h, state)
        gains: Dict[int, tuple] = {}
        q = kbm_dp_next_question(self.h, state, gains_out=gains)
        self.gain_history.append(gains)
        return q

    def on_answer(self, state: SessionState, q: int, answer: Answer) -> None:
        pass

    def finalize(self, state: SessionState) -> SelectionSet:
        return finalize_selection(state, self.h)


class KbmTopkEngine:
    name = "kbm-topk"
    mode = MULTI

    def __init__(self, h: Hierarchy, k: int):
        self.h = h
        self.k = k

    def next_question(self, state: SessionState) -> int:
        return kbm_topk_next_question(self.h, state)

    def on_answer(self, state: SessionState, q: int, answer: Answer) -> None:
        pass

    def finalize(self, state: SessionState) -> SelectionSet:
        return finalize_selection(state, self.h)


class KbmDpPlusEngine:
    name = "kbm-dp-plus"
    mode = MULTI

    def __init__(self, h: Hierarchy, k: int,
                 cache: Optional[FirstRoundCache] = None):
        self.h = h
        self.k = k
        if cache is None:
            cache = precompute_first_round(h, k)
        elif cache.k != k:
            raise ValueError(f"gain cache was computed for k={cache.k}, not k={k}")
        self.cache = cache
        self.bounds = GainBounds.from_cache(cache)
        self.round_stats: List[RoundStats] = []

    @property
    def evaluations(self) -> int:
        return self.bounds.evaluations

    @property
    def rounds(self) -> int:
        return self.bounds.rounds

    def next_question(self, state: SessionState) -> int:
        stats = RoundStats()
        q = kbm_dp_plus_next_question(self.h, state, self.bounds, stats=stats)
        self.round_stats.append(stats)
        update_bounds_after_answer(self.bounds, stats.evaluated)
        return q

    def on_answer(self, state: SessionState, q: int, answer: Answer) -> None:
        pass

    def finalize(self, state: SessionState) -> SelectionSet:
        return finalize_selection(state, self.h)


class BingEngine:
    def __init__(self, h: Hierarchy, k: int, mode: str):
        if mode not in (SINGLE, MULTI):
            raise ValueError(f"unknown mode {mode!r}")
        self.h = h
        self.mode = mode
        self.name = "bing-single" if mode == SINGLE else "bing-multi"

    def next_question(self, state: SessionState) -> int:
        if self.mode == SINGLE:
            return bing_next_question_single(self.h, state)
        return bing_next_question_multi(self.h, state)

    def on_answer(self, state: SessionState, q: int, answer: Answer) -> None:
        pass

    def finalize(self, state: SessionState) -> SelectionSet:
        return finalize_selection(state, self.h)


def make_engine(name: str, h: Hierarchy, k: int, mode: Optional[str] = None,
                dp_plus_cache: Optional[FirstRoundCache] = None):
    """Engine factory keyed by the benchmark algorithm names.

    Plain "bing" resolves through `mode`; everything else implies its mode.
    """
    if name == "stbis":
        return StbisEngine(h, 1)
    if name == "kbm-dp":
        return KbmDpEngine(h, k)
    if name == "kbm-topk":
        return KbmTopkEngine(h, k)
    if name == "kbm-dp-plus":
        return KbmDpPlusEngine(h, k, cache=dp_plus_cache)
    if name == "bing-single":
        return BingEngine(h, k, SINGLE)
    if name == "bing-multi":
        return BingEngine(h, k, MULTI)
    if name == "bing":
        if mode is None:
            raise ValueError("plain 'bing' needs an explicit mode")
        return BingEngine(h, k, mode)
    raise ValueError(f"unknown algorithm {name!r}")


@dataclass
class SessionResult:
    state: SessionState
    selection: SelectionSet
    questions_asked: int
    question_time: float                       # engine seconds, timed questions only
    timed_questions: int
    checkpoint_selections: Dict[int, SelectionSet] = field(default_factory=dict)

    @property
    def per_question_time(self) -> float:
        return self.question_time / self.timed_questions if self.timed_questions else 0.0


def run_session(h: Hierarchy, engine, oracle: Callable[[int], Answer],
                b: int, k: int,
                checkpoints: Optional[List[int]] = None,
                max_timed_questions: Optional[int] = None) -> SessionResult:
    """Drive one full session: ask, answer, update, finalize.

    `checkpoints` are question counts at which the would-be final selection
    is snapshotted (cheap, read-only), so one budget-b run doubles as runs
    for every smaller budget: question choice never looks at the remaining
    budget.  The per-question timer covers engine work (choosing plus
    post-answer bookkeeping), not the oracle; `max_timed_questions` stops
    the clock after that many questions without changing behavior.
    """
    state = init_session(h, engine.mode, b, k)
    marks = sorted(set(checkpoints or []))
    snaps: Dict[int, SelectionSet] = {}
    asked = 0
    timed_count = 0
    spent = 0.0
    while not state.terminated:
        timed = max_timed_questions is None or timed_count < max_timed_questions
        t0 = time.perf_counter() if timed else 0.0
        q = engine.next_question(state)
        t_select = (time.perf_counter() - t0) if timed else 0.0
        answer = oracle(q)
        t1 = time.perf_counter() if timed else 0.0
        apply_answer(state, h, q, answer)
        engine.on_answer(state, q, answer)
        if timed:
            spent += t_select + (time.perf_counter() - t1)
            timed_count += 1
        asked += 1
        if asked in marks:
            snaps[asked] = engine.finalize(state)
    final = engine.finalize(state)
    for m in marks:
        if m not in snaps:
            snaps[m] = final
    return SessionResult(state, final, asked, spent, timed_count, snaps)
