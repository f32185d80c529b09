"""Answer sources for reachability questions.

Three kinds of oracle answer a question "can vertex q reach a target":
ground-truth simulation, a noisy simulation that flips answers for
designated difficult objects, and a deferred channel whose answers arrive
from outside (a human at a prompt or an HTTP client).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterable, List

from .hierarchy import Hierarchy


class Answer(Enum):
    YES = "Yes"
    NO = "No"

    def flipped(self) -> "Answer":
        return Answer.NO if self is Answer.YES else Answer.YES


def validate_independence(h: Hierarchy, members: Iterable[int]) -> bool:
    """True iff no member lies on the root path of another."""
    ms = list(members)
    for i, u in enumerate(ms):
        for v in ms[i + 1:]:
            if h.is_ancestor(u, v) or h.is_ancestor(v, u):
                return False
    return True


@dataclass(frozen=True)
class TargetSet:
    """Hidden ground truth: a non-empty antichain of vertices."""

    members: FrozenSet[int]

    @staticmethod
    def create(h: Hierarchy, members: Iterable[int]) -> "TargetSet":
        ms = frozenset(members)
        if not ms:
            raise ValueError("target set must be non-empty")
        if not validate_independence(h, ms):
            raise ValueError("targets must be pairwise non-reachable")
        return TargetSet(ms)


@dataclass(frozen=True)
class NoisyOracleConfig:
    difficult_fraction: float
    wrong_probability: float
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.difficult_fraction <= 1.0:
            raise ValueError("difficult_fraction must be in [0, 1]")
        if not 0.0 <= self.wrong_probability <= 1.0:
            raise ValueError("wrong_probability must be in [0, 1]")


def truthful_answer(h: Hierarchy, targets: TargetSet, q: int) -> Answer:
    """Yes iff the subtree of q contains a target."""
    ein, eout = h.euler_in[q], h.euler_out[q]
    for t in targets.members:
        if ein <= h.euler_in[t] < eout:
            return Answer.YES
    return Answer.NO


class TruthfulOracle:
    """Callable oracle bound to one hierarchy and target set."""

    def __init__(self, h: Hierarchy, targets: TargetSet):
        self.h = h
        self.targets = targets

    def __call__(self, q: int) -> Answer:
        return truthful_answer(self.h, self.targets, q)


class NoisyOracle:
    """Flips the truthful answer with fixed probability on difficult objects.

    The per-question random draws come from a generator seeded once at
    construction, so a given (seed, question sequence) replays identically.
    """

    def __init__(self, h: Hierarchy, targets: TargetSet,
                 cfg: NoisyOracleConfig, is_difficult: bool):
        self.h = h
        self.targets = targets
        self.cfg = cfg
        self.is_difficult = is_difficult
        self._rng = random.Random(cfg.rng_seed)

    def __call__(self, q: int) -> Answer:
        ans = truthful_answer(self.h, self.targets, q)
        if self.is_difficult and self._rng.random() < self.cfg.wrong_probability:
            ans = ans.flipped()
        return ans


def noisy_answer(h: Hierarchy, targets: TargetSet, q: int,
                 cfg: NoisyOracleConfig, is_difficult: bool,
                 rng: random.Random) -> Answer:
    """Single-shot form of NoisyOracle for callers managing their own rng."""
    ans = truthful_answer(h, targets, q)
    if is_difficult and rng.random() < cfg.wrong_probability:
        ans = ans.flipped()
    return ans


def load_target_sets(text: str, h: Hierarchy) -> List[TargetSet]:
    """Parse a JSON array of arrays of label strings, one per query object."""
    doc = json.loads(text)
    if not isinstance(doc, list):
        raise ValueError("target file must be a JSON array of arrays")
    out = []
    for i, group in enumerate(doc):
        try:
            ids = [h.id_of(lab) for lab in group]
        except KeyError as exc:
            raise ValueError(f"object {i}: {exc}") from None
        out.append(TargetSet.create(h, ids))
    return out


def dump_target_sets(tsets: Iterable[TargetSet], h: Hierarchy) -> str:
    return json.dumps([[h.label[v] for v in sorted(t.members)] for t in tsets])
