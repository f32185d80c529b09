"""Synthetic data generation, experiment sweeps, and fixture verification.

A sweep runs every (algorithm, k, query object) combination once at the
largest requested budget and snapshots the would-be selection at each
smaller budget: question choice never looks at the remaining budget, so the
checkpointed run is identical to independent per-budget runs at a quarter
of the cost.  Query objects are independent and may fan out over worker
processes; rows are reduced in a fixed order so reports are reproducible.
"""

from __future__ import annotations

import io
import json
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .hierarchy import Hierarchy, load_hierarchy
from .oracle import (
    Answer, NoisyOracle, NoisyOracleConfig, TargetSet, TruthfulOracle,
    load_target_sets,
)
from .penalty import set_penalty
from .session import MULTI, SINGLE, apply_answer, init_session
from .engines import make_engine, run_session
from .algo_dp_plus import FirstRoundCache, precompute_first_round


class GenerationError(ValueError):
    pass


def gen_random_tree(n: int, max_degree: int, seed: int,
                    attach: str = "uniform") -> Hierarchy:
    """Random tree over n vertices with bounded out-degree.

    "uniform" attaches each new vertex to a parent drawn uniformly from the
    vertices with spare capacity; "preferential" draws parents with weight
    proportional to 1 + their current out-degree, which produces the big
    fan-out hubs typical of real label taxonomies.  Deterministic per seed.
    """
    if n < 1:
        raise GenerationError("need at least one vertex")
    if n > 1 and max_degree < 1:
        raise GenerationError("max_degree must be >= 1 for more than one vertex")
    rng = random.Random(seed)
    parent: List[Optional[int]] = [None] * n
    degree = [0] * n

    if attach == "uniform":
        eligible = [0]
        for v in range(1, n):
            i = rng.randrange(len(eligible))
            p = eligible[i]
            parent[v] = p
            degree[p] += 1
            if degree[p] >= max_degree:
                eligible[i] = eligible[-1]
                eligible.pop()
            eligible.append(v)
    elif attach == "preferential":
        bag = [0]
        for v in range(1, n):
            while True:
                i = rng.randrange(len(bag))
                p = bag[i]
                if degree[p] < max_degree:
                    break
                bag[i] = bag[-1]
                bag.pop()
            parent[v] = p
            degree[p] += 1
            bag.append(p)
            bag.append(v)
    else:
        raise GenerationError(f"unknown attachment mode {attach!r}")
    return Hierarchy(parent, [f"n{i}" for i in range(n)])


def sample_targets(h: Hierarchy, count_range: Tuple[int, int], seed: int,
                   attempts: int = 50) -> TargetSet:
    """Random pairwise-independent target set with size in count_range."""
    lo, hi = count_range
    if lo < 1 or hi < lo:
        raise GenerationError("count_range must satisfy 1 <= lo <= hi")
    leaves = sum(1 for v in range(h.n) if not h.children[v])
    if lo > leaves:
        raise GenerationError(
            f"cannot place {lo} independent targets: tree has only {leaves} leaves")
    rng = random.Random(seed)
    want = rng.randint(lo, min(hi, leaves))
    order = list(range(h.n))
    for _ in range(attempts):
        rng.shuffle(order)
        chosen: List[int] = []
        for v in order:
            if all(not h.is_ancestor(v, c) and not h.is_ancestor(c, v)
                   for c in chosen):
                chosen.append(v)
                if len(chosen) == want:
                    return TargetSet(frozenset(chosen))
        # fall through and reshuffle
    # Leaves are always mutually independent.
    leaf_ids = [v for v in range(h.n) if not h.children[v]]
    rng.shuffle(leaf_ids)
    return TargetSet(frozenset(leaf_ids[:want]))


@dataclass(frozen=True)
class TargetGeneratorSpec:
    objects: int
    min_targets: int
    max_targets: int


@dataclass
class ExperimentConfig:
    hierarchy: Union[str, Path, Hierarchy]
    targets: Union[str, Path, TargetGeneratorSpec, List[TargetSet]]
    algorithms: Sequence[str]
    budgets: Sequence[int]
    ks: Sequence[int] = (1,)
    noise: Optional[NoisyOracleConfig] = None
    seed: int = 0
    output: Optional[Union[str, Path]] = None
    workers: int = 0                 # 0 = one per cpu
    measure_time: bool = True
    max_timed_questions: Optional[int] = None

    def __post_init__(self):
        if not self.budgets or not self.ks:
            raise ValueError("budgets and ks must be non-empty")
        for a in self.algorithms:
            if a not in ("stbis", "kbm-dp", "kbm-topk", "kbm-dp-plus",
                         "bing", "bing-single", "bing-multi"):
                raise ValueError(f"unknown algorithm {a!r}")


@dataclass(frozen=True)
class ResultRow:
    algorithm: str
    b: int
    k: int
    object_id: int
    penalty: int
    questions: int
    total_us: int
    per_question_us: int


@dataclass
class ExperimentReport:
    rows: List[ResultRow]

    CSV_HEADER = "algorithm,b,k,object_id,penalty,questions,total_us,per_question_us"

    def mean_penalty(self, algorithm: str, b: int, k: int) -> float:
        vals = [r.penalty for r in self.rows
                if r.algorithm == algorithm and r.b == b and r.k == k]
        if not vals:
            raise KeyError(f"no rows for ({algorithm}, b={b}, k={k})")
        return sum(vals) / len(vals)

    def mean_per_question_us(self, algorithm: str, b: int, k: int) -> float:
        vals = [r.per_question_us for r in self.rows
                if r.algorithm == algorithm and r.b == b and r.k == k]
        return sum(vals) / len(vals) if vals else 0.0

    def summary(self) -> List[dict]:
        keys = sorted({(r.algorithm, r.b, r.k) for r in self.rows})
        out = []
        for alg, b, k in keys:
            rows = [r for r in self.rows
                    if (r.algorithm, r.b, r.k) == (alg, b, k)]
            out.append({
                "algorithm": alg, "b": b, "k": k,
                "objects": len(rows),
                "mean_penalty": sum(r.penalty for r in rows) / len(rows),
                "mean_questions": sum(r.questions for r in rows) / len(rows),
                "mean_total_us": sum(r.total_us for r in rows) / len(rows),
                "mean_per_question_us":
                    sum(r.per_question_us for r in rows) / len(rows),
            })
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(self.CSV_HEADER + "\n")
        for r in self.rows:
            buf.write(f"{r.algorithm},{r.b},{r.k},{r.object_id},"
                      f"{r.penalty},{r.questions},{r.total_us},{r.per_question_us}\n")
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "rows": [r.__dict__ for r in self.rows],
            "summary": self.summary(),
        }, indent=2)


def _mode_for(algorithm: str, tsets: List[TargetSet]) -> str:
    if algorithm in ("stbis", "bing-single"):
        return SINGLE
    if algorithm in ("kbm-dp", "kbm-topk", "kbm-dp-plus", "bing-multi"):
        return MULTI
    # plain "bing": single when every object carries exactly one target
    return SINGLE if all(len(t.members) == 1 for t in tsets) else MULTI


def _resolve_hierarchy(source) -> Hierarchy:
    if isinstance(source, Hierarchy):
        return source
    path = Path(source)
    fmt = "json" if path.suffix == ".json" else "edge-list"
    return load_hierarchy(path.read_text(), fmt)


def _resolve_targets(cfg: ExperimentConfig, h: Hierarchy) -> List[TargetSet]:
    t = cfg.targets
    if isinstance(t, TargetGeneratorSpec):
        return [sample_targets(h, (t.min_targets, t.max_targets),
                               seed=cfg.seed * 1_000_003 + i)
                for i in range(t.objects)]
    if isinstance(t, (str, Path)):
        return load_target_sets(Path(t).read_text(), h)
    return list(t)


def _difficult_flags(cfg: ExperimentConfig, n_objects: int) -> List[bool]:
    if cfg.noise is None:
        return [False] * n_objects
    rng = random.Random(cfg.noise.rng_seed * 7_777_777 + cfg.seed)
    flags = [False] * n_objects
    quota = round(cfg.noise.difficult_fraction * n_objects)
    for i in rng.sample(range(n_objects), quota):
        flags[i] = True
    return flags


# Worker-process globals, installed once per worker by _init_worker.
_WORK: dict = {}


def _init_worker(tree_text: str, tree_fmt: str, cfg: ExperimentConfig,
                 target_text: str, cache_blobs: Dict[int, str]) -> None:
    h = load_hierarchy(tree_text, tree_fmt)
    _WORK["h"] = h
    _WORK["cfg"] = cfg
    _WORK["targets"] = load_target_sets(target_text, h)
    _WORK["caches"] = {
        k: FirstRoundCache.from_json(blob) for k, blob in cache_blobs.items()
    }
    _WORK["difficult"] = _difficult_flags(cfg, len(_WORK["targets"]))


def _run_task(task: Tuple[str, int, int]) -> List[ResultRow]:
    algorithm, k, object_id = task
    return _run_object(
        _WORK["h"], _WORK["cfg"], _WORK["targets"], _WORK["caches"],
        _WORK["difficult"], algorithm, k, object_id)


def _run_object(h: Hierarchy, cfg: ExperimentConfig, tsets: List[TargetSet],
                caches: Dict[int, FirstRoundCache], difficult: List[bool],
                algorithm: str, k: int, object_id: int) -> List[ResultRow]:
    targets = tsets[object_id]
    mode = _mode_for(algorithm, tsets)
    engine = make_engine(algorithm, h, k, mode=mode,
                         dp_plus_cache=caches.get(k))
    if cfg.noise is None:
        oracle = TruthfulOracle(h, targets)
    else:
        per_session = NoisyOracleConfig(
            cfg.noise.difficult_fraction, cfg.noise.wrong_probability,
            rng_seed=cfg.noise.rng_seed * 31 + object_id)
        oracle = NoisyOracle(h, targets, per_session, difficult[object_id])
    budgets = sorted(set(cfg.budgets))
    res = run_session(h, engine, oracle, b=budgets[-1], k=k,
                      checkpoints=budgets,
                      max_timed_questions=cfg.max_timed_questions)
    t = sorted(targets.members)
    rows = []
    for b in budgets:
        sel = res.checkpoint_selections[b]
        questions = min(res.questions_asked, b)
        if cfg.measure_time and res.timed_questions:
            per_q = res.question_time / res.timed_questions
            total = per_q * questions
        else:
            per_q = total = 0.0
        rows.append(ResultRow(
            algorithm=algorithm, b=b, k=k, object_id=object_id,
            penalty=set_penalty(h, sel.members, t),
            questions=questions,
            total_us=int(total * 1e6),
            per_question_us=int(per_q * 1e6),
        ))
    return rows


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Full sweep over (algorithm, k, query object); see module docstring."""
    from .oracle import dump_target_sets

    h = _resolve_hierarchy(cfg.hierarchy)
    tsets = _resolve_targets(cfg, h)
    if not tsets:
        raise ValueError("no query objects")
    difficult = _difficult_flags(cfg, len(tsets))

    caches: Dict[int, FirstRoundCache] = {}
    if "kbm-dp-plus" in cfg.algorithms:
        for k in sorted(set(cfg.ks)):
            caches[k] = precompute_first_round(h, k)

    tasks: List[Tuple[str, int, int]] = []
    for algorithm in cfg.algorithms:
        k_list = [1] if _mode_for(algorithm, tsets) == SINGLE else sorted(set(cfg.ks))
        for k in k_list:
            for object_id in range(len(tsets)):
                tasks.append((algorithm, k, object_id))

    workers = cfg.workers or os.cpu_count() or 1
    rows: List[ResultRow] = []
    if workers <= 1 or len(tasks) < 4:
        for task in tasks:
            rows.extend(_run_object(h, cfg, tsets, caches, difficult, *task))
    else:
        tree_text = "\n".join(
            f"{h.label[h.parent[v]]}\t{h.label[v]}"
            for v in range(h.n) if h.parent[v] is not None) or h.label[h.root]
        target_text = dump_target_sets(tsets, h)
        cache_blobs = {k: c.to_json() for k, c in caches.items()}
        # Workers rebuild the tree and targets from text, so the config they
        # receive carries neither (keeps the per-worker pickle small).
        worker_cfg = replace(cfg, hierarchy="<sent as text>",
                             targets="<sent as text>")
        with ProcessPoolExecutor(
                max_workers=workers, initializer=_init_worker,
                initargs=(tree_text, "edge-list", worker_cfg, target_text,
                          cache_blobs)) as ex:
            for out in ex.map(_run_task, tasks, chunksize=8):
                rows.extend(out)

    rows.sort(key=lambda r: (r.algorithm, r.b, r.k, r.object_id))
    report = ExperimentReport(rows)
    if cfg.output:
        path = Path(cfg.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        if path.suffix == ".json":
            path.write_text(report.to_json())
        else:
            path.write_text(report.to_csv())
    return report


# -- fixture verification ------------------------------------------------------


@dataclass
class FixtureReport:
    checked: int = 0
    mismatches: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def note(self, name: str, expected, actual, tol: float = 0.0) -> None:
        self.checked += 1
        if tol:
            # Printed reference cells are rounded to tol*2 decimals; accept
            # anything that rounds to the printed value (half-even boundary
            # padded against float noise).
            bad = abs(actual - expected) > tol + 1e-9
        else:
            bad = actual != expected
        if bad:
            self.mismatches.append(f"{name}: expected {expected}, got {actual}")

    def render(self) -> str:
        lines = [f"checked {self.checked} cells: "
                 f"{'all match' if self.ok else f'{len(self.mismatches)} mismatches'}"]
        lines.extend(f"  {m}" for m in self.mismatches)
        return "\n".join(lines)


def verify_fixtures(initial_pr: Optional[float] = None) -> FixtureReport:
    """Recompute both reference walkthroughs on the demo tree, cell by cell.

    `initial_pr` overrides the single-target prior (test hook for the
    negative control); the default is the uniform prior the tables assume.
    """
    from . import fixtures as fx
    from .algo_single import dfs_gain_all, stbis_next_question
    from .algo_dp import (
        build_dp, calg_no, calg_yes, multi_answer_probabilities,
        kbm_dp_next_question,
    )
    from .session import finalize_selection

    h = fx.demo_hierarchy()
    report = FixtureReport()
    tol = fx.CELL_TOLERANCE

    # Single-target walkthrough.
    st = init_session(h, SINGLE, 2, 1)
    if initial_pr is not None:
        st.pr = [initial_pr] * h.n
    comp = dfs_gain_all(h, st)
    for lab, expect in fx.SINGLE_ROUND1["g_yes"].items():
        row = comp.rows[h.id_of(lab)]
        report.note(f"single.round1.g_yes[{lab}]", expect, row.g_yes)
        report.note(f"single.round1.g_no[{lab}]", fx.SINGLE_ROUND1["g_no"][lab], row.g_no)
        report.note(f"single.round1.p_yes[{lab}]", fx.SINGLE_ROUND1["p_yes"][lab],
                    row.p_yes, tol)
        report.note(f"single.round1.p_no[{lab}]", fx.SINGLE_ROUND1["p_no"][lab],
                    row.p_no, tol)
        report.note(f"single.round1.gain[{lab}]", fx.SINGLE_ROUND1["gain"][lab],
                    row.gain, tol)
    q1 = stbis_next_question(h, st)
    report.note("single.question1", fx.SINGLE_QUESTION1, h.label[q1])
    apply_answer(st, h, h.id_of(fx.SINGLE_QUESTION1), Answer.NO)
    comp2 = dfs_gain_all(h, st)
    for lab, expect in fx.SINGLE_ROUND2_GAIN.items():
        report.note(f"single.round2.gain[{lab}]", expect,
                    comp2.rows[h.id_of(lab)].gain, tol)
    for lab in fx.SINGLE_ROUND2_PRUNED:
        report.note(f"single.round2.pruned[{lab}]", True,
                    h.id_of(lab) not in comp2.rows)
    report.note("single.question2", fx.SINGLE_QUESTION2,
                h.label[stbis_next_question(h, st)])

    # Multi-target walkthrough.
    st = init_session(h, MULTI, 2, 2)
    table = build_dp(h, st)
    g = table.root_value()
    p_yes, p_no = multi_answer_probabilities(h, st)
    for lab, expect in fx.MULTI_ROUND1["g_yes"].items():
        v = h.id_of(lab)
        gy = g - calg_yes(h, st, table, v)
        gn = g - calg_no(h, st, table, v)
        report.note(f"multi.round1.g_yes[{lab}]", expect, gy)
        report.note(f"multi.round1.g_no[{lab}]", fx.MULTI_ROUND1["g_no"][lab], gn)
        report.note(f"multi.round1.gain[{lab}]", fx.MULTI_ROUND1["gain"][lab],
                    gy * float(p_yes[v]) + gn * float(p_no[v]), tol)
    q1 = kbm_dp_next_question(h, st, table=table, probs=(p_yes, p_no))
    report.note("multi.question1", fx.MULTI_QUESTION1, h.label[q1])
    apply_answer(st, h, h.id_of(fx.MULTI_QUESTION1), Answer.YES)
    table2 = build_dp(h, st)
    g2 = table2.root_value()
    p_yes2, p_no2 = multi_answer_probabilities(h, st)
    for lab, expect in fx.MULTI_ROUND2["g_yes"].items():
        v = h.id_of(lab)
        gy = g2 - calg_yes(h, st, table2, v)
        gn = g2 - calg_no(h, st, table2, v)
        report.note(f"multi.round2.g_yes[{lab}]", expect, gy)
        report.note(f"multi.round2.g_no[{lab}]", fx.MULTI_ROUND2["g_no"][lab], gn)
        report.note(f"multi.round2.gain[{lab}]", fx.MULTI_ROUND2["gain"][lab],
                    gy * float(p_yes2[v]) + gn * float(p_no2[v]), tol)
    for lab in fx.MULTI_ROUND2_EXCLUDED:
        v = h.id_of(lab)
        report.note(f"multi.round2.excluded[{lab}]", False,
                    st.p_member[v] and not st.y_member[v])
    q2 = kbm_dp_next_question(h, st, table=table2, probs=(p_yes2, p_no2))
    report.note("multi.question2", fx.MULTI_QUESTION2, h.label[q2])
    apply_answer(st, h, h.id_of(fx.MULTI_QUESTION2), Answer.YES)
    sel = finalize_selection(st, h)
    report.note("multi.final.selection",
                tuple(fx.MULTI_FINAL_SELECTION),
                tuple(sorted(h.label[v] for v in sel.members)))
    t_ids = [h.id_of("v5"), h.id_of("v8")]
    report.note("multi.final.penalty", fx.MULTI_FINAL_PENALTY,
                set_penalty(h, sel.members, t_ids))
    return report
