"""Command-line harness: generate data, simulate, benchmark, verify, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .hierarchy import load_hierarchy
from .oracle import (
    Answer, NoisyOracleConfig, TruthfulOracle, dump_target_sets,
    load_target_sets,
)
from .penalty import set_penalty
from .session import MULTI, SINGLE, apply_answer, export_log, finalize_selection, init_session
from .engines import make_engine, run_session
from .bench import (
    ExperimentConfig, TargetGeneratorSpec, gen_random_tree, run_experiment,
    sample_targets, verify_fixtures,
)


def _load_tree(path: str):
    p = Path(path)
    fmt = "json" if p.suffix == ".json" else "edge-list"
    return load_hierarchy(p.read_text(), fmt)


def _edge_list_text(h) -> str:
    lines = []
    if h.n == 1:
        return h.label[h.root] + "\n"
    for v in range(h.n):
        p = h.parent[v]
        if p is not None:
            lines.append(f"{h.label[p]}\t{h.label[v]}")
    return "\n".join(lines) + "\n"


def cmd_gen(args) -> int:
    h = gen_random_tree(args.n, args.max_degree, args.seed, attach=args.attach)
    Path(args.out).write_text(_edge_list_text(h))
    if args.targets_out:
        tsets = [
            sample_targets(h, (args.min_targets, args.max_targets),
                           seed=args.seed * 1_000_003 + i)
            for i in range(args.objects)
        ]
        Path(args.targets_out).write_text(dump_target_sets(tsets, h))
    print(f"wrote {args.out}: n={h.n} height={h.height} max_degree={h.max_out_degree}")
    return 0


def cmd_simulate(args) -> int:
    h = _load_tree(args.hierarchy)
    tsets = load_target_sets(Path(args.targets).read_text(), h)
    targets = tsets[args.object]
    mode = SINGLE if args.algo in ("stbis", "bing-single") else MULTI
    engine = make_engine(args.algo, h, args.k, mode=mode)
    if args.noise_frac > 0:
        from .oracle import NoisyOracle
        cfg = NoisyOracleConfig(args.noise_frac, args.noise_p, rng_seed=args.seed)
        oracle = NoisyOracle(h, targets, cfg, is_difficult=True)
    else:
        oracle = TruthfulOracle(h, targets)
    res = run_session(h, engine, oracle, b=args.budget, k=args.k)
    state = res.state
    print(export_log(state, h))
    chosen = [h.label[v] for v in res.selection.members]
    penalty = set_penalty(h, res.selection.members, sorted(targets.members))
    print(json.dumps({
        "selections": chosen,
        "penalty_vs_targets": penalty,
        "questions_asked": res.questions_asked,
    }))
    return 0


def cmd_interactive(args) -> int:
    h = _load_tree(args.hierarchy)
    mode = SINGLE if args.algo in ("stbis", "bing-single") else MULTI
    engine = make_engine(args.algo, h, args.k, mode=mode)
    state = init_session(h, mode, args.budget, args.k)
    print(f"{h.n} labels loaded; answer y/n, or q to stop.")
    while not state.terminated:
        q = engine.next_question(state)
        path = " > ".join(h.label[v] for v in h.root_path(q))
        while True:
            try:
                reply = input(f"Does the object belong under '{h.label[q]}'? ({path}) [y/n/q] ")
            except EOFError:
                reply = "q"
            reply = reply.strip().lower()
            if reply in ("y", "n", "q"):
                break
        if reply == "q":
            break
        answer = Answer.YES if reply == "y" else Answer.NO
        apply_answer(state, h, q, answer)
        engine.on_answer(state, q, answer)
        print(f"  remaining candidates: {state.p_size}, budget left: {state.budget_remaining}")
    sel = finalize_selection(state, h)
    print("selections:", ", ".join(h.label[v] for v in sel.members))
    return 0


def cmd_bench(args) -> int:
    if args.gen_objects:
        targets = TargetGeneratorSpec(args.gen_objects, args.min_targets,
                                      args.max_targets)
    else:
        if not args.targets:
            print("--targets or --gen-objects is required", file=sys.stderr)
            return 2
        targets = args.targets
    noise = None
    if args.noise_frac > 0:
        noise = NoisyOracleConfig(args.noise_frac, args.noise_p, rng_seed=args.seed)
    cfg = ExperimentConfig(
        hierarchy=args.hierarchy,
        targets=targets,
        algorithms=args.algo,
        budgets=args.budget,
        ks=args.k,
        noise=noise,
        seed=args.seed,
        output=args.out,
        workers=args.workers,
        measure_time=not args.no_timing,
    )
    report = run_experiment(cfg)
    if args.format == "json" and not args.out:
        print(report.to_json())
    elif not args.out:
        print(report.to_csv(), end="")
    else:
        for row in report.summary():
            print(json.dumps(row))
    return 0


def cmd_verify_fixtures(args) -> int:
    report = verify_fixtures()
    print(report.render())
    return 0 if report.ok else 1


def cmd_serve(args) -> int:
    from .service import serve
    serve(host=args.host, port=args.port, store_dir=args.store_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="taxoquest",
        description="Budget-constrained interactive search in label hierarchies")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random hierarchy and target sets")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--max-degree", type=int, default=8)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--attach", choices=["uniform", "preferential"], default="uniform")
    g.add_argument("--out", required=True)
    g.add_argument("--targets-out")
    g.add_argument("--objects", type=int, default=100)
    g.add_argument("--min-targets", type=int, default=1)
    g.add_argument("--max-targets", type=int, default=3)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("simulate", help="run one simulated session, verbose log")
    s.add_argument("--hierarchy", required=True)
    s.add_argument("--targets", required=True)
    s.add_argument("--object", type=int, default=0)
    s.add_argument("--algo", default="kbm-dp-plus")
    s.add_argument("--budget", type=int, default=50)
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--noise-frac", type=float, default=0.0)
    s.add_argument("--noise-p", type=float, default=0.1)
    s.set_defaults(func=cmd_simulate)

    i = sub.add_parser("interactive", help="answer questions at the terminal")
    i.add_argument("--hierarchy", required=True)
    i.add_argument("--algo", default="kbm-dp-plus")
    i.add_argument("--budget", type=int, default=20)
    i.add_argument("--k", type=int, default=3)
    i.set_defaults(func=cmd_interactive)

    b = sub.add_parser("bench", help="sweep algorithms x budgets x k")
    b.add_argument("--hierarchy", required=True)
    b.add_argument("--targets")
    b.add_argument("--gen-objects", type=int, default=0)
    b.add_argument("--min-targets", type=int, default=1)
    b.add_argument("--max-targets", type=int, default=3)
    b.add_argument("--algo", nargs="+", required=True)
    b.add_argument("--budget", type=int, nargs="+", required=True)
    b.add_argument("--k", type=int, nargs="+", default=[1])
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--noise-frac", type=float, default=0.0)
    b.add_argument("--noise-p", type=float, default=0.1)
    b.add_argument("--out")
    b.add_argument("--format", choices=["csv", "json"], default="csv")
    b.add_argument("--workers", type=int, default=0)
    b.add_argument("--no-timing", action="store_true",
                   help="zero timing columns for byte-reproducible output")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify-fixtures",
                       help="recompute the reference gain tables on the demo tree")
    v.set_defaults(func=cmd_verify_fixtures)

    r = sub.add_parser("serve", help="run the HTTP session service")
    r.add_argument("--host", default="127.0.0.1")
    r.add_argument("--port", type=int, default=8787)
    r.add_argument("--store-dir")
    r.set_defaults(func=cmd_serve)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
