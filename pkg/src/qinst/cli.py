"""Command-line entries: `qsolve` (single problem) and `qbench` (harness)."""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import gbdt
from .clausify import clausify
from .errors import QinstError
from .guidance import AdmissionGate, ingest
from .harness import (NO_MODEL, ResultMatrix, Strategy, collect_labels,
                      cover_table, greedy_cover, load_strategies, run_matrix,
                      scatter_dump, split_corpus, transfer_report, transfer_table)
from .needles import gen_needle_corpus
from .smtparse import parse_file
from .solver import SolveConfig, dump_instantiations, run_with_gate
from .terms import Kind, kind_count


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--full-saturate-quant", action="store_true",
                   help="enable enumerative instantiation")
    p.add_argument("--no-ematch", action="store_true", help="disable e-matching")
    p.add_argument("--trigger-sel", choices=("min", "max"), default="min")
    p.add_argument("--multi-trigger-priority", action="store_true")
    p.add_argument("--enum-lemmas-per-round", type=int, default=1)
    p.add_argument("--ematch-lemmas-per-round", type=int, default=4)
    p.add_argument("--max-rounds", type=int, default=10_000)
    p.add_argument("--max-lemmas", type=int, default=100_000)
    p.add_argument("--timeout", type=float, default=60.0,
                   help="virtual-seconds budget")
    p.add_argument("--wall-clock", type=float, default=None,
                   help="optional wall-clock safety limit in seconds")
    p.add_argument("--decision-budget", type=int, default=200_000)


def _config_from(args) -> SolveConfig:
    return SolveConfig(
        ematch=not args.no_ematch,
        enum=args.full_saturate_quant,
        trigger_sel=args.trigger_sel,
        multi_trigger_priority=args.multi_trigger_priority,
        enum_lemmas_per_round=args.enum_lemmas_per_round,
        ematch_lemmas_per_round=args.ematch_lemmas_per_round,
        max_rounds=args.max_rounds,
        max_lemmas=args.max_lemmas,
        timeout=args.timeout,
        wall_clock_s=args.wall_clock,
        decision_budget=args.decision_budget,
        seed=getattr(args, "ml_seed", 0),
    )


def qsolve_main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="qsolve",
                                 description="solve one .smt2 problem")
    ap.add_argument("file")
    _solver_flags(ap)
    ap.add_argument("--ml-model", default=None)
    ap.add_argument("--ml-seed", type=int, default=0)
    ap.add_argument("--threshold", default="random",
                    help="random (default) or fixed:<x>")
    ap.add_argument("--dump-instantiations", default=None, metavar="PATH")
    ap.add_argument("--produce-proofs", action="store_true",
                    help="dump only instantiations used by the refutation")
    ap.add_argument("--stats", action="store_true")
    args = ap.parse_args(argv)

    try:
        problem = parse_file(args.file)
        cp = clausify(problem)
        model = gbdt.load(args.ml_model) if args.ml_model else None
        gate = AdmissionGate(model, seed=args.ml_seed, problem=problem.name,
                             threshold=args.threshold)
        verdict = run_with_gate(cp, _config_from(args), gate)
    except QinstError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(verdict.status)
    if args.stats:
        for key in sorted(verdict.stats):
            print(f"{key}={verdict.stats[key]}")
    if args.dump_instantiations:
        dump_instantiations(verdict, problem.table, args.dump_instantiations,
                            only_used=args.produce_proofs)
    return 0 if verdict.status in ("sat", "unsat") else 1


# -- qbench ---------------------------------------------------------------------

def _corpus_problems(directory, ids=None) -> list[tuple[str, str]]:
    if ids is None:
        listing = os.path.join(directory, "corpus.txt")
        if os.path.exists(listing):
            with open(listing, encoding="utf-8") as fh:
                ids = [ln.strip() for ln in fh if ln.strip()]
        else:
            ids = sorted(f[:-5] for f in os.listdir(directory)
                         if f.endswith(".smt2"))
    return [(pid, os.path.join(directory, pid + ".smt2")) for pid in ids]


def _ids_for(args) -> list[str] | None:
    if args.split:
        with open(args.split, encoding="utf-8") as fh:
            data = json.load(fh)
        return data[args.part]
    return None


def _parse_models(entries) -> dict[str, str]:
    out = {}
    for e in entries or []:
        name, _, path = e.partition("=")
        if not path:
            raise SystemExit(f"--model needs name=path, got {e!r}")
        out[name] = path
    return out


def feature_name(i: int) -> str:
    """Stable v1 layout: context half first, quantifier half second."""
    k = kind_count()
    half, kind = ("C", i) if i < k else ("Q", i - k)
    return f"{half}:{Kind(kind).name.lower()}"


def qbench_main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="qbench", description="evaluation harness")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen-needle", help="generate a synthetic corpus")
    g.add_argument("--out", required=True)
    g.add_argument("--problems", type=int, default=320)
    g.add_argument("--distractors", type=int, default=30)
    g.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("split", help="90:5:5 corpus split")
    s.add_argument("--dir", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)

    r = sub.add_parser("run", help="evaluate strategies x models x problems")
    r.add_argument("--dir", required=True)
    r.add_argument("--strategies", required=True)
    r.add_argument("--model", action="append", metavar="NAME=PATH")
    r.add_argument("--split", default=None)
    r.add_argument("--part", default="holdout",
                   choices=("train", "dev", "holdout"))
    r.add_argument("--timeout", type=float,
                   default=float(os.environ.get("QSOLVE_TIMEOUT", "60")))
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", required=True)

    lb = sub.add_parser("label", help="collect training labels from unguided runs")
    lb.add_argument("--dir", required=True)
    lb.add_argument("--strategies", required=True)
    lb.add_argument("--strategy", required=True)
    lb.add_argument("--split", default=None)
    lb.add_argument("--part", default="train",
                    choices=("train", "dev", "holdout"))
    lb.add_argument("--seed", type=int, default=0)
    lb.add_argument("--out", required=True)

    t = sub.add_parser("train", help="grid-train and select a model")
    t.add_argument("--data", nargs="+", required=True)
    t.add_argument("--dev-fraction", type=float, default=0.1)
    t.add_argument("--dev-ids", default=None,
                   help="split.json whose dev list fixes the dev problems")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", required=True)

    c = sub.add_parser("cover", help="greedy portfolio cover table")
    c.add_argument("--results", required=True)
    c.add_argument("-k", type=int, default=None)
    c.add_argument("--out", default=None)

    tr = sub.add_parser("transfer", help="per-strategy model-impact table")
    tr.add_argument("--results", required=True)
    tr.add_argument("--out", default=None)

    sc = sub.add_parser("scatter", help="per-problem runtime pairs as CSV")
    sc.add_argument("--results", required=True)
    sc.add_argument("--s1", required=True, metavar="STRATEGY:MODEL")
    sc.add_argument("--s2", required=True, metavar="STRATEGY:MODEL")
    sc.add_argument("--out", required=True)

    args = ap.parse_args(argv)

    if args.cmd == "gen-needle":
        ids = gen_needle_corpus(args.out, args.problems, args.distractors, args.seed)
        print(f"wrote {len(ids)} problems to {args.out}")
    elif args.cmd == "split":
        problems = _corpus_problems(args.dir)
        cs = split_corpus([pid for pid, _ in problems], args.seed)
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({"train": cs.train, "dev": cs.dev, "holdout": cs.holdout},
                      fh, indent=1)
        print(f"split {len(cs.train)}/{len(cs.dev)}/{len(cs.holdout)} -> {args.out}")
    elif args.cmd == "run":
        strategies = load_strategies(args.strategies)
        problems = _corpus_problems(args.dir, _ids_for(args))
        matrix = run_matrix(strategies, problems, _parse_models(args.model),
                            timeout=args.timeout, jobs=args.jobs, seed=args.seed)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(matrix.to_csv())
        print(f"wrote {len(matrix.cells)} cells -> {args.out}")
    elif args.cmd == "label":
        strategies = {s.name: s for s in load_strategies(args.strategies)}
        if args.strategy not in strategies:
            raise SystemExit(f"unknown strategy {args.strategy!r}")
        problems = _corpus_problems(args.dir, _ids_for(args))
        n = collect_labels(problems, strategies[args.strategy], args.out,
                           seed=args.seed)
        print(f"collected {n} labeled examples -> {args.out}")
    elif args.cmd == "train":
        dev_ids = None
        if args.dev_ids:
            with open(args.dev_ids, encoding="utf-8") as fh:
                dev_ids = json.load(fh)["dev"]
        data = ingest(args.data, dev_fraction=args.dev_fraction, seed=args.seed,
                      dev_ids=dev_ids)
        candidates = [gbdt.train(data, hp) for hp in gbdt.GRID]
        best = gbdt.select_model(candidates, data)
        gbdt.save(best, args.out)
        pos, neg = gbdt.selection_metric(best, data.part("dev") or data.rows)
        print(f"selected model: trees={len(best.trees)} hp={best.hp}")
        print(f"dev accuracy: pos={pos:.4f} neg={neg:.4f} "
              f"metric={2 * pos + neg:.4f}")
        print("feature importance (splits, gain):")
        for feat, splits, gain in gbdt.importance(best)[:10]:
            print(f"  {feature_name(feat):<16} {splits:>6} {gain:.4f}")
    elif args.cmd == "cover":
        with open(args.results, encoding="utf-8") as fh:
            matrix = ResultMatrix.from_csv(fh.read())
        table = cover_table(greedy_cover(matrix, args.k))
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(table)
        print(table, end="")
    elif args.cmd == "transfer":
        with open(args.results, encoding="utf-8") as fh:
            matrix = ResultMatrix.from_csv(fh.read())
        strategies = sorted({s for s, _ in matrix.pairs()})
        models = sorted({m for _, m in matrix.pairs() if m != NO_MODEL})
        table = transfer_table(transfer_report(matrix, strategies, models), models)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(table)
        print(table, end="")
    elif args.cmd == "scatter":
        with open(args.results, encoding="utf-8") as fh:
            matrix = ResultMatrix.from_csv(fh.read())
        s1 = tuple(args.s1.split(":", 1))
        s2 = tuple(args.s2.split(":", 1))
        csv_text = scatter_dump(matrix, s1, s2)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        print(f"wrote {args.out}")
    return 0
