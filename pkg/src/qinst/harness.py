"""Benchmark harness: corpus split, strategy matrix, greedy cover, reports."""
from __future__ import annotations

import configparser
import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from . import gbdt
from .clausify import clausify
from .errors import TooSmall
from .guidance import AdmissionGate, emit_training_file, label_run
from .rng import CounterRng
from .smtparse import parse_file
from .solver import SolveConfig, run_with_gate

NO_MODEL = "-"


@dataclass
class Strategy:
    name: str
    config: SolveConfig = field(default_factory=SolveConfig)
    model_path: str | None = None


@dataclass
class CorpusSplit:
    train: list[str]
    dev: list[str]
    holdout: list[str]


def split_corpus(ids: list[str], seed: int) -> CorpusSplit:
    """Deterministic 90:5:5 split: floor(0.9n) / ceil(0.05n) / remainder."""
    ids = list(ids)
    if len(ids) < 20:
        raise TooSmall(f"need at least 20 problems, got {len(ids)}")
    CounterRng(seed, "corpus-split").shuffle(ids)
    n = len(ids)
    n_train = int(0.9 * n)
    n_dev = -(-n * 5 // 100)  # ceil(0.05 n)
    return CorpusSplit(ids[:n_train], ids[n_train:n_train + n_dev],
                       ids[n_train + n_dev:])


# -- strategy config files -----------------------------------------------------

_FLAG_MAP = {
    "full-saturate-quant": ("enum", bool),
    "no-ematch": ("ematch_off", bool),
    "trigger-sel": ("trigger_sel", str),
    "multi-trigger-priority": ("multi_trigger_priority", bool),
    "enum-lemmas-per-round": ("enum_lemmas_per_round", int),
    "ematch-lemmas-per-round": ("ematch_lemmas_per_round", int),
    "max-rounds": ("max_rounds", int),
    "max-lemmas": ("max_lemmas", int),
    "timeout": ("timeout", float),
    "decision-budget": ("decision_budget", int),
    "seed": ("seed", int),
}


def load_strategies(path) -> list[Strategy]:
    """Parse a key=value strategy bundle file (one [section] per strategy)."""
    ini = configparser.ConfigParser(allow_no_value=True, delimiters=("=",))
    ini.optionxform = str
    with open(path, "r", encoding="utf-8") as fh:
        ini.read_file(fh)
    out = []
    for name in ini.sections():
        cfg = SolveConfig()
        model_path = None
        for key, raw in ini.items(name):
            if key == "ml-model":
                model_path = raw
                continue
            if key not in _FLAG_MAP:
                raise ValueError(f"unknown strategy option '{key}' in [{name}]")
            attr, typ = _FLAG_MAP[key]
            if typ is bool:
                val = True if raw is None else raw.strip().lower() in ("true", "1", "on")
            else:
                val = typ(raw.strip())
            if attr == "ematch_off":
                cfg.ematch = not val
            else:
                setattr(cfg, attr, val)
        out.append(Strategy(name, cfg, model_path))
    if len({s.name for s in out}) != len(out):
        raise ValueError("duplicate strategy names")
    return out


# -- result matrix ---------------------------------------------------------------

@dataclass(frozen=True)
class Cell:
    status: str
    runtime: float
    rounds: int
    lemmas: int


class ResultMatrix:
    """(strategy, model, problem) -> outcome/runtime records."""

    def __init__(self):
        self.cells: dict[tuple[str, str, str], Cell] = {}

    def put(self, strategy, model, problem, cell: Cell):
        self.cells[(strategy, model, problem)] = cell

    def get(self, strategy, model, problem) -> Cell:
        return self.cells[(strategy, model, problem)]

    def pairs(self) -> list[tuple[str, str]]:
        return sorted({(s, m) for s, m, _ in self.cells})

    def problems(self) -> list[str]:
        return sorted({p for _, _, p in self.cells})

    def solved_set(self, strategy, model) -> set[str]:
        return {p for (s, m, p), c in self.cells.items()
                if s == strategy and m == model and c.status != "unknown"}

    def solves(self, strategy, model) -> int:
        return len(self.solved_set(strategy, model))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["strategy", "model", "problem", "status", "runtime",
                    "rounds", "lemmas"])
        for key in sorted(self.cells):
            c = self.cells[key]
            w.writerow([*key, c.status, f"{c.runtime:.6f}", c.rounds, c.lemmas])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ResultMatrix":
        m = cls()
        rows = list(csv.reader(io.StringIO(text)))
        for row in rows[1:]:
            s, mo, p, status, runtime, rounds, lemmas = row
            m.put(s, mo, p, Cell(status, float(runtime), int(rounds), int(lemmas)))
        return m


def _run_cell(args):
    (path, problem_id, strategy_name, cfg, model_path, model_name, seed) = args
    try:
        problem = parse_file(path, problem_id)
        cp = clausify(problem)
        model = gbdt.load(model_path) if model_path else None
        gate = AdmissionGate(model, seed=seed, problem=problem_id,
                             strategy=f"{strategy_name}:{model_name}")
        verdict = run_with_gate(cp, cfg, gate)
        runtime = cfg.timeout if verdict.status == "unknown" else verdict.runtime
        return (strategy_name, model_name, problem_id,
                Cell(verdict.status, runtime, verdict.rounds, verdict.lemma_count))
    except Exception:  # per-cell failures become UNKNOWN cells
        return (strategy_name, model_name, problem_id, Cell("unknown", 0.0, 0, 0))


def run_matrix(strategies: list[Strategy], problems: list[tuple[str, str]],
               models: dict[str, str] | None = None, timeout: float | None = None,
               jobs: int = 1, seed: int = 0) -> ResultMatrix:
    """Evaluate every (strategy x model x problem) cell, deterministically.

    `problems` is a list of (id, path); `models` maps model names to files and
    always includes the implicit no-model column.  Runtimes are virtual work
    units, so reruns with equal seeds reproduce the matrix byte for byte.
    """
    model_items = [(NO_MODEL, None)] + sorted((models or {}).items())
    tasks = []
    for strat in strategies:
        for model_name, model_path in model_items:
            pick = strat.model_path if model_path is None and strat.model_path \
                else model_path
            cfg = replace(strat.config)
            if timeout is not None:
                cfg.timeout = timeout
            tasks.append([(path, pid, strat.name, cfg, pick, model_name, seed)
                          for pid, path in problems])
    flat = [t for group in tasks for t in group]
    matrix = ResultMatrix()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for s, m, p, cell in pool.map(_run_cell, flat, chunksize=4):
                matrix.put(s, m, p, cell)
    else:
        for args in flat:
            s, m, p, cell = _run_cell(args)
            matrix.put(s, m, p, cell)
    return matrix


# -- greedy cover and reports ------------------------------------------------------

def format_adds(new: int, prev_total: int) -> str:
    return f"+{100.0 * new / prev_total:.2f}%"


def greedy_cover(matrix: ResultMatrix, k: int | None = None):
    """Greedy portfolio sequence with the solves/+new/=total/adds columns."""
    pairs = matrix.pairs()
    solved = {pair: matrix.solved_set(*pair) for pair in pairs}
    covered: set[str] = set()
    rows = []
    remaining = list(pairs)
    limit = k if k is not None else len(pairs)
    while remaining and len(rows) < limit:
        # max returns the first maximum, so name order breaks ties
        best = max(sorted(remaining), key=lambda pr: len(solved[pr] - covered))
        new = len(solved[best] - covered)
        if new == 0:
            break
        prev = len(covered)
        covered |= solved[best]
        rows.append({
            "strategy": best[0], "model": best[1],
            "solves": len(solved[best]), "new": new, "total": len(covered),
            "adds": format_adds(new, prev) if prev else "-",
        })
        remaining.remove(best)
    return rows


def cover_table(rows) -> str:
    out = ["| strategy | model | solves | +new | =total | adds |",
           "|---|---|---|---|---|---|"]
    for r in rows:
        out.append(f"| {r['strategy']} | {r['model']} | {r['solves']} | "
                   f"+{r['new']} | ={r['total']} | {r['adds']} |")
    return "\n".join(out) + "\n"


def format_gain(solves: int, base: int) -> str:
    return f"+{100.0 * (solves - base) / base:.2f}%"


def transfer_report(matrix: ResultMatrix, strategies: list[str],
                    models: list[str]):
    """Per-strategy baseline solves plus per-model solves and gain."""
    problems = matrix.problems()
    for s in strategies:
        for m in [NO_MODEL] + models:
            for p in problems:
                if (s, m, p) not in matrix.cells:
                    raise KeyError(f"missing cell ({s}, {m}, {p})")
    rows = []
    for s in strategies:
        base = matrix.solves(s, NO_MODEL)
        entry = {"strategy": s, "base": base, "models": {}}
        for m in models:
            solves = matrix.solves(s, m)
            entry["models"][m] = (solves, format_gain(solves, base) if base else "-")
        rows.append(entry)
    return rows


def transfer_table(rows, models: list[str]) -> str:
    head = "| strategy | w/o ML |"
    sep = "|---|---|"
    for m in models:
        head += f" {m} solves | {m} gain |"
        sep += "---|---|"
    out = [head, sep]
    for r in rows:
        line = f"| {r['strategy']} | {r['base']} |"
        for m in models:
            solves, gain = r["models"][m]
            line += f" {solves} | {gain} |"
        out.append(line)
    return "\n".join(out) + "\n"


def scatter_dump(matrix: ResultMatrix, s1: tuple[str, str],
                 s2: tuple[str, str]) -> str:
    """CSV of per-problem runtimes for two (strategy, model) pairs."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["problem", "runtime1", "runtime2"])
    for p in matrix.problems():
        c1 = matrix.get(*s1, p)
        c2 = matrix.get(*s2, p)
        w.writerow([p, f"{c1.runtime:.6f}", f"{c2.runtime:.6f}"])
    return buf.getvalue()


# -- training-data collection -------------------------------------------------------

def collect_labels(problems: list[tuple[str, str]], strategy: Strategy,
                   out_path, seed: int = 0) -> int:
    """Run a strategy unguided over problems; append labels of unsat runs."""
    count = 0
    for pid, path in problems:
        problem = parse_file(path, pid)
        cp = clausify(problem)
        gate = AdmissionGate(None, seed=seed, problem=pid, strategy=strategy.name)
        verdict = run_with_gate(cp, replace(strategy.config), gate)
        if verdict.status != "unsat":
            continue
        examples = [(pid, fv, label) for fv, label in label_run(verdict.log)]
        emit_training_file(examples, out_path)
        count += len(examples)
    return count
