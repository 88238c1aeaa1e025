"""Admission gate (random-threshold quantifier filtering) and label extraction."""
from __future__ import annotations

from dataclasses import dataclass, field

from filelock import FileLock

from .errors import FormatError, NotUnsat
from .features import FeatureVector, concat_context, formula_features
from .gbdt import Row, TrainingSet
from .rng import CounterRng
from .terms import Quantifier, kind_count


@dataclass
class QuantRecord:
    """One processed quantifier: its feature vector and the lemmas it produced."""

    features: FeatureVector
    instantiated: bool = False
    lemma_ids: list[int] = field(default_factory=list)


@dataclass
class RunLog:
    problem: str
    strategy: str
    records: dict[int, QuantRecord] = field(default_factory=dict)
    outcome: str = "unknown"
    used_lemmas: set[int] = field(default_factory=set)


class AdmissionGate:
    """Admit a quantifier when its cached score beats a fresh uniform draw.

    Without a model every query is admitted and no randomness is consumed, so
    the gated solver trace is identical to the ungated one.
    """

    def __init__(self, model=None, seed: int = 0, problem: str = "",
                 strategy: str = "", threshold: str = "random"):
        self.model = model
        self.rng = CounterRng(seed, problem, strategy)
        self.threshold = threshold  # "random" or "fixed:<x>"
        self.scores: dict[int, float] = {}
        self.queries = 0
        self.admits = 0
        self.predicts = 0

    def score(self, q: Quantifier, ctx: FeatureVector) -> float:
        """Cached model score for a quantifier; the cache never expires mid-run."""
        s = self.scores.get(q.term.id)
        if s is None:
            self.predicts += 1
            s = self.model.predict(concat_context(ctx, formula_features(q.term)))
            self.scores[q.term.id] = s
        return s

    def clear_cache(self) -> None:
        self.scores.clear()

    def admit(self, q: Quantifier, ctx: FeatureVector) -> bool:
        self.queries += 1
        if self.model is None:
            self.admits += 1
            return True
        s = self.score(q, ctx)
        if self.threshold.startswith("fixed:"):
            ok = s >= float(self.threshold.split(":", 1)[1])
        else:
            ok = s >= self.rng.uniform()
        if ok:
            self.admits += 1
        return ok


def label_run(log: RunLog) -> list[tuple[FeatureVector, int]]:
    """One labeled example per processed quantifier of a successful run.

    Positive iff one of the quantifier's lemmas survived proof minimization.
    """
    if log.outcome != "unsat":
        raise NotUnsat(f"run outcome is {log.outcome!r}; no labels extracted")
    out = []
    for rec in log.records.values():
        label = 1 if any(l in log.used_lemmas for l in rec.lemma_ids) else 0
        out.append((rec.features, label))
    return out


# -- sparse training-file format ---------------------------------------------
# one row per example: "<label> qid:<problem-id> <idx>:<count> <idx>:<count> ..."

def format_example(problem_id: str, features: FeatureVector, label: int) -> str:
    body = " ".join(f"{i}:{features.counts[i]}" for i in sorted(features.counts))
    return f"{label} qid:{problem_id} {body}".rstrip()


def emit_training_file(examples, path) -> None:
    """Append (problem_id, features, label) rows under an exclusive file lock."""
    lines = [format_example(pid, fv, label) for pid, fv, label in examples]
    if not lines:
        return
    with FileLock(str(path) + ".lock"):
        with open(path, "a", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")


def parse_training_line(line: str, width: int) -> Row:
    parts = line.split()
    if len(parts) < 2 or parts[0] not in ("0", "1") \
            or not parts[1].startswith("qid:"):
        raise FormatError(f"bad training row: {line!r}")
    counts = {}
    try:
        for tok in parts[2:]:
            i, c = tok.split(":")
            i, c = int(i), int(c)
            if not 0 <= i < width or c < 1:
                raise ValueError(tok)
            counts[i] = c
    except ValueError:
        raise FormatError(f"bad training row: {line!r}") from None
    return Row(FeatureVector(width, counts), int(parts[0]), parts[1][4:])


def ingest(paths, dev_fraction: float = 0.1, seed: int = 0,
           dev_ids=None) -> TrainingSet:
    """Concatenate training files and perform the problem-level train/dev split.

    With `dev_ids` the split is explicit; otherwise a seeded shuffle reserves
    `dev_fraction` of the problems for the dev partition.
    """
    width = 2 * kind_count()
    rows: list[Row] = []
    for path in paths:
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    rows.append(parse_training_line(line, width))
    problems = sorted({r.problem for r in rows})
    if dev_ids is not None:
        dev = set(dev_ids)
        split = {p: ("dev" if p in dev else "train") for p in problems}
    else:
        shuffled = list(problems)
        CounterRng(seed, "devsplit").shuffle(shuffled)
        n_dev = int(round(dev_fraction * len(problems)))
        dev = set(shuffled[:n_dev])
        split = {p: ("dev" if p in dev else "train") for p in problems}
    return TrainingSet(rows, split)
