"""Top-level solve loop: ground solving alternating with instantiation rounds.

Budgets are enforced deterministically through a work-unit cost counter, so a
fixed seed reproduces the full trace (verdict, lemma sequence, reported
runtime) exactly; wall-clock time is only a safety net for interactive use.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .clausify import ClausalProblem, lit_parts
from .ematch import ematch_round, generate_triggers
from .enum_inst import EnumCursor, enum_round
from .features import FeatureVector, concat_context, formula_features, problem_features
from .ground import Clause, GroundResult, minimize_used_lemmas, solve_ground
from .guidance import AdmissionGate, QuantRecord, RunLog
from .termdb import TermDb
from .terms import Kind, Quantifier, Term

UNITS_PER_SECOND = 50_000

_COST_DECISION = 1
_COST_CONFLICT = 5
_COST_LEMMA = 20
_COST_QUERY = 1
_COST_ROUND = 5


@dataclass
class SolveConfig:
    ematch: bool = True
    enum: bool = False  # --full-saturate-quant
    trigger_sel: str = "min"
    multi_trigger_priority: bool = False
    enum_lemmas_per_round: int = 1
    ematch_lemmas_per_round: int = 4
    max_rounds: int = 10_000
    max_lemmas: int = 100_000
    timeout: float = 60.0  # virtual seconds (work units / UNITS_PER_SECOND)
    wall_clock_s: float | None = None
    decision_budget: int = 200_000
    seed: int = 0

    def validate(self, has_quantifiers: bool) -> None:
        if has_quantifiers and not (self.ematch or self.enum):
            raise ValueError("quantified problem needs at least one "
                             "instantiation module enabled")
        if self.max_rounds <= 0 or self.max_lemmas <= 0 or self.timeout <= 0:
            raise ValueError("budgets must be positive")


@dataclass
class Verdict:
    status: str  # "unsat" | "sat" | "unknown"
    rounds: int
    lemma_count: int
    runtime: float  # virtual seconds
    log: RunLog
    used_lemmas: set[int] = field(default_factory=set)
    lemma_seq: list[tuple[int, int]] = field(default_factory=list)  # (round, lemma id)
    stats: dict = field(default_factory=dict)


class _Run:
    def __init__(self, cp: ClausalProblem, cfg: SolveConfig, gate: AdmissionGate):
        self.cp = cp
        self.cfg = cfg
        self.gate = gate
        self.table = cp.problem.table
        self.base: list[Clause] = [gc.lits for gc in cp.ground_clauses]
        self.base += [((qc.quantifier.term, True),) for qc in cp.quantified]
        self.lemmas: list[tuple[int, Clause]] = []
        self.lemma_ids: set[int] = set()
        self.lemma_seq: list[tuple[int, int]] = []
        self.db = TermDb(self.table)
        for gc in cp.ground_clauses:
            for atom, _ in gc.lits:
                self.db.ingest_formula(atom)
        for qc in cp.quantified:
            self.db.ingest_formula(qc.quantifier.body)
        self.cursor = EnumCursor()
        self.ctx = problem_features(cp.problem)
        self.qfeatures: dict[int, FeatureVector] = {}
        self.trigger_cache: dict[int, list] = {}
        self.log = RunLog(cp.problem.name, "")
        self.cost = 0
        self.round = 0
        self.decisions = 0

    # -- bookkeeping ---------------------------------------------------------

    def charge(self, units: int) -> None:
        self.cost += units

    def exhausted(self) -> bool:
        return self.cost > self.cfg.timeout * UNITS_PER_SECOND

    def features_of(self, q: Quantifier) -> FeatureVector:
        fv = self.qfeatures.get(q.term.id)
        if fv is None:
            fv = concat_context(self.ctx, formula_features(q.term))
            self.qfeatures[q.term.id] = fv
        return fv

    def record_of(self, q: Quantifier) -> QuantRecord:
        rec = self.log.records.get(q.term.id)
        if rec is None:
            rec = QuantRecord(self.features_of(q))
            self.log.records[q.term.id] = rec
        return rec

    def triggers_of(self, q: Quantifier):
        trigs = self.trigger_cache.get(q.term.id)
        if trigs is None:
            trigs = generate_triggers(q, mode=self.cfg.trigger_sel,
                                      multi_priority=self.cfg.multi_trigger_priority)
            self.trigger_cache[q.term.id] = trigs
        return trigs

    def clauses(self) -> list[Clause]:
        return self.base + [cl for _, cl in self.lemmas]

    def try_add(self, q: Quantifier, lemma: Term, binding) -> str:
        if len(self.lemmas) >= self.cfg.max_lemmas or self.exhausted():
            return "stop"
        if lemma.id in self.lemma_ids:
            return "dup"
        consequent = lemma.children[1]
        parts = consequent.children if consequent.kind is Kind.OR else (consequent,)
        clause = ((q.term, False),) + tuple(lit_parts(p) for p in parts)
        self.lemmas.append((lemma.id, clause))
        self.lemma_ids.add(lemma.id)
        self.lemma_seq.append((self.round + 1, lemma.id))
        self.db.ingest_formula(consequent)
        rec = self.record_of(q)
        rec.instantiated = True
        rec.lemma_ids.append(lemma.id)
        self.charge(_COST_LEMMA)
        return "new"

    def admitted(self) -> tuple[list[Quantifier], bool]:
        """Gate one module pass over all quantifiers, in assertion order."""
        keep: list[Quantifier] = []
        rejected = False
        predicts_before = self.gate.predicts
        for qc in self.cp.quantified:
            q = qc.quantifier
            self.charge(_COST_QUERY)
            if self.gate.admit(q, self.ctx):
                keep.append(q)
                self.record_of(q)
            else:
                rejected = True
        if self.gate.model is not None:
            self.charge((self.gate.predicts - predicts_before)
                        * (2 + len(self.gate.model.trees) // 10))
        return keep, rejected

    # -- verdict assembly -------------------------------------------------------

    def finish(self, status: str, ground: GroundResult | None) -> Verdict:
        used: set[int] = set()
        if status == "unsat":
            used = set(minimize_used_lemmas(self.base, self.lemmas, self.table,
                                            self.cfg.decision_budget))
        self.log.outcome = status
        self.log.used_lemmas = used
        runtime = min(self.cost / UNITS_PER_SECOND, self.cfg.timeout)
        stats = {
            "rounds": self.round,
            "lemmas": len(self.lemmas),
            "decisions": self.decisions,
            "queries": self.gate.queries,
            "admits": self.gate.admits,
            "cost": self.cost,
        }
        return Verdict(status, self.round, len(self.lemmas), runtime, self.log,
                       used, list(self.lemma_seq), stats)


def run_with_gate(cp: ClausalProblem, cfg: SolveConfig,
                  gate: AdmissionGate) -> Verdict:
    cfg.validate(bool(cp.quantified))
    run = _Run(cp, cfg, gate)
    run.log.strategy = getattr(gate, "strategy_name", "")
    started = time.monotonic()

    while True:
        gres = solve_ground(run.clauses(), run.table, cfg.decision_budget)
        run.decisions += gres.decisions
        run.charge(gres.decisions * _COST_DECISION + gres.conflicts * _COST_CONFLICT)
        if gres.status == "unsat":
            return run.finish("unsat", gres)
        if gres.status == "unknown":
            return run.finish("unknown", gres)

        if (run.round >= cfg.max_rounds or len(run.lemmas) >= cfg.max_lemmas
                or run.exhausted()):
            return run.finish("unknown", gres)
        if cfg.wall_clock_s is not None \
                and time.monotonic() - started > cfg.wall_clock_s:
            return run.finish("unknown", gres)

        run.charge(_COST_ROUND)
        new_lemmas: list[Term] = []
        rejected_any = False
        if cfg.ematch and cp.quantified:
            admitted, rejected = run.admitted()
            rejected_any |= rejected
            new_lemmas += ematch_round(admitted, run.db, gres.model.cc, run.table,
                                       run.try_add, run.triggers_of,
                                       per_quant=cfg.ematch_lemmas_per_round)
        if cfg.enum and cp.quantified:
            admitted, rejected = run.admitted()
            rejected_any |= rejected
            new_lemmas += enum_round(admitted, run.db, run.cursor, run.table,
                                     run.try_add,
                                     per_quant=cfg.enum_lemmas_per_round)
        run.round += 1
        if not new_lemmas and not rejected_any:
            return run.finish("sat", gres)


def solve(cp: ClausalProblem, cfg: SolveConfig) -> Verdict:
    """Ungated solve; trace-identical to a gate with no model installed."""
    return run_with_gate(cp, cfg, AdmissionGate(seed=cfg.seed,
                                                problem=cp.problem.name))


def dump_instantiations(verdict: Verdict, table, path, only_used: bool) -> None:
    """Write `(inst <quantifier> (<terms>))` lines for the run's lemmas."""
    lines = []
    for _, lemma_id in verdict.lemma_seq:
        if only_used and lemma_id not in verdict.used_lemmas:
            continue
        qid, binding = table.lemma_provenance[lemma_id]
        terms = " ".join(table.sexpr(table.terms[t]) for t in binding)
        lines.append(f"(inst {table.sexpr(table.terms[qid])} ({terms}))")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))
