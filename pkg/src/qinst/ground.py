"""Lazy-SMT ground solver: DPLL over boolean models, congruence check per model.

Quantified clauses enter as opaque unit propositions.  Theory conflicts add
the negated (minimized) explanation as a blocking clause and search resumes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .congruence import CongruenceState, eval_numeral_atom
from .terms import COMPARE_KINDS, Kind, Term, TermTable

# clause = tuple of (atom, polarity) literals
Clause = tuple[tuple[Term, bool], ...]

DEFAULT_DECISION_BUDGET = 200_000

_THEORY_KINDS = (Kind.EQUAL, Kind.UF_APPLY, Kind.UF_CONST, Kind.SKOLEM,
                 Kind.TRUE, Kind.FALSE)


@dataclass
class GroundModel:
    assignment: dict[int, bool]
    cc: CongruenceState


@dataclass
class GroundResult:
    status: str  # "sat" | "unsat" | "unknown"
    model: GroundModel | None = None
    decisions: int = 0
    conflicts: int = 0


def _is_theory_atom(atom: Term, table: TermTable) -> bool:
    if atom.kind is Kind.EQUAL:
        return True
    if atom.kind in (Kind.UF_APPLY, Kind.UF_CONST, Kind.SKOLEM):
        return atom.sort == table.BOOL
    return atom.kind in (Kind.TRUE, Kind.FALSE)


def solve_ground(clauses: list[Clause], table: TermTable,
                 decision_budget: int = DEFAULT_DECISION_BUDGET) -> GroundResult:
    """Decide the ground clause set; deterministic for a fixed clause order."""
    atom_ids = sorted({atom.id for cl in clauses for atom, _ in cl})
    atoms = [table.terms[i] for i in atom_ids]
    index = {aid: i for i, aid in enumerate(atom_ids)}
    n = len(atoms)

    work: list[list[tuple[int, bool]]] = [
        [(index[a.id], p) for a, p in cl] for cl in clauses]
    # numeral-decidable atoms become forced units
    for i, atom in enumerate(atoms):
        val = eval_numeral_atom(table, atom)
        if val is not None:
            work.append([(i, val)])

    value: list[bool | None] = [None] * n
    trail: list[int] = []
    # open decisions: (trail length before the decision, atom index, tried True)
    levels: list[tuple[int, int, bool]] = []
    decisions = 0
    conflicts = 0

    def propagate() -> bool:
        changed = True
        while changed:
            changed = False
            for cl in work:
                sat = False
                unassigned = None
                open_count = 0
                for (i, pos) in cl:
                    v = value[i]
                    if v is None:
                        open_count += 1
                        unassigned = (i, pos)
                        if open_count > 1:
                            break
                    elif v == pos:
                        sat = True
                        break
                if sat or open_count > 1:
                    continue
                if open_count == 0:
                    return True
                i, pos = unassigned
                value[i] = pos
                trail.append(i)
                changed = True
        return False

    def backtrack() -> bool:
        while levels:
            tlen, ai, tried = levels.pop()
            while len(trail) > tlen:
                value[trail.pop()] = None
            if not tried:
                value[ai] = True
                trail.append(ai)
                levels.append((tlen, ai, True))
                return True
        return False

    while True:
        if propagate():
            conflicts += 1
            if not backtrack():
                return GroundResult("unsat", None, decisions, conflicts)
            continue
        branch = None
        for i in range(n):
            if value[i] is None:
                branch = i
                break
        if branch is None:
            cc = CongruenceState(table)
            explanation = None
            for i in range(n):
                if _is_theory_atom(atoms[i], table):
                    explanation = cc.assert_lit(atoms[i], value[i])
                    if explanation is not None:
                        break
            if explanation is None:
                model = GroundModel({aid: value[index[aid]] for aid in atom_ids}, cc)
                return GroundResult("sat", model, decisions, conflicts)
            conflicts += 1
            work.append([(index[a.id], not p) for a, p in explanation])
            if not backtrack():
                return GroundResult("unsat", None, decisions, conflicts)
            continue
        decisions += 1
        if decisions > decision_budget:
            return GroundResult("unknown", None, decisions, conflicts)
        levels.append((len(trail), branch, False))
        value[branch] = False
        trail.append(branch)


def minimize_used_lemmas(base: list[Clause], lemmas: list[tuple[int, Clause]],
                         table: TermTable,
                         decision_budget: int = DEFAULT_DECISION_BUDGET) -> list[int]:
    """Deletion-based minimization of the instantiation lemmas in a refutation.

    `lemmas` pairs lemma term ids with their clause form.  A lemma is kept iff
    dropping it makes the set satisfiable (or unknown).  The result is minimal
    but not necessarily minimum.
    """
    keep = list(lemmas)
    i = 0
    while i < len(keep):
        trial = keep[:i] + keep[i + 1:]
        r = solve_ground(base + [cl for _, cl in trial], table, decision_budget)
        if r.status == "unsat":
            keep = trial
        else:
            i += 1
    return [lid for lid, _ in keep]
