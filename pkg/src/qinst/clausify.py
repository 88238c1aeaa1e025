"""Normalization to clausal form: NNF, skolemization, CNF by distribution.

Clause provenance stays mapped to the originating asserted formula so that
context features and proof labeling can refer back to the input.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import BlowupGuard
from .smtparse import Problem
from .terms import Kind, NO_SYMBOL, Quantifier, Term, TermTable, free_bound_vars

DEFAULT_CLAUSE_BUDGET = 100_000


@dataclass(frozen=True)
class GroundClause:
    """Disjunction of ground literals; `origin` indexes Problem.asserted."""

    lits: tuple[tuple[Term, bool], ...]
    origin: int


@dataclass(frozen=True)
class QuantClause:
    quantifier: Quantifier
    origin: int


@dataclass
class ClausalProblem:
    problem: Problem
    ground_clauses: list[GroundClause]
    quantified: list[QuantClause]


def lit_parts(t: Term) -> tuple[Term, bool]:
    """Split a literal into (atom, polarity)."""
    if t.kind is Kind.NOT:
        return t.children[0], False
    return t, True


class _Clausifier:
    def __init__(self, problem: Problem, clause_budget: int):
        self.problem = problem
        self.table = problem.table
        self.budget = clause_budget
        self.skolem_counter = 0
        self.rename_counter = 0

    # -- negation normal form ------------------------------------------------

    def nnf(self, t: Term, pos: bool) -> Term:
        tb = self.table
        k = t.kind
        if k is Kind.NOT:
            return self.nnf(t.children[0], not pos)
        if k in (Kind.AND, Kind.OR):
            out_kind = k if pos else (Kind.OR if k is Kind.AND else Kind.AND)
            return tb.mk(out_kind, NO_SYMBOL,
                         tuple(self.nnf(c, pos) for c in t.children))
        if k is Kind.IMPLIES:
            a, b = t.children
            if pos:
                return tb.mk(Kind.OR, NO_SYMBOL, (self.nnf(a, False), self.nnf(b, True)))
            return tb.mk(Kind.AND, NO_SYMBOL, (self.nnf(a, True), self.nnf(b, False)))
        if k is Kind.EQUIV:
            a, b = t.children
            if pos:
                return tb.mk(Kind.AND, NO_SYMBOL, (
                    tb.mk(Kind.OR, NO_SYMBOL, (self.nnf(a, False), self.nnf(b, True))),
                    tb.mk(Kind.OR, NO_SYMBOL, (self.nnf(b, False), self.nnf(a, True)))))
            return tb.mk(Kind.OR, NO_SYMBOL, (
                tb.mk(Kind.AND, NO_SYMBOL, (self.nnf(a, True), self.nnf(b, False))),
                tb.mk(Kind.AND, NO_SYMBOL, (self.nnf(a, False), self.nnf(b, True)))))
        if k is Kind.DISTINCT:
            eq_kind = Kind.EQUIV if t.children[0].sort == tb.BOOL else Kind.EQUAL
            cs = t.children
            pairs = [tb.mk(eq_kind, NO_SYMBOL, (cs[i], cs[j]))
                     for i in range(len(cs)) for j in range(i + 1, len(cs))]
            if pos:
                return tb.mk_and([self.nnf(p, False) for p in pairs])
            return tb.mk_or([self.nnf(p, True) for p in pairs])
        if k in (Kind.FORALL, Kind.EXISTS):
            out_kind = k if pos else (Kind.EXISTS if k is Kind.FORALL else Kind.FORALL)
            return tb.mk(out_kind, NO_SYMBOL,
                         t.children[:-1] + (self.nnf(t.children[-1], pos),))
        if k is Kind.TRUE:
            return tb.true_() if pos else tb.false_()
        if k is Kind.FALSE:
            return tb.false_() if pos else tb.true_()
        # atom: EQUAL, UF application/constant, skolem, comparison
        return t if pos else tb.mk_not(t)

    # -- standardize binders apart --------------------------------------------

    def standardize(self, t: Term, env: dict[Term, Term], used: set[str]) -> Term:
        tb = self.table
        if t.kind in (Kind.FORALL, Kind.EXISTS):
            inner = dict(env)
            new_vars = []
            for v in t.children[:-1]:
                name = tb.symbol_name(v.symbol)
                if name in used:
                    self.rename_counter += 1
                    name = f"{name}!{self.rename_counter}"
                used.add(name)
                nv = tb.bound_var(name, v.sort)
                inner[v] = nv
                new_vars.append(nv)
            body = self.standardize(t.children[-1], inner, used)
            return tb.mk(t.kind, NO_SYMBOL, tuple(new_vars) + (body,))
        if t.kind is Kind.BOUND_VAR:
            return env.get(t, t)
        if t.ground:
            return t
        return tb.mk(t.kind, t.symbol,
                     tuple(self.standardize(c, env, used) for c in t.children), t.sort)

    # -- outer skolemization --------------------------------------------------

    def skolemize(self, t: Term, scope: tuple[Term, ...]) -> Term:
        tb = self.table
        if t.kind is Kind.FORALL:
            body = self.skolemize(t.children[-1], scope + t.children[:-1])
            return tb.mk(Kind.FORALL, NO_SYMBOL, t.children[:-1] + (body,))
        if t.kind is Kind.EXISTS:
            env = {}
            for v in t.children[:-1]:
                name = f"sk!{self.skolem_counter}"
                self.skolem_counter += 1
                env[v] = tb.mk(Kind.SKOLEM, tb.symbol(name), scope, v.sort)
            body = self._replace_vars(t.children[-1], env)
            return self.skolemize(body, scope)
        if t.kind in (Kind.AND, Kind.OR):
            return tb.mk(t.kind, NO_SYMBOL,
                         tuple(self.skolemize(c, scope) for c in t.children))
        return t

    def _replace_vars(self, t: Term, env: dict[Term, Term]) -> Term:
        if t.kind is Kind.BOUND_VAR:
            return env.get(t, t)
        if t.ground or not t.children:
            return t
        return self.table.mk(
            t.kind, t.symbol,
            tuple(self._replace_vars(c, env) for c in t.children), t.sort)

    # -- distribution to CNF ----------------------------------------------------

    def to_clauses(self, t: Term) -> list[list[Term]]:
        if t.kind is Kind.FORALL:
            return self.to_clauses(t.children[-1])
        if t.kind is Kind.AND:
            out = []
            for c in t.children:
                out.extend(self.to_clauses(c))
                if len(out) > self.budget:
                    raise BlowupGuard(f"clause budget {self.budget} exceeded")
            return out
        if t.kind is Kind.OR:
            parts = [self.to_clauses(c) for c in t.children]
            out = [[]]
            for p in parts:
                merged = []
                for base in out:
                    for cl in p:
                        merged.append(base + cl)
                        if len(merged) > self.budget:
                            raise BlowupGuard(
                                f"clause budget {self.budget} exceeded")
                out = merged
            return out
        return [[t]]


def clausify(problem: Problem, clause_budget: int = DEFAULT_CLAUSE_BUDGET) -> ClausalProblem:
    """NNF -> skolemization -> distribution CNF -> per-clause universal closure."""
    cl = _Clausifier(problem, clause_budget)
    tb = problem.table
    ground: list[GroundClause] = []
    quants: list[QuantClause] = []
    seen_ground: set[tuple] = set()
    seen_quant: set[int] = set()

    for origin, formula in enumerate(problem.asserted):
        t = cl.nnf(formula, True)
        t = cl.standardize(t, {}, set())
        t = cl.skolemize(t, ())
        for raw in cl.to_clauses(t):
            lits = _normalize(raw, tb)
            if lits is None:  # clause is trivially true
                continue
            vars_: list[Term] = []
            for atom, _ in lits:
                for v in free_bound_vars(atom):
                    if v not in vars_:
                        vars_.append(v)
            if not lits or not vars_:
                key = lits
                if key in seen_ground:
                    continue
                seen_ground.add(key)
                ground.append(GroundClause(lits, origin))
                continue
            body_terms = [_lit_term(tb, a, p) for a, p in lits]
            body = tb.mk_or(body_terms)
            ordered_vars = tuple(sorted(vars_, key=lambda v: v.id))
            forall = tb.mk(Kind.FORALL, NO_SYMBOL, ordered_vars + (body,))
            if forall.id in seen_quant:
                continue
            seen_quant.add(forall.id)
            quants.append(QuantClause(Quantifier(forall, ordered_vars, body), origin))

    return ClausalProblem(problem, ground, quants)


def _lit_term(tb: TermTable, atom: Term, pos: bool) -> Term:
    return atom if pos else tb.mk_not(atom)


def _normalize(raw: list[Term], tb: TermTable):
    """Dedupe literals, drop false ones, detect tautologies (returns None)."""
    lits: list[tuple[Term, bool]] = []
    seen = set()
    for lt in raw:
        atom, pos = lit_parts(lt)
        if atom.kind is Kind.TRUE:
            if pos:
                return None
            continue
        if atom.kind is Kind.FALSE:
            if not pos:
                return None
            continue
        if (atom.id, not pos) in seen:
            return None
        if (atom.id, pos) in seen:
            continue
        seen.add((atom.id, pos))
        lits.append((atom, pos))
    lits.sort(key=lambda ap: (ap[0].id, ap[1]))
    return tuple(lits)
