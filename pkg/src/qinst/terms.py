"""Hash-consed term DAG: kinds, sorts, ages, substitution and lemma building.

Every other layer works on `Term` handles produced by one `TermTable`.
Structurally equal terms intern to the same object, child ids are always
smaller than the parent id, and the creation counter doubles as the term age
used by enumerative instantiation.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import IntEnum

from .errors import ArityMismatch, SortMismatch, UnboundVariable


class Kind(IntEnum):
    NOT = 0
    AND = 1
    OR = 2
    IMPLIES = 3
    EQUIV = 4
    EQUAL = 5
    DISTINCT = 6
    FORALL = 7
    EXISTS = 8
    BOUND_VAR = 9
    VAR = 10
    SKOLEM = 11
    UF_APPLY = 12
    UF_CONST = 13
    NUMERAL = 14
    LT = 15
    GT = 16
    LE = 17
    GE = 18
    TRUE = 19
    FALSE = 20
    INST_LEMMA = 21


def kind_count() -> int:
    """Size K of the closed kind enumeration (feature vectors are 2K wide)."""
    return len(Kind)


def kind_checksum() -> str:
    """Stable fingerprint of the kind table, embedded in model files."""
    blob = ",".join(k.name for k in Kind).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


NO_SYMBOL = -1

# kinds whose nodes stand for first-order terms (vs formula structure)
TERM_KINDS = frozenset(
    {Kind.UF_APPLY, Kind.UF_CONST, Kind.SKOLEM, Kind.NUMERAL, Kind.TRUE, Kind.FALSE}
)
ATOM_KINDS = frozenset(
    {Kind.EQUAL, Kind.UF_APPLY, Kind.UF_CONST, Kind.SKOLEM,
     Kind.LT, Kind.GT, Kind.LE, Kind.GE, Kind.TRUE, Kind.FALSE, Kind.FORALL}
)
COMPARE_KINDS = frozenset({Kind.LT, Kind.GT, Kind.LE, Kind.GE})

_BOOL_CONNECTIVES = frozenset(
    {Kind.NOT, Kind.AND, Kind.OR, Kind.IMPLIES, Kind.EQUIV}
)
_SYMBOL_KINDS = frozenset(
    {Kind.UF_APPLY, Kind.UF_CONST, Kind.BOUND_VAR, Kind.VAR, Kind.SKOLEM, Kind.NUMERAL}
)


class Term:
    """Immutable interned node; identity (and `id`) is structural identity."""

    __slots__ = ("id", "kind", "symbol", "children", "sort", "age", "ground", "tree_size")

    def __init__(self, tid, kind, symbol, children, sort, age):
        self.id = tid
        self.kind = kind
        self.symbol = symbol
        self.children = children
        self.sort = sort
        self.age = age
        self.ground = kind is not Kind.BOUND_VAR and all(c.ground for c in children)
        self.tree_size = 1 + sum(c.tree_size for c in children)

    def __repr__(self):
        return f"<t{self.id} {self.kind.name}>"


@dataclass(frozen=True)
class Quantifier:
    """Universally quantified clause: `term` is the interned FORALL node."""

    term: Term
    bound_vars: tuple[Term, ...]
    body: Term


class TermTable:
    """Hash-consing arena; one per solver instance, never shared."""

    BOOL = 0
    INT = 1

    def __init__(self):
        self.terms: list[Term] = []
        self._intern: dict[tuple, Term] = {}
        self._symbols: list[str] = []
        self._symbol_ix: dict[str, int] = {}
        self._sorts: list[str] = ["Bool", "Int"]
        self._sort_ix: dict[str, int] = {"Bool": 0, "Int": 1}
        # lemma id -> (quantifier term id, tuple of bound ground-term ids)
        self.lemma_provenance: dict[int, tuple[int, tuple[int, ...]]] = {}

    # -- symbols and sorts -------------------------------------------------

    def symbol(self, name: str) -> int:
        ix = self._symbol_ix.get(name)
        if ix is None:
            ix = len(self._symbols)
            self._symbols.append(name)
            self._symbol_ix[name] = ix
        return ix

    def symbol_name(self, ix: int) -> str:
        return self._symbols[ix]

    def sort(self, name: str) -> int:
        sid = self._sort_ix.get(name)
        if sid is None:
            sid = len(self._sorts)
            self._sorts.append(name)
            self._sort_ix[name] = sid
        return sid

    def sort_name(self, sid: int) -> str:
        return self._sorts[sid]

    # -- construction ------------------------------------------------------

    def mk(self, kind: Kind, symbol: int = NO_SYMBOL,
           children: tuple[Term, ...] = (), sort: int | None = None) -> Term:
        children = tuple(children)
        self._check(kind, symbol, children)
        out_sort = self._result_sort(kind, children, sort)
        key = (kind, symbol, tuple(c.id for c in children), out_sort)
        hit = self._intern.get(key)
        if hit is not None:
            return hit
        tid = len(self.terms)
        t = Term(tid, kind, symbol, children, out_sort, tid)
        self.terms.append(t)
        self._intern[key] = t
        return t

    def _check(self, kind, symbol, children):
        n = len(children)
        if kind in _SYMBOL_KINDS and symbol == NO_SYMBOL:
            raise ArityMismatch(f"{kind.name} requires a symbol")
        if kind is Kind.NOT and n != 1:
            raise ArityMismatch(f"NOT takes 1 child, got {n}")
        if kind in (Kind.AND, Kind.OR) and n < 2:
            raise ArityMismatch(f"{kind.name} takes >=2 children, got {n}")
        if kind in (Kind.IMPLIES, Kind.EQUIV, Kind.EQUAL, Kind.INST_LEMMA) and n != 2:
            raise ArityMismatch(f"{kind.name} takes 2 children, got {n}")
        if kind is Kind.DISTINCT and n < 2:
            raise ArityMismatch(f"DISTINCT takes >=2 children, got {n}")
        if kind in COMPARE_KINDS and n != 2:
            raise ArityMismatch(f"{kind.name} takes 2 children, got {n}")
        if kind in (Kind.FORALL, Kind.EXISTS):
            if n < 2:
                raise ArityMismatch(f"{kind.name} takes vars and a body")
            if any(c.kind is not Kind.BOUND_VAR for c in children[:-1]):
                raise ArityMismatch(f"{kind.name} binder list must be bound variables")
        if kind in (Kind.UF_CONST, Kind.NUMERAL, Kind.BOUND_VAR, Kind.VAR,
                    Kind.TRUE, Kind.FALSE) and n != 0:
            raise ArityMismatch(f"{kind.name} takes no children, got {n}")
        if kind is Kind.UF_APPLY and n < 1:
            raise ArityMismatch("UF_APPLY takes >=1 child (use UF_CONST for arity 0)")

        if kind in _BOOL_CONNECTIVES or kind in (Kind.FORALL, Kind.EXISTS):
            bodyish = children if kind in _BOOL_CONNECTIVES else children[-1:]
            for c in bodyish:
                if c.sort != self.BOOL:
                    raise SortMismatch(f"{kind.name} over non-boolean child {c!r}")
        if kind in (Kind.EQUAL, Kind.DISTINCT):
            sorts = {c.sort for c in children}
            if len(sorts) > 1:
                raise SortMismatch(f"{kind.name} over mixed sorts {sorts}")
        if kind in COMPARE_KINDS:
            for c in children:
                if c.sort != self.INT:
                    raise SortMismatch(f"{kind.name} requires Int children")

    def _result_sort(self, kind, children, sort):
        if kind in _BOOL_CONNECTIVES or kind in (
                Kind.EQUAL, Kind.DISTINCT, Kind.FORALL, Kind.EXISTS,
                Kind.TRUE, Kind.FALSE, Kind.INST_LEMMA) or kind in COMPARE_KINDS:
            return self.BOOL
        if kind is Kind.NUMERAL:
            return self.INT
        if sort is None:
            raise SortMismatch(f"{kind.name} requires an explicit sort")
        return sort

    # -- convenience builders ----------------------------------------------

    def true_(self) -> Term:
        return self.mk(Kind.TRUE)

    def false_(self) -> Term:
        return self.mk(Kind.FALSE)

    def numeral(self, value: int) -> Term:
        return self.mk(Kind.NUMERAL, self.symbol(str(value)))

    def numeral_value(self, t: Term) -> int:
        return int(self.symbol_name(t.symbol))

    def bound_var(self, name: str, sort: int) -> Term:
        return self.mk(Kind.BOUND_VAR, self.symbol(name), (), sort)

    def mk_not(self, t: Term) -> Term:
        return self.mk(Kind.NOT, NO_SYMBOL, (t,))

    def mk_or(self, ts) -> Term:
        ts = tuple(ts)
        return ts[0] if len(ts) == 1 else self.mk(Kind.OR, NO_SYMBOL, ts)

    def mk_and(self, ts) -> Term:
        ts = tuple(ts)
        return ts[0] if len(ts) == 1 else self.mk(Kind.AND, NO_SYMBOL, ts)

    # -- printing ----------------------------------------------------------

    def sexpr(self, t: Term) -> str:
        k = t.kind
        if k in (Kind.TRUE, Kind.FALSE):
            return k.name.lower()
        if k in _SYMBOL_KINDS:
            name = self.symbol_name(t.symbol)
            if not t.children:
                return name
            return "(" + " ".join([name] + [self.sexpr(c) for c in t.children]) + ")"
        head = {
            Kind.NOT: "not", Kind.AND: "and", Kind.OR: "or", Kind.IMPLIES: "=>",
            Kind.EQUIV: "=", Kind.EQUAL: "=", Kind.DISTINCT: "distinct",
            Kind.FORALL: "forall", Kind.EXISTS: "exists", Kind.LT: "<",
            Kind.GT: ">", Kind.LE: "<=", Kind.GE: ">=", Kind.INST_LEMMA: "=>",
        }[k]
        if k in (Kind.FORALL, Kind.EXISTS):
            binders = " ".join(
                f"({self.symbol_name(v.symbol)} {self.sort_name(v.sort)})"
                for v in t.children[:-1])
            return f"({head} ({binders}) {self.sexpr(t.children[-1])})"
        return "(" + " ".join([head] + [self.sexpr(c) for c in t.children]) + ")"


def substitute(table: TermTable, t: Term, binding: dict[Term, Term]) -> Term:
    """Replace bound variables by ground terms, returning the interned instance."""
    for var, target in binding.items():
        if var.kind is not Kind.BOUND_VAR:
            raise UnboundVariable(f"binding key {var!r} is not a bound variable")
        if not target.ground:
            raise UnboundVariable(f"binding target {target!r} is not ground")
        if target.sort != var.sort:
            raise SortMismatch(
                f"cannot bind {table.sort_name(var.sort)} variable to "
                f"{table.sort_name(target.sort)} term")
    memo: dict[int, Term] = {}

    def go(u: Term) -> Term:
        if u.ground:
            return u
        if u.kind is Kind.BOUND_VAR:
            try:
                return binding[u]
            except KeyError:
                raise UnboundVariable(
                    f"variable {table.symbol_name(u.symbol)} not covered") from None
        hit = memo.get(u.id)
        if hit is None:
            hit = table.mk(u.kind, u.symbol, tuple(go(c) for c in u.children), u.sort)
            memo[u.id] = hit
        return hit

    return go(t)


def mk_inst_lemma(table: TermTable, q: Quantifier, binding: dict[Term, Term]) -> Term:
    """Build the instantiation lemma `q.term => body[binding]`.

    Provenance (which quantifier, which tuple) is recorded for training-data
    extraction; re-building the same lemma keeps the original record.
    """
    inst = substitute(table, q.body, binding)
    lemma = table.mk(Kind.IMPLIES, NO_SYMBOL, (q.term, inst))
    table.lemma_provenance.setdefault(
        lemma.id, (q.term.id, tuple(binding[v].id for v in q.bound_vars)))
    return lemma


def free_bound_vars(t: Term) -> tuple[Term, ...]:
    """Bound variables occurring in `t`, in first-occurrence order."""
    seen: list[Term] = []
    visited: set[int] = set()

    def go(u: Term) -> None:
        if u.ground or u.id in visited:
            return
        visited.add(u.id)
        if u.kind is Kind.BOUND_VAR:
            if u not in seen:
                seen.append(u)
            return
        for c in u.children:
            go(c)

    go(t)
    return tuple(seen)
