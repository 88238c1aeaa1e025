"""Enumerative instantiation: fair, age-ordered tuple emission per quantifier.

Tuple order: stage s = max of the per-variable indices; stages ascend and
tuples within a stage come lexicographically, so every tuple is reached in
finite time and (0, ..., 0) is always first.
"""
from __future__ import annotations

from itertools import product

from .termdb import TermDb
from .terms import Quantifier, Term, TermTable, mk_inst_lemma


class EnumCursor:
    """Tracks, per quantifier, which instantiation tuples were already emitted."""

    def __init__(self):
        self.emitted: dict[int, set[tuple[int, ...]]] = {}

    def emitted_for(self, q: Quantifier) -> set[tuple[int, ...]]:
        return self.emitted.setdefault(q.term.id, set())


def next_instantiation(q: Quantifier, db: TermDb, cursor: EnumCursor):
    """Least unemitted tuple under the fair order, or None when exhausted.

    Emitted tuples are keyed by term ids, so the enumeration stays sound when
    the age-ordered lists grow (or gain older terms) between calls.
    """
    lists = [db.terms_of_sort(v.sort) for v in q.bound_vars]
    if any(not lst for lst in lists):
        return None
    sizes = [len(lst) for lst in lists]
    emitted = cursor.emitted_for(q)
    nvars = len(lists)
    for stage in range(max(sizes)):
        for tup in product(range(stage + 1), repeat=nvars):
            if max(tup) != stage:
                continue
            if any(ix >= sizes[i] for i, ix in enumerate(tup)):
                continue
            terms = tuple(lists[i][ix] for i, ix in enumerate(tup))
            key = tuple(t.id for t in terms)
            if key in emitted:
                continue
            emitted.add(key)
            return dict(zip(q.bound_vars, terms))
    return None


def enum_round(admitted: list[Quantifier], db: TermDb, cursor: EnumCursor,
               table: TermTable, try_add, per_quant: int = 1) -> list[Term]:
    """One enumerative round over the admitted quantifiers, in assertion order.

    `try_add(q, lemma, binding)` returns "new", "dup" or "stop"; duplicate
    lemmas do not satisfy the per-quantifier quota, so the cursor keeps
    advancing until a genuinely new lemma (or exhaustion).
    """
    out: list[Term] = []
    for q in admitted:
        fresh = 0
        while fresh < per_quant:
            binding = next_instantiation(q, db, cursor)
            if binding is None:
                break
            lemma = mk_inst_lemma(table, q, binding)
            verdict = try_add(q, lemma, binding)
            if verdict == "stop":
                return out
            if verdict == "new":
                out.append(lemma)
                fresh += 1
    return out
