"""Age-ordered ground term database feeding both instantiation modules."""
from __future__ import annotations

import bisect

from .terms import Kind, TERM_KINDS, Term, TermTable


class TermDb:
    """Per-sort, age-sorted, duplicate-free lists of ground terms."""

    def __init__(self, table: TermTable):
        self.table = table
        self.by_sort: dict[int, list[Term]] = {}
        self.present: set[int] = set()

    def insert(self, t: Term) -> None:
        """Insert a ground term and all its ground subterms (idempotent)."""
        if t.id in self.present:
            return
        if not t.ground:
            raise ValueError(f"term {t!r} is not ground")
        for c in t.children:
            self.insert(c)
        lst = self.by_sort.setdefault(t.sort, [])
        bisect.insort(lst, t, key=lambda u: u.age)
        self.present.add(t.id)

    def ingest_formula(self, t: Term) -> None:
        """Hook for new clauses/lemmas: pick up every ground term node inside."""
        if t.ground and t.kind in TERM_KINDS:
            self.insert(t)
            return
        for c in t.children:
            self.ingest_formula(c)

    def terms_of_sort(self, sort: int) -> list[Term]:
        return self.by_sort.get(sort, [])

    def __contains__(self, t: Term) -> bool:
        return t.id in self.present

    def __len__(self) -> int:
        return len(self.present)


def db_insert(db: TermDb, t: Term) -> None:
    db.insert(t)
