"""Ground congruence closure over EUF plus numeral-literal evaluation.

Predicate atoms are reduced to equalities with the distinguished TRUE
constant.  Conflicts carry a deletion-minimized subset of the asserted
literals; replaying exactly that subset into a fresh state conflicts again.
"""
from __future__ import annotations

from .terms import COMPARE_KINDS, Kind, Term, TermTable

# literal = (atom term, polarity)
Lit = tuple[Term, bool]

_APP_KINDS = (Kind.UF_APPLY, Kind.SKOLEM)


def eval_numeral_atom(table: TermTable, atom: Term):
    """Decide a comparison/equality atom iff both sides are numerals.

    Returns True, False, or None (unknown).
    """
    if atom.kind not in COMPARE_KINDS and atom.kind is not Kind.EQUAL:
        return None
    a, b = atom.children
    if a.kind is not Kind.NUMERAL or b.kind is not Kind.NUMERAL:
        return None
    x, y = table.numeral_value(a), table.numeral_value(b)
    return {
        Kind.LT: x < y, Kind.GT: x > y, Kind.LE: x <= y,
        Kind.GE: x >= y, Kind.EQUAL: x == y,
    }[atom.kind]


class CongruenceState:
    def __init__(self, table: TermTable, _minimize: bool = True):
        self.table = table
        self._minimize = _minimize
        self.parent: dict[int, int] = {}
        self.rank: dict[int, int] = {}
        self.members: dict[int, list[int]] = {}
        self.use: dict[int, list[int]] = {}
        self.sig: dict[tuple, int] = {}
        self.diseq: dict[int, set[int]] = {}
        self.numval: dict[int, int] = {}
        self.asserted: list[Lit] = []
        self.conflict: tuple[Lit, ...] | None = None

    # -- union-find ----------------------------------------------------------

    def register(self, t: Term) -> int:
        if t.id in self.parent:
            return self.find(t.id)
        for c in t.children:
            self.register(c)
        self.parent[t.id] = t.id
        self.rank[t.id] = 0
        self.members[t.id] = [t.id]
        if t.kind is Kind.NUMERAL:
            self.numval[t.id] = self.table.numeral_value(t)
        if t.kind in _APP_KINDS and t.children:
            for c in t.children:
                self.use.setdefault(self.find(c.id), []).append(t.id)
            key = self._sigkey(t)
            other = self.sig.get(key)
            if other is None:
                self.sig[key] = t.id
            elif self.find(other) != t.id:
                self._merge_all([(t.id, other)])
        return self.find(t.id)

    def find(self, tid: int) -> int:
        p = self.parent
        while p[tid] != tid:
            p[tid] = p[p[tid]]
            tid = p[tid]
        return tid

    def same(self, a: Term, b: Term) -> bool:
        return self.register(a) == self.register(b)

    def class_members(self, rep: int) -> list[int]:
        return sorted(self.members.get(self.find(rep), []))

    def _sigkey(self, t: Term) -> tuple:
        return (t.kind, t.symbol, tuple(self.find(c.id) for c in t.children))

    def _merge_all(self, queue: list[tuple[int, int]]) -> bool:
        """Union with full congruence propagation; False on inconsistency."""
        while queue:
            a, b = queue.pop()
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                continue
            if rb in self.diseq.get(ra, ()):
                return False
            va, vb = self.numval.get(ra), self.numval.get(rb)
            if va is not None and vb is not None and va != vb:
                return False
            if self.rank[ra] < self.rank[rb]:
                ra, rb = rb, ra
            if self.rank[ra] == self.rank[rb]:
                self.rank[ra] += 1
            # rb is absorbed into ra
            self.parent[rb] = ra
            self.members[ra].extend(self.members.pop(rb))
            if vb is not None:
                self.numval[ra] = vb
            for other in self.diseq.pop(rb, set()):
                ro = self.find(other)
                if ro == ra:
                    return False
                self.diseq.setdefault(ra, set()).add(ro)
                self.diseq.setdefault(ro, set()).discard(rb)
                self.diseq.setdefault(ro, set()).add(ra)
            for app_id in self.use.pop(rb, []):
                app = self.table.terms[app_id]
                key = self._sigkey(app)
                hit = self.sig.get(key)
                if hit is None:
                    self.sig[key] = app_id
                elif self.find(hit) != self.find(app_id):
                    queue.append((app_id, hit))
                self.use.setdefault(ra, []).append(app_id)
        return True

    # -- assertions ------------------------------------------------------------

    def assert_lit(self, atom: Term, pos: bool):
        """Assert one ground literal; returns None or a conflict explanation."""
        if self.conflict is not None:
            return self.conflict
        self.asserted.append((atom, pos))
        ok = self._apply(atom, pos)
        if ok:
            return None
        self.conflict = self._explain()
        return self.conflict

    def _apply(self, atom: Term, pos: bool) -> bool:
        k = atom.kind
        if k is Kind.EQUAL:
            a, b = atom.children
            ra, rb = self.register(a), self.register(b)
            if pos:
                return self._merge_all([(ra, rb)])
            return self._add_diseq(ra, rb)
        if k in COMPARE_KINDS:
            val = eval_numeral_atom(self.table, atom)
            if val is None:
                return True  # opaque; no theory content at this layer
            return val == pos
        if k is Kind.TRUE:
            return pos
        if k is Kind.FALSE:
            return not pos
        # predicate atom: encode p(...) = TRUE
        ra = self.register(atom)
        rt = self.register(self.table.true_())
        if pos:
            return self._merge_all([(ra, rt)])
        return self._add_diseq(ra, rt)

    def _add_diseq(self, ra: int, rb: int) -> bool:
        ra, rb = self.find(ra), self.find(rb)
        if ra == rb:
            return False
        self.diseq.setdefault(ra, set()).add(rb)
        self.diseq.setdefault(rb, set()).add(ra)
        return True

    # -- conflict explanation ----------------------------------------------------

    def _explain(self) -> tuple[Lit, ...]:
        lits = list(self.asserted)
        if not self._minimize:
            return tuple(lits)
        i = 0
        while i < len(lits):
            trial = lits[:i] + lits[i + 1:]
            if _replay_conflicts(self.table, trial):
                lits = trial
            else:
                i += 1
        return tuple(lits)


def _replay_conflicts(table: TermTable, lits: list[Lit]) -> bool:
    cc = CongruenceState(table, _minimize=False)
    for atom, pos in lits:
        if cc.assert_lit(atom, pos) is not None:
            return True
    return False


def cc_assert(state: CongruenceState, atom: Term, pos: bool = True):
    """Module-level spelling of CongruenceState.assert_lit."""
    return state.assert_lit(atom, pos)
