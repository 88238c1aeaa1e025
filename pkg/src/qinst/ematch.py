"""E-matching: trigger generation and matching modulo the model congruence."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .congruence import CongruenceState
from .errors import NoTrigger
from .termdb import TermDb
from .terms import Kind, Quantifier, Term, TermTable, free_bound_vars, mk_inst_lemma


@dataclass(frozen=True)
class Trigger:
    patterns: tuple[Term, ...]
    covers: frozenset[int]  # bound-variable term ids


def _candidate_patterns(q: Quantifier) -> list[Term]:
    """UF applications inside the body that contain at least one bound variable."""
    out: list[Term] = []
    seen: set[int] = set()

    def walk(t: Term) -> None:
        if t.id in seen or t.ground:
            return
        seen.add(t.id)
        if t.kind is Kind.UF_APPLY:
            out.append(t)
        for c in t.children:
            walk(c)

    walk(q.body)
    return sorted(out, key=lambda t: t.id)


def generate_triggers(q: Quantifier, mode: str = "min",
                      multi_priority: bool = False,
                      max_multi: int = 4) -> list[Trigger]:
    """Deterministic trigger list for a clausal quantifier.

    Single-pattern triggers (each covering every bound variable) come first,
    ordered smallest-pattern-first in `min` mode and largest-first in `max`
    mode; irredundant multi-pattern covers follow (or lead, with
    `multi_priority`).  Raises NoTrigger when the variables cannot be covered.
    """
    qvars = frozenset(v.id for v in q.bound_vars)
    cands = _candidate_patterns(q)
    var_sets = {p.id: frozenset(v.id for v in free_bound_vars(p)) for p in cands}

    full = [p for p in cands if var_sets[p.id] == qvars]
    reverse = mode == "max"
    singles = [Trigger((p,), qvars)
               for p in sorted(full, key=lambda t: (-t.tree_size if reverse
                                                    else t.tree_size, t.id))]

    multis: list[Trigger] = []
    pool = sorted(cands, key=lambda t: (t.tree_size, t.id))[:12]
    for size in range(2, len(qvars) + 1):
        for combo in combinations(pool, size):
            union = frozenset().union(*(var_sets[p.id] for p in combo))
            if union != qvars:
                continue
            irredundant = all(
                frozenset().union(*(var_sets[p.id] for p in combo if p is not drop))
                != qvars for drop in combo)
            if irredundant:
                multis.append(Trigger(tuple(combo), qvars))
        if multis:
            break  # only minimum-size covers
    multis.sort(key=lambda tr: (sum(p.tree_size for p in tr.patterns),
                                tuple(p.id for p in tr.patterns)))
    multis = multis[:max_multi]

    triggers = multis + singles if multi_priority else singles + multis
    if not triggers:
        raise NoTrigger(f"no pattern covers the variables of {q.term!r}")
    return triggers


def _db_member(cc: CongruenceState, db: TermDb, rep: int, table: TermTable):
    """Oldest db term in a congruence class (bindings are always db terms)."""
    for mid in cc.class_members(rep):
        if table.terms[mid].id in db.present:
            return table.terms[mid]
    return None


def _match_class(p: Term, rep: int, sigma: dict, cc: CongruenceState,
                 db: TermDb, table: TermTable):
    if p.kind is Kind.BOUND_VAR:
        if p in sigma:
            if cc.find(sigma[p].id) == rep:
                yield sigma
            return
        target = _db_member(cc, db, rep, table)
        if target is not None:
            yield {**sigma, p: target}
        return
    if p.ground:
        if cc.register(p) == rep:
            yield sigma
        return
    for mid in cc.class_members(rep):
        m = table.terms[mid]
        if (m.kind is not p.kind or m.symbol != p.symbol
                or len(m.children) != len(p.children)):
            continue

        def descend(i: int, sig: dict):
            if i == len(p.children):
                yield sig
                return
            crep = cc.find(cc.register(m.children[i]))
            for sig2 in _match_class(p.children[i], crep, sig, cc, db, table):
                yield from descend(i + 1, sig2)

        yield from descend(0, sigma)


def ematch(pattern: Term, db: TermDb, cc: CongruenceState, table: TermTable,
           partial: dict | None = None) -> list[dict]:
    """All bindings making the pattern congruent to some db term.

    Duplicates modulo congruence representatives are removed; results are
    ordered by matched ground-term age, then by bound term ids.
    """
    base = partial or {}
    results: list[dict] = []
    seen: set[tuple] = set()
    for t in db.terms_of_sort(pattern.sort):
        rep = cc.register(t)
        batch = []
        for sigma in _match_class(pattern, rep, dict(base), cc, db, table):
            key = tuple(sorted((v.id, cc.find(w.id)) for v, w in sigma.items()))
            if key in seen:
                continue
            seen.add(key)
            batch.append(sigma)
        batch.sort(key=lambda s: tuple(w.id for _, w in
                                       sorted(s.items(), key=lambda vw: vw[0].id)))
        results.extend(batch)
    return results


def match_trigger(trig: Trigger, db: TermDb, cc: CongruenceState,
                  table: TermTable) -> list[dict]:
    """Join the bindings of a (possibly multi-pattern) trigger."""
    sigmas: list[dict] = [{}]
    for p in trig.patterns:
        nxt: list[dict] = []
        for s in sigmas:
            nxt.extend(ematch(p, db, cc, table, partial=s))
        sigmas = nxt
        if not sigmas:
            return []
    seen: set[tuple] = set()
    out = []
    for s in sigmas:
        key = tuple(sorted((v.id, cc.find(w.id)) for v, w in s.items()))
        if key not in seen:
            seen.add(key)
            out.append(s)
    return out


def ematch_round(admitted: list[Quantifier], db: TermDb, cc: CongruenceState,
                 table: TermTable, try_add, trigger_fn,
                 per_quant: int = 4) -> list[Term]:
    """One e-matching round; up to `per_quant` new lemmas per quantifier."""
    out: list[Term] = []
    for q in admitted:
        try:
            triggers = trigger_fn(q)
        except NoTrigger:
            continue
        fresh = 0
        for trig in triggers:
            if fresh >= per_quant:
                break
            for sigma in match_trigger(trig, db, cc, table):
                lemma = mk_inst_lemma(table, q, sigma)
                verdict = try_add(q, lemma, sigma)
                if verdict == "stop":
                    return out
                if verdict == "new":
                    out.append(lemma)
                    fresh += 1
                    if fresh >= per_quant:
                        break
    return out
