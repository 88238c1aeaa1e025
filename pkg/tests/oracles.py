"""Independent brute-force oracles used by the test suite.

These deliberately re-derive results by exhaustive enumeration and stay
independent of the code paths they check.
"""
from __future__ import annotations

from qinst.clausify import ClausalProblem
from qinst.ground import Clause
from qinst.termdb import TermDb
from qinst.terms import Kind, Term, TermTable, substitute


def term_shape(t: Term):
    """Structural fingerprint; equal shapes = structurally equal trees."""
    return (int(t.kind), t.symbol, t.sort, tuple(term_shape(c) for c in t.children))


# -- ground EUF satisfiability by partition enumeration --------------------------

def _collect_terms(clauses: list[Clause], table: TermTable) -> list[Term]:
    seen: dict[int, Term] = {}

    def add(t: Term):
        if t.id in seen:
            return
        seen[t.id] = t
        for c in t.children:
            add(c)

    need_true = False
    for cl in clauses:
        for atom, _ in cl:
            if atom.kind is Kind.EQUAL:
                add(atom.children[0])
                add(atom.children[1])
            else:
                add(atom)
                need_true = True
    if need_true:
        add(table.true_())
    return [seen[i] for i in sorted(seen)]


def _partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        for i, block in enumerate(part):
            yield part[:i] + [block + [first]] + part[i + 1:]
        yield part + [[first]]


def partition_sat(clauses: list[Clause], table: TermTable) -> bool:
    """SAT iff some congruence-closed partition satisfies every clause."""
    terms = _collect_terms(clauses, table)
    apps = [t for t in terms if t.kind in (Kind.UF_APPLY, Kind.SKOLEM) and t.children]
    true_term = table.true_() if any(
        atom.kind is not Kind.EQUAL for cl in clauses for atom, _ in cl) else None

    for part in _partitions(terms):
        block_of = {}
        for bix, block in enumerate(part):
            for t in block:
                block_of[t.id] = bix
        # numerals in one block must agree
        ok = True
        for block in part:
            vals = {table.numeral_value(t) for t in block if t.kind is Kind.NUMERAL}
            if len(vals) > 1:
                ok = False
                break
        if not ok:
            continue
        # congruence closure property
        for i, u in enumerate(apps):
            for v in apps[i + 1:]:
                if (u.symbol == v.symbol and u.kind == v.kind
                        and len(u.children) == len(v.children)
                        and all(block_of[a.id] == block_of[b.id]
                                for a, b in zip(u.children, v.children))
                        and block_of[u.id] != block_of[v.id]):
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue

        def lit_true(atom: Term, pos: bool) -> bool:
            if atom.kind is Kind.EQUAL:
                same = block_of[atom.children[0].id] == block_of[atom.children[1].id]
            else:
                same = block_of[atom.id] == block_of[true_term.id]
            return same == pos

        if all(any(lit_true(a, p) for a, p in cl) for cl in clauses):
            return True
    return False


# -- naive e-matching -------------------------------------------------------------

def naive_ematch(pattern: Term, db: TermDb, cc, table: TermTable) -> set[tuple]:
    """Try every combination of db terms as a binding; keep congruent ones.

    Returns the set of bindings as rep-canonical tuples sorted by var id,
    mirroring the dedup-modulo-congruence contract of the real matcher.
    """
    from qinst.terms import free_bound_vars

    variables = free_bound_vars(pattern)
    candidates = [db.terms_of_sort(v.sort) for v in variables]
    results = set()

    def rec(i, binding):
        if i == len(variables):
            inst = substitute(table, pattern, binding)
            rep = cc.register(inst)
            if any(cc.register(t) == rep for t in db.terms_of_sort(pattern.sort)):
                results.add(tuple(cc.find(binding[v].id) for v in variables))
            return
        for t in candidates[i]:
            rec(i + 1, {**binding, variables[i]: t})

    rec(0, {})
    return results


def canonical_bindings(bindings, variables, cc) -> set[tuple]:
    return {tuple(cc.find(b[v].id) for v in variables) for b in bindings}


# -- naive GBDT prediction -----------------------------------------------------------

def naive_predict(model, vec) -> float:
    """Recursive per-tree walk, independent of RegressionTree.leaf_value."""
    import math

    def walk(tree, ix):
        node = tree.nodes[ix]
        if node.feature < 0:
            return node.value
        if vec.get(node.feature) <= node.threshold:
            return walk(tree, node.left)
        return walk(tree, node.right)

    score = model.base_score
    for tree in model.trees:
        score += model.learning_rate * walk(tree, 0)
    return 1.0 / (1.0 + math.exp(-score))


# -- Herbrand expansion for variable-flat problems -------------------------------------

def herbrand_verdict(cp: ClausalProblem) -> str:
    """Expand quantifiers over the problem's own ground terms; decide by oracle.

    Sound and complete when variables occur only as direct atom arguments
    (instances then create no new first-order terms).
    """
    table = cp.problem.table
    db = TermDb(table)
    for gc in cp.ground_clauses:
        for atom, _ in gc.lits:
            db.ingest_formula(atom)
    for qc in cp.quantified:
        db.ingest_formula(qc.quantifier.body)

    from qinst.clausify import lit_parts
    from itertools import product

    clauses = [gc.lits for gc in cp.ground_clauses]
    for qc in cp.quantified:
        q = qc.quantifier
        pools = [db.terms_of_sort(v.sort) for v in q.bound_vars]
        assert all(pools), "herbrand oracle needs a ground term per sort"
        for combo in product(*pools):
            inst = substitute(table, q.body, dict(zip(q.bound_vars, combo)))
            parts = inst.children if inst.kind is Kind.OR else (inst,)
            clauses.append(tuple(lit_parts(p) for p in parts))
    return "sat" if partition_sat(clauses, table) else "unsat"


# -- exhaustive set cover ---------------------------------------------------------------

def optimal_cover_size(solved_sets: dict, universe: set) -> int | None:
    """Minimum number of sets whose union covers every coverable problem."""
    from itertools import combinations

    coverable = set()
    for s in solved_sets.values():
        coverable |= s
    keys = sorted(solved_sets)
    for size in range(0, len(keys) + 1):
        for combo in combinations(keys, size):
            got = set()
            for key in combo:
                got |= solved_sets[key]
            if got >= coverable:
                return size
    return None
