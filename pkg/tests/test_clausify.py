import random

import pytest

from oracles import herbrand_verdict
from qinst.clausify import clausify
from qinst.errors import BlowupGuard
from qinst.smtparse import parse
from qinst.solver import SolveConfig, solve
from qinst.terms import Kind

HEADER = """
(set-logic UF)
(declare-sort S 0)
(declare-fun R (S S) Bool)
(declare-fun p (S) Bool)
(declare-fun f (S) S)
(declare-const a S)
(declare-const b S)
(declare-const c S)
"""


def test_textbook_skolemization():
    cp = clausify(parse(HEADER + "(assert (forall ((x S)) (exists ((y S)) (R x y))))"))
    assert not cp.ground_clauses
    assert len(cp.quantified) == 1
    q = cp.quantified[0].quantifier
    assert len(q.bound_vars) == 1
    assert q.body.kind is Kind.UF_APPLY  # R(x, sk(x))
    sk = q.body.children[1]
    assert sk.kind is Kind.SKOLEM
    assert sk.children == (q.bound_vars[0],)


def test_worked_example_clause_counts():
    text = """
(set-logic UF)
(declare-sort S 0)
(declare-fun f (Int) S)
(declare-fun p (S) Bool)
(declare-const a S)
(assert (p a))
(assert (= a (f 24)))
(assert (forall ((x Int)) (or (not (p (f x))) (< x 0))))
"""
    cp = clausify(parse(text))
    assert len(cp.ground_clauses) == 2
    assert all(len(gc.lits) == 1 for gc in cp.ground_clauses)
    assert len(cp.quantified) == 1


def test_two_ground_units_no_quantifier():
    cp = clausify(parse(HEADER + "(assert (and (= a b) (= b c)))"))
    assert len(cp.ground_clauses) == 2
    assert not cp.quantified


def test_provenance_links():
    cp = clausify(parse(HEADER + "(assert (= a b))(assert (forall ((x S)) (p x)))"))
    assert cp.ground_clauses[0].origin == 0
    assert cp.quantified[0].origin == 1


def test_deterministic_structure():
    text = HEADER + "(assert (forall ((x S)) (or (p x) (R x a))))(assert (p a))"
    r1 = clausify(parse(text))
    r2 = clausify(parse(text))
    s1 = [r1.problem.table.sexpr(qc.quantifier.term) for qc in r1.quantified]
    s2 = [r2.problem.table.sexpr(qc.quantifier.term) for qc in r2.quantified]
    assert s1 == s2
    assert [gc.lits[0][0].id for gc in r1.ground_clauses] == \
           [gc.lits[0][0].id for gc in r2.ground_clauses]


def test_blowup_guard():
    conj = "(and " + " ".join(f"(or (p a) (= a b))" for _ in range(20)) + ")"
    disj = "(or " + " ".join(f"(and (p a) (= a b))" for _ in range(20)) + ")"
    parse_ok = parse(HEADER + f"(assert {conj})")
    clausify(parse_ok)  # fine: stays linear
    with pytest.raises(BlowupGuard):
        clausify(parse(HEADER + f"(assert {disj})"), clause_budget=100)


def test_true_false_simplification():
    cp = clausify(parse(HEADER + "(assert true)"))
    assert not cp.ground_clauses and not cp.quantified
    cp = clausify(parse(HEADER + "(assert false)"))
    assert cp.ground_clauses[0].lits == ()


def test_tautology_dropped():
    cp = clausify(parse(HEADER + "(assert (or (p a) (not (p a))))"))
    assert not cp.ground_clauses


def test_sibling_binders_standardized_apart():
    # (forall x. p x) or (forall x. R x x) must not merge the two x's
    cp = clausify(parse(HEADER +
                        "(assert (or (forall ((x S)) (p x))"
                        "            (forall ((x S)) (R x x))))"))
    assert len(cp.quantified) == 1
    q = cp.quantified[0].quantifier
    assert len(q.bound_vars) == 2


def _random_var_flat_problem(rng: random.Random) -> str:
    """Quantified bodies use variables only as direct atom arguments."""
    lines = [
        "(set-logic UF)", "(declare-sort S 0)",
        "(declare-fun p (S) Bool)", "(declare-fun r (S S) Bool)",
        "(declare-fun f (S) S)",
    ]
    consts = ["a", "b", "c"][:rng.randint(2, 3)]
    for cname in consts:
        lines.append(f"(declare-const {cname} S)")
    grounds = []
    for cname in consts:
        grounds.append(cname)
    if rng.random() < 0.5:
        grounds.append(f"(f {consts[0]})")

    def ground_atom():
        kind = rng.choice(["p", "r", "eq"])
        if kind == "p":
            return f"(p {rng.choice(grounds)})"
        if kind == "r":
            return f"(r {rng.choice(grounds)} {rng.choice(grounds)})"
        return f"(= {rng.choice(grounds)} {rng.choice(grounds)})"

    def flat_atom(vars_):
        arg = lambda: rng.choice(vars_ + grounds)
        kind = rng.choice(["p", "r", "eq"])
        if kind == "p":
            return f"(p {arg()})"
        if kind == "r":
            return f"(r {arg()} {arg()})"
        return f"(= {arg()} {arg()})"

    def lit(mk):
        s = mk()
        return f"(not {s})" if rng.random() < 0.5 else s

    for _ in range(rng.randint(1, 4)):
        lines.append(f"(assert (or {lit(ground_atom)} {lit(ground_atom)}))")
    for qi in range(rng.randint(1, 3)):
        nv = rng.randint(1, 2)
        vars_ = [f"x{qi}_{j}" for j in range(nv)]
        binders = " ".join(f"({v} S)" for v in vars_)
        body = f"(or {lit(lambda: flat_atom(vars_))} {lit(lambda: flat_atom(vars_))})"
        lines.append(f"(assert (forall (({binders[1:-1]})) {body}))"
                     if nv == 1 else
                     f"(assert (forall ({binders}) {body}))")
    return "\n".join(lines)


def test_equisatisfiability_against_herbrand_oracle():
    rng = random.Random(20240811)
    cfg = SolveConfig(enum=True, ematch=True, max_rounds=4000, max_lemmas=4000,
                      timeout=3600.0)
    agree = 0
    for _ in range(30):
        text = _random_var_flat_problem(rng)
        cp = clausify(parse(text))
        want = herbrand_verdict(cp)
        got = solve(cp, cfg).status
        assert got == want, f"solver {got} vs oracle {want} on:\n{text}"
        agree += 1
    assert agree == 30
