import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import term_shape
from qinst.errors import ArityMismatch, SortMismatch, UnboundVariable
from qinst.terms import (Kind, Quantifier, TermTable, kind_checksum, kind_count,
                         mk_inst_lemma, substitute)


def test_hash_consing_identity(sig):
    assert sig.const("c") is sig.const("c")
    assert sig.const("c").id == sig.const("c").id


def test_idempotent_interning_and_age(sig):
    c = sig.const("c")
    first = sig.app("f", c)
    age = first.age
    again = sig.app("f", c)
    assert first is again
    assert again.age == age


def test_age_monotone(sig):
    c = sig.const("c")
    fc = sig.app("f", c)
    ffc = sig.app("f", fc)
    assert fc.age < ffc.age


def test_children_ids_smaller_than_parent(sig):
    c = sig.const("c")
    t = sig.app("g", sig.app("f", c), c)
    assert all(ch.id < t.id for ch in t.children)


def test_random_population_matches_structural_oracle(table):
    sig_sort = table.sort("S")
    rng = random.Random(7)
    pool = [table.mk(Kind.UF_CONST, table.symbol(f"c{i}"), (), sig_sort)
            for i in range(4)]
    for _ in range(200):
        op = rng.choice(["f", "g", "h"])
        arity = 1 if op != "h" else 2
        args = tuple(rng.choice(pool) for _ in range(arity))
        pool.append(table.mk(Kind.UF_APPLY, table.symbol(op), args, sig_sort))
    distinct_ids = len({t.id for t in pool})
    distinct_shapes = len({term_shape(t) for t in pool})
    assert distinct_ids == distinct_shapes


def test_ground_ages_strict_total_order(sig):
    c = sig.const("c")
    d = sig.const("d")
    fc = sig.app("f", c)
    ground = [c, d, fc]
    ages = [t.age for t in ground]
    assert len(set(ages)) == len(ages)
    assert ages == sorted(ages)  # created in this order


def test_substitute_paper_examples(sig, table):
    x = sig.var("x")
    c = sig.const("c")
    body = sig.pred("R", sig.app("f", x), c)
    out = substitute(table, body, {x: c})
    assert out is sig.pred("R", sig.app("f", c), c)

    xi = sig.var("xi", table.INT)
    q_of_fx = sig.pred("q", sig.app("f2", xi))
    n24 = table.numeral(24)
    assert substitute(table, q_of_fx, {xi: n24}) is sig.pred("q", sig.app("f2", n24))


def test_substitute_ground_empty_binding(sig, table):
    t = sig.app("f", sig.const("c"))
    assert substitute(table, t, {}) is t


def test_substitute_errors(sig, table):
    x = sig.var("x")
    with pytest.raises(UnboundVariable):
        substitute(table, sig.app("f", x), {})
    b = table.bound_var("b", table.BOOL)
    with pytest.raises(SortMismatch):
        substitute(table, sig.app("f", x), {x: table.true_()})
    del b


def test_arity_and_sort_errors(sig, table):
    c = sig.const("c")
    with pytest.raises(ArityMismatch):
        table.mk(Kind.NOT, children=(sig.pred("p", c), sig.pred("p", c)))
    with pytest.raises(SortMismatch):
        table.mk(Kind.EQUAL, children=(c, table.numeral(1)))
    with pytest.raises(SortMismatch):
        table.mk(Kind.AND, children=(c, c))


def test_mk_inst_lemma_shape_and_interning(sig, table):
    x = sig.var("x")
    c = sig.const("c")
    body = sig.pred("R", sig.app("f", x), c)
    forall = table.mk(Kind.FORALL, children=(x, body))
    q = Quantifier(forall, (x,), body)
    lemma = mk_inst_lemma(table, q, {x: c})
    assert lemma.kind is Kind.IMPLIES
    assert lemma.children[0] is forall
    assert lemma.children[1] is substitute(table, body, {x: c})
    assert mk_inst_lemma(table, q, {x: c}) is lemma
    qid, binding = table.lemma_provenance[lemma.id]
    assert qid == forall.id and binding == (c.id,)


def test_kind_introspection():
    assert kind_count() == len(Kind)
    assert len(kind_checksum()) == 16
    assert kind_checksum() == kind_checksum()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 3), st.data())
def test_substitution_idempotent_on_ground_results(depth, data):
    table = TermTable()
    S = table.sort("S")
    x = table.bound_var("x", S)
    c = table.mk(Kind.UF_CONST, table.symbol("c"), (), S)

    def build(d):
        if d == 0:
            return data.draw(st.sampled_from([x, c]))
        return table.mk(Kind.UF_APPLY, table.symbol("f"), (build(d - 1),), S)

    t = build(depth)
    target = table.mk(Kind.UF_APPLY, table.symbol("g"), (c,), S)
    once = substitute(table, t, {x: target})
    assert substitute(table, once, {}) is once
