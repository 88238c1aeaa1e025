import pytest

from qinst.errors import ArityMismatch, ParseError, SortMismatch, UnknownSymbol
from qinst.smtparse import parse
from qinst.terms import Kind

HEADER = """
(set-logic UF)
(declare-sort S 0)
(declare-fun f (S) S)
(declare-fun R (S S) Bool)
(declare-const c S)
"""


def test_forall_assertion():
    p = parse(HEADER + "(assert (forall ((x S)) (R (f x) c)))")
    assert len(p.asserted) == 1
    t = p.asserted[0]
    assert t.kind is Kind.FORALL
    assert t.children[0].kind is Kind.BOUND_VAR
    assert p.table.sexpr(t) == "(forall ((x S)) (R (f x) c))"


def test_assert_true():
    p = parse(HEADER + "(assert true)")
    assert len(p.asserted) == 1
    assert p.asserted[0].kind is Kind.TRUE


def test_undeclared_symbol():
    with pytest.raises(UnknownSymbol):
        parse("(set-logic UF)(assert (p (f 24)))")


def test_syntax_error_position():
    with pytest.raises(ParseError) as ei:
        parse("(set-logic UF)\n(assert")
    assert ei.value.args


def test_unbalanced_paren():
    with pytest.raises(ParseError):
        parse(HEADER + "(assert (R c c)")


def test_arity_mismatch():
    with pytest.raises(ArityMismatch):
        parse(HEADER + "(assert (R c))")


def test_argument_sort_mismatch():
    with pytest.raises(SortMismatch):
        parse(HEADER + "(assert (R c 24))")


def test_numerals_and_comparisons():
    p = parse("(set-logic UF)(assert (< 24 0))(assert (>= 3 3))")
    lt = p.asserted[0]
    assert lt.kind is Kind.LT
    assert all(c.kind is Kind.NUMERAL for c in lt.children)
    assert p.table.numeral_value(lt.children[0]) == 24


def test_bool_equality_is_equiv():
    p = parse(HEADER + "(declare-const b Bool)(assert (= b true))")
    assert p.asserted[0].kind is Kind.EQUIV


def test_chained_equality():
    p = parse(HEADER + "(declare-const d S)(declare-const e S)"
              "(assert (= c d e))")
    t = p.asserted[0]
    assert t.kind is Kind.AND and len(t.children) == 2
    assert all(c.kind is Kind.EQUAL for c in t.children)


def test_distinct_and_implies():
    p = parse(HEADER + "(declare-const d S)(assert (distinct c d))"
              "(assert (=> (R c c) (R c d) (R d d)))")
    assert p.asserted[0].kind is Kind.DISTINCT
    imp = p.asserted[1]
    assert imp.kind is Kind.IMPLIES
    assert imp.children[1].kind is Kind.IMPLIES  # right associative


def test_shadowed_binder_renamed():
    p = parse(HEADER + "(assert (forall ((x S)) "
              "(and (R x x) (forall ((x S)) (R x c)))))")
    outer = p.asserted[0]
    inner = outer.children[-1].children[1]
    assert inner.kind is Kind.FORALL
    outer_name = p.table.symbol_name(outer.children[0].symbol)
    inner_name = p.table.symbol_name(inner.children[0].symbol)
    assert outer_name == "x" and inner_name != "x"


def test_duplicate_declaration_rejected():
    with pytest.raises(ParseError):
        parse(HEADER + "(declare-const c S)")


def test_unknown_sort_and_command():
    with pytest.raises(UnknownSymbol):
        parse("(set-logic UF)(declare-const c T)")
    with pytest.raises(ParseError):
        parse("(push 1)")


def test_exists_parses():
    p = parse(HEADER + "(assert (exists ((y S)) (R y c)))")
    assert p.asserted[0].kind is Kind.EXISTS


def test_comments_and_checksat():
    p = parse("; header comment\n(set-logic UF)\n(check-sat)\n")
    assert p.check_sat
