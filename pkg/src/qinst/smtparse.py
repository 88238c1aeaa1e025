"""Parser for the SMT-LIB subset understood by the solver.

Supported commands: set-logic, declare-sort (arity 0), declare-fun,
declare-const, assert, check-sat, exit.  Formula layer: and/or/not/=>/=/
distinct/forall/exists, the four numeral comparisons, numerals, true/false.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ArityMismatch, ParseError, SortMismatch, UnknownSymbol
from .terms import Kind, NO_SYMBOL, Term, TermTable


@dataclass
class Problem:
    """Parsed input: declarations plus asserted formulas in input order."""

    name: str
    table: TermTable
    sorts: list[str] = field(default_factory=list)
    # symbol name -> (domain sort ids, range sort id); constants have () domain
    signature: dict[str, tuple[tuple[int, ...], int]] = field(default_factory=dict)
    asserted: list[Term] = field(default_factory=list)
    check_sat: bool = False


class _Token:
    __slots__ = ("text", "line", "col")

    def __init__(self, text, line, col):
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text: str) -> list[_Token]:
    toks = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
        elif c in " \t\r":
            col += 1
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            toks.append(_Token(c, line, col))
            col += 1
            i += 1
        else:
            j = i
            while j < n and text[j] not in " \t\r\n();":
                j += 1
            toks.append(_Token(text[i:j], line, col))
            col += j - i
            i = j
    return toks


class _Reader:
    def __init__(self, toks):
        self.toks = toks
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self):
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input")
        self.pos += 1
        return t

    def expect(self, text):
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected '{text}', got '{t.text}'", t.line, t.col)
        return t

    def sexpr(self):
        """One s-expression as a nested list of tokens."""
        t = self.next()
        if t.text == ")":
            raise ParseError("unexpected ')'", t.line, t.col)
        if t.text != "(":
            return t
        out = []
        while True:
            nxt = self.peek()
            if nxt is None:
                raise ParseError("unclosed '('", t.line, t.col)
            if nxt.text == ")":
                self.next()
                return out
            out.append(self.sexpr())


_CONNECTIVES = {
    "and": Kind.AND, "or": Kind.OR, "not": Kind.NOT, "=>": Kind.IMPLIES,
    "distinct": Kind.DISTINCT, "<": Kind.LT, ">": Kind.GT, "<=": Kind.LE,
    ">=": Kind.GE,
}


class _Parser:
    def __init__(self, text: str, name: str):
        self.reader = _Reader(_tokenize(text))
        self.table = TermTable()
        self.problem = Problem(name=name, table=self.table)
        self.fresh_counter = 0

    def run(self) -> Problem:
        while self.reader.peek() is not None:
            self.command()
        return self.problem

    def command(self):
        self.reader.expect("(")
        head = self.reader.next()
        cmd = head.text
        if cmd == "set-logic":
            self.reader.next()
        elif cmd == "declare-sort":
            name = self.reader.next().text
            arity = self.reader.next()
            if arity.text != "0":
                raise ParseError("only arity-0 sorts supported", arity.line, arity.col)
            self.table.sort(name)
            self.problem.sorts.append(name)
        elif cmd == "declare-fun":
            name = self.reader.next().text
            dom = [self.sort_of(tok) for tok in self.listed()]
            rng = self.sort_of(self.reader.next())
            self.declare(name, tuple(dom), rng, head)
        elif cmd == "declare-const":
            name = self.reader.next().text
            rng = self.sort_of(self.reader.next())
            self.declare(name, (), rng, head)
        elif cmd == "assert":
            body = self.reader.sexpr()
            t = self.formula(body, {})
            if t.sort != self.table.BOOL:
                raise SortMismatch("asserted term is not boolean")
            self.problem.asserted.append(t)
        elif cmd in ("check-sat", "exit"):
            self.problem.check_sat = self.problem.check_sat or cmd == "check-sat"
        else:
            raise ParseError(f"unsupported command '{cmd}'", head.line, head.col)
        self.reader.expect(")")

    def listed(self):
        self.reader.expect("(")
        out = []
        while True:
            t = self.reader.peek()
            if t is None:
                raise ParseError("unclosed '('")
            if t.text == ")":
                self.reader.next()
                return out
            out.append(self.reader.next())

    def sort_of(self, tok) -> int:
        name = tok.text
        if name in ("Bool", "Int") or name in self.problem.sorts:
            return self.table.sort(name)
        raise UnknownSymbol(f"{tok.line}:{tok.col}: unknown sort '{name}'")

    def declare(self, name, dom, rng, head):
        if name in self.problem.signature:
            raise ParseError(f"'{name}' already declared", head.line, head.col)
        self.problem.signature[name] = (dom, rng)

    # -- formula layer -------------------------------------------------------

    def formula(self, sx, scope: dict[str, Term]) -> Term:
        if isinstance(sx, _Token):
            return self.atom_token(sx, scope)
        if not sx:
            raise ParseError("empty application")
        head = sx[0]
        if isinstance(head, list):
            raise ParseError("application head must be a symbol")
        op = head.text
        if op in ("forall", "exists"):
            return self.quantifier(op, sx, scope, head)
        args = [self.formula(a, scope) for a in sx[1:]]
        if op in _CONNECTIVES:
            return self.connective(op, args, head)
        if op == "=":
            return self.equality(args, head)
        return self.application(op, args, head)

    def atom_token(self, tok, scope):
        text = tok.text
        if text == "true":
            return self.table.true_()
        if text == "false":
            return self.table.false_()
        if text.isdigit():
            return self.table.numeral(int(text))
        if text in scope:
            return scope[text]
        sig = self.problem.signature.get(text)
        if sig is None:
            raise UnknownSymbol(f"{tok.line}:{tok.col}: unknown symbol '{text}'")
        dom, rng = sig
        if dom:
            raise ArityMismatch(f"'{text}' expects {len(dom)} arguments, got 0")
        return self.table.mk(Kind.UF_CONST, self.table.symbol(text), (), rng)

    def connective(self, op, args, head):
        kind = _CONNECTIVES[op]
        if kind is Kind.NOT:
            if len(args) != 1:
                raise ArityMismatch("not takes 1 argument")
            return self.table.mk_not(args[0])
        if not args or (len(args) < 2 and kind in (Kind.DISTINCT, Kind.IMPLIES)):
            raise ArityMismatch(f"'{op}' needs more arguments")
        try:
            if kind in (Kind.AND, Kind.OR):
                return args[0] if len(args) == 1 else self.table.mk(kind, NO_SYMBOL, tuple(args))
            if kind is Kind.IMPLIES:  # right-associative n-ary
                out = args[-1]
                for a in reversed(args[:-1]):
                    out = self.table.mk(Kind.IMPLIES, NO_SYMBOL, (a, out))
                return out
            return self.table.mk(kind, NO_SYMBOL, tuple(args))
        except (ArityMismatch, SortMismatch) as e:
            raise type(e)(f"{head.line}:{head.col}: {e}") from None

    def equality(self, args, head):
        if len(args) < 2:
            raise ArityMismatch("'=' needs at least 2 arguments")
        kind = Kind.EQUIV if args[0].sort == self.table.BOOL else Kind.EQUAL
        try:
            pairs = [self.table.mk(kind, NO_SYMBOL, (a, b))
                     for a, b in zip(args, args[1:])]
        except SortMismatch as e:
            raise SortMismatch(f"{head.line}:{head.col}: {e}") from None
        return self.table.mk_and(pairs)

    def application(self, op, args, head):
        sig = self.problem.signature.get(op)
        if sig is None:
            raise UnknownSymbol(f"{head.line}:{head.col}: unknown symbol '{op}'")
        dom, rng = sig
        if len(args) != len(dom):
            raise ArityMismatch(
                f"{head.line}:{head.col}: '{op}' expects {len(dom)} arguments, "
                f"got {len(args)}")
        for a, want in zip(args, dom):
            if a.sort != want:
                raise SortMismatch(
                    f"{head.line}:{head.col}: argument of '{op}' has sort "
                    f"{self.table.sort_name(a.sort)}, expected "
                    f"{self.table.sort_name(want)}")
        if not args:
            return self.table.mk(Kind.UF_CONST, self.table.symbol(op), (), rng)
        return self.table.mk(Kind.UF_APPLY, self.table.symbol(op), tuple(args), rng)

    def quantifier(self, op, sx, scope, head):
        if len(sx) != 3 or not isinstance(sx[1], list):
            raise ParseError("quantifier needs a binder list and a body",
                             head.line, head.col)
        inner = dict(scope)
        bound = []
        for b in sx[1]:
            if not (isinstance(b, list) and len(b) == 2
                    and isinstance(b[0], _Token) and isinstance(b[1], _Token)):
                raise ParseError("binder must be (name Sort)", head.line, head.col)
            name = b[0].text
            sort = self.sort_of(b[1])
            # rename shadowed binders so bound variables are scope-unambiguous
            if name in inner:
                self.fresh_counter += 1
                name = f"{name}!{self.fresh_counter}"
            var = self.table.bound_var(name, sort)
            inner[b[0].text] = var
            bound.append(var)
        if not bound:
            raise ParseError("empty binder list", head.line, head.col)
        body = self.formula(sx[2], inner)
        kind = Kind.FORALL if op == "forall" else Kind.EXISTS
        return self.table.mk(kind, NO_SYMBOL, tuple(bound) + (body,))


def parse(text: str | bytes, name: str = "<input>") -> Problem:
    """Parse a problem; raises ParseError/UnknownSymbol/ArityMismatch/SortMismatch."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return _Parser(text, name).run()


def parse_file(path, name: str | None = None) -> Problem:
    with open(path, "rb") as fh:
        data = fh.read()
    if name is None:
        name = str(path).rsplit("/", 1)[-1].removesuffix(".smt2")
    return parse(data, name)
