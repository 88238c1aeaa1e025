import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from qinst.terms import Kind, TermTable


@pytest.fixture
def table():
    return TermTable()


class Sig:
    """Small helper signature over one uninterpreted sort."""

    def __init__(self, table: TermTable):
        self.table = table
        self.S = table.sort("S")

    def const(self, name, sort=None):
        return self.table.mk(Kind.UF_CONST, self.table.symbol(name), (),
                             sort if sort is not None else self.S)

    def app(self, name, *args, sort=None):
        return self.table.mk(Kind.UF_APPLY, self.table.symbol(name), tuple(args),
                             sort if sort is not None else self.S)

    def pred(self, name, *args):
        return self.app(name, *args, sort=self.table.BOOL)

    def var(self, name, sort=None):
        return self.table.bound_var(name, sort if sort is not None else self.S)

    def eq(self, a, b):
        return self.table.mk(Kind.EQUAL, children=(a, b))


@pytest.fixture
def sig(table):
    return Sig(table)
