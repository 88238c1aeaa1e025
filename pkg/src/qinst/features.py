"""Bag-of-kinds feature vectors: per-formula, per-problem, and concatenated."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import WidthMismatch
from .smtparse import Problem
from .terms import Kind, Term, kind_count


@dataclass
class FeatureVector:
    """Sparse non-negative count vector; absent indices are zero."""

    width: int
    counts: dict[int, int] = field(default_factory=dict)

    def get(self, i: int) -> int:
        return self.counts.get(i, 0)

    def total(self) -> int:
        return sum(self.counts.values())

    def add(self, other: "FeatureVector") -> "FeatureVector":
        if self.width != other.width:
            raise WidthMismatch(f"{self.width} vs {other.width}")
        out = dict(self.counts)
        for i, c in other.counts.items():
            out[i] = out.get(i, 0) + c
        return FeatureVector(self.width, out)

    def __eq__(self, other):
        return (isinstance(other, FeatureVector)
                and self.width == other.width and self.counts == other.counts)


def formula_features(t: Term) -> FeatureVector:
    """Symbol-occurrence counts over the formula tree (DAG sharing ignored).

    Quantifier nodes count once; their binder lists are not counted, while
    every bound-variable occurrence in the body is.
    """
    memo: dict[int, dict[int, int]] = {}

    def walk(u: Term) -> dict[int, int]:
        hit = memo.get(u.id)
        if hit is not None:
            return hit
        counts = {int(u.kind): 1}
        kids = (u.children[-1],) if u.kind in (Kind.FORALL, Kind.EXISTS) else u.children
        for c in kids:
            for i, n in walk(c).items():
                counts[i] = counts.get(i, 0) + n
        memo[u.id] = counts
        return counts

    return FeatureVector(kind_count(), dict(walk(t)))


def problem_features(p: Problem) -> FeatureVector:
    """Pointwise sum of the features of all asserted (pre-clausal) formulas."""
    out = FeatureVector(kind_count())
    for t in p.asserted:
        out = out.add(formula_features(t))
    return out


def concat_context(ctx: FeatureVector, q: FeatureVector) -> FeatureVector:
    """(context, quantifier) layout: kind i lands at i and K+i respectively."""
    k = kind_count()
    if ctx.width != k or q.width != k:
        raise WidthMismatch(f"expected two width-{k} halves, "
                            f"got {ctx.width} and {q.width}")
    out = dict(ctx.counts)
    for i, c in q.counts.items():
        out[k + i] = c
    return FeatureVector(2 * k, out)
