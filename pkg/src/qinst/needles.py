"""Synthetic needle corpus: refutations hidden behind term-spawning distractors.

Each problem chains a unary function from a start fact to a negated goal; the
chain closes only by instantiating one or two "needle" quantifiers.  The m
distractor quantifiers are single positive literals that merely spawn fresh
terms.  Needles carry a NOT/OR connective signature that distractors lack, so
kind-count features separate the classes by construction.
"""
from __future__ import annotations

import os

from .rng import CounterRng

MIN_DEPTH = 4
MAX_DEPTH = 16


def needle_problem_text(index: int, m_distractors: int, seed: int) -> str:
    rng = CounterRng(seed, "needle", index)
    depth = MIN_DEPTH + rng.randint(MAX_DEPTH - MIN_DEPTH + 1)
    two_needles = rng.randint(2) == 1
    tag = f"{rng.next_u64() & 0xFFFF:04x}"

    f, a = f"f{tag}", f"a{tag}"
    p, q = f"p{tag}", f"q{tag}"

    decls = [
        "(set-logic UF)",
        "(declare-sort S 0)",
        f"(declare-fun {f} (S) S)",
        f"(declare-fun {p} (S) Bool)",
        f"(declare-const {a} S)",
    ]
    if two_needles:
        decls.append(f"(declare-fun {q} (S) Bool)")

    def chain(k: int) -> str:
        out = a
        for _ in range(k):
            out = f"({f} {out})"
        return out

    if two_needles:
        needles = [
            f"(assert (forall ((x S)) (or (not ({p} x)) ({q} ({f} x)))))",
            f"(assert (forall ((x S)) (or (not ({q} x)) ({p} ({f} x)))))",
        ]
        goal_pred = p if depth % 2 == 0 else q
    else:
        needles = [f"(assert (forall ((x S)) (or (not ({p} x)) ({p} ({f} x)))))"]
        goal_pred = p

    quantified = list(needles)
    for j in range(m_distractors):
        dp, dg = f"d{tag}x{j}", f"g{tag}x{j}"
        decls.append(f"(declare-fun {dp} (S) Bool)")
        decls.append(f"(declare-fun {dg} (S) S)")
        arg = f"({dg} x)" if rng.randint(2) == 0 else f"({dg} ({dg} x))"
        quantified.append(f"(assert (forall ((x S)) ({dp} {arg})))")
    rng2 = CounterRng(seed, "order", index)
    rng2.shuffle(quantified)

    lines = [f"; needle corpus problem {index} (seed {seed}, depth {depth}, "
             f"needles {2 if two_needles else 1}, distractors {m_distractors})"]
    lines += decls
    lines.append(f"(assert ({p} {a}))")
    lines.append(f"(assert (not ({goal_pred} {chain(depth)})))")
    lines += quantified
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


def gen_needle_corpus(out_dir, n_problems: int, m_distractors: int,
                      seed: int) -> list[str]:
    """Write the corpus to `out_dir`; returns the problem ids (file stems)."""
    os.makedirs(out_dir, exist_ok=True)
    ids = []
    for i in range(n_problems):
        pid = f"needle_{i:04d}"
        with open(os.path.join(out_dir, pid + ".smt2"), "w", encoding="utf-8") as fh:
            fh.write(needle_problem_text(i, m_distractors, seed))
        ids.append(pid)
    with open(os.path.join(out_dir, "corpus.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(ids) + "\n")
    return ids
