"""Gradient-boosted regression trees for binary classification, from scratch.

Exact sorted-feature split finding (feature values are small counts), one
Newton step per leaf, leaf-wise growth to a leaf budget.  Training is fully
deterministic given (data order, seed); models serialize to a versioned text
format that round-trips predictions exactly.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateData, FormatError, KindChecksumMismatch, WidthMismatch
from .features import FeatureVector
from .rng import CounterRng
from .terms import kind_checksum, kind_count

LEAF_L2 = 1e-3  # keeps pure-leaf Newton steps finite
_PCLIP = 1e-15
_PRIOR_CLIP = 1e-6


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def logloss(score, label):
    """Binary log-loss of a raw score against a 0/1 label."""
    p = np.clip(sigmoid(np.asarray(score, dtype=float)), _PCLIP, 1.0 - _PCLIP)
    y = np.asarray(label, dtype=float)
    return -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))


def loss_gradient(score, label):
    """d logloss / d score = sigmoid(score) - label."""
    return sigmoid(np.asarray(score, dtype=float)) - np.asarray(label, dtype=float)


@dataclass
class Hyperparams:
    num_trees: int = 100
    max_leaves: int = 31
    min_samples_leaf: int = 1
    learning_rate: float = 0.1
    feature_subsample: float = 1.0
    seed: int = 0

    def validate(self):
        if (self.num_trees <= 0 or self.max_leaves <= 1
                or self.min_samples_leaf <= 0 or self.learning_rate <= 0
                or not 0 < self.feature_subsample <= 1):
            raise ValueError(f"invalid hyperparameters: {self}")


# the paper-style search grid; the largest leaf budget allows very deep trees
GRID = [
    Hyperparams(num_trees=nt, max_leaves=ml, learning_rate=lr)
    for nt in (50, 100, 200) for ml in (31, 255, 1600) for lr in (0.1, 0.3)
]


@dataclass(frozen=True)
class Row:
    features: FeatureVector
    label: int
    problem: str


class TrainingSet:
    """Labeled (context, quantifier) vectors with a problem-level split."""

    def __init__(self, rows: list[Row], split: dict[str, str]):
        width = 2 * kind_count()
        for r in rows:
            if r.features.width != width:
                raise WidthMismatch(f"row width {r.features.width}, expected {width}")
            tag = split.get(r.problem)
            if tag not in ("train", "dev"):
                raise ValueError(f"problem {r.problem!r} has no train/dev tag")
        self.rows = list(rows)
        self.split = dict(split)

    def part(self, tag: str) -> list[Row]:
        return [r for r in self.rows if self.split[r.problem] == tag]

    def __len__(self):
        return len(self.rows)


def _dense(rows: list[Row]) -> tuple[np.ndarray, np.ndarray]:
    width = 2 * kind_count()
    X = np.zeros((len(rows), width), dtype=np.float64)
    y = np.zeros(len(rows), dtype=np.float64)
    for i, r in enumerate(rows):
        for j, c in r.features.counts.items():
            X[i, j] = c
        y[i] = r.label
    return X, y


@dataclass
class _Node:
    feature: int = -1
    threshold: int = 0
    left: int = -1
    right: int = -1
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


@dataclass
class RegressionTree:
    nodes: list[_Node] = field(default_factory=list)

    def leaf_value(self, vec: FeatureVector) -> float:
        i = 0
        while True:
            nd = self.nodes[i]
            if nd.is_leaf:
                return nd.value
            i = nd.left if vec.get(nd.feature) <= nd.threshold else nd.right

    def leaf_values(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape[0])
        for r in range(X.shape[0]):
            i = 0
            while True:
                nd = self.nodes[i]
                if nd.is_leaf:
                    out[r] = nd.value
                    break
                i = nd.left if X[r, nd.feature] <= nd.threshold else nd.right
        return out

    def internal_count(self) -> int:
        return sum(1 for nd in self.nodes if not nd.is_leaf)


@dataclass
class GbdtModel:
    trees: list[RegressionTree] = field(default_factory=list)
    learning_rate: float = 1.0
    base_score: float = 0.0
    num_kinds: int = 0
    hp: Hyperparams | None = None
    split_counts: dict[int, int] = field(default_factory=dict)
    gains: dict[int, float] = field(default_factory=dict)
    train_loss: list[float] = field(default_factory=list)

    def raw_score(self, vec: FeatureVector) -> float:
        return self.base_score + self.learning_rate * sum(
            t.leaf_value(vec) for t in self.trees)

    def predict(self, vec: FeatureVector) -> float:
        if self.num_kinds and vec.width != 2 * self.num_kinds:
            raise WidthMismatch(
                f"vector width {vec.width}, model expects {2 * self.num_kinds}")
        return float(sigmoid(self.raw_score(vec)))


def predict(model: GbdtModel, vec: FeatureVector) -> float:
    return model.predict(vec)


class _BuildLeaf:
    __slots__ = ("rows", "grad", "hess", "seq", "best", "node_ix")

    def __init__(self, rows, grad, hess, seq):
        self.rows = rows
        self.grad = float(grad)
        self.hess = float(hess)
        self.seq = seq
        self.best = None  # (gain, feature, threshold, left_mask)
        self.node_ix = -1


def _best_split(X, g, h, rows, feats, min_leaf):
    """Exact split search; returns (gain, feature, int threshold, mask) or None."""
    G = float(g[rows].sum())
    H = float(h[rows].sum())
    parent = G * G / (H + LEAF_L2)
    best = None
    for f in feats:
        vals = X[rows, f]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        cg = np.cumsum(g[rows][order])
        ch = np.cumsum(h[rows][order])
        cut = np.nonzero(sv[:-1] != sv[1:])[0]
        if cut.size == 0:
            continue
        sizes_ok = (cut + 1 >= min_leaf) & (len(rows) - cut - 1 >= min_leaf)
        cut = cut[sizes_ok]
        if cut.size == 0:
            continue
        gl, hl = cg[cut], ch[cut]
        gr, hr = G - gl, H - hl
        gains = gl * gl / (hl + LEAF_L2) + gr * gr / (hr + LEAF_L2) - parent
        k = int(np.argmax(gains))
        gain = float(gains[k])
        if gain > 0 and (best is None or gain > best[0]):
            thr = int(sv[cut[k]])
            best = (gain, f, thr)
    if best is None:
        return None
    gain, f, thr = best
    mask = X[rows, f] <= thr
    return gain, f, thr, mask


def _fit_tree(X, g, h, hp: Hyperparams, feats, split_counts, gains_acc) -> RegressionTree:
    all_rows = np.arange(X.shape[0])
    root = _BuildLeaf(all_rows, g.sum(), h.sum(), 0)
    root.best = _best_split(X, g, h, all_rows, feats, hp.min_samples_leaf)
    leaves = [root]
    seq = 1
    internal: list[tuple[_BuildLeaf, int, int, _BuildLeaf, _BuildLeaf]] = []

    while len(leaves) < hp.max_leaves:
        pick = None
        for leaf in leaves:
            if leaf.best is None:
                continue
            if pick is None or leaf.best[0] > pick.best[0]:
                pick = leaf
        if pick is None:
            break
        gain, f, thr, mask = pick.best
        lrows, rrows = pick.rows[mask], pick.rows[~mask]
        lchild = _BuildLeaf(lrows, g[lrows].sum(), h[lrows].sum(), seq)
        rchild = _BuildLeaf(rrows, g[rrows].sum(), h[rrows].sum(), seq + 1)
        seq += 2
        lchild.best = _best_split(X, g, h, lrows, feats, hp.min_samples_leaf)
        rchild.best = _best_split(X, g, h, rrows, feats, hp.min_samples_leaf)
        leaves.remove(pick)
        leaves.extend([lchild, rchild])
        internal.append((pick, f, thr, lchild, rchild))
        split_counts[f] = split_counts.get(f, 0) + 1
        gains_acc[f] = gains_acc.get(f, 0.0) + gain

    # flatten: parents were created before their children, so emit in that order
    tree = RegressionTree()
    emitted: dict[int, int] = {}

    def emit(leaf: _BuildLeaf) -> int:
        ix = len(tree.nodes)
        tree.nodes.append(_Node(value=-leaf.grad / (leaf.hess + LEAF_L2)))
        emitted[id(leaf)] = ix
        return ix

    split_of = {id(parent): (f, thr, lc, rc) for parent, f, thr, lc, rc in internal}

    def build(leaf: _BuildLeaf) -> int:
        info = split_of.get(id(leaf))
        if info is None:
            return emit(leaf)
        f, thr, lc, rc = info
        ix = len(tree.nodes)
        tree.nodes.append(_Node(feature=f, threshold=thr))
        tree.nodes[ix].left = build(lc)
        tree.nodes[ix].right = build(rc)
        return ix

    build(root)
    return tree


def train(data: TrainingSet, hp: Hyperparams) -> GbdtModel:
    """Boost `hp.num_trees` trees on the train partition; deterministic."""
    hp.validate()
    rows = data.part("train")
    if not rows:
        raise DegenerateData("no training rows")
    X, y = _dense(rows)
    k = kind_count()
    prior = float(np.clip(y.mean(), _PRIOR_CLIP, 1.0 - _PRIOR_CLIP))
    base = math.log(prior / (1.0 - prior))
    if y.min() == y.max():
        warnings.warn("single-class training data: returning constant model")
        return GbdtModel([], hp.learning_rate, base, k, hp)

    width = X.shape[1]
    n_feats = max(1, round(hp.feature_subsample * width))
    scores = np.full(X.shape[0], base)
    model = GbdtModel([], hp.learning_rate, base, k, hp)
    for it in range(hp.num_trees):
        p = sigmoid(scores)
        g = p - y
        h = p * (1.0 - p)
        if n_feats < width:
            feats = CounterRng(hp.seed, "feats", it).sample_indices(width, n_feats)
        else:
            feats = list(range(width))
        tree = _fit_tree(X, g, h, hp, feats, model.split_counts, model.gains)
        scores = scores + hp.learning_rate * tree.leaf_values(X)
        model.trees.append(tree)
        model.train_loss.append(float(logloss(scores, y).mean()))
    return model


def importance(model: GbdtModel) -> list[tuple[int, int, float]]:
    """(feature, split count, total gain) ranked by descending gain."""
    rows = [(f, model.split_counts[f], model.gains.get(f, 0.0))
            for f in model.split_counts]
    rows.sort(key=lambda r: (-r[2], r[0]))
    return rows


def select_model(candidates: list[GbdtModel], dev: TrainingSet) -> GbdtModel:
    """Pick the candidate maximizing 2*pos + neg accuracy on the dev rows.

    The metric is compared in exact integer arithmetic; ties break toward
    fewer trees, then earlier candidate order.
    """
    if not candidates:
        raise ValueError("no candidates")
    rows = dev.part("dev") or dev.rows
    pos = [r for r in rows if r.label == 1]
    neg = [r for r in rows if r.label == 0]
    if not pos or not neg:
        raise DegenerateData("dev set needs both classes")
    best = None
    for ix, m in enumerate(candidates):
        pc = sum(1 for r in pos if m.predict(r.features) >= 0.5)
        nc = sum(1 for r in neg if m.predict(r.features) < 0.5)
        metric = 2 * pc * len(neg) + nc * len(pos)  # (2*pos+neg) * |pos|*|neg|
        key = (metric, -len(m.trees), -ix)
        if best is None or key > best[0]:
            best = (key, m)
    return best[1]


def selection_metric(model: GbdtModel, rows: list[Row]) -> tuple[float, float]:
    """(pos accuracy, neg accuracy) at threshold 0.5, for reporting."""
    pos = [r for r in rows if r.label == 1]
    neg = [r for r in rows if r.label == 0]
    pc = sum(1 for r in pos if model.predict(r.features) >= 0.5)
    nc = sum(1 for r in neg if model.predict(r.features) < 0.5)
    return (pc / len(pos) if pos else 0.0, nc / len(neg) if neg else 0.0)


# -- text serialization ---------------------------------------------------------

MAGIC = "QGBDT v1"


def save(model: GbdtModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(model))


def dumps(model: GbdtModel) -> str:
    hp = model.hp or Hyperparams()
    out = [f"{MAGIC} K={model.num_kinds or kind_count()} checksum={kind_checksum()}"]
    out.append(f"meta trees={len(model.trees)} learning_rate={model.learning_rate!r} "
               f"base_score={model.base_score!r}")
    out.append(f"hp num_trees={hp.num_trees} max_leaves={hp.max_leaves} "
               f"min_samples_leaf={hp.min_samples_leaf} "
               f"learning_rate={hp.learning_rate!r} "
               f"feature_subsample={hp.feature_subsample!r} seed={hp.seed}")
    if model.train_loss:
        out.append("loss " + " ".join(repr(v) for v in model.train_loss))
    if model.split_counts:
        out.append("importance " + " ".join(
            f"{f}:{model.split_counts[f]}:{model.gains.get(f, 0.0)!r}"
            for f in sorted(model.split_counts)))
    for i, tree in enumerate(model.trees):
        out.append(f"tree {i} {len(tree.nodes)}")
        for j, nd in enumerate(tree.nodes):
            if nd.is_leaf:
                out.append(f"l {j} {nd.value!r}")
            else:
                out.append(f"n {j} {nd.feature} {nd.threshold} {nd.left} {nd.right}")
    out.append("end")
    return "\n".join(out) + "\n"


def load(path) -> GbdtModel:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def loads(text: str) -> GbdtModel:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(MAGIC + " "):
        raise FormatError("missing QGBDT v1 header")
    try:
        header = dict(kv.split("=", 1) for kv in lines[0][len(MAGIC):].split())
        k = int(header["K"])
        checksum = header["checksum"]
    except (ValueError, KeyError) as e:
        raise FormatError(f"bad header: {e}") from None
    if checksum != kind_checksum() or k != kind_count():
        raise KindChecksumMismatch(
            "model was trained against a different kind table")
    model = GbdtModel(num_kinds=k)
    if lines[-1].strip() != "end":
        raise FormatError("truncated model file (missing 'end')")
    try:
        i = 1
        while i < len(lines) and not lines[i].startswith("tree ") \
                and lines[i].strip() != "end":
            parts = lines[i].split()
            if parts[0] == "meta":
                kv = dict(p.split("=", 1) for p in parts[1:])
                model.learning_rate = float(kv["learning_rate"])
                model.base_score = float(kv["base_score"])
            elif parts[0] == "hp":
                kv = dict(p.split("=", 1) for p in parts[1:])
                model.hp = Hyperparams(
                    num_trees=int(kv["num_trees"]),
                    max_leaves=int(kv["max_leaves"]),
                    min_samples_leaf=int(kv["min_samples_leaf"]),
                    learning_rate=float(kv["learning_rate"]),
                    feature_subsample=float(kv["feature_subsample"]),
                    seed=int(kv["seed"]))
            elif parts[0] == "loss":
                model.train_loss = [float(v) for v in parts[1:]]
            elif parts[0] == "importance":
                for entry in parts[1:]:
                    f, c, gval = entry.split(":")
                    model.split_counts[int(f)] = int(c)
                    model.gains[int(f)] = float(gval)
            else:
                raise FormatError(f"unexpected line {i + 1}: {lines[i]!r}")
            i += 1
        while i < len(lines) and lines[i].strip() != "end":
            head = lines[i].split()
            if head[0] != "tree" or len(head) != 3:
                raise FormatError(f"expected tree header at line {i + 1}")
            count = int(head[2])
            tree = RegressionTree([None] * count)
            i += 1
            for _ in range(count):
                parts = lines[i].split()
                j = int(parts[1])
                if parts[0] == "l":
                    tree.nodes[j] = _Node(value=float(parts[2]))
                elif parts[0] == "n":
                    tree.nodes[j] = _Node(feature=int(parts[2]),
                                          threshold=int(parts[3]),
                                          left=int(parts[4]), right=int(parts[5]))
                else:
                    raise FormatError(f"bad node line {i + 1}: {lines[i]!r}")
                i += 1
            if any(nd is None for nd in tree.nodes):
                raise FormatError("incomplete tree")
            model.trees.append(tree)
    except (IndexError, ValueError) as e:
        raise FormatError(f"malformed model file: {e}") from None
    return model
