"""Tree matching between stored tree-grams and DOM trees.

Two measures are provided:

* simple tree matching, the size of the largest top-down, order-preserving
  mapping between two labeled trees;
* clustered tree matching, which weighs each matched node by one over the
  larger sibling count of the two nodes, giving an absolute similarity in
  ``[0, 1]`` where changes in crowded or deep levels cost little.

The DP kernels live in ``_match_c`` (compiled) with ``_match_py`` as the
fallback; set ``TREEGRAM_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os
from array import array
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence, Union

from . import _match_py
from .dom import DomNode, DomTree, LabelMode, make_label
from .snapshot import DEFAULT_COMPARABLE, ComparableAttributes, GramNode, TreeGram
from .strsim import bigram_similarity, jaro_winkler

if os.environ.get("TREEGRAM_PURE"):
    _kernel = _match_py
    BACKEND = "python"
else:
    try:
        from . import _match_c as _kernel

        BACKEND = "cython"
    except ImportError:  # extension not built
        _kernel = _match_py
        BACKEND = "python"


class Algorithm(str, Enum):
    SIMPLE = "simple_tm"
    CLUSTERED = "clustered_tm"
    BIGRAM = "bigram"
    JARO_WINKLER = "jaro_winkler"

    @property
    def is_tree(self) -> bool:
        return self in (Algorithm.SIMPLE, Algorithm.CLUSTERED)


STRING_METRICS = {
    Algorithm.BIGRAM: bigram_similarity,
    Algorithm.JARO_WINKLER: jaro_winkler,
}

AnyTree = Union[DomNode, GramNode, TreeGram]


# -- flattening --------------------------------------------------------------

_INTERN: dict[str, int] = {}


def _intern(label: str) -> int:
    code = _INTERN.get(label)
    if code is None:
        code = _INTERN.setdefault(label, len(_INTERN))
    return code


@dataclass(frozen=True)
class Flat:
    """Pre-order array form consumed by the kernels."""

    labels: array
    ptr: array
    kids: array
    sizes: array

    def args(self):
        return self.labels, self.ptr, self.kids


def _gram_label(node: GramNode, mode: LabelMode, stored_mode: LabelMode) -> str:
    if mode == stored_mode:
        return node.label
    return make_label(node.tag, node.attr_map, mode)


def flatten(root: AnyTree, mode: LabelMode = LabelMode()) -> Flat:
    stored = LabelMode()
    if isinstance(root, TreeGram):
        stored = root.label_mode
        root = root.root
    order = list(root.iter())
    index = {id(n): k for k, n in enumerate(order)}
    labels = array("i")
    ptr = array("i", [0])
    kids = array("i")
    for node in order:
        if isinstance(node, GramNode):
            labels.append(_intern(_gram_label(node, mode, stored)))
        else:
            labels.append(_intern(make_label(node.tag, node.attrs, mode)))
        kids.extend(index[id(c)] for c in node.children)
        ptr.append(len(kids))
    sizes = array("i", [1]) * len(order)
    for k in range(len(order) - 1, -1, -1):
        for c in kids[ptr[k] : ptr[k + 1]]:
            sizes[k] += sizes[c]
    return Flat(labels, ptr, kids, sizes)


def flatten_tree(tree: DomTree, mode: LabelMode) -> Flat:
    """Flattened page, cached per label mode; index ``k`` is node uid ``k``."""
    key = ("flat", mode)
    flat = tree._cache.get(key)
    if flat is None:
        flat = tree._cache[key] = flatten(tree.root, mode)
    return flat


# -- pairwise measures -------------------------------------------------------


def node_count(t: AnyTree) -> int:
    return (t.root if isinstance(t, TreeGram) else t).size()


def simple_tree_matching(a: AnyTree, b: AnyTree, mode: LabelMode = LabelMode()) -> int:
    fa, fb = flatten(a, mode), flatten(b, mode)
    return _kernel.stm(*fa.args(), 0, *fb.args(), 0)


def clustered_tree_matching(a: AnyTree, b: AnyTree, mode: LabelMode = LabelMode()) -> float:
    fa, fb = flatten(a, mode), flatten(b, mode)
    return _kernel.ctm(*fa.args(), 0, *fb.args(), 0)


def normalized_stm(a: AnyTree, b: AnyTree, mode: LabelMode = LabelMode()) -> float:
    """Simple matching divided by the larger node count."""
    return simple_tree_matching(a, b, mode) / max(node_count(a), node_count(b))


@dataclass
class MatchTrace:
    """One matched node pair and the value Algorithm 1 returns for it."""

    a: object
    b: object
    value: Fraction
    children: list


def clustered_match_trace(a: AnyTree, b: AnyTree, mode: LabelMode = LabelMode()) -> MatchTrace | None:
    """Step-by-step clustered matching in exact rational arithmetic.

    Divides by the sibling count at every call exactly as the published
    pseudocode does and records the chosen child alignment, so the value
    of every matched pair can be inspected. Returns None when the roots
    have different labels. Slow; meant for inspection and cross-checks.
    """
    sa = a.label_mode if isinstance(a, TreeGram) else LabelMode()
    sb = b.label_mode if isinstance(b, TreeGram) else LabelMode()
    ra = a.root if isinstance(a, TreeGram) else a
    rb = b.root if isinstance(b, TreeGram) else b

    def label(node, stored):
        if isinstance(node, GramNode):
            return _gram_label(node, mode, stored)
        return make_label(node.tag, node.attrs, mode)

    def run(x, y, tx, ty):
        if label(x, sa) != label(y, sb):
            return Fraction(0), None
        m, n = len(x.children), len(y.children)
        M = [[Fraction(0)] * (n + 1) for _ in range(m + 1)]
        W = [[None] * (n + 1) for _ in range(m + 1)]
        for i in range(1, m + 1):
            for j in range(1, n + 1):
                W[i][j] = run(x.children[i - 1], y.children[j - 1], m, n)
                M[i][j] = max(M[i][j - 1], M[i - 1][j], M[i - 1][j - 1] + W[i][j][0])
        # traceback of one optimal alignment
        kids = []
        i, j = m, n
        while i > 0 and j > 0:
            w, tr = W[i][j]
            if tr is not None and M[i][j] == M[i - 1][j - 1] + w:
                kids.append(tr)
                i, j = i - 1, j - 1
            elif M[i][j] == M[i - 1][j]:
                i -= 1
            else:
                j -= 1
        kids.reverse()
        if m > 0 and n > 0:
            value = M[m][n] * Fraction(1, max(tx, ty))
        else:
            value = M[m][n] + Fraction(1, max(tx, ty))
        return value, MatchTrace(x, y, value, kids)

    return run(ra, rb, 1, 1)[1]


# -- sub-tree search ---------------------------------------------------------


@dataclass(frozen=True)
class MatchConfig:
    algorithm: Algorithm = Algorithm.CLUSTERED
    label_mode: LabelMode = LabelMode()
    threshold: float = 0.8
    attribute_check: bool = False
    max_candidates: int = 1000

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be positive")


@dataclass(frozen=True)
class MatchCandidate:
    node: DomNode
    score: float
    algorithm: Algorithm


def attribute_agreement(
    gram_root: GramNode,
    node: DomNode,
    comparable: ComparableAttributes = DEFAULT_COMPARABLE,
) -> float:
    """Factor in ``[0.5, 1]`` rewarding equal comparable attributes.

    With ``f`` the fraction of comparable attribute names (union of both
    roots) whose values agree, returns ``(1 + f) / 2``; 1 when neither
    root has comparable attributes.
    """
    mine = gram_root.attr_map
    theirs = comparable.select(node.tag, node.attrs)
    names = set(mine) | set(theirs)
    if not names:
        return 1.0
    agree = sum(1 for k in names if mine.get(k) == theirs.get(k))
    return (1.0 + agree / len(names)) / 2.0


def _leaf_text_nodes(candidates: Iterable[DomNode]) -> list[DomNode]:
    return [
        n for n in candidates
        if n.is_text or (len(n.children) == 1 and n.children[0].is_text)
    ]


def rank_subtrees(
    grams: TreeGram | Sequence[TreeGram],
    tree: DomTree,
    cfg: MatchConfig,
    scope: DomNode | None = None,
    comparable: ComparableAttributes = DEFAULT_COMPARABLE,
) -> list[MatchCandidate]:
    """Score every node that can match; no threshold, no truncation.

    Only nodes whose label equals a gram's root label are scored, the rest
    score 0 by definition. With ``scope`` the search covers the strict
    descendants of that node, otherwise the whole document. A node's score
    is the maximum over all given grams.
    """
    if isinstance(grams, TreeGram):
        grams = [grams]
    if scope is None:
        pool = tree.nodes
    else:
        pool = [n for n in scope.iter() if n is not scope]
    page = flatten_tree(tree, cfg.label_mode)
    best: dict[int, float] = {}
    for gram in grams:
        gflat = flatten(gram, cfg.label_mode)
        root_label = gflat.labels[0]
        cands = [n for n in pool if page.labels[n.uid] == root_label]
        if not cands:
            continue
        if cfg.algorithm == Algorithm.CLUSTERED:
            scores = _kernel.ctm_many(*gflat.args(), 0, *page.args(), [n.uid for n in cands])
        elif cfg.algorithm == Algorithm.SIMPLE:
            raw = _kernel.stm_many(*gflat.args(), 0, *page.args(), [n.uid for n in cands])
            gsize = gflat.sizes[0]
            scores = [r / max(gsize, page.sizes[n.uid]) for r, n in zip(raw, cands)]
        else:
            if not gram.is_leaf_text:
                continue
            metric = STRING_METRICS[cfg.algorithm]
            stored = gram.root.text_content()
            cands = _leaf_text_nodes(cands)
            scores = [metric(stored, n.text_content()) for n in cands]
        for node, score in zip(cands, scores):
            if cfg.attribute_check:
                score *= attribute_agreement(gram.root, node, comparable)
            if score > best.get(node.uid, -1.0):
                best[node.uid] = score
    ranked = [MatchCandidate(tree.nodes[uid], s, cfg.algorithm) for uid, s in best.items()]
    ranked.sort(key=lambda c: (-c.score, c.node.uid))
    return ranked


def best_matching_subtrees(
    grams: TreeGram | Sequence[TreeGram],
    tree: DomTree,
    cfg: MatchConfig,
    scope: DomNode | None = None,
    comparable: ComparableAttributes = DEFAULT_COMPARABLE,
) -> list[MatchCandidate]:
    """Candidates scoring at least ``cfg.threshold``, best first."""
    ranked = rank_subtrees(grams, tree, cfg, scope, comparable)
    return [c for c in ranked if c.score >= cfg.threshold][: cfg.max_candidates]
