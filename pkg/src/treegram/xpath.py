"""A small, exactly specified XPath subset: parsing, evaluation, generation.

Grammar (see ``docs/xpath.md``)::

    expr      ::= path ( "|" path )*
    path      ::= ( "/" | "//" )? step ( "/" step )*
    step      ::= nodetest predicate?
    nodetest  ::= NAME | "*" | "text()"
    predicate ::= "[" INTEGER "]" | "[" "@" NAME "=" QUOTED "]"

A path without a leading slash is relative to the context node. Positions
are 1-based and count siblings that pass the node test, so ``div[2]`` is
the second ``div`` child, not the second child.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .dom import TEXT, DomNode, DomTree
from .errors import MixedTrees, UnsupportedXPath

CHILD = "child"
DESCENDANT = "descendant"
TEXT_TEST = "text()"


@dataclass(frozen=True)
class Step:
    axis: str
    name: str
    position: int | None = None
    attr: tuple[str, str] | None = None

    def __str__(self):
        s = self.name
        if self.position is not None:
            s += f"[{self.position}]"
        elif self.attr is not None:
            s += f"[@{self.attr[0]}={_quote(self.attr[1])}]"
        return s

    def accepts(self, node: DomNode) -> bool:
        if self.name == TEXT_TEST:
            return node.is_text
        if node.is_text:
            return False
        return self.name == "*" or node.tag == self.name


@dataclass(frozen=True)
class Path:
    absolute: bool
    steps: tuple[Step, ...]

    def __str__(self):
        out = []
        for i, step in enumerate(self.steps):
            if step.axis == DESCENDANT:
                out.append("//")
            elif i > 0 or self.absolute:
                out.append("/")
            out.append(str(step))
        return "".join(out)


@dataclass(frozen=True)
class XPathExpr:
    paths: tuple[Path, ...]

    @property
    def source(self) -> str:
        return str(self)

    @property
    def absolute(self) -> bool:
        return all(p.absolute for p in self.paths)

    def __str__(self):
        return " | ".join(str(p) for p in self.paths)


def _quote(value: str) -> str:
    if "'" not in value:
        return f"'{value}'"
    if '"' not in value:
        return f'"{value}"'
    raise UnsupportedXPath(f"attribute value with both quote kinds: {value!r}")


def can_quote(value: str) -> bool:
    return "'" not in value or '"' not in value


# -- parsing -----------------------------------------------------------------

_NAME = r"[A-Za-z_][\w.\-]*"
_STEP = re.compile(
    rf"""(?P<test>text\(\)|\*|{_NAME})
        (?:\[\s*(?:
            (?P<pos>[1-9]\d*)
          | @(?P<attr>{_NAME})\s*=\s*(?:'(?P<sq>[^']*)'|"(?P<dq>[^"]*)")
        )\s*\])?""",
    re.X,
)


def parse_xpath(source: str) -> XPathExpr:
    """Parse ``source``; anything outside the subset raises UnsupportedXPath."""
    if not isinstance(source, str) or not source.strip():
        raise UnsupportedXPath("empty expression")
    paths = []
    i, n = 0, len(source)
    while True:
        path, i = _parse_path(source, i)
        paths.append(path)
        while i < n and source[i].isspace():
            i += 1
        if i == n:
            break
        if source[i] != "|":
            raise UnsupportedXPath(f"unexpected {source[i]!r} at offset {i} in {source!r}")
        i += 1
    return XPathExpr(tuple(paths))


def _parse_path(s: str, i: int) -> tuple[Path, int]:
    n = len(s)
    while i < n and s[i].isspace():
        i += 1
    absolute = False
    axis = CHILD
    if s.startswith("//", i):
        absolute, axis = True, DESCENDANT
        i += 2
    elif s.startswith("/", i):
        absolute = True
        i += 1
    steps = []
    while True:
        m = _STEP.match(s, i)
        if not m:
            raise UnsupportedXPath(f"unsupported step at offset {i} in {s!r}")
        attr = None
        if m.group("attr"):
            value = m.group("sq") if m.group("sq") is not None else m.group("dq")
            attr = (m.group("attr").lower(), value)
        pos = int(m.group("pos")) if m.group("pos") else None
        test = m.group("test")
        if test not in ("*", TEXT_TEST):
            test = test.lower()
        steps.append(Step(axis, test, pos, attr))
        i = m.end()
        if s.startswith("//", i):
            raise UnsupportedXPath(f"'//' is only allowed as a leading axis in {s!r}")
        if s.startswith("/", i):
            i += 1
            axis = CHILD
            continue
        break
    return Path(absolute, tuple(steps)), i


def as_expr(expr: XPathExpr | str) -> XPathExpr:
    return expr if isinstance(expr, XPathExpr) else parse_xpath(expr)


# -- evaluation --------------------------------------------------------------

_DOC = None  # the virtual document node above the root element


def _children(node, tree: DomTree) -> list[DomNode]:
    return [tree.root] if node is _DOC else node.children


def _apply_child_step(ctx, step: Step, tree: DomTree) -> list[DomNode]:
    kids = [c for c in _children(ctx, tree) if step.accepts(c)]
    if step.attr is not None:
        name, value = step.attr
        return [c for c in kids if c.attrs.get(name) == value]
    if step.position is not None:
        return [kids[step.position - 1]] if step.position <= len(kids) else []
    return kids


def _descendant_or_self(ctx, tree: DomTree) -> Iterable:
    if ctx is _DOC:
        yield _DOC
        yield from tree.root.iter()
    else:
        yield from ctx.iter()


def eval_xpath(context: DomTree | DomNode, expr: XPathExpr | str) -> list[DomNode]:
    """Nodes selected by ``expr``, in document order, without duplicates.

    ``context`` is a tree (relative paths then start at the document) or a
    node (relative paths start at that node; absolute ones at its document).
    """
    expr = as_expr(expr)
    if isinstance(context, DomTree):
        tree, start = context, _DOC
    else:
        tree, start = context.tree, context
    found: dict[int, DomNode] = {}
    for path in expr.paths:
        current = [_DOC if path.absolute else start]
        for step in path.steps:
            seen: dict[int, DomNode] = {}
            for ctx in current:
                sources = _descendant_or_self(ctx, tree) if step.axis == DESCENDANT else (ctx,)
                for src in sources:
                    for node in _apply_child_step(src, step, tree):
                        seen.setdefault(node.uid, node)
            current = list(seen.values())
            if not current:
                break
        for node in current:
            if node is not _DOC:
                found.setdefault(node.uid, node)
    return [found[k] for k in sorted(found)]


# -- generation --------------------------------------------------------------


def _position_step(node: DomNode) -> Step:
    name = TEXT_TEST if node.is_text else node.tag
    if node.parent is None:
        return Step(CHILD, name, 1)
    pos = 0
    for sib in node.parent.children:
        if (sib.is_text and node.is_text) or (not sib.is_text and sib.tag == node.tag):
            pos += 1
        if sib is node:
            break
    return Step(CHILD, name, pos)


def _steps_between(node: DomNode, ancestor: DomNode | None) -> list[Step]:
    steps = []
    while node is not ancestor:
        steps.append(_position_step(node))
        node = node.parent
    steps.reverse()
    return steps


def absolute_xpath(node: DomNode) -> XPathExpr:
    """Fully positional path from the document root, e.g. ``/html[1]/body[1]/p[2]``."""
    return XPathExpr((Path(True, tuple(_steps_between(node, None))),))


def relative_xpath(node: DomNode, scope: DomNode) -> XPathExpr:
    """Positional path from ``scope`` (exclusive) down to ``node``."""
    if node is scope or not node.is_descendant_of(scope):
        raise ValueError("node is not below scope")
    return XPathExpr((Path(False, tuple(_steps_between(node, scope))),))


def _unique_id_anchor(node: DomNode) -> DomNode | None:
    cur = node
    while cur is not None:
        ident = cur.attrs.get("id") if not cur.is_text else None
        if ident and can_quote(ident) and node.tree.id_count(ident) == 1:
            return cur
        cur = cur.parent
    return None


def anchored_path(node: DomNode) -> Path:
    """Id-anchored path (``//div[@id='main']/p[2]``) when an ancestor-or-self
    carries a document-unique id, otherwise the absolute path."""
    anchor = _unique_id_anchor(node)
    if anchor is None:
        return absolute_xpath(node).paths[0]
    head = Step(DESCENDANT, anchor.tag, None, ("id", anchor.attrs["id"]))
    return Path(True, (head, *_steps_between(node, anchor)))


def _check_same_tree(nodes: Sequence[DomNode]) -> DomTree:
    trees = {id(n.tree) for n in nodes}
    if len(trees) != 1 or nodes[0].tree is None:
        raise MixedTrees("nodes belong to different trees")
    return nodes[0].tree


def xpath_for_nodes(nodes: Sequence[DomNode]) -> XPathExpr:
    """An expression selecting exactly ``nodes`` (as a set, in document order).

    Preference order: parent path plus an unpositioned step when the nodes
    are all same-tag children of one parent; id-anchored paths; plain
    absolute paths.
    """
    if not nodes:
        raise ValueError("need at least one node")
    tree = _check_same_tree(nodes)
    ordered = sorted({n.uid: n for n in nodes}.values(), key=lambda n: n.uid)
    attempts = []
    parent = ordered[0].parent
    if (
        len(ordered) > 1
        and parent is not None
        and not ordered[0].is_text
        and all(n.parent is parent and n.tag == ordered[0].tag for n in ordered)
    ):
        base = anchored_path(parent)
        attempts.append(XPathExpr((Path(True, base.steps + (Step(CHILD, ordered[0].tag),)),)))
    attempts.append(XPathExpr(tuple(anchored_path(n) for n in ordered)))
    want = [n.uid for n in ordered]
    for expr in attempts:
        if [n.uid for n in eval_xpath(tree, expr)] == want:
            return expr
    return XPathExpr(tuple(absolute_xpath(n).paths[0] for n in ordered))
