"""Tree-gram snapshots: a stored copy of the sub-tree a pattern targeted."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .dom import TEXT, DomNode, DomTree, LabelMode, make_label
from .errors import CorruptSnapshot, SelectorMiss
from .xpath import XPathExpr, eval_xpath


@dataclass(frozen=True)
class ComparableAttributes:
    """Attributes that count as matching evidence.

    ``generic`` applies to every element, ``type_specific`` only to the
    listed tags.
    """

    generic: frozenset = frozenset({"id", "class", "name"})
    type_specific: tuple = (
        ("a", frozenset({"href"})),
        ("img", frozenset({"src", "alt"})),
        ("input", frozenset({"type"})),
        ("form", frozenset({"action"})),
        ("iframe", frozenset({"src"})),
    )

    def __post_init__(self):
        names = list(self.generic) + [n for _, s in self.type_specific for n in s]
        if any(n != n.lower() for n in names):
            raise ValueError("comparable attribute names must be lowercase")

    def names_for(self, tag: str) -> frozenset:
        for t, names in self.type_specific:
            if t == tag:
                return self.generic | names
        return self.generic

    def select(self, tag: str, attrs: dict) -> dict:
        keep = self.names_for(tag)
        return {k: v for k, v in attrs.items() if k in keep}


DEFAULT_COMPARABLE = ComparableAttributes()


@dataclass(frozen=True)
class GramNode:
    label: str
    tag: str
    attrs: tuple = ()  # sorted (name, value) pairs
    children: tuple = ()
    text: str | None = None

    @property
    def is_text(self) -> bool:
        return self.tag == TEXT

    @property
    def attr_map(self) -> dict:
        return dict(self.attrs)

    def iter(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def size(self) -> int:
        return sum(1 for _ in self.iter())

    def text_content(self) -> str:
        parts = []
        for node in self.iter():
            if node.is_text and node.text:
                parts.extend(node.text.split())
        return " ".join(parts)

    def to_json(self) -> dict:
        d = {"label": self.label, "tag": self.tag, "attrs": dict(self.attrs)}
        if self.text is not None:
            d["text"] = self.text
        d["children"] = [c.to_json() for c in self.children]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "GramNode":
        return cls(
            label=d["label"],
            tag=d["tag"],
            attrs=tuple(sorted(d.get("attrs", {}).items())),
            children=tuple(cls.from_json(c) for c in d.get("children", [])),
            text=d.get("text"),
        )


@dataclass(frozen=True)
class TreeGram:
    root: GramNode
    label_mode: LabelMode = field(default_factory=LabelMode)
    captured_at: str = ""
    source_selector: str = ""

    def to_json(self) -> dict:
        return {
            "label_mode": str(self.label_mode),
            "captured_at": self.captured_at,
            "source_selector": self.source_selector,
            "root": self.root.to_json(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "TreeGram":
        return cls(
            root=GramNode.from_json(d["root"]),
            label_mode=LabelMode.parse(d["label_mode"]),
            captured_at=d.get("captured_at", ""),
            source_selector=d.get("source_selector", ""),
        )

    @property
    def is_leaf_text(self) -> bool:
        """Root is a text node, or an element whose only child is text."""
        r = self.root
        return r.is_text or (len(r.children) == 1 and r.children[0].is_text)


def gram_from_node(
    node: DomNode,
    mode: LabelMode,
    comparable: ComparableAttributes = DEFAULT_COMPARABLE,
) -> GramNode:
    if node.is_text:
        return GramNode(TEXT, TEXT, (), (), node.text)
    kept = comparable.select(node.tag, node.attrs)
    return GramNode(
        label=make_label(node.tag, node.attrs, mode),
        tag=node.tag,
        attrs=tuple(sorted(kept.items())),
        children=tuple(gram_from_node(c, mode, comparable) for c in node.children),
    )


def capture(
    node: DomNode,
    mode: LabelMode = LabelMode(),
    source_selector: str = "",
    comparable: ComparableAttributes = DEFAULT_COMPARABLE,
    captured_at: str | None = None,
) -> TreeGram:
    if captured_at is None:
        captured_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return TreeGram(gram_from_node(node, mode, comparable), mode, captured_at, source_selector)


def extract_tree_gram(
    tree: DomTree | DomNode,
    selector: XPathExpr | str,
    mode: LabelMode = LabelMode(),
    comparable: ComparableAttributes = DEFAULT_COMPARABLE,
    captured_at: str | None = None,
) -> TreeGram:
    """Snapshot the first node ``selector`` matches."""
    nodes = eval_xpath(tree, selector)
    if not nodes:
        raise SelectorMiss(f"{selector} matched no node")
    return capture(nodes[0], mode, str(selector), comparable, captured_at)


def serialize_tree_gram(g: TreeGram) -> bytes:
    return json.dumps(g.to_json(), ensure_ascii=False, indent=1).encode("utf-8")


def deserialize_tree_gram(data: bytes) -> TreeGram:
    try:
        return TreeGram.from_json(json.loads(data.decode("utf-8")))
    except (UnicodeDecodeError, ValueError, KeyError, TypeError, AttributeError) as exc:
        raise CorruptSnapshot(f"cannot decode tree-gram: {exc}") from exc
