"""Deterministic, seeded page mutations with node-identity bookkeeping.

Each mutated page comes with a :class:`GroundTruth` that says which node
of the new tree descends from which node of the original, so extraction
results can be scored objectively.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from enum import Enum

from .dom import DomNode, DomTree


class MutationKind(str, Enum):
    RENAME_CLASS = "RenameClass"
    RENAME_ID = "RenameId"
    INSERT_WRAPPER = "InsertWrapperElement"
    DELETE_NODE = "DeleteNode"
    DUPLICATE_LIST_ITEM = "DuplicateListItem"
    REORDER_SIBLINGS = "ReorderSiblings"
    ADD_LEVEL = "AddLevel"
    REMOVE_LEVEL = "RemoveLevel"
    EDIT_TEXT = "EditText"


LIST_ITEM_TAGS = frozenset({"li", "tr", "article", "dt", "dd"})
_PROTECTED = frozenset({"html", "head", "body"})
_FILTER = re.compile(r"^([\w\-]+|\*)?((?:[#.][\w\-]+)*)$")
_WORDS = ("new", "sale", "extra", "more", "info", "top", "hot", "best", "live", "now")


@dataclass(frozen=True)
class MutationOp:
    kind: MutationKind
    count: int = 1
    target: str | None = None  # "tag", "tag.cls", "#id", ".cls" ...
    tag: str = "div"  # element introduced by InsertWrapperElement / AddLevel

    def __post_init__(self):
        object.__setattr__(self, "kind", MutationKind(self.kind))
        if self.count < 0:
            raise ValueError("count must be non-negative")
        if self.target is not None and not _FILTER.match(self.target):
            raise ValueError(f"bad target filter {self.target!r}")

    def to_json(self) -> dict:
        d = {"kind": self.kind.value, "count": self.count}
        if self.target is not None:
            d["target"] = self.target
        if self.tag != "div":
            d["tag"] = self.tag
        return d


@dataclass(frozen=True)
class MutationSpec:
    seed: int = 0
    ops: tuple = ()

    def to_json(self) -> dict:
        return {"seed": self.seed, "ops": [op.to_json() for op in self.ops]}

    @classmethod
    def from_json(cls, d: dict) -> "MutationSpec":
        return cls(int(d.get("seed", 0)), tuple(MutationOp(**op) for op in d.get("ops", [])))


def load_spec(data: bytes | str) -> MutationSpec:
    return MutationSpec.from_json(json.loads(data))


@dataclass
class GroundTruth:
    survivors: dict = field(default_factory=dict)  # original uid -> new uid
    clones: dict = field(default_factory=dict)  # new uid -> original uid it was copied from
    op_log: list = field(default_factory=list)

    def expected(self, original_uids) -> set:
        """New uids that carry any of ``original_uids`` forward, copies included."""
        wanted = set(original_uids)
        out = {self.survivors[u] for u in wanted if u in self.survivors}
        out.update(new for new, src in self.clones.items() if src in wanted)
        return out

    def to_json(self) -> dict:
        return {
            "survivors": {str(k): v for k, v in sorted(self.survivors.items())},
            "clones": {str(k): v for k, v in sorted(self.clones.items())},
            "op_log": self.op_log,
        }


def matches_filter(node: DomNode, target: str | None) -> bool:
    if target is None:
        return True
    if node.is_text:
        return False
    m = _FILTER.match(target)
    tag, rest = m.group(1), m.group(2)
    if tag not in (None, "*") and node.tag != tag:
        return False
    for kind, value in re.findall(r"([#.])([\w\-]+)", rest):
        if kind == "#" and node.attrs.get("id") != value:
            return False
        if kind == "." and value not in node.classes:
            return False
    return True


class _Mutator:
    def __init__(self, tree: DomTree, seed: int):
        self.rng = random.Random(seed)
        self.origin: dict[int, int] = {}  # keyed by id(); see self.alive
        self.cloned: set[int] = set()
        self.alive: list[DomNode] = []  # keeps ids in ``origin`` from being reused
        self.root = self._copy(tree.root)
        self.op_log: list[str] = []

    def _copy(self, node: DomNode) -> DomNode:
        new = DomNode(node.tag, node.attrs, node.text, [self._copy(c) for c in node.children])
        self.origin[id(new)] = node.uid
        self.alive.append(new)
        return new

    def _clone(self, node: DomNode) -> DomNode:
        new = DomNode(node.tag, node.attrs, node.text, [self._clone(c) for c in node.children])
        if id(node) in self.origin:
            self.origin[id(new)] = self.origin[id(node)]
            self.cloned.add(id(new))
        self.alive.append(new)
        return new

    def _walk(self) -> list:
        """(node, parent) pairs in document order."""
        out = []
        stack = [(self.root, None)]
        while stack:
            node, parent = stack.pop()
            out.append((node, parent))
            stack.extend((c, node) for c in reversed(node.children))
        return out

    def _token(self) -> str:
        return "%04x" % self.rng.randrange(16**4)

    def _eligible(self, op: MutationOp) -> list:
        k = op.kind
        out = []
        for node, parent in self._walk():
            if k == MutationKind.EDIT_TEXT:
                if node.is_text and (op.target is None or matches_filter(parent, op.target)):
                    out.append((node, parent))
                continue
            if node.is_text or not matches_filter(node, op.target):
                continue
            inner = parent is not None and node.tag not in _PROTECTED
            if k == MutationKind.RENAME_CLASS:
                ok = bool(node.classes)
            elif k == MutationKind.RENAME_ID:
                ok = bool(node.attrs.get("id"))
            elif k in (MutationKind.INSERT_WRAPPER, MutationKind.DELETE_NODE, MutationKind.REMOVE_LEVEL):
                ok = inner
            elif k == MutationKind.DUPLICATE_LIST_ITEM:
                ok = inner and (op.target is not None or node.tag in LIST_ITEM_TAGS)
            elif k == MutationKind.REORDER_SIBLINGS:
                ok = len(node.element_children()) >= 2
            elif k == MutationKind.ADD_LEVEL:
                ok = bool(node.children) and node.tag not in ("html",)
            else:
                ok = False
            if ok:
                out.append((node, parent))
        return out

    def apply(self, op: MutationOp):
        for _ in range(op.count):
            eligible = self._eligible(op)
            if not eligible:
                self.op_log.append(f"{op.kind.value}: no eligible node for {op.target!r}")
                return
            node, parent = self.rng.choice(eligible)
            self.op_log.append(f"{op.kind.value}: {self._describe(node)}")
            getattr(self, "_" + op.kind.name.lower())(node, parent, op)

    def _describe(self, node: DomNode) -> str:
        if node.is_text:
            return f"text {node.text[:20]!r}"
        return f"<{node.tag}> from uid {self.origin.get(id(node), 'new')}"

    def _rename_class(self, node, parent, op):
        tokens = node.classes
        i = self.rng.randrange(len(tokens))
        tokens[i] = f"{tokens[i]}-{self._token()}"
        node.attrs["class"] = " ".join(tokens)

    def _rename_id(self, node, parent, op):
        node.attrs["id"] = f"{node.attrs['id']}-{self._token()}"

    def _insert_wrapper(self, node, parent, op):
        i = parent.children.index(node)
        parent.children[i] = DomNode(op.tag, None, None, [node])

    def _delete_node(self, node, parent, op):
        parent.children.remove(node)

    def _duplicate_list_item(self, node, parent, op):
        i = parent.children.index(node)
        parent.children.insert(i + 1, self._clone(node))

    def _reorder_siblings(self, node, parent, op):
        before = list(node.children)
        self.rng.shuffle(node.children)
        if node.children == before:
            node.children.append(node.children.pop(0))

    def _add_level(self, node, parent, op):
        node.children = [DomNode(op.tag, None, None, node.children)]

    def _remove_level(self, node, parent, op):
        i = parent.children.index(node)
        parent.children[i : i + 1] = node.children

    def _edit_text(self, node, parent, op):
        text = node.text
        digits = [i for i, ch in enumerate(text) if ch.isdigit()]
        if digits:
            i = self.rng.choice(digits)
            new = str((int(text[i]) + 1 + self.rng.randrange(8)) % 10)
            node.text = text[:i] + new + text[i + 1 :]
        else:
            words = text.split()
            words[self.rng.randrange(len(words))] = self.rng.choice(_WORDS)
            node.text = " ".join(words)

    def finish(self) -> tuple[DomTree, GroundTruth]:
        tree = DomTree(self.root)
        truth = GroundTruth(op_log=self.op_log)
        for node in tree.nodes:
            src = self.origin.get(id(node))
            if src is None:
                continue
            if id(node) in self.cloned:
                truth.clones[node.uid] = src
            else:
                truth.survivors[src] = node.uid
        return tree, truth


def mutate(tree: DomTree, spec: MutationSpec, seed: int | None = None) -> tuple[DomTree, GroundTruth]:
    """Apply ``spec.ops`` in order; ``seed`` overrides ``spec.seed``.

    The input tree is not modified. Ops without an eligible node are
    skipped and noted in ``GroundTruth.op_log``.
    """
    m = _Mutator(tree, spec.seed if seed is None else seed)
    for op in spec.ops:
        m.apply(op)
    return m.finish()

