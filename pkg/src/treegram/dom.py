"""HTML documents as rooted, ordered, labeled trees.

The parser is intentionally small: it sits on top of the stdlib tokenizer
(:class:`html.parser.HTMLParser`) and adds just enough tree-construction
recovery for real-world pages (void elements, implied ``</p>``, ``</li>``,
table cell/row closing, unclosed tags closed at the parent boundary).
"""

from __future__ import annotations

import codecs
import html
import re
from dataclasses import dataclass
from html.parser import HTMLParser
from typing import Iterator

from .errors import EmptyDocument

TEXT = "#text"

VOID_ELEMENTS = frozenset(
    "area base br col embed hr img input keygen link meta param source track wbr".split()
)
# Content of these elements is dropped; the element itself is kept.
OPAQUE_TEXT = frozenset({"script", "style"})

_P_CLOSERS = frozenset(
    """address article aside blockquote center details dialog dir div dl dd dt
    fieldset figcaption figure footer form h1 h2 h3 h4 h5 h6 header hgroup hr
    li listing main menu nav ol p pre section summary table ul""".split()
)
_SCOPE_BOUNDARY = frozenset(
    "applet button caption html marquee object table td th template".split()
)
# start tag -> (open elements it implicitly closes, elements that stop the search)
_IMPLIED_END = {
    "li": ({"li"}, {"ul", "ol", "menu"} | _SCOPE_BOUNDARY),
    "dt": ({"dt", "dd"}, {"dl"} | _SCOPE_BOUNDARY),
    "dd": ({"dt", "dd"}, {"dl"} | _SCOPE_BOUNDARY),
    "tr": ({"tr", "td", "th"}, {"table", "tbody", "thead", "tfoot"}),
    "td": ({"td", "th"}, {"tr", "table"}),
    "th": ({"td", "th"}, {"tr", "table"}),
    "tbody": ({"tbody", "thead", "tfoot", "tr", "td", "th"}, {"table"}),
    "thead": ({"tbody", "thead", "tfoot", "tr", "td", "th"}, {"table"}),
    "tfoot": ({"tbody", "thead", "tfoot", "tr", "td", "th"}, {"table"}),
    "option": ({"option"}, {"select", "datalist", "optgroup"}),
    "optgroup": ({"option", "optgroup"}, {"select"}),
}


class DomNode:
    """One element or text node.

    Nodes are treated as immutable once they belong to a :class:`DomTree`;
    ``parent``, ``uid`` (pre-order index) and ``tree`` are filled in by the
    tree constructor.
    """

    __slots__ = ("tag", "attrs", "text", "children", "parent", "uid", "tree")

    def __init__(self, tag, attrs=None, text=None, children=None):
        self.tag = tag
        self.attrs = dict(attrs) if attrs else {}
        self.text = text
        self.children = list(children) if children else []
        self.parent = None
        self.uid = -1
        self.tree = None

    @property
    def is_text(self) -> bool:
        return self.tag == TEXT

    def get(self, name: str, default=None):
        return self.attrs.get(name, default)

    @property
    def classes(self) -> list[str]:
        return self.attrs.get("class", "").split()

    def iter(self) -> Iterator["DomNode"]:
        """Pre-order traversal including ``self``."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def element_children(self) -> list["DomNode"]:
        return [c for c in self.children if not c.is_text]

    def size(self) -> int:
        return sum(1 for _ in self.iter())

    def text_content(self) -> str:
        """Descendant text, whitespace-normalized and joined by single spaces."""
        parts = []
        for node in self.iter():
            if node.is_text and node.text:
                parts.extend(node.text.split())
        return " ".join(parts)

    def is_descendant_of(self, other: "DomNode") -> bool:
        node = self.parent
        while node is not None:
            if node is other:
                return True
            node = node.parent
        return False

    def copy(self) -> "DomNode":
        """Detached deep copy (no parent, uid or tree)."""
        return DomNode(self.tag, self.attrs, self.text, [c.copy() for c in self.children])

    def __repr__(self):
        if self.is_text:
            return f"<text {self.text!r}>"
        return f"<{self.tag} uid={self.uid} children={len(self.children)}>"


class DomTree:
    """A parsed document. Owns its nodes and indexes them in document order."""

    def __init__(self, root: DomNode):
        self.root = root
        self.nodes: list[DomNode] = []
        self._ids: dict[str, int] | None = None
        self._cache: dict = {}
        root.parent = None
        for node in root.iter():
            node.uid = len(self.nodes)
            node.tree = self
            self.nodes.append(node)
            for child in node.children:
                child.parent = node

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)

    def node(self, uid: int) -> DomNode:
        return self.nodes[uid]

    def id_count(self, value: str) -> int:
        """Number of elements carrying ``id=value``."""
        if self._ids is None:
            ids: dict[str, int] = {}
            for node in self.nodes:
                v = node.attrs.get("id")
                if v:
                    ids[v] = ids.get(v, 0) + 1
            self._ids = ids
        return self._ids.get(value, 0)


def element(tag: str, *children: DomNode | str, **attrs: str) -> DomNode:
    """Build an element node; string children become text nodes.

    ``class_`` is accepted for the ``class`` attribute.
    """
    if "class_" in attrs:
        attrs["class"] = attrs.pop("class_")
    kids = [text_node(c) if isinstance(c, str) else c for c in children]
    return DomNode(tag.lower(), attrs, None, kids)


def text_node(value: str) -> DomNode:
    return DomNode(TEXT, None, value, None)


def structure(node: DomNode):
    """Comparable nested tuple of (tag, attrs, text, children)."""
    return (
        node.tag,
        tuple(node.attrs.items()),
        node.text,
        tuple(structure(c) for c in node.children),
    )


# -- labels ------------------------------------------------------------------


@dataclass(frozen=True)
class LabelMode:
    """Which node properties make up a node's label. The tag is always used."""

    use_tag: bool = True
    use_id: bool = False
    use_class: bool = False

    def __post_init__(self):
        if not self.use_tag:
            raise ValueError("label mode must include the tag")

    def __str__(self):
        parts = ["tag"]
        if self.use_id:
            parts.append("id")
        if self.use_class:
            parts.append("class")
        return "+".join(parts)

    @classmethod
    def parse(cls, value: str) -> "LabelMode":
        parts = set(value.split("+"))
        unknown = parts - {"tag", "id", "class"}
        if unknown or "tag" not in parts:
            raise ValueError(f"invalid label mode {value!r}")
        return cls(True, "id" in parts, "class" in parts)


def make_label(tag: str, attrs: dict, mode: LabelMode) -> str:
    """Label for a node given its tag and attributes.

    Format: ``tag``, then ``#id`` if enabled and present, then ``.cls`` for
    every class token in sorted order if enabled.
    """
    if tag == TEXT:
        return TEXT
    label = tag
    if mode.use_id:
        ident = attrs.get("id", "").strip()
        if ident:
            label += "#" + ident
    if mode.use_class:
        for token in sorted(set(attrs.get("class", "").split())):
            label += "." + token
    return label


def label_of(node: DomNode, mode: LabelMode = LabelMode()) -> str:
    return make_label(node.tag, node.attrs, mode)


# -- parsing -----------------------------------------------------------------

_META_CHARSET = re.compile(rb"""<meta[^>]+charset\s*=\s*["']?\s*([-\w.:]+)""", re.I)
_BOMS = (
    (codecs.BOM_UTF8, "utf-8"),
    (codecs.BOM_UTF16_LE, "utf-16-le"),
    (codecs.BOM_UTF16_BE, "utf-16-be"),
)


def detect_encoding(data: bytes) -> str:
    for bom, name in _BOMS:
        if data.startswith(bom):
            return name
    m = _META_CHARSET.search(data[:2048])
    if m:
        name = m.group(1).decode("ascii", "ignore")
        try:
            return codecs.lookup(name).name
        except LookupError:
            pass
    return "utf-8"


HEAD_CONTENT = frozenset({"title", "meta", "link", "script", "style", "base"})


class _TreeBuilder(HTMLParser):
    """Stack-based tree construction with the common HTML5 recovery rules:
    implied ``head``/``body``, implied end tags, and stray end tags ignored."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = DomNode("html")
        self.stack = [self.root]
        self.head = None
        self.body = None
        self.pending_text: list[str] = []

    def _at_top(self) -> bool:
        return self.stack[-1] is self.root or self.stack[-1] is self.head

    def _ensure_head(self):
        if self.head is None:
            self.head = DomNode("head")
            self.root.children.append(self.head)
        if self.stack[-1] is self.root:
            self.stack.append(self.head)

    def _ensure_body(self, attrs=None):
        del self.stack[1:]
        self.body = DomNode("body", attrs)
        self.root.children.append(self.body)
        self.stack.append(self.body)

    # text is buffered so adjacent chunks form one node
    def _flush(self):
        if not self.pending_text:
            return
        data = "".join(self.pending_text)
        self.pending_text = []
        if not data.strip() or self.stack[-1].tag in OPAQUE_TEXT:
            return
        if self.body is None and self._at_top():
            self._ensure_body()
        self.stack[-1].children.append(text_node(data))

    def _close_through(self, index: int):
        del self.stack[index:]

    def _find_open(self, targets, boundary) -> int:
        """Outermost open element in ``targets`` above the nearest boundary."""
        found = -1
        for i in range(len(self.stack) - 1, 0, -1):
            tag = self.stack[i].tag
            if tag in targets:
                found = i
            elif tag in boundary:
                break
        return found

    def handle_starttag(self, tag, attrs):
        self._flush()
        tag = tag.lower()
        attr_map: dict[str, str] = {}
        for name, value in attrs:
            attr_map.setdefault(name.lower(), value if value is not None else "")
        if tag == "html":
            for k, v in attr_map.items():
                self.root.attrs.setdefault(k, v)
            return
        if tag == "body":
            if self.body is None:
                self._ensure_body(attr_map)
            else:
                for k, v in attr_map.items():
                    self.body.attrs.setdefault(k, v)
            return
        if tag == "head":
            if self.head is None and self.body is None:
                self._ensure_head()
            return
        if self.body is None and self._at_top():
            if tag in HEAD_CONTENT:
                self._ensure_head()
            else:
                self._ensure_body()
        if tag in _P_CLOSERS:
            i = self._find_open({"p"}, _SCOPE_BOUNDARY)
            if i > 0:
                self._close_through(i)
        if tag in _IMPLIED_END:
            targets, boundary = _IMPLIED_END[tag]
            i = self._find_open(targets, boundary)
            if i > 0:
                self._close_through(i)
        node = DomNode(tag, attr_map)
        self.stack[-1].children.append(node)
        if tag not in VOID_ELEMENTS:
            self.stack.append(node)

    def handle_startendtag(self, tag, attrs):
        self.handle_starttag(tag, attrs)

    def handle_endtag(self, tag):
        self._flush()
        tag = tag.lower()
        if tag in ("html", "body") or tag in VOID_ELEMENTS:
            return
        if tag == "head":
            if self.stack[-1] is self.head:
                self.stack.pop()
            return
        for i in range(len(self.stack) - 1, 0, -1):
            if self.stack[i].tag == tag:
                self._close_through(i)
                return

    def handle_data(self, data):
        self.pending_text.append(data)

    def close(self):
        super().close()
        self._flush()


def parse_html(data: bytes | str) -> DomTree:
    """Parse a document into a :class:`DomTree` rooted at ``html``.

    Comments, doctype and processing instructions are dropped, as are
    whitespace-only text nodes and the text inside ``script``/``style``.
    """
    if isinstance(data, str):
        text = data
    else:
        if not data:
            raise EmptyDocument("empty document")
        text = data.decode(detect_encoding(data), errors="replace")
    if not text.strip():
        raise EmptyDocument("empty document")
    builder = _TreeBuilder()
    builder.feed(text)
    builder.close()
    return DomTree(builder.root)


# -- serialization -----------------------------------------------------------


def to_html(node: DomNode | DomTree) -> str:
    """Serialize back to markup. ``parse_html(to_html(t))`` preserves structure."""
    if isinstance(node, DomTree):
        node = node.root
    out: list[str] = []
    _write(node, out)
    return "".join(out)


def _write(node: DomNode, out: list[str]):
    if node.is_text:
        out.append(html.escape(node.text or "", quote=False))
        return
    out.append("<" + node.tag)
    for k, v in node.attrs.items():
        out.append(f' {k}="{html.escape(v, quote=True)}"')
    out.append(">")
    if node.tag in VOID_ELEMENTS:
        return
    for child in node.children:
        _write(child, out)
    out.append(f"</{node.tag}>")
