"""Hierarchical wrappers: patterns, integrity constraints, execution, validation."""

from __future__ import annotations

import copy
import json
import re
from dataclasses import dataclass, field
from datetime import date
from functools import lru_cache

import jsonschema

from .dom import DomNode, DomTree, LabelMode
from .errors import InvalidWrapper, UnsupportedTrigger, UnsupportedXPath
from .matching import Algorithm, MatchConfig
from .snapshot import TreeGram
from .xpath import XPathExpr, absolute_xpath, eval_xpath, parse_xpath

FORMAT_VERSION = 1

TOP_DOWN = "top_down"
BOTTOM_UP = "bottom_up"
PROCESS_FLOW = "process_flow"  # reserved; needs live navigation
TRIGGERS = (TOP_DOWN, BOTTOM_UP, PROCESS_FLOW)

DATA_TYPES = ("integer", "decimal", "date", "nonempty_text", "regex")

_CONSTRAINT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "min_occurrences": {"type": ["integer", "null"], "minimum": 0},
        "max_occurrences": {"type": ["integer", "null"], "minimum": 0},
        "min_children": {"type": ["integer", "null"], "minimum": 0},
        "max_children": {"type": ["integer", "null"], "minimum": 0},
        "data_type": {"enum": [*DATA_TYPES, None]},
        "regex": {"type": ["string", "null"]},
        "thousands_separators": {"type": "boolean"},
    },
}

WRAPPER_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["format_version", "patterns"],
    "additionalProperties": False,
    "properties": {
        "format_version": {"const": FORMAT_VERSION},
        "name": {"type": "string"},
        "data_model": {"type": "object", "additionalProperties": _CONSTRAINT_SCHEMA},
        "patterns": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "selector"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "pattern": r"^[A-Za-z_][\w\-]*$"},
                    "parent": {"type": ["string", "null"]},
                    "selector": {"type": "string", "minLength": 1},
                    "tree_grams": {"type": "array", "items": {"type": "object"}},
                    "constraints": _CONSTRAINT_SCHEMA,
                    "adapt": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": {
                            "threshold": {"type": "number", "minimum": 0, "maximum": 1},
                            "algorithms": {
                                "type": "array",
                                "minItems": 1,
                                "items": {"enum": [a.value for a in Algorithm]},
                            },
                            "label_mode": {"type": "string"},
                            "triggers": {"type": "array", "items": {"enum": list(TRIGGERS)}},
                            "update_snapshots": {"type": "boolean"},
                            "attribute_check": {"type": "boolean"},
                        },
                    },
                },
            },
        },
    },
}


@dataclass
class IntegrityConstraint:
    """Occurrence and data-type checks for one pattern.

    Occurrences count instances per parent instance (per document for
    root patterns); children count instances of all direct child patterns
    under each instance of this pattern.
    """

    min_occurrences: int | None = None
    max_occurrences: int | None = None
    min_children: int | None = None
    max_children: int | None = None
    data_type: str | None = None
    regex: str | None = None
    thousands_separators: bool = False

    def __post_init__(self):
        for lo, hi in (("min_occurrences", "max_occurrences"), ("min_children", "max_children")):
            a, b = getattr(self, lo), getattr(self, hi)
            if a is not None and b is not None and a > b:
                raise InvalidWrapper(f"{lo} > {hi}", lo)
        if self.data_type == "regex":
            if not self.regex:
                raise InvalidWrapper("data_type regex needs a 'regex' value", "regex")
            try:
                re.compile(self.regex)
            except re.error as exc:
                raise InvalidWrapper(f"bad regex: {exc}", "regex") from exc

    def to_json(self) -> dict:
        d = {}
        for key in ("min_occurrences", "max_occurrences", "min_children", "max_children",
                    "data_type", "regex"):
            value = getattr(self, key)
            if value is not None:
                d[key] = value
        if self.thousands_separators:
            d["thousands_separators"] = True
        return d

    @classmethod
    def from_json(cls, d: dict) -> "IntegrityConstraint":
        return cls(**d)

    def merged_over(self, base: "IntegrityConstraint") -> "IntegrityConstraint":
        """Fields set here win; unset ones come from ``base``."""
        out = copy.copy(base)
        for key, value in self.to_json().items():
            setattr(out, key, value)
        return out


@dataclass
class AdaptationConfig:
    threshold: float = 0.8
    algorithms: list = field(default_factory=lambda: [Algorithm.CLUSTERED])
    label_mode: LabelMode = field(default_factory=LabelMode)
    triggers: list = field(default_factory=list)
    update_snapshots: bool = False
    attribute_check: bool = False

    def __post_init__(self):
        self.algorithms = [Algorithm(a) for a in self.algorithms]
        if not self.algorithms:
            raise InvalidWrapper("algorithm order must not be empty", "algorithms")
        if not 0.0 <= self.threshold <= 1.0:
            raise InvalidWrapper("threshold outside [0, 1]", "threshold")
        if PROCESS_FLOW in self.triggers:
            raise UnsupportedTrigger("process-flow adaptation is not supported", "triggers")

    def match_config(self, algorithm: Algorithm, max_candidates: int = 1000) -> MatchConfig:
        return MatchConfig(
            algorithm=algorithm,
            label_mode=self.label_mode,
            threshold=self.threshold,
            attribute_check=self.attribute_check,
            max_candidates=max_candidates,
        )

    def to_json(self) -> dict:
        return {
            "threshold": self.threshold,
            "algorithms": [a.value for a in self.algorithms],
            "label_mode": str(self.label_mode),
            "triggers": list(self.triggers),
            "update_snapshots": self.update_snapshots,
            "attribute_check": self.attribute_check,
        }

    @classmethod
    def from_json(cls, d: dict) -> "AdaptationConfig":
        d = dict(d)
        if "label_mode" in d:
            try:
                d["label_mode"] = LabelMode.parse(d["label_mode"])
            except ValueError as exc:
                raise InvalidWrapper(str(exc), "label_mode") from exc
        return cls(**d)


@dataclass
class Pattern:
    name: str
    selector: str
    parent: str | None = None
    tree_grams: list = field(default_factory=list)
    constraints: IntegrityConstraint = field(default_factory=IntegrityConstraint)
    adapt: AdaptationConfig = field(default_factory=AdaptationConfig)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "parent": self.parent,
            "selector": self.selector,
            "tree_grams": [g.to_json() for g in self.tree_grams],
            "constraints": self.constraints.to_json(),
            "adapt": self.adapt.to_json(),
        }


@dataclass
class Wrapper:
    patterns: list
    name: str = ""
    data_model: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        self._check()

    def _check(self):
        names = {}
        for i, p in enumerate(self.patterns):
            if p.name in names:
                raise InvalidWrapper(f"duplicate pattern name {p.name!r}", f"patterns/{i}/name")
            names[p.name] = i
        for i, p in enumerate(self.patterns):
            if p.parent is not None and p.parent not in names:
                raise InvalidWrapper(f"unknown parent {p.parent!r}", f"patterns/{i}/parent")
            try:
                _parse(p.selector)
            except UnsupportedXPath as exc:
                raise InvalidWrapper(str(exc), f"patterns/{i}/selector") from exc
        for i, p in enumerate(self.patterns):
            seen = {p.name}
            cur = p.parent
            while cur is not None:
                if cur in seen:
                    raise InvalidWrapper(f"parent cycle through {cur!r}", f"patterns/{i}/parent")
                seen.add(cur)
                cur = self.patterns[names[cur]].parent
        for key in self.data_model:
            if key not in names:
                raise InvalidWrapper(f"data model names unknown pattern {key!r}", f"data_model/{key}")

    def pattern(self, name: str) -> Pattern:
        for p in self.patterns:
            if p.name == name:
                return p
        raise KeyError(name)

    def children_of(self, name: str | None) -> list:
        return [p for p in self.patterns if p.parent == name]

    def order(self) -> list:
        """Patterns in top-down (pre-order) sequence, siblings in file order."""
        out = []

        def walk(parent):
            for p in self.children_of(parent):
                out.append(p)
                walk(p.name)

        walk(None)
        return out

    def descendants(self, name: str) -> list:
        out = []
        for child in self.children_of(name):
            out.append(child)
            out.extend(self.descendants(child.name))
        return out

    def constraints_for(self, p: Pattern) -> IntegrityConstraint:
        base = self.data_model.get(p.name)
        return p.constraints.merged_over(base) if base else p.constraints

    def copy(self) -> "Wrapper":
        return copy.deepcopy(self)

    def to_json(self) -> dict:
        d = {"format_version": self.format_version}
        if self.name:
            d["name"] = self.name
        if self.data_model:
            d["data_model"] = {k: v.to_json() for k, v in self.data_model.items()}
        d["patterns"] = [p.to_json() for p in self.patterns]
        return d


def load_wrapper(data: bytes | str | dict) -> Wrapper:
    """Parse and validate a wrapper document; errors carry the field path."""
    if isinstance(data, (bytes, str)):
        try:
            doc = json.loads(data)
        except ValueError as exc:
            raise InvalidWrapper(f"not JSON: {exc}") from exc
    else:
        doc = data
    try:
        jsonschema.validate(doc, WRAPPER_SCHEMA)
    except jsonschema.ValidationError as err:
        path = "/".join(str(p) for p in err.absolute_path)
        raise InvalidWrapper(err.message, path) from None
    patterns = []
    for i, pd in enumerate(doc["patterns"]):
        where = f"patterns/{i}"
        try:
            grams = [TreeGram.from_json(g) for g in pd.get("tree_grams", [])]
        except (KeyError, ValueError, TypeError) as exc:
            raise InvalidWrapper(f"bad tree-gram: {exc}", f"{where}/tree_grams") from exc
        try:
            constraints = IntegrityConstraint.from_json(pd.get("constraints", {}))
        except InvalidWrapper as exc:
            raise InvalidWrapper(exc.message, f"{where}/constraints/{exc.path}") from None
        try:
            adapt = AdaptationConfig.from_json(pd.get("adapt", {}))
        except InvalidWrapper as exc:
            raise type(exc)(exc.message, f"{where}/adapt/{exc.path}") from None
        patterns.append(
            Pattern(pd["name"], pd["selector"], pd.get("parent"), grams, constraints, adapt)
        )
    model = {}
    for k, v in doc.get("data_model", {}).items():
        try:
            model[k] = IntegrityConstraint.from_json(v)
        except InvalidWrapper as exc:
            raise InvalidWrapper(exc.message, f"data_model/{k}/{exc.path}") from None
    return Wrapper(patterns, doc.get("name", ""), model, doc["format_version"])


def save_wrapper(w: Wrapper) -> bytes:
    return (json.dumps(w.to_json(), ensure_ascii=False, indent=2) + "\n").encode("utf-8")


# -- execution ---------------------------------------------------------------


@lru_cache(maxsize=4096)
def _parse(selector: str) -> XPathExpr:
    return parse_xpath(selector)


def select(selector: str, tree: DomTree, scope: DomNode | None = None) -> list:
    """Evaluate a pattern selector.

    Root patterns (``scope`` None) evaluate against the document. For child
    patterns, relative branches start at the parent instance and absolute
    branches are restricted to its descendants.
    """
    expr = _parse(selector)
    if scope is None:
        return eval_xpath(tree, expr)
    found = {}
    for path in expr.paths:
        sub = XPathExpr((path,))
        if path.absolute:
            hits = [n for n in eval_xpath(tree, sub) if n.is_descendant_of(scope)]
        else:
            hits = eval_xpath(scope, sub)
        for n in hits:
            found.setdefault(n.uid, n)
    return [found[k] for k in sorted(found)]


@dataclass
class Instance:
    pattern: str
    node: DomNode
    text: str
    children: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "xpath": str(absolute_xpath(self.node)),
            "text": self.text,
            "children": {k: [c.to_json() for c in v] for k, v in self.children.items()},
        }


@dataclass
class Provenance:
    selector: str
    adapted: bool = False


@dataclass
class ExtractionResult:
    roots: dict
    provenance: dict

    def instances(self, name: str) -> list:
        """Every instance of ``name``, depth-first in extraction order."""
        out = []

        def walk(insts):
            for inst in insts:
                if inst.pattern == name:
                    out.append(inst)
                for group in inst.children.values():
                    walk(group)

        for group in self.roots.values():
            walk(group)
        return out

    def groups(self, w: Wrapper, p: Pattern) -> list:
        """Instance lists of ``p``: one per parent instance (one for roots)."""
        if p.parent is None:
            return [self.roots.get(p.name, [])]
        return [inst.children.get(p.name, []) for inst in self.instances(p.parent)]

    def to_json(self) -> dict:
        return {
            "patterns": {
                k: {"selector": v.selector, "adapted": v.adapted} for k, v in self.provenance.items()
            },
            "records": {k: [i.to_json() for i in v] for k, v in self.roots.items()},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False, indent=2)


def execute(w: Wrapper, tree: DomTree, adapted: frozenset = frozenset()) -> ExtractionResult:
    """Run the wrapper top-down; instance nesting mirrors the pattern tree."""

    def build(p: Pattern, node: DomNode) -> Instance:
        inst = Instance(p.name, node, node.text_content())
        for child in w.children_of(p.name):
            inst.children[child.name] = [build(child, n) for n in select(child.selector, tree, node)]
        return inst

    roots = {p.name: [build(p, n) for n in select(p.selector, tree)] for p in w.children_of(None)}
    prov = {p.name: Provenance(p.selector, p.name in adapted) for p in w.order()}
    return ExtractionResult(roots, prov)


# -- validation --------------------------------------------------------------

OCCURRENCE = "occurrence"
CHILDREN = "children"
DATA_TYPE = "data_type"


@dataclass(frozen=True)
class Violation:
    pattern: str
    kind: str
    detail: str

    def to_json(self) -> dict:
        return {"pattern": self.pattern, "kind": self.kind, "detail": self.detail}


_INT = re.compile(r"[+-]?\d+")
_INT_SEP = re.compile(r"[+-]?\d{1,3}(,\d{3})*")
_DEC = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)")
_DEC_SEP = re.compile(r"[+-]?(\d{1,3}(,\d{3})*|\d+)(\.\d*)?")


def check_data_type(text: str, c: IntegrityConstraint) -> bool:
    value = text.strip()
    kind = c.data_type
    if kind is None:
        return True
    if kind == "nonempty_text":
        return bool(value)
    if kind == "integer":
        return bool(_INT.fullmatch(value) or (c.thousands_separators and _INT_SEP.fullmatch(value)))
    if kind == "decimal":
        return bool(_DEC.fullmatch(value) or (c.thousands_separators and _DEC_SEP.fullmatch(value)))
    if kind == "date":
        try:
            date.fromisoformat(value)
        except ValueError:
            return False
        return True
    if kind == "regex":
        return re.fullmatch(c.regex, value) is not None
    raise ValueError(kind)


def _bounds(count: int, lo, hi) -> bool:
    return (lo is None or count >= lo) and (hi is None or count <= hi)


def validate(result: ExtractionResult, w: Wrapper) -> list:
    """Constraint violations, at most one per (pattern, kind), in pattern order."""
    out = []
    for p in w.order():
        c = w.constraints_for(p)
        groups = result.groups(w, p)
        bad = [len(g) for g in groups if not _bounds(len(g), c.min_occurrences, c.max_occurrences)]
        if bad:
            out.append(Violation(p.name, OCCURRENCE,
                                 f"{len(bad)} of {len(groups)} scopes out of bounds, e.g. {bad[0]}"))
        kids = [ch.name for ch in w.children_of(p.name)]
        instances = [i for g in groups for i in g]
        if c.min_children is not None or c.max_children is not None:
            counts = [sum(len(i.children.get(k, [])) for k in kids) for i in instances]
            bad = [n for n in counts if not _bounds(n, c.min_children, c.max_children)]
            if bad:
                out.append(Violation(p.name, CHILDREN,
                                     f"{len(bad)} of {len(counts)} instances out of bounds, e.g. {bad[0]}"))
        if c.data_type is not None:
            wrong = [i.text for i in instances if not check_data_type(i.text, c)]
            if wrong:
                out.append(Violation(p.name, DATA_TYPE,
                                     f"{len(wrong)} values are not {c.data_type}, e.g. {wrong[0]!r}"))
    return out
