"""Runtime adaptation: when a pattern's constraints break, find its target
again by matching the stored tree-grams against the current page and
regenerate its selector.

Triggers cascade adaptation: ``top_down`` forces descendant patterns to be
re-located after a pattern's node set changed; ``bottom_up`` adapts the
parent when a pattern fails, then retries the pattern once. Every pattern
is adapted at most twice per run.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from .dom import DomNode, DomTree
from .errors import NoSnapshot
from .matching import Algorithm, rank_subtrees
from .snapshot import capture
from .wrapper import (
    BOTTOM_UP,
    TOP_DOWN,
    AdaptationConfig,
    ExtractionResult,
    IntegrityConstraint,
    Pattern,
    Violation,
    Wrapper,
    execute,
    select,
    validate,
)
from .xpath import CHILD, Path, Step, XPathExpr, can_quote, relative_xpath, xpath_for_nodes

log = logging.getLogger(__name__)

MAX_ATTEMPTS = 2
MAX_GRAMS = 5


class Status(str, Enum):
    NOT_NEEDED = "not_needed"
    ADAPTED = "adapted"
    FAILED = "failed"


@dataclass
class AdaptationOutcome:
    pattern: str
    status: Status
    new_selector: str | None = None
    best_score: float | None = None
    algorithm_used: Algorithm | None = None
    candidates_considered: int = 0
    snapshot_updated: bool = False
    detail: str = ""
    nodes: list = field(default_factory=list, repr=False, compare=False)

    def to_json(self) -> dict:
        return {
            "event": "outcome",
            "pattern": self.pattern,
            "status": self.status.value,
            "new_selector": self.new_selector,
            "best_score": self.best_score,
            "algorithm_used": self.algorithm_used.value if self.algorithm_used else None,
            "candidates_considered": self.candidates_considered,
            "snapshot_updated": self.snapshot_updated,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class TriggerEvent:
    kind: str
    source: str
    target: str

    def to_json(self) -> dict:
        return {"event": "trigger", "kind": self.kind, "source": self.source, "target": self.target}


@dataclass(frozen=True)
class ViolationEvent:
    violation: Violation

    def to_json(self) -> dict:
        return {"event": "violation", **self.violation.to_json()}


@dataclass
class AdaptationLog:
    entries: list = field(default_factory=list)
    wrapper: Wrapper | None = None  # the working copy with adapted selectors

    def append(self, entry):
        self.entries.append(entry)

    @property
    def outcomes(self) -> list:
        return [e for e in self.entries if isinstance(e, AdaptationOutcome)]

    def final_outcomes(self) -> dict:
        """Last outcome per pattern."""
        return {o.pattern: o for o in self.outcomes}

    @property
    def failed(self) -> bool:
        return any(o.status == Status.FAILED for o in self.final_outcomes().values())

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e.to_json(), ensure_ascii=False) + "\n" for e in self.entries)


# -- selector synthesis ------------------------------------------------------


_STRATEGIES = ("position", "id", "class", "bare")


def _variant(node: DomNode, scope: DomNode, strategy: str) -> Path:
    """Relative path to ``node`` whose last step is keyed by ``strategy``
    (falling back to the position when the node lacks that attribute)."""
    steps = relative_xpath(node, scope).paths[0].steps
    if not node.is_text:
        last = steps[-1]
        value = node.attrs.get(strategy)
        if strategy in ("id", "class") and value and can_quote(value):
            steps = steps[:-1] + (Step(CHILD, last.name, None, (strategy, value)),)
        elif strategy == "bare":
            steps = steps[:-1] + (Step(CHILD, last.name),)
    return Path(False, steps)


def scoped_selector(tree: DomTree, groups: list) -> XPathExpr:
    """Selector for a child pattern given ``(scope, nodes)`` per parent instance.

    Tries relative selectors shared by all scopes first so the result keeps
    working across records; falls back to an exact absolute selector that
    the executor restricts to each scope.
    """
    everything = [n for _, nodes in groups for n in nodes]
    want = [[n.uid for n in nodes] for _, nodes in groups]
    for strategy in _STRATEGIES:
        paths = {}
        for scope, nodes in groups:
            for n in nodes:
                path = _variant(n, scope, strategy)
                paths.setdefault(str(path), path)
        source = str(XPathExpr(tuple(paths.values())))
        if all([n.uid for n in select(source, tree, scope)] == w for (scope, _), w in zip(groups, want)):
            return XPathExpr(tuple(paths.values()))
    return xpath_for_nodes(everything)


# -- locating ----------------------------------------------------------------


def _cap(c: IntegrityConstraint) -> int:
    return c.max_occurrences if c.max_occurrences is not None else 1_000_000


def _locate(p: Pattern, tree: DomTree, scopes: list, cfg: AdaptationConfig, c: IntegrityConstraint):
    """First algorithm (in configured order) accepting at least one node.

    Returns (algorithm, accepted candidates per scope, considered count)
    or (None, [], considered count).
    """
    considered = 0
    for algorithm in cfg.algorithms:
        mcfg = cfg.match_config(algorithm)
        per_scope = []
        for scope in scopes:
            ranked = rank_subtrees(p.tree_grams, tree, mcfg, scope)
            considered += len(ranked)
            accepted = [m for m in ranked if m.score >= mcfg.threshold]
            per_scope.append(accepted[: min(_cap(c), mcfg.max_candidates)])
        if any(per_scope):
            return algorithm, per_scope, considered
    return None, [], considered


def _update_snapshots(p: Pattern, nodes: list, cfg: AdaptationConfig, selector: str) -> bool:
    gram = capture(nodes[0], cfg.label_mode, selector)
    if any(g.root == gram.root for g in p.tree_grams):
        return False
    p.tree_grams.append(gram)
    if len(p.tree_grams) > MAX_GRAMS:
        # the design-time example stays; the oldest adapted one goes
        del p.tree_grams[1]
    return True


def _adapt_in_scopes(
    p: Pattern,
    tree: DomTree,
    scopes: list,
    cfg: AdaptationConfig,
    c: IntegrityConstraint,
) -> AdaptationOutcome:
    if not p.tree_grams:
        raise NoSnapshot(f"pattern {p.name!r} has no stored tree-gram")
    algorithm, per_scope, considered = _locate(p, tree, scopes, cfg, c)
    if algorithm is None:
        detail = "no candidate reached the threshold"
        if not scopes:
            detail = "no parent instances to search in"
        elif scopes != [None]:
            _, wide, more = _locate(p, tree, [None], cfg, c)
            considered += more
            if any(wide):
                detail = "matches exist only outside the parent instances"
        return AdaptationOutcome(p.name, Status.FAILED, candidates_considered=considered, detail=detail)
    nodes = [m.node for group in per_scope for m in group]
    best = max(m.score for group in per_scope for m in group)
    if scopes == [None]:
        expr = xpath_for_nodes(nodes)
    else:
        groups = [(s, [m.node for m in g]) for s, g in zip(scopes, per_scope)]
        expr = scoped_selector(tree, groups)
    return AdaptationOutcome(
        p.name,
        Status.ADAPTED,
        new_selector=str(expr),
        best_score=best,
        algorithm_used=algorithm,
        candidates_considered=considered,
        nodes=nodes,
    )


def adapt_pattern(
    p: Pattern,
    scope: DomTree | DomNode,
    cfg: AdaptationConfig | None = None,
    constraints: IntegrityConstraint | None = None,
) -> AdaptationOutcome:
    """Re-locate ``p`` inside ``scope`` (a document or a parent instance).

    With ``cfg.update_snapshots`` the pattern's selector and tree-grams are
    updated in place from the adapted nodes.
    """
    cfg = cfg or p.adapt
    c = constraints or p.constraints
    if isinstance(scope, DomTree):
        tree, scopes = scope, [None]
    else:
        tree, scopes = scope.tree, [scope]
    outcome = _adapt_in_scopes(p, tree, scopes, cfg, c)
    if outcome.status == Status.ADAPTED and cfg.update_snapshots:
        p.selector = outcome.new_selector
        outcome.snapshot_updated = _update_snapshots(p, outcome.nodes, cfg, outcome.new_selector)
    return outcome


# -- the runtime loop --------------------------------------------------------


class _Run:
    def __init__(self, wrapper: Wrapper, tree: DomTree):
        self.w = wrapper.copy()
        self.tree = tree
        self.log = AdaptationLog(wrapper=self.w)
        self.attempts: Counter = Counter()
        self.adapted: set = set()
        self.forced: set = set()
        self.logged_violations: set = set()
        self.refresh()

    def refresh(self):
        self.result = execute(self.w, self.tree, frozenset(self.adapted))
        self.violations = validate(self.result, self.w)

    def node_set(self, name: str) -> list:
        return [i.node.uid for i in self.result.instances(name)]

    def scopes_for(self, p: Pattern) -> list:
        if p.parent is None:
            return [None]
        return [i.node for i in self.result.instances(p.parent)]

    def note_violations(self, name: str):
        for v in self.violations:
            if v.pattern == name and v not in self.logged_violations:
                self.logged_violations.add(v)
                self.log.append(ViolationEvent(v))

    def adapt(self, p: Pattern, bubble: bool = True):
        self.attempts[p.name] += 1
        self.forced.discard(p.name)
        self.note_violations(p.name)
        before = self.node_set(p.name)
        outcome = _adapt_in_scopes(
            p, self.tree, self.scopes_for(p), p.adapt, self.w.constraints_for(p)
        )
        if outcome.status == Status.ADAPTED:
            p.selector = outcome.new_selector
            if p.adapt.update_snapshots:
                outcome.snapshot_updated = _update_snapshots(
                    p, outcome.nodes, p.adapt, outcome.new_selector
                )
            self.adapted.add(p.name)
        self.log.append(outcome)
        log.debug("pattern %s: %s (%s)", p.name, outcome.status.value, outcome.new_selector)
        if outcome.status == Status.ADAPTED:
            self.refresh()
            if TOP_DOWN in p.adapt.triggers and self.node_set(p.name) != before:
                for d in self.w.descendants(p.name):
                    if self.attempts[d.name] < MAX_ATTEMPTS:
                        self.forced.add(d.name)
                        self.log.append(TriggerEvent(TOP_DOWN, p.name, d.name))
            return
        if (
            bubble
            and BOTTOM_UP in p.adapt.triggers
            and p.parent is not None
            and self.attempts[p.parent] < MAX_ATTEMPTS
        ):
            self.log.append(TriggerEvent(BOTTOM_UP, p.name, p.parent))
            self.adapt(self.w.pattern(p.parent))
            if self.attempts[p.name] < MAX_ATTEMPTS:
                self.adapt(p, bubble=False)

    def run(self) -> tuple:
        if self.violations:
            for p in self.w.order():
                violated = {v.pattern for v in self.violations}
                if p.name not in violated and p.name not in self.forced:
                    continue
                if self.attempts[p.name] >= MAX_ATTEMPTS:
                    continue
                self.adapt(p)
            self.refresh()
        done = {o.pattern for o in self.log.outcomes}
        for p in self.w.order():
            if p.name not in done:
                self.log.append(AdaptationOutcome(p.name, Status.NOT_NEEDED))
        return self.result, self.log


def run_with_adaptation(w: Wrapper, tree: DomTree) -> tuple[ExtractionResult, AdaptationLog]:
    """Execute, validate, adapt violated patterns, and re-execute.

    ``w`` itself is left untouched; the adapted working copy is available
    as ``log.wrapper``.
    """
    return _Run(w, tree).run()


def remaining_violations(result: ExtractionResult, log: AdaptationLog) -> list:
    return validate(result, log.wrapper)
