"""Precision/recall evaluation of self-repairing wrappers on mutated pages.

Corpus layout (any directory triple works; the bundled one lives in
``treegram/data``)::

    corpus/<scenario>.html          the design-time page
    wrappers/<scenario>.json        wrapper with tree-grams captured on it
    specs/<scenario>/<variant>.json mutation specs, one per variant
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .adapt import run_with_adaptation
from .dom import DomTree, parse_html
from .errors import CorpusError
from .matching import Algorithm
from .mutate import MutationSpec, load_spec, mutate
from .wrapper import Wrapper, execute, load_wrapper

DATA_DIR = Path(__file__).parent / "data"

# bundled synthetic scenarios and the thresholds of their live-site archetypes
DEFAULT_THRESHOLDS = {
    "bookmarks": 0.40,
    "auctions": 0.85,
    "feed": 0.65,
    "news": 0.90,
    "results": 0.80,
    "comparison": 0.40,
    "blogroll": 0.85,
}
ALGORITHMS = (Algorithm.SIMPLE, Algorithm.CLUSTERED)


def precision(tp: int, fp: int) -> float:
    return tp / (tp + fp) if tp + fp else 0.0


def recall(tp: int, fn: int) -> float:
    return tp / (tp + fn) if tp + fn else 0.0


def f_measure(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r else 0.0


def score(expected, actual) -> tuple[int, int, int]:
    """(tp, fp, fn) of an actual node set against the expected one."""
    expected, actual = set(expected), set(actual)
    return len(actual & expected), len(actual - expected), len(expected - actual)


@dataclass
class Counts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __iadd__(self, other):
        self.tp += other[0] if isinstance(other, tuple) else other.tp
        self.fp += other[1] if isinstance(other, tuple) else other.fp
        self.fn += other[2] if isinstance(other, tuple) else other.fn
        return self

    @property
    def precision(self) -> float:
        return precision(self.tp, self.fp)

    @property
    def recall(self) -> float:
        return recall(self.tp, self.fn)

    @property
    def f_measure(self) -> float:
        return f_measure(self.precision, self.recall)

    def to_json(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": round(self.precision, 6),
            "recall": round(self.recall, 6),
            "f_measure": round(self.f_measure, 6),
        }


@dataclass
class ScenarioRow:
    scenario: str
    threshold: float
    counts: dict = field(default_factory=dict)  # algorithm value -> Counts

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario,
            "threshold": self.threshold,
            **{alg: c.to_json() for alg, c in self.counts.items()},
        }


@dataclass
class EvalReport:
    rows: list
    algorithms: tuple = tuple(a.value for a in ALGORITHMS)

    def total(self, algorithm: Algorithm | str) -> Counts:
        key = Algorithm(algorithm).value
        out = Counts()
        for row in self.rows:
            out += row.counts[key]
        return out

    def to_json(self) -> dict:
        return {
            "scenarios": [r.to_json() for r in self.rows],
            "total": {a: self.total(a).to_json() for a in self.algorithms},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    def to_text(self) -> str:
        """Plain-text table with one tp/fp/fn block per algorithm."""
        names = {Algorithm.SIMPLE.value: "Simple T. M.", Algorithm.CLUSTERED.value: "Clustered T. M."}
        head = f"{'Scenario':<14}{'thresh.':>8}"
        for a in self.algorithms:
            head += f" | {names.get(a, a):^20}"
        sub = f"{'':<22}" + "".join(f" | {'tp':>6}{'fp':>7}{'fn':>7}" for _ in self.algorithms)

        def cell(c):
            return f" | {c.tp:>6}{c.fp or '-':>7}{c.fn or '-':>7}"

        lines = [head, sub, "-" * len(sub)]
        for r in self.rows:
            lines.append(f"{r.scenario:<14}{r.threshold:>7.0%} " + "".join(cell(r.counts[a]) for a in self.algorithms))
        lines.append("-" * len(sub))
        totals = [self.total(a) for a in self.algorithms]
        lines.append(f"{'Total':<14}{'-':>8}" + "".join(cell(t) for t in totals))
        for label, attr in (("Recall", "recall"), ("Precision", "precision"), ("F-Measure", "f_measure")):
            lines.append(f"{label:<22}" + "".join(f" | {getattr(t, attr):^20.2%}" for t in totals))
        return "\n".join(lines) + "\n"


def override(w: Wrapper, algorithm: Algorithm, threshold: float) -> Wrapper:
    """Copy of ``w`` using only ``algorithm`` at ``threshold`` for every pattern."""
    w = w.copy()
    for p in w.patterns:
        p.adapt.algorithms = [Algorithm(algorithm)]
        p.adapt.threshold = threshold
    return w


def evaluate_variant(
    tree: DomTree,
    wrapper: Wrapper,
    spec: MutationSpec,
    algorithm: Algorithm,
    threshold: float,
) -> tuple[int, int, int]:
    """Mutate, adapt, and score one page variant.

    The expected set holds, per pattern, the nodes that descend from that
    pattern's extraction on the unmutated page.
    """
    targets = {p.name: [i.node.uid for i in execute(wrapper, tree).instances(p.name)] for p in wrapper.patterns}
    mutated, truth = mutate(tree, spec)
    w = override(wrapper, algorithm, threshold)
    result, _ = run_with_adaptation(w, mutated)
    expected = {(name, uid) for name, uids in targets.items() for uid in truth.expected(uids)}
    actual = {(p.name, i.node.uid) for p in w.patterns for i in result.instances(p.name)}
    return score(expected, actual)


@dataclass
class Scenario:
    name: str
    page: Path
    wrapper: Path
    specs: list


def discover(corpus: Path, wrappers: Path, specs: Path) -> list:
    corpus, wrappers, specs = Path(corpus), Path(wrappers), Path(specs)
    missing = [p for p in (corpus, wrappers, specs) if not p.is_dir()]
    if missing:
        raise CorpusError("missing directories", missing)
    pages = sorted(corpus.glob("*.html"))
    if not pages:
        raise CorpusError("no pages in corpus", [corpus / "*.html"])
    out, absent = [], []
    for page in pages:
        name = page.stem
        wpath = wrappers / f"{name}.json"
        spec_paths = sorted((specs / name).glob("*.json"))
        if not wpath.is_file():
            absent.append(wpath)
        if not spec_paths:
            absent.append(specs / name / "*.json")
        out.append(Scenario(name, page, wpath, spec_paths))
    if absent:
        raise CorpusError("missing corpus files", absent)
    return out


def run_eval(
    corpus: Path = DATA_DIR / "corpus",
    wrappers: Path = DATA_DIR / "wrappers",
    specs: Path = DATA_DIR / "specs",
    thresholds: dict | None = None,
    algorithms=ALGORITHMS,
    scenarios: list | None = None,
) -> EvalReport:
    """Evaluate every (scenario, variant, algorithm) combination.

    ``thresholds`` maps scenario name to threshold; unlisted scenarios
    use ``DEFAULT_THRESHOLDS`` and then the first root pattern's own
    threshold.
    """
    thresholds = {**DEFAULT_THRESHOLDS, **(thresholds or {})}
    algorithms = tuple(Algorithm(a) for a in algorithms)
    rows = []
    for sc in discover(corpus, wrappers, specs):
        if scenarios is not None and sc.name not in scenarios:
            continue
        tree = parse_html(sc.page.read_bytes())
        w = load_wrapper(sc.wrapper.read_bytes())
        th = thresholds.get(sc.name, w.children_of(None)[0].adapt.threshold)
        row = ScenarioRow(sc.name, th, {a.value: Counts() for a in algorithms})
        for spec_path in sc.specs:
            spec = load_spec(spec_path.read_bytes())
            for a in algorithms:
                row.counts[a.value] += evaluate_variant(tree, w, spec, a, th)
        rows.append(row)
    return EvalReport(rows, tuple(a.value for a in algorithms))
