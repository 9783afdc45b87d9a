"""End-to-end acceptance checks; each prints one PASS/FAIL line in the summary."""

import random
import time
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE_LINES, brute_force_mapping, example_trees, random_tree
from treegram.adapt import Status, run_with_adaptation
from treegram.dom import parse_html
from treegram.evaluation import DATA_DIR, Counts, run_eval
from treegram.matching import (
    Algorithm,
    clustered_match_trace,
    clustered_tree_matching,
    simple_tree_matching,
)
from treegram.wrapper import execute, load_wrapper
from treegram.xpath import absolute_xpath, eval_xpath, xpath_for_nodes


def report(n: int, ok: bool, detail: str):
    ACCEPTANCE_LINES.append(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def best_time(fn, repeat=50) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_1_worked_example_fidelity():
    a, b = example_trees()
    ctm = clustered_tree_matching(a, b)
    stm = simple_tree_matching(a, b)
    trace = clustered_match_trace(a, b)
    b_pair = trace.children[0]
    weights_ok = (
        trace.value == Fraction(3, 8)
        and b_pair.value == Fraction(1, 4) * (Fraction(1, 2) + Fraction(1, 2))
        and [k.value for k in b_pair.children] == [Fraction(1, 2)] * 2
        and trace.children[1].value == Fraction(1, 4) * Fraction(1, 2)
    )
    t = max(best_time(lambda: clustered_tree_matching(a, b)), best_time(lambda: simple_tree_matching(a, b)))
    ok = ctm == 0.375 and stm == 7 and weights_ok and t < 1e-3
    report(1, ok, f"CTM={ctm} STM={stm} weights={'ok' if weights_ok else 'mismatch'} time={t * 1e6:.0f}us (<1000us)")


def test_2_identity_and_zero_laws():
    rng = random.Random(2)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(1000):
        t = random_tree(rng, 50, "abcd")
        if clustered_tree_matching(t, t) != 1.0 or simple_tree_matching(t, t) != t.size():
            bad += 1
        u = random_tree(rng, 50, "abcd")
        u.tag = "z" if t.tag != "z" else "y"
        if clustered_tree_matching(t, u) != 0.0 or simple_tree_matching(t, u) != 0:
            bad += 1
    elapsed = time.perf_counter() - t0
    report(2, bad == 0 and elapsed < 5, f"1000 trees <=50 nodes, violations={bad}, time={elapsed:.2f}s (<5s)")


def test_3_simple_matching_oracle():
    rng = random.Random(3)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(500):
        a, b = random_tree(rng, 10, "ab"), random_tree(rng, 10, "ab")
        b.tag = a.tag if rng.random() < 0.9 else b.tag
        if simple_tree_matching(a, b) != brute_force_mapping(a, b):
            bad += 1
    elapsed = time.perf_counter() - t0
    report(3, bad == 0 and elapsed < 30, f"500 pairs <=10 nodes, mismatches={bad}, time={elapsed:.2f}s (<30s)")


PUBLISHED = [
    ("simple", (1356, 92, 140), {"precision": 93.65, "recall": 90.64, "f_measure": 92.13}),
    ("clustered", (1454, 12, 42), {"precision": 99.18, "recall": 97.19, "f_measure": 98.18}),
]


def _metric_deviations():
    out = []
    for name, counts, want in PUBLISHED:
        c = Counts(*counts)
        for metric, value in want.items():
            out.append((f"{name} {metric}", 100 * getattr(c, metric), value))
    return out


def test_4_metric_reproduction():
    devs = _metric_deviations()
    off = [(k, got, want) for k, got, want in devs if abs(got - want) > 0.01]
    detail = f"{len(devs) - len(off)}/{len(devs)} published percentages within 0.01 pp"
    if off:
        detail += "; off: " + ", ".join(f"{k} {got:.4f} vs {want}" for k, got, want in off)
        detail += " (published value inconsistent with its own counts, see decisions ledger)"
    ACCEPTANCE_LINES.append(f"criterion 4: {'PASS' if not off else 'FAIL'}  {detail}")
    # the attainable checks must hold; the single known discrepancy is tracked below
    assert [k for k, _, _ in off] in ([], ["simple f_measure"])


@pytest.mark.xfail(strict=True, reason="published simple F-measure 92.13% vs 92.1196% from its tp/fp/fn")
def test_4_simple_f_measure_exact():
    assert abs(100 * Counts(1356, 92, 140).f_measure - 92.13) <= 0.01


def test_5_adaptation_effectiveness():
    t0 = time.perf_counter()
    rep = run_eval()
    elapsed = time.perf_counter() - t0
    variants = sum(len(list((DATA_DIR / "specs" / r.scenario).glob("*.json"))) for r in rep.rows)
    ctm, stm = rep.total(Algorithm.CLUSTERED), rep.total(Algorithm.SIMPLE)
    print("\n" + rep.to_text())
    ok = len(rep.rows) == 7 and variants == 70 and ctm.f_measure >= 0.95 and ctm.f_measure > stm.f_measure and elapsed < 60
    report(5, ok, f"{len(rep.rows)} scenarios x {variants // max(len(rep.rows), 1)} variants, "
                  f"F(CTM)={ctm.f_measure:.4f} F(STM)={stm.f_measure:.4f}, time={elapsed:.1f}s (<60s)")


def test_6_idempotence():
    problems = []
    for wpath in sorted((DATA_DIR / "wrappers").glob("*.json")):
        w = load_wrapper(wpath.read_bytes())
        tree = parse_html((DATA_DIR / "corpus" / f"{wpath.stem}.html").read_bytes())
        result, log = run_with_adaptation(w, tree)
        if result.dumps() != execute(w, tree).dumps():
            problems.append(f"{wpath.stem}: result differs")
        if any(o.status != Status.NOT_NEEDED for o in log.outcomes):
            problems.append(f"{wpath.stem}: adaptation ran")
        if [p.selector for p in log.wrapper.patterns] != [p.selector for p in w.patterns]:
            problems.append(f"{wpath.stem}: selector changed")
    report(6, not problems, f"7 wrappers on unmutated pages, problems={problems or 'none'}")


def test_7_selector_laws():
    rng = random.Random(7)
    pages = [parse_html(p.read_bytes()) for p in sorted((DATA_DIR / "corpus").glob("*.html"))]
    bad_nodes = bad_sets = 0
    for _ in range(1000):
        tree = rng.choice(pages)
        n = rng.choice(tree.nodes)
        if eval_xpath(tree, absolute_xpath(n)) != [n]:
            bad_nodes += 1
    for k in range(1000):
        tree = rng.choice(pages)
        if k % 2:
            nodes = rng.sample(tree.nodes, rng.randint(1, 8))
        else:
            parent = rng.choice([n for n in tree.nodes if len(n.element_children()) > 1])
            kids = parent.element_children()
            nodes = kids if rng.random() < 0.5 else rng.sample(kids, rng.randint(1, len(kids)))
        want = sorted(set(nodes), key=lambda n: n.uid)
        if eval_xpath(tree, xpath_for_nodes(nodes)) != want:
            bad_sets += 1
    report(7, bad_nodes == bad_sets == 0, f"1000 nodes: {bad_nodes} failures; 1000 node sets: {bad_sets} failures")


def test_8_threshold_sensitivity():
    def run(th):
        rep = run_eval(thresholds={"feed": th}, scenarios=["feed"], algorithms=[Algorithm.CLUSTERED])
        return rep.total(Algorithm.CLUSTERED)

    high, low = run(0.95), run(0.30)
    ok = high.fn > 0 and high.fp == 0 and low.fp > 0
    report(8, ok, f"feed scenario, CTM: threshold 0.95 -> fp={high.fp} fn={high.fn}; 0.30 -> fp={low.fp} fn={low.fn}")
