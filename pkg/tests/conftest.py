import random

import pytest
from hypothesis import strategies as st

from treegram.dom import DomNode, DomTree, element, parse_html

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def build(spec) -> DomNode:
    """``("a", ("b",), ("c", ("d",)))`` -> element tree with those tags."""
    tag, *kids = spec
    return element(tag, *(build(k) for k in kids))


def example_trees():
    a = build(("a", ("b", ("d",), ("e",)), ("c", ("f",)), ("b", ("e",), ("d",)),
               ("c", ("g", ("h",), ("i",), ("j",)))))
    b = build(("a", ("b", ("d",), ("e",)), ("c", ("g", ("h",)), ("f",))))
    return a, b


def random_tree(rng: random.Random, max_nodes: int, alphabet="abc") -> DomNode:
    """Random ordered tree with at most ``max_nodes`` nodes, attached by random parent."""
    n = rng.randint(1, max_nodes)
    nodes = [DomNode(rng.choice(alphabet))]
    for _ in range(n - 1):
        parent = rng.choice(nodes)
        child = DomNode(rng.choice(alphabet))
        parent.children.append(child)
        nodes.append(child)
    return nodes[0]


# -- independent oracle ------------------------------------------------------


def brute_force_mapping(a, b) -> int:
    """Largest top-down, order-preserving, label-respecting mapping.

    Enumerates every assignment of A's nodes (pre-order) to B's nodes or
    to nothing, keeping only those where a mapped node's parent is mapped
    to the image's parent and mapped siblings keep their order.
    """
    if a.tag != b.tag:
        return 0
    a_nodes = list(a.iter())
    parent_a = {id(c): p for p in a_nodes for c in p.children}
    image = {id(a): b}
    last_image = {}  # id(parent in A) -> index of last used child in B
    best = 0

    def go(k, size):
        nonlocal best
        if k == len(a_nodes):
            best = max(best, size)
            return
        if size + (len(a_nodes) - k) <= best:
            return
        x = a_nodes[k]
        px = parent_a[id(x)]
        go(k + 1, size)
        py = image.get(id(px))
        if py is None:
            return
        start = last_image.get(id(px), -1) + 1
        for idx in range(start, len(py.children)):
            y = py.children[idx]
            if y.tag != x.tag:
                continue
            saved = last_image.get(id(px))
            image[id(x)] = y
            last_image[id(px)] = idx
            go(k + 1, size + 1)
            del image[id(x)]
            if saved is None:
                del last_image[id(px)]
            else:
                last_image[id(px)] = saved

    go(1, 1)
    return best


@st.composite
def trees(draw, max_nodes=12, alphabet="abc"):
    n = draw(st.integers(1, max_nodes))
    labels = draw(st.lists(st.sampled_from(alphabet), min_size=n, max_size=n))
    parents = [draw(st.integers(0, k - 1)) for k in range(1, n)]
    nodes = [DomNode(labels[0])]
    for k, p in enumerate(parents, start=1):
        child = DomNode(labels[k])
        nodes[p].children.append(child)
        nodes.append(child)
    return nodes[0]


def page(body: str) -> DomTree:
    return parse_html(f"<html><head><title>t</title></head><body>{body}</body></html>")


@pytest.fixture
def shop_page():
    rows = "".join(
        f'<div class="rec" id="r{i}"><h2>Item {i}</h2><span class="price">{10 * i}</span></div>'
        for i in range(1, 4)
    )
    return page(f'<div id="main"><div class="list">{rows}</div></div><div id="side"><p>ad</p></div>')
