import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import page
from treegram.dom import to_html
from treegram.evaluation import DATA_DIR
from treegram.mutate import GroundTruth, MutationKind, MutationOp, MutationSpec, load_spec, matches_filter, mutate
from treegram.xpath import eval_xpath

LIST = '<div id="box" class="panel"><ul class="items"><li>a 1</li><li>b 2</li><li>c 3</li></ul><p>tail</p></div>'


def spec(*ops, seed=3):
    return MutationSpec(seed, tuple(MutationOp(**op) for op in ops))


def test_zero_ops_is_identity():
    tree = page(LIST)
    new, truth = mutate(tree, MutationSpec(seed=1))
    assert to_html(new) == to_html(tree)
    assert truth.survivors == {n.uid: n.uid for n in tree.nodes}
    assert truth.clones == {}


def test_duplicate_list_item():
    tree = page(LIST)
    lis = [n.uid for n in eval_xpath(tree, "//li")]
    new, truth = mutate(tree, spec({"kind": "DuplicateListItem", "target": "li"}))
    assert len(eval_xpath(new, "//li")) == 4
    assert all(u in truth.survivors for u in lis)
    (clone,) = [u for u in truth.clones if new.node(u).tag == "li"]
    assert truth.clones[clone] in lis
    assert len(truth.expected(lis)) == 4


def test_deletion_drops_from_map():
    tree = page(LIST)
    p = eval_xpath(tree, "//p")[0]
    new, truth = mutate(tree, spec({"kind": "DeleteNode", "target": "p"}))
    assert p.uid not in truth.survivors
    assert eval_xpath(new, "//p") == []


@pytest.mark.parametrize(
    "kind, check",
    [
        ("RenameClass", lambda t: eval_xpath(t, "//div[@class='panel']") == []),
        ("RenameId", lambda t: eval_xpath(t, "//div[@id='box']") == []),
        ("InsertWrapperElement", lambda t: eval_xpath(t, "/html[1]/body[1]/div[1]/div[1]/ul[1]") != []),
        ("AddLevel", lambda t: eval_xpath(t, "//div[@id='box']/div[1]/ul[1]") != []),
        ("RemoveLevel", lambda t: eval_xpath(t, "/html[1]/body[1]/ul[1]") != []),
        ("ReorderSiblings", lambda t: [c.tag for c in eval_xpath(t, "//div[@id='box']")[0].children] == ["p", "ul"]),
    ],
)
def test_structural_kinds(kind, check):
    tree = page(LIST)
    new, truth = mutate(tree, spec({"kind": kind, "target": "div.panel" if kind != "RenameId" else "#box"}))
    assert check(new), truth.op_log


def test_edit_text_changes_one_text():
    tree = page(LIST)
    new, _ = mutate(tree, spec({"kind": "EditText", "target": "li"}))
    before = [n.text for n in tree.nodes if n.is_text]
    after = [n.text for n in new.nodes if n.is_text]
    assert sum(a != b for a, b in zip(before, after)) == 1
    assert [n.tag for n in new.nodes] == [n.tag for n in tree.nodes]


def test_missing_target_is_logged_noop():
    tree = page(LIST)
    new, truth = mutate(tree, spec({"kind": "DeleteNode", "target": "table"}))
    assert to_html(new) == to_html(tree)
    assert "no eligible node" in truth.op_log[0]


def test_input_tree_untouched():
    tree = page(LIST)
    snapshot = to_html(tree)
    mutate(tree, spec({"kind": "DeleteNode", "target": "ul"}, {"kind": "AddLevel", "count": 3}))
    assert to_html(tree) == snapshot


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.tuples(st.sampled_from([k.value for k in MutationKind]), st.integers(0, 3)), max_size=5),
    st.integers(0, 2**63 - 1),
)
def test_determinism_and_truth_consistency(ops, seed):
    tree = page(LIST)
    s = MutationSpec(seed, tuple(MutationOp(kind, count) for kind, count in ops))
    a, ta = mutate(tree, s)
    b, tb = mutate(tree, s)
    assert to_html(a) == to_html(b)
    assert json.dumps(ta.to_json()) == json.dumps(tb.to_json())
    # every mapped node keeps its tag
    for old, new in ta.survivors.items():
        assert tree.node(old).tag == a.node(new).tag
    for new, old in ta.clones.items():
        assert tree.node(old).tag == a.node(new).tag
    assert not set(ta.survivors.values()) & set(ta.clones)


def test_seed_override_and_spec_file():
    tree = page(LIST * 4)
    s = spec({"kind": "DeleteNode", "target": "li"})
    outs = {to_html(mutate(tree, s, seed=k)[0]) for k in range(6)}
    assert len(outs) > 1
    loaded = load_spec(json.dumps(s.to_json()))
    assert loaded == s


@pytest.mark.parametrize("path", sorted((DATA_DIR / "specs").glob("*/*.json")), ids=lambda p: f"{p.parent.name}/{p.stem}")
def test_bundled_specs_load(path):
    s = load_spec(path.read_bytes())
    assert s.ops


def test_bad_specs_rejected():
    with pytest.raises(ValueError):
        MutationOp("Explode")
    with pytest.raises(ValueError):
        MutationOp("DeleteNode", count=-1)
    with pytest.raises(ValueError):
        MutationOp("DeleteNode", target="div > p")


def test_filters():
    tree = page(LIST)
    div = eval_xpath(tree, "//div")[0]
    assert matches_filter(div, "div#box.panel")
    assert matches_filter(div, ".panel") and matches_filter(div, "*")
    assert not matches_filter(div, "div.items")
