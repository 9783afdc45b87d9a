import codecs

import html5lib
import pytest
from hypothesis import given, strategies as st

from treegram.dom import (
    TEXT,
    LabelMode,
    detect_encoding,
    element,
    label_of,
    make_label,
    parse_html,
    structure,
    text_node,
    to_html,
)
from treegram.errors import EmptyDocument


def tags(tree):
    return [n.tag for n in tree.nodes]


def html5_body_structure(markup: str):
    """Element/text structure under <body> according to html5lib."""
    doc = html5lib.parse(markup, namespaceHTMLElements=False)
    body = doc.find("body")

    def conv(el):
        kids = []
        if el.text and el.text.strip():
            kids.append(TEXT)
        for c in el:
            kids.append(conv(c))
            if c.tail and c.tail.strip():
                kids.append(TEXT)
        return (el.tag, tuple(kids))

    return conv(body)


def our_body_structure(markup: str):
    tree = parse_html(markup)
    body = [n for n in tree.root.children if n.tag == "body"][0]

    def conv(n):
        if n.is_text:
            return TEXT
        return (n.tag, tuple(conv(c) for c in n.children))

    return conv(body)


def test_minimal_document_has_four_nodes():
    tree = parse_html("<html><body><p>x</p></body></html>")
    assert tags(tree) == ["html", "body", "p", TEXT]
    assert tree.nodes[3].text == "x"


def test_implied_paragraph_close_matches_reference_parser():
    markup = "<html><body><p>a<p>b</body></html>"
    body = [n for n in parse_html(markup).root.children if n.tag == "body"][0]
    assert [c.tag for c in body.children] == ["p", "p"]
    assert our_body_structure(markup) == html5_body_structure(markup)


@pytest.mark.parametrize(
    "markup",
    [
        "<ul><li>a<li>b<li>c</ul>",
        "<table><tr><td>1<td>2<tr><td>3</table>",
        "<dl><dt>a<dd>b<dt>c<dd>d</dl>",
        "<p>one<div>two</div>",
        "<div><p>a<ul><li>x</ul></div>",
        "<select><option>a<option>b</select>",
    ],
)
def test_auto_close_rules_agree_with_reference_parser(markup):
    # tables get an implied tbody from html5lib; compare on markup that has one
    if "<table>" in markup:
        markup = markup.replace("<table>", "<table><tbody>")
    assert our_body_structure(markup) == html5_body_structure(markup)


@pytest.mark.parametrize("data", [b"", "", "   \n\t"])
def test_empty_input_raises(data):
    with pytest.raises(EmptyDocument):
        parse_html(data)


def test_unclosed_and_stray_end_tags_recover():
    tree = parse_html("<div><span>a</div></b><i>b")
    body = [n for n in tree.root.children if n.tag == "body"][0]
    assert [c.tag for c in body.children] == ["div", "i"]


def test_script_and_style_text_dropped():
    tree = parse_html("<html><head><script>var x = '<p>';</script><style>p{}</style></head><body>y</body></html>")
    texts = [n.text for n in tree.nodes if n.is_text]
    assert texts == ["y"]


def test_void_elements_have_no_children():
    tree = parse_html("<p>a<br>b<img src=x.png>c</p>")
    p = [n for n in tree.nodes if n.tag == "p"][0]
    assert [c.tag for c in p.children] == [TEXT, "br", TEXT, "img", TEXT]


def test_uids_are_preorder_and_parents_set():
    tree = parse_html("<div><p>a</p><p>b</p></div>")
    for k, n in enumerate(tree.nodes):
        assert n.uid == k and n.tree is tree
        for c in n.children:
            assert c.parent is n


def test_encoding_detection():
    assert detect_encoding(b"\xef\xbb\xbf<p>") == "utf-8"
    assert codecs.lookup(detect_encoding(b'<meta charset="iso-8859-1"><p>')).name == codecs.lookup("latin-1").name
    assert detect_encoding(b"<p>x</p>") == "utf-8"
    tree = parse_html('<meta charset="latin-1"><p>caf\xe9</p>'.encode("latin-1"))
    assert "café" in [n.text for n in tree.nodes if n.is_text]


def test_labels():
    nav = element("div", id="nav", class_="b a")
    assert make_label("div", {"id": "nav"}, LabelMode(use_id=True)) == "div#nav"
    assert label_of(nav, LabelMode(use_class=True)) == "div.a.b"
    assert label_of(nav, LabelMode(use_id=True, use_class=True)) == "div#nav.a.b"
    assert label_of(nav) == "div"
    for mode in (LabelMode(), LabelMode(use_id=True), LabelMode(use_id=True, use_class=True)):
        assert label_of(text_node("x"), mode) == TEXT


@given(st.booleans(), st.booleans())
def test_label_mode_string_round_trip(use_id, use_class):
    mode = LabelMode(use_id=use_id, use_class=use_class)
    assert LabelMode.parse(str(mode)) == mode


def test_serialization_round_trip():
    markup = '<div id="a" class="x y"><p>one &amp; two</p><br><ul><li>i</li></ul></div>'
    tree = parse_html(markup)
    again = parse_html(to_html(tree))
    assert structure(again.root) == structure(tree.root)
    assert [n.attrs for n in again.nodes] == [n.attrs for n in tree.nodes]
    assert [n.text for n in again.nodes] == [n.text for n in tree.nodes]


def test_text_content_normalizes_whitespace():
    tree = parse_html("<div>  a \n b <span>c</span></div>")
    div = [n for n in tree.nodes if n.tag == "div"][0]
    assert div.text_content() == "a b c"
