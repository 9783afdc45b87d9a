"""Regenerate the bundled evaluation corpus under src/treegram/data.

Seven synthetic page archetypes (bookmark list, auction grid, feed stream,
news clusters, result list, comparison table, blog roll), each with a
wrapper whose tree-grams are captured on the page and ten mutation specs.
Records on a page share their top-level layout but vary in nested detail
(tag lists, comment threads, paragraphs), as listings on real sites do.

    python scripts/build_corpus.py
"""

import json
import random
from pathlib import Path

from treegram.dom import LabelMode, parse_html
from treegram.evaluation import DEFAULT_THRESHOLDS
from treegram.snapshot import capture
from treegram.wrapper import AdaptationConfig, IntegrityConstraint, Pattern, Wrapper, save_wrapper
from treegram.xpath import absolute_xpath, eval_xpath, relative_xpath

OUT = Path(__file__).resolve().parents[1] / "src" / "treegram" / "data"
CAPTURED_AT = "2026-01-05T09:00:00+00:00"

WORDS = """market river garden signal harbor copper violet motion lantern cedar
pixel summit orbit meadow canvas ember falcon prism quartz saddle timber velvet
willow anchor breeze cobalt delta fable glacier hollow ivory jasmine kettle
lunar maple nectar oasis pepper quiver raven sable tundra umber vortex""".split()


class Gen:
    def __init__(self, seed):
        self.r = random.Random(seed)

    def words(self, lo, hi):
        return " ".join(self.r.choice(WORDS) for _ in range(self.r.randint(lo, hi)))

    def title(self):
        return self.words(2, 5).title()

    def slug(self):
        return self.words(1, 3).replace(" ", "-")

    def inline(self, lo=1, hi=3):
        """Paragraph text with occasional inline markup."""
        parts = []
        for _ in range(self.r.randint(lo, hi)):
            parts.append(self.words(3, 8))
            roll = self.r.random()
            if roll < 0.25:
                parts.append(f"<b>{self.words(1, 2)}</b>")
            elif roll < 0.45:
                parts.append(f'<a href="/{self.slug()}">{self.words(1, 3)}</a>')
        return " ".join(parts)

    def date(self):
        return f"2011-{self.r.randint(1, 12):02d}-{self.r.randint(1, 28):02d}"

    def money(self):
        return f"${self.r.randint(5, 2500):,}.{self.r.randint(0, 99):02d}"


def chrome(g, title, content, sidebar):
    nav = "".join(f'<li><a href="/{g.slug()}">{g.words(1, 2)}</a></li>' for _ in range(g.r.randint(4, 7)))
    foot = "".join(f'<li><a href="/{g.slug()}">{g.words(1, 2)}</a></li>' for _ in range(5))
    return f"""<!DOCTYPE html>
<html><head><meta charset="utf-8"><title>{title}</title>
<link rel="stylesheet" href="/static/site.css">
<script>window.dataLayer = window.dataLayer || [];</script>
<style>body {{ font-family: sans-serif; }}</style></head>
<body>
<div id="header"><div class="logo"><a href="/"><img src="/logo.png" alt="{title}"></a></div>
<ul class="nav">{nav}</ul>
<form class="search" action="/search"><input type="text" name="q"><button>Search</button></form></div>
<div id="main">
<div class="sidebar">{sidebar}</div>
<div id="content">{content}</div>
</div>
<div id="footer"><ul class="links">{foot}</ul><p>Copyright 2011 {g.words(1, 2)}</p></div>
</body></html>
"""


def side_list(g, n, cls="popular"):
    items = "".join(
        f'<li><a href="/{g.slug()}">{g.words(1, 3)}</a> <span class="count">{g.r.randint(3, 900)}</span></li>'
        for _ in range(n)
    )
    return f'<h3>{g.words(1, 2)}</h3><ul class="{cls}">{items}</ul>'


# -- archetypes ----------------------------------------------------------------


def bookmarks(g):
    def post():
        tags = "".join(f'<li><a class="tag" href="/tag/{g.slug()}">{g.words(1, 1)}</a></li>'
                       for _ in range(g.r.randint(1, 7)))
        note = g.inline(1, 4)
        return (f'<li class="post"><div class="data"><h4><a class="title" href="http://{g.slug()}.com/">'
                f'{g.title()}</a></h4><div class="note">{note}</div></div>'
                f'<div class="meta"><ul class="tags">{tags}</ul>'
                f'<span class="date">{g.date()}</span></div></li>')

    posts = "".join(post() for _ in range(g.r.randint(12, 16)))
    content = f'<h2>{g.title()}</h2><ul class="bookmarks">{posts}</ul><div class="pager"><a href="?page=2">next</a></div>'
    sidebar = side_list(g, 8) + side_list(g, 6, "network")
    return chrome(g, "Bookmarks", content, sidebar), {
        "records": ("li", "ul.bookmarks"),
        "fields": {"title": ("a.title", "nonempty_text"), "date": ("span.date", "date")},
    }


def auctions(g):
    def row():
        attrs = "".join(f"<li>{g.words(1, 3)}</li>" for _ in range(g.r.randint(1, 6)))
        sub = f'<div class="sub">{g.words(3, 7)}</div>' if g.r.random() < 0.5 else '<div class="sub"></div>'
        return (f'<tr class="item"><td class="pic"><a href="/itm/{g.slug()}"><img src="/img/{g.slug()}.jpg"></a></td>'
                f'<td class="details"><h3><a class="title" href="/itm/{g.slug()}">{g.title()}</a></h3>{sub}'
                f'<ul class="attrs">{attrs}</ul></td>'
                f'<td class="prices"><span class="bid">{g.money()}</span><div class="ship">{g.words(1, 3)}</div></td>'
                f'<td class="time"><span>{g.r.randint(1, 23)}h {g.r.randint(1, 59)}m</span></td></tr>')

    rows = "".join(row() for _ in range(g.r.randint(14, 18)))
    header = "<tr><th>Picture</th><th>Item</th><th>Price</th><th>Time left</th></tr>"
    related = "".join(f'<tr><td><a href="/sch/{g.slug()}">{g.words(1, 3)}</a></td></tr>' for _ in range(6))
    content = (f'<h1>{g.title()}</h1><table class="items">{header}{rows}</table>'
               f'<table class="related">{related}</table>')
    sidebar = side_list(g, 10, "categories")
    return chrome(g, "Auctions", content, sidebar), {
        "records": ("tr", "table.items", "tr.item"),
        "fields": {"title": ("a.title", "nonempty_text"),
                   "bid": ("span.bid", r"regex:\$[\d,]+\.\d\d")},
    }


def feed(g):
    def story():
        comments = "".join(f'<li class="comment"><a href="/u/{g.slug()}">{g.words(1, 2)}</a> '
                           f'<span>{g.words(2, 9)}</span></li>' for _ in range(g.r.randint(0, 6)))
        msg = g.words(5, 20)
        return (f'<div class="story"><a class="avatar" href="/u/{g.slug()}"><img src="/p/{g.slug()}.jpg"></a>'
                f'<div class="body"><h5><a class="author" href="/u/{g.slug()}">{g.words(2, 2).title()}</a></h5>'
                f'<p class="message">{msg}</p></div>'
                f'<div class="actions"><span class="time">{g.r.randint(2, 59)} minutes ago</span>'
                f'<a href="#">Like</a><a href="#">Comment</a></div>'
                f'<ul class="comments">{comments}</ul></div>')

    def suggestion():
        return (f'<div class="ego"><a href="/p/{g.slug()}"><img src="/e/{g.slug()}.jpg"></a>'
                f'<div class="body"><h5><a href="/p/{g.slug()}">{g.words(1, 3).title()}</a></h5>'
                f'<p>{g.words(3, 6)}</p></div></div>')

    stories = "".join(story() for _ in range(g.r.randint(10, 14)))
    content = f'<div id="composer"><textarea name="status"></textarea></div><div class="stream">{stories}</div>'
    sidebar = "".join(suggestion() for _ in range(5)) + side_list(g, 5, "events")
    return chrome(g, "Feed", content, sidebar), {
        "records": ("div", "div.stream", "div.story"),
        "fields": {"author": ("a.author", "nonempty_text"), "message": ("p.message", "nonempty_text")},
    }


def news(g):
    def cluster():
        related = "".join(f'<li><a href="http://{g.slug()}.com/">{g.words(3, 7)}</a> <span>{g.words(1, 2)}</span></li>'
                          for _ in range(g.r.randint(2, 5)))
        return (f'<div class="cluster"><h2><a class="title" href="http://{g.slug()}.com/">{g.title()}</a></h2>'
                f'<div class="source"><span class="src">{g.words(1, 2).title()}</span>'
                f'<span class="time">{g.r.randint(1, 11)} hours ago</span></div>'
                f'<div class="snippet">{g.words(12, 30)}</div>'
                f'<div class="more"><span class="label">More coverage</span><ul class="related">{related}</ul></div></div>')

    sections = ""
    for _ in range(3):
        sections += (f'<div class="heading"><h3>{g.words(1, 2).title()}</h3></div>'
                     + "".join(cluster() for _ in range(g.r.randint(4, 6))))
    content = f'<div class="topnews">{sections}</div>'
    sidebar = side_list(g, 7, "sections") + '<div class="weather"><div class="now">12C</div><div>cloudy</div></div>'
    return chrome(g, "News", content, sidebar), {
        "records": ("div", "div.topnews", "div.cluster"),
        "fields": {"title": ("a.title", "nonempty_text"), "source": ("span.src", "nonempty_text")},
    }


def results(g):
    def result():
        snippet = f"{g.words(6, 14)} <b>{g.words(1, 2)}</b> {g.words(6, 14)}"
        links = ""
        if g.r.random() < 0.4:
            links = '<table class="sitelinks">' + "".join(
                f'<tr><td><a href="/{g.slug()}">{g.words(1, 2)}</a></td><td><a href="/{g.slug()}">{g.words(1, 2)}</a></td></tr>'
                for _ in range(g.r.randint(1, 3))) + "</table>"
        return (f'<li class="g"><h3 class="r"><a href="http://{g.slug()}.org/">{g.title()}</a></h3>'
                f'<div class="s"><div class="kv"><cite>{g.slug()}.org/{g.slug()}</cite></div>'
                f'<span class="st">{snippet}</span><div class="extra">{links}</div></div></li>')

    def ad():
        return (f'<li class="ad"><h3><a href="http://{g.slug()}.biz/">{g.title()}</a></h3>'
                f'<cite>{g.slug()}.biz</cite></li>')

    ads = "".join(ad() for _ in range(3))
    res = "".join(result() for _ in range(10))
    content = (f'<div id="ads"><ol>{ads}</ol></div><div id="res"><ol class="results">{res}</ol></div>'
               f'<div id="foot"><table><tr>' + "".join(f'<td><a href="?p={i}">{i}</a></td>' for i in range(1, 9))
               + "</tr></table></div>")
    sidebar = side_list(g, 6, "tools")
    return chrome(g, "Results", content, sidebar), {
        "records": ("li", "ol.results", "li.g"),
        "fields": {"title": ("h3.r", "nonempty_text"), "url": ("cite", "nonempty_text")},
    }


def comparison(g):
    def offer():
        desc = f'<p class="desc">{g.inline(1, 2)}</p>'
        stock = f'<span class="stock">{g.words(1, 2)}</span>' if g.r.random() < 0.5 else ""
        return (f'<tr class="offer"><td class="merchant"><img src="/m/{g.slug()}.gif" alt="{g.words(1, 1)}"></td>'
                f'<td class="product"><a class="name" href="/go/{g.slug()}">{g.title()}</a>{desc}</td>'
                f'<td class="price"><span class="amount">{g.money()}</span>{stock}</td>'
                f'<td class="delivery">{g.words(1, 3)}</td>'
                f'<td class="go"><a class="button" href="/go/{g.slug()}">Visit shop</a></td></tr>')

    head = "<tr><th>Shop</th><th>Product</th><th>Price</th><th>Delivery</th><th></th></tr>"
    offers = "".join(offer() for _ in range(g.r.randint(10, 14)))
    filters = "".join(f'<tr><td><input type="checkbox" name="f{i}"></td><td>{g.words(1, 2)}</td></tr>' for i in range(6))
    content = (f'<h1>{g.title()}</h1><table class="offers">{head}{offers}'
               f'<tr><td>{g.words(4, 8)}</td></tr></table>')
    sidebar = f'<form action="/filter"><table class="filters">{filters}</table></form>'
    return chrome(g, "Compare prices", content, sidebar), {
        "records": ("tr", "table.offers", "tr.offer"),
        "fields": {"product": ("a.name", "nonempty_text"),
                   "price": ("span.amount", r"regex:\$[\d,]+\.\d\d")},
    }


def blogroll(g):
    def post():
        paras = "".join(f"<p>{g.words(15, 40)}</p>" for _ in range(g.r.randint(2, 4)))
        tags = "".join(f'<a href="/tag/{g.slug()}">{g.words(1, 1)}</a>' for _ in range(g.r.randint(2, 4)))
        return (f'<div class="post"><h2 class="headline"><a href="/{g.slug()}">{g.title()}</a></h2>'
                f'<div class="byline"><a class="author" href="/author/{g.slug()}">{g.words(2, 2).title()}</a>'
                f'<span class="date">{g.date()}</span></div>'
                f'<div class="entry"><div class="text">{paras}</div><a class="more" href="/{g.slug()}">Read more</a></div>'
                f'<div class="footer"><div class="tags">{tags}</div><a class="comments" href="#c">{g.r.randint(0, 90)} comments</a></div></div>')

    posts = "".join(post() for _ in range(g.r.randint(8, 11)))
    content = f'<div class="posts">{posts}</div><div class="pagination"><a href="/page/2">Older</a></div>'
    sidebar = side_list(g, 6, "trending") + ('<div class="widget"><h3>Newsletter</h3>'
                                             '<form action="/nl"><input type="text" name="email"></form></div>')
    return chrome(g, "Blog", content, sidebar), {
        "records": ("div", "div.posts", "div.post"),
        "fields": {"headline": ("h2.headline", "nonempty_text"), "author": ("a.author", "nonempty_text"),
                   "date": ("span.date", "date")},
    }


ARCHETYPES = {
    "bookmarks": bookmarks,
    "auctions": auctions,
    "feed": feed,
    "news": news,
    "results": results,
    "comparison": comparison,
    "blogroll": blogroll,
}

# Per scenario: container of the records, record filter, a field filter.
TARGETS = {
    "bookmarks": ("ul.bookmarks", "li.post", "h4", "div.meta"),
    "auctions": ("table.items", "tr.item", "h3", "td.details"),
    "feed": ("div.stream", "div.story", "h5", "div.body"),
    "news": ("div.topnews", "div.cluster", "h2", "div.source"),
    "results": ("ol.results", "li.g", "h3", "div.s"),
    "comparison": ("table.offers", "tr.offer", "td.product", "td.price"),
    "blogroll": ("div.posts", "div.post", "h2", "div.byline"),
}


def variant_specs(name):
    container, record, field_parent, inner = TARGETS[name]
    op = lambda kind, target=None, count=1, **kw: {"kind": kind, "count": count, **({"target": target} if target else {}), **kw}
    return [
        [op("InsertWrapperElement", container)],
        [op("DeleteNode", "div.sidebar"), op("EditText", record, 3)],
        [op("AddLevel", "div#content"), op("DuplicateListItem", record, 2)],
        [op("RemoveLevel", "div#main"), op("RenameClass", record, 2)],
        [op("InsertWrapperElement", container), op("AddLevel", inner, 3)],
        [op("DeleteNode", "div#header"), op("DeleteNode", record, 1), op("ReorderSiblings", container)],
        [op("InsertWrapperElement", "div#content", tag="section"), op("InsertWrapperElement", field_parent, 3)],
        [op("AddLevel", container), op("EditText", None, 6)],
        [op("InsertWrapperElement", container), op("RemoveLevel", inner, 2), op("DuplicateListItem", record, 1)],
        [op("DeleteNode", "div.sidebar"), op("InsertWrapperElement", container), op("RenameId", "div#footer")],
    ]


def field_selector(record_node, field_node):
    return str(relative_xpath(field_node, record_node))


def find(tree, filt):
    from treegram.mutate import matches_filter
    return [n for n in tree.nodes if matches_filter(n, filt)]


def build_wrapper(name, tree, info):
    record_tag, container_filter, *record_filter = info["records"]
    container = find(tree, container_filter)[0]
    records = [c for c in container.children if not c.is_text and c.tag == record_tag]
    if record_filter:
        records = [c for c in records if c in find(tree, record_filter[0])]
    selector = str(absolute_xpath(container)) + "/" + record_tag
    if len(eval_xpath(tree, selector)) != len(records):
        # container mixes record rows with header or footer rows
        cls = record_filter[0].split(".", 1)[1]
        selector = str(absolute_xpath(container)) + f"/{record_tag}[@class='{cls}']"
    assert len(eval_xpath(tree, selector)) == len(records), selector
    first = records[0]
    root = Pattern(
        name="record",
        selector=selector,
        tree_grams=[capture(first, source_selector=selector, captured_at=CAPTURED_AT)],
        constraints=IntegrityConstraint(min_occurrences=3, min_children=len(info["fields"])),
        adapt=AdaptationConfig(threshold=DEFAULT_THRESHOLDS[name], triggers=["top_down", "bottom_up"]),
    )
    patterns = [root]
    for fname, (filt, dtype) in info["fields"].items():
        node = [n for n in first.iter() if n in find(tree, filt)][0]
        sel = field_selector(first, node)
        c = IntegrityConstraint(min_occurrences=1, max_occurrences=1)
        if dtype.startswith("regex:"):
            c.data_type, c.regex = "regex", dtype[6:]
        else:
            c.data_type = dtype
        mode = LabelMode(use_class=True)
        patterns.append(Pattern(
            name=fname,
            parent="record",
            selector=sel,
            tree_grams=[capture(node, mode, sel, captured_at=CAPTURED_AT)],
            constraints=c,
            adapt=AdaptationConfig(threshold=0.8, label_mode=mode, triggers=["bottom_up"]),
        ))
    return Wrapper(patterns, name=name)


def main():
    for sub in ("corpus", "wrappers", "specs"):
        (OUT / sub).mkdir(parents=True, exist_ok=True)
    for k, (name, fn) in enumerate(ARCHETYPES.items()):
        html, info = fn(Gen(1000 + k))
        (OUT / "corpus" / f"{name}.html").write_text(html, encoding="utf-8")
        tree = parse_html(html.encode("utf-8"))
        w = build_wrapper(name, tree, info)
        (OUT / "wrappers" / f"{name}.json").write_bytes(save_wrapper(w))
        spec_dir = OUT / "specs" / name
        spec_dir.mkdir(exist_ok=True)
        for v, ops in enumerate(variant_specs(name), start=1):
            spec = {"seed": 7919 * (k + 1) + v, "ops": ops}
            (spec_dir / f"v{v:02d}.json").write_text(json.dumps(spec, indent=2) + "\n")
        print(name, len(tree), "nodes", w.patterns[0].selector)


if __name__ == "__main__":
    main()
