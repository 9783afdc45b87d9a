"""Compare the compiled and pure-Python matching kernels on the bundled corpus.

    python3 benchmarks/bench_kernels.py [--repeat N]

For each corpus page, the first record of its wrapper is matched against
every node of the page (what adaptation does), and whole-page pairs are
scored with both algorithms.
"""

import argparse
import timeit

from treegram import _match_py
from treegram.dom import LabelMode, parse_html
from treegram.evaluation import DATA_DIR
from treegram.matching import flatten, flatten_tree
from treegram.wrapper import load_wrapper

try:
    from treegram import _match_c
except ImportError:
    _match_c = None


def workloads():
    for wpath in sorted((DATA_DIR / "wrappers").glob("*.json")):
        w = load_wrapper(wpath.read_bytes())
        tree = parse_html((DATA_DIR / "corpus" / f"{wpath.stem}.html").read_bytes())
        page = flatten_tree(tree, LabelMode())
        gram = flatten(w.patterns[0].tree_grams[0].root)
        yield wpath.stem, page, gram


def time_backend(kernel, page, gram, repeat):
    pair = (*page.args(), 0, *page.args(), 0)
    many = (*gram.args(), 0, *page.args(), list(range(len(page.labels))))
    out = {}
    for name, fn, args in [
        ("stm page/page", kernel.stm, pair),
        ("ctm page/page", kernel.ctm, pair),
        ("ctm_many gram/page", kernel.ctm_many, many),
    ]:
        out[name] = min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _match_c is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    print(f"{'scenario':<11} {'nodes':>5}  {'kernel':<19} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for name, page, gram in workloads():
        py = time_backend(_match_py, page, gram, args.repeat)
        cy = time_backend(_match_c, page, gram, args.repeat)
        for k in py:
            print(f"{name:<11} {len(page.labels):>5}  {k:<19} {py[k] * 1e3:>10.2f} {cy[k] * 1e3:>10.3f} {py[k] / cy[k]:>7.0f}x")


if __name__ == "__main__":
    main()
