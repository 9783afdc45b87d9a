"""Command-line entry point (``treegram``).

Exit codes: 0 success, 2 validation violations remain, 3 adaptation
failed, 4 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import evaluation
from .adapt import remaining_violations, run_with_adaptation
from .dom import parse_html, to_html
from .errors import TreegramError
from .matching import Algorithm
from .mutate import load_spec, mutate
from .snapshot import capture
from .wrapper import execute, load_wrapper, save_wrapper, validate

OK, VIOLATIONS, FAILED, INPUT_ERROR = 0, 2, 3, 4


class InputError(Exception):
    pass


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _emit(text: str | bytes, path: str | None):
    if path is None:
        if isinstance(text, bytes):
            sys.stdout.buffer.write(text)
            sys.stdout.flush()
        else:
            sys.stdout.write(text)
        return
    data = text.encode("utf-8") if isinstance(text, str) else text
    Path(path).write_bytes(data)


def _report_violations(violations) -> int:
    for v in violations:
        print(f"violation: {v.pattern}: {v.kind}: {v.detail}", file=sys.stderr)
    return VIOLATIONS if violations else OK


def cmd_extract(args) -> int:
    w = load_wrapper(_read(args.wrapper))
    tree = parse_html(_read(args.html))
    result = execute(w, tree)
    _emit(result.dumps(), args.out)
    return _report_violations(validate(result, w))


def cmd_snapshot(args) -> int:
    w = load_wrapper(_read(args.wrapper))
    tree = parse_html(_read(args.html))
    result = execute(w, tree)
    missing = []
    for p in w.patterns:
        found = result.instances(p.name)
        if not found:
            missing.append(p.name)
            continue
        p.tree_grams = [capture(found[0].node, p.adapt.label_mode, p.selector)]
    _emit(save_wrapper(w), args.out)
    for name in missing:
        print(f"no instance of pattern {name!r}; its tree-grams were left as they were", file=sys.stderr)
    return VIOLATIONS if missing else OK


def cmd_adapt(args) -> int:
    w = load_wrapper(_read(args.wrapper))
    tree = parse_html(_read(args.html))
    if args.update_snapshots:
        for p in w.patterns:
            p.adapt.update_snapshots = True
    result, log = run_with_adaptation(w, tree)
    _emit(log.to_jsonl(), args.log)
    if args.result:
        _emit(result.dumps(), args.result)
    if args.update_snapshots:
        _emit(save_wrapper(log.wrapper), args.out or args.wrapper)
    if log.failed:
        for o in log.final_outcomes().values():
            if o.status.value == "failed":
                print(f"adaptation failed: {o.pattern}: {o.detail}", file=sys.stderr)
        return FAILED
    return _report_violations(remaining_violations(result, log))


def cmd_mutate(args) -> int:
    tree = parse_html(_read(args.html))
    try:
        spec = load_spec(_read(args.spec))
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(f"bad mutation spec {args.spec}: {exc}") from exc
    mutated, truth = mutate(tree, spec, seed=args.seed)
    _emit(to_html(mutated), args.out)
    if args.truth:
        _emit(json.dumps(truth.to_json(), indent=2) + "\n", args.truth)
    return OK


def _threshold_arg(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    try:
        th = float(value)
    except ValueError:
        th = -1.0
    if not sep or not 0.0 <= th <= 1.0:
        raise argparse.ArgumentTypeError(f"expected SCENARIO=VALUE with VALUE in [0, 1], got {text!r}")
    return name, th


def cmd_eval(args) -> int:
    report = evaluation.run_eval(
        args.corpus,
        args.wrappers,
        args.specs,
        thresholds=dict(args.threshold or []),
        algorithms=args.algorithm or evaluation.ALGORITHMS,
        scenarios=args.scenario,
    )
    if args.out:
        Path(args.out).write_text(report.dumps())
    sys.stdout.write(report.to_text())
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="treegram", description="Self-repairing web wrappers.")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="run a wrapper on a page and print the extraction as JSON")
    p.add_argument("wrapper")
    p.add_argument("html")
    p.add_argument("--out", help="write the result here instead of stdout")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("snapshot", help="capture tree-grams from each pattern's first instance")
    p.add_argument("wrapper")
    p.add_argument("html")
    p.add_argument("--out", help="write the updated wrapper here instead of stdout")
    p.set_defaults(func=cmd_snapshot)

    p = sub.add_parser("adapt", help="extract with runtime adaptation; prints the JSONL log")
    p.add_argument("wrapper")
    p.add_argument("html")
    p.add_argument("--update-snapshots", action="store_true",
                   help="store adapted selectors and tree-grams (written back to the wrapper file, or --out)")
    p.add_argument("--out", help="where to write the updated wrapper")
    p.add_argument("--log", help="write the JSONL log here instead of stdout")
    p.add_argument("--result", help="also write the extraction result as JSON")
    p.set_defaults(func=cmd_adapt)

    p = sub.add_parser("mutate", help="apply a seeded mutation spec to a page")
    p.add_argument("html")
    p.add_argument("--spec", required=True)
    p.add_argument("--seed", type=int, help="overrides the seed stored in the mutation spec")
    p.add_argument("--out", help="write the mutated page here instead of stdout")
    p.add_argument("--truth", help="write the node-identity ground truth as JSON")
    p.set_defaults(func=cmd_mutate)

    p = sub.add_parser("eval", help="precision/recall of adaptation over a mutated corpus")
    p.add_argument("--corpus", default=evaluation.DATA_DIR / "corpus")
    p.add_argument("--wrappers", default=evaluation.DATA_DIR / "wrappers")
    p.add_argument("--specs", default=evaluation.DATA_DIR / "specs")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--threshold", action="append", type=_threshold_arg, metavar="SCENARIO=VALUE")
    p.add_argument("--algorithm", action="append", choices=[a.value for a in Algorithm if a.is_tree])
    p.add_argument("--scenario", action="append", help="restrict to these scenarios")
    p.set_defaults(func=cmd_eval)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else INPUT_ERROR
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, TreegramError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
