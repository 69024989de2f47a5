"""Command-line driver: ``froblab run`` and ``froblab suite``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .config import EXAMPLES, RunConfig, builtin_path, parse_hbar_window, read_config
from .errors import FroblabError
from .pipelines import run_config, to_json

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _flatten(prefix: str, x, out: List[str]):
    if isinstance(x, dict):
        for k, v in x.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(x, list) and any(isinstance(v, (dict, list)) for v in x):
        for i, v in enumerate(x):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append(f"{prefix}: {x if not isinstance(x, list) else ', '.join(map(str, x))}")


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    lines: List[str] = []
    _flatten("", doc, lines)
    return "\n".join(lines) + "\n"


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run_example(cfg: RunConfig):
    """Returns (report dict, exit status)."""
    path = builtin_path(cfg.example) if cfg.example else cfg.config_path
    rep = run_config(read_config(path), cfg.order, cfg.hbar_window, cfg.max_lattice)
    doc = to_json(rep.as_dict())
    return doc, EXIT_OK if rep.passed else EXIT_FAIL


def regression_suite(order: Optional[int] = None, perturb=()):
    from .suite import run_suite

    rows = run_suite(order, set(perturb))
    passed = all(r["passed"] for r in rows)
    doc = {"schema": "froblab-suite/1", "order": order, "criteria": rows, "passed": passed}
    return doc, EXIT_OK if passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="froblab", description="Canonical frames, elliptic forms and mirror series.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a bundled example or a config file")
    run.add_argument("example", nargs="?", help=f"one of: {', '.join(EXAMPLES)}")
    run.add_argument("--config", dest="config_path", help="path to a config file")
    run.add_argument("--order", type=int, default=8, help="q-order of the report (default 8)")
    run.add_argument("--hbar-window", default="-4:0", help="hbar window lo:hi (default -4:0)")
    run.add_argument("--lattice", type=int, default=6, help="largest allowed exponent denominator (default 6)")
    run.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")
    run.add_argument("--out", help="write the report here instead of stdout")
    suite = sub.add_parser("suite", help="run every acceptance check")
    suite.add_argument("--order", type=int, default=None, help="override each check's q-order")
    suite.add_argument("--perturb", type=int, action="append", default=[], metavar="N",
                       help="corrupt the expected value of criterion N (test hook)")
    suite.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")
    suite.add_argument("--out")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = RunConfig("run", args.example, args.config_path, args.order,
                            parse_hbar_window(args.hbar_window), args.lattice, args.fmt, args.out)
            doc, status = run_example(cfg)
        else:
            if args.order is not None and args.order <= 0:
                raise ValueError("order must be positive")
            doc, status = regression_suite(args.order, args.perturb)
    except (FroblabError, ValueError) as exc:
        sys.stderr.write(f"froblab: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR
    _emit(render(doc, args.fmt), args.out)
    return status


if __name__ == "__main__":
    sys.exit(main())
