"""Command-line interface: check, pullback, decide, oracle."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import fixtures
from .decision import Budgets, Hyperbolic, Inconclusive, NotHyperbolic, decide, verify
from .graph_core import GraphError, components, core_subgraph, neg_euler
from .graph_map import GraphMap, check_immersion, require_immersion
from .io import InputDocument, ParseError, parse_document, pullback_dot, verdict_to_json
from .pullback import classify_components, hat_gamma, loop_pair, pullback
from .words import Endomorphism, oracle_search, rose_map

EXIT_HYPERBOLIC = 0
EXIT_NOT_HYPERBOLIC = 10
EXIT_INCONCLUSIVE = 20
EXIT_INPUT_ERROR = 2


class InputError(Exception):
    pass


def load_input(args) -> InputDocument:
    if args.example:
        try:
            return InputDocument(fixtures.example(args.example), args.example)
        except KeyError:
            raise InputError(f"unknown example {args.example!r}; known: {', '.join(fixtures.NAMES)}") from None
    if not args.input:
        raise InputError("give an input file or --example NAME")
    try:
        text = Path(args.input).read_text()
    except OSError as exc:
        raise InputError(str(exc)) from None
    try:
        doc = parse_document(text)
    except ParseError as exc:
        raise InputError(f"{args.input}: parse error at {exc}") from None
    return InputDocument(doc.content, doc.name or Path(args.input).stem)


def _as_map(doc: InputDocument) -> GraphMap:
    return rose_map(doc.content) if isinstance(doc.content, Endomorphism) else doc.content


def _immersion(doc: InputDocument) -> GraphMap:
    f = _as_map(doc)
    try:
        require_immersion(f)
    except GraphError as exc:
        raise InputError(str(exc)) from None
    return f


def cmd_check(args) -> int:
    doc = load_input(args)
    f = _as_map(doc)
    w = check_immersion(f)
    if w.immersion:
        print("immersion: yes")
    else:
        g = f.domain
        a, b = w.darts
        print(f"immersion: no; darts {g.dart_name(a)}, {g.dart_name(b)} collide at {g.vertex_name(w.vertex)}")
    return 0


def cmd_pullback(args) -> int:
    doc = load_input(args)
    f = _immersion(doc)
    g = f.domain
    dot_dir = Path(args.dot_dir) if args.dot_dir else None
    if dot_dir:
        dot_dir.mkdir(parents=True, exist_ok=True)
    print(f"{'depth':>5} {'comps':>6} {'old':>4} {'new':>4} {'core':>5} {'chi-':>5}  new-core sizes / loops")
    for i in range(0, args.depth + 1):
        p = pullback(f, i)
        comps = components(p.graph)
        if i == 0:
            print(f"{0:>5} {len(comps):>6} {'-':>4} {'-':>4} {'-':>5} {neg_euler(p.graph):>5}  diagonal")
        else:
            old, new = classify_components(p)
            hats = hat_gamma(f, i)
            cells = []
            for h in hats:
                size = f"{h.graph.n_vertices}v/{h.graph.n_edges}e"
                if all(h.graph.valence(v) == 2 for v in h.graph.vertices()):
                    lp = loop_pair(h)
                    size += " (" + " ".join(g.dart_name(d) for d in lp.c_minus.darts)
                    size += " | " + " ".join(g.dart_name(d) for d in lp.c_plus.darts) + ")"
                cells.append(size)
            print(
                f"{i:>5} {len(comps):>6} {len(old):>4} {len(new):>4} {len(hats):>5} "
                f"{neg_euler(p.graph):>5}  {'; '.join(cells) if cells else 'empty'}"
            )
        if dot_dir:
            (dot_dir / f"pullback_{i}.dot").write_text(pullback_dot(p))
    return 0


def cmd_decide(args) -> int:
    doc = load_input(args)
    f = _immersion(doc)
    budgets = Budgets(max_depth=args.max_depth, k_budget=args.k_budget, d_cap=args.d_cap)
    v = decide(f, budgets)
    out = verdict_to_json(f, v, doc.name)
    if args.verify and not isinstance(v, Inconclusive):
        out["verified"] = verify(f, v)
    print(json.dumps(out, indent=2))
    if isinstance(v, Hyperbolic):
        return EXIT_HYPERBOLIC
    if isinstance(v, NotHyperbolic):
        return EXIT_NOT_HYPERBOLIC
    return EXIT_INCONCLUSIVE


def cmd_oracle(args) -> int:
    doc = load_input(args)
    e = doc.content
    if not isinstance(e, Endomorphism):
        raise InputError("the oracle needs an endomorphism input")
    hit = oracle_search(e, args.max_len, args.max_k, args.max_d)
    bounds = {"max_len": args.max_len, "max_k": args.max_k, "max_d": args.max_d}
    if hit is None:
        print(f"none within bounds {json.dumps(bounds)}")
    else:
        w, k, d = hit
        print(f"witness: w = {e.format_word(w)}, k = {k}, d = {d}; bounds {json.dumps(bounds)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mapping-torus",
        description="Decide word-hyperbolicity of mapping tori of graph immersions.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("input", nargs="?", help="graph-map or endomorphism file (text or JSON)")
        p.add_argument("--example", help=f"built-in fixture: {', '.join(fixtures.NAMES)}")

    p = sub.add_parser("check", help="is the map an immersion?")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("pullback", help="tabulate pullbacks up to a depth")
    common(p)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--dot-dir", help="write one DOT file per depth here")
    p.set_defaults(func=cmd_pullback)

    p = sub.add_parser("decide", help="run the decision procedure, JSON verdict on stdout")
    common(p)
    p.add_argument("--max-depth", type=int, default=Budgets.max_depth)
    p.add_argument("--k-budget", type=int, default=None)
    p.add_argument("--d-cap", type=int, default=None)
    p.add_argument("--verify", action="store_true", help="recheck the certificate independently")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("oracle", help="brute-force search for invariant words")
    common(p)
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--max-k", type=int, default=3)
    p.add_argument("--max-d", type=int, default=16)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
