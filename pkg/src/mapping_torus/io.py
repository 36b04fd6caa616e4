"""Input documents (text and JSON), verdict JSON, and DOT emission.

Text grammar (statements end at ``;`` or a newline, ``#`` starts a comment)::

    document    := statement*
    statement   := "name:" IDENT
                 | "rank=" INT                     (endomorphism documents)
                 | "vertex" IDENT
                 | "edge" IDENT ":" IDENT "->" IDENT
                 | ["map:"] IDENT "->" dart*
    dart        := IDENT ["'"]

A document containing ``rank=`` is an endomorphism: every ``x -> ...`` rule
names a generator (in order of appearance) and its image word.  Otherwise it
is a graph map: ``vertex`` and ``edge`` declare the graph, and each vertex
and edge gets exactly one ``->`` rule giving its image vertex or dart path.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .decision import (
    FlareConstants,
    Hyperbolic,
    HyperbolicityCertificate,
    Inconclusive,
    InvariantLoopCertificate,
    NotHyperbolic,
    Verdict,
)
from .graph_core import CyclicPath, Graph, GraphError
from .graph_map import ExpansionCertificate, GraphMap, collapse_forest
from .pullback import PullbackGraph, classify_components, hat_gamma
from .words import Endomorphism

SCHEMA = 1

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*'?")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class InputDocument:
    content: GraphMap | Endomorphism
    name: str | None = None


def _statements(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        col = 0
        for part in line.split(";"):
            stripped = part.strip()
            if stripped:
                yield stripped, lineno, col + len(part) - len(part.lstrip()) + 1
            col += len(part) + 1


def _tokens(s: str, line: int, col: int) -> list[tuple[str, int]]:
    """Identifier tokens of ``s`` with their columns; ``s`` starts at ``col``."""
    out = []
    for m in re.finditer(r"\S+", s):
        t = m.group()
        if not _IDENT.fullmatch(t):
            raise ParseError(f"bad token {t!r}", line, col + m.start())
        out.append((t, col + m.start()))
    return out


def parse_document(text: str) -> InputDocument:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        return document_from_json(data)
    stmts = list(_statements(text))
    if any(s.startswith("rank=") for s, _, _ in stmts):
        return _parse_endomorphism(stmts)
    return _parse_graph_map(stmts)


def _split_rule(s: str, line: int, col: int) -> tuple[str, list[tuple[str, int]]]:
    if s.startswith("map:"):
        off = len(s) - len(s[4:].lstrip())
        s, col = s[off:], col + off
    if "->" not in s:
        raise ParseError(f"expected a rule 'x -> ...', got {s!r}", line, col)
    lhs, rhs = s.split("->", 1)
    lhs_t = _tokens(lhs, line, col)
    if len(lhs_t) != 1:
        raise ParseError("rule needs exactly one name on the left", line, col)
    return lhs_t[0][0], _tokens(rhs, line, col + len(lhs) + 2)


def _parse_endomorphism(stmts) -> InputDocument:
    name = None
    rank = None
    rules = []
    for s, line, col in stmts:
        if s.startswith("name:"):
            name = s[5:].strip()
        elif s.startswith("rank="):
            try:
                rank = int(s[5:])
            except ValueError:
                raise ParseError("rank must be an integer", line, col + 5) from None
        else:
            rules.append(_split_rule(s, line, col) + (line, col))
    gens = [lhs for lhs, *_ in rules]
    if rank is None or rank != len(gens):
        last = stmts[-1] if stmts else ("", 1, 1)
        raise ParseError(f"rank={rank} but {len(gens)} generator rules", last[1], last[2])
    if len(set(gens)) != len(gens) or any(g.endswith("'") for g in gens):
        raise ParseError("generator names must be distinct and not primed", rules[0][2], rules[0][3])
    idx = {g: i + 1 for i, g in enumerate(gens)}
    images = []
    for lhs, rhs, line, col in rules:
        w = []
        for t, tcol in rhs:
            base = t.rstrip("'")
            if base not in idx:
                raise ParseError(f"unknown generator {base!r}", line, tcol)
            w.append(-idx[base] if t.endswith("'") else idx[base])
        if not w or any(x == -y for x, y in zip(w, w[1:])):
            raise ParseError(f"image of {lhs} must be a nonempty reduced word", line, col)
        images.append(tuple(w))
    try:
        return InputDocument(Endomorphism(rank, tuple(images), tuple(gens)), name)
    except ValueError as exc:
        raise ParseError(str(exc), stmts[0][1], 1) from None


def _parse_graph_map(stmts) -> InputDocument:
    name = None
    vertices: list[str] = []
    edges: list[tuple[str, str, str]] = []
    edge_pos: list[tuple[int, int, int, int]] = []
    rules = []
    for s, line, col in stmts:
        if s.startswith("name:"):
            name = s[5:].strip()
        elif s.startswith("vertex ") or s == "vertex":
            toks = _tokens(s[6:], line, col + 6)
            if len(toks) != 1:
                raise ParseError("expected 'vertex NAME'", line, col)
            vertices.append(toks[0][0])
        elif s.startswith("edge "):
            m = re.fullmatch(r"edge\s+(\S+)\s*:\s*(\S+)\s*->\s*(\S+)", s)
            if not m:
                raise ParseError("expected 'edge NAME: FROM -> TO'", line, col)
            edges.append((m.group(1), m.group(2), m.group(3)))
            edge_pos.append((line, col + m.start(2), line, col + m.start(3)))
        else:
            rules.append(_split_rule(s, line, col) + (line, col))
    vidx = {v: i for i, v in enumerate(vertices)}
    eidx = {e: i for i, (e, _, _) in enumerate(edges)}
    for (e, u, w), (lu, cu, lw, cw) in zip(edges, edge_pos):
        for v, vline, vcol in ((u, lu, cu), (w, lw, cw)):
            if v not in vidx:
                raise ParseError(f"edge {e} uses undeclared vertex {v!r}", vline, vcol)
    g = Graph(len(vertices), tuple((vidx[u], vidx[w]) for _, u, w in edges), tuple(vertices), tuple(eidx))
    vmap: dict[int, int] = {}
    emap: dict[int, tuple[int, ...]] = {}
    for lhs, rhs, line, col in rules:
        if lhs in vidx:
            if len(rhs) != 1 or rhs[0][0] not in vidx:
                raise ParseError(f"vertex {lhs} must map to one vertex", line, rhs[0][1] if rhs else col)
            vmap[vidx[lhs]] = vidx[rhs[0][0]]
        elif lhs in eidx:
            darts = []
            for t, tcol in rhs:
                try:
                    darts.append(g.dart_by_name(t))
                except GraphError as exc:
                    raise ParseError(str(exc), line, tcol) from None
            emap[eidx[lhs]] = tuple(darts)
        else:
            raise ParseError(f"unknown name {lhs!r}", line, col)
    if len(vmap) != len(vertices) or len(emap) != len(edges):
        raise ParseError("every vertex and edge needs exactly one map rule", stmts[-1][1] if stmts else 1, 1)
    try:
        f = GraphMap(g, g, tuple(vmap[i] for i in range(len(vertices))), tuple(emap[i] for i in range(len(edges))))
    except GraphError as exc:
        raise ParseError(str(exc), stmts[-1][1], 1) from None
    return InputDocument(f, name)


def render_document(doc: InputDocument) -> str:
    lines = []
    if doc.name:
        lines.append(f"name: {doc.name}")
    c = doc.content
    if isinstance(c, Endomorphism):
        lines.append(f"rank={c.rank}")
        for n, w in zip(c.generator_names, c.images):
            lines.append(f"{n} -> {c.format_word(w)}")
    else:
        g = c.domain
        lines.extend(f"vertex {g.vertex_name(v)}" for v in g.vertices())
        for e, (u, w) in enumerate(g.edges):
            lines.append(f"edge {g.edge_name(e)}: {g.vertex_name(u)} -> {g.vertex_name(w)}")
        vm = "; ".join(f"{g.vertex_name(v)} -> {g.vertex_name(c.vertex_map[v])}" for v in g.vertices())
        lines.append(f"map: {vm}")
        em = "; ".join(
            f"{g.edge_name(e)} -> " + " ".join(g.dart_name(d) for d in c.edge_images[e]) for e in range(g.n_edges)
        )
        lines.append(f"map: {em}")
    return "\n".join(lines) + "\n"


def document_to_json(doc: InputDocument) -> dict:
    c = doc.content
    out: dict = {"schema": SCHEMA, "name": doc.name}
    if isinstance(c, Endomorphism):
        out.update(
            kind="endomorphism",
            rank=c.rank,
            generators=list(c.generator_names),
            images={n: c.format_word(w) for n, w in zip(c.generator_names, c.images)},
        )
    else:
        g = c.domain
        out.update(
            kind="graph_map",
            vertices=[g.vertex_name(v) for v in g.vertices()],
            edges=[
                {"name": g.edge_name(e), "from": g.vertex_name(u), "to": g.vertex_name(w)}
                for e, (u, w) in enumerate(g.edges)
            ],
            vertex_map={g.vertex_name(v): g.vertex_name(c.vertex_map[v]) for v in g.vertices()},
            edge_map={g.edge_name(e): " ".join(g.dart_name(d) for d in c.edge_images[e]) for e in range(g.n_edges)},
        )
    return out


def document_from_json(data: dict) -> InputDocument:
    try:
        kind = data["kind"]
        name = data.get("name")
        if kind == "endomorphism":
            gens = data["generators"]
            lines = [f"rank={data['rank']}"] + [f"{n} -> {data['images'][n]}" for n in gens]
        elif kind == "graph_map":
            lines = [f"vertex {v}" for v in data["vertices"]]
            lines += [f"edge {e['name']}: {e['from']} -> {e['to']}" for e in data["edges"]]
            lines += [f"{k} -> {v}" for k, v in data["vertex_map"].items()]
            lines += [f"{k} -> {v}" for k, v in data["edge_map"].items()]
        else:
            raise ParseError(f"unknown kind {kind!r}", 1, 1)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"missing or malformed field {exc}", 1, 1) from None
    doc = parse_document("\n".join(lines))
    return InputDocument(doc.content, name)


# -- verdicts ---------------------------------------------------------------------------


def _dart_names(g: Graph, darts) -> list[str]:
    return [g.dart_name(d) for d in darts]


def verdict_to_json(f: GraphMap, v: Verdict, name: str | None = None) -> dict:
    g = f.domain
    out: dict = {"schema": SCHEMA, "name": name}
    if isinstance(v, NotHyperbolic):
        c = v.certificate
        out["verdict"] = "not_hyperbolic"
        out["certificate"] = {
            "type": "invariant_loop",
            "loop": _dart_names(g, c.c.darts),
            "loop_darts": list(c.c.darts),
            "k": c.k,
            "d": c.d,
        }
    elif isinstance(v, Hyperbolic):
        c = v.certificate
        x, fl = c.expansion, c.flare
        out["verdict"] = "hyperbolic"
        out["certificate"] = {
            "type": "hyperbolicity",
            "expansion": {
                "lambda": 2,
                "n": x.n,
                "n_prime": x.n_prime,
                "k": x.k,
                "forest": [g.edge_name(e) for e in x.forest],
                "forest_edges": list(x.forest),
            },
            "stabilization_depth": c.stabilization_depth,
            "flare": {"lambda_f": fl.lambda_f, "k": fl.k, "r": fl.r, "m": fl.m, "H_coefficient": fl.h_coefficient},
        }
    else:
        out["verdict"] = "inconclusive"
        out["inconclusive"] = {"reason": v.reason, "depth_reached": v.depth_reached, "details": v.details}
    return out


def verdict_from_json(f: GraphMap, data: dict) -> Verdict:
    kind = data["verdict"]
    if kind == "not_hyperbolic":
        c = data["certificate"]
        return NotHyperbolic(InvariantLoopCertificate(CyclicPath(c["loop_darts"]), c["k"], c["d"]))
    if kind == "hyperbolic":
        c = data["certificate"]
        x, fl = c["expansion"], c["flare"]
        collapsed = collapse_forest(f, x["forest_edges"]).map
        exp = ExpansionCertificate(x["n"], x["n_prime"], x["k"], tuple(x["forest_edges"]), collapsed)
        flare = FlareConstants(fl["lambda_f"], fl["k"], fl["r"], fl["m"], fl["H_coefficient"])
        return Hyperbolic(HyperbolicityCertificate(exp, c["stabilization_depth"], flare))
    inc = data["inconclusive"]
    return Inconclusive(inc["reason"], inc["depth_reached"], inc.get("details", {}))


# -- DOT ------------------------------------------------------------------------------


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def pullback_dot(p: PullbackGraph) -> str:
    """Old components gray, new components black, new-core edges red."""
    g = p.graph
    old, new = classify_components(p) if p.depth >= 1 else ([], [])
    old_v = {v for c in old for v in c.vertices} if p.depth >= 1 else set(g.vertices())
    core_labels = set()
    if p.depth >= 1:
        for comp in hat_gamma(p.f, p.depth):
            core_labels.update(comp.edge_labels)
    lines = [f"graph pullback_{p.depth} {{", "  node [shape=point];"]
    for v in g.vertices():
        x, y = p.vertex_labels[v]
        color = "gray" if v in old_v else "black"
        lines.append(f"  n{v} [label={_quote(f'({x}, {y})')}, xlabel={_quote(f'({x}, {y})')}, color={color}];")
    for e, (u, w) in enumerate(g.edges):
        if u in old_v:
            color = "gray"
        elif p.edge_labels[e] in core_labels:
            color = "red"
        else:
            color = "black"
        left, right = p.edge_labels[e]
        lines.append(f"  n{u} -- n{w} [color={color}, label={_quote(f'{left} | {right}')}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
