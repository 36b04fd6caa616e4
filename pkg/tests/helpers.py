"""Shared test helpers: random tight loops and small map constructors."""

from __future__ import annotations

import random

from mapping_torus.graph_core import CyclicPath, Graph
from mapping_torus.graph_map import cyclic_tighten


def random_tight_loop(g: Graph, rng: random.Random, max_len: int) -> CyclicPath | None:
    """A non-backtracking closed walk, cyclically tightened; None if it cancels away."""
    v = rng.randrange(g.n_vertices)
    walk = []
    for _ in range(max_len):
        choices = [d for d in g.star(v) if not walk or d != walk[-1] ^ 1]
        if not choices:
            break
        d = rng.choice(choices)
        walk.append(d)
        v = g.terminus(d)
    # close the walk back to its start along a shortest route, if needed
    start = g.origin(walk[0]) if walk else None
    if not walk:
        return None
    if v != start:
        route = _route(g, v, start)
        if route is None:
            return None
        walk += route
    darts = cyclic_tighten(walk)
    return CyclicPath(darts) if darts else None


def _route(g: Graph, a: int, b: int) -> list[int] | None:
    prev = {a: None}
    queue = [a]
    for v in queue:
        if v == b:
            break
        for d in g.star(v):
            w = g.terminus(d)
            if w not in prev:
                prev[w] = d
                queue.append(w)
    if b not in prev:
        return None
    out = []
    while prev[b] is not None:
        out.append(prev[b])
        b = g.origin(prev[b])
    return out[::-1]


def certificate_mutations(f, verdict) -> dict[str, object]:
    """Single-field mutations of a verdict's certificate, keyed by description."""
    from dataclasses import replace

    from mapping_torus.decision import Hyperbolic, NotHyperbolic

    cert = verdict.certificate
    if isinstance(verdict, NotHyperbolic):
        c = cert.c
        return {
            "k+1": NotHyperbolic(replace(cert, k=cert.k + 1)),
            "d+1": NotHyperbolic(replace(cert, d=cert.d + 1)),
            "d-1": NotHyperbolic(replace(cert, d=cert.d - 1)),
            "c+first dart": NotHyperbolic(replace(cert, c=CyclicPath(c.darts + c.darts[:1]))),
            "c dart out of range": NotHyperbolic(
                replace(cert, c=CyclicPath((f.domain.n_darts + 3,) + c.darts[1:]))
            ),
        }
    assert isinstance(verdict, Hyperbolic)
    exp = cert.expansion
    spare = next(e for e in range(f.domain.n_edges) if e not in exp.forest)
    return {
        "L+1": Hyperbolic(replace(cert, stabilization_depth=cert.stabilization_depth + 1)),
        "L-1": Hyperbolic(replace(cert, stabilization_depth=cert.stabilization_depth - 1)),
        "n+1": Hyperbolic(replace(cert, expansion=replace(exp, n=exp.n + 1))),
        "n'+1": Hyperbolic(replace(cert, expansion=replace(exp, n_prime=exp.n_prime + 1))),
        "forest+edge": Hyperbolic(replace(cert, expansion=replace(exp, forest=tuple(sorted(exp.forest + (spare,)))))),
        "flare m+1": Hyperbolic(replace(cert, flare=replace(cert.flare, m=cert.flare.m + 1))),
        "flare k+1": Hyperbolic(replace(cert, flare=replace(cert.flare, k=cert.flare.k + 1))),
    }
