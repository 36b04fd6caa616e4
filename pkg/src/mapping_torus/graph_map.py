"""Combinatorial graph maps: immersion checks, iteration, subdivision, forests.

A map sends vertices to vertices and each dart to a nonempty tight edge path.
Only images of positive darts are stored; a reversed dart maps to the
reversed path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Iterable, NamedTuple, Sequence

from .graph_core import (
    CyclicPath,
    EdgePath,
    Graph,
    GraphError,
    SubgraphHandle,
    subgraph_from_edges,
)


def reverse_path(darts: Sequence[int]) -> tuple[int, ...]:
    return tuple(d ^ 1 for d in reversed(darts))


def tighten(darts: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for d in darts:
        if stack and stack[-1] == d ^ 1:
            stack.pop()
        else:
            stack.append(d)
    return tuple(stack)


def cyclic_tighten(darts: Iterable[int]) -> tuple[int, ...]:
    word = tighten(darts)
    i, j = 0, len(word) - 1
    while i < j and word[j] == word[i] ^ 1:
        i += 1
        j -= 1
    return word[i : j + 1]


@dataclass(frozen=True)
class GraphMap:
    domain: Graph
    codomain: Graph
    vertex_map: tuple[int, ...]
    edge_images: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "vertex_map", tuple(self.vertex_map))
        object.__setattr__(self, "edge_images", tuple(tuple(p) for p in self.edge_images))
        dom, cod = self.domain, self.codomain
        if len(self.vertex_map) != dom.n_vertices:
            raise GraphError("vertex map has wrong length")
        if any(not 0 <= w < cod.n_vertices for w in self.vertex_map):
            raise GraphError("vertex map leaves the codomain")
        if len(self.edge_images) != dom.n_edges:
            raise GraphError("edge image list has wrong length")
        for e, path in enumerate(self.edge_images):
            name = dom.edge_name(e)
            if not path:
                raise GraphError(f"edge {name} has an empty image")
            if not cod.is_path(path):
                raise GraphError(f"image of {name} is not an edge path")
            if tighten(path) != path:
                raise GraphError(f"image of {name} is not tight")
            u, v = dom.edges[e]
            if cod.origin(path[0]) != self.vertex_map[u] or cod.terminus(path[-1]) != self.vertex_map[v]:
                raise GraphError(f"image of {name} does not match its endpoint images")

    def image(self, d: int) -> tuple[int, ...]:
        path = self.edge_images[d >> 1]
        return path if not d & 1 else reverse_path(path)

    def is_endomorphism(self) -> bool:
        return self.domain == self.codomain


@dataclass(frozen=True)
class ImmersionWitness:
    """Either ``immersion`` or a vertex with two darts whose images start alike."""

    immersion: bool
    vertex: int | None = None
    darts: tuple[int, int] | None = None

    def recheck(self, f: GraphMap) -> bool:
        if self.immersion:
            return check_immersion(f).immersion
        d1, d2 = self.darts
        g = f.domain
        return (
            d1 != d2
            and g.origin(d1) == self.vertex == g.origin(d2)
            and f.image(d1)[0] == f.image(d2)[0]
        )


def check_immersion(f: GraphMap) -> ImmersionWitness:
    g = f.domain
    for v in g.vertices():
        seen: dict[int, int] = {}
        for d in g.star(v):
            first = f.image(d)[0]
            if first in seen:
                return ImmersionWitness(False, v, (seen[first], d))
            seen[first] = d
    return ImmersionWitness(True)


def require_immersion(f: GraphMap) -> None:
    if not f.is_endomorphism():
        raise GraphError("expected a self-map")
    w = check_immersion(f)
    if not w.immersion:
        g = f.domain
        a, b = w.darts
        raise GraphError(
            f"not an immersion: darts {g.dart_name(a)}, {g.dart_name(b)} collide at {g.vertex_name(w.vertex)}"
        )


def identity_map(g: Graph) -> GraphMap:
    return GraphMap(g, g, tuple(g.vertices()), tuple((2 * e,) for e in range(g.n_edges)))


def map_path(f: GraphMap, p: EdgePath) -> EdgePath:
    out: list[int] = []
    for d in p.darts:
        out.extend(f.image(d))
    return EdgePath(tighten(out), f.vertex_map[p.start])


def map_cyclic(f: GraphMap, c: CyclicPath) -> CyclicPath:
    out: list[int] = []
    for d in c.darts:
        out.extend(f.image(d))
    word = cyclic_tighten(out)
    if not word:
        raise GraphError("image loop is null-homotopic")
    return CyclicPath(word)


def compose(g: GraphMap, f: GraphMap) -> GraphMap:
    """``g`` after ``f``."""
    if f.codomain != g.domain:
        raise GraphError("maps are not composable")
    images = []
    for e in range(f.domain.n_edges):
        out: list[int] = []
        for d in f.edge_images[e]:
            out.extend(g.image(d))
        images.append(tighten(out))
    return GraphMap(f.domain, g.codomain, tuple(g.vertex_map[w] for w in f.vertex_map), tuple(images))


def iterate(f: GraphMap, k: int) -> GraphMap:
    if k < 1:
        raise ValueError("iterate needs k >= 1")
    out = f
    for _ in range(k - 1):
        out = compose(f, out)
    return out


def lambda_f(f: GraphMap) -> int:
    return max(len(p) for p in f.edge_images)


def iterated_lengths(f: GraphMap, n: int, saturate: int | None = None) -> list[list[int]]:
    """``rows[j][e] = l(f^j(e))`` for ``j = 0..n`` (immersion: no cancellation).

    With ``saturate`` the lengths are clipped at that value, which keeps the
    recursion cheap when only a threshold matters.
    """
    rows = [[1] * f.domain.n_edges]
    for _ in range(n):
        prev = rows[-1]
        row = [sum(prev[d >> 1] for d in path) for path in f.edge_images]
        if saturate is not None:
            row = [min(x, saturate) for x in row]
        rows.append(row)
    return rows


# -- exact points -------------------------------------------------------------


class Point(NamedTuple):
    """A vertex (``kind == 0``) or an interior point of an edge at an exact offset."""

    kind: int
    index: int
    offset: Fraction = Fraction(0)

    @classmethod
    def vertex(cls, v: int) -> Point:
        return cls(0, v, Fraction(0))

    def __str__(self):
        return f"v{self.index}" if self.kind == 0 else f"e{self.index}@{self.offset}"


def point_on_dart(g: Graph, d: int, t: Fraction) -> Point:
    """The point at parameter ``t`` along dart ``d`` (0 = origin, 1 = terminus)."""
    if t == 0:
        return Point.vertex(g.origin(d))
    if t == 1:
        return Point.vertex(g.terminus(d))
    return Point(1, d >> 1, t if not d & 1 else 1 - t)


def _push_along(f: GraphMap, d: int, t: Fraction) -> tuple[int, Fraction]:
    """Image of the parameter-``t`` point of ``d`` as (dart, parameter) with 0 <= t < 1."""
    path = f.image(d)
    s = t * len(path)
    j = floor(s)
    return path[j], s - j


def apply_point(f: GraphMap, p: Point, times: int = 1) -> Point:
    for _ in range(times):
        if p.kind == 0:
            p = Point.vertex(f.vertex_map[p.index])
            continue
        d, t = _push_along(f, 2 * p.index, p.offset)
        p = point_on_dart(f.codomain, d, t)
    return p


# -- subdivision -----------------------------------------------------------------


@dataclass(frozen=True)
class SubdividedSystem:
    """The depth-``depth`` subdivision of Gamma that makes f^depth cellular.

    Sub-edge ``s`` is the arc ``[spans[s][0], spans[s][1]]`` of original edge
    ``parent[s]`` read along its positive dart.  ``induced_map`` is f^depth as
    a map from the subdivided graph to Gamma; every dart goes to one dart.
    """

    original: GraphMap
    depth: int
    subdivided: Graph
    coordinates: tuple[Point, ...]
    parent: tuple[int, ...]
    spans: tuple[tuple[Fraction, Fraction], ...]
    induced_map: GraphMap

    def parent_dart(self, sd: int) -> int:
        return 2 * self.parent[sd >> 1] + (sd & 1)

    def collapse_loop(self, darts: Sequence[int]) -> CyclicPath:
        """Collapse a closed subdivided dart loop to the original graph."""
        n = len(darts)
        sub = self.subdivided
        starts = [j for j in range(n) if self.coordinates[sub.origin(darts[j])].kind == 0]
        if not starts:
            raise GraphError("loop avoids all original vertices")
        s = starts[0]
        out = []
        for j in range(n):
            sd = darts[(s + j) % n]
            if self.coordinates[sub.origin(sd)].kind == 0:
                out.append(self.parent_dart(sd))
        return CyclicPath(out)


def vertex_preimage_offsets(f: GraphMap, depth: int) -> list[list[Fraction]]:
    """Per edge, the sorted interior offsets whose f^depth-image is a vertex."""
    g = f.domain
    level = [[] for _ in range(g.n_edges)]
    for _ in range(depth):
        nxt = []
        for e in range(g.n_edges):
            path = f.edge_images[e]
            L = len(path)
            pts = set()
            for j, d in enumerate(path):
                if j:
                    pts.add(Fraction(j, L))
                inner = level[d >> 1]
                for u in inner:
                    pts.add((j + (u if not d & 1 else 1 - u)) / L)
            nxt.append(sorted(pts))
        level = nxt
    return level


def subdivide_for(f: GraphMap, i: int) -> SubdividedSystem:
    require_immersion(f)
    if i < 0:
        raise ValueError("depth must be nonnegative")
    g = f.domain
    offsets = vertex_preimage_offsets(f, i)
    coords: list[Point] = [Point.vertex(v) for v in g.vertices()]
    edges: list[tuple[int, int]] = []
    parent: list[int] = []
    spans: list[tuple[Fraction, Fraction]] = []
    for e in range(g.n_edges):
        u, w = g.edges[e]
        cuts = [Fraction(0)] + offsets[e] + [Fraction(1)]
        ids = [u]
        for t in offsets[e]:
            ids.append(len(coords))
            coords.append(Point(1, e, t))
        ids.append(w)
        for a in range(len(cuts) - 1):
            edges.append((ids[a], ids[a + 1]))
            parent.append(e)
            spans.append((cuts[a], cuts[a + 1]))
    sub = Graph(len(coords), tuple(edges))
    vmap = []
    for p in coords:
        q = apply_point(f, p, i)
        if q.kind != 0:
            raise AssertionError("subdivision vertex does not map to a vertex")
        vmap.append(q.index)
    images = []
    for s in range(len(edges)):
        d, t = 2 * parent[s], (spans[s][0] + spans[s][1]) / 2
        for _ in range(i):
            d, t = _push_along(f, d, t)
        images.append((d,))
    induced = GraphMap(sub, g, tuple(vmap), tuple(images))
    return SubdividedSystem(f, i, sub, tuple(coords), tuple(parent), tuple(spans), induced)


# -- non-expanding edges and invariant forests --------------------------------------


def non_expanding_subgraph(f: GraphMap) -> SubgraphHandle:
    """Edges whose iterated images stay single edges.

    Checking j = 1..E suffices: an edge whose orbit stays single-edge for E
    steps has revisited some edge, so it sits on a cycle of single-edge images.
    """
    g = f.domain
    rows = iterated_lengths(f, g.n_edges, saturate=2)
    keep = [e for e in range(g.n_edges) if all(rows[j][e] == 1 for j in range(1, len(rows)))]
    return subgraph_from_edges(g, keep)


def periodic_part(f: GraphMap, z: SubgraphHandle) -> SubgraphHandle:
    """Edges of ``z`` lying on a cycle of the orbit map e -> edge of f(e)."""
    step = {e: f.edge_images[e][0] >> 1 for e in z.edges}
    on_cycle: set[int] = set()
    state: dict[int, int] = {}  # 1 = on current walk, 2 = finished
    for start in sorted(z.edges):
        if start in state:
            continue
        walk = []
        e = start
        while e in step and e not in state:
            state[e] = 1
            walk.append(e)
            e = step[e]
        if e in step and state.get(e) == 1:
            on_cycle.update(walk[walk.index(e):])
        for x in walk:
            state[x] = 2
    return subgraph_from_edges(f.domain, on_cycle)


def _orbit_closure(f: GraphMap, e: int) -> set[int]:
    seen = {e}
    stack = [e]
    while stack:
        x = stack.pop()
        for d in f.edge_images[x]:
            y = d >> 1
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def _is_forest(g: Graph, edges: Iterable[int]) -> bool:
    root = list(g.vertices())

    def find(x):
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    for e in edges:
        a, b = find(g.edges[e][0]), find(g.edges[e][1])
        if a == b:
            return False
        root[a] = b
    return True


def max_invariant_forest(f: GraphMap) -> SubgraphHandle:
    """Greedy maximal forest closed under f, scanning edges by ascending id.

    Rejections are permanent (a superset of a cyclic edge set stays cyclic),
    so one pass reaches a maximal forest.
    """
    g = f.domain
    forest: set[int] = set()
    for e in range(g.n_edges):
        if e in forest:
            continue
        cand = forest | _orbit_closure(f, e)
        if _is_forest(g, cand):
            forest = cand
    return subgraph_from_edges(g, forest)


@dataclass(frozen=True)
class Collapse:
    """Quotient of an invariant forest: the induced map and the id bookkeeping."""

    map: GraphMap
    vertex_class: tuple[int, ...]
    edge_index: dict[int, int]


def collapse_forest(f: GraphMap, forest: SubgraphHandle | Iterable[int]) -> Collapse:
    g = f.domain
    fedges = set(forest.edges if isinstance(forest, SubgraphHandle) else forest)
    if not _is_forest(g, fedges):
        raise GraphError("subgraph is not a forest")
    for e in fedges:
        if any((d >> 1) not in fedges for d in f.edge_images[e]):
            raise GraphError("forest is not f-invariant")
    root = list(g.vertices())

    def find(x):
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    for e in fedges:
        root[find(g.edges[e][0])] = find(g.edges[e][1])
    reps = sorted({find(v) for v in g.vertices()})
    cls_of = {r: i for i, r in enumerate(reps)}
    vclass = tuple(cls_of[find(v)] for v in g.vertices())
    kept = [e for e in range(g.n_edges) if e not in fedges]
    eidx = {e: i for i, e in enumerate(kept)}
    names = tuple(g.edge_name(e) for e in kept) if g.edge_names else None
    quotient = Graph(len(reps), tuple((vclass[g.edges[e][0]], vclass[g.edges[e][1]]) for e in kept), None, names)
    vmap = [0] * len(reps)
    for v in g.vertices():
        vmap[vclass[v]] = vclass[f.vertex_map[v]]
    images = []
    for e in kept:
        path = tighten(2 * eidx[d >> 1] + (d & 1) for d in f.edge_images[e] if (d >> 1) not in fedges)
        if not path:
            raise GraphError(f"edge {g.edge_name(e)} collapses to a point")
        images.append(path)
    return Collapse(GraphMap(quotient, quotient, tuple(vmap), tuple(images)), vclass, eidx)


@dataclass(frozen=True)
class ExpansionCertificate:
    """Evidence that f is (2, n)-hyperbolic, with n = k * n_prime.

    After collapsing ``forest`` every edge has an f'^n_prime image of length
    at least 2, and 2^k - 1 exceeds the number of forest edges.
    """

    n: int
    n_prime: int
    k: int
    forest: tuple[int, ...]
    collapsed: GraphMap


def default_expansion_cap(f: GraphMap) -> int:
    return 4 * max(1, f.domain.n_edges) * max(1, f.domain.n_vertices)


def expansion_exponent(f: GraphMap, cap: int | None = None) -> ExpansionCertificate | None:
    require_immersion(f)
    cap = default_expansion_cap(f) if cap is None else cap
    forest = max_invariant_forest(f)
    collapsed = collapse_forest(f, forest).map
    if collapsed.domain.n_edges == 0:
        return None
    rows = iterated_lengths(collapsed, cap, saturate=2)
    n_prime = next((j for j in range(1, cap + 1) if min(rows[j]) >= 2), None)
    if n_prime is None:
        return None
    k = 1
    while 2**k - 1 <= len(forest.edges):
        k += 1
    return ExpansionCertificate(k * n_prime, n_prime, k, tuple(sorted(forest.edges)), collapsed)


def check_expansion(f: GraphMap, cert: ExpansionCertificate) -> bool:
    """Recheck an expansion certificate from scratch."""
    try:
        collapsed = collapse_forest(f, cert.forest).map
    except (GraphError, IndexError):
        return False
    if collapsed != cert.collapsed or collapsed.domain.n_edges == 0:
        return False
    if cert.n_prime < 1 or cert.k < 1 or cert.n != cert.k * cert.n_prime:
        return False
    if 2**cert.k - 1 <= len(cert.forest):
        return False
    row = iterated_lengths(collapsed, cert.n_prime)[-1]
    return min(row) >= 2
