"""Fibered products of f^i with itself and their new cores.

Pullback darts are labelled by pairs of arcs of Gamma.  An :class:`Arc` is a
sub-segment ``[a, b]`` of an original dart, with offsets measured along that
dart, so every label is exact and independent of how the graph was built.

Two routes compute the new core at depth ``i``:

* :func:`hat_gamma` builds the whole depth-``i`` pullback on the subdivision,
  splits it into components coming from depth ``i - 1`` and new ones, and
  takes the core of the new part.
* :func:`hat_gamma_chain` uses that (x, y) is new at depth ``i`` exactly when
  (f x, f y) is new at depth ``i - 1``; since f x f is an immersion it carries
  the core into the core, so the new core at depth ``i`` is the core of the
  preimage of the new core at depth ``i - 1``.  This stays small when the new
  cores are, whereas the full pullback grows like the square of the image
  lengths.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .graph_core import (
    CyclicPath,
    Graph,
    GraphError,
    SubgraphHandle,
    components,
    core_subgraph,
    is_circle,
    loop_component_word,
)
from .graph_map import (
    GraphMap,
    Point,
    SubdividedSystem,
    apply_point,
    point_on_dart,
    require_immersion,
    subdivide_for,
    vertex_preimage_offsets,
)


class Arc(NamedTuple):
    dart: int
    a: Fraction
    b: Fraction

    def reverse(self) -> Arc:
        return Arc(self.dart ^ 1, 1 - self.b, 1 - self.a)

    def start(self, g: Graph) -> Point:
        return point_on_dart(g, self.dart, self.a)

    def end(self, g: Graph) -> Point:
        return point_on_dart(g, self.dart, self.b)

    def __str__(self):
        return f"{self.dart}[{self.a},{self.b}]"


def system_arc(sys: SubdividedSystem, sd: int) -> Arc:
    t0, t1 = sys.spans[sd >> 1]
    if sd & 1:
        return Arc(sys.parent_dart(sd), 1 - t1, 1 - t0)
    return Arc(sys.parent_dart(sd), t0, t1)


def _canonical(left: Arc, right: Arc) -> tuple[Arc, Arc]:
    return (left, right) if not left.dart & 1 else (left.reverse(), right.reverse())


@dataclass(frozen=True)
class PullbackGraph:
    """A (part of a) depth-``depth`` pullback with exact labels.

    ``edge_labels[e]`` is the arc pair under the positive dart ``2e``; the
    reversed dart carries the reversed arcs.
    """

    f: GraphMap
    depth: int
    graph: Graph
    vertex_labels: tuple[tuple[Point, Point], ...]
    edge_labels: tuple[tuple[Arc, Arc], ...]

    def dart_label(self, pd: int) -> tuple[Arc, Arc]:
        left, right = self.edge_labels[pd >> 1]
        return (left, right) if not pd & 1 else (left.reverse(), right.reverse())

    def restrict(self, sub: SubgraphHandle) -> PullbackGraph:
        g, vmap, emap = sub.to_graph()
        vlab = [None] * len(vmap)
        for v, i in vmap.items():
            vlab[i] = self.vertex_labels[v]
        elab = [None] * len(emap)
        for e, i in emap.items():
            elab[i] = self.edge_labels[e]
        return PullbackGraph(self.f, self.depth, g, tuple(vlab), tuple(elab))

    def edge_key_set(self) -> frozenset[tuple[Arc, Arc]]:
        return frozenset(self.edge_labels)


def _from_labels(f: GraphMap, depth: int, vlabels, elabels) -> PullbackGraph:
    """Assemble a graph from vertex point pairs and canonical arc-pair edges."""
    g = f.domain
    vids = {lab: i for i, lab in enumerate(vlabels)}
    edges = []
    for left, right in elabels:
        u = vids[(left.start(g), right.start(g))]
        w = vids[(left.end(g), right.end(g))]
        edges.append((u, w))
    return PullbackGraph(f, depth, Graph(len(vlabels), tuple(edges)), tuple(vlabels), tuple(elabels))


def pullback(f: GraphMap, i: int) -> PullbackGraph:
    """The pullback of f^i with f^i; depth 0 is the diagonal copy of Gamma."""
    sys = subdivide_for(f, i)
    sub = sys.subdivided
    ind = sys.induced_map
    by_vertex = defaultdict(list)
    for x in sub.vertices():
        by_vertex[ind.vertex_map[x]].append(x)
    vid: dict[tuple[int, int], int] = {}
    vlabels = []
    for v in sorted(by_vertex):
        xs = by_vertex[v]
        for x in xs:
            for y in xs:
                vid[(x, y)] = len(vlabels)
                vlabels.append((sys.coordinates[x], sys.coordinates[y]))
    by_image = defaultdict(list)
    for sd in sub.darts():
        by_image[ind.image(sd)[0]].append(sd)
    arcs = [system_arc(sys, sd) for sd in sub.darts()]
    elabels, edges = [], []
    for img in sorted(by_image):
        group = by_image[img]
        for d1 in group:
            if d1 & 1:
                continue
            o1, t1 = sub.origin(d1), sub.terminus(d1)
            for d2 in group:
                elabels.append((arcs[d1], arcs[d2]))
                edges.append((vid[(o1, sub.origin(d2))], vid[(t1, sub.terminus(d2))]))
    return PullbackGraph(f, i, Graph(len(vlabels), tuple(edges)), tuple(vlabels), tuple(elabels))


def classify_components(
    p: PullbackGraph, previous: PullbackGraph | None = None
) -> tuple[list[SubgraphHandle], list[SubgraphHandle]]:
    """Split the components of ``p`` into those from depth ``i - 1`` and new ones.

    Every vertex of a component is tested, which rechecks that old and new
    never share a component.
    """
    if p.depth < 1:
        raise GraphError("depth-0 pullback has no predecessor")
    if previous is not None and previous.depth != p.depth - 1:
        raise GraphError(f"depth mismatch: {previous.depth} then {p.depth}")
    # labels share Point objects, and hashing Fractions is slow, so memoize by
    # identity; the stored point keeps its id from being reused
    memo: dict[int, tuple[Point, Point]] = {}

    def image(x: Point) -> Point:
        hit = memo.get(id(x))
        if hit is None:
            hit = memo[id(x)] = (x, apply_point(p.f, x, p.depth - 1))
        return hit[1]

    old, new = [], []
    for comp in components(p.graph):
        flags = {image(x) == image(y) for x, y in (p.vertex_labels[v] for v in comp.vertices)}
        if len(flags) != 1:
            raise GraphError("component mixes old and new vertices")
        (old if flags.pop() else new).append(comp)
    return old, new


def _new_core(p: PullbackGraph) -> PullbackGraph:
    _, new = classify_components(p)
    verts = frozenset(v for c in new for v in c.vertices)
    edges = frozenset(e for c in new for e in c.edges)
    return p.restrict(core_subgraph(SubgraphHandle(p.graph, verts, edges)))


def new_core_components(p: PullbackGraph) -> list[PullbackGraph]:
    """Components of the core of the new part of ``p``."""
    core = _new_core(p)
    return [core.restrict(c) for c in components(core.graph)]


def hat_gamma(f: GraphMap, i: int) -> list[PullbackGraph]:
    """Components of the new core at depth ``i``, via the full pullback."""
    require_immersion(f)
    if i < 1:
        raise ValueError("depth must be >= 1")
    return new_core_components(pullback(f, i))


def _occurrences(f: GraphMap) -> dict[int, list[tuple[int, int, int]]]:
    occ = defaultdict(list)
    for e, path in enumerate(f.edge_images):
        for j, d in enumerate(path):
            occ[d].append((e, j, len(path)))
    return occ


def arc_preimages(f: GraphMap, arc: Arc, occ=None) -> list[Arc]:
    """All arcs mapped by f homeomorphically onto ``arc``, preserving direction."""
    occ = _occurrences(f) if occ is None else occ
    out = []
    for e, j, L in occ.get(arc.dart, ()):
        out.append(Arc(2 * e, (j + arc.a) / L, (j + arc.b) / L))
    for e, j, L in occ.get(arc.dart ^ 1, ()):
        out.append(Arc(2 * e, (j + 1 - arc.b) / L, (j + 1 - arc.a) / L).reverse())
    return out


def _preimage_graph(f: GraphMap, prev: PullbackGraph, occ) -> PullbackGraph:
    g = f.domain
    elabels = []
    for left, right in prev.edge_labels:
        rights = arc_preimages(f, right, occ)
        for l2 in arc_preimages(f, left, occ):
            for r2 in rights:
                elabels.append(_canonical(l2, r2))
    elabels.sort()
    vset = set()
    for left, right in elabels:
        vset.add((left.start(g), right.start(g)))
        vset.add((left.end(g), right.end(g)))
    draft = _from_labels(f, prev.depth + 1, sorted(vset), elabels)
    return draft.restrict(core_subgraph(draft.graph))


class HatChain:
    """Lazily computed new cores, depth by depth, via core preimages."""

    def __init__(self, f: GraphMap):
        require_immersion(f)
        self.f = f
        self._occ = _occurrences(f)
        self._cores: list[PullbackGraph] = []

    def core(self, i: int) -> PullbackGraph:
        if i < 1:
            raise ValueError("depth must be >= 1")
        while len(self._cores) < i:
            if not self._cores:
                self._cores.append(_new_core(pullback(self.f, 1)))
            else:
                self._cores.append(_preimage_graph(self.f, self._cores[-1], self._occ))
        return self._cores[i - 1]

    def components(self, i: int) -> list[PullbackGraph]:
        core = self.core(i)
        return [core.restrict(c) for c in components(core.graph)]


def hat_gamma_chain(f: GraphMap, i: int) -> list[PullbackGraph]:
    return HatChain(f).components(i)


# -- loops ---------------------------------------------------------------------


def collapse_arc_loop(g: Graph, arcs: Sequence[Arc]) -> CyclicPath:
    """Read a closed chain of arcs as a loop of original darts."""
    n = len(arcs)
    starts = [j for j in range(n) if arcs[j].a == 0]
    if not starts:
        raise GraphError("arc loop avoids every vertex")
    s = starts[0]
    return CyclicPath(arcs[(s + j) % n].dart for j in range(n) if arcs[(s + j) % n].a == 0)


@dataclass(frozen=True)
class LoopPair:
    component: PullbackGraph
    c_minus: CyclicPath
    c_plus: CyclicPath


def loop_pair(comp: PullbackGraph) -> LoopPair:
    handle = SubgraphHandle(comp.graph, frozenset(comp.graph.vertices()), frozenset(range(comp.graph.n_edges)))
    if not is_circle(handle):
        raise GraphError("new-core component is not a circle")
    word = loop_component_word(handle)
    labels = [comp.dart_label(pd) for pd in word.darts]
    g = comp.f.domain
    return LoopPair(comp, collapse_arc_loop(g, [l for l, _ in labels]), collapse_arc_loop(g, [r for _, r in labels]))


def loop_pairs(f: GraphMap, i: int, chain: HatChain | None = None) -> list[LoopPair]:
    comps = chain.components(i) if chain is not None else hat_gamma(f, i)
    return [loop_pair(c) for c in comps]


def minimal_root(c: CyclicPath) -> tuple[CyclicPath, int]:
    darts = c.darts
    n = len(darts)
    for p in range(1, n + 1):
        if n % p == 0 and darts[p:] + darts[:p] == darts:
            return CyclicPath(darts[:p]), n // p
    raise AssertionError("unreachable")


def subloop_count(g: Graph, c: CyclicPath) -> int:
    """Pairs (start, length) with length <= l(c) whose subpath of c^inf is closed."""
    darts = c.darts
    n = len(darts)
    count = 0
    for s in range(n):
        o = g.origin(darts[s])
        for length in range(1, n + 1):
            if g.terminus(darts[(s + length - 1) % n]) == o:
                count += 1
    return count


# -- structural checks used by the test-suite and the CLI -------------------------------


def old_part(p: PullbackGraph) -> PullbackGraph:
    old, _ = classify_components(p)
    verts = frozenset(v for c in old for v in c.vertices)
    edges = frozenset(e for c in old for e in c.edges)
    return p.restrict(SubgraphHandle(p.graph, verts, edges))


def _dart_table(p: PullbackGraph, keep) -> tuple[frozenset, dict]:
    """Smooth away vertices not satisfying ``keep`` and tabulate the darts."""
    g = p.graph
    table = {}
    kept = [v for v in g.vertices() if keep(p.vertex_labels[v])]
    for v in kept:
        for pd in g.star(v):
            left, right = p.dart_label(pd)
            cur = pd
            while not keep(p.vertex_labels[g.terminus(cur)]):
                w = g.terminus(cur)
                nxt = [d for d in g.star(w) if d != cur ^ 1]
                if len(nxt) != 1:
                    raise GraphError("smoothing hit a branch vertex")
                cur = nxt[0]
                l2, r2 = p.dart_label(cur)
                if l2.dart != left.dart or r2.dart != right.dart or l2.a != left.b or r2.a != right.b:
                    raise GraphError("smoothing crossed an arc boundary")
                left, right = Arc(left.dart, left.a, l2.b), Arc(right.dart, right.a, r2.b)
            table[(p.vertex_labels[v], left, right)] = p.vertex_labels[g.terminus(cur)]
    return frozenset(p.vertex_labels[v] for v in kept), table


def chain_embedding_holds(lower: PullbackGraph, upper: PullbackGraph) -> bool:
    """True when the old components of ``upper`` are a label-preserving copy of ``lower``."""
    if upper.depth != lower.depth + 1:
        raise GraphError("pullbacks are not consecutive")
    f = upper.f
    offsets = vertex_preimage_offsets(f, lower.depth)
    coarse = {Point(1, e, t) for e, ts in enumerate(offsets) for t in ts}

    def keep(label):
        return all(pt.kind == 0 or pt in coarse for pt in label)

    old = old_part(upper)
    vs_up, t_up = _dart_table(old, keep)
    vs_lo, t_lo = _dart_table(lower, lambda _: True)
    return vs_up == vs_lo and t_up == t_lo and len(old.vertex_labels) >= len(lower.vertex_labels)


def swap_is_automorphism(p: PullbackGraph) -> bool:
    g = p.f.domain
    index = {lab: e for e, lab in enumerate(p.edge_labels)}
    vset = set(p.vertex_labels)
    if any((y, x) not in vset for x, y in p.vertex_labels):
        return False
    for left, right in p.edge_labels:
        if _canonical(right, left) not in index:
            return False
        if (right.start(g), left.start(g)) not in vset:
            return False
    return True


def diagonal_matches(p: PullbackGraph) -> bool:
    """The diagonal of ``p`` is exactly the depth-``i`` subdivision of Gamma."""
    sys = subdivide_for(p.f, p.depth)
    want_v = {(c, c) for c in sys.coordinates}
    want_e = {(system_arc(sys, 2 * s),) * 2 for s in range(sys.subdivided.n_edges)}
    have_v = {lab for lab in p.vertex_labels if lab[0] == lab[1]}
    have_e = {lab for lab in p.edge_labels if lab[0] == lab[1]}
    return want_v == have_v and want_e == have_e
