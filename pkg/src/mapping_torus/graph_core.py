"""Finite graphs stored as darts with a reversal involution.

Edge ``e`` owns the two darts ``2*e`` (positive orientation) and ``2*e + 1``
(its reverse), so ``reversal(d) == d ^ 1`` and the involution is fixed-point
free by construction.  Vertices are ``0 .. n_vertices - 1``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class GraphError(ValueError):
    pass


def reverse_dart(d: int) -> int:
    return d ^ 1


def edge_of(d: int) -> int:
    return d >> 1


def is_positive(d: int) -> bool:
    return not d & 1


@dataclass(frozen=True)
class Graph:
    """A finite graph.  ``edges[e] = (origin, terminus)`` of the positive dart."""

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    vertex_names: tuple[str, ...] | None = None
    edge_names: tuple[str, ...] | None = None
    _star: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        for e, (u, v) in enumerate(self.edges):
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise GraphError(f"edge {e} has an endpoint outside the vertex set")
        if self.vertex_names is not None and len(self.vertex_names) != self.n_vertices:
            raise GraphError("vertex_names length mismatch")
        if self.edge_names is not None and len(self.edge_names) != len(self.edges):
            raise GraphError("edge_names length mismatch")
        star: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for d in range(2 * len(self.edges)):
            star[self.origin(d)].append(d)
        object.__setattr__(self, "_star", tuple(tuple(s) for s in star))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_darts(self) -> int:
        return 2 * len(self.edges)

    def vertices(self) -> range:
        return range(self.n_vertices)

    def darts(self) -> range:
        return range(self.n_darts)

    def origin(self, d: int) -> int:
        return self.edges[d >> 1][d & 1]

    def terminus(self, d: int) -> int:
        return self.edges[d >> 1][1 - (d & 1)]

    def star(self, v: int) -> tuple[int, ...]:
        """Darts with origin ``v``, ascending."""
        return self._star[v]

    def valence(self, v: int) -> int:
        return len(self._star[v])

    def rank(self) -> int:
        """First Betti number (sums over components)."""
        return self.n_edges - self.n_vertices + len(components(self))

    def vertex_name(self, v: int) -> str:
        return self.vertex_names[v] if self.vertex_names else f"v{v}"

    def edge_name(self, e: int) -> str:
        return self.edge_names[e] if self.edge_names else f"e{e}"

    def dart_name(self, d: int) -> str:
        name = self.edge_name(d >> 1)
        return name if is_positive(d) else name + "'"

    def dart_by_name(self, name: str) -> int:
        base, rev = (name[:-1], 1) if name.endswith("'") else (name, 0)
        names = [self.edge_name(e) for e in range(self.n_edges)]
        try:
            return 2 * names.index(base) + rev
        except ValueError:
            raise GraphError(f"unknown edge {base!r}") from None

    def is_path(self, darts: Sequence[int]) -> bool:
        if any(not 0 <= d < self.n_darts for d in darts):
            return False
        return all(self.terminus(a) == self.origin(b) for a, b in zip(darts, darts[1:]))


@dataclass(frozen=True)
class SubgraphHandle:
    """A subgraph of ``parent``: a vertex set and a reversal-closed edge set."""

    parent: Graph
    vertices: frozenset[int]
    edges: frozenset[int]

    def __post_init__(self):
        for e in self.edges:
            u, v = self.parent.edges[e]
            if u not in self.vertices or v not in self.vertices:
                raise GraphError(f"edge {e} kept without its endpoints")

    @property
    def darts(self) -> frozenset[int]:
        return frozenset(d for e in self.edges for d in (2 * e, 2 * e + 1))

    def is_empty(self) -> bool:
        return not self.vertices

    def valence(self, v: int) -> int:
        return sum(1 for d in self.parent.star(v) if (d >> 1) in self.edges)

    def to_graph(self) -> tuple[Graph, dict[int, int], dict[int, int]]:
        """Reindex as a standalone graph; returns (graph, vertex map, edge map)."""
        vmap = {v: i for i, v in enumerate(sorted(self.vertices))}
        emap = {e: i for i, e in enumerate(sorted(self.edges))}
        p = self.parent
        g = Graph(
            len(vmap),
            tuple((vmap[p.edges[e][0]], vmap[p.edges[e][1]]) for e in sorted(self.edges)),
            tuple(p.vertex_name(v) for v in sorted(self.vertices)) if p.vertex_names else None,
            tuple(p.edge_name(e) for e in sorted(self.edges)) if p.edge_names else None,
        )
        return g, vmap, emap


def whole(g: Graph) -> SubgraphHandle:
    return SubgraphHandle(g, frozenset(g.vertices()), frozenset(range(g.n_edges)))


def subgraph_from_edges(g: Graph, edges: Iterable[int]) -> SubgraphHandle:
    """The subgraph spanned by ``edges`` (vertices are their endpoints)."""
    edges = frozenset(edges)
    verts = frozenset(v for e in edges for v in g.edges[e])
    return SubgraphHandle(g, verts, edges)


def core_subgraph(g: Graph | SubgraphHandle) -> SubgraphHandle:
    """Maximal subgraph without vertices of valence <= 1.

    Isolated vertices are pruned too, so contractible components vanish.
    """
    h = g if isinstance(g, SubgraphHandle) else whole(g)
    parent = h.parent
    verts = set(h.vertices)
    edges = set(h.edges)
    val = {v: 0 for v in verts}
    for e in edges:
        u, w = parent.edges[e]
        val[u] += 1
        val[w] += 1
    queue = deque(v for v in verts if val[v] <= 1)
    while queue:
        v = queue.popleft()
        if v not in verts:
            continue
        verts.discard(v)
        for d in parent.star(v):
            e = d >> 1
            if e in edges:
                edges.discard(e)
                other = parent.terminus(d)
                if other in verts:
                    val[other] -= 1
                    if val[other] == 1:
                        queue.append(other)
    return SubgraphHandle(parent, frozenset(verts), frozenset(edges))


def components(g: Graph | SubgraphHandle) -> list[SubgraphHandle]:
    """Connected components, ordered by least vertex id."""
    h = g if isinstance(g, SubgraphHandle) else whole(g)
    parent = h.parent
    seen: set[int] = set()
    out = []
    for start in sorted(h.vertices):
        if start in seen:
            continue
        seen.add(start)
        cv, ce = {start}, set()
        stack = [start]
        while stack:
            v = stack.pop()
            for d in parent.star(v):
                e = d >> 1
                if e not in h.edges:
                    continue
                ce.add(e)
                w = parent.terminus(d)
                if w not in seen:
                    seen.add(w)
                    cv.add(w)
                    stack.append(w)
        out.append(SubgraphHandle(parent, frozenset(cv), frozenset(ce)))
    return out


def neg_euler(g: Graph | SubgraphHandle) -> int:
    """Sum of max(0, rank - 1) over the components of the core."""
    total = 0
    for c in components(core_subgraph(g)):
        total += max(0, len(c.edges) - len(c.vertices))
    return total


def is_circle(c: SubgraphHandle) -> bool:
    return bool(c.vertices) and len(components(c)) == 1 and all(
        c.valence(v) == 2 for v in c.vertices
    )


def _least_rotation(seq: Sequence[int]) -> tuple[int, ...]:
    n = len(seq)
    if n == 0:
        return ()
    doubled = list(seq) * 2
    # Booth's algorithm
    f = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        sj = doubled[j]
        i = f[j - k - 1]
        while i != -1 and sj != doubled[k + i + 1]:
            if sj < doubled[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != doubled[k + i + 1]:
            if sj < doubled[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return tuple(doubled[k : k + n])


@dataclass(frozen=True)
class EdgePath:
    """A dart sequence; ``start`` pins the basepoint of the empty path."""

    darts: tuple[int, ...]
    start: int

    def __len__(self):
        return len(self.darts)


@dataclass(frozen=True, init=False)
class CyclicPath:
    """A closed dart sequence up to rotation, stored in least rotation."""

    darts: tuple[int, ...]

    def __init__(self, darts: Iterable[int]):
        darts = tuple(darts)
        if not darts:
            raise GraphError("cyclic path must be nonempty")
        object.__setattr__(self, "darts", _least_rotation(darts))

    def __len__(self):
        return len(self.darts)

    def power(self, d: int) -> CyclicPath:
        return CyclicPath(self.darts * d)

    def is_tight(self) -> bool:
        n = len(self.darts)
        return all(self.darts[(j + 1) % n] != self.darts[j] ^ 1 for j in range(n))

    def is_closed_in(self, g: Graph) -> bool:
        return g.is_path(self.darts) and g.terminus(self.darts[-1]) == g.origin(self.darts[0])


def loop_component_word(c: SubgraphHandle) -> CyclicPath:
    """Traverse a circle component once, starting from its least dart."""
    if not is_circle(c):
        raise GraphError("component is not a circle")
    parent = c.parent
    first = min(c.darts)
    seq = [first]
    while True:
        here = parent.terminus(seq[-1])
        back = seq[-1] ^ 1
        d = next(d for d in parent.star(here) if (d >> 1) in c.edges and d != back)
        if d == first:
            break
        seq.append(d)
    # every dart occurs once, so the least rotation starts at `first`
    return CyclicPath(seq)
