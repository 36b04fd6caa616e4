"""Decide word-hyperbolicity of the mapping torus of a graph immersion.

The procedure either finds an invariant loop (c, k, d), meaning f^k(c) is
freely homotopic to c^d, or certifies hyperbolicity with an expansion
exponent n and a depth L at which the new pullback core vanishes.  Both
kinds of evidence are rechecked by :func:`verify`, which shares nothing with
:func:`decide` beyond the basic graph-map primitives.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .graph_core import CyclicPath, GraphError, SubgraphHandle, core_subgraph
from .graph_map import (
    ExpansionCertificate,
    GraphMap,
    check_expansion,
    check_immersion,
    expansion_exponent,
    lambda_f,
    map_cyclic,
    non_expanding_subgraph,
    periodic_part,
    require_immersion,
)
from .pullback import HatChain, hat_gamma, loop_pair, minimal_root, subloop_count

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class InvariantLoopCertificate:
    c: CyclicPath
    k: int
    d: int


@dataclass(frozen=True)
class FlareConstants:
    """Constants making annuli of length 2m flare; report only.

    ``H(rho) = h_coefficient * rho`` exactly.
    """

    lambda_f: int
    k: int
    r: int
    m: int
    h_coefficient: int

    def H(self, rho) -> Fraction:
        return self.h_coefficient * Fraction(rho)


@dataclass(frozen=True)
class HyperbolicityCertificate:
    expansion: ExpansionCertificate
    stabilization_depth: int
    flare: FlareConstants


@dataclass(frozen=True)
class Hyperbolic:
    certificate: HyperbolicityCertificate


@dataclass(frozen=True)
class NotHyperbolic:
    certificate: InvariantLoopCertificate


@dataclass(frozen=True)
class Inconclusive:
    reason: str
    depth_reached: int = 0
    details: dict = field(default_factory=dict)


Verdict = Hyperbolic | NotHyperbolic | Inconclusive


@dataclass(frozen=True)
class Budgets:
    """Resource limits for :func:`decide`; ``None`` picks a derived default."""

    max_depth: int = 8
    k_budget: int | None = None
    d_cap: int | None = None
    expansion_cap: int | None = None
    max_loop_length: int = 200_000


def _rank(f: GraphMap) -> int:
    return f.domain.rank()


def rank_bound(f: GraphMap) -> int:
    """M = 2(rank - 1)^2, past which new cores are disjoint circles or empty."""
    return 2 * (_rank(f) - 1) ** 2


def _find_cycle(sub: SubgraphHandle) -> list[int]:
    """Darts of an embedded cycle in a nonempty core subgraph."""
    g = sub.parent
    start = min(sub.vertices)
    # walk without backtracking until a vertex repeats; the core has no leaves
    path, seen = [], {start: 0}
    v, back = start, None
    while True:
        d = next(d for d in g.star(v) if (d >> 1) in sub.edges and d != back)
        path.append(d)
        v, back = g.terminus(d), d ^ 1
        if v in seen:
            return path[seen[v]:]
        seen[v] = len(path)


def detect_degree_one(f: GraphMap) -> InvariantLoopCertificate | None:
    """Degree-1 invariant loop from the periodic non-expanding edges, if any.

    A degree-1 invariant loop keeps its length under every iterate, so all of
    its edges are non-expanding and periodic; conversely f permutes the
    finitely many tight loops of a given length inside that periodic part.
    """
    z = non_expanding_subgraph(f)
    periodic = periodic_part(f, z)
    core = core_subgraph(periodic)
    if core.is_empty():
        return None
    c = CyclicPath(_find_cycle(core))
    # f permutes the edges of the periodic part, so c returns within twice the
    # order of that permutation (the factor 2 allows for flipped edges)
    step = {e: f.edge_images[e][0] >> 1 for e in periodic.edges}
    order = 1
    for e in step:
        x, length = step[e], 1
        while x != e:
            x, length = step[x], length + 1
        order = lcm(order, length)
    u = c
    for k in range(1, 2 * order + 1):
        u = map_cyclic(f, u)
        if u == c:
            return InvariantLoopCertificate(c, k, 1)
    raise AssertionError("periodic loop failed to return")


def certify_invariant_loop(
    f: GraphMap,
    c: CyclicPath,
    k_budget: int,
    d_cap: int | None = None,
    max_loop_length: int = 200_000,
) -> InvariantLoopCertificate | None:
    u = c
    n = len(c)
    for m in range(1, k_budget + 1):
        u = map_cyclic(f, u)
        if d_cap is not None and len(u) > d_cap * n:
            return None
        if len(u) % n == 0 and u == c.power(len(u) // n):
            return InvariantLoopCertificate(c, m, len(u) // n)
        if len(u) > max_loop_length:
            return None
    return None


def stabilization_bound(f: GraphMap, chain: HatChain | None = None) -> int:
    """A depth past which a nonempty new core forces an invariant loop of degree >= 2.

    Ingredients: M = 2(rank-1)^2; C circles in the depth-M new core (depth 1
    when M = 0); E edges of Gamma; N* the largest subloop count of the
    minimal roots of the projections; l* their largest length.

    Counting argument.  Follow loops gamma_i in the new core at depths
    i > M down to depth M.  After C*E of them, pigeonhole gives two that
    land in the same circle C_0 = (c-, c+) and share an expanding edge e.
    The image of e wraps c = root(c+) once every at most l* further
    iterates, so after E*(N*+1)*l* more depths it covers c^(N*+1); N*+1
    powers of c leave at most N* distinct closing subloops, so two coincide
    and f^m(c) ~ c^d follows with m at most the remaining span.  The slack
    terms (+2 per circle-edge pair and a final +E) absorb the rounding of
    the subsequence steps.  The result is an upper bound for this argument
    only; callers use it as a loop cap and never as a verdict.
    """
    chain = chain or HatChain(f)
    M = rank_bound(f)
    comps = chain.components(max(M, 1))
    if not comps:
        return M
    pairs = [loop_pair(c) for c in comps]
    roots = [minimal_root(x)[0] for p in pairs for x in (p.c_minus, p.c_plus)]
    C = len(comps)
    E = f.domain.n_edges
    n_star = max(subloop_count(f.domain, r) for r in roots)
    l_star = max(len(x) for p in pairs for x in (p.c_minus, p.c_plus))
    return M + C * E * (E * (n_star + 1) * l_star + 2) + E


def flare_constants(n: int, L: int, lam: int) -> FlareConstants:
    if lam < 2:
        raise ValueError("lambda_f must be at least 2")
    if n < 1 or L < 1:
        raise ValueError("n and L must be positive")
    k = 1
    while 2**k <= 2:  # expansion factor 2 raised to k must exceed 2
        k += 1
    r = 1
    # 2^r (2 / lam^(kn))^L >= 8  <=>  2^(r+L) >= 8 lam^(knL)
    while 2 ** (r + L) < 8 * lam ** (k * n * L):
        r += 1
    m = (2 * L + r) * k * n
    # (lam^(2m) - 1) / (lam - 1) is an integer
    h = 4 * ((lam ** (2 * m) - 1) // (lam - 1)) * 2**m
    return FlareConstants(lam, k, r, m, h)


def decide(f: GraphMap, budgets: Budgets | None = None) -> Verdict:
    budgets = budgets or Budgets()
    require_immersion(f)

    cert = detect_degree_one(f)
    if cert is not None:
        return NotHyperbolic(cert)

    expansion = expansion_exponent(f, budgets.expansion_cap)
    if expansion is None:
        return Inconclusive("expansion search exhausted its cap")

    chain = HatChain(f)
    M = rank_bound(f)
    bound = None
    tried: set[CyclicPath] = set()
    depth = 0
    for i in range(1, budgets.max_depth + 1):
        if bound is not None and i > bound:
            break
        depth = i
        comps = chain.components(i)
        log.debug("depth %d: %d new-core components", i, len(comps))
        if not comps:
            L = i
            return Hyperbolic(HyperbolicityCertificate(expansion, L, flare_constants(expansion.n, L, lambda_f(f))))
        if i < max(M, 1):
            continue
        if bound is None:
            bound = stabilization_bound(f, chain)
        k_budget = budgets.k_budget if budgets.k_budget is not None else bound
        for comp in comps:
            pair = loop_pair(comp)
            for loop in (pair.c_minus, pair.c_plus):
                root, _ = minimal_root(loop)
                if root in tried:
                    continue
                tried.add(root)
                found = certify_invariant_loop(f, root, k_budget, budgets.d_cap, budgets.max_loop_length)
                if found is not None:
                    return NotHyperbolic(found)
    return Inconclusive(
        "depth budget exhausted with nonempty new core",
        depth,
        {"stabilization_bound": bound, "max_depth": budgets.max_depth},
    )


# -- independent checking ------------------------------------------------------


def _is_primitive(c: CyclicPath) -> bool:
    n = len(c.darts)
    return all(c.darts[p:] + c.darts[:p] != c.darts for p in range(1, n) if n % p == 0)


def verify_invariant_loop(f: GraphMap, cert: InvariantLoopCertificate) -> bool:
    """Check f^k(c) = c^d with c tight and primitive and k the least such iterate."""
    g = f.domain
    c, k, d = cert.c, cert.k, cert.d
    if not (isinstance(k, int) and isinstance(d, int) and k >= 1 and d >= 1):
        return False
    if not c.darts or not c.is_closed_in(g) or not c.is_tight() or not _is_primitive(c):
        return False
    u = c
    for j in range(1, k + 1):
        u = map_cyclic(f, u)
        n = len(u) // len(c)
        if len(u) % len(c) == 0 and u == c.power(n):
            return j == k and n == d
    return False


def verify_hyperbolic(f: GraphMap, cert: HyperbolicityCertificate) -> bool:
    """Recheck the expansion certificate and the vanishing depth on the full pullback.

    L is checked to be the first vanishing depth; the flare constants are
    recomputed from (n, L, lambda_f).
    """
    L = cert.stabilization_depth
    if not isinstance(L, int) or L < 1:
        return False
    if not check_expansion(f, cert.expansion):
        return False
    if hat_gamma(f, L):
        return False
    if L > 1 and not hat_gamma(f, L - 1):
        return False
    try:
        return flare_constants(cert.expansion.n, L, lambda_f(f)) == cert.flare
    except ValueError:
        return False


def verify(f: GraphMap, verdict: Verdict) -> bool:
    try:
        if not check_immersion(f).immersion:
            return False
        if isinstance(verdict, NotHyperbolic):
            return verify_invariant_loop(f, verdict.certificate)
        if isinstance(verdict, Hyperbolic):
            return verify_hyperbolic(f, verdict.certificate)
    except (GraphError, IndexError, TypeError, AttributeError):
        return False
    return False
