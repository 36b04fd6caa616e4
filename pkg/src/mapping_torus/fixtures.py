"""Built-in example maps and a seeded generator of random rose immersions."""

from __future__ import annotations

import random

from .graph_core import Graph
from .graph_map import GraphMap, check_immersion
from .words import Endomorphism, free_reduce, rose_map


def _endo(names: str, *images: str) -> Endomorphism:
    """``_endo("ab", "a b", "b a")``; a trailing ``'`` marks an inverse."""
    idx = {n: i + 1 for i, n in enumerate(names)}
    words = []
    for img in images:
        w = []
        for tok in img.split():
            w.append(-idx[tok[:-1]] if tok.endswith("'") else idx[tok])
        words.append(tuple(w))
    return Endomorphism(len(names), tuple(words), tuple(names))


def psi(d: int) -> Endomorphism:
    """c -> c^d on the circle."""
    if d < 1:
        raise ValueError("psi:d needs d >= 1")
    return _endo("c", " ".join(["c"] * d))


SAPIR = _endo("ab", "a b", "b a")
PHI2 = _endo("ab", "b a'", "a a a b' a b' a a")
PHI3 = _endo("abc", "b", "a c a'", "a b' a c' a' b a")
PHI4 = _endo("abcd", "b", "a c", "d a'", "a b' a d' b' a c a")
IDENTITY = _endo("ab", "a", "b")
# a fixed petal; the rose map is not an immersion (a' and b' both start with a')
FIXED_PETAL = _endo("ab", "a", "b a")
# immersion variant with the same fixed petal
FIXED_LOOP = _endo("ab", "a", "b a b")


def forest_map() -> GraphMap:
    """Two loops x, y joined by an edge e that f fixes; e is an invariant forest."""
    g = Graph(2, ((0, 1), (0, 0), (1, 1)), ("u", "w"), ("e", "x", "y"))
    e, x, y = 0, 2, 4
    return GraphMap(g, g, (0, 1), ((e,), (x, e, y, e ^ 1, x), (y, e ^ 1, x, e, y)))


# expected rose-map derivative collisions (vertex name, dart names)
PHI_VIOLATIONS = {
    "phi2": ("v0", ("a'", "b")),
    "phi3": ("v0", ("b", "b'")),
    "phi4": ("v0", ("b", "c'")),
}

NAMES = ("bs12", "psi:d", "sapir", "phi2", "phi3", "phi4", "identity", "fixed-petal", "fixed-loop", "forest")


def example(name: str) -> Endomorphism | GraphMap:
    table = {
        "bs12": lambda: psi(2),
        "sapir": lambda: SAPIR,
        "phi2": lambda: PHI2,
        "phi3": lambda: PHI3,
        "phi4": lambda: PHI4,
        "identity": lambda: IDENTITY,
        "fixed-petal": lambda: FIXED_PETAL,
        "fixed-loop": lambda: FIXED_LOOP,
        "forest": forest_map,
    }
    if name.startswith("psi:"):
        try:
            return psi(int(name[4:]))
        except ValueError:
            raise KeyError(name) from None
    if name not in table:
        raise KeyError(name)
    return table[name]()


def as_map(x: Endomorphism | GraphMap) -> GraphMap:
    return rose_map(x) if isinstance(x, Endomorphism) else x


def _random_word(rng: random.Random, rank: int, length: int, first: int, last: int) -> tuple[int, ...] | None:
    if length == 1:
        return (first,) if first == last else None
    letters = [s * (i + 1) for i in range(rank) for s in (1, -1)]
    for _ in range(50):
        w = [first] + [rng.choice(letters) for _ in range(length - 2)] + [last]
        if free_reduce(w) == tuple(w):
            return tuple(w)
    return None


def random_rose_immersion(rng: random.Random, rank: int, max_len: int) -> Endomorphism:
    """A random endomorphism whose rose map is an immersion.

    First letters of the images and inverses of their last letters are drawn
    as a random permutation of all letters, which is exactly the immersion
    condition at the single vertex; the middles are filled at random.
    """
    letters = [s * (i + 1) for i in range(rank) for s in (1, -1)]
    while True:
        perm = letters[:]
        rng.shuffle(perm)
        images = []
        for i in range(rank):
            first, last = perm[2 * i], -perm[2 * i + 1]
            w = _random_word(rng, rank, rng.randint(1, max_len), first, last)
            if w is None:
                break
            images.append(w)
        else:
            e = Endomorphism(rank, tuple(images))
            if check_immersion(rose_map(e)).immersion:
                return e


def random_corpus(seed: int, count: int, max_rank: int, max_len: int, min_rank: int = 1) -> list[Endomorphism]:
    rng = random.Random(seed)
    return [random_rose_immersion(rng, rng.randint(min_rank, max_rank), max_len) for _ in range(count)]
