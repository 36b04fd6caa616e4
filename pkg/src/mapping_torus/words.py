"""Free-group words and endomorphisms, plus a brute-force invariant-word oracle.

Letters are nonzero ints: generator ``i`` (0-based) is ``i + 1`` and its
inverse is ``-(i + 1)``.  On the rose, generator ``i`` is edge ``i`` so the
letter ``x`` corresponds to dart ``2*(|x|-1) + (x < 0)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .graph_core import CyclicPath, Graph
from .graph_map import GraphMap

Word = tuple[int, ...]

DEFAULT_NAMES = "abcdefghijklmnopqrstuvwxyz"


def free_reduce(word: Sequence[int]) -> Word:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(word: Sequence[int]) -> Word:
    w = free_reduce(word)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return w[i : j + 1]


def invert(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


def letter_to_dart(x: int) -> int:
    return 2 * (abs(x) - 1) + (x < 0)


def dart_to_letter(d: int) -> int:
    return -((d >> 1) + 1) if d & 1 else (d >> 1) + 1


@dataclass(frozen=True)
class Endomorphism:
    rank: int
    images: tuple[Word, ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(tuple(w) for w in self.images))
        if len(self.images) != self.rank:
            raise ValueError("need one image per generator")
        for i, w in enumerate(self.images):
            if not w:
                raise ValueError(f"image of generator {i} is empty")
            if free_reduce(w) != w:
                raise ValueError(f"image of generator {i} is not freely reduced")
            if any(not 1 <= abs(x) <= self.rank for x in w):
                raise ValueError(f"image of generator {i} uses an unknown letter")
        if self.names is not None and len(self.names) != self.rank:
            raise ValueError("need one name per generator")

    @property
    def generator_names(self) -> tuple[str, ...]:
        return self.names or tuple(DEFAULT_NAMES[i] for i in range(self.rank))

    def letter_image(self, x: int) -> Word:
        w = self.images[abs(x) - 1]
        return w if x > 0 else invert(w)

    def format_word(self, word: Sequence[int]) -> str:
        names = self.generator_names
        return " ".join(names[abs(x) - 1] + ("'" if x < 0 else "") for x in word)


def apply(e: Endomorphism, w: Sequence[int], k: int = 1) -> Word:
    out = free_reduce(w)
    for _ in range(k):
        buf: list[int] = []
        for x in out:
            buf.extend(e.letter_image(x))
        out = free_reduce(buf)
    return out


def _least_rotation(w: Word) -> Word:
    return min(w[i:] + w[:i] for i in range(len(w))) if w else w


def _encode(w: Word) -> str:
    # one character per letter, so substring search works on words
    return "".join(chr(0x4000 + x) for x in w)


def conjugate_eq(u: Sequence[int], v: Sequence[int]) -> bool:
    """Conjugacy in the free group: cyclic reductions agree up to rotation."""
    cu, cv = cyclic_reduce(u), cyclic_reduce(v)
    if len(cu) != len(cv):
        return False
    su = _encode(cu)
    return _encode(cv) in su + su


def rose(rank: int, names: Sequence[str] | None = None) -> Graph:
    return Graph(1, tuple((0, 0) for _ in range(rank)), ("v0",), tuple(names) if names else None)


def rose_map(e: Endomorphism) -> GraphMap:
    g = rose(e.rank, e.generator_names)
    return GraphMap(g, g, (0,), tuple(tuple(letter_to_dart(x) for x in w) for w in e.images))


def loop_of_word(w: Sequence[int]) -> CyclicPath:
    """The rose loop spelling a cyclically reduced word."""
    return CyclicPath(letter_to_dart(x) for x in w)


def word_of_loop(c: CyclicPath) -> Word:
    return tuple(dart_to_letter(d) for d in c.darts)


def _order_key(x: int) -> int:
    # a < a' < b < b' < ...
    return 2 * (abs(x) - 1) + (x < 0)


def _class_representative(w: Word) -> tuple[int, ...]:
    keyed = tuple(_order_key(x) for x in w)
    inv = tuple(_order_key(x) for x in invert(w))
    return min(_least_rotation(keyed), _least_rotation(inv))


def cyclic_words(rank: int, max_len: int) -> Iterator[Word]:
    """One cyclically reduced word per (rotation, inversion) class.

    Ordered by length, then lexicographically with a < a' < b < b' < ...;
    the representative is the least word of its class.
    """
    letters = sorted((s * (i + 1) for i in range(rank) for s in (1, -1)), key=_order_key)
    for n in range(1, max_len + 1):
        buf: list[int] = []

        def rec():
            if len(buf) == n:
                if n > 1 and buf[0] == -buf[-1]:
                    return
                w = tuple(buf)
                if tuple(_order_key(x) for x in w) == _class_representative(w):
                    yield w
                return
            for x in letters:
                if buf and buf[-1] == -x:
                    continue
                # a class representative starts with its least letter
                if buf and min(_order_key(x), _order_key(-x)) < _order_key(buf[0]):
                    continue
                buf.append(x)
                yield from rec()
                buf.pop()

        yield from rec()


def oracle_search(
    e: Endomorphism, max_len: int, max_k: int, max_d: int
) -> tuple[Word, int, int] | None:
    """First (w, k, d) with phi^k(w) conjugate to w^d, within the bounds."""
    for w in cyclic_words(e.rank, max_len):
        u = w
        for k in range(1, max_k + 1):
            u = cyclic_reduce(apply(e, u))
            if not u:
                break
            if len(u) % len(w):
                continue
            d = len(u) // len(w)
            if d <= max_d and conjugate_eq(u, w * d):
                return w, k, d
    return None
