"""The bag monoid of order k: bags, atomic letters, decomposition words and decoding.

Colours are 0-based internally (``0..k-1``); the text format uses ``1..k``.
A boundary bit ``boundary[v][c] == 1`` means the edge goes from input colour
``c`` to the internal vertex ``v``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Mapping, Sequence

from tourwidth.errors import InputError
from tourwidth.tournament import Tournament, check_ordering

Map = tuple[int, ...]


def identity_map(k: int) -> Map:
    return tuple(range(k))


def compose(after: Map, before: Map) -> Map:
    """``after ∘ before``."""
    return tuple(after[c] for c in before)


def is_idempotent_map(rho: Map) -> bool:
    return compose(rho, rho) == rho


class PatchedMap(Sequence[int]):
    """Identity on ``range(k)`` except at a few colours; for very large ``k``."""

    __slots__ = ("k", "patch")

    def __init__(self, k: int, patch: Mapping[int, int]):
        for c, d in patch.items():
            if not (0 <= c < k and 0 <= d < k):
                raise InputError(f"recolouring entry {c}->{d} outside [0, {k})")
        self.k = k
        self.patch = {c: d for c, d in patch.items() if c != d}

    def __len__(self) -> int:
        return self.k

    def __getitem__(self, c):
        if isinstance(c, slice):
            return tuple(self)[c]
        if not 0 <= c < self.k:
            raise IndexError(c)
        return self.patch.get(c, c)

    def __iter__(self):
        return (self.patch.get(c, c) for c in range(self.k))

    def __eq__(self, other) -> bool:
        if isinstance(other, PatchedMap):
            return self.k == other.k and self.patch == other.patch
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.k, tuple(sorted(self.patch.items()))))

    def __repr__(self) -> str:
        return f"PatchedMap({self.k}, {self.patch})"


class SparseBits(Sequence[int]):
    """A ``k``-bit vector stored as the set of its ones."""

    __slots__ = ("k", "ones")

    def __init__(self, k: int, ones: Iterable[int]):
        self.k = k
        self.ones = frozenset(ones)
        if any(not 0 <= c < k for c in self.ones):
            raise InputError(f"bit index outside [0, {k})")

    def __len__(self) -> int:
        return self.k

    def __getitem__(self, c):
        if isinstance(c, slice):
            return tuple(self)[c]
        if not 0 <= c < self.k:
            raise IndexError(c)
        return 1 if c in self.ones else 0

    def __iter__(self):
        return (1 if c in self.ones else 0 for c in range(self.k))

    def __eq__(self, other) -> bool:
        if isinstance(other, SparseBits):
            return self.k == other.k and self.ones == other.ones
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.k, self.ones))

    def __repr__(self) -> str:
        return f"SparseBits({self.k}, {sorted(self.ones)})"


@dataclass(frozen=True)
class Bag:
    k: int
    vertices: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    boundary: Mapping[int, tuple[int, ...]]
    colour: Mapping[int, int]
    rho: Map

    def __post_init__(self):
        if len(self.rho) != self.k or any(not 0 <= c < self.k for c in self.rho):
            raise InputError(f"recolouring {self.rho} is not a map on {self.k} colours")
        if set(self.boundary) != set(self.vertices) or set(self.colour) != set(self.vertices):
            raise InputError("boundary and colouring must be total on the internal vertices")
        for v in self.vertices:
            if not 0 <= self.colour[v] < self.k:
                raise InputError(f"colour {self.colour[v]} of vertex {v} outside [0, {self.k})")
            if len(self.boundary[v]) != self.k:
                raise InputError(f"boundary column of {v} has length {len(self.boundary[v])}")

    @classmethod
    def empty(cls, k: int, rho: Map | None = None) -> Bag:
        return cls(k, (), frozenset(), {}, {}, identity_map(k) if rho is None else tuple(rho))

    def edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    def internal_tournament(self) -> tuple[Tournament, tuple[int, ...]]:
        """Internal tournament relabelled by position in ``vertices``."""
        pos = {v: i for i, v in enumerate(self.vertices)}
        t = Tournament.from_edges(len(self.vertices), [(pos[u], pos[v]) for u, v in self.edges])
        return t, self.vertices


@dataclass(frozen=True)
class Letter:
    """An atomic bag: at most one internal vertex, plus a recolouring."""

    k: int
    rho: Map
    vertex: int | None = None
    colour: int = 0
    in_set: tuple[int, ...] = ()

    def __post_init__(self):
        # the sparse forms validate themselves on construction
        if len(self.rho) != self.k or (not isinstance(self.rho, PatchedMap)
                                       and any(not 0 <= c < self.k for c in self.rho)):
            raise InputError(f"recolouring {self.rho} is not a map on {self.k} colours")
        if self.vertex is not None:
            if not 0 <= self.colour < self.k:
                raise InputError(f"colour {self.colour} outside [0, {self.k})")
            if len(self.in_set) != self.k or (not isinstance(self.in_set, SparseBits)
                                              and any(b not in (0, 1) for b in self.in_set)):
                raise InputError(f"in-set {self.in_set} is not a {self.k}-bit vector")

    def to_bag(self) -> Bag:
        if self.vertex is None:
            return Bag.empty(self.k, self.rho)
        v = self.vertex
        return Bag(self.k, (v,), frozenset(), {v: self.in_set}, {v: self.colour}, self.rho)

    def without_vertex(self) -> Letter:
        return Letter(self.k, self.rho)


def product(a: Bag, b: Bag) -> Bag:
    """``a · b`` with ``a`` to the left."""
    if a.k != b.k:
        raise InputError(f"order mismatch: {a.k} vs {b.k}")
    if set(a.vertices) & set(b.vertices):
        raise InputError("bags share vertex ids")
    edges = set(a.edges) | set(b.edges)
    for x in a.vertices:
        c = a.colour[x]
        for y in b.vertices:
            edges.add((x, y) if b.boundary[y][c] else (y, x))
    boundary = dict(a.boundary)
    for y in b.vertices:
        col = b.boundary[y]
        boundary[y] = tuple(col[a.rho[i]] for i in range(a.k))
    colour = {x: b.rho[a.colour[x]] for x in a.vertices}
    colour.update(b.colour)
    return Bag(a.k, a.vertices + b.vertices, frozenset(edges), boundary, colour, compose(b.rho, a.rho))


def fold(bags: Iterable[Bag], k: int) -> Bag:
    return reduce(product, bags, Bag.empty(k))


def restrict_bag(b: Bag, keep: Iterable[int]) -> Bag:
    keep = set(keep)
    if not keep <= set(b.vertices):
        raise InputError(f"vertices {sorted(keep - set(b.vertices))} are not in the bag")
    return Bag(
        b.k,
        tuple(v for v in b.vertices if v in keep),
        frozenset((u, v) for u, v in b.edges if u in keep and v in keep),
        {v: b.boundary[v] for v in b.vertices if v in keep},
        {v: b.colour[v] for v in b.vertices if v in keep},
        b.rho,
    )


@dataclass(frozen=True)
class DecompositionWord:
    k: int
    letters: tuple[Letter, ...]
    vertex_index: Mapping[int, int] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        index = {}
        for i, letter in enumerate(self.letters):
            if letter.k != self.k:
                raise InputError(f"letter {i} has order {letter.k}, word has order {self.k}")
            if letter.vertex is not None:
                if letter.vertex in index:
                    raise InputError(f"vertex {letter.vertex} appears in letters {index[letter.vertex]} and {i}")
                index[letter.vertex] = i
        object.__setattr__(self, "vertex_index", index)

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def vertices(self) -> list[int]:
        return [x.vertex for x in self.letters if x.vertex is not None]

    def slice(self, start: int, stop: int) -> DecompositionWord:
        return DecompositionWord(self.k, self.letters[start:stop])

    def to_bag(self) -> Bag:
        return fold((x.to_bag() for x in self.letters), self.k)

    def to_text(self) -> str:
        lines = [f"{self.k} {len(self.letters)}"]
        for x in self.letters:
            rho = " ".join(str(c + 1) for c in x.rho)
            if x.vertex is None:
                lines.append(f"R {rho}".rstrip())
            else:
                bits = "".join(str(b) for b in x.in_set)
                lines.append(f"V {x.vertex} {x.colour + 1} {bits} {rho}".rstrip())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> DecompositionWord:
        lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines()) if ln.strip()]
        if not lines:
            raise InputError("line 1: missing header 'k m'")
        lineno, head = lines[0]
        if len(head) != 2 or not all(tok.isdigit() for tok in head):
            raise InputError(f"line {lineno}: expected header 'k m', got {' '.join(head)!r}")
        k, m = int(head[0]), int(head[1])
        if len(lines) - 1 != m:
            raise InputError(f"header announces {m} letters, found {len(lines) - 1}")

        def colours(lineno, toks):
            out = []
            for tok in toks:
                if not tok.isdigit() or not 1 <= int(tok) <= k:
                    raise InputError(f"line {lineno}: colour {tok!r} outside 1..{k}")
                out.append(int(tok) - 1)
            return tuple(out)

        letters = []
        for lineno, toks in lines[1:]:
            if toks[0] == "R":
                if len(toks) != 1 + k:
                    raise InputError(f"line {lineno}: 'R' needs {k} colours")
                letters.append(Letter(k, colours(lineno, toks[1:])))
            elif toks[0] == "V":
                if len(toks) != 4 + k:
                    raise InputError(f"line {lineno}: 'V' needs id, colour, in-set and {k} colours")
                if not toks[1].isdigit():
                    raise InputError(f"line {lineno}: bad vertex id {toks[1]!r}")
                bits = toks[3]
                if len(bits) != k or set(bits) - {"0", "1"}:
                    raise InputError(f"line {lineno}: in-set {bits!r} is not a {k}-bit string")
                (c,) = colours(lineno, [toks[2]])
                letters.append(Letter(k, colours(lineno, toks[4:]), int(toks[1]), c, tuple(int(b) for b in bits)))
            else:
                raise InputError(f"line {lineno}: letters start with 'R' or 'V', got {toks[0]!r}")
        return cls(k, tuple(letters))


def decode_rows(word: DecompositionWord) -> tuple[list[int], dict[int, int]]:
    """Insertion order and out-neighbour bitmasks (bits indexed by vertex id).

    Keeps one bitmask per occupied colour, so each letter costs time in the
    number of occupied colours rather than in ``k``.
    """
    classes: dict[int, int] = {}
    placed = 0
    order: list[int] = []
    rows: dict[int, int] = {}
    for x in word.letters:
        v = x.vertex
        if v is not None:
            into = 0
            for c, mask in classes.items():
                if x.in_set[c]:
                    into |= mask
            rows[v] = placed & ~into
            bit = 1 << v
            rest = into
            while rest:
                low = rest & -rest
                rows[low.bit_length() - 1] |= bit
                rest ^= low
        recoloured: dict[int, int] = {}
        for c, mask in classes.items():
            d = x.rho[c]
            recoloured[d] = recoloured.get(d, 0) | mask
        classes = recoloured
        if v is not None:
            classes[x.colour] = classes.get(x.colour, 0) | (1 << v)
            placed |= 1 << v
            order.append(v)
    return order, rows


def decode(word: DecompositionWord) -> tuple[Tournament, tuple[int, ...]]:
    """Internal tournament of the word's product and the insertion ordering."""
    order, rows = decode_rows(word)
    n = len(order)
    if sorted(order) != list(range(n)):
        raise InputError("decode needs vertex ids 0..n-1; use decode_rows for arbitrary ids")
    return Tournament(n, tuple(rows[v] for v in range(n))), tuple(order)


def encode_trivial(t: Tournament, order: Sequence[int]) -> DecompositionWord:
    """Width-n word in which the i-th placed vertex keeps the fresh colour i."""
    check_ordering(t, order)
    n = t.n
    letters = []
    for i, v in enumerate(order):
        in_set = tuple(1 if c < i and t.edge(order[c], v) else 0 for c in range(n))
        letters.append(Letter(n, identity_map(n), v, i, in_set))
    return DecompositionWord(n, tuple(letters))


def inverted_path_word(n: int) -> DecompositionWord:
    """Width-2 decomposition of the inverted path: each new vertex beats only its predecessor."""
    if n < 1:
        raise InputError(f"inverted path needs n >= 1, got {n}")
    return DecompositionWord(2, tuple(Letter(2, (1, 1), v, 0, (0, 1)) for v in range(n)))


def rotating_word(n: int) -> DecompositionWord:
    """Width-2 decomposition of the rotating tournament on n (odd) vertices.

    The lower half gets colour 1 and the upper half colour 2, inserted
    alternately: 0, m+1, 1, m+2, ..., m.
    """
    if n < 1 or n % 2 == 0:
        raise InputError(f"rotating tournament needs odd n >= 1, got {n}")
    m = (n - 1) // 2
    letters = []
    for i in range(m + 1):
        letters.append(Letter(2, (0, 1), i, 0, (1, 0)))
        if i < m:
            letters.append(Letter(2, (0, 1), m + 1 + i, 1, (0, 1)))
    return DecompositionWord(2, tuple(letters))
