"""Tournaments as bit-row adjacency, GF(2) cut-rank, homogeneity and generators."""

from __future__ import annotations

import enum
import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from tourwidth.errors import CapExceeded, InputError

DEFAULT_BRUTEFORCE_CAP = 8


class Orientation(enum.IntEnum):
    """Orientation of all edges between two vertex sets A and B."""

    B_TO_A = -1
    MIXED = 0
    A_TO_B = 1

    def flipped(self) -> Orientation:
        return Orientation(-int(self))


@dataclass(frozen=True)
class Tournament:
    """Dense tournament; bit ``v`` of ``rows[u]`` is set iff ``u -> v``."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise InputError(f"expected {self.n} rows, got {len(self.rows)}")
        for u in range(self.n):
            row = self.rows[u]
            if row >> self.n:
                raise InputError(f"row {u} has bits beyond column {self.n - 1}")
            if (row >> u) & 1:
                raise InputError(f"loop at vertex {u}")
            for v in range(u + 1, self.n):
                if ((row >> v) & 1) == ((self.rows[v] >> u) & 1):
                    raise InputError(f"pair ({u}, {v}) does not have exactly one orientation")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Tournament:
        rows = [0] * n
        for u, v in edges:
            rows[u] |= 1 << v
        return cls(n, tuple(rows))

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[int]]) -> Tournament:
        rows = tuple(sum(1 << v for v, bit in enumerate(r) if bit) for r in matrix)
        return cls(len(rows), rows)

    def edge(self, u: int, v: int) -> bool:
        """True iff ``u -> v``."""
        return bool((self.rows[u] >> v) & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in range(self.n) if (self.rows[u] >> v) & 1]

    def matrix(self) -> list[list[int]]:
        return [[(self.rows[u] >> v) & 1 for v in range(self.n)] for u in range(self.n)]

    def induced(self, vertices: Sequence[int]) -> Tournament:
        """Subtournament on ``vertices``, relabelled 0..m-1 in the given order."""
        rows = []
        for u in vertices:
            r = self.rows[u]
            rows.append(sum(1 << j for j, v in enumerate(vertices) if (r >> v) & 1))
        return Tournament(len(vertices), tuple(rows))

    def to_text(self) -> str:
        lines = [str(self.n)]
        for u in range(self.n):
            lines.append("".join("1" if (self.rows[u] >> v) & 1 else "0" for v in range(self.n)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Tournament:
        """Parse the ``n`` + ``n`` rows of '0'/'1' format, with line/column diagnostics."""
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise InputError("line 1: missing vertex count")
        try:
            n = int(lines[0])
        except ValueError:
            raise InputError(f"line 1: expected vertex count, got {lines[0]!r}") from None
        if n < 0:
            raise InputError("line 1: negative vertex count")
        if len(lines) - 1 != n:
            raise InputError(f"line {len(lines) + 1}: expected {n} matrix rows, got {len(lines) - 1}")
        bits = []
        for u, line in enumerate(lines[1:]):
            lineno = u + 2
            if len(line) != n:
                raise InputError(f"line {lineno}: expected {n} characters, got {len(line)}")
            for v, ch in enumerate(line):
                if ch not in "01":
                    raise InputError(f"line {lineno}, column {v + 1}: invalid character {ch!r}")
            bits.append(line)
        for u in range(n):
            if bits[u][u] != "0":
                raise InputError(f"line {u + 2}, column {u + 1}: loop on vertex {u}")
            for v in range(u + 1, n):
                if bits[u][v] == bits[v][u]:
                    raise InputError(
                        f"line {u + 2}, column {v + 1}: entries ({u},{v}) and ({v},{u}) "
                        f"must differ, both are {bits[u][v]}"
                    )
        rows = tuple(sum(1 << v for v, ch in enumerate(line) if ch == "1") for line in bits)
        return cls(n, rows)


def check_ordering(t: Tournament, order: Sequence[int]) -> None:
    if sorted(order) != list(range(t.n)):
        raise InputError(f"ordering is not a permutation of the {t.n} vertices")


def rank_gf2(rows: Iterable[int]) -> int:
    """GF(2) rank of int-packed rows (all of the same width)."""
    basis: list[int] = []
    for row in rows:
        for b in basis:
            row = min(row, row ^ b)
        if row:
            basis.append(row)
            basis.sort(reverse=True)
    return len(basis)


def _mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def cut_rows(t: Tournament, left: Iterable[int], right: Iterable[int]) -> list[int]:
    """Rows of the left-versus-right adjacency matrix (columns kept as vertex bits)."""
    mask = _mask(right)
    return [t.rows[u] & mask for u in left]


def rank_of_cut(t: Tournament, left: Iterable[int], right: Iterable[int]) -> int:
    return rank_gf2(cut_rows(t, left, right))


@dataclass(frozen=True)
class CutReport:
    ranks: tuple[int, ...]
    class_counts: tuple[int, ...]

    @property
    def max_rank(self) -> int:
        return max(self.ranks, default=0)

    @property
    def max_classes(self) -> int:
        return max(self.class_counts, default=0)


def cut_rank(t: Tournament, order: Sequence[int], vertices: Sequence[int] | None = None) -> CutReport:
    """Per-prefix cut ranks of ``order``.

    With ``vertices`` given, ``order`` is an ordering of that subset and the cuts
    are taken inside the induced subtournament.
    """
    if vertices is None:
        check_ordering(t, order)
    elif sorted(order) != sorted(vertices):
        raise InputError("ordering does not match the vertex subset")
    ranks = []
    counts = []
    suffix = _mask(order)
    for i in range(len(order) - 1):
        suffix &= ~(1 << order[i])
        rows = [t.rows[u] & suffix for u in order[: i + 1]]
        ranks.append(rank_gf2(rows))
        counts.append(len(set(rows)))
    return CutReport(tuple(ranks), tuple(counts))


def is_homogeneous(t: Tournament, a: Iterable[int], b: Iterable[int]) -> Orientation:
    a = list(a)
    b = list(b)
    if not a or not b:
        raise InputError("homogeneity needs two non-empty sets")
    mask_b = _mask(b)
    if _mask(a) & mask_b:
        raise InputError("homogeneity needs disjoint sets")
    outs = {t.rows[u] & mask_b for u in a}
    if outs == {mask_b}:
        return Orientation.A_TO_B
    if outs == {0}:
        return Orientation.B_TO_A
    return Orientation.MIXED


# --- generators -----------------------------------------------------------


def rotating(n: int) -> Tournament:
    """Vertices on a circle, ``i -> j`` iff ``(j - i) mod n`` lies in ``1..(n-1)/2``."""
    if n < 1 or n % 2 == 0:
        raise InputError(f"rotating tournament needs odd n >= 1, got {n}")
    half = (n - 1) // 2
    return Tournament.from_edges(n, [(i, j) for i in range(n) for j in range(n) if 1 <= (j - i) % n <= half])


def inverted_path(n: int) -> Tournament:
    """All edges left to right except ``i <- i+1``."""
    if n < 1:
        raise InputError(f"inverted path needs n >= 1, got {n}")
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            edges.append((j, i) if j == i + 1 else (i, j))
    return Tournament.from_edges(n, edges)


def transitive(n: int) -> Tournament:
    if n < 0:
        raise InputError(f"negative size {n}")
    return Tournament.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def lex_triangle_power(d: int) -> Tournament:
    """d-fold lexicographic power of the directed triangle (3**d vertices)."""
    if d < 1:
        raise InputError(f"lexicographic power needs d >= 1, got {d}")
    n = 3**d
    edges = []
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            # most significant base-3 digit where u and v differ decides the edge
            x, y, scale = u, v, 3 ** (d - 1)
            while x // scale == y // scale:
                x, y, scale = x % scale, y % scale, scale // 3
            if (y // scale - x // scale) % 3 == 1:
                edges.append((u, v))
    return Tournament.from_edges(n, edges)


def random_tournament(n: int, seed: int | random.Random) -> Tournament:
    if n < 0:
        raise InputError(f"negative size {n}")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            edges.append((i, j) if rng.random() < 0.5 else (j, i))
    return Tournament.from_edges(n, edges)


def generate(family: str, *params: int) -> Tournament:
    """Dispatch on family name: rotating(n), inverted_path(n), lex_triangle_power(d), random(n, seed)."""
    makers = {
        "rotating": rotating,
        "inverted_path": inverted_path,
        "lex_triangle_power": lex_triangle_power,
        "random": random_tournament,
        "transitive": transitive,
    }
    if family not in makers:
        raise InputError(f"unknown family {family!r}; choose from {', '.join(makers)}")
    try:
        return makers[family](*params)
    except TypeError as exc:
        raise InputError(f"bad parameters for {family}: {exc}") from None


# --- brute force oracle ---------------------------------------------------


def min_cutrank_bruteforce(t: Tournament, cap: int = DEFAULT_BRUTEFORCE_CAP) -> tuple[int, tuple[int, ...]]:
    """Exact minimum cut-rank over all orderings, with one optimal ordering.

    The cut rank of a prefix depends only on the prefix as a set, so the
    minimum over all n! orderings is a min-max path through the subset lattice.
    """
    n = t.n
    if n > cap:
        raise CapExceeded(f"brute force refused: {n} vertices exceeds cap {cap}")
    if n <= 1:
        return 0, tuple(range(n))
    full = (1 << n) - 1
    subset_rank = [0] * (1 << n)
    for s in range(1, full):
        comp = full & ~s
        subset_rank[s] = rank_gf2(t.rows[u] & comp for u in range(n) if (s >> u) & 1)
    best = [math.inf] * (1 << n)
    last = [-1] * (1 << n)
    best[0] = 0
    for s in range(1, 1 << n):
        here = subset_rank[s]
        for u in range(n):
            if (s >> u) & 1:
                cand = max(best[s & ~(1 << u)], here)
                if cand < best[s]:
                    best[s] = cand
                    last[s] = u
    order = []
    s = full
    while s:
        u = last[s]
        order.append(u)
        s &= ~(1 << u)
    return int(best[full]), tuple(reversed(order))


def min_cutrank_enumerate(t: Tournament) -> int:
    """Literal enumeration of all orderings; only for cross-checking tiny instances."""
    if t.n <= 1:
        return 0
    return min(cut_rank(t, p).max_rank for p in itertools.permutations(range(t.n)))
