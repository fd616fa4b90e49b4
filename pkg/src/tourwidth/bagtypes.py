"""Vertex types, bag types and the finite type monoid product."""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

from tourwidth.bags import Bag, Letter, Map, compose, identity_map
from tourwidth.errors import InputError
from tourwidth.tournament import Orientation


class VertexType(NamedTuple):
    """Colour plus the input-to-vertex boundary bits; tuples order colour-major."""

    colour: int
    bvec: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.colour + 1}:{''.join(map(str, self.bvec))}"


HomEntry = tuple[VertexType, VertexType, Orientation]


@dataclass(frozen=True)
class BagType:
    """Recolouring, inhabited vertex types, and homogeneity of distinct inhabited pairs.

    ``hom`` holds triples ``(a, b, o)`` with ``a < b``; ``o`` is the orientation
    from ``a``'s vertices to ``b``'s.
    """

    rho: Map
    inhabited: tuple[VertexType, ...]
    hom: tuple[HomEntry, ...]

    @property
    def k(self) -> int:
        return len(self.rho)

    def orientation(self, a: VertexType, b: VertexType) -> Orientation:
        """Orientation from the class of ``a`` to the class of ``b``."""
        if a == b:
            raise KeyError("hom is only kept for distinct types")
        lo, hi = (a, b) if a < b else (b, a)
        for x, y, o in self.hom:
            if x == lo and y == hi:
                return o if lo == a else o.flipped()
        raise KeyError((a, b))

    def to_text(self) -> str:
        rho = ",".join(str(c + 1) for c in self.rho)
        inh = " ".join(str(a) for a in self.inhabited)
        arrows = {Orientation.A_TO_B: "->", Orientation.B_TO_A: "<-", Orientation.MIXED: "<>"}
        hom = " ".join(f"{a}{arrows[o]}{b}" for a, b, o in self.hom)
        return f"rho=({rho}) inh=[{inh}] hom=[{hom}]"


def make_type(rho: Iterable[int], hom_by_pair: dict[tuple[VertexType, VertexType], Orientation],
              inhabited: Iterable[VertexType]) -> BagType:
    inh = tuple(sorted(set(inhabited)))
    hom = []
    for a, b in itertools.combinations(inh, 2):
        hom.append((a, b, hom_by_pair[a, b]))
    return BagType(tuple(rho), inh, tuple(hom))


def identity_type(k: int) -> BagType:
    return BagType(identity_map(k), (), ())


def all_vertex_types(k: int) -> list[VertexType]:
    return [VertexType(c, bits) for c in range(k) for bits in itertools.product((0, 1), repeat=k)]


def f_map(g: Map, h: Map, a: VertexType) -> VertexType:
    """Type of a vertex once a bag with recolouring ``g`` sits left and ``h`` right."""
    return VertexType(h[a.colour], tuple(a.bvec[g[i]] for i in range(len(g))))


def vertex_type_of(b: Bag, v: int) -> VertexType:
    if v not in b.colour:
        raise InputError(f"vertex {v} is not in the bag")
    return VertexType(b.colour[v], tuple(b.boundary[v]))


def bag_type_of(b: Bag) -> BagType:
    classes: dict[VertexType, list[int]] = defaultdict(list)
    for v in b.vertices:
        classes[vertex_type_of(b, v)].append(v)
    inh = sorted(classes)
    hom = []
    for a, c in itertools.combinations(inh, 2):
        fwd = all((x, y) in b.edges for x in classes[a] for y in classes[c])
        bwd = all((y, x) in b.edges for x in classes[a] for y in classes[c])
        hom.append((a, c, Orientation.A_TO_B if fwd else Orientation.B_TO_A if bwd else Orientation.MIXED))
    return BagType(b.rho, tuple(inh), tuple(hom))


def letter_type(x: Letter) -> BagType:
    if x.vertex is None:
        return BagType(x.rho, (), ())
    return BagType(x.rho, (VertexType(x.colour, x.in_set),), ())


def _merge(seen: dict, key, o: Orientation) -> None:
    prev = seen.get(key)
    if prev is None:
        seen[key] = o
    elif prev != o:
        seen[key] = Orientation.MIXED


@lru_cache(maxsize=1 << 18)
def type_product(s: BagType, t: BagType) -> BagType:
    """The type of ``A · B`` computed from the types of ``A`` and ``B`` alone."""
    if s.k != t.k:
        raise InputError(f"order mismatch: {s.k} vs {t.k}")
    k = s.k
    ident = identity_map(k)
    left = {a: f_map(ident, t.rho, a) for a in s.inhabited}
    right = {b: f_map(s.rho, ident, b) for b in t.inhabited}
    seen: dict[tuple[VertexType, VertexType], Orientation] = {}

    def note(a: VertexType, b: VertexType, o: Orientation) -> None:
        if a == b:
            return
        if a < b:
            _merge(seen, (a, b), o)
        else:
            _merge(seen, (b, a), o.flipped())

    for a, b, o in s.hom:
        note(left[a], left[b], o)
    for a, b, o in t.hom:
        note(right[a], right[b], o)
    for a, fa in left.items():
        for b, fb in right.items():
            # left vertex of colour a.colour versus right vertex with boundary b.bvec
            note(fa, fb, Orientation.A_TO_B if b.bvec[a.colour] else Orientation.B_TO_A)
    inh = set(left.values()) | set(right.values())
    return make_type(compose(t.rho, s.rho), seen, inh)


def fold_types(types: Iterable[BagType], k: int) -> BagType:
    acc = identity_type(k)
    for t in types:
        acc = type_product(acc, t)
    return acc


def is_idempotent(t: BagType) -> bool:
    return type_product(t, t) == t


def gamma_pullback(gamma: Iterable[VertexType], g: Map, h: Map,
                   candidates: Iterable[VertexType] | None = None) -> frozenset[VertexType]:
    """Types whose image under ``f_map(g, h, ·)`` lies in ``gamma``.

    Without ``candidates`` the whole universe of order-k types is scanned.
    """
    gamma = set(gamma)
    pool = all_vertex_types(len(g)) if candidates is None else candidates
    return frozenset(a for a in pool if f_map(g, h, a) in gamma)


def restrict_type(t: BagType, gamma: Iterable[VertexType]) -> BagType:
    gamma = set(gamma)
    return BagType(
        t.rho,
        tuple(a for a in t.inhabited if a in gamma),
        tuple(e for e in t.hom if e[0] in gamma and e[1] in gamma),
    )
