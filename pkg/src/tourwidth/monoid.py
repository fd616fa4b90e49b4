"""Submonoid of bag types generated by a word's letters, with Green's relations."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from tourwidth.bagtypes import BagType, identity_type, type_product
from tourwidth.errors import CapExceeded, InputError

DEFAULT_SUBMONOID_CAP = 10_000


def _strong_classes(n: int, edges: list[tuple[int, int]]) -> list[int]:
    if not edges:
        return list(range(n))
    src, dst = zip(*edges)
    graph = csr_matrix((np.ones(len(edges), dtype=np.int8), (src, dst)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="strong")
    return labels.tolist()


@dataclass
class TypeMonoid:
    """Closure of ``generators`` under the type product, identity adjoined.

    Elements are indexed; ``r_class``, ``l_class`` and ``j_class`` give Green's
    classes as integer labels computed from the right/left Cayley graphs.
    """

    k: int
    generators: tuple[BagType, ...]
    elements: list[BagType]
    index: dict[BagType, int]
    r_class: list[int] = field(default_factory=list)
    l_class: list[int] = field(default_factory=list)
    j_class: list[int] = field(default_factory=list)
    _table: dict[tuple[int, int], int] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> int:
        return 0

    def mul(self, a: int, b: int) -> int:
        key = (a, b)
        hit = self._table.get(key)
        if hit is None:
            hit = self._table[key] = self.index[type_product(self.elements[a], self.elements[b])]
        return hit

    def is_idempotent(self, a: int) -> bool:
        return self.mul(a, a) == a

    def __contains__(self, t: BagType) -> bool:
        return t in self.index


def submonoid_closure(gens: Iterable[BagType], cap: int = DEFAULT_SUBMONOID_CAP, k: int | None = None) -> TypeMonoid:
    if cap <= 0:
        raise InputError("submonoid cap must be positive")
    gens = tuple(dict.fromkeys(gens))
    if k is None:
        if not gens:
            raise InputError("order k needed for an empty generator set")
        k = gens[0].k
    one = identity_type(k)
    elements = [one]
    index = {one: 0}
    right: list[tuple[int, int]] = []
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for g in gens:
            prod = type_product(elements[a], g)
            b = index.get(prod)
            if b is None:
                if len(elements) >= cap:
                    raise CapExceeded(f"submonoid too large: more than {cap} elements")
                b = index[prod] = len(elements)
                elements.append(prod)
                queue.append(b)
            right.append((a, b))
    left = []
    for a in range(len(elements)):
        for g in gens:
            left.append((a, index[type_product(g, elements[a])]))
    m = TypeMonoid(k, gens, elements, index)
    m.r_class = _strong_classes(len(elements), right)
    m.l_class = _strong_classes(len(elements), left)
    m.j_class = _strong_classes(len(elements), right + left)
    return m
