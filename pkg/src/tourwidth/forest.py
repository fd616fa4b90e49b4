"""Factorisation forests over the bag-type homomorphism.

Construction descends the J-order of the generated submonoid: a word whose
value lies in J-class ``J`` is cut greedily into blocks with values in ``J``
(their product is then a smooth word over ``J``) plus a remainder strictly
above ``J``.  Smooth words are split by an L-class, then an R-class, which
leaves a word over a single group H-class; group words are split at repeated
prefix values, whose intervening blocks evaluate to the group identity.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

from tourwidth.bags import DecompositionWord, Letter, identity_map
from tourwidth.bagtypes import (
    BagType,
    VertexType,
    fold_types,
    gamma_pullback,
    identity_type,
    is_idempotent,
    letter_type,
    restrict_type,
    type_product,
)
from tourwidth.errors import CapExceeded, InputError, TheoryViolation
from tourwidth.monoid import DEFAULT_SUBMONOID_CAP, TypeMonoid, submonoid_closure

LEAF = "leaf"
BINARY = "binary"
IDEMPOTENT = "idempotent"


class Depth(NamedTuple):
    p: int
    q: int

    def within(self, other: Depth) -> bool:
        return self.p <= other.p and self.q <= other.q


@dataclass(frozen=True, eq=True)
class ForestNode:
    kind: str
    start: int
    end: int  # inclusive
    type: BagType
    children: tuple[ForestNode, ...] = ()

    @property
    def span(self) -> tuple[int, int]:
        return self.start, self.end

    def walk(self, depth: int = 0, path: str = "root") -> Iterator[tuple[ForestNode, int, str]]:
        yield self, depth, path
        for i, c in enumerate(self.children):
            yield from c.walk(depth + 1, f"{path}.{i}")

    def shifted(self, offset: int) -> ForestNode:
        if offset == 0:
            return self
        return ForestNode(self.kind, self.start + offset, self.end + offset, self.type,
                          tuple(c.shifted(offset) for c in self.children))


def leaf(pos: int, t: BagType) -> ForestNode:
    return ForestNode(LEAF, pos, pos, t)


def binary(a: ForestNode, b: ForestNode) -> ForestNode:
    return ForestNode(BINARY, a.start, b.end, type_product(a.type, b.type), (a, b))


def idempotent(children: Sequence[ForestNode], e: BagType) -> ForestNode:
    if len(children) == 1:
        return children[0]
    return ForestNode(IDEMPOTENT, children[0].start, children[-1].end, e, tuple(children))


def measure_depth(f: ForestNode) -> Depth:
    if f.kind == LEAF:
        return Depth(0, 0)
    sub = [measure_depth(c) for c in f.children]
    p = max(d.p for d in sub)
    q = max(d.q for d in sub)
    return Depth(p, q + 1) if f.kind == BINARY else Depth(p + 1, q)


# --- construction ---------------------------------------------------------


class _Builder:
    def __init__(self, monoid: TypeMonoid):
        self.m = monoid

    def elem(self, node: ForestNode) -> int:
        return self.m.index[node.type]

    def value(self, items: Sequence[ForestNode]) -> int:
        acc = self.m.identity
        for it in items:
            acc = self.m.mul(acc, self.elem(it))
        return acc

    def build(self, items: list[ForestNode]) -> ForestNode:
        if len(items) == 1:
            return items[0]
        m = self.m
        n = len(items)
        suffix = [m.identity] * (n + 1)
        for i in range(n - 1, -1, -1):
            suffix[i] = m.mul(self.elem(items[i]), suffix[i + 1])
        target = m.j_class[suffix[0]]
        blocks = []
        i = 0
        while i < n and m.j_class[suffix[i]] == target:
            acc = m.identity
            j = i
            while True:
                acc = m.mul(acc, self.elem(items[j]))
                if m.j_class[acc] == target:
                    break
                j += 1
            head = items[i:j]
            blocks.append(binary(self.build(head), items[j]) if head else items[j])
            i = j + 1
        node = self.smooth(blocks)
        if i < n:
            node = binary(node, self.build(items[i:]))
        return node

    def smooth(self, items: list[ForestNode]) -> ForestNode:
        """Forest for a word whose letters and infixes all lie in one J-class."""
        if len(items) == 1:
            return items[0]
        m = self.m
        elems = [self.elem(it) for it in items]
        if len(set(elems)) == 1 and m.is_idempotent(elems[0]):
            return idempotent(items, items[0].type)
        ell = m.l_class[elems[-1]]
        pieces = []
        pending: list[ForestNode] = []
        for it, e in zip(items, elems):
            if m.l_class[e] == ell:
                pieces.append(binary(self.smooth(pending), it) if pending else it)
                pending = []
            else:
                pending.append(it)
        if len(pieces) == 1:
            return pieces[0]
        r0 = m.r_class[self.elem(pieces[0])]
        blocks = []
        pending = []
        for pc in pieces:
            if m.r_class[self.elem(pc)] == r0:
                if blocks and pending:
                    blocks[-1] = binary(blocks[-1], self.smooth(pending))
                pending = []
                blocks.append(pc)
            else:
                pending.append(pc)
        if pending:
            blocks[-1] = binary(blocks[-1], self.smooth(pending))
        if len(blocks) == 1:
            return blocks[0]
        return self.group(blocks)

    def group(self, items: list[ForestNode]) -> ForestNode:
        """Forest for a word over a single group H-class."""
        if len(items) == 1:
            return items[0]
        m = self.m
        elems = [self.elem(it) for it in items]
        if len(set(elems)) == 1 and m.is_idempotent(elems[0]):
            return idempotent(items, items[0].type)
        prefix = []
        acc = m.identity
        for e in elems:
            acc = m.mul(acc, e)
            prefix.append(acc)
        x = prefix[0]
        occ = [i for i, v in enumerate(prefix) if v == x]
        node = items[0]
        mids = [self.group(items[a + 1:b + 1]) for a, b in zip(occ, occ[1:])]
        if mids:
            e = mids[0].type
            if not all(md.type == e for md in mids) or not is_idempotent(e):
                raise TheoryViolation("group blocks between equal prefix values must share an idempotent value")
            node = binary(node, idempotent(mids, e))
        if occ[-1] + 1 < len(items):
            node = binary(node, self.group(items[occ[-1] + 1:]))
        return node


STRATEGIES = ("simon", "balanced", "auto")


def balanced_forest(types: Sequence[BagType], lo: int = 0, hi: int | None = None) -> ForestNode:
    """Binary-only forest splitting every factor in half."""
    hi = len(types) if hi is None else hi
    if hi - lo == 1:
        return leaf(lo, types[lo])
    mid = (lo + hi) // 2
    return binary(balanced_forest(types, lo, mid), balanced_forest(types, mid, hi))


def build_forest(w: DecompositionWord, cap: int = DEFAULT_SUBMONOID_CAP,
                 monoid: TypeMonoid | None = None,
                 strategy: str = "simon") -> tuple[ForestNode, Depth, TypeMonoid | None]:
    """Forest for ``w`` with measured depth, certified against ``(|S|, 2|S|)``.

    ``simon`` descends the J-order of the generated submonoid ``S`` and raises
    CapExceeded when ``S`` outgrows ``cap``.  ``balanced`` skips the closure
    and halves the word recursively; it is certified against the number of
    distinct node types, a lower bound on ``|S|``.  ``auto`` tries ``simon``
    and falls back to ``balanced`` when the cap is hit.  The monoid is
    returned when one was computed.
    """
    if not w.letters:
        raise InputError("cannot build a forest for the empty word")
    if strategy not in STRATEGIES:
        raise InputError(f"unknown forest strategy {strategy!r}")
    types = [letter_type(x) for x in w.letters]
    if strategy != "balanced" and monoid is None:
        try:
            monoid = submonoid_closure(types, cap=cap, k=w.k)
        except CapExceeded:
            if strategy == "simon":
                raise
    if monoid is None:
        root = balanced_forest(types)
        size = len({node.type for node, _, _ in root.walk()} | {identity_type(w.k)})
    else:
        root = _Builder(monoid).build([leaf(i, t) for i, t in enumerate(types)])
        size = len(monoid)
    depth = measure_depth(root)
    if not depth.within(Depth(size, 2 * size)):
        raise TheoryViolation(f"forest depth {tuple(depth)} exceeds ({size}, {2 * size})")
    return root, depth, monoid


# --- validation -----------------------------------------------------------


def validate_forest(f: ForestNode, w: DecompositionWord, start: int = 0) -> str | None:
    """First violation as ``'<path>: <reason>'``, or None when the forest is valid.

    ``start`` is the first letter position the root must cover.
    """
    if (f.start, f.end) != (start, start + len(w) - 1):
        return f"root: span [{f.start},{f.end}] does not cover the word"
    types = [letter_type(x) for x in w.letters]
    for node, _, path in f.walk():
        direct = fold_types(types[node.start - start:node.end - start + 1], w.k)
        if node.type != direct:
            return f"{path}: cached type differs from the fold of its letters"
        if node.kind == LEAF:
            if node.start != node.end or node.children:
                return f"{path}: leaf must cover exactly one letter"
            continue
        if node.kind not in (BINARY, IDEMPOTENT):
            return f"{path}: unknown node kind {node.kind!r}"
        if node.kind == BINARY and len(node.children) != 2:
            return f"{path}: binary node has {len(node.children)} children"
        if node.kind == IDEMPOTENT and len(node.children) < 2:
            return f"{path}: idempotent node needs at least two children"
        expect = node.start
        for i, c in enumerate(node.children):
            if c.start != expect:
                return f"{path}.{i}: child span starts at {c.start}, expected {expect}"
            expect = c.end + 1
        if expect != node.end + 1:
            return f"{path}: children stop at {expect - 1}, node ends at {node.end}"
        if node.kind == IDEMPOTENT:
            e = node.type
            for i, c in enumerate(node.children):
                if c.type != e:
                    return f"{path}.{i}: child type differs from the shared idempotent"
            if not is_idempotent(e):
                return f"{path}: shared type is not idempotent"
    return None


# --- restriction to a union of vertex types -------------------------------


def _pullbacks(gamma: frozenset[VertexType], t: BagType, g, h) -> frozenset[VertexType]:
    return gamma_pullback(gamma, g, h, candidates=t.inhabited)


def restrict_forest(f: ForestNode, w: DecompositionWord, gamma: Iterable[VertexType],
                    start: int = 0) -> tuple[ForestNode, DecompositionWord, Depth]:
    """Forest and word for ``B[Γ(B)]`` where ``B`` is the product of ``w``.

    ``gamma`` is a set of vertex types relative to the whole word.  Letters
    whose vertex falls outside keep their recolouring and lose the vertex.
    """
    letters = list(w.letters)
    ident = identity_map(w.k)

    def go(node: ForestNode, gam: frozenset[VertexType]) -> ForestNode:
        if set(node.type.inhabited) <= gam:
            return node
        if node.kind == LEAF:
            x = letters[node.start - start]
            if x.vertex is not None:
                x = x.without_vertex()
                letters[node.start - start] = x
            return leaf(node.start, letter_type(x))
        if node.kind == BINARY:
            a, b = node.children
            na = go(a, _pullbacks(gam, a.type, ident, b.type.rho))
            nb = go(b, _pullbacks(gam, b.type, a.type.rho, ident))
            return binary(na, nb)
        tau = node.type
        rho = tau.rho
        kids = node.children
        first = go(kids[0], _pullbacks(gam, tau, ident, rho))
        last = go(kids[-1], _pullbacks(gam, tau, rho, ident))
        if len(kids) == 2:
            return binary(first, last)
        mid_gamma = _pullbacks(gam, tau, rho, rho)
        tau_prime = restrict_type(tau, mid_gamma)
        if not is_idempotent(tau_prime):
            raise TheoryViolation("restricted idempotent type is not idempotent")
        mids = [go(c, mid_gamma) for c in kids[1:-1]]
        for c in mids:
            if c.type != tau_prime:
                raise TheoryViolation(f"restricted middle child at [{c.start},{c.end}] lost the shared type")
        return binary(binary(first, idempotent(mids, tau_prime)), last)

    root = go(f, frozenset(gamma))
    return root, DecompositionWord(w.k, tuple(letters)), measure_depth(root)


# --- splits and factor queries -------------------------------------------


def split_encoding(f: ForestNode) -> list[int]:
    """Per letter, the least depth of a node whose leftmost leaf it is (root at 0)."""
    s = [None] * (f.end - f.start + 1)
    for node, depth, _ in f.walk():
        i = node.start - f.start
        if s[i] is None or depth < s[i]:
            s[i] = depth
    return s


class FactorIndex:
    """Answers the type of any factor ``w[i..j]`` by descending the forest."""

    def __init__(self, f: ForestNode):
        self.root = f
        self.k = f.type.k

    def query(self, i: int, j: int) -> BagType:
        if not self.root.start <= i <= j <= self.root.end:
            raise IndexError(f"factor [{i},{j}] outside [{self.root.start},{self.root.end}]")
        return self._query(self.root, i, j)

    def _query(self, node: ForestNode, i: int, j: int) -> BagType:
        i, j = max(i, node.start), min(j, node.end)
        if (i, j) == (node.start, node.end):
            return node.type
        kids = node.children
        lo = bisect.bisect_right(kids, i, key=lambda c: c.start) - 1
        hi = bisect.bisect_right(kids, j, key=lambda c: c.start) - 1
        if lo == hi:
            return self._query(kids[lo], i, j)
        acc = self._query(kids[lo], i, j)
        inner = range(lo + 1, hi)
        if inner:
            if node.kind == IDEMPOTENT:
                acc = type_product(acc, node.type)
            else:
                for c in inner:
                    acc = type_product(acc, kids[c].type)
        return type_product(acc, self._query(kids[hi], i, j))


def factor_type(idx: FactorIndex, i: int, j: int) -> BagType:
    return idx.query(i, j)


def dump_forest(f: ForestNode) -> str:
    lines = []
    for node, depth, _ in f.walk():
        line = f"{'  ' * depth}{node.kind} [{node.start},{node.end}] {node.type.to_text()}"
        if depth == 0:
            d = measure_depth(f)
            line += f" depth=({d.p},{d.q})"
        lines.append(line)
    return "\n".join(lines) + "\n"


def word_types(w: DecompositionWord) -> list[BagType]:
    return [letter_type(x) for x in w.letters]


def empty_type(k: int) -> BagType:
    return identity_type(k)
