"""Vertex orderings of bounded cut-rank from a decomposition word and its forest.

Binary nodes concatenate the orderings of their two halves.  Idempotent nodes
group their vertices by connected component of the synchronisation graph
(type classes joined when their edges are mixed), order the resulting cells
component-major and bag-minor, and recurse into each cell through a forest
restricted to that component's types.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from tourwidth.bags import DecompositionWord, Map, compose, identity_map, is_idempotent_map
from tourwidth.bagtypes import VertexType
from tourwidth.errors import InputError, TheoryViolation
from tourwidth.forest import BINARY, IDEMPOTENT, LEAF, Depth, ForestNode, measure_depth, restrict_forest
from tourwidth.tournament import Orientation, Tournament, cut_rank, is_homogeneous, rank_of_cut


@lru_cache(maxsize=None)
def f_bound(k: int, p: int, q: int) -> int:
    """Cut-rank bound for a forest of depth ``(p, q)`` over words of order ``k``."""
    if k < 1 or p < 0 or q < 0:
        raise InputError(f"f_bound needs k >= 1 and p, q >= 0, got ({k}, {p}, {q})")
    if p == 0 and q == 0:
        return k
    best = 0
    if q > 0:
        best = max(best, f_bound(k, p, q - 1) + k)
    if p > 0:
        best = max(best, f_bound(k, p - 1, q + 2 * p) + 2 * k * (2 ** k + 1))
    return best


def cell_bound(k: int) -> int:
    return k * (2 ** k + 1)


# --- vertex types relative to a factor -------------------------------------


def span_vertex_types(w: DecompositionWord, start: int, end: int) -> dict[int, VertexType]:
    """Type of each vertex of ``w[start..end]`` relative to that factor's bag."""
    k = w.k
    before = identity_map(k)
    prefix = []
    for pos in range(start, end + 1):
        prefix.append(before)
        before = compose(w.letters[pos].rho, before)
    after = identity_map(k)
    out = {}
    for pos in range(end, start - 1, -1):
        x = w.letters[pos]
        if x.vertex is not None:
            g = prefix[pos - start]
            out[x.vertex] = VertexType(after[x.colour], tuple(x.in_set[g[c]] for c in range(k)))
        after = compose(after, x.rho)
    return out


def child_vertices(w: DecompositionWord, node: ForestNode) -> list[int]:
    return [x.vertex for x in w.letters[node.start:node.end + 1] if x.vertex is not None]


def child_relative_types(w: DecompositionWord, node: ForestNode) -> dict[int, VertexType]:
    """Type of each vertex of a node relative to the child factor containing it."""
    out = {}
    for child in node.children:
        out.update(span_vertex_types(w, child.start, child.end))
    return out


def bag_index(w: DecompositionWord, node: ForestNode) -> dict[int, int]:
    return {v: i for i, child in enumerate(node.children) for v in child_vertices(w, child)}


def initial_final_colours(w: DecompositionWord, node: ForestNode) -> dict[int, tuple[int, int]]:
    """Per vertex of an idempotent node: colour in its own child bag, and that colour under ρ."""
    if node.kind != IDEMPOTENT:
        raise InputError("initial and final colours are defined for idempotent nodes")
    rho = node.type.rho
    if not is_idempotent_map(rho):
        raise TheoryViolation(f"recolouring {rho} of an idempotent node is not idempotent")
    out = {}
    for child in node.children:
        for v, a in span_vertex_types(w, child.start, child.end).items():
            out[v] = (a.colour, rho[a.colour])
    return out


# --- synchronisation graph and cells --------------------------------------


@dataclass
class SyncGraph:
    nodes: list[VertexType]
    edges: list[tuple[VertexType, VertexType]]

    def components(self) -> list[frozenset[VertexType]]:
        """Connected components, ordered by their least type."""
        n = len(self.nodes)
        if n == 0:
            return []
        pos = {a: i for i, a in enumerate(self.nodes)}
        src = [pos[a] for a, _ in self.edges]
        dst = [pos[b] for _, b in self.edges]
        graph = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
        _, labels = connected_components(graph, directed=False)
        groups: dict[int, set[VertexType]] = {}
        for a, lab in zip(self.nodes, labels):
            groups.setdefault(int(lab), set()).add(a)
        return sorted((frozenset(g) for g in groups.values()), key=min)


def sync_graph(t: Tournament, type_of: Mapping[int, VertexType]) -> SyncGraph:
    classes: dict[VertexType, list[int]] = {}
    for v, a in type_of.items():
        classes.setdefault(a, []).append(v)
    nodes = sorted(classes)
    edges = []
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            if is_homogeneous(t, classes[a], classes[b]) == Orientation.MIXED:
                edges.append((a, b))
    return SyncGraph(nodes, edges)


@dataclass
class IdempotentPartition:
    components: list[frozenset[VertexType]]
    cells: list[tuple[int, int, tuple[int, ...]]]  # (component, child index, vertices)
    quasi_order: dict[int, int] = field(default_factory=dict)
    prefix_ranks: list[int] = field(default_factory=list)


def idempotent_partition(t: Tournament, w: DecompositionWord, node: ForestNode,
                         type_of: Mapping[int, VertexType] | None = None) -> IdempotentPartition:
    if node.kind != IDEMPOTENT:
        raise InputError("idempotent_partition needs an idempotent node")
    if type_of is None:
        type_of = child_relative_types(w, node)
    graph = sync_graph(t, type_of)
    comps = graph.components()
    which = {a: ti for ti, comp in enumerate(comps) for a in comp}
    per_child = [child_vertices(w, c) for c in node.children]
    cells = []
    for ti in range(len(comps)):
        for ci, vs in enumerate(per_child):
            cell = tuple(v for v in vs if which[type_of[v]] == ti)
            if cell:
                cells.append((ti, ci, cell))
    quasi = {v: rank for rank, (_, _, cell) in enumerate(cells) for v in cell}
    everything = [v for _, _, cell in cells for v in cell]
    ranks = []
    for cut in range(1, len(cells)):
        left = [v for _, _, cell in cells[:cut] for v in cell]
        right = everything[len(left):]
        ranks.append(rank_of_cut(t, left, right))
    bound = cell_bound(w.k)
    for cut, r in enumerate(ranks, start=1):
        if r > bound:
            raise TheoryViolation(f"cut after cell {cut} has rank {r} > {bound}")
    return IdempotentPartition(comps, cells, quasi, ranks)


# --- the recursion --------------------------------------------------------


@dataclass
class OrderingResult:
    ordering: tuple[int, ...]
    cut_rank: int
    bound: int
    depth: Depth
    nodes: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "ordering": list(self.ordering),
            "cut_rank": self.cut_rank,
            "bound": self.bound,
            "depth": list(self.depth),
            "nodes": self.nodes,
            "notes": self.notes,
        }


class _Orderer:
    def __init__(self, t: Tournament, k: int):
        self.t = t
        self.k = k
        self.records: list[dict] = []
        self.notes: list[str] = []

    def measured(self, order: Sequence[int]) -> int:
        return cut_rank(self.t, order, order).max_rank

    def run(self, w: DecompositionWord, node: ForestNode, level: int) -> list[int]:
        depth = measure_depth(node)
        bound = f_bound(self.k, *depth)
        record = {"span": [node.start, node.end], "kind": node.kind, "level": level,
                  "depth": list(depth), "f_bound": bound}
        if node.kind == LEAF:
            x = w.letters[node.start]
            return [] if x.vertex is None else [x.vertex]
        if node.kind == BINARY:
            left = self.run(w, node.children[0], level + 1)
            right = self.run(w, node.children[1], level + 1)
            order = left + right
            cross = rank_of_cut(self.t, left, right) if left and right else 0
            if cross > self.k:
                raise TheoryViolation(f"binary node [{node.start},{node.end}]: cross cut rank {cross} > {self.k}")
            record["cross_rank"] = cross
        else:
            order = self.idempotent(w, node, level, depth, record)
        measured = self.measured(order)
        record["cut_rank"] = measured
        if measured > bound:
            raise TheoryViolation(
                f"node [{node.start},{node.end}] of depth {tuple(depth)}: cut-rank {measured} > f = {bound}")
        self.records.append(record)
        return order

    def idempotent(self, w, node, level, depth, record) -> list[int]:
        k = self.k
        tau = node.type
        part = idempotent_partition(self.t, w, node)
        record["components"] = len(part.components)
        record["cells"] = len(part.cells)
        record["cell_prefix_rank"] = max(part.prefix_ranks, default=0)
        loose = Depth(depth.p - 1, depth.q + 2 * depth.p)
        tight = Depth(depth.p - 1, depth.q + 2 * (depth.p - 1))
        order: list[int] = []
        cell_max = 0
        beyond_tight = 0
        for ti, ci, cell in part.cells:
            child = node.children[ci]
            theta = part.components[ti]
            sub_w, sub_f = w, child
            if not set(tau.inhabited) <= theta:
                sub_f, sub_w, _ = restrict_forest(child, w, theta)
                if sorted(child_vertices(sub_w, sub_f)) != sorted(cell):
                    raise TheoryViolation(f"restriction of child {ci} does not match cell ({ti}, {ci})")
            sub_depth = measure_depth(sub_f)
            if not sub_depth.within(loose):
                raise TheoryViolation(f"restricted child depth {tuple(sub_depth)} exceeds {tuple(loose)}")
            if not sub_depth.within(tight):
                beyond_tight += 1
            piece = self.run(sub_w, sub_f, level + 1)
            cell_max = max(cell_max, self.measured(piece))
            order.extend(piece)
        composed = 2 * cell_bound(k) + cell_max
        measured = self.measured(order)
        if measured > composed:
            raise TheoryViolation(f"idempotent node [{node.start},{node.end}]: cut-rank {measured} > {composed}")
        record["cell_cut_rank_max"] = cell_max
        record["composition_bound"] = composed
        record["restricted_depth_bound"] = list(loose)
        record["restricted_depth_tight"] = list(tight)
        if beyond_tight:
            self.notes.append(f"node [{node.start},{node.end}]: {beyond_tight} restricted children exceed "
                              f"the tighter depth {tuple(tight)}")
        return order


def build_ordering(t: Tournament, w: DecompositionWord, forest: ForestNode) -> OrderingResult:
    """Ordering of the word's vertices whose cut-rank is certified against ``f_bound``."""
    worker = _Orderer(t, w.k)
    order = tuple(worker.run(w, forest, 0))
    depth = measure_depth(forest)
    bound = f_bound(w.k, *depth)
    measured = cut_rank(t, order, order).max_rank
    if measured > bound:
        raise TheoryViolation(f"ordering cut-rank {measured} exceeds f({w.k}, {depth.p}, {depth.q}) = {bound}")
    records = sorted(worker.records, key=lambda r: (r["level"], r["span"]))
    return OrderingResult(order, measured, bound, depth, records, worker.notes)


def far_edge_direction(x_type: VertexType, y_type: VertexType, rho: Map) -> bool:
    """True iff ``x -> y`` for ``x`` at least two bags before ``y`` in an idempotent product."""
    return bool(y_type.bvec[rho[x_type.colour]])
