"""Recovering the bag order of an idempotent product from adjacency queries.

Inputs are the tournament, each vertex's type relative to its own factor,
each vertex's factor index modulo 5, and the shared idempotent recolouring.
No true indices are used.  This is a verification tool for the claim that
the factor order is definable from that information; the pipeline itself
never calls it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from tourwidth.bags import Map
from tourwidth.bagtypes import VertexType
from tourwidth.errors import InputError, TheoryViolation
from tourwidth.ordering import far_edge_direction, sync_graph
from tourwidth.tournament import Tournament


@dataclass
class QueryOrder:
    vertices: list[int]
    before: np.ndarray  # before[a, b]: vertices[a] sits in a strictly earlier factor

    def precedes(self, x: int, y: int) -> bool:
        pos = {v: i for i, v in enumerate(self.vertices)}
        return bool(self.before[pos[x], pos[y]])

    def ranks(self) -> dict[int, int]:
        """Dense rank of each vertex's factor (0 for the earliest)."""
        earlier = self.before.sum(axis=0)
        levels = sorted(set(earlier.tolist()))
        dense = {e: i for i, e in enumerate(levels)}
        return {v: dense[int(e)] for v, e in zip(self.vertices, earlier)}


def _bmm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.int32) @ b.astype(np.int32)) > 0


def _far_residue(i: int, j: int) -> int:
    """A residue at circular distance two or more from both; -1 when ``i, j`` are themselves far apart."""
    if min((i - j) % 5, (j - i) % 5) >= 2:
        return -1
    for r in range(5):
        if min((r - i) % 5, (i - r) % 5) >= 2 and min((r - j) % 5, (j - r) % 5) >= 2:
            return r
    raise AssertionError("unreachable: two residues always leave a far one")


_FAR = np.array([[_far_residue(i, j) for j in range(5)] for i in range(5)])


class _Solver:
    def __init__(self, t: Tournament, verts: list[int], mod5: Mapping[int, int]):
        self.verts = verts
        n = len(verts)
        self.edge = np.zeros((n, n), dtype=bool)
        for a, u in enumerate(verts):
            row = t.rows[u]
            for b, v in enumerate(verts):
                self.edge[a, b] = (row >> v) & 1
        self.m = np.array([mod5[v] % 5 for v in verts])
        diff = (self.m[:, None] - self.m[None, :]) % 5
        self.dist = np.minimum(diff, 5 - diff)

    def complete(self, phi: np.ndarray, idx: np.ndarray) -> np.ndarray:
        """Exact strict order on ``idx`` from a comparator valid on pairs two or more factors apart.

        ``idx`` must meet every factor.  Near residues are resolved through a
        witness whose residue is far from both; without one, the residues alone
        decide, because both vertices then sit between two consecutive
        witnesses.
        """
        phi = phi[np.ix_(idx, idx)]
        m = self.m[idx]
        dist = self.dist[np.ix_(idx, idx)]
        out = phi.copy()
        near = dist <= 1
        choice = _FAR[m[:, None], m[None, :]]
        for r in range(5):
            pick = near & (choice == r)
            if not pick.any():
                continue
            z = m == r
            between = _bmm(phi[:, z], phi[z, :])
            by_residue = ((m[:, None] - r) % 5) < ((m[None, :] - r) % 5)
            decided = np.where(between, True, np.where(between.T, False, by_residue))
            out[pick] = decided[pick]
        np.fill_diagonal(out, False)
        return out


def order_by_queries(t: Tournament, type_of: Mapping[int, VertexType], mod5: Mapping[int, int],
                     component: Iterable[VertexType], rho: Map) -> QueryOrder:
    """Strict factor order on the vertices whose type lies in ``component``.

    ``component`` must be connected in the synchronisation graph built from
    ``type_of``; every type in it must occur in every factor.
    """
    theta = frozenset(component)
    verts = sorted(v for v, a in type_of.items() if a in theta)
    if not verts:
        raise InputError("component has no vertices")
    graph = sync_graph(t, {v: type_of[v] for v in verts})
    if set(graph.nodes) != theta:
        raise InputError("component lists types that no vertex has")
    adj: dict[VertexType, list[VertexType]] = {a: [] for a in graph.nodes}
    for a, b in graph.edges:
        adj[a].append(b)
        adj[b].append(a)
    root = min(theta)
    parent = {root: None}
    queue = deque([root])
    while queue:
        a = queue.popleft()
        for b in sorted(adj[a]):
            if b not in parent:
                parent[b] = a
                queue.append(b)
    if len(parent) != len(theta):
        raise InputError("component is not connected in the synchronisation graph")

    s = _Solver(t, verts, mod5)
    n = len(verts)
    of_type = {a: np.array([i for i, v in enumerate(verts) if type_of[v] == a]) for a in theta}

    def same_type(a: VertexType) -> np.ndarray:
        fwd = far_edge_direction(a, a, rho)
        phi = s.edge == fwd
        return s.complete(phi, of_type[a])

    exact = {a: same_type(a) for a in theta}

    def pair(a: VertexType, b: VertexType) -> tuple[np.ndarray, np.ndarray]:
        ia, ib = of_type[a], of_type[b]
        p1 = far_edge_direction(a, b, rho)  # a earlier: a -> b ?
        p2 = far_edge_direction(b, a, rho)  # b earlier: b -> a ?
        e_ab = s.edge[np.ix_(ia, ib)]
        if p1 == p2:
            cross = e_ab == p1
        else:
            # the far edge ignores the order; anchor on a backward edge instead
            backward = ~e_ab if p1 else e_ab
            sa, sb = exact[a], exact[b]
            eq_a = ~sa & ~sa.T
            eq_b = ~sb & ~sb.T
            anc = _bmm(eq_a, backward)        # a-vertex -> b-anchors near its factor
            anc_b = _bmm(eq_b, backward.T)    # b-vertex -> a-anchors near its factor
            from_a = _bmm(anc, sb)
            from_b = _bmm(sa, anc_b.T)
            first_a = ~sa.any(axis=0)
            cross = np.where(anc.any(axis=1)[:, None], from_a,
                             np.where(anc_b.any(axis=1)[None, :], from_b, first_a[:, None]))
        idx = np.concatenate([ia, ib])
        phi = np.zeros((n, n), dtype=bool)
        phi[np.ix_(ia, ia)] = exact[a]
        phi[np.ix_(ib, ib)] = exact[b]
        phi[np.ix_(ia, ib)] = cross
        phi[np.ix_(ib, ia)] = ~cross.T
        full = np.zeros((n, n), dtype=bool)
        full[np.ix_(idx, idx)] = s.complete(phi, idx)
        return full, idx

    rep = np.full(n, -1)
    rep[of_type[root]] = of_type[root]
    order_bfs = [a for a in parent if a != root]
    for b in order_bfs:
        a = parent[b]
        full, _ = pair(a, b)
        ia, ib = of_type[a], of_type[b]
        same = ~full[np.ix_(ia, ib)] & ~full[np.ix_(ib, ia)].T
        for col, vb in enumerate(ib):
            hits = np.flatnonzero(same[:, col])
            if hits.size == 0:
                raise TheoryViolation(f"no vertex of type {a} shares a factor with vertex {verts[vb]}")
            rep[vb] = rep[ia[hits[0]]]
    root_order = np.zeros((n, n), dtype=bool)
    root_order[np.ix_(of_type[root], of_type[root])] = exact[root]
    before = root_order[np.ix_(rep, rep)]
    return QueryOrder(verts, before)
