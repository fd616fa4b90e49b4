from __future__ import annotations

import pytest

from tourwidth.bags import DecompositionWord, Letter, decode
from tourwidth.bagtypes import VertexType
from tourwidth.errors import InputError
from tourwidth.forest import build_forest
from tourwidth.instances import planted_instance
from tourwidth.ordering import bag_index, child_relative_types, sync_graph
from tourwidth.queries import order_by_queries
from tourwidth.tournament import Tournament


def check_components(t, types, idx, rho):
    mod5 = {v: i % 5 for v, i in idx.items()}
    for comp in sync_graph(t, types).components():
        got = order_by_queries(t, types, mod5, comp, rho)
        for x in got.vertices:
            for y in got.vertices:
                assert got.precedes(x, y) == (idx[x] < idx[y])


def test_chain_single_type():
    w = DecompositionWord(1, tuple(Letter(1, (0,), v, 0, (1,)) for v in range(40)))
    f, _, _ = build_forest(w)
    t, _ = decode(w)
    types = child_relative_types(w, f)
    idx = bag_index(w, f)
    got = order_by_queries(t, types, {v: i % 5 for v, i in idx.items()}, {VertexType(0, (1,))}, (0,))
    assert got.ranks() == idx


def test_single_vertex():
    a = VertexType(0, (1,))
    got = order_by_queries(Tournament(1, (0,)), {0: a}, {0: 3}, {a}, (0,))
    assert got.vertices == [0] and not got.before.any()


@pytest.mark.parametrize("seed,components,n_bags", [(11, 1, 30), (12, 2, 25), (13, 2, 60)])
def test_planted_orders_recovered(seed, components, n_bags):
    inst = planted_instance(seed, n_bags, components=components)
    check_components(inst.tournament, inst.types, inst.bag_of, inst.tau.rho)


def test_rejects_bad_components():
    a, b = VertexType(0, (1,)), VertexType(0, (0,))
    t = Tournament.from_edges(2, [(0, 1)])
    with pytest.raises(InputError):
        order_by_queries(t, {0: a, 1: a}, {0: 0, 1: 1}, {a, b}, (0,))
    with pytest.raises(InputError):
        order_by_queries(t, {0: a, 1: a}, {0: 0, 1: 1}, {b}, (0,))
