from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_bag
from tourwidth.bags import Bag, compose, identity_map, product, restrict_bag
from tourwidth.bagtypes import (
    BagType,
    VertexType,
    all_vertex_types,
    bag_type_of,
    f_map,
    gamma_pullback,
    is_idempotent,
    restrict_type,
    type_product,
    vertex_type_of,
)
from tourwidth.errors import InputError
from tourwidth.tournament import Orientation
from test_bags import Z, fig_product_left, fig_product_right


def fig_single_bag() -> Bag:
    # k=3: x -> 1, x -> 2, 3 -> x, every input -> y, x -> y; x gets colour 3, y colour 1
    return Bag(3, (0, 1), frozenset({(0, 1)}), {0: (0, 0, 1), 1: (1, 1, 1)}, {0: 2, 1: 0}, (1, 1, 2))


def chain_type() -> BagType:
    return BagType((0,), (VertexType(0, (1,)),), ())


def test_vertex_type_examples():
    one = Bag(1, (5,), frozenset(), {5: (1,)}, {5: 0}, (0,))
    assert vertex_type_of(one, 5) == VertexType(0, (1,))
    ab = product(fig_product_left(), fig_product_right())
    assert vertex_type_of(ab, Z) == VertexType(0, (0, 0))
    twins = Bag(2, (0, 1), frozenset({(0, 1)}), {0: (1, 0), 1: (1, 0)}, {0: 1, 1: 1}, (0, 1))
    assert vertex_type_of(twins, 0) == vertex_type_of(twins, 1)
    with pytest.raises(InputError):
        vertex_type_of(one, 0)


def test_f_map_examples():
    a = VertexType(1, (1, 0))
    ident = identity_map(2)
    assert f_map(ident, ident, a) == a
    assert f_map((0, 0), ident, a).bvec == (1, 1)
    assert all(f_map(ident, (1, 1), b).colour == 1 for b in all_vertex_types(2))


def test_f_map_composition_exhaustive_k2():
    maps = list(itertools.product(range(2), repeat=2))
    for g1, h1, g2, h2 in itertools.product(maps, repeat=4):
        for a in all_vertex_types(2):
            assert f_map(g2, h2, f_map(g1, h1, a)) == f_map(compose(g1, g2), compose(h2, h1), a)


def test_bag_type_examples():
    assert bag_type_of(Bag.empty(2, (1, 1))) == BagType((1, 1), (), ())
    twins = Bag(2, (0, 1), frozenset({(0, 1)}), {0: (1, 0), 1: (1, 0)}, {0: 1, 1: 1}, (0, 1))
    tt = bag_type_of(twins)
    assert len(tt.inhabited) == 1 and tt.hom == ()
    fig = bag_type_of(fig_single_bag())
    y, x = VertexType(0, (1, 1, 1)), VertexType(2, (0, 0, 1))
    assert fig.inhabited == (y, x)
    assert fig.hom == ((y, x, Orientation.B_TO_A),)
    assert fig.orientation(x, y) == Orientation.A_TO_B


def test_type_product_examples():
    empty = BagType((0, 1), (), ())
    assert type_product(empty, empty) == empty
    assert type_product(chain_type(), chain_type()) == chain_type()
    with pytest.raises(InputError):
        type_product(empty, chain_type())


@settings(max_examples=400, deadline=None)
@given(st.integers(1, 3), st.integers(0, 10**9))
def test_type_homomorphism(k, seed):
    rng = random.Random(seed)
    a = random_bag(rng, k, rng.randint(0, 4), 0)
    b = random_bag(rng, k, rng.randint(0, 4), 10)
    assert bag_type_of(product(a, b)) == type_product(bag_type_of(a), bag_type_of(b))


def test_is_idempotent_examples():
    assert is_idempotent(BagType((0, 1), (), ()))
    assert not is_idempotent(BagType((1, 0), (), ()))
    assert is_idempotent(chain_type())


def test_gamma_pullback_examples():
    ident = identity_map(2)
    everything = set(all_vertex_types(2))
    g = {VertexType(0, (1, 0)), VertexType(1, (1, 1))}
    assert gamma_pullback(g, ident, ident) == g
    assert gamma_pullback(everything, (1, 1), (0, 0)) == everything


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 2), st.integers(0, 10**9))
def test_gamma_pullback_matches_products(k, seed):
    rng = random.Random(seed)
    a = random_bag(rng, k, rng.randint(0, 3), 0)
    b = random_bag(rng, k, rng.randint(1, 4), 10)
    c = random_bag(rng, k, rng.randint(0, 3), 20)
    whole = product(product(a, b), c)
    gamma = set(rng.sample(all_vertex_types(k), rng.randint(0, len(all_vertex_types(k)))))
    pulled = gamma_pullback(gamma, a.rho, c.rho)
    direct = {v for v in b.vertices if vertex_type_of(whole, v) in gamma}
    assert direct == {v for v in b.vertices if vertex_type_of(b, v) in pulled}


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 2), st.integers(0, 10**9))
def test_restrict_type_matches_restrict_bag(k, seed):
    rng = random.Random(seed)
    b = random_bag(rng, k, rng.randint(0, 5))
    gamma = set(rng.sample(all_vertex_types(k), rng.randint(0, len(all_vertex_types(k)))))
    keep = [v for v in b.vertices if vertex_type_of(b, v) in gamma]
    assert bag_type_of(restrict_bag(b, keep)) == restrict_type(bag_type_of(b), gamma)


def test_restrict_type_examples(rng):
    t = bag_type_of(random_bag(rng, 2, 4))
    assert restrict_type(t, all_vertex_types(2)) == t
    assert restrict_type(t, ()) == BagType(t.rho, (), ())


def test_type_text_is_canonical():
    fig = bag_type_of(fig_single_bag())
    assert fig.to_text() == "rho=(2,2,3) inh=[1:111 3:001] hom=[1:111<-3:001]"
