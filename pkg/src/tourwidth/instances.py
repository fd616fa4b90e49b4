"""Seeded test instances: random small-alphabet words and planted idempotent products."""

from __future__ import annotations

import random
from dataclasses import dataclass

from tourwidth.bags import DecompositionWord, Letter, decode
from tourwidth.bagtypes import BagType, fold_types, is_idempotent, letter_type, type_product
from tourwidth.errors import CapExceeded, InputError
from tourwidth.monoid import submonoid_closure
from tourwidth.forest import ForestNode, build_forest, idempotent
from tourwidth.ordering import bag_index, child_relative_types, span_vertex_types, sync_graph
from tourwidth.tournament import Tournament

Template = tuple[tuple[int, ...], bool, int, tuple[int, ...]]  # rho, has vertex, colour, in-set


def _random_template(rng: random.Random, k: int, vertex_bias: float = 0.75) -> Template:
    rho = tuple(rng.randrange(k) for _ in range(k))
    return rho, rng.random() < vertex_bias, rng.randrange(k), tuple(rng.randint(0, 1) for _ in range(k))


def _realise(k: int, templates: list[Template], first_id: int = 0) -> list[Letter]:
    out = []
    v = first_id
    for rho, has_vertex, colour, in_set in templates:
        if has_vertex:
            out.append(Letter(k, rho, v, colour, in_set))
            v += 1
        else:
            out.append(Letter(k, rho))
    return out


def random_word(rng: random.Random, k: int, length: int, alphabet: int = 3) -> DecompositionWord:
    """A word over at most ``alphabet`` letter shapes; vertex ids run 0, 1, ... in order.

    A small alphabet keeps the generated type submonoid small, which is what
    makes forests over random words cheap to certify.
    """
    if k < 1 or length < 0 or alphabet < 1:
        raise InputError("random_word needs k >= 1, length >= 0, alphabet >= 1")
    shapes = [_random_template(rng, k) for _ in range(alphabet)]
    return DecompositionWord(k, tuple(_realise(k, [rng.choice(shapes) for _ in range(length)])))


@dataclass
class PlantedInstance:
    """A product of ``n`` factors sharing one idempotent type, with its forest."""

    word: DecompositionWord
    forest: ForestNode
    tournament: Tournament
    tau: BagType
    components: int

    @property
    def bag_of(self) -> dict[int, int]:
        return bag_index(self.word, self.forest)

    @property
    def types(self):
        return child_relative_types(self.word, self.forest)


def _idempotent_block(rng: random.Random, k: int, max_len: int = 4, max_power: int = 30):
    """A letter-template block whose type is idempotent, or None."""
    base = [_random_template(rng, k) for _ in range(rng.randint(1, max_len))]
    if not any(tpl[1] for tpl in base):
        return None
    t = fold_types((letter_type(x) for x in _realise(k, base)), k)
    acc, power = t, 1
    while not is_idempotent(acc):
        if power >= max_power:
            return None
        acc = type_product(acc, t)
        power += 1
    return base * power, acc


def planted_instance(seed: int, n_bags: int, components: int | None = None, k: int = 2,
                     tries: int = 5000, monoid_cap: int = 600) -> PlantedInstance:
    """Search (seeded) for an idempotent block and repeat it ``n_bags`` times.

    Consecutive factors use one or two copies of the block, so factor lengths
    vary while every factor has the same idempotent type.  With ``components``
    set, only blocks whose synchronisation graph has that many components are
    accepted.
    """
    if n_bags < 2:
        raise InputError("a planted idempotent product needs at least two factors")
    rng = random.Random(seed)
    for _ in range(tries):
        found = _idempotent_block(rng, k)
        if found is None:
            continue
        block, tau = found
        if components is not None and _count_components(k, block, [1, 2, 1, 1, 2, 1][:n_bags]) != components:
            continue
        try:
            monoid = submonoid_closure([letter_type(x) for x in _realise(k, block)], cap=monoid_cap, k=k)
        except CapExceeded:
            continue
        inst = _assemble(k, block, tau, [rng.choice((1, 1, 2)) for _ in range(n_bags)], monoid)
        if components is None or inst.components == components:
            return inst
    raise InputError(f"no planted instance with {components} components found in {tries} tries")


def _assemble(k: int, block: list[Template], tau: BagType, reps: list[int], monoid) -> PlantedInstance:
    templates = [tpl for r in reps for tpl in block * r]
    word = DecompositionWord(k, tuple(_realise(k, templates)))
    shapes = {}
    kids = []
    pos = 0
    for r in reps:
        if r not in shapes:
            piece = word.slice(pos, pos + len(block) * r)
            shapes[r], _, _ = build_forest(piece, monoid=monoid)
        kids.append(shapes[r].shifted(pos))
        pos += len(block) * r
    root = idempotent(kids, tau)
    t, _ = decode(word)
    comps = len(sync_graph(t, child_relative_types(word, root)).components())
    return PlantedInstance(word, root, t, tau, comps)


def _count_components(k: int, block: list[Template], reps: list[int]) -> int:
    word = DecompositionWord(k, tuple(_realise(k, [tpl for r in reps for tpl in block * r])))
    types = {}
    pos = 0
    for r in reps:
        end = pos + len(block) * r
        types.update(span_vertex_types(word, pos, end - 1))
        pos = end
    t, _ = decode(word)
    return len(sync_graph(t, types).components())
