"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed past
pytest's capture) or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import sys
import time
from contextlib import nullcontext

import pytest

from conftest import random_bag
from tourwidth.bags import decode, decode_rows, inverted_path_word, product, rotating_word
from tourwidth.bagtypes import all_vertex_types, bag_type_of, type_product
from tourwidth.cli import main as cli_main
from tourwidth.cli import PipelineConfig, run_pipeline
from tourwidth.decomp import decomposition_from_ordering, verify_roundtrip
from tourwidth.errors import CapExceeded
from tourwidth.forest import IDEMPOTENT, Depth, FactorIndex, build_forest, restrict_forest, validate_forest, word_types
from tourwidth.instances import planted_instance, random_word
from tourwidth.ordering import (
    bag_index,
    cell_bound,
    child_relative_types,
    far_edge_direction,
    idempotent_partition,
    span_vertex_types,
    sync_graph,
)
from tourwidth.queries import order_by_queries
from tourwidth.tournament import (
    cut_rank,
    cut_rows,
    min_cutrank_bruteforce,
    random_tournament,
    rank_gf2,
    rotating,
)

ROTATING_SIZES = list(range(7, 102, 2))
_capsys = None


def report(num: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}"
    with (_capsys.disabled() if _capsys is not None else nullcontext()):
        print(line)
    assert ok, line


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    global _capsys
    _capsys = capsys
    yield
    _capsys = None


# --- shared instance pools -------------------------------------------------


def planted_pool() -> list:
    """Planted idempotent products: 110 with two or three components, 30 with one."""
    if getattr(planted_pool, "cache", None) is None:
        rng = random.Random(77)
        pool = []
        for i in range(140):
            comps = 1 if i < 30 else (2 if i % 3 else 3)
            n_bags = 200 if i % 20 == 0 else rng.randint(5, 40)
            pool.append(planted_instance(5000 + i, n_bags, components=comps, k=2 if comps < 3 else 3))
        planted_pool.cache = pool
    return planted_pool.cache


# --- criteria ----------------------------------------------------------------


def test_criterion_1_type_homomorphism():
    rng = random.Random(1)
    start = time.perf_counter()
    bad = 0
    trials = 5000
    for i in range(trials):
        k = 1 + i % 3
        a = random_bag(rng, k, rng.randint(0, 4), 0)
        b = random_bag(rng, k, rng.randint(0, 4), 10)
        if bag_type_of(product(a, b)) != type_product(bag_type_of(a), bag_type_of(b)):
            bad += 1
    elapsed = time.perf_counter() - start
    report(1, bad == 0 and elapsed < 30,
           f"{trials} bag pairs, {bad} homomorphism failures, {elapsed:.1f}s (limit 30s)")


def test_criterion_2_width_sandwich():
    rng = random.Random(2)
    bad = []
    trials = 1000
    for i in range(trials):
        n = rng.randint(1, 64)
        t = random_tournament(n, rng)
        order = list(range(n))
        rng.shuffle(order)
        rep = cut_rank(t, order)
        r, classes = rep.max_rank, rep.max_classes
        ok = (classes == 0 or math.ceil(math.log2(classes)) <= r) and r <= classes
        w = decomposition_from_ordering(t, order)
        ok = ok and w.k == 2 ** r + 1 and verify_roundtrip(t, order, w).ok
        if not ok:
            bad.append(i)
    report(2, not bad, f"{trials} (tournament, ordering) pairs with n <= 64, {len(bad)} violations")


def _criterion3_words() -> list:
    words = [rotating_word(n) for n in range(7, 200, 6)] + [rotating_word(199)]
    words += [inverted_path_word(n) for n in range(2, 201, 6)] + [inverted_path_word(200)]
    return words


def test_criterion_3_forest_certification():
    rng = random.Random(3)
    words = _criterion3_words()
    family_count = len(words)
    skipped = 0
    while len(words) < family_count + 150:
        w = random_word(rng, rng.randint(1, 3), rng.randint(1, 60))
        try:
            build_forest(w, cap=2000, strategy="simon")
        except CapExceeded:
            skipped += 1
            continue
        words.append(w)
    bad = []
    exhaustive = 0
    for w in words:
        f, depth, m = build_forest(w, cap=2000, strategy="simon")
        if validate_forest(f, w) is not None or not depth.within(Depth(len(m), 2 * len(m))):
            bad.append(("forest", len(w)))
            continue
        if len(w) <= 50:
            exhaustive += 1
            idx = FactorIndex(f)
            types = word_types(w)
            for i in range(len(w)):
                acc = types[i]
                if idx.query(i, i) != acc:
                    bad.append(("factor", i, i))
                for j in range(i + 1, len(w)):
                    acc = type_product(acc, types[j])
                    if idx.query(i, j) != acc:
                        bad.append(("factor", i, j))
    report(3, not bad,
           f"{family_count} family words up to n=200 and {len(words) - family_count} random words "
           f"(k <= 3; {skipped} skipped past submonoid cap 2000), {exhaustive} checked exhaustively, "
           f"{len(bad)} violations")


def test_criterion_4_restriction_bound():
    rng = random.Random(4)
    sources = [rotating_word(n) for n in (7, 15, 31, 63)] + [inverted_path_word(n) for n in (6, 20, 50)]
    pairs = 0
    bad = []
    while pairs < 240:
        if pairs < 60:
            w = sources[pairs % len(sources)]
        else:
            w = random_word(rng, rng.randint(1, 3), rng.randint(2, 50))
        try:
            f, (p, q), _ = build_forest(w, cap=2000, strategy="simon")
        except CapExceeded:
            continue
        universe = all_vertex_types(w.k)
        gamma = set(rng.sample(universe, rng.randint(0, len(universe))))
        rf, rw, depth = restrict_forest(f, w, gamma)
        t, _ = decode(w)
        keep = sorted(v for v, a in span_vertex_types(w, 0, len(w) - 1).items() if a in gamma)
        order, rows = decode_rows(rw)
        mask = sum(1 << v for v in keep)
        exact = sorted(order) == keep and all(rows[v] == t.rows[v] & mask for v in keep)
        if not (exact and depth.within(Depth(p, q + 2 * p)) and validate_forest(rf, rw) is None):
            bad.append((len(w), tuple(depth), (p, q)))
        pairs += 1
    report(4, not bad, f"{pairs} (word, type set) pairs, depth <= (p, q+2p) and exact induced decode, "
                       f"{len(bad)} violations")


def test_criterion_5_rotating_pipeline(tmp_path):
    start = time.perf_counter()
    runs = []
    bad = []
    for n in ROTATING_SIZES:
        path = tmp_path / f"rot{n}.json"
        code = cli_main(["run", "--gen", "rotating", str(n), "--report", str(path)])
        data = json.loads(path.read_text())
        runs.append(data)
        if code != 0 or data["cut_rank"] > data["f_bound"] or not data["checks"]["output_roundtrips"]:
            bad.append(n)
    elapsed = time.perf_counter() - start
    worst = max(runs, key=lambda d: d["cut_rank"])
    report(5, not bad and elapsed < 120,
           f"rotating n=7..101 ({len(runs)} runs), max cut-rank {worst['cut_rank']} vs f bound "
           f"{worst['f_bound']} at depth {tuple(worst['forest']['depth'])}, {len(bad)} failures, "
           f"{elapsed:.1f}s (limit 120s)")


def _cell_cut_ranks(t, cells) -> list[int]:
    """Prefix-of-cells cut ranks recomputed by direct elimination."""
    flat = [v for cell in cells for v in cell]
    out = []
    for cut in range(1, len(cells)):
        size = sum(len(c) for c in cells[:cut])
        out.append(rank_gf2(cut_rows(t, flat[:size], flat[size:])))
    return out


def _rotating_idempotent_nodes():
    for n in ROTATING_SIZES:
        w = rotating_word(n)
        f, _, _ = build_forest(w)
        t = rotating(n)
        for node, _, _ in f.walk():
            if node.kind == IDEMPOTENT:
                yield t, w, node


def test_criterion_6_idempotent_partition_rank():
    bad = []
    nodes = 0
    worst = 0
    for t, w, node in _rotating_idempotent_nodes():
        part = idempotent_partition(t, w, node)
        ranks = _cell_cut_ranks(t, [cell for _, _, cell in part.cells])
        nodes += 1
        worst = max([worst] + ranks)
        if any(r > cell_bound(w.k) for r in ranks):
            bad.append(("rotating", len(w)))
    multi = [inst for inst in planted_pool() if inst.components >= 2]
    for inst in multi:
        part = idempotent_partition(inst.tournament, inst.word, inst.forest)
        ranks = _cell_cut_ranks(inst.tournament, [cell for _, _, cell in part.cells])
        worst = max([worst] + ranks)
        if any(r > cell_bound(inst.word.k) for r in ranks):
            bad.append(("planted", len(inst.word)))
    report(6, not bad and len(multi) >= 100,
           f"{nodes} idempotent nodes from the rotating runs and {len(multi)} planted multi-component "
           f"instances, max prefix-of-cells rank {worst} (bound k(2^k+1) = 10 at k=2, 27 at k=3), "
           f"{len(bad)} violations")


def test_criterion_7_far_edges():
    pairs = 0
    bad = 0
    instances = 0
    cases = [(t, w, node) for t, w, node in _rotating_idempotent_nodes()]
    cases += [(inst.tournament, inst.word, inst.forest) for inst in planted_pool()]
    for t, w, node in cases:
        instances += 1
        types = child_relative_types(w, node)
        idx = bag_index(w, node)
        rho = node.type.rho
        for x, y in itertools.permutations(types, 2):
            if idx[y] - idx[x] >= 2:
                pairs += 1
                if t.edge(x, y) != far_edge_direction(types[x], types[y], rho):
                    bad += 1
    report(7, bad == 0, f"{instances} idempotent instances, {pairs} pairs with index gap >= 2, "
                        f"{bad} mismatches")


def test_criterion_8_query_ordering():
    pool = planted_pool()
    chosen = [inst for inst in pool if inst.components == 1][:15]
    chosen += [inst for inst in pool if inst.components == 2][:25]
    chosen += [inst for inst in pool if inst.components == 3][:20]
    picked = {id(inst) for inst in chosen}
    chosen += [inst for inst in pool if len(inst.forest.children) == 200 and id(inst) not in picked]
    bad = []
    comps_checked = 0
    for inst in chosen:
        t, types, idx = inst.tournament, inst.types, inst.bag_of
        mod5 = {v: i % 5 for v, i in idx.items()}
        for comp in sync_graph(t, types).components():
            comps_checked += 1
            got = order_by_queries(t, types, mod5, comp, inst.tau.rho)
            truth = [[idx[x] < idx[y] for y in got.vertices] for x in got.vertices]
            if got.before.tolist() != truth:
                bad.append((len(inst.word), len(comp)))
    sizes = sorted({len(inst.forest.children) for inst in chosen})
    counts = {c: sum(1 for inst in chosen if inst.components == c) for c in (1, 2, 3)}
    report(8, not bad and len(chosen) >= 50,
           f"{len(chosen)} planted instances (components 1/2/3: {counts[1]}/{counts[2]}/{counts[3]}, "
           f"{sizes[0]}..{sizes[-1]} bags), {comps_checked} components, {len(bad)} order mismatches")


def test_criterion_9_bruteforce_floor():
    rng = random.Random(9)
    start = time.perf_counter()
    seen = set()
    violations = []
    monotone = []
    balanced = 0
    while len(seen) < 2000:
        t = random_tournament(6, rng)
        if t.rows in seen:
            continue
        seen.add(t.rows)
        floor, order = min_cutrank_bruteforce(t)
        w = decomposition_from_ordering(t, order)
        cfg = PipelineConfig(t, "random(6)", "bruteforce", w, 1000, 8, "auto")
        code, rep = run_pipeline(cfg)
        balanced += rep["forest"]["strategy"] == "balanced"
        if code != 0 or floor > rep["cut_rank"]:
            violations.append(t.rows)
        for drop in range(6):
            keep = [v for v in range(6) if v != drop]
            if min_cutrank_bruteforce(t.induced(keep))[0] > floor:
                monotone.append(t.rows)
    elapsed = time.perf_counter() - start
    report(9, not violations and not monotone and elapsed < 300,
           f"{len(seen)} distinct 6-vertex tournaments ({balanced} via the balanced fallback), "
           f"{len(violations)} floor violations, {len(monotone)} monotonicity violations, "
           f"{elapsed:.1f}s (limit 300s)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
