"""Linear decompositions from orderings, width measurement and round-trip checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from tourwidth.bags import DecompositionWord, Letter, PatchedMap, SparseBits, decode_rows
from tourwidth.errors import InputError, TheoryViolation
from tourwidth.tournament import Tournament, check_ordering, cut_rank


# above this order, letters store recolourings and in-sets sparsely
DENSE_LIMIT = 1 << 12


def _classes(t: Tournament, prefix: Sequence[int], suffix_mask: int) -> dict[int, list[int]]:
    """Prefix vertices grouped by out-row into the suffix, keyed in first-appearance order."""
    groups: dict[int, list[int]] = {}
    for u in prefix:
        groups.setdefault(t.rows[u] & suffix_mask, []).append(u)
    return groups


def decomposition_from_ordering(t: Tournament, order: Sequence[int]) -> DecompositionWord:
    """Word of order ``2^r + 1`` realising ``(t, order)``, ``r`` the cut-rank of ``order``.

    Before the (i+1)-th vertex is placed, the placed vertices carry the label of
    their neighbourhood class towards the unplaced ones (labels by first
    appearance).  The letter's in-set is read off class representatives and
    its recolouring moves each class to the class that contains it one step
    later.  The new vertex takes its class label directly, since a letter's
    recolouring does not act on its own vertex; the last colour stays unused.
    """
    check_ordering(t, order)
    n = t.n
    r = cut_rank(t, order).max_rank
    k = 2 ** r + 1
    spare = k - 1
    remaining = (1 << n) - 1
    label: dict[int, int] = {}
    letters = []
    for i, v in enumerate(order):
        ins = {c for u, c in label.items() if (t.rows[u] >> v) & 1}
        remaining &= ~(1 << v)
        groups = _classes(t, order[: i + 1], remaining)
        if len(groups) > spare:
            raise TheoryViolation(f"prefix {i + 1}: {len(groups)} classes exceed 2^{r}")
        new_label = {}
        for c, members in enumerate(groups.values()):
            for u in members:
                new_label[u] = c
        moved: dict[int, int] = {}
        for u, c in label.items():
            if moved.setdefault(c, new_label[u]) != new_label[u]:
                raise TheoryViolation(f"prefix {i + 1}: class {c} splits, refinement is not monotone")
        moved[spare] = new_label[v]
        if k <= DENSE_LIMIT:
            rho = tuple(moved.get(c, c) for c in range(k))
            in_set = tuple(int(c in ins) for c in range(k))
        else:
            rho, in_set = PatchedMap(k, moved), SparseBits(k, ins)
        letters.append(Letter(k, rho, v, new_label[v], in_set))
        label = new_label
    return DecompositionWord(k, tuple(letters))


def relative_width_oracle(t: Tournament, order: Sequence[int]) -> int:
    """Largest number of distinct out-rows from a proper prefix into its suffix."""
    return cut_rank(t, order).max_classes


@dataclass
class WidthReport:
    declared: int
    max_classes: int
    per_step: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"declared_order": self.declared, "max_classes": self.max_classes, "per_step": self.per_step}


def width_report(w: DecompositionWord) -> WidthReport:
    """Occupied colour classes after every letter of ``w``."""
    k = w.k
    colour: dict[int, int] = {}
    counts = []
    for x in w.letters:
        for v, c in colour.items():
            colour[v] = x.rho[c]
        if x.vertex is not None:
            colour[x.vertex] = x.colour
        counts.append(len(set(colour.values())))
    report = WidthReport(k, max(counts, default=0), counts)
    if report.max_classes > k:
        raise TheoryViolation("more occupied classes than colours")
    return report


@dataclass
class RoundtripReport:
    ok: bool
    message: str = "ok"
    edge: tuple[int, int] | None = None
    position: int | None = None

    def to_json(self) -> dict:
        out = {"ok": self.ok, "message": self.message}
        if self.edge is not None:
            out["edge"] = list(self.edge)
        if self.position is not None:
            out["position"] = self.position
        return out


def compare_tournaments(expected: Tournament, got_rows: dict[int, int]) -> RoundtripReport:
    if sorted(got_rows) != list(range(expected.n)):
        return RoundtripReport(False, f"vertex sets differ: expected 0..{expected.n - 1}, word has {sorted(got_rows)}")
    for u in range(expected.n):
        diff = expected.rows[u] ^ got_rows[u]
        if diff:
            v = (diff & -diff).bit_length() - 1
            if expected.edge(u, v):
                return RoundtripReport(False, f"edge {u}->{v} expected, word gives {v}->{u}", edge=(u, v))
            return RoundtripReport(False, f"edge {v}->{u} expected, word gives {u}->{v}", edge=(v, u))
    return RoundtripReport(True)


def verify_roundtrip(t: Tournament, order: Sequence[int] | None, w: DecompositionWord) -> RoundtripReport:
    """Decode ``w`` and compare with ``t`` (and with ``order`` when given)."""
    try:
        got_order, rows = decode_rows(w)
    except InputError as exc:
        return RoundtripReport(False, str(exc))
    if order is not None:
        order = list(order)
        for pos, (a, b) in enumerate(zip(order, got_order)):
            if a != b:
                return RoundtripReport(False, f"position {pos}: expected vertex {a}, word places {b}", position=pos)
        if len(order) != len(got_order):
            return RoundtripReport(False, "ordering lengths differ", position=min(len(order), len(got_order)))
    return compare_tournaments(t, rows)
