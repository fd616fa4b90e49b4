"""Command line front-end: gen, run, verify, oracle, forest.

Exit codes: 0 success, 1 bad parameters or a failed internal bound, 2 witness
or verification mismatch, 3 a size cap was exceeded, 4 unparsable input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from tourwidth.bags import DecompositionWord, decode_rows, encode_trivial, inverted_path_word, rotating_word
from tourwidth.decomp import (
    compare_tournaments,
    decomposition_from_ordering,
    relative_width_oracle,
    verify_roundtrip,
    width_report,
)
from tourwidth.errors import CapExceeded, InputError, TheoryViolation
from tourwidth.forest import STRATEGIES, build_forest, dump_forest
from tourwidth.monoid import DEFAULT_SUBMONOID_CAP
from tourwidth.ordering import build_ordering, f_bound
from tourwidth.tournament import DEFAULT_BRUTEFORCE_CAP, Tournament, cut_rank, generate, min_cutrank_bruteforce

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_MISMATCH = 2
EXIT_CAP = 3
EXIT_PARSE = 4

BUILTIN_WORDS = {"rotating": rotating_word, "inverted_path": inverted_path_word}


class ParseFailure(Exception):
    pass


def _read(path: str, parser):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseFailure(f"{path}: {exc.strerror}") from None
    try:
        return parser(text)
    except InputError as exc:
        raise ParseFailure(f"{path}: {exc}") from None


def _family_params(args) -> tuple[str, list[int]]:
    params = list(args.params)
    if args.family == "random" and len(params) == 1:
        params.append(args.seed)
    return args.family, params


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit_report(args, report: dict) -> None:
    if args.report:
        Path(args.report).write_text(_dump_json(report))


# --- gen ------------------------------------------------------------------


def cmd_gen(args) -> int:
    family, params = _family_params(args)
    t = generate(family, *params)
    out = Path(args.out)
    tour_path = out.with_suffix(".tour")
    tour_path.write_text(t.to_text())
    written = [str(tour_path)]
    if family in BUILTIN_WORDS:
        w = BUILTIN_WORDS[family](*params)
        word_path = out.with_suffix(".word")
        word_path.write_text(w.to_text())
        written.append(str(word_path))
        order, _ = decode_rows(w)
        print(f"{family}{tuple(params)}: n={t.n}, width-{w.k} word, insertion order "
              f"{' '.join(str(v + 1) for v in order)}")
    else:
        print(f"{family}{tuple(params)}: n={t.n}")
    for p in written:
        print(f"wrote {p}")
    return EXIT_OK


# --- run ------------------------------------------------------------------


@dataclass
class PipelineConfig:
    tournament: Tournament
    source: str
    witness: str
    word: DecompositionWord | None
    submonoid_cap: int
    bruteforce_cap: int
    strategy: str

    def __post_init__(self):
        if self.submonoid_cap <= 0 or self.bruteforce_cap <= 0:
            raise InputError("caps must be positive")


def _pipeline_config(args) -> PipelineConfig:
    if bool(args.tournament) == bool(args.gen):
        raise InputError("give exactly one input: --tournament FILE or --gen FAMILY PARAMS...")
    word = None
    builtin = None
    if args.tournament:
        t = _read(args.tournament, Tournament.from_text)
        source = args.tournament
    else:
        family, *raw = args.gen
        try:
            params = [int(x) for x in raw]
        except ValueError:
            raise InputError(f"generator parameters must be integers, got {raw}") from None
        if family == "random" and len(params) == 1:
            params.append(args.seed)
        t = generate(family, *params)
        source = f"{family}({', '.join(map(str, params))})"
        if family in BUILTIN_WORDS:
            builtin = BUILTIN_WORDS[family](*params)
    if args.word:
        witness = args.word
        word = _read(args.word, DecompositionWord.from_text)
    elif args.witness == "builtin" or (args.witness is None and builtin is not None):
        if builtin is None:
            raise InputError("no built-in decomposition for this input")
        witness, word = "builtin", builtin
    else:
        witness = args.witness or "bruteforce"
    return PipelineConfig(t, source, witness, word, args.submonoid_cap, args.bruteforce_cap, args.forest)


def acquire_witness(cfg: PipelineConfig) -> DecompositionWord:
    if cfg.word is not None:
        return cfg.word
    t = cfg.tournament
    if cfg.witness == "trivial":
        return encode_trivial(t, range(t.n))
    _, order = min_cutrank_bruteforce(t, cfg.bruteforce_cap)
    return decomposition_from_ordering(t, order)


def run_pipeline(cfg: PipelineConfig) -> tuple[int, dict]:
    """The full pipeline; returns the exit code and the JSON report."""
    t = cfg.tournament
    report: dict = {"input": {"source": cfg.source, "n": t.n, "witness": cfg.witness}, "checks": {}}
    checks = report["checks"]
    w = acquire_witness(cfg)
    report["input"]["k"] = w.k
    _, rows = decode_rows(w)
    match = compare_tournaments(t, rows)
    checks["witness_decodes_to_input"] = match.ok
    if not match.ok:
        report["witness_mismatch"] = match.to_json()
        return EXIT_MISMATCH, report
    if t.n == 0:
        report.update(ordering=[], cut_rank=0, output_width=2)
        return EXIT_OK, report
    forest, depth, monoid = build_forest(w, cap=cfg.submonoid_cap, strategy=cfg.strategy)
    report["forest"] = {
        "depth": list(depth),
        "strategy": cfg.strategy if cfg.strategy != "auto" else ("simon" if monoid is not None else "balanced"),
        "submonoid_size": len(monoid) if monoid is not None else None,
    }
    result = build_ordering(t, w, forest)
    bound = f_bound(w.k, *depth)
    measured = cut_rank(t, result.ordering)
    out = decomposition_from_ordering(t, result.ordering)
    trip = verify_roundtrip(t, result.ordering, out)
    checks["cut_rank_within_f_bound"] = measured.max_rank <= bound
    checks["output_order_is_2^r+1"] = out.k == 2 ** measured.max_rank + 1
    checks["output_roundtrips"] = trip.ok
    classes = relative_width_oracle(t, result.ordering)
    checks["width_sandwich"] = (classes == 0 or math.ceil(math.log2(classes)) <= measured.max_rank) \
        and measured.max_rank <= classes
    report.update(
        f_bound=bound,
        cut_rank=measured.max_rank,
        prefix_ranks=list(measured.ranks),
        output_width=out.k,
        output_classes=width_report(out).max_classes,
        ordering=list(result.ordering),
        nodes=result.nodes,
        notes=result.notes,
    )
    report["_word"] = out
    return (EXIT_OK if all(checks.values()) else EXIT_FAILED), report


def cmd_run(args) -> int:
    cfg = _pipeline_config(args)
    try:
        code, report = run_pipeline(cfg)
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        _emit_report(args, {"input": {"source": cfg.source}, "error": str(exc), "exit": EXIT_CAP})
        return EXIT_CAP
    word = report.pop("_word", None)
    if word is not None and args.out_word:
        Path(args.out_word).write_text(word.to_text())
    report["exit"] = code
    _emit_report(args, report)
    if code == EXIT_MISMATCH:
        print(f"witness mismatch: {report['witness_mismatch']['message']}", file=sys.stderr)
        return code
    d = report.get("forest", {}).get("depth", [0, 0])
    print(f"{cfg.source}: n={cfg.tournament.n} k={report['input']['k']} depth=({d[0]},{d[1]}) "
          f"f={report.get('f_bound', '-')} cut-rank={report['cut_rank']} output width={report['output_width']}")
    failed = [name for name, ok in report["checks"].items() if not ok]
    print("all checks passed" if not failed else f"failed checks: {', '.join(failed)}")
    return code


# --- verify / oracle / forest ---------------------------------------------


def cmd_verify(args) -> int:
    t = _read(args.tournament, Tournament.from_text)
    w = _read(args.word, DecompositionWord.from_text)
    _, rows = decode_rows(w)
    match = compare_tournaments(t, rows)
    report = {"match": match.to_json(), "width": width_report(w).to_json()}
    _emit_report(args, report)
    if not match.ok:
        print(f"mismatch: {match.message}")
        return EXIT_MISMATCH
    print(f"match: word of order {w.k} decodes to the {t.n}-vertex tournament "
          f"(max {report['width']['max_classes']} colour classes in use)")
    return EXIT_OK


def cmd_oracle(args) -> int:
    t = _read(args.tournament, Tournament.from_text)
    r, order = min_cutrank_bruteforce(t, args.bruteforce_cap)
    _emit_report(args, {"min_cut_rank": r, "ordering": list(order)})
    print(f"minimum cut-rank {r}, attained by {' '.join(map(str, order))}")
    return EXIT_OK


def cmd_forest(args) -> int:
    w = _read(args.word, DecompositionWord.from_text)
    forest, depth, _ = build_forest(w, cap=args.submonoid_cap, strategy=args.forest)
    text = dump_forest(forest)
    if args.report:
        Path(args.report).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


# --- wiring ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--submonoid-cap", type=int, default=DEFAULT_SUBMONOID_CAP)
    common.add_argument("--bruteforce-cap", type=int, default=DEFAULT_BRUTEFORCE_CAP)
    common.add_argument("--seed", type=int, default=0, help="seed for the random family")
    common.add_argument("--report", help="write a JSON report (forest: the dump) to this path")
    common.add_argument("--forest", choices=STRATEGIES, default="auto",
                        help="forest construction (auto falls back to balanced past the cap)")

    p = argparse.ArgumentParser(prog="tourwidth", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", parents=[common], help="write a tournament (and a known word)")
    g.add_argument("family")
    g.add_argument("params", nargs="*", type=int)
    g.add_argument("--out", required=True, help="output prefix; .tour and .word are appended")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", parents=[common], help="forest, ordering, decomposition, verification")
    src = r.add_mutually_exclusive_group()
    src.add_argument("--tournament", help="tournament file")
    src.add_argument("--gen", nargs="+", metavar="FAMILY", help="generator family and integer parameters")
    wit = r.add_mutually_exclusive_group()
    wit.add_argument("--word", help="witness decomposition file")
    wit.add_argument("--witness", choices=("builtin", "trivial", "bruteforce"))
    r.add_argument("--out-word", help="write the output decomposition here")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", parents=[common], help="decode a word and compare with a tournament")
    v.add_argument("tournament")
    v.add_argument("word")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", parents=[common], help="exact minimum cut-rank by brute force")
    o.add_argument("tournament")
    o.set_defaults(func=cmd_oracle)

    f = sub.add_parser("forest", parents=[common], help="dump the factorisation forest of a word")
    f.add_argument("word")
    f.set_defaults(func=cmd_forest)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseFailure as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except TheoryViolation as exc:
        print(f"internal bound violated: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
