"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 verification mismatch,
3 node budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, bounds, constructions, lemmas
from .bounds import BoundsInconsistency, Quantity
from .cache import ResultCache, default_path
from .halfint import HalfInt
from .perm import (
    DomainError,
    InvalidPermutation,
    ParseError,
    Permutation,
    diff_sequence,
    disc_of,
    msum_of,
    parse_permutations,
    window_profile,
)
from .solver import DEFAULT_BUDGET, SearchConfig, Status, WitnessMismatch, solve

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISMATCH = 2
EXIT_BUDGET = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which means "mismatch" here
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _at_least(lo: int):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {v}")
        return v

    return parse


def hjson(v: Optional[HalfInt]) -> Optional[dict]:
    return None if v is None else {"doubled": v.doubled, "text": str(v)}


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        payload = {"schema_version": SCHEMA_VERSION, "command": args.command, **payload}
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(lines))


# -- eval --------------------------------------------------------------------


def _read_source(args) -> str:
    if args.file:
        return Path(args.file).read_text(encoding="utf-8")
    if args.perm == ["-"] or not args.perm:
        return sys.stdin.read()
    return " ".join(args.perm)


def cmd_eval(args) -> int:
    text = _read_source(args)
    perms = parse_permutations(text)
    if not perms:
        raise UsageError("no permutation given")
    results, lines = [], []
    for p in perms:
        prof = window_profile(p, args.k)
        ms, dc = msum_of(p, args.k), disc_of(p, args.k)
        entry = {
            "permutation": list(p.entries),
            "n": p.n,
            "k": args.k,
            "sums": list(prof.sums),
            "max_sum": prof.max_sum,
            "mean": hjson(prof.mean),
            "msum": hjson(ms),
            "disc": hjson(dc),
        }
        lines.append(f"n={p.n} k={args.k} mean={prof.mean} max_sum={prof.max_sum} msum={ms} disc={dc}")
        if args.sums:
            lines.append("  sums: " + " ".join(map(str, prof.sums)))
        if args.diff:
            d = diff_sequence(p, args.k).d
            entry["diff"] = list(d)
            lines.append("  diff: " + " ".join(map(str, d)))
        results.append(entry)
    _emit(args, {"params": {"k": args.k}, "results": results}, lines)
    return EXIT_OK


# -- construct ---------------------------------------------------------------

FAMILIES = {
    "mod+1": constructions.Family.MOD_PLUS1_ODD_K,
    "mod-1": constructions.Family.MOD_MINUS1_ODD_K,
    "even-even": constructions.Family.EVEN_EVEN,
}


def cmd_construct(args) -> int:
    fam = FAMILIES[args.family]
    grid = None
    if fam is constructions.Family.EVEN_EVEN:
        if args.n is None or args.k is None:
            raise UsageError("even-even needs --n and --k")
        grid = constructions.fill_even_even(args.n, args.k)
        p = Permutation(grid.linearize())
        k = args.k
        params = {"n": args.n, "k": args.k}
    else:
        if args.k is None or args.m is None:
            raise UsageError(f"{args.family} needs --k and --m")
        if fam is constructions.Family.MOD_PLUS1_ODD_K:
            p = constructions.construct_mod_plus1(args.k, args.m)
        else:
            p = constructions.construct_mod_minus1(args.k, args.m)
        k = args.k
        params = {"k": args.k, "m": args.m}
    ms = msum_of(p, k)
    payload = {
        "params": {"family": args.family, **params},
        "results": {"n": p.n, "permutation": list(p.entries), "msum": hjson(ms), "max_sum": window_profile(p, k).max_sum},
    }
    if args.render == "grid" and grid is not None:
        lines = [grid.render()]
        payload["results"]["grid"] = [grid.row(a) for a in range(1, grid.rows + 1) if not (a == 1 and grid.r == 0)]
    else:
        lines = [" ".join(map(str, p.entries))]
    lines.append(f"# n={p.n} k={k} msum={ms}")
    _emit(args, payload, lines)
    return EXIT_OK


# -- bounds ------------------------------------------------------------------


def _open_cache(args) -> Optional[ResultCache]:
    if args.no_cache:
        return None
    cache = ResultCache(args.cache or default_path())
    for msg in cache.problems:
        print(f"warning: {msg}", file=sys.stderr)
    return cache


def cmd_bounds(args) -> int:
    cache = _open_cache(args)
    certs = cache.certificates() if cache is not None else None
    r = bounds.bound_report(args.n, args.k, args.quantity, certificates=certs)
    lines = [bounds.MARKDOWN_HEADER, r.markdown_row()] if args.markdown else [
        f"{r.quantity.value}({r.n},{r.k}) in [{r.lower}, {r.upper}]" + (f" = {r.exact}" if r.exact is not None else ""),
        "  lower: " + ", ".join(map(str, r.lower_provenance)),
        "  upper: " + ", ".join(map(str, r.upper_provenance)),
    ]
    _emit(args, {"params": {"n": args.n, "k": args.k, "quantity": r.quantity.value}, "results": r.to_json()}, lines)
    return EXIT_OK


# -- solve -------------------------------------------------------------------


def _config(args, n: int, k: int) -> SearchConfig:
    start = bounds.parity_floor(n, k) if getattr(args, "from_parity", False) else None
    return SearchConfig(node_budget=args.budget, thread_count=args.threads, start_lower=start)


def _outcome_json(o) -> dict:
    return {
        "status": o.status.value,
        "value": hjson(o.value),
        "witness": None if o.witness is None else list(o.witness.entries),
        "nodes": o.nodes_visited,
        "thresholds_tested": [{"threshold": hjson(t), "feasible": f} for t, f in o.thresholds_tested],
    }


def cmd_solve(args) -> int:
    cache = _open_cache(args)
    t0 = time.perf_counter()
    o = solve(args.n, args.k, args.quantity, _config(args, args.n, args.k), cache=cache)
    ms = int((time.perf_counter() - t0) * 1000)
    status = "off" if cache is None else ("hit" if o.from_cache else "miss")
    word = {Status.EXACT: "=", Status.LOWER_BOUND_ONLY: ">=", Status.BUDGET_EXHAUSTED: ">="}[o.status]
    lines = [f"{args.quantity}({args.n},{args.k}) {word} {o.value}  [{o.status.value}, {o.nodes_visited} nodes, cache {status}]"]
    if o.witness is not None:
        lines.append("witness: " + " ".join(map(str, o.witness.entries)))
    payload = {
        "params": {"n": args.n, "k": args.k, "quantity": args.quantity, "budget": args.budget, "threads": args.threads},
        "results": _outcome_json(o),
        "elapsed_ms": ms,
        "cache": status,
    }
    _emit(args, payload, lines)
    return EXIT_BUDGET if o.status is Status.BUDGET_EXHAUSTED else EXIT_OK


# -- table -------------------------------------------------------------------


def parse_range(text: str) -> range:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            return range(int(a), int(b) + 1)
        v = int(text)
        return range(v, v + 1)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A..B, got {text!r}") from None


def table_row(n: int, k: int, quantity: str, cfg: SearchConfig, cache=None) -> dict:
    r = bounds.bound_report(n, k, quantity)
    o = solve(n, k, quantity, cfg, cache=cache)
    if o.status is Status.EXACT:
        if r.exact is not None:
            flag = "MATCH" if o.value == r.exact else "MISMATCH"
        else:
            flag = "OPEN" if r.lower <= o.value <= r.upper else "MISMATCH"
    else:
        # only a lower bound from the solver
        flag = "MISMATCH" if o.value > r.upper else "OPEN"
    return {"n": n, "k": k, "bounds": r, "outcome": o, "flag": flag}


def cmd_table(args) -> int:
    cache = _open_cache(args)
    rows, lines, out = [], [], []
    lines.append(f"{'n':>4} {'known':>12} {'solver':>8}  flag")
    for n in args.n:
        if not 1 <= args.k < n:
            continue
        cfg = SearchConfig(
            node_budget=args.budget,
            thread_count=args.threads,
            start_lower=None if args.trust_bounds else bounds.parity_floor(n, args.k),
        )
        row = table_row(n, args.k, args.quantity, cfg, cache=cache if args.trust_bounds else None)
        rows.append(row)
        r, o = row["bounds"], row["outcome"]
        known = str(r.exact) if r.exact is not None else f"[{r.lower},{r.upper}]"
        solver = str(o.value) if o.status is Status.EXACT else f">={o.value}"
        lines.append(f"{n:>4} {known:>12} {solver:>8}  {row['flag']}")
        out.append({
            "n": n,
            "k": args.k,
            "known": r.to_json(),
            "solver": _outcome_json(o),
            "flag": row["flag"],
        })
    _emit(args, {"params": {"k": args.k, "quantity": args.quantity, "n": [args.n.start, args.n.stop - 1]}, "results": out}, lines)
    if any(r["flag"] == "MISMATCH" for r in rows):
        return EXIT_MISMATCH
    if any(r["outcome"].status is Status.BUDGET_EXHAUSTED for r in rows):
        return EXIT_BUDGET
    return EXIT_OK


# -- lemmas ------------------------------------------------------------------


def cmd_lemmas(args) -> int:
    if args.cases < 1:
        raise UsageError("--cases must be >= 1")
    suites = [
        lemmas.run_max_inequality_suite(args.seed, args.cases),
        lemmas.run_nesting_suite(args.seed, args.cases),
        lemmas.run_evenness_suite(args.seed, args.cases),
    ]
    lines = [f"{s.name}: {s.passed}/{s.cases} {'ok' if s.ok else 'FAILED'}" for s in suites]
    results = {
        "suites": [
            {"name": s.name, "cases": s.cases, "passed": s.passed, "counterexample": s.counterexample}
            for s in suites
        ]
    }
    if args.even_k_probe:
        found = lemmas.even_k_probe(args.seed, args.cases)
        results["even_k_counterexample"] = found
        lines.append("even-k probe: " + ("violation found " + json.dumps(found) if found else "no violation found"))
    _emit(args, {"params": {"seed": args.seed, "cases": args.cases}, "results": results}, lines)
    return EXIT_OK if all(s.ok for s in suites) else EXIT_MISMATCH


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ksum", description="Minimal maximal k-consecutive sums of cyclic permutations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, cache=False):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if cache:
            p.add_argument("--cache", help="JSON-lines cache file (default: $KSUM_CACHE or ./.ksum-cache.jsonl)")
            p.add_argument("--no-cache", action="store_true")

    def search(p):
        p.add_argument("--budget", type=_at_least(0), default=DEFAULT_BUDGET, help="node budget, 0 for unlimited")
        p.add_argument("--threads", type=_at_least(1), default=1)

    def quantity(p):
        p.add_argument("--quantity", choices=[q.value for q in Quantity], default="msum")

    p = sub.add_parser("eval", help="window sums, msum and disc of given permutations")
    p.add_argument("perm", nargs="*", help="inline permutation, or '-' for stdin")
    p.add_argument("--file", help="file with one permutation per line")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--sums", action="store_true", help="print every window sum")
    p.add_argument("--diff", action="store_true", help="print the difference sequence")
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("construct", help="build an explicit optimal permutation")
    p.add_argument("family", choices=sorted(FAMILIES))
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--render", choices=["list", "grid"], default="list")
    common(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("bounds", help="known bounds with provenance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    quantity(p)
    p.add_argument("--markdown", action="store_true")
    common(p, cache=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("solve", help="exact value by branch and bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    quantity(p)
    search(p)
    p.add_argument("--from-parity", action="store_true", help="start at the parity floor instead of the bounds")
    common(p, cache=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table", help="known values against the solver for a range of n")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=parse_range, required=True, help="N or A..B")
    quantity(p)
    search(p)
    p.add_argument("--trust-bounds", action="store_true", help="start the solver at the bounds instead of the parity floor")
    common(p, cache=True)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("lemmas", help="seeded property checks of the peak and run-count inequalities")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--even-k-probe", action="store_true")
    common(p)
    p.set_defaults(func=cmd_lemmas)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, InvalidPermutation, DomainError, UsageError, FileNotFoundError) as exc:
        print(f"ksum {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BoundsInconsistency, WitnessMismatch) as exc:
        print(f"ksum {args.command}: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    raise SystemExit(main())
