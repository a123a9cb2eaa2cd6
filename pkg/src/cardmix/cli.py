"""Command-line front end.

Every subcommand prints plot-ready CSV or JSON; exact values are always
emitted as ``num/den`` strings next to a 12-significant-digit decimal.

Exit codes: 0 ok, 1 usage error, 2 refused by budget, 3 internal error.
"""

from __future__ import annotations

import argparse
import math
import re
import sys

from . import asymptotics, exact, simulate
from .deck import (
    BudgetExceeded,
    CompositionMismatch,
    Deck,
    PatternError,
    lattice_path,
    make_pattern,
    parse_pattern,
    z_matrix,
)
from .report import approx_str, exact_fields, fraction_str, to_csv, to_json

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


_POWER = re.compile(r"^\s*(\d+)\s*\^\s*(\d+)\s*$")


def _parse_int_term(term: str) -> tuple[int, tuple[int, int] | None]:
    m = _POWER.match(term)
    if m:
        base, exp = int(m.group(1)), int(m.group(2))
        return base**exp, (base, exp)
    try:
        return int(term), None
    except ValueError:
        raise UsageError(f"bad shuffle size {term!r}") from None


def parse_a_range(text: str) -> list[int]:
    """``16``, ``16,32,64``, ``1..10`` or ``2^4..2^10`` (a doubling grid)."""
    values: list[int] = []
    for part in text.split(","):
        if ".." in part:
            lo_s, hi_s = part.split("..", 1)
            lo, lo_pow = _parse_int_term(lo_s)
            hi, hi_pow = _parse_int_term(hi_s)
            if lo > hi:
                raise UsageError(f"empty range {part!r}")
            if lo_pow and hi_pow and lo_pow[0] == hi_pow[0] and lo_pow[0] > 1:
                base = lo_pow[0]
                values.extend(base**e for e in range(lo_pow[1], hi_pow[1] + 1))
            else:
                values.extend(range(lo, hi + 1))
        else:
            values.append(_parse_int_term(part)[0])
    if not values or any(a < 1 for a in values):
        raise UsageError("shuffle sizes must be positive integers")
    return values


def _deck_arg(text: str | None, what: str) -> Deck:
    if not text:
        raise UsageError(f"{what} is required")
    return parse_pattern(text)


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_tv_distinct(args) -> str:
    if args.n < 1:
        raise UsageError("n must be positive")
    grid = parse_a_range(args.shuffle)
    kappa = asymptotics.kappa1_distinct(args.n) if args.first_order else None
    rows = []
    for a in grid:
        tv = exact.tv_distinct(a, args.n)
        row = {"a": a, **exact_fields(tv)}
        if kappa is not None:
            row["first_order"] = approx_str(kappa / a)
        rows.append(row)
    if args.format == "json":
        out = {"n": args.n, "rows": rows}
        if kappa is not None:
            out["kappa1"] = exact_fields(kappa)
        return to_json(out)
    header = ["a", "exact", "approx"] + (["first_order"] if kappa is not None else [])
    return to_csv(header, ([r[h] for h in header] for r in rows))


def cmd_kappa(args) -> str:
    chosen = [x is not None for x in (args.source, args.target, args.source_distinct)]
    if sum(chosen) != 1:
        raise UsageError("give exactly one of --source, --target, --source-distinct")
    if args.source_distinct is not None:
        n = args.source_distinct
        if n < 1:
            raise UsageError("n must be positive")
        value = asymptotics.kappa1_distinct(n)
        out = {"kind": "kappa1", "context": f"{n} distinct cards", **exact_fields(value),
               "N": str(math.factorial(n)), "approximation": asymptotics.kappa1_approx(n)}
        out["kappa"] = out["exact"]
    elif args.source is not None:
        out = asymptotics.kappa1_enum(parse_pattern(args.source), budget=args.budget).to_dict()
    else:
        out = asymptotics.kappabar1(parse_pattern(args.target)).to_dict()
    if args.format == "csv":
        return to_csv(["kind", "context", "exact", "approx", "N"],
                      [[out["kind"], out["context"], out["exact"], out["approx"], out["N"]]])
    return to_json(out)


def cmd_cut_sweep(args) -> str:
    sweep = asymptotics.cut_sweep(_deck_arg(args.pattern, "--pattern"))
    best = sweep.argmin
    if args.format == "json":
        return to_json({
            "pattern": sweep.pattern.cards,
            "argmin": best,
            "rows": [{"k": k, **exact_fields(r.value), "argmin": k == best} for k, r in sweep.rows],
        })
    return to_csv(["k", "exact", "approx", "argmin"],
                  ([k, fraction_str(r.value), approx_str(r.value), int(k == best)]
                   for k, r in sweep.rows))


def cmd_simulate(args) -> str:
    if args.pattern and (args.source or args.target):
        raise UsageError("use --pattern with --mode, or --source/--target alone")
    if args.source and args.target:
        raise UsageError("give only one of --source and --target")
    mode = args.mode
    text = args.pattern
    if args.source:
        mode, text = "fixed_source", args.source
    elif args.target:
        mode, text = "fixed_target", args.target
    deck = _deck_arg(text, "--pattern")
    if args.trials < 1:
        raise UsageError("trials must be positive")
    if args.shuffle_single < 1:
        raise UsageError("a must be positive")
    sampler = simulate.ShuffleSampler(args.shuffle_single, len(deck), seed=args.seed)
    if deck.composition().orbit_size() > simulate.TALLY_LIMIT:
        raise simulate.OrbitTooLarge("orbit", deck.composition().orbit_size(), simulate.TALLY_LIMIT)
    ref = None
    if not args.no_exact and len(deck) <= exact.DEFAULT_MAX_N:
        ref = simulate.exact_distribution(args.shuffle_single, deck, mode)
    report = simulate.estimate_tv(sampler, mode, deck, args.trials, exact=ref)
    out = report.to_dict()
    if args.frequencies:
        out["frequencies"] = report.frequencies
    return to_json(out)


def cmd_lattice(args) -> str:
    deck = _deck_arg(args.pattern, "--pattern")
    u, v = args.u or deck.alphabet[0], args.v or (deck.alphabet[1] if len(deck.alphabet) > 1 else None)
    if v is None:
        raise UsageError("pattern has only one value")
    return to_json({"pattern": deck.cards, **lattice_path(deck, u, v).to_dict()})


def cmd_eulerian(args) -> str:
    if args.n < 1:
        raise UsageError("n must be positive")
    row = exact.eulerian_row(args.n)
    if args.format == "json":
        return to_json({"n": args.n, "row": [str(x) for x in row]})
    return to_csv(["d", "eulerian"], enumerate(row))


def cmd_transition(args) -> str:
    src = _deck_arg(args.source, "--source")
    dst = _deck_arg(args.target, "--target")
    b = exact.descent_polynomial(src, dst)
    rows = []
    for a in parse_a_range(args.shuffle):
        p = exact.prob_from_descents(a, b)
        rows.append({"a": a, **exact_fields(p)})
    c1 = asymptotics.c1(src, dst)
    if args.format == "csv":
        return to_csv(["a", "exact", "approx"], ([r["a"], r["exact"], r["approx"]] for r in rows))
    return to_json({"source": src.cards, "target": dst.cards, "descent_polynomial": b,
                    "c1": exact_fields(c1), "rows": rows})


def cmd_zmatrix(args) -> str:
    deck = _deck_arg(args.pattern, "--pattern")
    zm = z_matrix(deck)
    if args.format == "csv":
        return to_csv(["", *zm.alphabet], ([v, *row] for v, row in zip(zm.alphabet, zm.entries)))
    return zm.to_json() + "\n"


def cmd_pattern(args) -> str:
    deck = make_pattern(args.style, args.players, args.hand_size)
    return deck.cards + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--budget", type=int, default=10**7, help="orbit enumeration budget")

    parser = _Parser(prog="cardmix", description="Randomness of shuffled and dealt card games.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("tv-distinct", parents=[common], help="exact TV for n distinct cards")
    p.add_argument("-n", type=int, default=52)
    p.add_argument("-a", "--shuffle", default="1..1024", help="e.g. 2^4..2^10 or 16,32")
    p.add_argument("--first-order", action="store_true", help="add the kappa1/a column")
    p.set_defaults(func=cmd_tv_distinct, default_format="csv")

    p = sub.add_parser("kappa", parents=[common], help="kappa1 or kappabar1")
    p.add_argument("--source", help="fixed source deck (orbit enumeration)")
    p.add_argument("--target", help="fixed target / dealing pattern (recursion)")
    p.add_argument("--source-distinct", type=int, help="n distinct cards (closed form)")
    p.set_defaults(func=cmd_kappa, default_format="json")

    p = sub.add_parser("cut-sweep", parents=[common], help="kappabar1 for every cut")
    p.add_argument("--pattern", required=True)
    p.set_defaults(func=cmd_cut_sweep, default_format="csv")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo TV for a small orbit")
    p.add_argument("--mode", choices=["fixed_source", "fixed_target"], default="fixed_target")
    p.add_argument("--pattern")
    p.add_argument("--source")
    p.add_argument("--target")
    p.add_argument("-a", "--shuffle", dest="shuffle_single", type=int, required=True)
    p.add_argument("--trials", type=int, default=10**5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-exact", action="store_true", help="skip the exact chi-square reference")
    p.add_argument("--frequencies", action="store_true", help="include outcome counts")
    p.set_defaults(func=cmd_simulate, default_format="json")

    p = sub.add_parser("lattice", parents=[common], help="lattice path of two hands")
    p.add_argument("--pattern", required=True)
    p.add_argument("u", nargs="?")
    p.add_argument("v", nargs="?")
    p.set_defaults(func=cmd_lattice, default_format="json")

    p = sub.add_parser("eulerian", parents=[common], help="Eulerian numbers <n, d>")
    p.add_argument("-n", type=int, required=True)
    p.set_defaults(func=cmd_eulerian, default_format="csv")

    p = sub.add_parser("transition", parents=[common], help="exact P_a(source -> target)")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("-a", "--shuffle", default="2")
    p.set_defaults(func=cmd_transition, default_format="json")

    p = sub.add_parser("zmatrix", parents=[common], help="Z matrix of a pattern")
    p.add_argument("--pattern", required=True)
    p.set_defaults(func=cmd_zmatrix, default_format="json")

    p = sub.add_parser("pattern", parents=[common], help="expand a named dealing style")
    p.add_argument("style", choices=["ordered", "cyclic", "back_and_forth"])
    p.add_argument("players", type=int)
    p.add_argument("hand_size", type=int)
    p.set_defaults(func=cmd_pattern, default_format="csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        text = args.func(args)
    except (UsageError, PatternError, CompositionMismatch, ValueError) as exc:
        print(f"cardmix: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"cardmix: refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except Exception as exc:  # noqa: BLE001
        print(f"cardmix: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    _emit(args, text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
