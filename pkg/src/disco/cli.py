"""``disco`` command-line front end.

Exit codes: 0 success or TRUE, 1 FALSE or invalid proof, 2 UNKNOWN,
3 usage or input error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Sequence

from .checker import CheckContext, CheckLimits, ModelChecker, Status
from .claims import claims, load_corpus, run_claim
from .errors import DiscoError
from .formula import parse
from .game import TERMINAL, dump_strategy, load_game, load_strategy, simulate, validate_gamma
from .oracle import oracle_check
from .proof import parse_script, verify_script
from .rational import parse_rational

__all__ = ["main", "EXIT_OK", "EXIT_FALSE", "EXIT_UNKNOWN", "EXIT_USAGE"]

EXIT_OK, EXIT_FALSE, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3
_STATUS_CODE = {Status.TRUE: EXIT_OK, Status.FALSE: EXIT_FALSE, Status.UNKNOWN: EXIT_UNKNOWN}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {n}")
    return n


def _nonnegative(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {n}")
    return n


def _costs_line(costs: dict) -> str:
    return ", ".join(f"{a}: {q}" for a, q in sorted(costs.items()))


# ---------------------------------------------------------------- commands

def cmd_validate(args, out) -> int:
    g = load_game(args.game)
    print(f"ok: {len(g.states)} states, {g.n_transitions} transitions", file=out)
    return EXIT_OK


def cmd_check(args, out) -> int:
    gamma = validate_gamma(args.gamma)
    g = load_game(args.game)
    f = parse(args.formula)
    if args.oracle is not None:
        status = oracle_check(g, args.state, f, gamma, args.oracle)
        print(f"{status.value} oracle horizon {args.oracle}", file=out)
        return _STATUS_CODE[status]
    limits = CheckLimits(max_depth=args.max_depth) if args.max_depth else CheckLimits()
    verdict = ModelChecker(g, CheckContext(gamma, limits)).check(args.state, f)
    print(verdict.line(), file=out)
    if args.witness:
        if verdict.witness is not None:
            dump_strategy(verdict.witness, args.witness)
            print(f"witness written to {args.witness}", file=out)
        else:
            print("no witness (verdict is not TRUE or formula is not modal)", file=out)
    return _STATUS_CODE[verdict.status]


def cmd_simulate(args, out) -> int:
    gamma = validate_gamma(args.gamma)
    g = load_game(args.game)
    strategy = load_strategy(args.strategy)
    play = simulate(g, strategy, None, args.depth, args.start)
    for i, (profile, costs) in enumerate(zip(play.profiles, play.costs)):
        acts = ", ".join(f"{a}={profile[a]}" for a in g.agents)
        print(f"step {i}: {play.states[i]} [{acts}] costs {_costs_line(costs)} -> "
              f"{play.states[i + 1]}", file=out)
    if play.last == TERMINAL:
        print("play reached the terminal state", file=out)
    total = {a: Fraction(0) for a in g.agents}
    weight = Fraction(1)
    for costs in play.costs:
        for a in g.agents:
            total[a] += costs[a] * weight
        weight *= gamma
    print(f"cost: {_costs_line(total)}", file=out)
    return EXIT_OK


def cmd_prove(args, out) -> int:
    with open(args.script, encoding="utf-8") as fh:
        text = fh.read()
    report = verify_script(parse_script(text))
    if report.ok:
        print("VALID", file=out)
        return EXIT_OK
    line, code, msg = report.first_error
    print(f"INVALID line {line}: {code}: {msg}", file=out)
    return EXIT_FALSE


def cmd_reproduce(args, out) -> int:
    games = load_corpus(args.corpus)
    gamma = validate_gamma(args.gamma)
    failures = 0
    for claim in claims(gamma):
        verdict = run_claim(claim, games[claim.game])
        ok = verdict.status is claim.expected
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'} {claim.game} {claim.state} gamma={claim.gamma} "
              f"{claim.text()}: expected {claim.expected.value}, got {verdict.status.value}"
              f"  ({claim.note})", file=out)
    print(f"{len(claims(gamma)) - failures} passed, {failures} failed", file=out)
    return EXIT_OK if failures == 0 else EXIT_FALSE


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="disco", description="Budgeted coalition logic over discounted-cost games.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="validate a game file")
    v.add_argument("game")
    v.set_defaults(run=cmd_validate)

    c = sub.add_parser("check", help="model-check a formula at a state")
    c.add_argument("game")
    c.add_argument("--state", required=True)
    c.add_argument("--gamma", required=True, type=_rational)
    c.add_argument("--formula", required=True)
    c.add_argument("--max-depth", type=_positive)
    c.add_argument("--witness", metavar="PATH", help="write the witness strategy here")
    c.add_argument("--oracle", type=_positive, metavar="HORIZON",
                   help="use the brute-force oracle at this horizon instead")
    c.set_defaults(run=cmd_check)

    s = sub.add_parser("simulate", help="play a strategy against the default adversary")
    s.add_argument("game")
    s.add_argument("strategy")
    s.add_argument("--start", required=True)
    s.add_argument("--depth", required=True, type=_nonnegative)
    s.add_argument("--gamma", required=True, type=_rational)
    s.set_defaults(run=cmd_simulate)

    pr = sub.add_parser("prove", help="verify a proof script")
    pr.add_argument("script")
    pr.set_defaults(run=cmd_prove)

    r = sub.add_parser("reproduce", help="rerun the worked examples on the corpus")
    r.add_argument("--gamma", type=_rational, default=Fraction(1, 2),
                   help="discount factor for the first two games (default 1/2)")
    r.add_argument("--corpus", metavar="DIR", help="directory with fig1-3 game files")
    r.set_defaults(run=cmd_reproduce)
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.run(args, out)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
    except DiscoError as exc:
        print(f"error: {exc}", file=out)
    except OSError as exc:
        print(f"error: {exc}", file=out)
    return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
