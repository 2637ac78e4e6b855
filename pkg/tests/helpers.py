"""Random instance generators shared by the property tests."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from disco.formula import Implies, Modal, Not, Var
from disco.game import TERMINAL, validate_game

COSTS = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2))
BUDGETS = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2),
           Fraction(3), Fraction(5), Fraction(8))
GAMMAS = (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3))


def random_game_desc(rng: random.Random, max_states: int = 4, max_actions: int = 3,
                     agents=("a", "b")) -> dict:
    """Serial game description; every profile gets one or two outcomes."""
    states = [f"s{i}" for i in range(rng.randint(1, max_states))]
    actions = ["eps"] + [f"x{i}" for i in range(rng.randint(1, max_actions - 1))]
    transitions = []
    for s in states:
        for profile in itertools.product(actions, repeat=len(agents)):
            for _ in range(rng.choice((1, 1, 1, 2))):
                dest = TERMINAL if rng.random() < 0.05 else rng.choice(states)
                costs = {a: str(rng.choice(COSTS)) for a, x in zip(agents, profile)
                         if x != "eps"}
                transitions.append({"from": s, "profile": dict(zip(agents, profile)),
                                    "costs": costs, "to": dest})
    valuation = {v: [s for s in states if rng.random() < 0.7] for v in ("p", "q")}
    return {"agents": list(agents), "states": states, "actions": actions, "epsilon": "eps",
            "transitions": transitions, "valuation": valuation}


def random_game(rng: random.Random, **kw):
    return validate_game(random_game_desc(rng, **kw))


def random_budget(rng: random.Random, coalition) -> dict:
    return {a: rng.choice(BUDGETS) for a in coalition}


def random_coalition(rng: random.Random, agents=("a", "b")) -> tuple:
    return rng.choice([(agents[0],), (agents[1],), tuple(agents)])


def random_body(rng: random.Random, depth: int = 1, agents=("a", "b")):
    """Small body formula; occasionally nests one modality."""
    p, q = Var("p"), Var("q")
    base = rng.choice([p, q, Not(p), Implies(p, q), Implies(Not(p), q)])
    if depth > 0 and rng.random() < 0.2:
        c = random_coalition(rng, agents)
        return Modal(random_budget(rng, c), base)
    return base


def random_formula(rng: random.Random, depth: int, agents=("a", "b", "c"),
                   variables=("p", "q", "r")):
    """Arbitrary core formula of nesting depth at most ``depth``."""
    if depth == 0 or rng.random() < 0.25:
        return Var(rng.choice(variables))
    k = rng.randrange(3)
    if k == 0:
        return Not(random_formula(rng, depth - 1, agents, variables))
    if k == 1:
        return Implies(random_formula(rng, depth - 1, agents, variables),
                       random_formula(rng, depth - 1, agents, variables))
    members = rng.sample(agents, rng.randint(0, len(agents)))
    budget = {a: Fraction(rng.randint(0, 12), rng.randint(1, 6)) for a in members}
    return Modal(budget, random_formula(rng, depth - 1, agents, variables))


def mutate_script(script, rng: random.Random):
    """Corrupt exactly one line of ``script`` in a way no valid derivation
    can absorb; returns ``(mutant, description)``."""
    from dataclasses import replace

    from disco.proof import AXIOMS, MP, Axiom, Hyp, Nec, Script

    k = rng.randrange(len(script.lines))
    line = script.lines[k]
    just = line.justification
    options = ["negate", "foreign"]
    if isinstance(just, MP):
        options += ["swap", "self"]
    if isinstance(just, Axiom):
        options.append("rename")
    if isinstance(just, Hyp):
        options.append("hyp_range")
    if isinstance(just, Nec):
        options.append("nec_budget")
    kind = rng.choice(options)
    if kind == "negate":
        new = replace(line, formula=Not(line.formula))
    elif kind == "foreign":
        new = replace(line, formula=Var("zz_mutant"))
    elif kind == "swap":
        new = replace(line, justification=MP(just.j, just.i))
    elif kind == "self":
        new = replace(line, justification=MP(line.index, just.j))
    elif kind == "rename":
        other = rng.choice([a for a in AXIOMS if a != just.name])
        new = replace(line, justification=Axiom(other))
    elif kind == "hyp_range":
        new = replace(line, justification=Hyp(len(script.hypotheses) + 1))
    else:
        bumped = tuple((a, q + 1) for a, q in just.budget) or (("zz", Fraction(1)),)
        new = replace(line, justification=Nec(bumped, just.i))
    lines = script.lines[:k] + (new,) + script.lines[k + 1:]
    return Script(script.hypotheses, lines), f"line {line.index}: {kind}"


def script(hyps, *lines):
    """Build a proof script from formula texts and justifications."""
    from disco.formula import parse
    from disco.proof import Line, Script

    return Script(tuple(parse(x) for x in hyps),
                  tuple(Line(i, parse(f), j) for i, (f, j) in enumerate(lines, start=1)))


def conj_premise():
    """Derivation of ``p, q |- p & q``."""
    from disco.proof import MP, Hyp, Taut

    return script(["p", "q"],
                  ("p", Hyp(1)), ("q", Hyp(2)),
                  ("p -> q -> p & q", Taut()),
                  ("q -> p & q", MP(1, 3)),
                  ("p & q", MP(2, 4)))
