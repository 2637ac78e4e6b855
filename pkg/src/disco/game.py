"""Finite concurrent games with per-agent transition costs.

A game has non-terminal states, a reserved terminal state ``#t``, a finite
action set containing a zero-cost action, a nondeterministic mechanism of
``(state, complete profile, costs, next state)`` quadruples and a valuation.
Internally a complete profile is a tuple of actions aligned with
``Game.agents`` and a cost vector is a tuple of Fractions aligned the same way.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import CheckError, GameError
from .formula import is_agent_name
from .rational import as_rational

TERMINAL = "#t"
WILDCARD = "*"

__all__ = [
    "TERMINAL", "Game", "Play", "StrategyAutomaton", "AdversaryPolicy",
    "validate_game", "load_game", "successors", "is_play", "play_satisfies",
    "discounted_cost", "simulate", "validate_gamma", "step_key",
    "load_strategy", "strategy_to_json", "dump_strategy", "bind_strategy",
]


def validate_gamma(gamma) -> Fraction:
    try:
        g = as_rational(gamma)
    except (TypeError, ValueError) as exc:
        raise CheckError(f"discount factor must be an exact rational: {exc}", "E-GAMMA")
    if not 0 < g < 1:
        raise CheckError(f"discount factor must lie in (0,1), got {g}", "E-GAMMA")
    return g


@dataclass(frozen=True, eq=False)
class Game:
    agents: tuple[str, ...]
    states: tuple[str, ...]
    actions: tuple[str, ...]
    epsilon: str
    # state -> profile tuple -> outcomes ((costs tuple, destination), ...)
    mechanism: Mapping[str, Mapping[tuple[str, ...], tuple[tuple[tuple[Fraction, ...], str], ...]]]
    valuation: Mapping[str, frozenset]
    comment: tuple[str, ...] = ()
    _max_cost: dict = field(default_factory=dict, repr=False)
    _moves: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for i, a in enumerate(self.agents):
            top = Fraction(0)
            for table in self.mechanism.values():
                for outs in table.values():
                    for costs, _ in outs:
                        top = max(top, costs[i])
            self._max_cost[a] = top

    @property
    def n_transitions(self) -> int:
        return sum(len(outs) for table in self.mechanism.values() for outs in table.values())

    def agent_index(self, agent: str) -> int:
        try:
            return self.agents.index(agent)
        except ValueError:
            raise GameError(f"unknown agent {agent!r}", "E-BAD-REF") from None

    def require_state(self, state: str) -> None:
        if state not in self.mechanism:
            raise GameError(f"unknown or terminal state {state!r}", "E-BAD-REF")

    def holds(self, var: str, state: str) -> bool:
        return state in self.valuation.get(var, ())

    def max_cost(self, agent: str) -> Fraction:
        """Largest single-step cost ``agent`` can be charged anywhere."""
        self.agent_index(agent)
        return self._max_cost[agent]

    def profile_tuple(self, profile: Mapping[str, str]) -> tuple[str, ...]:
        if set(profile) != set(self.agents):
            raise GameError(f"profile must assign exactly the agents {list(self.agents)}",
                            "E-BAD-REF")
        out = tuple(profile[a] for a in self.agents)
        for act in out:
            if act not in self.actions:
                raise GameError(f"unknown action {act!r}", "E-BAD-REF")
        return out

    def outcomes(self, state: str, profile: tuple[str, ...]):
        return self.mechanism[state][profile]

    def costs_dict(self, costs: Sequence[Fraction]) -> dict[str, Fraction]:
        return dict(zip(self.agents, costs))

    def profiles(self, agents: Sequence[str] | None = None) -> Iterable[tuple[str, ...]]:
        """Profiles over ``agents`` (default: all) in lexicographic order."""
        n = len(self.agents) if agents is None else len(agents)
        return itertools.product(self.actions, repeat=n)

    def successors(self, state: str, profile: Mapping[str, str]):
        return successors(self, state, profile)

    def coalition_moves(self, coalition: Sequence[str], state: str):
        """``[(alpha, outcomes), ...]`` for every coalition profile ``alpha``.

        ``alpha`` is a tuple aligned with ``sorted(coalition)`` and profiles
        come in lexicographic order.  ``outcomes`` lists every
        ``(complete profile, costs, next state)`` any completion of ``alpha``
        can produce.
        """
        members = tuple(sorted(coalition))
        key = (members, state)
        cached = self._moves.get(key)
        if cached is not None:
            return cached
        self.require_state(state)
        slots = [self.agent_index(a) for a in members]
        groups: dict[tuple, list] = {}
        for profile, outs in self.mechanism[state].items():
            alpha = tuple(profile[i] for i in slots)
            bucket = groups.setdefault(alpha, [])
            for costs, dest in outs:
                bucket.append((profile, costs, dest))
        moves = tuple((alpha, tuple(groups[alpha])) for alpha in sorted(groups))
        self._moves[key] = moves
        return moves


def successors(g: Game, state: str, profile: Mapping[str, str]):
    """All ``(costs, next_state)`` the mechanism allows; costs as sorted pairs."""
    g.require_state(state)
    key = g.profile_tuple(profile)
    return {(tuple(zip(g.agents, costs)), dest) for costs, dest in g.outcomes(state, key)}


# -------------------------------------------------------------- validation

def _names(desc: Mapping, key: str) -> tuple[str, ...]:
    raw = desc.get(key)
    if not isinstance(raw, list) or not raw:
        raise GameError(f"field {key!r} must be a nonempty array", "E-BAD-REF")
    for name in raw:
        if not is_agent_name(name):
            raise GameError(f"bad name {name!r} in {key!r}", "E-BAD-REF")
    if len(set(raw)) != len(raw):
        raise GameError(f"duplicate names in {key!r}", "E-BAD-REF")
    return tuple(raw)


def _fmt_profile(agents, profile) -> str:
    return "{" + ", ".join(f"{a}: {x}" for a, x in zip(agents, profile)) + "}"


def validate_game(description: Mapping) -> Game:
    """Build a :class:`Game` from a raw (JSON-shaped) description.

    Profile entries may use ``"*"``; for every complete profile only the
    matching entries with the most non-wildcard agents apply.  Unmentioned
    agents in a profile are wildcards and unmentioned costs are zero.
    """
    agents = tuple(sorted(_names(description, "agents")))
    states = _names(description, "states")
    actions = tuple(sorted(_names(description, "actions")))
    epsilon = description.get("epsilon")
    if epsilon not in actions:
        raise GameError(f"zero-cost action {epsilon!r} is not an action", "E-BAD-REF")

    entries: dict[str, list] = {s: [] for s in states}
    for n, tr in enumerate(description.get("transitions", [])):
        src, dest = tr.get("from"), tr.get("to")
        if src not in entries:
            raise GameError(f"transition {n}: unknown source state {src!r}", "E-BAD-REF")
        if dest != TERMINAL and dest not in entries:
            raise GameError(f"transition {n}: unknown target state {dest!r}", "E-BAD-REF")
        pattern = []
        prof = tr.get("profile", {})
        for a in prof:
            if a not in agents:
                raise GameError(f"transition {n}: unknown agent {a!r}", "E-BAD-REF")
        for a in agents:
            act = prof.get(a, WILDCARD)
            if act != WILDCARD and act not in actions:
                raise GameError(f"transition {n}: unknown action {act!r}", "E-BAD-REF")
            pattern.append(act)
        costs = [Fraction(0)] * len(agents)
        for a, raw in tr.get("costs", {}).items():
            if a not in agents:
                raise GameError(f"transition {n}: cost for unknown agent {a!r}", "E-BAD-REF")
            try:
                q = as_rational(raw)
            except (TypeError, ValueError) as exc:
                raise GameError(f"transition {n}: {exc}", "E-BAD-REF") from None
            if q < 0:
                raise GameError(f"transition {n}: negative cost {q} for {a}", "E-NEG-COST")
            costs[agents.index(a)] = q
        specificity = sum(1 for x in pattern if x != WILDCARD)
        entries[src].append((tuple(pattern), tuple(costs), dest, specificity))

    mechanism: dict[str, dict] = {}
    eps_slots = None
    for s in states:
        table = {}
        for profile in itertools.product(actions, repeat=len(agents)):
            best = -1
            outs = set()
            for pattern, costs, dest, specificity in entries[s]:
                if specificity < best:
                    continue
                if all(p == WILDCARD or p == x for p, x in zip(pattern, profile)):
                    if specificity > best:
                        best, outs = specificity, set()
                    outs.add((costs, dest))
            if not outs:
                raise GameError(f"no outcome at state {s} for profile "
                                f"{_fmt_profile(agents, profile)}", "E-SERIAL")
            eps_slots = [i for i, x in enumerate(profile) if x == epsilon]
            for costs, dest in outs:
                for i in eps_slots:
                    if costs[i] != 0:
                        raise GameError(
                            f"state {s}, profile {_fmt_profile(agents, profile)}: agent "
                            f"{agents[i]} plays {epsilon} but is charged {costs[i]}",
                            "E-EPSILON-COST")
            table[profile] = tuple(sorted(outs, key=lambda o: (o[1], o[0])))
        mechanism[s] = table

    valuation = {}
    for var, members in description.get("valuation", {}).items():
        for s in members:
            if s not in entries:
                raise GameError(f"valuation of {var!r} names unknown or terminal state {s!r}",
                                "E-BAD-REF")
        valuation[var] = frozenset(members)

    comment = description.get("comment", ())
    if isinstance(comment, str):
        comment = (comment,)
    return Game(agents, states, actions, epsilon, mechanism, valuation, tuple(comment))


def load_game(path) -> Game:
    with open(path, encoding="utf-8") as fh:
        try:
            desc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GameError(f"{path}: not valid JSON ({exc})", "E-BAD-REF") from None
    return validate_game(desc)


# ------------------------------------------------------------------- plays

@dataclass(frozen=True)
class Play:
    """``states[0], profiles[0], costs[0], states[1], ...``; profiles and
    costs are agent-keyed mappings."""

    agents: tuple[str, ...]
    states: tuple[str, ...]
    profiles: tuple[Mapping[str, str], ...] = ()
    costs: tuple[Mapping[str, Fraction], ...] = ()

    def __len__(self):
        return len(self.profiles)

    def prefix(self, n: int) -> "Play":
        return Play(self.agents, self.states[: n + 1], self.profiles[:n], self.costs[:n])

    @property
    def last(self) -> str:
        return self.states[-1]


def is_play(g: Game, candidate: Play) -> bool:
    n = len(candidate.profiles)
    if len(candidate.states) != n + 1 or len(candidate.costs) != n:
        return False
    if tuple(candidate.agents) != g.agents:
        return False
    for i, s in enumerate(candidate.states):
        if i < n and s not in g.mechanism:
            return False
        if i == n and s != TERMINAL and s not in g.mechanism:
            return False
    for i in range(n):
        prof, costs = candidate.profiles[i], candidate.costs[i]
        if set(prof) != set(g.agents) or any(prof[a] not in g.actions for a in g.agents):
            return False
        if set(costs) != set(g.agents):
            return False
        try:
            cvec = tuple(as_rational(costs[a]) for a in g.agents)
        except (TypeError, ValueError):
            return False
        key = tuple(prof[a] for a in g.agents)
        if (cvec, candidate.states[i + 1]) not in g.outcomes(candidate.states[i], key):
            return False
    return True


def discounted_cost(play: Play, gamma) -> dict[str, Fraction]:
    """Per-agent ``sum_i costs[i] * gamma**i``, exactly."""
    gamma = validate_gamma(gamma)
    total = {a: Fraction(0) for a in play.agents}
    weight = Fraction(1)
    for costs in play.costs:
        for a in play.agents:
            total[a] += as_rational(costs.get(a, 0)) * weight
        weight *= gamma
    return total


# -------------------------------------------------------------- strategies

def step_key(profile: Mapping[str, str], costs: Mapping[str, Fraction]) -> str:
    """Canonical text key of an observed step, e.g. ``a=loop,b=eps;a=100,b=0``."""
    p = ",".join(f"{a}={profile[a]}" for a in sorted(profile))
    c = ",".join(f"{a}={Fraction(costs[a])}" for a in sorted(costs))
    return f"{p};{c}"


@dataclass(frozen=True)
class StrategyAutomaton:
    """A finite-memory perfect-recall strategy of ``coalition``.

    ``act[(m, a)]`` is agent ``a``'s action in memory ``m``.  ``update`` maps
    ``(m, step_key, next_state)`` to the next memory; ``"*"`` as step key
    matches any step.  Steps with no entry leave the memory unchanged.
    """

    coalition: tuple[str, ...]
    memory: tuple[str, ...]
    init: str
    act: Mapping[tuple[str, str], str]
    update: Mapping[tuple[str, str, str], str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "coalition", tuple(sorted(self.coalition)))
        if self.init not in self.memory:
            raise GameError(f"initial memory {self.init!r} not declared", "E-BAD-REF")
        for m in self.memory:
            for a in self.coalition:
                if (m, a) not in self.act:
                    raise GameError(f"no action for agent {a} in memory {m}", "E-BAD-REF")
        for (m, _, _), m2 in self.update.items():
            if m not in self.memory or m2 not in self.memory:
                raise GameError(f"update refers to undeclared memory {m!r}/{m2!r}", "E-BAD-REF")

    def profile(self, mem: str) -> dict[str, str]:
        return {a: self.act[(mem, a)] for a in self.coalition}

    def next_memory(self, mem: str, profile: Mapping[str, str],
                    costs: Mapping[str, Fraction], dest: str) -> str:
        key = (mem, step_key(profile, costs), dest)
        if key in self.update:
            return self.update[key]
        return self.update.get((mem, WILDCARD, dest), mem)

    def memory_after(self, play: Play, steps: int) -> str:
        mem = self.init
        for i in range(steps):
            mem = self.next_memory(mem, play.profiles[i], play.costs[i], play.states[i + 1])
        return mem


def bind_strategy(g: Game, s: StrategyAutomaton) -> None:
    """Raise unless ``s`` only mentions agents and actions of ``g``."""
    for a in s.coalition:
        if a not in g.agents:
            raise GameError(f"strategy agent {a!r} is not in the game", "E-BAD-REF")
    for act in s.act.values():
        if act not in g.actions:
            raise GameError(f"strategy action {act!r} is not in the game", "E-BAD-REF")


def play_satisfies(g: Game, play: Play, s: StrategyAutomaton) -> bool:
    mem = s.init
    for i in range(len(play)):
        for a in s.coalition:
            if play.profiles[i].get(a) != s.act[(mem, a)]:
                return False
        mem = s.next_memory(mem, play.profiles[i], play.costs[i], play.states[i + 1])
    return True


def strategy_to_json(s: StrategyAutomaton) -> dict:
    return {
        "coalition": list(s.coalition),
        "memory": list(s.memory),
        "init": s.init,
        "act": {f"{m},{a}": x for (m, a), x in sorted(s.act.items())},
        "update": {f"{m}|{k}|{to}": m2 for (m, k, to), m2 in sorted(s.update.items())},
    }


def load_strategy(source) -> StrategyAutomaton:
    """Read a strategy from a path or an already-decoded JSON object."""
    if isinstance(source, Mapping):
        data = source
    else:
        with open(source, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise GameError(f"{source}: not valid JSON ({exc})", "E-BAD-REF") from None
    try:
        act = {}
        for key, x in data["act"].items():
            m, a = key.split(",")
            act[(m, a)] = x
        update = {}
        for key, m2 in data.get("update", {}).items():
            m, k, to = key.split("|")
            update[(m, k, to)] = m2
        return StrategyAutomaton(tuple(data["coalition"]), tuple(data["memory"]),
                                 data["init"], act, update)
    except (KeyError, ValueError, AttributeError, TypeError) as exc:
        raise GameError(f"malformed strategy: {exc}", "E-BAD-REF") from None


def dump_strategy(s: StrategyAutomaton, path) -> None:
    Path(path).write_text(json.dumps(strategy_to_json(s), indent=2) + "\n", encoding="utf-8")


# -------------------------------------------------------------- simulation

class AdversaryPolicy:
    """Resolves opponents and nondeterminism during simulation.

    The default picks the lexicographically smallest completion of the
    coalition profile, then the smallest applicable transition ordered by
    ``(next state, cost vector)``.  Subclasses override :meth:`choose`.
    """

    def choose(self, g: Game, play: Play, coalition_profile: Mapping[str, str]):
        others = [a for a in g.agents if a not in coalition_profile]
        for completion in itertools.product(g.actions, repeat=len(others)):
            profile = dict(coalition_profile)
            profile.update(zip(others, completion))
            outs = g.outcomes(play.last, tuple(profile[a] for a in g.agents))
            costs, dest = outs[0]
            return profile, g.costs_dict(costs), dest
        raise AssertionError("unreachable: product of a nonempty action set")


def simulate(g: Game, s: StrategyAutomaton, adv: AdversaryPolicy | None,
             depth: int, start: str) -> Play:
    """Deterministic play of at most ``depth`` steps from ``start``."""
    g.require_state(start)
    bind_strategy(g, s)
    if depth < 0:
        raise GameError("depth must be nonnegative", "E-BAD-REF")
    adv = adv or AdversaryPolicy()
    play = Play(g.agents, (start,))
    mem = s.init
    for _ in range(depth):
        if play.last == TERMINAL:
            break
        profile, costs, dest = adv.choose(g, play, s.profile(mem))
        mem = s.next_memory(mem, profile, costs, dest)
        play = Play(g.agents, play.states + (dest,), play.profiles + (profile,),
                    play.costs + (costs,))
    return play
