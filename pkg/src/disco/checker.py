"""Three-valued model checking of budgeted maintenance formulas.

A maintenance goal is a state together with the coalition's remaining budget
and the (rescaled) body, both expressed in the money of the step at which the
goal arises.  The goal holds iff the body holds at the state and some
coalition profile keeps every outcome within budget while every non-terminal
successor again satisfies the goal with budget ``(b - u) / gamma`` and body
``body / gamma``.  This is a greatest fixed point; the checker explores the
reachable goal graph up to the configured limits and solves it twice:

* optimistically, with unexplored goals assumed to hold, and
* pessimistically, with unexplored goals assumed to fail.

Pessimistic success is a proof (it yields a finite-memory witness strategy),
optimistic failure is a refutation, anything in between is ``UNKNOWN``.
Identical goals share one node, so a play that returns to a goal it already
visited closes a cycle and is accepted.  Budget entries at or above the
agent's saturation bound are clamped to that bound: such an agent can pay any
future stream, and once every entry is clamped and the body is invariant under
rescaling the goal is decided by the budget-free :func:`safety_region`.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .errors import CheckError, GameError
from .formula import Formula, Implies, Modal, Not, Var, divide, parse
from .game import TERMINAL, Game, StrategyAutomaton, step_key, validate_gamma
from .rational import as_rational

__all__ = [
    "Status", "CheckLimits", "CheckContext", "Verdict", "ModelChecker",
    "check", "check_maintain", "safety_region", "saturation_bound",
    "replay_witness",
]


class Status(Enum):
    TRUE = "TRUE"
    FALSE = "FALSE"
    UNKNOWN = "UNKNOWN"

    def negate(self) -> "Status":
        if self is Status.TRUE:
            return Status.FALSE
        if self is Status.FALSE:
            return Status.TRUE
        return Status.UNKNOWN

    @staticmethod
    def implies(a: "Status", b: "Status") -> "Status":
        if a is Status.FALSE or b is Status.TRUE:
            return Status.TRUE
        if a is Status.TRUE and b is Status.FALSE:
            return Status.FALSE
        return Status.UNKNOWN


def _default_goal_cap() -> int:
    raw = os.environ.get("DISCO_MAX_GOALS")
    return int(raw) if raw else 10**6


@dataclass(frozen=True)
class CheckLimits:
    max_depth: int = 64
    max_goals: int = field(default_factory=_default_goal_cap)

    def __post_init__(self):
        if self.max_depth <= 0 or self.max_goals <= 0:
            raise CheckError("limits must be positive", "E-LIMITS")


@dataclass(frozen=True)
class CheckContext:
    gamma: Fraction
    limits: CheckLimits = field(default_factory=CheckLimits)

    def __post_init__(self):
        object.__setattr__(self, "gamma", validate_gamma(self.gamma))


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: StrategyAutomaton | None = None
    reason: str = ""

    def __post_init__(self):
        if self.witness is not None and self.status is not Status.TRUE:
            raise ValueError("only TRUE verdicts carry a witness")

    def line(self) -> str:
        return f"{self.status.value} {self.reason}".rstrip()


def saturation_bound(g: Game, agent: str, gamma) -> Fraction:
    """``U / (1 - gamma)`` with ``U`` the agent's largest single-step cost:
    no play can ever charge the agent more than this in discounted total."""
    gamma = validate_gamma(gamma)
    return g.max_cost(agent) / (1 - gamma)


def safety_region(g: Game, coalition: Sequence[str], target) -> frozenset:
    """Largest subset of ``target`` the coalition can keep the play inside
    (or send to the terminal state) forever, ignoring costs."""
    for a in coalition:
        g.agent_index(a)
    zone = set(target)
    for s in zone:
        g.require_state(s)
    changed = True
    while changed:
        changed = False
        for w in sorted(zone):
            if not any(all(dest == TERMINAL or dest in zone for _, _, dest in outs)
                       for _, outs in g.coalition_moves(coalition, w)):
                zone.discard(w)
                changed = True
    return frozenset(zone)


# ------------------------------------------------------------------ goals

_FALSE, _REGION, _FRONTIER, _EXPANDED = "false", "region", "frontier", "expanded"
_FIRST_ROUND = 8


class _Node:
    __slots__ = ("key", "depth", "kind", "body_status", "region", "profiles")

    def __init__(self, key, depth):
        self.key = key              # (state, budget tuple, body)
        self.depth = depth
        self.kind = None
        self.body_status = None
        self.region = (False, False)  # (pessimistic, optimistic) membership
        self.profiles = []          # [(alpha, [(profile, costs, dest, child id)])]


class ModelChecker:
    """Decides formulas over one game at one discount factor.

    Verdicts of subformulas are cached per ``(state, formula)`` for the life
    of the instance; independent instances share nothing.
    """

    def __init__(self, game: Game, ctx: CheckContext | Fraction | str):
        if not isinstance(ctx, CheckContext):
            ctx = CheckContext(as_rational(ctx))
        self.game = game
        self.gamma = ctx.gamma
        self.limits = ctx.limits
        self.bounds = {a: saturation_bound(game, a, self.gamma) for a in game.agents}
        self.goals = 0
        self.capped = False
        self._status_cache: dict[tuple[str, Formula], Status] = {}
        self._regions: dict = {}
        self._norm: dict[Formula, Formula] = {}
        self._next_body: dict[Formula, Formula] = {}
        self._moves: dict = {}

    # -- formula preparation

    def normalize(self, f: Formula) -> Formula:
        """Clamp every budget entry to the agent's saturation bound."""
        hit = self._norm.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Var):
            out = f
        elif isinstance(f, Not):
            out = Not(self.normalize(f.body))
        elif isinstance(f, Implies):
            out = Implies(self.normalize(f.left), self.normalize(f.right))
        else:
            for a, _ in f.budget:
                if a not in self.bounds:
                    raise GameError(f"formula mentions agent {a!r} not in the game", "E-BAD-REF")
            out = Modal(tuple((a, min(q, self.bounds[a])) for a, q in f.budget),
                        self.normalize(f.body))
        self._norm[f] = out
        return out

    def _rescaled(self, body: Formula) -> Formula:
        nxt = self._next_body.get(body)
        if nxt is None:
            nxt = self.normalize(divide(body, self.gamma))
            self._next_body[body] = nxt
        return nxt

    # -- public entry points

    def check(self, state: str, f: Formula | str) -> Verdict:
        if isinstance(f, str):
            f = parse(f)
        self.game.require_state(state)
        f = self.normalize(f)
        if isinstance(f, Modal):
            return self._maintain(state, f, want_witness=True)
        status = self._status(state, f)
        reason = "" if status is not Status.UNKNOWN else "undecided modal subformula"
        return Verdict(status, None, reason)

    def check_maintain(self, state: str, coalition, budget: Mapping, body: Formula) -> Verdict:
        if set(budget) != set(coalition):
            raise CheckError("budget domain must equal the coalition", "E-BAD-REF")
        return self.check(state, Modal(dict(budget), body))

    # -- evaluation

    def _status(self, state: str, f: Formula) -> Status:
        key = (state, f)
        hit = self._status_cache.get(key)
        if hit is not None:
            return hit
        if isinstance(f, Var):
            out = Status.TRUE if self.game.holds(f.name, state) else Status.FALSE
        elif isinstance(f, Not):
            out = self._status(state, f.body).negate()
        elif isinstance(f, Implies):
            left = self._status(state, f.left)
            out = Status.TRUE if left is Status.FALSE else \
                Status.implies(left, self._status(state, f.right))
        else:
            out = self._maintain(state, f, want_witness=False).status
        self._status_cache[key] = out
        return out

    def _region(self, coalition: tuple[str, ...], body: Formula):
        key = (coalition, body)
        hit = self._regions.get(key)
        if hit is None:
            statuses = {s: self._status(s, body) for s in self.game.states}
            sure = [s for s, st in statuses.items() if st is Status.TRUE]
            maybe = [s for s, st in statuses.items() if st is not Status.FALSE]
            hit = (safety_region(self.game, coalition, sure),
                   safety_region(self.game, coalition, maybe))
            self._regions[key] = hit
        return hit

    def _useful_moves(self, coalition: tuple[str, ...], state: str):
        """Coalition moves minus those dominated by another move.

        ``beta`` dominates ``alpha`` when each outcome of ``beta`` is matched
        by an outcome of ``alpha`` with the same destination and coalition
        costs at least as high.  Goals are monotone in the budget, so
        ``alpha`` can only win where ``beta`` also wins.  Among moves with
        identical outcomes the lexicographically first is kept.
        """
        key = (coalition, state)
        hit = self._moves.get(key)
        if hit is not None:
            return hit
        slots = [self.game.agent_index(a) for a in coalition]
        moves = self.game.coalition_moves(coalition, state)
        sigs = [frozenset((d, tuple(c[i] for i in slots)) for _, c, d in outs)
                for _, outs in moves]

        def covers(beta, alpha) -> bool:
            return all(any(d2 == d and all(x >= y for x, y in zip(c2, c)) for d2, c2 in alpha)
                       for d, c in beta)

        kept = []
        for k, sig in enumerate(sigs):
            dominated = False
            for j, other in enumerate(sigs):
                if j == k or not covers(other, sig):
                    continue
                if other != sig or j < k:
                    dominated = True
                    break
            if not dominated:
                kept.append(moves[k])
        hit = tuple(kept)
        self._moves[key] = hit
        return hit

    def _maintain(self, state: str, f: Modal, want_witness: bool) -> Verdict:
        """Iterative deepening over the goal graph.

        Both decisive answers are sound at any depth bound, so shallow rounds
        often settle the goal long before the full graph would be built.
        """
        depth = min(_FIRST_ROUND, self.limits.max_depth)
        while True:
            verdict = self._search(state, f, want_witness, depth)
            if verdict.status is not Status.UNKNOWN or depth >= self.limits.max_depth \
                    or self.capped or not verdict.reason.startswith("depth limit"):
                return verdict
            depth = min(2 * depth, self.limits.max_depth)

    def _search(self, state: str, f: Modal, want_witness: bool, max_depth: int) -> Verdict:
        g = self.game
        gamma = self.gamma
        coalition = tuple(a for a, _ in f.budget)
        slots = [g.agent_index(a) for a in coalition]
        bound = tuple(self.bounds[a] for a in coalition)
        saturated_budget = bound

        nodes: list[_Node] = []
        index: dict[tuple, int] = {}
        queue: deque[int] = deque()
        hit_depth = False

        def node_for(key, depth) -> int:
            nid = index.get(key)
            if nid is None:
                nid = len(nodes)
                index[key] = nid
                nodes.append(_Node(key, depth))
                queue.append(nid)
                self.goals += 1
            return nid

        root_budget = tuple(q for _, q in f.budget)
        node_for((state, root_budget, f.body), 0)

        while queue:
            nid = queue.popleft()
            node = nodes[nid]
            w, budget, body = node.key
            node.body_status = self._status(w, body)
            if node.body_status is Status.FALSE:
                node.kind = _FALSE
                continue
            nxt = self._rescaled(body)
            if budget == saturated_budget and nxt == body:
                sure, maybe = self._region(coalition, body)
                node.kind = _REGION
                node.region = (w in sure, w in maybe)
                continue
            if node.depth >= max_depth:
                node.kind = _FRONTIER
                hit_depth = True
                continue
            if self.goals >= self.limits.max_goals:
                node.kind = _FRONTIER
                self.capped = True
                continue
            node.kind = _EXPANDED
            for alpha, outs in self._useful_moves(coalition, w):
                edges = []
                for profile, costs, dest in outs:
                    if any(costs[i] > b for i, b in zip(slots, budget)):
                        break
                    if dest == TERMINAL:
                        edges.append((profile, costs, dest, None))
                        continue
                    child_budget = tuple(min(top, (b - costs[i]) / gamma)
                                         for i, b, top in zip(slots, budget, bound))
                    child = node_for((dest, child_budget, nxt), node.depth + 1)
                    edges.append((profile, costs, dest, child))
                else:
                    node.profiles.append((alpha, edges))

        pess_alive, pess_dead_profiles = self._solve(nodes, pessimistic=True)
        if pess_alive[0]:
            witness = None
            if want_witness:
                witness = self._witness(nodes, pess_alive, pess_dead_profiles, coalition, slots)
                reason = f"witness with {len(witness.memory)} memory states, {len(nodes)} goals"
            else:
                reason = f"{len(nodes)} goals"
            return Verdict(Status.TRUE, witness, reason)
        opt_alive, _ = self._solve(nodes, pessimistic=False)
        if not opt_alive[0]:
            return Verdict(Status.FALSE, None,
                           f"no coalition profile sustains the goal ({len(nodes)} goals explored)")
        if self.capped:
            reason = f"goal cap {self.limits.max_goals} reached"
        elif hit_depth:
            reason = f"depth limit {max_depth} reached"
        else:
            reason = "undecided nested subformula"
        return Verdict(Status.UNKNOWN, None, reason)

    @staticmethod
    def _solve(nodes: list[_Node], pessimistic: bool):
        n = len(nodes)
        alive = [False] * n
        live = [0] * n
        dead_profiles = [None] * n
        reverse: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for nid, node in enumerate(nodes):
            if node.kind == _FALSE:
                continue
            if node.kind == _REGION:
                alive[nid] = node.region[0] if pessimistic else node.region[1]
            elif node.kind == _FRONTIER:
                alive[nid] = not pessimistic and node.body_status is not Status.FALSE
            else:
                body_ok = node.body_status is Status.TRUE or not pessimistic
                live[nid] = len(node.profiles)
                alive[nid] = body_ok and live[nid] > 0
                dead_profiles[nid] = [False] * len(node.profiles)
                for k, (_, edges) in enumerate(node.profiles):
                    for child in {e[3] for e in edges if e[3] is not None}:
                        reverse[child].append((nid, k))
        work = [nid for nid in range(n) if not alive[nid]]
        while work:
            child = work.pop()
            for parent, k in reverse[child]:
                if alive[parent] and not dead_profiles[parent][k]:
                    dead_profiles[parent][k] = True
                    live[parent] -= 1
                    if live[parent] == 0:
                        alive[parent] = False
                        work.append(parent)
        return alive, dead_profiles

    def _witness(self, nodes, alive, dead_profiles, coalition, slots) -> StrategyAutomaton:
        """Finite-memory strategy read off the pessimistic solution; memory
        states are goals, and the smallest winning profile is chosen."""
        g = self.game
        names: dict[tuple, str] = {}
        act: dict[tuple[str, str], str] = {}
        update: dict[tuple[str, str, str], str] = {}
        index = {node.key: nid for nid, node in enumerate(nodes)}
        order: deque[tuple] = deque()

        def mem(key) -> str:
            name = names.get(key)
            if name is None:
                name = f"m{len(names)}"
                names[key] = name
                order.append(key)
            return name

        mem(nodes[0].key)
        while order:
            key = order.popleft()
            m = names[key]
            nid = index.get(key)
            node = nodes[nid] if nid is not None else None
            if node is not None and node.kind == _EXPANDED:
                k = next(k for k, dead in enumerate(dead_profiles[nid]) if not dead)
                alpha, edges = node.profiles[k]
                steps = [(p, c, d, None if child is None else nodes[child].key)
                         for p, c, d, child in edges]
            else:
                # saturated goal decided by the safety region: stay inside it
                w, budget, body = key
                sure, _ = self._region(coalition, body)
                alpha, outs = next((alpha, outs) for alpha, outs in g.coalition_moves(coalition, w)
                                   if all(d == TERMINAL or d in sure for _, _, d in outs))
                steps = [(p, c, d, None if d == TERMINAL else (d, budget, body))
                         for p, c, d in outs]
            for a, x in zip(coalition, alpha):
                act[(m, a)] = x
            for profile, costs, dest, child_key in steps:
                if child_key is None:
                    continue
                skey = step_key(dict(zip(g.agents, profile)), g.costs_dict(costs))
                update[(m, skey, dest)] = mem(child_key)
        return StrategyAutomaton(coalition, tuple(names.values()), "m0", act, update)


def check(g: Game, state: str, f: Formula | str, ctx: CheckContext) -> Verdict:
    return ModelChecker(g, ctx).check(state, f)


def check_maintain(g: Game, state: str, coalition, budget: Mapping, body: Formula,
                   ctx: CheckContext) -> Verdict:
    return ModelChecker(g, ctx).check_maintain(state, coalition, budget, body)


# ----------------------------------------------------------------- replay

def replay_witness(g: Game, witness: StrategyAutomaton, start: str, budget: Mapping,
                   gamma, depth: int,
                   state_ok: Callable[[str, int], bool] | None = None) -> tuple[bool, str]:
    """Run ``witness`` against every adversary completion and every
    nondeterministic outcome for ``depth`` steps.

    Checks, on every prefix, that the discounted spend of each coalition
    member stays within ``budget`` (today's money) and that ``state_ok`` holds
    at each non-terminal state reached after ``n`` steps.  Paths reaching the
    same (step, memory, state) are merged keeping only Pareto-maximal spends,
    which preserves the exact check.
    """
    gamma = validate_gamma(gamma)
    coalition = witness.coalition
    limit = tuple(as_rational(budget[a]) for a in coalition)
    slots = [g.agent_index(a) for a in coalition]
    if state_ok is not None and not state_ok(start, 0):
        return False, f"start state {start} rejected"
    layer = {(witness.init, start): {tuple(Fraction(0) for _ in coalition)}}
    weight = Fraction(1)
    for n in range(depth):
        nxt: dict[tuple, set] = {}
        for (m, w), spends in layer.items():
            alpha = tuple(witness.act[(m, a)] for a in coalition)
            outs = next(o for al, o in g.coalition_moves(coalition, w) if al == alpha)
            for profile, costs, dest in outs:
                pmap = dict(zip(g.agents, profile))
                m2 = witness.next_memory(m, pmap, g.costs_dict(costs), dest)
                for spent in spends:
                    total = tuple(s + costs[i] * weight for s, i in zip(spent, slots))
                    if any(t > x for t, x in zip(total, limit)):
                        return False, (f"step {n}: spend {[str(t) for t in total]} exceeds "
                                       f"budget at {w} -> {dest}")
                    if dest == TERMINAL:
                        continue
                    if state_ok is not None and not state_ok(dest, n + 1):
                        return False, f"step {n + 1}: state {dest} rejected"
                    nxt.setdefault((m2, dest), set()).add(total)
        layer = {k: _pareto_max(v) for k, v in nxt.items()}
        weight *= gamma
        if not layer:
            break
    return True, f"{depth} steps replayed"


def _pareto_max(vectors: set) -> set:
    if len(vectors) <= 1:
        return vectors
    return {v for v in vectors
            if not any(o != v and all(x <= y for x, y in zip(v, o)) for o in vectors)}
