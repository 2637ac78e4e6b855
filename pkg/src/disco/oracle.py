"""Brute-force reference semantics over bounded horizons.

Strategies are explored as explicit trees over histories: at every history
the coalition picks a profile and every completion and every mechanism
outcome must be survived.  Spending is accumulated in start-state money
(``sum u_i * gamma**i``) and the body at depth ``n`` is ``body / gamma**n``,
i.e. the definition is followed literally instead of the rescaled-budget
recursion used by :mod:`disco.checker`.

Two bounded readings are computed.  The optimistic one ignores every
obligation past the horizon, so it over-approximates truth.  The pessimistic
one additionally demands that every history still open at the horizon has all
remaining budgets at or above the saturation bound, a body that no longer
changes under rescaling, and a state in the coalition's safety region for that
body; that under-approximates truth.
"""

from __future__ import annotations

from fractions import Fraction

from .checker import Status, safety_region, saturation_bound
from .errors import CheckError, GameError
from .formula import Formula, Implies, Modal, Not, Var, divide, parse
from .game import TERMINAL, Game, validate_gamma

__all__ = ["oracle_check", "DEFAULT_NODE_BUDGET"]

DEFAULT_NODE_BUDGET = 2_000_000


class _Oracle:
    def __init__(self, g: Game, gamma: Fraction, horizon: int, node_budget: int):
        self.g = g
        self.gamma = gamma
        self.horizon = horizon
        self.node_budget = node_budget
        self.nodes = 0
        self.cache: dict = {}

    def tick(self):
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise CheckError(f"oracle enumeration exceeded {self.node_budget} nodes", "E-LIMITS")

    def holds(self, state: str, f: Formula, optimistic: bool) -> bool:
        """Upper bound on truth when ``optimistic``, lower bound otherwise."""
        key = (state, f, optimistic)
        if key in self.cache:
            return self.cache[key]
        if isinstance(f, Var):
            out = self.g.holds(f.name, state)
        elif isinstance(f, Not):
            out = not self.holds(state, f.body, not optimistic)
        elif isinstance(f, Implies):
            out = (not self.holds(state, f.left, not optimistic)) or \
                self.holds(state, f.right, optimistic)
        else:
            out = self.maintain(state, f, optimistic)
        self.cache[key] = out
        return out

    def saturated_body(self, body: Formula) -> bool:
        """True when every budget inside ``body`` is already unconstraining,
        so ``body / gamma**k`` means the same thing for all ``k``."""
        if isinstance(body, Var):
            return True
        if isinstance(body, Not):
            return self.saturated_body(body.body)
        if isinstance(body, Implies):
            return self.saturated_body(body.left) and self.saturated_body(body.right)
        return all(q >= saturation_bound(self.g, a, self.gamma) for a, q in body.budget) \
            and self.saturated_body(body.body)

    def maintain(self, start: str, f: Modal, optimistic: bool) -> bool:
        g, gamma = self.g, self.gamma
        coalition = [a for a, _ in f.budget]
        for a in coalition:
            g.agent_index(a)
        slots = [g.agent_index(a) for a in coalition]
        limit = [q for _, q in f.budget]
        bounds = [saturation_bound(g, a, gamma) for a in coalition]
        bodies = [f.body]
        for _ in range(self.horizon):
            bodies.append(divide(bodies[-1], gamma))
        memo: dict = {}

        def leaf_ok(state, n, spent) -> bool:
            if optimistic:
                return True
            scale = gamma ** n
            if any((x - s) / scale < top for x, s, top in zip(limit, spent, bounds)):
                return False
            body = bodies[n]
            if not self.saturated_body(body):
                return False
            target = [w for w in g.states if self.holds(w, body, False)]
            return state in safety_region(g, coalition, target)

        def win(state, n, spent) -> bool:
            # spent: discounted spend so far, in start-state money
            key = (state, n, spent)
            if key in memo:
                return memo[key]
            self.tick()
            if not self.holds(state, bodies[n], optimistic):
                memo[key] = False
                return False
            if n == self.horizon:
                memo[key] = leaf_ok(state, n, spent)
                return memo[key]
            weight = gamma ** n
            seen = set()
            result = False
            for _, outs in g.coalition_moves(coalition, state):
                # coalition profiles with identical outcome sets are interchangeable
                signature = frozenset((costs, dest) for _, costs, dest in outs)
                if signature in seen:
                    continue
                seen.add(signature)
                if all(self.survives(costs, dest, n, spent, slots, limit, weight, win)
                       for costs, dest in sorted(signature)):
                    result = True
                    break
            memo[key] = result
            return result

        return win(start, 0, tuple(Fraction(0) for _ in coalition))

    @staticmethod
    def survives(costs, dest, n, spent, slots, limit, weight, win) -> bool:
        total = tuple(s + costs[i] * weight for s, i in zip(spent, slots))
        if any(t > x for t, x in zip(total, limit)):
            return False
        return dest == TERMINAL or win(dest, n + 1, total)


def oracle_check(g: Game, state: str, f: Formula | str, gamma, horizon: int,
                 node_budget: int = DEFAULT_NODE_BUDGET) -> Status:
    """``TRUE`` if the pessimistic reading holds, ``FALSE`` if the optimistic
    one fails, ``UNKNOWN`` otherwise."""
    gamma = validate_gamma(gamma)
    if isinstance(f, str):
        f = parse(f)
    if horizon <= 0:
        raise GameError("horizon must be positive", "E-LIMITS")
    g.require_state(state)
    oracle = _Oracle(g, gamma, horizon, node_budget)
    if oracle.holds(state, f, optimistic=False):
        return Status.TRUE
    if not oracle.holds(state, f, optimistic=True):
        return Status.FALSE
    return Status.UNKNOWN
