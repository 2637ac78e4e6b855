"""Worked-example claims on the bundled corpus, used by ``disco reproduce``.

Budgets for the first two games are closed forms in the discount factor, so
the suite can be rerun at other values of ``gamma``.  The third game's
example is tied to ``gamma = 2/3``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .checker import CheckContext, CheckLimits, ModelChecker, Status, Verdict
from .formula import Modal, Var, render
from .game import Game, load_game

__all__ = ["Claim", "claims", "corpus_path", "load_corpus", "run_claim", "FIG3_GAMMA"]

FIG3_GAMMA = Fraction(2, 3)
_P = Var("p")


@dataclass(frozen=True)
class Claim:
    game: str
    state: str
    formula: object
    expected: Status
    gamma: Fraction
    note: str = ""

    def text(self) -> str:
        return render(self.formula)


def corpus_path(name: str):
    return resources.files("disco") / "corpus" / name


def _fig12(g: Fraction) -> list[Claim]:
    one = 1 / (1 - g)
    two = 1 / (1 - g * g)
    T, F = Status.TRUE, Status.FALSE
    return [
        Claim("fig1.game", "w", Modal({"a": 2 * one}, _P), T, g, "u-route 2/(1-g)"),
        Claim("fig1.game", "w", Modal({"a": one}, _P), T, g, "v-route 1/(1-g), cycle rule"),
        Claim("fig1.game", "w", Modal({"a": one - Fraction(1, 100)}, _P), F, g, "below v-route"),
        Claim("fig1.game", "s", _P, F, g, "p false at s"),
        Claim("fig2.game", "w", Modal({"a": 100 * one}, _P), T, g, "a loops alone"),
        Claim("fig2.game", "w", Modal({"b": 200 * g * two}, _P), T, g, "b pays every return to w"),
        Claim("fig2.game", "w", Modal({"a": two, "b": g * two}, _P), T, g, "joint alternation"),
        Claim("fig2.game", "w", Modal({"a": 100 * one - 1}, _P), F, g, "a below 100/(1-g)"),
        Claim("fig2.game", "w", Modal({"a": two, "b": g * two - Fraction(1, 100)}, _P), F, g,
              "b short of joint share"),
    ]


def _fig3() -> list[Claim]:
    g = FIG3_GAMMA
    T, F = Status.TRUE, Status.FALSE
    e = Fraction(8, 9)
    return [
        Claim("fig3.game", "w1", Modal({"a": e, "b": e, "d": 0}, _P), T, g, "perfect recall"),
        Claim("fig3.game", "w1", Modal({"a": e - Fraction(1, 100), "b": e, "d": 0}, _P), F, g,
              "a short"),
        Claim("fig3.game", "w1", Modal({"a": 2 * e, "b": 2 * e, "d": 0}, _P), T, g,
              "doubled budgets"),
    ]


def claims(gamma: Fraction = Fraction(1, 2)) -> list[Claim]:
    return _fig12(Fraction(gamma)) + _fig3()


def run_claim(claim: Claim, game: Game | None = None,
              limits: CheckLimits | None = None) -> Verdict:
    if game is None:
        game = load_game(corpus_path(claim.game))
    ctx = CheckContext(claim.gamma, limits or CheckLimits())
    return ModelChecker(game, ctx).check(claim.state, claim.formula)


def load_corpus(directory=None) -> dict[str, Game]:
    names = ("fig1.game", "fig2.game", "fig3.game")
    if directory is None:
        return {n: load_game(corpus_path(n)) for n in names}
    return {n: load_game(Path(directory) / n) for n in names}

