"""Model checking and proof checking for budgeted coalition logic over
discounted-cost concurrent games."""

from __future__ import annotations

from .checker import CheckContext, CheckLimits, ModelChecker, Status, Verdict, check, check_maintain
from .errors import CheckError, DiscoError, FormulaError, FormulaSyntaxError, GameError, ProofError
from .formula import Implies, Modal, Not, Var, divide, parse, render
from .game import Game, Play, StrategyAutomaton, load_game, simulate, validate_game
from .oracle import oracle_check
from .proof import Script, deduction_transform, parse_script, render_script, verify_script

__version__ = "0.1.0"

__all__ = [
    "CheckContext", "CheckLimits", "ModelChecker", "Status", "Verdict", "check", "check_maintain",
    "CheckError", "DiscoError", "FormulaError", "FormulaSyntaxError", "GameError", "ProofError",
    "Implies", "Modal", "Not", "Var", "divide", "parse", "render",
    "Game", "Play", "StrategyAutomaton", "load_game", "simulate", "validate_game",
    "oracle_check", "Script", "deduction_transform", "parse_script", "render_script",
    "verify_script",
]
