"""Exception types. Every error carries a short machine-readable ``code``."""

from __future__ import annotations


class DiscoError(Exception):
    code = "E-GENERIC"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code

    def __str__(self) -> str:
        return f"{self.code}: {self.args[0]}"


class FormulaError(DiscoError):
    code = "E-SYNTAX"


class FormulaSyntaxError(FormulaError):
    code = "E-SYNTAX"

    def __init__(self, message: str, position: int, expected: str | None = None):
        super().__init__(f"{message} at position {position}"
                         + (f" (expected {expected})" if expected else ""))
        self.position = position
        self.expected = expected


class GameError(DiscoError):
    code = "E-BAD-REF"


class CheckError(DiscoError):
    code = "E-GAMMA"


class ProofError(DiscoError):
    code = "E-NOT-VALID"
