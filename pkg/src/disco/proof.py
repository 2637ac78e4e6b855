"""Hilbert-style derivations: a checking kernel and a few script generators.

Axiom schemas (``C``, ``D`` coalitions; ``x``, ``y`` budgets)::

    Refl   [C]_x f -> f
    Coop   [C]_x (f -> g) -> ([D]_y f -> [C u D]_{x u y} g)     if C, D disjoint
    Mono   [C]_x f -> [C]_y f                                   if x <= y pointwise
    Trans  [C]_x f -> [C]_x [C]_x f

plus every propositional tautology, modus ponens and necessitation.  With
hypotheses present, necessitation may only be applied to lines that do not
depend on any hypothesis; the kernel tracks this with a per-line theorem flag.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .errors import FormulaError, ProofError
from .formula import Formula, Implies, Modal, Not, Var, divide, parse, render
from .rational import as_rational

__all__ = [
    "Taut", "Axiom", "Hyp", "MP", "Nec", "Line", "Script", "Report",
    "AXIOMS", "MAX_ATOMS", "is_tautology", "verify_axiom_instance", "verify_script",
    "deduction_transform", "divide_script", "gen_superdistributivity",
    "gen_supermonotonicity", "parse_script", "render_script",
]

AXIOMS = ("Refl", "Coop", "Mono", "Trans")
MAX_ATOMS = 20


@dataclass(frozen=True)
class Taut:
    pass


@dataclass(frozen=True)
class Axiom:
    name: str


@dataclass(frozen=True)
class Hyp:
    k: int


@dataclass(frozen=True)
class MP:
    """Premises: line ``i`` holds ``f`` and line ``j`` holds ``f -> this``."""
    i: int
    j: int


@dataclass(frozen=True)
class Nec:
    budget: tuple[tuple[str, Fraction], ...]
    i: int

    def __post_init__(self):
        # reuse Modal's validation and canonical ordering
        object.__setattr__(self, "budget", Modal(self.budget, Var("p")).budget)


Justification = Union[Taut, Axiom, Hyp, MP, Nec]


@dataclass(frozen=True)
class Line:
    index: int
    formula: Formula
    justification: Justification


@dataclass(frozen=True)
class Script:
    hypotheses: tuple[Formula, ...]
    lines: tuple[Line, ...]

    @property
    def conclusion(self) -> Formula:
        return self.lines[-1].formula


@dataclass(frozen=True)
class Report:
    ok: bool
    first_error: tuple[int, str, str] | None = None
    theorem_flags: tuple[bool, ...] = ()


# ------------------------------------------------------------ tautologies

def _atoms(f: Formula, out: dict) -> None:
    if isinstance(f, (Var, Modal)):
        out.setdefault(f, len(out))
    elif isinstance(f, Not):
        _atoms(f.body, out)
    else:
        _atoms(f.left, out)
        _atoms(f.right, out)


def is_tautology(f: Formula) -> bool:
    """Truth-table check with variables and maximal modal subformulas as atoms.

    Each atom's column is an integer bitmask over all ``2**n`` rows, so the
    whole table is evaluated with a handful of big-integer operations.
    """
    atoms: dict = {}
    _atoms(f, atoms)
    n = len(atoms)
    if n > MAX_ATOMS:
        raise ProofError(f"{n} atoms exceed the limit of {MAX_ATOMS}", "E-TOO-MANY-ATOMS")
    rows = 1 << n
    full = (1 << rows) - 1
    columns = []
    for i in range(n):
        # rows whose bit i is set: the upper half of every 2**(i+1) block
        pattern = ((1 << (1 << i)) - 1) << (1 << i)
        period = 1 << (i + 1)
        col = 0
        for start in range(0, rows, period):
            col |= pattern << start
        columns.append(col & full)

    def ev(g: Formula) -> int:
        if isinstance(g, (Var, Modal)):
            return columns[atoms[g]]
        if isinstance(g, Not):
            return ~ev(g.body) & full
        return (~ev(g.left) | ev(g.right)) & full

    return ev(f) == full


# ----------------------------------------------------------------- axioms

def _le(x: tuple, y: tuple) -> bool:
    return len(x) == len(y) and all(a == b and p <= q for (a, p), (b, q) in zip(x, y))


def verify_axiom_instance(name: str, f: Formula) -> bool:
    if not isinstance(f, Implies):
        return False
    left, right = f.left, f.right
    if name == "Refl":
        return isinstance(left, Modal) and left.body == right
    if name == "Mono":
        return (isinstance(left, Modal) and isinstance(right, Modal)
                and left.body == right.body and _le(left.budget, right.budget))
    if name == "Trans":
        return (isinstance(left, Modal) and isinstance(right, Modal)
                and right.budget == left.budget and right.body == left)
    if name == "Coop":
        if not (isinstance(left, Modal) and isinstance(left.body, Implies)
                and isinstance(right, Implies)):
            return False
        mid, concl = right.left, right.right
        if not (isinstance(mid, Modal) and isinstance(concl, Modal)):
            return False
        if left.coalition & mid.coalition:
            return False
        return (left.body.left == mid.body and left.body.right == concl.body
                and concl.budget == tuple(sorted(left.budget + mid.budget)))
    return False


# ----------------------------------------------------------------- kernel

def verify_script(s: Script) -> Report:
    flags: list[bool] = []

    def fail(line: Line, code: str, msg: str) -> Report:
        return Report(False, (line.index, code, msg), tuple(flags))

    for pos, line in enumerate(s.lines, start=1):
        f, just = line.formula, line.justification
        if line.index != pos:
            return fail(line, "E-LINE-NUMBER", f"expected line number {pos}")
        if isinstance(just, Taut):
            try:
                ok = is_tautology(f)
            except ProofError as exc:
                return fail(line, exc.code, exc.args[0])
            if not ok:
                return fail(line, "E-TAUT", "not a propositional tautology")
            flags.append(True)
        elif isinstance(just, Axiom):
            if just.name not in AXIOMS or not verify_axiom_instance(just.name, f):
                return fail(line, "E-AXIOM", f"not an instance of {just.name}")
            flags.append(True)
        elif isinstance(just, Hyp):
            if not 1 <= just.k <= len(s.hypotheses):
                return fail(line, "E-HYP-RANGE", f"no hypothesis {just.k}")
            if s.hypotheses[just.k - 1] != f:
                return fail(line, "E-HYP-MISMATCH", f"differs from hypothesis {just.k}")
            flags.append(False)
        elif isinstance(just, MP):
            if not (1 <= just.i < pos and 1 <= just.j < pos):
                return fail(line, "E-FWD-REF", "modus ponens must cite earlier lines")
            premise = s.lines[just.i - 1].formula
            if s.lines[just.j - 1].formula != Implies(premise, f):
                return fail(line, "E-MP-SHAPE",
                            f"line {just.j} is not (line {just.i} -> this line)")
            flags.append(flags[just.i - 1] and flags[just.j - 1])
        elif isinstance(just, Nec):
            if not 1 <= just.i < pos:
                return fail(line, "E-FWD-REF", "necessitation must cite an earlier line")
            if f != Modal(just.budget, s.lines[just.i - 1].formula):
                return fail(line, "E-NEC-SHAPE", f"not the necessitation of line {just.i}")
            if not flags[just.i - 1]:
                return fail(line, "E-NEC-SCOPE",
                            f"line {just.i} depends on hypotheses; necessitation "
                            "applies only to theorems")
            flags.append(True)
        else:
            return fail(line, "E-JUSTIFICATION", f"unknown justification {just!r}")
    if not s.lines:
        return Report(False, (0, "E-EMPTY", "script has no lines"), ())
    return Report(True, None, tuple(flags))


def _require_valid(s: Script) -> Report:
    rep = verify_script(s)
    if not rep.ok:
        raise ProofError(f"input script is invalid: {rep.first_error}", "E-NOT-VALID")
    return rep


class _Builder:
    def __init__(self, hypotheses=()):
        self.hypotheses = tuple(hypotheses)
        self.lines: list[Line] = []

    def add(self, f: Formula, just: Justification) -> int:
        self.lines.append(Line(len(self.lines) + 1, f, just))
        return len(self.lines)

    def formula(self, i: int) -> Formula:
        return self.lines[i - 1].formula

    def mp(self, i: int, j: int) -> int:
        """Apply modus ponens to line ``i`` (f) and line ``j`` (f -> g)."""
        impl = self.formula(j)
        assert isinstance(impl, Implies) and impl.left == self.formula(i)
        return self.add(impl.right, MP(i, j))

    def script(self) -> Script:
        return Script(self.hypotheses, tuple(self.lines))


def deduction_transform(s: Script, h: Formula) -> Script:
    """Discharge the last hypothesis ``h``: from ``X, h |- g`` build ``X |- h -> g``."""
    _require_valid(s)
    if not s.hypotheses or s.hypotheses[-1] != h:
        raise ProofError("formula is not the last hypothesis of the script", "E-NO-SUCH-HYP")
    last = len(s.hypotheses)
    out = _Builder(s.hypotheses[:-1])
    copy: dict[int, int] = {}      # old line -> new line holding the same formula
    under: dict[int, int] = {}     # old line -> new line holding h -> formula
    uses_h: list[bool] = []
    for line in s.lines:
        f, just = line.formula, line.justification
        if isinstance(just, Hyp) and just.k == last:
            dep = True
        elif isinstance(just, MP):
            dep = uses_h[just.i - 1] or uses_h[just.j - 1]
        else:
            dep = False
        uses_h.append(dep)
        if not dep:
            if isinstance(just, MP):
                new_just = MP(copy[just.i], copy[just.j])
            elif isinstance(just, Nec):
                new_just = Nec(just.budget, copy[just.i])
            else:
                new_just = just
            k = out.add(f, new_just)
            copy[line.index] = k
            weaken = out.add(Implies(f, Implies(h, f)), Taut())
            under[line.index] = out.mp(k, weaken)
        elif isinstance(just, Hyp):
            under[line.index] = out.add(Implies(h, h), Taut())
        else:
            a = s.lines[just.i - 1].formula
            # (h -> (a -> f)) -> ((h -> a) -> (h -> f))
            dist = out.add(Implies(Implies(h, Implies(a, f)),
                                   Implies(Implies(h, a), Implies(h, f))), Taut())
            step = out.mp(under[just.j], dist)
            under[line.index] = out.mp(under[just.i], step)
    return out.script()


def divide_script(s: Script, mu) -> Script:
    """Rescale every formula (and every necessitation budget) by ``1/mu``."""
    mu = as_rational(mu)
    if mu <= 0:
        raise ProofError(f"scale must be positive, got {mu}", "E-NONPOS-SCALE")
    lines = []
    for line in s.lines:
        just = line.justification
        if isinstance(just, Nec):
            just = Nec(tuple((a, q / mu) for a, q in just.budget), just.i)
        lines.append(Line(line.index, divide(line.formula, mu), just))
    return Script(tuple(divide(h, mu) for h in s.hypotheses), tuple(lines))


def _budget(coalition, budget: Mapping) -> tuple:
    if set(coalition) != set(budget):
        raise ProofError("budget domain must equal the coalition", "E-BUDGET-DOMAIN")
    return Modal(dict(budget), Var("p")).budget


def gen_superdistributivity(premise: Script, coalitions: Sequence, budgets: Sequence[Mapping]
                            ) -> Script:
    """From a derivation of ``f1, ..., fn |- g`` build one of
    ``[C1]_x1 f1, ..., [Cn]_xn fn |- [C1 u ... u Cn]_{x1 u ... u xn} g``."""
    n = len(premise.hypotheses)
    if n == 0 or len(coalitions) != n or len(budgets) != n:
        raise ProofError("need one coalition and budget per hypothesis", "E-NOT-VALID")
    pairs = [_budget(c, x) for c, x in zip(coalitions, budgets)]
    seen: set = set()
    for c in coalitions:
        if seen & set(c):
            raise ProofError("coalitions must be pairwise disjoint", "E-OVERLAP")
        seen |= set(c)
    _require_valid(premise)
    phis = premise.hypotheses
    theorem = premise
    for _ in range(n):
        theorem = deduction_transform(theorem, theorem.hypotheses[-1])

    out = _Builder(tuple(Modal(x, phi) for x, phi in zip(pairs, phis)))
    for line in theorem.lines:
        out.add(line.formula, line.justification)
    acc_budget: tuple = ()
    acc = out.add(Modal((), theorem.conclusion), Nec((), len(theorem.lines)))
    for k in range(n):
        body = out.formula(acc).body           # f_k -> rest
        joined = tuple(sorted(acc_budget + pairs[k]))
        coop = out.add(Implies(Modal(acc_budget, body),
                               Implies(Modal(pairs[k], body.left), Modal(joined, body.right))),
                       Axiom("Coop"))
        step = out.mp(acc, coop)
        hyp = out.add(Modal(pairs[k], phis[k]), Hyp(k + 1))
        acc = out.mp(hyp, step)
        acc_budget = joined
    return out.script()


def gen_supermonotonicity(C, x: Mapping, D, y: Mapping, body: Formula) -> Script:
    """Derivation of ``|- [C]_x body -> [D]_y body`` for ``C`` within ``D``
    and ``x <= y`` on ``C``."""
    C, D = set(C), set(D)
    if not C <= D:
        raise ProofError("first coalition must be a subset of the second", "E-NOT-SUBSET")
    xb, yb = _budget(C, x), _budget(D, y)
    ymap = dict(yb)
    if any(q > ymap[a] for a, q in xb):
        raise ProofError("budget x must not exceed y on the smaller coalition", "E-BUDGET-ORDER")
    small, large = Modal(xb, body), Modal(yb, body)
    out = _Builder()
    if C == D:
        out.add(Implies(small, large), Axiom("Mono"))
        return out.script()
    rest = tuple((a, q) for a, q in yb if a not in C)
    mid = Modal(tuple(sorted(rest + xb)), body)
    taut = out.add(Implies(body, body), Taut())
    nec = out.add(Modal(rest, Implies(body, body)), Nec(rest, taut))
    coop = out.add(Implies(Modal(rest, Implies(body, body)), Implies(small, mid)), Axiom("Coop"))
    first = out.mp(nec, coop)
    mono = out.add(Implies(mid, large), Axiom("Mono"))
    chain = out.add(Implies(Implies(small, mid),
                            Implies(Implies(mid, large), Implies(small, large))), Taut())
    step = out.mp(first, chain)
    out.mp(mono, step)
    return out.script()


# ------------------------------------------------------------ text format

_LINE = re.compile(r"\s*(\d+)\s*:(.*);([^;]*)$")


def _render_just(j: Justification) -> str:
    if isinstance(j, Taut):
        return "taut"
    if isinstance(j, Axiom):
        return f"axiom {j.name}"
    if isinstance(j, Hyp):
        return f"hyp {j.k}"
    if isinstance(j, MP):
        return f"mp {j.i} {j.j}"
    budget = ", ".join(f"{a}:{q}" for a, q in j.budget)
    return f"nec [{budget}] {j.i}"


def render_script(s: Script) -> str:
    out = [f"hyp: {render(h)}" for h in s.hypotheses]
    out += [f"{line.index}: {render(line.formula)} ; {_render_just(line.justification)}"
            for line in s.lines]
    return "\n".join(out) + "\n"


def _parse_just(text: str, lineno: int) -> Justification:
    words = text.split()
    bad = ProofError(f"line {lineno}: bad justification {text.strip()!r}", "E-SCRIPT-SYNTAX")
    if not words:
        raise bad
    kind = words[0].lower()
    try:
        if kind == "taut" and len(words) == 1:
            return Taut()
        if kind == "axiom" and len(words) == 2:
            name = {a.lower(): a for a in AXIOMS}.get(words[1].lower(), words[1])
            return Axiom(name)
        if kind == "hyp" and len(words) == 2:
            return Hyp(int(words[1]))
        if kind == "mp" and len(words) == 3:
            return MP(int(words[1]), int(words[2]))
        if kind == "nec":
            m = re.match(r"\s*nec\s*(\[.*\])\s*(\d+)\s*$", text, re.IGNORECASE)
            if m:
                probe = parse(m.group(1) + " p")
                return Nec(probe.budget, int(m.group(2)))
    except (ValueError, FormulaError):
        raise bad from None
    raise bad


def parse_script(text: str) -> Script:
    hyps, lines = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            if stripped.lower().startswith("hyp:"):
                if lines:
                    raise ProofError(f"line {lineno}: hypotheses must precede derivation lines",
                                     "E-SCRIPT-SYNTAX")
                hyps.append(parse(stripped[4:]))
                continue
            m = _LINE.match(stripped)
            if m is None:
                raise ProofError(f"line {lineno}: expected 'N: formula ; justification'",
                                 "E-SCRIPT-SYNTAX")
            lines.append(Line(int(m.group(1)), parse(m.group(2)), _parse_just(m.group(3), lineno)))
        except FormulaError as exc:
            raise ProofError(f"line {lineno}: {exc}", "E-SCRIPT-SYNTAX") from None
    if not lines:
        raise ProofError("script has no derivation lines", "E-EMPTY")
    return Script(tuple(hyps), tuple(lines))
