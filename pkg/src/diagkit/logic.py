"""Propositional formulas: AST, parser, printer and a small SAT backend.

Everything else in the package reasons through the three functions at the
bottom (`is_consistent`, `entails`, `violates`).  The SAT procedure is a
plain DPLL over a Tseitin CNF encoding -- complete for propositional logic
and fast enough for knowledge bases with a few dozen variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class Formula:
    """Base class for formula AST nodes.  Nodes are immutable and hashable."""

    def __invert__(self) -> "Formula":
        return Not(self)

    def __and__(self, other: "Formula") -> "Formula":
        return And((self, other))

    def __or__(self, other: "Formula") -> "Formula":
        return Or((self, other))

    def __rshift__(self, other: "Formula") -> "Formula":
        return Implies(self, other)

    def __str__(self) -> str:
        return serialize(self)

    def __repr__(self) -> str:
        return "%s(%s)" % (type(self).__name__, serialize(self))


@dataclass(frozen=True, repr=False)
class Var(Formula):
    name: str

    def __post_init__(self):
        if not IDENT_RE.fullmatch(self.name):
            raise ValueError("bad variable name: %r" % (self.name,))


@dataclass(frozen=True, repr=False)
class Not(Formula):
    child: Formula


@dataclass(frozen=True, repr=False)
class And(Formula):
    children: tuple

    def __post_init__(self):
        assert len(self.children) >= 2


@dataclass(frozen=True, repr=False)
class Or(Formula):
    children: tuple

    def __post_init__(self):
        assert len(self.children) >= 2


@dataclass(frozen=True, repr=False)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Const(Formula):
    value: bool


TRUE = Const(True)
FALSE = Const(False)


def variables(f: Formula) -> set[str]:
    """Set of variable names occurring in a formula."""
    out: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Var):
            out.add(g.name)
        elif isinstance(g, Not):
            stack.append(g.child)
        elif isinstance(g, (And, Or)):
            stack.extend(g.children)
        elif isinstance(g, (Implies, Iff)):
            stack.append(g.left)
            stack.append(g.right)
    return out


def variables_of(fs: Iterable[Formula]) -> set[str]:
    out: set[str] = set()
    for f in fs:
        out |= variables(f)
    return out


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__("%s (at position %d)" % (message, pos))
        self.pos = pos


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<iff><->)|(?P<imp>->)|(?P<or>\|)|(?P<and>&)|(?P<not>!)"
    r"|(?P<lpar>\()|(?P<rpar>\))|(?P<ident>[A-Za-z_][A-Za-z0-9_]*))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.lastgroup is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            bad_pos = pos + (len(text[pos:]) - len(rest))
            raise ParseError("unexpected character %r" % rest[0], bad_pos)
        tokens.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    """Recursive descent parser.

    Grammar (loosest to tightest binding):
        formula := iff
        iff     := imp ("<->" imp)*
        imp     := or ("->" imp)?        right associative
        or      := and ("|" and)*
        and     := unary ("&" unary)*
        unary   := "!" unary | "(" formula ")" | ident | "true" | "false"
    """

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> tuple[str, str, int]:
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError("expected %s, got %r" % (kind, tok[1] or "end of input"), tok[2])
        return self.advance()

    def parse(self) -> Formula:
        f = self.iff()
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError("trailing input %r" % tok[1], tok[2])
        return f

    def iff(self) -> Formula:
        f = self.imp()
        while self.peek()[0] == "iff":
            self.advance()
            f = Iff(f, self.imp())
        return f

    def imp(self) -> Formula:
        f = self.disj()
        if self.peek()[0] == "imp":
            self.advance()
            return Implies(f, self.imp())
        return f

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self.peek()[0] == "or":
            self.advance()
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.peek()[0] == "and":
            self.advance()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "not":
            self.advance()
            return Not(self.unary())
        if kind == "lpar":
            self.advance()
            f = self.iff()
            self.expect("rpar")
            return f
        if kind == "ident":
            self.advance()
            if value == "true":
                return TRUE
            if value == "false":
                return FALSE
            return Var(value)
        raise ParseError("expected a formula, got %r" % (value or "end of input"), pos)


def parse(text: str) -> Formula:
    """Parse a formula from its text form.  Raises ParseError on bad input."""
    if not text.strip():
        raise ParseError("empty input", 0)
    return _Parser(text).parse()


def serialize(f: Formula) -> str:
    """Render a formula back to text; parse(serialize(f)) == f."""

    def prec(g: Formula) -> int:
        if isinstance(g, Iff):
            return 1
        if isinstance(g, Implies):
            return 2
        if isinstance(g, Or):
            return 3
        if isinstance(g, And):
            return 4
        return 5  # Var, Not, Const

    def render(g: Formula, parent: int) -> str:
        p = prec(g)
        if isinstance(g, Var):
            s = g.name
        elif isinstance(g, Const):
            s = "true" if g.value else "false"
        elif isinstance(g, Not):
            s = "!" + render(g.child, 5)
        elif isinstance(g, And):
            # children of the same operator are parenthesized so that the
            # n-ary flattening parse reproduces the exact tree shape
            s = " & ".join(render(c, p + 1) for c in g.children)
        elif isinstance(g, Or):
            s = " | ".join(render(c, p + 1) for c in g.children)
        elif isinstance(g, Implies):
            # right associative: parenthesize a left child of equal precedence
            s = "%s -> %s" % (render(g.left, p + 1), render(g.right, p))
        elif isinstance(g, Iff):
            # <-> chains parse left associatively
            s = "%s <-> %s" % (render(g.left, p), render(g.right, p + 1))
        else:
            raise TypeError("not a formula: %r" % (g,))
        if p < parent:
            return "(" + s + ")"
        return s

    return render(f, 0)


# ---------------------------------------------------------------------------
# satisfiability
# ---------------------------------------------------------------------------

class _Tseitin:
    """Equisatisfiable CNF encoding.  Fresh variables get negative indices
    internally; user variables are numbered from 1 in lexicographic order so
    that solver behavior is reproducible.
    """

    def __init__(self, var_names: list[str]):
        self.index = {name: i + 1 for i, name in enumerate(sorted(var_names))}
        self.next_aux = len(self.index) + 1
        self.clauses: list[tuple[int, ...]] = []
        self.cache: dict[Formula, int] = {}

    def fresh(self) -> int:
        v = self.next_aux
        self.next_aux += 1
        return v

    def add(self, *lits: int) -> None:
        self.clauses.append(tuple(lits))

    def encode(self, f: Formula) -> int:
        """Returns a literal equivalent to f (under the emitted clauses)."""
        if f in self.cache:
            return self.cache[f]
        if isinstance(f, Var):
            lit = self.index[f.name]
        elif isinstance(f, Const):
            lit = self.fresh()
            self.add(lit if f.value else -lit)
        elif isinstance(f, Not):
            lit = -self.encode(f.child)
        elif isinstance(f, And):
            lits = [self.encode(c) for c in f.children]
            lit = self.fresh()
            for c in lits:
                self.add(-lit, c)
            self.add(lit, *[-c for c in lits])
        elif isinstance(f, Or):
            lits = [self.encode(c) for c in f.children]
            lit = self.fresh()
            self.add(-lit, *lits)
            for c in lits:
                self.add(lit, -c)
        elif isinstance(f, Implies):
            a, b = self.encode(f.left), self.encode(f.right)
            lit = self.fresh()
            self.add(-lit, -a, b)
            self.add(lit, a)
            self.add(lit, -b)
        elif isinstance(f, Iff):
            a, b = self.encode(f.left), self.encode(f.right)
            lit = self.fresh()
            self.add(-lit, -a, b)
            self.add(-lit, a, -b)
            self.add(lit, a, b)
            self.add(lit, -a, -b)
        else:
            raise TypeError("not a formula: %r" % (f,))
        self.cache[f] = lit
        return lit


def _dpll(clauses: list[tuple[int, ...]]) -> bool:
    """DPLL with unit propagation and pure-literal elimination.

    Branch variable is the smallest unassigned index (user variables come
    first and are lexicographically numbered), which keeps runs deterministic.
    """
    assignment: dict[int, bool] = {}

    def solve(clauses: list[tuple[int, ...]]) -> bool:
        # unit propagation + pure literals, to fixpoint
        while True:
            changed = False
            units = set()
            counts: dict[int, int] = {}
            simplified = []
            for clause in clauses:
                lits = []
                satisfied = False
                for lit in clause:
                    v = abs(lit)
                    if v in assignment:
                        if assignment[v] == (lit > 0):
                            satisfied = True
                            break
                    else:
                        lits.append(lit)
                if satisfied:
                    continue
                if not lits:
                    return False
                if len(lits) == 1:
                    units.add(lits[0])
                for lit in lits:
                    counts[lit] = counts.get(lit, 0) + 1
                simplified.append(tuple(lits))
            clauses = simplified
            if not clauses:
                return True
            for lit in units:
                if -lit in units:
                    return False
                assignment[abs(lit)] = lit > 0
                changed = True
            if not changed:
                for lit in counts:
                    if -lit not in counts:
                        assignment[abs(lit)] = lit > 0
                        changed = True
            if not changed:
                break
        var = min(abs(lit) for clause in clauses for lit in clause)
        for value in (True, False):
            saved = dict(assignment)
            assignment[var] = value
            if solve(clauses):
                return True
            assignment.clear()
            assignment.update(saved)
        return False

    return solve(clauses)


def is_consistent(kb: Iterable[Formula]) -> bool:
    """True iff the conjunction of the given sentences is satisfiable."""
    kb = list(kb)
    if not kb:
        return True
    enc = _Tseitin(sorted(variables_of(kb)))
    for f in kb:
        enc.add(enc.encode(f))
    return _dpll(enc.clauses)


def entails(kb: Iterable[Formula], goal: Iterable[Formula]) -> bool:
    """True iff kb |= conjunction of goal.  An empty goal is always entailed."""
    goal = list(goal)
    if not goal:
        return True
    conj = goal[0] if len(goal) == 1 else And(tuple(goal))
    return not is_consistent(list(kb) + [Not(conj)])


SUPPORTED_REQUIREMENTS = frozenset({"consistency"})


def violates(kb: Iterable[Formula], requirements: Iterable[str],
             negative_tests: Iterable[Iterable[Formula]]) -> bool:
    """True iff kb breaks a requirement or entails some negative test case.

    A test case is a set of sentences read as their conjunction.  Only the
    consistency requirement is supported.
    """
    reqs = set(requirements)
    unsupported = reqs - SUPPORTED_REQUIREMENTS
    if unsupported:
        raise ValueError("unsupported requirements: %s" % sorted(unsupported))
    kb = list(kb)
    if "consistency" in reqs and not is_consistent(kb):
        return True
    for n in negative_tests:
        if entails(kb, list(n)):
            return True
    return False
