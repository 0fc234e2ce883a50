"""Parsing of formulas and of the line-oriented specification file format.

Spec files look like::

    # comment
    env: p q
    sys: a b c
    formula: G(p -> a) & F b

The formula may span multiple lines and runs to end of file.  Apostrophes
are legal in formula text only as the prime mark produced by projection
renaming; declared variable names may not carry one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import (
    FALSE,
    TRUE,
    Always,
    And,
    Atom,
    Eventually,
    Formula,
    Iff,
    Implies,
    Next,
    Not,
    Or,
    Release,
    Until,
    atoms,
)

RESERVED = frozenset({"true", "false", "G", "F", "X", "U", "R"})

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class SpecError(Exception):
    """Any rejection of an input document, with an optional position."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_SYMBOLS = ("<->", "->", "(", ")", "&", "|", "!")


def _tokenize(text: str, start_line: int = 1, start_col: int = 1) -> list[Token]:
    tokens: list[Token] = []
    line, col = start_line, start_col
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("sym", sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            m = _IDENT_RE.match(text, i)
            if not m:
                raise SpecError(f"unexpected character {ch!r}", line, col)
            word = m.group(0)
            tcol = col
            i = m.end()
            col += len(word)
            primed = False
            if i < n and text[i] == "'":
                primed = True
                i += 1
                col += 1
            if word in RESERVED:
                if primed:
                    raise SpecError(f"reserved word {word!r} cannot be primed", line, tcol)
                tokens.append(Token("kw", word, line, tcol))
            else:
                tokens.append(Token("ident'" if primed else "ident", word, line, tcol))
    tokens.append(Token("eof", "", line, col))
    return tokens


class _FormulaParser:
    """Recursive-descent parser.

    Precedence, loosest to tightest: ``<->``, ``->``, ``|``, ``&``,
    ``U``/``R`` (right associative), unary ``! G F X``.  N-ary ``&``/``|``
    chains fold to the right.
    """

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.atom_positions: dict[str, tuple[int, int]] = {}

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text or tok.kind == "eof":
            raise SpecError(f"expected {text!r}, found {tok.text or 'end of input'!r}",
                            tok.line, tok.col)
        return self.advance()

    def parse(self) -> Formula:
        f = self.iff()
        tok = self.peek()
        if tok.kind != "eof":
            raise SpecError(f"unexpected {tok.text!r} after formula", tok.line, tok.col)
        return f

    def iff(self) -> Formula:
        left = self.implies()
        if self.peek().text == "<->":
            self.advance()
            return Iff(left, self.iff())
        return left

    def implies(self) -> Formula:
        left = self.disjunction()
        if self.peek().text == "->":
            self.advance()
            return Implies(left, self.implies())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        if self.peek().text == "|":
            self.advance()
            return Or(left, self.disjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.until()
        if self.peek().text == "&":
            self.advance()
            return And(left, self.conjunction())
        return left

    def until(self) -> Formula:
        left = self.unary()
        tok = self.peek()
        if tok.kind == "kw" and tok.text in ("U", "R"):
            self.advance()
            right = self.until()
            return Until(left, right) if tok.text == "U" else Release(left, right)
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.text == "!":
            self.advance()
            return Not(self.unary())
        if tok.kind == "kw" and tok.text in ("G", "F", "X"):
            self.advance()
            arg = self.unary()
            return {"G": Always, "F": Eventually, "X": Next}[tok.text](arg)
        return self.primary()

    def primary(self) -> Formula:
        tok = self.peek()
        if tok.text == "(":
            self.advance()
            f = self.iff()
            self.expect(")")
            return f
        if tok.kind == "kw" and tok.text == "true":
            self.advance()
            return TRUE
        if tok.kind == "kw" and tok.text == "false":
            self.advance()
            return FALSE
        if tok.kind in ("ident", "ident'"):
            self.advance()
            self.atom_positions.setdefault(tok.text, (tok.line, tok.col))
            return Atom(tok.text, tok.kind == "ident'")
        raise SpecError(f"expected a formula, found {tok.text or 'end of input'!r}",
                        tok.line, tok.col)


def parse_formula(text: str, start_line: int = 1, start_col: int = 1) -> Formula:
    return _FormulaParser(_tokenize(text, start_line, start_col)).parse()


@dataclass(frozen=True)
class Spec:
    """A reactive-synthesis specification: env/sys variables and a formula."""

    env: tuple[str, ...]
    sys: tuple[str, ...]
    formula: Formula


def make_spec(env, sys_, formula: Formula) -> Spec:
    """Validate and build a Spec; raises SpecError on any invariant violation."""
    env = tuple(env)
    sys_ = tuple(sys_)
    for names, kind in ((env, "env"), (sys_, "sys")):
        seen = set()
        for name in names:
            if name in seen:
                raise SpecError(f"duplicate {kind} variable {name!r}")
            seen.add(name)
    overlap = set(env) & set(sys_)
    if overlap:
        raise SpecError(f"variables declared both env and sys: {sorted(overlap)}")
    declared = set(env) | set(sys_)
    for a in sorted(atoms(formula), key=lambda a: (a.base, a.primed)):
        if a.primed:
            raise SpecError(f"primed atom {a.base}' not allowed in an input spec")
        if a.base not in declared:
            raise SpecError(f"undeclared atom {a.base!r}")
    return Spec(env, sys_, formula)


def _strip_comment(line: str) -> str:
    idx = line.find("#")
    return line if idx < 0 else line[:idx]


def _parse_names(rest: str, kind: str, line_no: int) -> list[str]:
    names = []
    col = len(f"{kind}:") + 1
    for part in rest.split():
        col = _strip_comment(rest).find(part, col - 1) + 1  # best effort position
        if "'" in part:
            raise SpecError(f"apostrophe is illegal in variable names: {part!r}",
                            line_no, col)
        if part in RESERVED:
            raise SpecError(f"reserved word {part!r} used as a variable", line_no, col)
        if not _IDENT_RE.fullmatch(part):
            raise SpecError(f"invalid variable name {part!r}", line_no, col)
        names.append(part)
    return names


def parse_spec(text: str) -> Spec:
    """Parse a full spec document; see the module docstring for the format."""
    lines = text.split("\n")
    env: list[str] | None = None
    sys_: list[str] | None = None
    formula_text: str | None = None
    formula_line = 1
    formula_col = 1

    for idx, raw in enumerate(lines):
        line_no = idx + 1
        line = _strip_comment(raw)
        stripped = line.strip()
        if not stripped:
            continue
        if env is None:
            if not stripped.startswith("env:"):
                raise SpecError("expected 'env:' line", line_no, line.find(stripped[0]) + 1)
            env = _parse_names(stripped[len("env:"):], "env", line_no)
        elif sys_ is None:
            if not stripped.startswith("sys:"):
                raise SpecError("expected 'sys:' line", line_no, line.find(stripped[0]) + 1)
            sys_ = _parse_names(stripped[len("sys:"):], "sys", line_no)
        else:
            if not stripped.startswith("formula:"):
                raise SpecError("expected 'formula:' line", line_no, line.find(stripped[0]) + 1)
            head_col = line.index("formula:") + len("formula:") + 1
            first = line[head_col - 1:]
            formula_text = "\n".join([first] + lines[idx + 1:])
            formula_line = line_no
            formula_col = head_col
            break
    if env is None or sys_ is None or formula_text is None:
        raise SpecError("incomplete spec: need env:, sys: and formula: sections")

    parser = _FormulaParser(_tokenize(formula_text, formula_line, formula_col))
    formula = parser.parse()

    declared = set(env) | set(sys_)
    for a in sorted(atoms(formula), key=lambda a: (a.base, a.primed)):
        pos = parser.atom_positions.get(a.base, (None, None))
        if a.primed:
            raise SpecError(f"primed atom {a.base}' not allowed in an input spec",
                            pos[0], pos[1])
        if a.base not in declared:
            raise SpecError(f"undeclared atom {a.base!r}", pos[0], pos[1])
    return make_spec(env, sys_, formula)
