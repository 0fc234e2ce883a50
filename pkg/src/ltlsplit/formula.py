"""LTL abstract syntax and the formula rewrites used by decomposition queries.

Atoms carry a ``primed`` flag rather than a name suffix, so the fresh
variables introduced by projection renaming can never collide with a
declared variable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


class Formula:
    """Base class for LTL formula nodes. Nodes are immutable and hashable."""

    __slots__ = ()


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    base: str
    primed: bool = False


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    arg: Formula


@dataclass(frozen=True)
class Always(Formula):
    arg: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula


TRUE = TrueF()
FALSE = FalseF()

_UNARY = (Not, Next, Eventually, Always)
_BINARY = (And, Or, Implies, Iff, Until, Release)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, _UNARY):
        return (f.arg,)
    if isinstance(f, _BINARY):
        return (f.left, f.right)
    return ()


def walk(f: Formula) -> Iterator[Formula]:
    """Yield every node of the formula tree (pre-order)."""
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def atoms(f: Formula) -> frozenset[Atom]:
    """The exact set of atoms (primed or not) occurring in ``f``."""
    return frozenset(n for n in walk(f) if isinstance(n, Atom))


def _rebuild(f: Formula, new_children: tuple[Formula, ...]) -> Formula:
    if isinstance(f, _UNARY):
        return type(f)(new_children[0])
    if isinstance(f, _BINARY):
        return type(f)(new_children[0], new_children[1])
    return f


def map_atoms(f: Formula, fn) -> Formula:
    """Rebuild ``f`` with every Atom leaf replaced by ``fn(atom)``."""
    if isinstance(f, Atom):
        return fn(f)
    kids = children(f)
    if not kids:
        return f
    return _rebuild(f, tuple(map_atoms(c, fn) for c in kids))


def rename_projection(f: Formula, w: Iterable[str]) -> Formula:
    """Prime every unprimed atom whose name is in ``w``; the rest is untouched.

    Raises ValueError if ``f`` already contains a primed atom with a base
    in ``w`` (re-priming would conflate two distinct renamings).
    """
    names = frozenset(w)
    for a in atoms(f):
        if a.primed and a.base in names:
            raise ValueError(f"cannot re-prime variable {a.base!r}")

    def prime(a: Atom) -> Atom:
        if not a.primed and a.base in names:
            return Atom(a.base, True)
        return a

    return map_atoms(f, prime)


def unprime(f: Formula) -> Formula:
    """Replace every primed atom by its unprimed base variable."""
    return map_atoms(f, lambda a: Atom(a.base, False) if a.primed else a)


def lock_conjunct(f: Formula, z: str) -> Formula:
    """Conjoin the constraint that ``z`` always agrees with its primed copy.

    Applied structurally: locking the same variable twice yields two
    conjuncts.
    """
    return And(f, Always(Iff(Atom(z), Atom(z, True))))


def dependence_query(phi: Formula, w: Iterable[str], y: Iterable[str]) -> Formula:
    """The satisfiability query whose models certify that ``w`` is dependent.

    Builds the conjunction of the two projection renamings of ``phi``
    (over ``w`` and over ``y``) with the negation of ``phi`` itself.
    """
    w = tuple(w)
    y = tuple(y)
    if set(w) & set(y):
        raise ValueError("projection variable sets must be disjoint")
    return And(rename_projection(phi, w), And(rename_projection(phi, y), Not(phi)))


def print_formula(f: Formula) -> str:
    """Render a formula in the surface grammar; binaries are parenthesized."""
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Atom):
        return f.base + "'" if f.primed else f.base
    if isinstance(f, Not):
        return "!" + print_formula(f.arg)
    if isinstance(f, Next):
        return "X " + print_formula(f.arg)
    if isinstance(f, Eventually):
        return "F " + print_formula(f.arg)
    if isinstance(f, Always):
        return "G " + print_formula(f.arg)
    op = {And: "&", Or: "|", Implies: "->", Iff: "<->", Until: "U", Release: "R"}[
        type(f)
    ]
    return f"({print_formula(f.left)} {op} {print_formula(f.right)})"
