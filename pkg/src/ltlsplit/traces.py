"""Ultimately periodic (lasso) traces and LTL evaluation over them.

A lasso ``prefix . loop^omega`` is the universal witness shape: every
satisfiable LTL formula has such a model, and every state is a finite set
of atoms (closed world: an atom absent from a state is false).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .formula import (
    Always,
    And,
    Atom,
    Eventually,
    FalseF,
    Formula,
    Iff,
    Implies,
    Next,
    Not,
    Or,
    Release,
    TrueF,
    Until,
)

State = frozenset[Atom]


def state(*names: str) -> State:
    """Convenience constructor: ``state("p", "a'")`` builds a trace state."""
    out = set()
    for name in names:
        if name.endswith("'"):
            out.add(Atom(name[:-1], True))
        else:
            out.add(Atom(name))
    return frozenset(out)


@dataclass(frozen=True)
class LassoTrace:
    prefix: tuple[State, ...]
    loop: tuple[State, ...]

    def __post_init__(self):
        if not self.loop:
            raise ValueError("lasso loop must be nonempty")

    def state_at(self, i: int) -> State:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.loop[(i - len(self.prefix)) % len(self.loop)]

    @property
    def positions(self) -> int:
        """Number of distinct positions: |prefix| + |loop|."""
        return len(self.prefix) + len(self.loop)

    def unroll(self, prefix_len: int, loop_len: int) -> "LassoTrace":
        """Re-shape to a longer, equivalent representation of the same word."""
        if prefix_len < len(self.prefix) or loop_len % len(self.loop) != 0:
            raise ValueError("incompatible unroll shape")
        prefix = tuple(self.state_at(i) for i in range(prefix_len))
        loop = tuple(self.state_at(prefix_len + i) for i in range(loop_len))
        return LassoTrace(prefix, loop)


def lasso(prefix_states, loop_states) -> LassoTrace:
    return LassoTrace(tuple(map(frozenset, prefix_states)),
                      tuple(map(frozenset, loop_states)))


def _canon(trace: LassoTrace, i: int) -> int:
    p = len(trace.prefix)
    if i < p:
        return i
    return p + (i - p) % len(trace.loop)


def _values(trace: LassoTrace, f: Formula, memo: dict) -> list[bool]:
    """Truth value of ``f`` at each of the finitely many distinct positions.

    Until is a least fixpoint, Release a greatest fixpoint; both are
    iterated to stabilization over the lasso positions.
    """
    cached = memo.get(f)
    if cached is not None:
        return cached
    n = trace.positions
    p = len(trace.prefix)
    succ = [i + 1 if i + 1 < n else p for i in range(n)]

    if isinstance(f, TrueF):
        vals = [True] * n
    elif isinstance(f, FalseF):
        vals = [False] * n
    elif isinstance(f, Atom):
        vals = [f in trace.state_at(i) for i in range(n)]
    elif isinstance(f, Not):
        vals = [not v for v in _values(trace, f.arg, memo)]
    elif isinstance(f, And):
        lv, rv = _values(trace, f.left, memo), _values(trace, f.right, memo)
        vals = [a and b for a, b in zip(lv, rv)]
    elif isinstance(f, Or):
        lv, rv = _values(trace, f.left, memo), _values(trace, f.right, memo)
        vals = [a or b for a, b in zip(lv, rv)]
    elif isinstance(f, Implies):
        lv, rv = _values(trace, f.left, memo), _values(trace, f.right, memo)
        vals = [(not a) or b for a, b in zip(lv, rv)]
    elif isinstance(f, Iff):
        lv, rv = _values(trace, f.left, memo), _values(trace, f.right, memo)
        vals = [a == b for a, b in zip(lv, rv)]
    elif isinstance(f, Next):
        av = _values(trace, f.arg, memo)
        vals = [av[succ[i]] for i in range(n)]
    elif isinstance(f, (Until, Eventually)):
        if isinstance(f, Eventually):
            lv, rv = [True] * n, _values(trace, f.arg, memo)
        else:
            lv, rv = _values(trace, f.left, memo), _values(trace, f.right, memo)
        vals = [False] * n
        changed = True
        while changed:
            changed = False
            for i in range(n - 1, -1, -1):
                v = rv[i] or (lv[i] and vals[succ[i]])
                if v != vals[i]:
                    vals[i] = v
                    changed = True
    elif isinstance(f, (Release, Always)):
        if isinstance(f, Always):
            lv, rv = [False] * n, _values(trace, f.arg, memo)
        else:
            lv, rv = _values(trace, f.left, memo), _values(trace, f.right, memo)
        vals = [True] * n
        changed = True
        while changed:
            changed = False
            for i in range(n - 1, -1, -1):
                v = rv[i] and (lv[i] or vals[succ[i]])
                if v != vals[i]:
                    vals[i] = v
                    changed = True
    else:
        raise TypeError(f"unknown formula node {f!r}")
    memo[f] = vals
    return vals


def eval_formula(trace: LassoTrace, f: Formula, i: int = 0) -> bool:
    """Standard LTL semantics at position ``i`` of the infinite word."""
    if i < 0:
        raise ValueError("position must be nonnegative")
    return _values(trace, f, {})[_canon(trace, i)]


def project_trace(trace: LassoTrace, keep, system) -> LassoTrace:
    """Keep environment atoms plus system atoms in ``keep``; drop primes.

    ``system`` is the full set of system variable names; every unprimed
    atom outside it is treated as an environment atom and kept.
    """
    keep = frozenset(keep)
    system = frozenset(system)

    def proj(s: State) -> State:
        return frozenset(a for a in s
                         if not a.primed and (a.base not in system or a.base in keep))

    return LassoTrace(tuple(proj(s) for s in trace.prefix),
                      tuple(proj(s) for s in trace.loop))


def strip_primes(trace: LassoTrace) -> LassoTrace:
    """Drop every primed atom from every state; lengths are preserved."""
    def strip(s: State) -> State:
        return frozenset(a for a in s if not a.primed)

    return LassoTrace(tuple(strip(s) for s in trace.prefix),
                      tuple(strip(s) for s in trace.loop))


def compute_z(trace: LassoTrace, candidates) -> tuple[str, ...]:
    """Variables whose primed and unprimed copies disagree at some position.

    The result preserves the order of ``candidates``.
    """
    out = []
    n = trace.positions
    for z in candidates:
        plain, primed = Atom(z), Atom(z, True)
        for i in range(n):
            s = trace.state_at(i)
            if (plain in s) != (primed in s):
                out.append(z)
                break
    return tuple(out)


def _atom_key(var_order):
    if var_order is None:
        return lambda a: (a.base, a.primed)
    index = {name: i for i, name in enumerate(var_order)}
    return lambda a: (index.get(a.base, len(index)), a.base, a.primed)


def format_state(s: State, var_order=None) -> str:
    key = _atom_key(var_order)
    names = [a.base + ("'" if a.primed else "") for a in sorted(s, key=key)]
    return "{" + ", ".join(names) + "}"


def format_trace(trace: LassoTrace, var_order=None) -> str:
    """Bit-exact evidence serialization: ``s1 ; s2 | t1 ; t2``."""
    pre = " ; ".join(format_state(s, var_order) for s in trace.prefix)
    loop = " ; ".join(format_state(s, var_order) for s in trace.loop)
    return f"{pre} | {loop}" if pre else f"| {loop}"


def parse_trace(text: str) -> LassoTrace:
    if "|" not in text:
        raise ValueError("trace must contain a '|' prefix/loop separator")
    pre_text, loop_text = text.split("|", 1)

    def parse_states(part: str) -> tuple[State, ...]:
        states = []
        for chunk in part.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            if not (chunk.startswith("{") and chunk.endswith("}")):
                raise ValueError(f"malformed state {chunk!r}")
            inner = chunk[1:-1].strip()
            names = [w.strip() for w in inner.split(",") if w.strip()] if inner else []
            states.append(state(*names))
        return tuple(states)

    loop = parse_states(loop_text)
    if not loop:
        raise ValueError("trace loop must be nonempty")
    return LassoTrace(parse_states(pre_text), loop)


def align_shapes(shape1: tuple[int, int], shape2: tuple[int, int]) -> tuple[int, int]:
    """Common shape for joining: max prefix, lcm of loop lengths."""
    p = max(shape1[0], shape2[0])
    l1, l2 = shape1[1], shape2[1]
    return p, l1 * l2 // gcd(l1, l2)
