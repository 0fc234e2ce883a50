"""Partitioning the system variables of a spec into minimal independent blocks.

The core loop asks the satisfiability oracle for models of projection
queries; a Sat witness pinpoints (via the primed/unprimed disagreement
set Z) candidate variables the current block depends on, which are then
confirmed one at a time by locking them and re-solving.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import chain, combinations

from .engine import EngineLimitError, InternalSolver, SatResult
from .formula import Formula, dependence_query, lock_conjunct
from .parser import Spec
from .traces import LassoTrace, compute_z

ORDER_POLICIES = ("decl", "lex")


class InvariantViolation(Exception):
    """A Sat witness yielded an empty disagreement set; engine soundness bug."""


@dataclass
class QueryRecord:
    formula: Formula
    verdict: str                       # "SAT" or "UNSAT"
    witness: LassoTrace | None
    millis: float


@dataclass(frozen=True)
class Block:
    vars: tuple[str, ...]
    certificate: Formula


@dataclass
class PartitionResult:
    blocks: list[Block]
    query_log: list[QueryRecord]

    @property
    def query_count(self) -> int:
        return len(self.query_log)

    def block_sets(self) -> set[frozenset[str]]:
        return {frozenset(b.vars) for b in self.blocks}


def _ordered(names, order: str) -> tuple[str, ...]:
    names = tuple(names)
    if order == "lex":
        return tuple(sorted(names))
    if order == "decl":
        return names
    raise ValueError(f"unknown ordering policy {order!r}")


class _Session:
    def __init__(self, solver):
        self.solver = solver
        self.log: list[QueryRecord] = []

    def solve(self, f: Formula) -> SatResult:
        start = time.perf_counter()
        result = self.solver.solve(f)
        millis = (time.perf_counter() - start) * 1000.0
        self.log.append(QueryRecord(f, "SAT" if result.is_sat else "UNSAT",
                                    result.witness, millis))
        return result


def check_independent(phi: Formula, w, s, solver=None) -> tuple[bool, LassoTrace | None]:
    """Single-query independence test for ``w`` within system variables ``s``.

    Returns (independent, witness); the witness is a dependence
    counterexample when the query is satisfiable.
    """
    solver = solver or InternalSolver()
    w = tuple(w)
    rest = tuple(v for v in s if v not in set(w))
    result = solver.solve(dependence_query(phi, w, rest))
    return (not result.is_sat, result.witness)


def look_for_dependent_variables(phi: Formula, query: Formula,
                                 z_set, w, y, session: _Session) -> tuple[str, ...]:
    """Grow the dependent block ``w`` one confirmed variable at a time.

    Precondition: the last solve of ``query`` was Sat and ``z_set`` is the
    disagreement set of that witness over ``y``.  Locks candidates from
    ``z_set`` until the query goes Unsat, commits the last locked
    variable, rebuilds the query from ``phi`` alone and recurses while
    models remain.
    """
    w = tuple(w)
    y = tuple(y)
    z_set = tuple(z_set)
    locked_query = query
    z = None
    while True:
        if not z_set:
            raise InvariantViolation(
                "Sat witness produced an empty disagreement set")
        z = z_set[0]
        locked_query = lock_conjunct(locked_query, z)
        result = session.solve(locked_query)
        if not result.is_sat:
            break
        z_set = compute_z(result.witness, y)
    w = w + (z,)
    y = tuple(v for v in y if v != z)
    rebuilt = dependence_query(phi, w, y)
    result = session.solve(rebuilt)
    if result.is_sat:
        z_set = compute_z(result.witness, y)
        if not z_set:
            raise InvariantViolation(
                "Sat witness produced an empty disagreement set")
        return look_for_dependent_variables(phi, rebuilt, z_set, w, y, session)
    return w


def _partition_rec(phi: Formula, sys_vars: tuple[str, ...],
                   full_sys: tuple[str, ...], session: _Session) -> list[Block]:
    if not sys_vars:
        return []
    rest_full = lambda w: tuple(v for v in full_sys if v not in set(w))
    if len(sys_vars) == 1:
        # A single remaining variable is independent; no solver call needed.
        w = sys_vars
        return [Block(w, dependence_query(phi, w, rest_full(w)))]
    x = sys_vars[0]
    others = sys_vars[1:]
    query = dependence_query(phi, (x,), others)
    result = session.solve(query)
    if not result.is_sat:
        w = (x,)
        certificate = query
    else:
        z_set = compute_z(result.witness, others)
        if not z_set:
            raise InvariantViolation(
                "Sat witness produced an empty disagreement set")
        w = look_for_dependent_variables(phi, query, z_set, (x,), others, session)
        certificate = session.log[-1].formula
    remaining = tuple(v for v in sys_vars if v not in set(w))
    return [Block(w, certificate)] + _partition_rec(phi, remaining, full_sys, session)


def partition(spec: Spec, solver=None, order: str = "decl") -> PartitionResult:
    """Split the system variables into minimal independent blocks."""
    session = _Session(solver or InternalSolver())
    sys_vars = _ordered(spec.sys, order)
    blocks = _partition_rec(spec.formula, sys_vars, sys_vars, session)
    covered = list(chain.from_iterable(b.vars for b in blocks))
    assert sorted(covered) == sorted(spec.sys), "blocks must partition sys exactly"
    assert len(covered) == len(set(covered)), "blocks must be pairwise disjoint"
    return PartitionResult(blocks, session.log)


@dataclass
class SubsetAudit:
    subset: tuple[str, ...]
    dependent: bool
    witness: LassoTrace | None
    error: str | None = None


@dataclass
class BlockAudit:
    vars: tuple[str, ...]
    sound: bool | None
    witness: LassoTrace | None = None
    error: str | None = None
    minimality: list[SubsetAudit] = field(default_factory=list)
    minimality_skipped: bool = False


@dataclass
class VerificationReport:
    block_audits: list[BlockAudit]

    @property
    def ok(self) -> bool:
        for audit in self.block_audits:
            if audit.sound is not True or audit.error:
                return False
            for sub in audit.minimality:
                if not sub.dependent or sub.error:
                    return False
        return True


def verify_partition(spec: Spec, result: PartitionResult, solver=None,
                     minimality: bool = False,
                     max_minimality_block: int = 6) -> VerificationReport:
    """Re-derive every block's independence; optionally audit minimality.

    The minimality audit solves one dependence query per nonempty proper
    subset, so it is exponential in block size and is skipped for blocks
    larger than ``max_minimality_block``.  Engine-limit failures are
    recorded per check and do not abort the remaining checks.
    """
    solver = solver or InternalSolver()
    phi = spec.formula
    audits = []
    for block in result.blocks:
        audit = BlockAudit(block.vars, None)
        try:
            independent, witness = check_independent(phi, block.vars, spec.sys, solver)
            audit.sound = independent
            audit.witness = witness
        except EngineLimitError as exc:
            audit.error = str(exc)
        if minimality:
            if len(block.vars) > max_minimality_block:
                audit.minimality_skipped = True
            else:
                for size in range(1, len(block.vars)):
                    for subset in combinations(block.vars, size):
                        sub = SubsetAudit(subset, False, None)
                        try:
                            independent, witness = check_independent(
                                phi, subset, spec.sys, solver)
                            sub.dependent = not independent
                            sub.witness = witness
                        except EngineLimitError as exc:
                            sub.error = str(exc)
                        audit.minimality.append(sub)
        audits.append(audit)
    return VerificationReport(audits)
