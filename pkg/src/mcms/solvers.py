"""Solvers for one-PRB-per-cell coverage and plain maximum coverage.

`solve_greedy` is the cross-cell greedy: each step scans every
(cell, PRB) pair of the cells not yet assigned and commits the pair
covering the most still-uncovered users.  It returns an allocation whose
union coverage is at least (1 - 1/e) of the optimum.  `solve_exact` is a
brute-force oracle over all N^C allocations, usable for small instances
and for auditing the greedy.  `solve_sc_baseline` models cells that
cannot cooperate: each cell independently picks the PRB that covers the
most of its own primary users.  `solve_mcp_greedy` is the classic greedy
for budgeted maximum coverage over a flat list of sets.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .coverage import Allocation, CoverageInstance


class EnumerationBudgetError(RuntimeError):
    """Exact search would exceed the allocation-count budget."""

    def __init__(self, num_allocations: int, budget: int):
        super().__init__(
            f"exact search needs {num_allocations} allocation evaluations, "
            f"budget is {budget}"
        )
        self.num_allocations = num_allocations
        self.budget = budget


@dataclass(frozen=True)
class SolveResult:
    """An allocation plus the served-user count the solver optimized."""

    alloc: Allocation
    objective: int
    per_step_marginals: tuple[int, ...] | None = None


def greedy_bound(opt: int) -> int:
    """Smallest served count the greedy is guaranteed to reach when the
    optimum is ``opt``: ceil((1 - 1/e) * opt), with a small slack so the
    ceiling never rounds up on floating-point dust."""
    return math.ceil((1.0 - 1.0 / math.e) * opt - 1e-9)


def solve_greedy(instance: CoverageInstance) -> SolveResult:
    """Greedy cross-cell PRB assignment maximizing union (MC) coverage.

    Each of the C steps picks the (cell, PRB) pair with the largest
    marginal gain over the users covered so far, restricted to cells
    without an assignment yet.  Ties go to the lowest cell index, then
    the lowest PRB index.  Runs in O(C^2 * N * M / 64) time via the
    boolean membership tensor.

    Returns a SolveResult whose ``per_step_marginals`` holds the C gains
    in commit order; they are non-increasing.
    """
    member = instance.membership_matrix()
    num_cells, num_prbs, num_users = member.shape
    chosen = [-1] * num_cells
    covered = np.zeros(num_users, dtype=bool)
    remaining = np.ones(num_cells, dtype=bool)
    marginals = []
    for _ in range(num_cells):
        gains = np.count_nonzero(member & ~covered, axis=2)
        gains[~remaining] = -1  # assigned cells never win again
        flat = int(np.argmax(gains))  # first max in row-major order:
        c, j = divmod(flat, num_prbs)  # lowest cell, then lowest PRB
        chosen[c] = j
        remaining[c] = False
        marginals.append(int(max(gains[c, j], 0)))
        covered |= member[c, j]
    alloc = Allocation(tuple(chosen))
    return SolveResult(
        alloc=alloc,
        objective=int(np.count_nonzero(covered)),
        per_step_marginals=tuple(marginals),
    )


def _cell_masks(member: np.ndarray) -> list[list[int]]:
    # Pack each coverage set into one Python int so candidate unions are
    # single big-int ORs instead of M-length array ops.
    num_cells, num_prbs, _ = member.shape
    masks: list[list[int]] = []
    for c in range(num_cells):
        row = []
        for j in range(num_prbs):
            packed = np.packbits(member[c, j], bitorder="little")
            row.append(int.from_bytes(packed.tobytes(), "little"))
        masks.append(row)
    return masks


def solve_exact(
    instance: CoverageInstance, budget: int = 10_000_000
) -> SolveResult:
    """Optimal allocation by exhaustive search over all N^C allocations.

    Ties break toward the lexicographically smallest PRB tuple.  Raises
    EnumerationBudgetError if N^C exceeds ``budget``; the exception
    carries the allocation count so callers can report it.
    """
    member = instance.membership_matrix()
    num_cells, num_prbs, _ = member.shape
    total = num_prbs ** num_cells
    if total > budget:
        raise EnumerationBudgetError(total, budget)
    masks = _cell_masks(member)
    best_count = -1
    best: tuple[int, ...] | None = None
    for combo in itertools.product(range(num_prbs), repeat=num_cells):
        union = 0
        for c, j in enumerate(combo):
            union |= masks[c][j]
        count = union.bit_count()
        if count > best_count:  # strict: first (lex-smallest) winner kept
            best_count = count
            best = combo
    assert best is not None
    return SolveResult(alloc=Allocation(best), objective=best_count)


def solve_sc_baseline(instance: CoverageInstance) -> SolveResult:
    """Each cell alone picks the PRB serving most of its own primary users.

    No coordination between cells; the stored objective is the SC served
    count (sum of the per-cell winners, which partition the users).
    Per-cell ties go to the lowest PRB index.
    """
    member = instance.membership_matrix()
    num_cells, num_prbs, num_users = member.shape
    primary = instance.primary_cell
    chosen = []
    total = 0
    for c in range(num_cells):
        mine = primary == c
        counts = np.count_nonzero(member[c][:, mine], axis=1)
        j = int(np.argmax(counts))
        chosen.append(j)
        total += int(counts[j])
    alloc = Allocation(tuple(chosen))
    return SolveResult(alloc=alloc, objective=total)


@dataclass(frozen=True)
class MCPInstance:
    """Budgeted maximum coverage: pick at most ``budget`` of the sets."""

    universe: frozenset[int]
    sets: tuple[frozenset[int], ...]
    budget: int

    def __post_init__(self):
        object.__setattr__(self, "universe", frozenset(self.universe))
        object.__setattr__(
            self, "sets", tuple(frozenset(s) for s in self.sets)
        )
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
        for i, s in enumerate(self.sets):
            if not s <= self.universe:
                raise ValueError(f"set {i} is not a subset of the universe")


@dataclass(frozen=True)
class MCPResult:
    chosen: tuple[int, ...]
    covered: frozenset[int]

    @property
    def covered_count(self) -> int:
        return len(self.covered)


def solve_mcp_greedy(instance: MCPInstance) -> MCPResult:
    """Greedy maximum coverage: repeatedly take the set adding the most
    uncovered elements, stopping early once no set adds anything.  Ties
    go to the lowest set index.  Guarantees a (1 - 1/e) fraction of the
    optimal coverage."""
    covered: set[int] = set()
    chosen: list[int] = []
    picks = min(instance.budget, len(instance.sets))
    for _ in range(picks):
        best_gain = 0
        best_idx = -1
        for i, s in enumerate(instance.sets):
            gain = len(s - covered)
            if gain > best_gain:
                best_gain = gain
                best_idx = i
        if best_idx < 0:
            break
        chosen.append(best_idx)
        covered |= instance.sets[best_idx]
    return MCPResult(chosen=tuple(chosen), covered=frozenset(covered))
