"""Problem representation for one-PRB-per-cell multicast coverage.

A coverage instance records, for every (cell, PRB) pair, the set of users
that could decode the multicast stream if that PRB carried it.  An
allocation picks exactly one PRB per cell.  The multi-connectivity (MC)
objective counts users covered by any chosen pair; the single-connectivity
(SC) objective only credits a user when its own primary cell's chosen PRB
covers it.

Instances and allocations are immutable after construction, so every
operation here is a pure function that is safe to call concurrently.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np


class InstanceError(ValueError):
    """Coverage-instance data violates a structural invariant."""


class AllocationError(ValueError):
    """An allocation does not fit the instance it is evaluated against."""


class Mode(enum.Enum):
    """Connectivity rule used when counting served users."""

    MC = "mc"
    SC = "sc"


@dataclass(frozen=True)
class Allocation:
    """One chosen PRB index per cell; entry c is the PRB used by cell c."""

    chosen: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "chosen", tuple(int(j) for j in self.chosen))

    def __len__(self) -> int:
        return len(self.chosen)

    def __iter__(self):
        return iter(self.chosen)

    def __getitem__(self, cell: int) -> int:
        return self.chosen[cell]


@dataclass(frozen=True)
class ServedReport:
    """Served/unserved breakdown of one allocation under both rules."""

    served_mc: frozenset[int]
    served_sc: frozenset[int]
    unserved_mc: int
    unserved_sc: int


class CoverageInstance:
    """Universe of ``num_users`` users plus N candidate coverage sets per cell.

    The canonical store is a boolean membership tensor of shape
    ``[num_cells, prbs_per_cell, num_users]``; the set-of-user-ids view in
    :attr:`collections` is materialized lazily.  User, cell and PRB indices
    are all 0-based and dense.
    """

    __slots__ = ("_membership", "_primary", "_collections")

    def __init__(
        self,
        num_users: int,
        collections: Iterable[Iterable[Iterable[int]]],
        primary_cell: Iterable[int],
    ):
        cells = [tuple(frozenset(int(u) for u in prb_set) for prb_set in cell)
                 for cell in collections]
        num_users = int(num_users)
        if num_users < 0:
            raise InstanceError("num_users must be >= 0")
        if not cells:
            raise InstanceError("need at least one cell")
        num_prbs = len(cells[0])
        for c, cell in enumerate(cells):
            if len(cell) != num_prbs:
                raise InstanceError(
                    f"ragged collections: cell {c} has {len(cell)} PRB sets, "
                    f"cell 0 has {num_prbs}"
                )
        if num_prbs < 1:
            raise InstanceError("need at least one PRB set per cell")

        membership = np.zeros((len(cells), num_prbs, num_users), dtype=bool)
        for c, cell in enumerate(cells):
            for j, users in enumerate(cell):
                for u in users:
                    if not 0 <= u < num_users:
                        raise InstanceError(
                            f"user id {u} out of range [0, {num_users}) "
                            f"in coverage set of cell {c}, PRB {j}"
                        )
                    membership[c, j, u] = True

        primary = np.asarray([int(p) for p in primary_cell], dtype=np.intp)
        _check_primary(primary, num_users, len(cells))
        membership.setflags(write=False)
        primary.setflags(write=False)
        self._membership = membership
        self._primary = primary
        self._collections: tuple[tuple[frozenset[int], ...], ...] | None = (
            tuple(cells)
        )

    @classmethod
    def from_membership(
        cls, membership: np.ndarray, primary_cell: Iterable[int]
    ) -> "CoverageInstance":
        """Build an instance directly from a boolean [C, N, M] tensor.

        The set view is only materialized if :attr:`collections` is read,
        which keeps instance derivation cheap in simulation loops.
        """
        membership = np.asarray(membership, dtype=bool)
        if membership.ndim != 3:
            raise InstanceError(
                f"membership tensor must be [cells, prbs, users], "
                f"got shape {membership.shape}"
            )
        num_cells, num_prbs, num_users = membership.shape
        if num_cells < 1 or num_prbs < 1:
            raise InstanceError("need at least one cell and one PRB per cell")
        primary = np.asarray([int(p) for p in primary_cell], dtype=np.intp)
        _check_primary(primary, num_users, num_cells)
        membership = membership.copy()
        membership.setflags(write=False)
        primary.setflags(write=False)
        obj = cls.__new__(cls)
        obj._membership = membership
        obj._primary = primary
        obj._collections = None
        return obj

    @property
    def num_users(self) -> int:
        return self._membership.shape[2]

    @property
    def num_cells(self) -> int:
        return self._membership.shape[0]

    @property
    def prbs_per_cell(self) -> int:
        return self._membership.shape[1]

    @property
    def collections(self) -> tuple[tuple[frozenset[int], ...], ...]:
        """Per cell, the ordered user-id sets covered by each PRB."""
        if self._collections is None:
            self._collections = tuple(
                tuple(frozenset(np.flatnonzero(self._membership[c, j]).tolist())
                      for j in range(self.prbs_per_cell))
                for c in range(self.num_cells)
            )
        return self._collections

    @property
    def primary_cell(self) -> np.ndarray:
        """Read-only array mapping user id -> primary cell index."""
        return self._primary

    def membership_matrix(self) -> np.ndarray:
        """Read-only boolean tensor [cells, prbs, users] of coverage."""
        return self._membership

    def __repr__(self) -> str:
        return (f"CoverageInstance(M={self.num_users}, C={self.num_cells}, "
                f"N={self.prbs_per_cell})")


def _check_primary(primary: np.ndarray, num_users: int, num_cells: int) -> None:
    if primary.shape != (num_users,):
        raise InstanceError(
            f"primary_cell must assign every one of the {num_users} users, "
            f"got {primary.shape[0] if primary.ndim == 1 else primary.shape}"
        )
    if num_users and (primary.min() < 0 or primary.max() >= num_cells):
        bad = int(primary[(primary < 0) | (primary >= num_cells)][0])
        raise InstanceError(
            f"primary cell index {bad} out of range [0, {num_cells})"
        )


def validate_instance(instance: CoverageInstance) -> None:
    """Re-check every instance invariant, raising InstanceError on the first
    violation.  Instances built through the public constructors already
    satisfy them; this is the explicit audit hook."""
    member = instance.membership_matrix()
    if member.ndim != 3:
        raise InstanceError(f"membership tensor has {member.ndim} axes")
    if member.dtype != np.bool_:
        raise InstanceError("membership tensor must be boolean")
    num_cells, num_prbs, num_users = member.shape
    if num_cells < 1 or num_prbs < 1:
        raise InstanceError("need at least one cell and one PRB per cell")
    _check_primary(instance.primary_cell, num_users, num_cells)
    for c, cell in enumerate(instance.collections):
        if len(cell) != num_prbs:
            raise InstanceError(f"ragged collections at cell {c}")
        for j, users in enumerate(cell):
            if any(not 0 <= u < num_users for u in users):
                raise InstanceError(
                    f"user id out of range in cell {c}, PRB {j}"
                )


def validate_allocation(instance: CoverageInstance, alloc: Allocation) -> None:
    """Raise AllocationError unless ``alloc`` picks one in-range PRB per cell."""
    if len(alloc) != instance.num_cells:
        raise AllocationError(
            f"allocation length {len(alloc)} != {instance.num_cells} cells"
        )
    for c, j in enumerate(alloc):
        if not 0 <= j < instance.prbs_per_cell:
            raise AllocationError(
                f"PRB index {j} for cell {c} out of range "
                f"[0, {instance.prbs_per_cell})"
            )


def _served_mask_mc(instance: CoverageInstance, alloc: Allocation) -> np.ndarray:
    member = instance.membership_matrix()
    mask = np.zeros(instance.num_users, dtype=bool)
    for c, j in enumerate(alloc):
        mask |= member[c, j]
    return mask


def _served_mask_sc(instance: CoverageInstance, alloc: Allocation) -> np.ndarray:
    member = instance.membership_matrix()
    primary = instance.primary_cell
    chosen = np.asarray(alloc.chosen, dtype=np.intp)
    users = np.arange(instance.num_users)
    return member[primary, chosen[primary], users]


def served_mc(instance: CoverageInstance, alloc: Allocation) -> frozenset[int]:
    """Users decodable from at least one cell's chosen PRB (union coverage)."""
    validate_allocation(instance, alloc)
    return frozenset(np.flatnonzero(_served_mask_mc(instance, alloc)).tolist())


def served_sc(instance: CoverageInstance, alloc: Allocation) -> frozenset[int]:
    """Users decodable on the PRB chosen by their own primary cell."""
    validate_allocation(instance, alloc)
    return frozenset(np.flatnonzero(_served_mask_sc(instance, alloc)).tolist())


def objective(instance: CoverageInstance, alloc: Allocation, mode: Mode) -> int:
    """Number of served users under ``mode``; unserved = num_users - objective."""
    validate_allocation(instance, alloc)
    if mode is Mode.MC:
        mask = _served_mask_mc(instance, alloc)
    elif mode is Mode.SC:
        mask = _served_mask_sc(instance, alloc)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return int(np.count_nonzero(mask))


def served_report(instance: CoverageInstance, alloc: Allocation) -> ServedReport:
    """Evaluate one allocation under both connectivity rules."""
    mc = served_mc(instance, alloc)
    sc = served_sc(instance, alloc)
    return ServedReport(
        served_mc=mc,
        served_sc=sc,
        unserved_mc=instance.num_users - len(mc),
        unserved_sc=instance.num_users - len(sc),
    )
