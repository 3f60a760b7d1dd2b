"""Row equivalence classes under a constraint set.

Rows covered by exactly the same constraints share one parameter block in
the background model, so the optimizer touches classes, not rows. Because
membership in a constraint's row set is a function of the covering set,
every class lies entirely inside or outside each constraint's row set; the
per-constraint weights are therefore just class sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RowPartition", "build_partition"]


@dataclass(frozen=True)
class RowPartition:
    """Minimal grouping of rows by identical covering-constraint sets."""

    class_of_row: np.ndarray  # (n,) int64, class index per row
    class_sizes: np.ndarray  # (C,) int64
    class_constraint_sets: tuple[tuple[int, ...], ...]  # per class, covering constraint indices

    def __post_init__(self):
        self.class_of_row.flags.writeable = False
        self.class_sizes.flags.writeable = False

    @property
    def n(self) -> int:
        return int(self.class_of_row.size)

    @property
    def n_classes(self) -> int:
        return int(self.class_sizes.size)

    def rows_of_class(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.class_of_row == c)

    def classes_for_constraint(self, t: int) -> np.ndarray:
        """Class indices whose rows are covered by constraint t."""
        return np.array(
            [c for c, cons in enumerate(self.class_constraint_sets) if t in cons],
            dtype=np.int64,
        )


def build_partition(n: int, constraints) -> RowPartition:
    """Group rows that share identical covering-constraint sets.

    With no constraints every row lands in one class. Class identity is the
    (sorted) tuple of covering constraint indices; class order follows the
    lexicographic order of the membership patterns, which makes the result
    deterministic for a given constraint list.
    """
    k = len(constraints)
    membership = np.zeros((n, k), dtype=bool)
    for t, con in enumerate(constraints):
        membership[con.rows, t] = True
    patterns, class_of_row = np.unique(membership, axis=0, return_inverse=True)
    class_of_row = np.ascontiguousarray(class_of_row.ravel().astype(np.int64))
    sizes = np.bincount(class_of_row, minlength=patterns.shape[0]).astype(np.int64)
    cons_sets = tuple(tuple(int(t) for t in np.flatnonzero(row)) for row in patterns)
    return RowPartition(class_of_row, sizes, cons_sets)
