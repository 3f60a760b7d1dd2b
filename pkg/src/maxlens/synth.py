"""Synthetic datasets: the five-dimensional running example, parametrized
Gaussian cluster benchmarks, the 3-point adversarial pair, and a small 3-D
introduction example. All generators are deterministic under their seed.
"""

from __future__ import annotations

import numpy as np

from .constraints import PrimitiveConstraint, make_primitive
from .data import DataMatrix

__all__ = ["gen_x5", "gen_clustered", "gen_adversarial3", "gen_intro3d", "X5_SEED"]

X5_SEED = 13

# Five-dimensional reference dataset, 1000 rows. Dims 0-2 hold four unit
# Gaussian clusters A-D placed on an axis lattice with spacing 6 so that in
# every 2-D coordinate pair among dims 0-2, A overlaps exactly one of B, C, D
# while all four separate in the full 3-D space. Dims 3-4 hold three unit
# Gaussian clusters E-G; rows from B, C, D fall in E or F with probability
# 0.75 (split evenly) and in G otherwise, rows from A pick E, F, G uniformly.
_ABCD_CENTERS = {
    "A": (0.0, 0.0, 0.0),
    "B": (0.0, 0.0, 6.0),
    "C": (0.0, 6.0, 0.0),
    "D": (6.0, 0.0, 0.0),
}
_EFG_CENTERS = {"E": (6.0, 0.0), "F": (0.0, 6.0), "G": (0.0, 0.0)}


def gen_x5(seed: int = X5_SEED) -> tuple[DataMatrix, tuple[str, ...]]:
    """The pinned 1000 x 5 running example.

    Returns the dataset (class labels = A..D, the dims 0-2 grouping) plus the
    E..G labels of the dims 3-4 grouping as a separate tuple.
    """
    rng = np.random.default_rng(seed)
    n = 1000
    abcd = np.repeat(list("ABCD"), n // 4)
    rng.shuffle(abcd)
    efg = np.empty(n, dtype="U1")
    for i, lab in enumerate(abcd):
        if lab == "A":
            efg[i] = "EFG"[rng.integers(3)]
        elif rng.random() < 0.75:
            efg[i] = "EF"[rng.integers(2)]
        else:
            efg[i] = "G"
    values = np.empty((n, 5))
    for i in range(n):
        values[i, :3] = _ABCD_CENTERS[abcd[i]] + rng.standard_normal(3)
        values[i, 3:] = _EFG_CENTERS[efg[i]] + rng.standard_normal(2)
    data = DataMatrix.from_array(
        values,
        column_names=[f"dim{j}" for j in range(5)],
        class_labels=tuple(abcd),
    )
    return data, tuple(efg)


def gen_clustered(n: int, d: int, k: int, seed: int = 0) -> DataMatrix:
    """k unit Gaussian blobs around randomly sampled centroids, n rows total.

    Rows are allocated to clusters as evenly as possible (sizes differ by at
    most one) and labeled c0..c{k-1}.
    """
    if min(n, d, k) < 1:
        raise ValueError("n, d and k must all be >= 1")
    rng = np.random.default_rng(seed)
    centroids = rng.normal(0.0, 3.0, size=(k, d))
    sizes = np.full(k, n // k)
    sizes[: n % k] += 1
    labels = np.repeat(np.arange(k), sizes)
    values = centroids[labels] + rng.standard_normal((n, d))
    return DataMatrix.from_array(
        values,
        column_names=[f"x{j}" for j in range(d)],
        class_labels=tuple(f"c{j}" for j in labels),
    )


def gen_adversarial3() -> tuple[DataMatrix, list[PrimitiveConstraint], list[PrimitiveConstraint]]:
    """The 3-point, 2-D dataset with its two adversarial constraint sets.

    Set A holds the four cluster primitives for rows {0, 2} along the two
    coordinate axes; set B adds the same four for rows {1, 2}. Under A the
    optimum is reached in one pass; under B the overlapping clusters force
    all variances toward zero and convergence slows to 1/sweeps.
    """
    data = DataMatrix.from_array(
        np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]),
        column_names=["x0", "x1"],
    )
    e1, e2 = np.eye(2)

    def axis_pair(rows, w):
        return [
            make_primitive(data, "linear", rows, w),
            make_primitive(data, "quadratic", rows, w),
        ]

    cons_a = axis_pair([0, 2], e1) + axis_pair([0, 2], e2)
    cons_b = cons_a + axis_pair([1, 2], e1) + axis_pair([1, 2], e2)
    return data, cons_a, cons_b


def gen_intro3d(seed: int = 5) -> DataMatrix:
    """150 points in 3-D: two clusters of 50 and two of 25.

    The two small clusters share their first two coordinates and differ only
    in the third, where they partially overlap, so the first principal plane
    shows three clusters and the third dimension splits the merged one.
    """
    rng = np.random.default_rng(seed)
    spec = [
        ("P1", (0.0, 0.0, 0.0), 50),
        ("P2", (7.0, 0.0, 0.0), 50),
        ("P3", (3.5, 6.0, 2.0), 25),
        ("P4", (3.5, 6.0, -2.0), 25),
    ]
    chunks, labels = [], []
    for name, center, count in spec:
        chunks.append(center + rng.standard_normal((count, 3)))
        labels += [name] * count
    return DataMatrix.from_array(
        np.vstack(chunks),
        column_names=["x0", "x1", "x2"],
        class_labels=tuple(labels),
    )
