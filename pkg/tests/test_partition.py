import numpy as np

from maxlens.constraints import expand_composite, make_primitive
from maxlens.data import DataMatrix
from maxlens.partition import build_partition
from maxlens.synth import gen_adversarial3, gen_clustered


def _grouping(partition):
    """Partition as a canonical set of row-index frozensets."""
    return {
        frozenset(np.flatnonzero(partition.class_of_row == c).tolist())
        for c in range(partition.n_classes)
    }


def test_no_constraints_single_class():
    part = build_partition(100, [])
    assert part.n_classes == 1
    assert part.class_sizes.tolist() == [100]
    assert part.class_constraint_sets == ((),)


def test_case_b_three_singleton_classes():
    _, _, cons_b = gen_adversarial3()
    part = build_partition(3, cons_b)
    assert part.n_classes == 3
    assert sorted(part.class_sizes.tolist()) == [1, 1, 1]
    # row 2 sits in both clusters, rows 0 and 1 in one each
    sets = {frozenset(part.class_constraint_sets[part.class_of_row[i]]) for i in range(3)}
    assert frozenset(range(8)) in sets


def test_case_a_two_classes():
    _, cons_a, _ = gen_adversarial3()
    part = build_partition(3, cons_a)
    assert part.n_classes == 2
    assert part.class_of_row[0] == part.class_of_row[2] != part.class_of_row[1]


def test_disjoint_clusters_plus_margin_brute_force():
    data = gen_clustered(60, 4, 3, seed=9)
    prims = list(expand_composite(data, "margin").expansion)
    for j in range(3):
        prims.extend(expand_composite(data, "cluster", rows=data.label_rows(f"c{j}")).expansion)
    part = build_partition(60, prims)
    assert part.n_classes == 3  # margin covers everything, clusters split it

    # brute force oracle: group rows by their membership tuples
    member = {
        i: frozenset(t for t, p in enumerate(prims) if i in p.rows) for i in range(60)
    }
    oracle = {}
    for i, key in member.items():
        oracle.setdefault(key, set()).add(i)
    assert {frozenset(v) for v in oracle.values()} == _grouping(part)


def test_classes_entirely_inside_or_outside_every_constraint():
    rng = np.random.default_rng(4)
    data = DataMatrix.from_array(rng.normal(size=(40, 3)))
    prims = []
    for _ in range(6):
        rows = rng.choice(40, size=rng.integers(3, 30), replace=False)
        prims.append(make_primitive(data, "linear", rows, rng.normal(size=3)))
    part = build_partition(40, prims)
    for t, p in enumerate(prims):
        covered = set(np.asarray(p.rows).tolist())
        for c in range(part.n_classes):
            rows_c = set(np.flatnonzero(part.class_of_row == c).tolist())
            assert rows_c <= covered or not (rows_c & covered)
        np.testing.assert_array_equal(
            part.classes_for_constraint(t),
            np.unique(part.class_of_row[p.rows]),
        )


def test_permutation_equivariance():
    rng = np.random.default_rng(8)
    values = rng.normal(size=(30, 3))
    perm = rng.permutation(30)
    row_sets = [rng.choice(30, size=10, replace=False) for _ in range(4)]

    data = DataMatrix.from_array(values)
    prims = [make_primitive(data, "quadratic", rows, np.array([1.0, 0, 0])) for rows in row_sets]
    part = build_partition(30, prims)

    inv = np.argsort(perm)
    data_p = DataMatrix.from_array(values[perm])
    prims_p = [
        make_primitive(data_p, "quadratic", inv[rows], np.array([1.0, 0, 0]))
        for rows in row_sets
    ]
    part_p = build_partition(30, prims_p)

    # relabeled grouping must match the original grouping mapped through perm
    mapped = {frozenset(int(inv[i]) for i in grp) for grp in _grouping(part)}
    assert mapped == _grouping(part_p)


def test_refinement_monotone_class_count():
    rng = np.random.default_rng(15)
    data = DataMatrix.from_array(rng.normal(size=(50, 2)))
    prims = []
    counts = [build_partition(50, prims).n_classes]
    for _ in range(8):
        rows = rng.choice(50, size=rng.integers(2, 40), replace=False)
        prims.append(make_primitive(data, "linear", rows, rng.normal(size=2)))
        counts.append(build_partition(50, prims).n_classes)
    assert all(b >= a for a, b in zip(counts, counts[1:]))


def test_sizes_sum_to_n():
    rng = np.random.default_rng(21)
    data = DataMatrix.from_array(rng.normal(size=(25, 2)))
    prims = [
        make_primitive(data, "linear", rng.choice(25, size=7, replace=False), np.ones(2))
        for _ in range(3)
    ]
    part = build_partition(25, prims)
    assert part.class_sizes.sum() == 25
    assert part.n == 25
