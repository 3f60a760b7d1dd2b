import numpy as np
import pytest

from maxlens.constraints import expand_composite
from maxlens.data import standardize
from maxlens.synth import gen_adversarial3, gen_x5


@pytest.fixture()
def adversarial():
    return gen_adversarial3()


@pytest.fixture(scope="session")
def x5_bundle():
    """Standardized running example plus both label groupings."""
    raw, efg = gen_x5()
    data = standardize(raw)
    return data, np.asarray(raw.class_labels), np.asarray(efg)


@pytest.fixture(scope="session")
def x5_cluster_primitives(x5_bundle):
    """The 4 + 3 cluster constraint expansions of the running example."""
    data, abcd, efg = x5_bundle
    stage1 = []
    for lab in "ABCD":
        stage1.extend(expand_composite(data, "cluster", rows=np.flatnonzero(abcd == lab)).expansion)
    stage2 = list(stage1)
    for lab in "EFG":
        stage2.extend(expand_composite(data, "cluster", rows=np.flatnonzero(efg == lab)).expansion)
    return stage1, stage2
