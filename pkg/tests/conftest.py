import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lcacover import InstanceSpec, SetSystem, generate


@pytest.fixture
def small_random():
    return generate(InstanceSpec(n=36, m=24, s=8, t=6, kind="uniform-random", seed=3))


@pytest.fixture
def partition_6_2():
    # two disjoint triples covering {0..5}
    return SetSystem(6, [[0, 1, 2], [3, 4, 5]], s=3, t=2)


@pytest.fixture
def single_set():
    return SetSystem(4, [[0, 1, 2, 3]], s=4, t=2)


def small_sets_instance(n, m, size, s_decl, seed):
    """Random instance whose sets are much smaller than the declared bound,
    the regime where pretend marks and cleanup adds actually fire."""
    rng = np.random.default_rng(seed)
    groups = [rng.choice(n, size=size, replace=False) for _ in range(m)]
    flat = {int(e) for g in groups for e in g}
    for j, e in enumerate([e for e in range(n) if e not in flat]):
        groups[j % m] = np.append(groups[j % m][:-1], e)
    return SetSystem(n, [sorted(set(int(x) for x in g)) for g in groups], s=s_decl)


def singleton_gadget(n_elems, dup=8, s_decl=8):
    """Each element sits in `dup` duplicate singleton sets; with lam5 = 2 the
    sets survive into the last stage, where popular elements get pretend
    marks and are later picked up by the cleanup pass."""
    groups = [[e] for e in range(n_elems) for _ in range(dup)]
    return SetSystem(n_elems, groups, s=s_decl)
