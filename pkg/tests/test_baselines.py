import math

import pytest

from lcacover import (
    AlgoParams,
    DomainError,
    InstanceSpec,
    RandomTape,
    SetSystem,
    exact_min_cover,
    generate,
    greedy_cover,
    validate_cover,
)
from lcacover.simulate import RUNNERS


def test_greedy_single_covering_set(single_set):
    state = greedy_cover(single_set)
    validate_cover(single_set, state)
    assert state.chosen == {0}


def test_greedy_disjoint_partition():
    sys_ = SetSystem(9, [[0, 1, 2], [3, 4, 5], [6, 7, 8]], s=3, t=2)
    assert greedy_cover(sys_).chosen == {0, 1, 2}


def test_greedy_hand_trace():
    # step 1: set 0 covers 4 (largest); step 2: sets 1, 2, 4 tie on 2 fresh
    # elements -> smallest id 1; step 3: set 2 covers the leftover {6, 7}.
    sys_ = SetSystem(
        8,
        [[0, 1, 2, 3], [4, 5, 0], [6, 7, 1], [2, 3], [6, 5]],
        s=4,
        t=3,
    )
    state = greedy_cover(sys_)
    assert state.chosen == {0, 1, 2}
    assert state.cover_assignment[0] == 0
    assert state.cover_assignment[4] == 1
    assert state.cover_assignment[7] == 2


def test_exact_on_disjoint_partition():
    sys_ = SetSystem(8, [[0, 1], [2, 3], [4, 5], [6, 7], [1, 2], [5, 6]], s=2, t=2)
    bound = exact_min_cover(sys_)
    assert bound.exact_opt == 4 and bound.method == "exhaustive"
    assert bound.lower_bound == 4


def test_exact_matches_planted():
    for seed in range(4):
        sys_ = generate(InstanceSpec(24, 18, 4, 5, "planted-cover", seed))
        bound = exact_min_cover(sys_)
        assert bound.exact_opt == sys_.planted_opt


def test_exact_never_above_greedy():
    for seed in range(4):
        sys_ = generate(InstanceSpec(20, 14, 5, 4, "uniform-random", seed))
        bound = exact_min_cover(sys_)
        assert bound.exact_opt <= len(greedy_cover(sys_).chosen)


def test_greedy_classic_guarantee():
    for seed in range(4):
        sys_ = generate(InstanceSpec(24, 16, 6, 4, "uniform-random", seed))
        bound = exact_min_cover(sys_)
        assert len(greedy_cover(sys_).chosen) <= (1 + math.log(sys_.s)) * bound.exact_opt


def test_algorithms_never_beat_exact():
    sys_ = generate(InstanceSpec(20, 14, 5, 4, "uniform-random", 3))
    bound = exact_min_cover(sys_)
    for algo, fn in RUNNERS.items():
        _, report = fn(sys_, RandomTape(1), AlgoParams.for_instance(sys_))
        assert report.cover_size >= bound.exact_opt, algo


def test_budget_exhaustion_flagged():
    sys_ = generate(InstanceSpec(40, 30, 5, 5, "uniform-random", 0))
    bound = exact_min_cover(sys_, budget=3)
    assert bound.exact_opt is None and bound.method == "ns-bound"
    assert bound.lower_bound == math.ceil(40 / 5)


def test_large_m_requires_budget():
    sys_ = generate(InstanceSpec(40, 30, 5, 5, "uniform-random", 0))
    with pytest.raises(DomainError):
        exact_min_cover(sys_)
