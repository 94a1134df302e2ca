"""Ground-truth covers and optimum bounds for approximation reporting."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError
from .setsystem import SetSystem
from .simulate import CoverState


@dataclass(frozen=True)
class OptBound:
    """Optimum knowledge about an instance: exact value when the search
    completed, otherwise just the ceil(n/s) counting bound."""

    exact_opt: int | None
    lower_bound: int
    method: str  # exhaustive | planted | ns-bound

    def best(self) -> int:
        return self.exact_opt if self.exact_opt is not None else self.lower_bound


def greedy_cover(sys: SetSystem) -> CoverState:
    """Classic greedy: repeatedly take the set covering the most free elements,
    breaking ties by smallest set id."""
    n, m = sys.num_elements, sys.num_sets
    covered = [False] * n
    gain = [len(g) for g in sys.sets]
    chosen: set[int] = set()
    assign: list[int | None] = [None] * n
    remaining = n
    while remaining > 0:
        best = max(range(m), key=lambda S: (gain[S], -S))
        if gain[best] == 0:  # pragma: no cover - impossible, degrees >= 1
            raise DomainError("instance has an uncoverable element")
        chosen.add(best)
        for e in sys.sets[best]:
            if not covered[e]:
                covered[e] = True
                assign[e] = best
                remaining -= 1
                for S in sys.element_membership[e]:
                    gain[S] -= 1
    return CoverState(
        chosen=chosen,
        covered=covered,
        pretend=[False] * n,
        cover_assignment=assign,
        event_log=[],
    )


def exact_min_cover(sys: SetSystem, budget: int | None = None) -> OptBound:
    """Branch and bound over set subsets.

    Branches on an uncovered element with the fewest candidate sets; prunes
    with the greedy upper bound and the free/s counting lower bound.  Exact
    when the search completes within the node budget, otherwise falls back to
    the ceil(n/s) bound and says so.
    """
    if sys.num_sets > 24 and budget is None:
        raise DomainError("m > 24 requires an explicit node budget")
    n = sys.num_elements
    ns_bound = -(-n // sys.s)
    best = len(greedy_cover(sys).chosen)
    nodes = 0
    exhausted = False

    cover_count = [0] * n  # how many chosen sets cover each element
    free_cnt = n

    def free_in(S: int) -> int:
        return sum(1 for e in sys.sets[S] if cover_count[e] == 0)

    def pick_element() -> int:
        best_e, best_deg = -1, None
        for e in range(n):
            if cover_count[e] == 0:
                deg = len(sys.element_membership[e])
                if best_deg is None or deg < best_deg:
                    best_e, best_deg = e, deg
        return best_e

    def dfs(size: int) -> None:
        nonlocal best, nodes, free_cnt, exhausted
        if exhausted:
            return
        nodes += 1
        if budget is not None and nodes > budget:
            exhausted = True
            return
        if free_cnt == 0:
            best = min(best, size)
            return
        if size + -(-free_cnt // sys.s) >= best:
            return
        e = pick_element()
        cands = sorted(sys.element_membership[e], key=lambda S: (-free_in(S), S))
        for S in cands:
            newly = [x for x in sys.sets[S] if cover_count[x] == 0]
            for x in sys.sets[S]:
                cover_count[x] += 1
            free_cnt -= len(newly)
            dfs(size + 1)
            for x in sys.sets[S]:
                cover_count[x] -= 1
            free_cnt += len(newly)

    dfs(0)
    if exhausted:
        return OptBound(exact_opt=None, lower_bound=ns_bound, method="ns-bound")
    return OptBound(exact_opt=best, lower_bound=ns_bound, method="exhaustive")
