"""Set-system data model, neighbor-query access, instance generators and file I/O.

A set system is a bipartite incidence structure between ``m`` sets and ``n``
elements.  ``s`` bounds the size of every set and ``t`` bounds the number of
sets any element belongs to.  All algorithmic access to an instance goes
through :func:`query_set` / :func:`query_element`, which charge exactly one
unit on a :class:`QueryMeter` and return the whole neighborhood.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, ConstructionError, DomainError, ParseError


class QueryMeter:
    """Counts neighbor queries; optionally enforces a hard cap."""

    __slots__ = ("count", "cap")

    def __init__(self, cap: int | None = None):
        self.count = 0
        self.cap = cap

    def tick(self) -> None:
        if self.cap is not None and self.count + 1 > self.cap:
            raise BudgetExceededError(
                f"query budget exceeded: cap={self.cap}"
            )
        self.count += 1

    def __repr__(self):
        return f"QueryMeter(count={self.count}, cap={self.cap})"


class SetSystem:
    """Immutable bipartite incidence structure.

    Attributes:
        num_elements: n, number of universe elements (ids 0..n-1).
        num_sets: m, number of sets (ids 0..m-1).
        sets: per-set sorted element-id lists.
        element_membership: per-element sorted set-id lists (inverse index).
        s: declared upper bound on set size (>= actual maximum).
        t: declared upper bound on element degree (>= actual maximum).
        planted_opt: size of a planted optimal cover, if the generator knows one.
    """

    def __init__(self, num_elements, sets, s=None, t=None, planted_opt=None):
        self.num_elements = int(num_elements)
        self.num_sets = len(sets)
        self.sets = [sorted(int(e) for e in group) for group in sets]

        membership = [[] for _ in range(self.num_elements)]
        for sid, group in enumerate(self.sets):
            if not group:
                raise DomainError(f"set {sid} is empty")
            if len(set(group)) != len(group):
                raise DomainError(f"set {sid} contains a duplicate element")
            for e in group:
                if not 0 <= e < self.num_elements:
                    raise DomainError(f"set {sid} references element {e} out of range")
                membership[e].append(sid)
        self.element_membership = membership

        max_size = max(len(g) for g in self.sets) if self.sets else 0
        max_deg = max((len(mb) for mb in membership), default=0)
        self.s = max_size if s is None else int(s)
        self.t = max_deg if t is None else int(t)
        if max_size > self.s:
            raise DomainError(f"set size {max_size} exceeds declared bound s={self.s}")
        if max_deg > self.t:
            raise DomainError(f"element degree {max_deg} exceeds declared bound t={self.t}")
        for e, mb in enumerate(membership):
            if not mb:
                raise DomainError(f"element {e} is not contained in any set")
        self.planted_opt = planted_opt

        # CSR form used by the vectorized simulations; built eagerly so the
        # object is fully immutable after construction.
        sizes = np.array([len(g) for g in self.sets], dtype=np.int64)
        self.set_off = np.concatenate(([0], np.cumsum(sizes)))
        self.set_elems = np.fromiter(
            (e for g in self.sets for e in g), dtype=np.int64, count=int(sizes.sum())
        )
        degs = np.array([len(mb) for mb in membership], dtype=np.int64)
        self.el_off = np.concatenate(([0], np.cumsum(degs)))
        self.el_sets = np.fromiter(
            (sid for mb in membership for sid in mb), dtype=np.int64, count=int(degs.sum())
        )

    def __repr__(self):
        return (
            f"SetSystem(n={self.num_elements}, m={self.num_sets}, "
            f"s={self.s}, t={self.t})"
        )

    def __eq__(self, other):
        if not isinstance(other, SetSystem):
            return NotImplemented
        return (
            self.num_elements == other.num_elements
            and self.sets == other.sets
            and self.s == other.s
            and self.t == other.t
            and self.planted_opt == other.planted_opt
        )

    def check_incidence(self) -> None:
        """Verify incidence symmetry and canonical ordering exhaustively."""
        for sid, group in enumerate(self.sets):
            assert group == sorted(set(group))
            for e in group:
                assert sid in self.element_membership[e]
        for e, mb in enumerate(self.element_membership):
            assert mb == sorted(set(mb))
            for sid in mb:
                assert e in self.sets[sid]


def query_set(sys: SetSystem, S: int, meter: QueryMeter) -> list[int]:
    """Return all elements of set ``S``; costs one neighbor query."""
    if not 0 <= S < sys.num_sets:
        raise DomainError(f"set id {S} out of range [0, {sys.num_sets})")
    meter.tick()
    return list(sys.sets[S])


def query_element(sys: SetSystem, e: int, meter: QueryMeter) -> list[int]:
    """Return all sets containing element ``e``; costs one neighbor query."""
    if not 0 <= e < sys.num_elements:
        raise DomainError(f"element id {e} out of range [0, {sys.num_elements})")
    meter.tick()
    return list(sys.element_membership[e])


KINDS = ("uniform-random", "planted-cover", "worst-case-chain")


@dataclass(frozen=True)
class InstanceSpec:
    """Parameters for a generated instance; fully determined by its seed."""

    n: int
    m: int
    s: int
    t: int
    kind: str = "uniform-random"
    seed: int = 0


def _check_feasible(spec: InstanceSpec) -> None:
    if spec.kind not in KINDS:
        raise ConstructionError(f"unknown kind {spec.kind!r}")
    if spec.s < 2 or spec.t < 2:
        raise ConstructionError("need s >= 2 and t >= 2")
    if spec.n < 1 or spec.m < 1:
        raise ConstructionError("need n >= 1 and m >= 1")
    if spec.n * spec.t < spec.m:
        raise ConstructionError(f"infeasible: n*t = {spec.n * spec.t} < m = {spec.m}")
    if spec.m * spec.s < spec.n:
        raise ConstructionError(f"infeasible: m*s = {spec.m * spec.s} < n = {spec.n}")


def _patch_uncovered(groups, degree, n, s, rng) -> None:
    """Give every zero-degree element a home without breaking the s bound."""
    for e in range(n):
        if degree[e] > 0:
            continue
        slack = [i for i, g in enumerate(groups) if len(g) < s]
        if slack:
            sid = int(slack[rng.integers(len(slack))])
            groups[sid].add(e)
            degree[e] += 1
            continue
        # No slack anywhere: evict an element of degree >= 2 from some set.
        for sid, g in enumerate(groups):
            victim = next((v for v in g if degree[v] >= 2), None)
            if victim is not None:
                g.remove(victim)
                degree[victim] -= 1
                g.add(e)
                degree[e] += 1
                break
        else:  # pragma: no cover - excluded by the m*s >= n feasibility check
            raise ConstructionError("cannot place uncovered element")


def _draw_set(rng, degree, t, lo, hi, sets_left_after) -> set[int]:
    """Sample one set, reserving a degree slot for every set still to come."""
    open_ids = np.nonzero(degree < t)[0]
    slots = int((t - degree).sum())
    size = min(int(rng.integers(lo, hi + 1)), len(open_ids), slots - sets_left_after)
    if size < 1:
        raise ConstructionError("degree budget n*t too tight for the requested m sets")
    pick = rng.choice(open_ids, size=size, replace=False)
    degree[pick] += 1
    return set(int(e) for e in pick)


def _gen_uniform(spec: InstanceSpec, rng) -> list[set[int]]:
    n, m, s, t = spec.n, spec.m, spec.s, spec.t
    groups: list[set[int]] = []
    degree = np.zeros(n, dtype=np.int64)
    lo = max(1, s // 2)
    for idx in range(m):
        groups.append(_draw_set(rng, degree, t, lo, s, m - idx - 1))
    _patch_uncovered(groups, degree, n, s, rng)
    return groups


def _gen_planted(spec: InstanceSpec, rng) -> tuple[list[set[int]], int]:
    n, m, s, t = spec.n, spec.m, spec.s, spec.t
    opt = -(-n // s)
    if m < opt:
        raise ConstructionError(f"planted cover needs m >= ceil(n/s) = {opt}")
    perm = rng.permutation(n)
    groups = [set(int(e) for e in perm[i * s : (i + 1) * s]) for i in range(opt)]
    degree = np.ones(n, dtype=np.int64)
    for idx in range(m - opt):
        groups.append(_draw_set(rng, degree, t, 1, s, m - opt - idx - 1))
    return groups, opt


def _gen_chain(spec: InstanceSpec, rng) -> list[set[int]]:
    """Overlapping sliding windows of width s; adversarial for greedy-style rules."""
    n, m, s, t = spec.n, spec.m, spec.s, spec.t
    stride = max(1, s // 2)
    windows = []
    start = 0
    while True:
        windows.append(set(range(start, min(start + s, n))))
        if start + s >= n:
            break
        start += stride
    if m < len(windows):
        raise ConstructionError(
            f"chain of width s={s} over n={n} needs m >= {len(windows)}"
        )
    degree = np.zeros(n, dtype=np.int64)
    for w in windows:
        for e in w:
            degree[e] += 1
    if int(degree.max()) > t:
        raise ConstructionError(f"chain windows need element degree > t={t}")
    groups = list(windows)
    pad = m - len(windows)
    for idx in range(pad):
        groups.append(_draw_set(rng, degree, t, 1, s, pad - idx - 1))
    return groups


def generate(spec: InstanceSpec) -> SetSystem:
    """Build a deterministic instance of the requested kind.

    ``planted-cover`` embeds a partition into ceil(n/s) disjoint sets, which is
    optimal because no cover can use fewer than ceil(n/s) sets; its size is
    recorded on the returned system.
    """
    _check_feasible(spec)
    rng = np.random.default_rng(spec.seed)
    planted = None
    if spec.kind == "uniform-random":
        groups = _gen_uniform(spec, rng)
    elif spec.kind == "planted-cover":
        groups, planted = _gen_planted(spec, rng)
    else:
        groups = _gen_chain(spec, rng)
    return SetSystem(spec.n, groups, s=spec.s, t=spec.t, planted_opt=planted)


def write_instance(sys: SetSystem, path) -> None:
    """Write the text format: header ``n m s t``, then one line per set."""
    with open(path, "w", encoding="utf-8") as fh:
        if sys.planted_opt is not None:
            fh.write(f"# planted_opt={sys.planted_opt}\n")
        fh.write(f"{sys.num_elements} {sys.num_sets} {sys.s} {sys.t}\n")
        for group in sys.sets:
            fh.write(" ".join(str(e) for e in group) + "\n")


def read_instance(path) -> SetSystem:
    """Parse the text format written by :func:`write_instance`."""
    planted = None
    header = None
    groups = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("planted_opt="):
                    planted = int(body.split("=", 1)[1])
                continue
            fields = line.split()
            try:
                values = [int(x) for x in fields]
            except ValueError:
                raise ParseError(f"non-integer token in {line!r}", line=lineno)
            if header is None:
                if len(values) != 4:
                    raise ParseError("header must be 'n m s t'", line=lineno)
                header = values
                continue
            groups.append((lineno, values))
    if header is None:
        raise ParseError("missing header line")
    n, m, s, t = header
    if len(groups) != m:
        raise ParseError(f"header says m={m} but found {len(groups)} set lines")
    sets = []
    for lineno, values in groups:
        if len(set(values)) != len(values):
            raise ParseError("duplicate element in set", line=lineno)
        if len(values) > s:
            raise ParseError(f"set size {len(values)} exceeds header s={s}", line=lineno)
        for e in values:
            if not 0 <= e < n:
                raise ParseError(f"element id {e} out of range", line=lineno)
        sets.append(values)
    try:
        return SetSystem(n, sets, s=s, t=t, planted_opt=planted)
    except DomainError as exc:
        raise ParseError(str(exc)) from exc
