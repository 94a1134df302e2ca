"""Per-query oracles for the phase-sparsified and repeated-sparsification
algorithms.

An oracle call answers whether one set belongs to the cover (or which set
covers one element) without ever running the global algorithm: it recursively
reconstructs only the part of the execution its answer depends on, reading
the instance exclusively through the metered neighbor queries.  Under the
same tape, answers are bit-identical to the corresponding global simulation.

Query accounting counts base-instance neighbor queries; repeated probes of
the same neighborhood within one call are served from a call-scoped cache and
charged once.  The memo table lives and dies with a single top-level call, so
the only state shared across calls is the instance and the random tape.
"""

from __future__ import annotations

import sys as _pysys
from dataclasses import dataclass, field

from .errors import DomainError
from .setsystem import QueryMeter, SetSystem, query_element, query_set
from .simulate import RUNNERS, AlgoParams
from .tape import RandomTape


class OracleContext:
    """Scratch state for one top-level oracle call."""

    __slots__ = ("sys", "tape", "params", "meter", "memo", "breakdown", "level", "tree")

    def __init__(
        self,
        sys: SetSystem,
        tape: RandomTape,
        params: AlgoParams | None = None,
        meter: QueryMeter | None = None,
        breakdown: bool = False,
    ):
        self.sys = sys
        self.tape = tape
        self.params = params or AlgoParams.for_instance(sys)
        if self.params.bad_set_rule != "literal":
            raise DomainError("oracles implement the literal bad-set rule only")
        self.meter = meter or QueryMeter()
        self.memo: dict = {}
        self.breakdown: dict | None = {} if breakdown else None
        self.level = ("top",)
        self.tree = _build_tree(self.params)
        if _pysys.getrecursionlimit() < 50_000:
            _pysys.setrecursionlimit(50_000)


def _elems(ctx, S):
    key = ("qs", S)
    got = ctx.memo.get(key)
    if got is None:
        got = query_set(ctx.sys, S, ctx.meter)
        if ctx.breakdown is not None:
            ctx.breakdown[ctx.level] = ctx.breakdown.get(ctx.level, 0) + 1
        ctx.memo[key] = got
    return got


def _sets(ctx, e):
    key = ("qe", e)
    got = ctx.memo.get(key)
    if got is None:
        got = query_element(ctx.sys, e, ctx.meter)
        if ctx.breakdown is not None:
            ctx.breakdown[ctx.level] = ctx.breakdown.get(ctx.level, 0) + 1
        ctx.memo[key] = got
    return got


def _b_i(ctx, i, S):
    """Stage-i estimation sample of S."""
    key = ("bi", i, S)
    got = ctx.memo.get(key)
    if got is None:
        p = ctx.params.p_i(i)
        got = [e for e in _elems(ctx, S) if ctx.tape.in_B_i(i, S, e, p)]
        ctx.memo[key] = got
    return got


# ---------------------------------------------------------------------------
# Phase-sparsified oracle hierarchy: levels (stage i, phase j, iteration l),
# where l = 0 denotes the state right after the phase-start force-adds and
# pretend marks.


def _sq_prev(params, i, j):
    if j > 0:
        return (i, j - 1, len(params.phase_iters(j - 1)))
    if i > 1:
        last = params.phase_count() - 1
        return (i - 1, last, len(params.phase_iters(last)))
    return None


def _sq_sel_entry(ctx, i, j, S):
    prev = _sq_prev(ctx.params, i, j)
    return False if prev is None else _sq_sadd(ctx, prev[0], prev[1], prev[2], S)


def _sq_cov_entry(ctx, i, j, e):
    prev = _sq_prev(ctx.params, i, j)
    return False if prev is None else _sq_ecov(ctx, prev[0], prev[1], prev[2], e)


def _sq_bij(ctx, i, j, S):
    """Phase-start sparsified sample: B_i(S) minus covered elements."""
    key = ("bij", i, j, S)
    got = ctx.memo.get(key)
    if got is None:
        got = [e for e in _b_i(ctx, i, S) if not _sq_cov_entry(ctx, i, j, e)]
        ctx.memo[key] = got
    return got


def _sq_shat(ctx, i, j, k, S):
    """Membership in the estimate-filtered candidate family of iteration k."""
    key = ("sh", i, j, k, S)
    got = ctx.memo.get(key)
    if got is None:
        got = ctx.tape.in_S_ik(i, k, S, ctx.sys.t) and (
            len(_sq_bij(ctx, i, j, S)) / ctx.params.p_i(i) >= ctx.params.threshold(i)
        )
        ctx.memo[key] = got
    return got


def _sq_sadd(ctx, i, j, l, S):
    """Is S in the cover by the end of iteration (i, j, l)?"""
    key = ("ss", i, j, l, S)
    got = ctx.memo.get(key)
    if got is not None:
        return got
    old = ctx.level
    ctx.level = ("sq", i, j, l)
    try:
        params = ctx.params
        if l == 0:
            val = _sq_sel_entry(ctx, i, j, S) or (
                len(_sq_bij(ctx, i, j, S)) >= params.lam10
            )
        elif _sq_sadd(ctx, i, j, l - 1, S):
            val = True
        else:
            k = params.phase_iters(j)[l - 1]
            if not ctx.tape.in_S_ik(i, k, S, ctx.sys.t):
                val = False
            else:
                cnt = sum(
                    1
                    for e in _sq_bij(ctx, i, j, S)
                    if not _sq_ecov(ctx, i, j, l - 1, e)
                )
                val = cnt / params.p_i(i) >= params.threshold(i)
    finally:
        ctx.level = old
    ctx.memo[key] = val
    return val


def _sq_ecov(ctx, i, j, l, e):
    """Is e covered (or pretending) by the end of iteration (i, j, l)?"""
    key = ("se", i, j, l, e)
    got = ctx.memo.get(key)
    if got is not None:
        return got
    old = ctx.level
    ctx.level = ("sq", i, j, l)
    try:
        params = ctx.params
        if l == 0:
            if _sq_cov_entry(ctx, i, j, e):
                val = True
            elif any(_sq_sadd(ctx, i, j, 0, S) for S in _sets(ctx, e)):
                val = True
            else:
                cap = params.lam10 * (1 << params.T)
                val = any(
                    sum(1 for S in _sets(ctx, e) if _sq_shat(ctx, i, j, k, S)) >= cap
                    for k in params.phase_iters(j)
                )
        elif _sq_ecov(ctx, i, j, l - 1, e):
            val = True
        else:
            k = params.phase_iters(j)[l - 1]
            val = any(
                _sq_sadd(ctx, i, j, l, S)
                for S in _sets(ctx, e)
                if _sq_shat(ctx, i, j, k, S)
            )
    finally:
        ctx.level = old
    ctx.memo[key] = val
    return val


def _sq_final(ctx, S):
    """Cover membership after the last stage, before cleanup."""
    params = ctx.params
    last = params.phase_count() - 1
    return _sq_sadd(ctx, params.log_s, last, len(params.phase_iters(last)), S)


def _sq_free_final(ctx, e):
    key = ("ff", e)
    got = ctx.memo.get(key)
    if got is None:
        got = not any(_sq_final(ctx, S) for S in _sets(ctx, e))
        ctx.memo[key] = got
    return got


def _sq_add_round(ctx, S):
    """Chronologically first (i, j, l) at which S is in the cover; None if never."""
    params = ctx.params
    for i in range(1, params.log_s + 1):
        for j in range(params.phase_count()):
            for l in range(len(params.phase_iters(j)) + 1):
                if _sq_sadd(ctx, i, j, l, S):
                    return (i, j, l)
    return None


def oracle_sqrt_set(ctx: OracleContext, S: int) -> bool:
    """Does the phase-sparsified cover (cleanup included) contain S?"""
    if _sq_final(ctx, S):
        return True
    # Cleanup adds the smallest containing set of every still-free element.
    for e in _elems(ctx, S):
        if _sets(ctx, e)[0] == S and _sq_free_final(ctx, e):
            return True
    return False


def oracle_sqrt_element(ctx: OracleContext, e: int):
    """(covered, covering set) for element e, consistent with the global run."""
    best = None
    for S in _sets(ctx, e):
        r = _sq_add_round(ctx, S)
        if r is not None and (best is None or (r, S) < best):
            best = (r, S)
    if best is not None:
        return True, best[1]
    return True, _sets(ctx, e)[0]


# ---------------------------------------------------------------------------
# Repeated-sparsification oracle: per stage, a stage-entry layer plus a
# recursion tree over iteration ranges, mirroring the global halving.


class _Node:
    __slots__ = ("k0", "R", "parent", "which", "c1", "c2", "base")

    def key(self):
        return (self.k0, self.R)


def _build_tree(params):
    def build(k0, R, parent, which):
        node = _Node()
        node.k0, node.R, node.parent, node.which = k0, R, parent, which
        node.base = R <= params.base_case_R
        if node.base:
            node.c1 = node.c2 = None
        else:
            half = R // 2
            node.c1 = build(k0, half, node, 1)
            node.c2 = build(k0 + half, R - half, node, 2)
        return node

    return build(1, params.log_t, None, 0)


def _rs_schosen(ctx, i, S):
    """Is S in the cover by the end of stage i (cleanup excluded)?"""
    if i == 0:
        return False
    key = ("rc", i, S)
    got = ctx.memo.get(key)
    if got is None:
        got = _rs_sstart(ctx, i, S) or _rs_nadd(ctx, i, ctx.tree, S)
        ctx.memo[key] = got
    return got


def _rs_ecovst(ctx, i, e):
    """Is e covered-or-pretending by the end of stage i?"""
    if i == 0:
        return False
    key = ("re", i, e)
    got = ctx.memo.get(key)
    if got is None:
        got = _rs_estart(ctx, i, e) or _rs_ncov(ctx, i, ctx.tree, e)
        ctx.memo[key] = got
    return got


def _rs_bhat(ctx, i, S):
    """Stage-start sparsified sample of S."""
    key = ("bh", i, S)
    got = ctx.memo.get(key)
    if got is None:
        got = [e for e in _b_i(ctx, i, S) if not _rs_ecovst(ctx, i - 1, e)]
        ctx.memo[key] = got
    return got


def _rs_sstart(ctx, i, S):
    key = ("rs0", i, S)
    got = ctx.memo.get(key)
    if got is None:
        got = _rs_schosen(ctx, i - 1, S) or (
            len(_rs_bhat(ctx, i, S)) >= ctx.params.lam10
        )
        ctx.memo[key] = got
    return got


def _rs_shat(ctx, i, k, S):
    key = ("rsh", i, k, S)
    got = ctx.memo.get(key)
    if got is None:
        got = ctx.tape.in_S_ik(i, k, S, ctx.sys.t) and (
            len(_rs_bhat(ctx, i, S)) / ctx.params.p_i(i) >= ctx.params.threshold(i)
        )
        ctx.memo[key] = got
    return got


def _rs_estart(ctx, i, e):
    key = ("re0", i, e)
    got = ctx.memo.get(key)
    if got is not None:
        return got
    params = ctx.params
    if _rs_ecovst(ctx, i - 1, e):
        val = True
    elif any(_rs_sstart(ctx, i, S) for S in _sets(ctx, e)):
        val = True
    else:
        val = any(
            sum(1 for S in _sets(ctx, e) if _rs_shat(ctx, i, k, S))
            >= params.lam10 * (1 << k)
            for k in range(1, params.log_t + 1)
        )
    ctx.memo[key] = val
    return val


def _rs_fam(ctx, i, node, k, S):
    """Is S in the sparsified candidate family of iteration k at this node?"""
    key = ("fam", i, node.k0, node.R, k, S)
    got = ctx.memo.get(key)
    if got is None:
        if node.parent is None:
            got = _rs_shat(ctx, i, k, S)
        elif node.which == 1:
            got = _rs_fam(ctx, i, node.parent, k, S)
        else:
            got = _rs_fam(ctx, i, node.parent, k, S) and (
                _rs_degmid(ctx, i, node.parent, S) >= ctx.params.threshold(i)
            )
        ctx.memo[key] = got
    return got


def _rs_inuniv(ctx, i, node, e):
    key = ("unv", i, node.k0, node.R, e)
    got = ctx.memo.get(key)
    if got is None:
        if node.parent is None:
            got = not _rs_estart(ctx, i, e)
        elif node.which == 1:
            got = _rs_inuniv(ctx, i, node.parent, e)
        else:
            got = _rs_freemid(ctx, i, node.parent, e) and not _rs_midpret(
                ctx, i, node.parent, e
            )
        ctx.memo[key] = got
    return got


def _rs_freemid(ctx, i, node, e):
    """Still free after this node's first recursive call."""
    return _rs_inuniv(ctx, i, node, e) and not _rs_ncov(ctx, i, node.c1, e)


def _rs_degmid(ctx, i, node, S):
    """Estimate of S between this node's two recursive calls."""
    key = ("dm", i, node.k0, node.R, S)
    got = ctx.memo.get(key)
    if got is None:
        cnt = sum(1 for e in _rs_bhat(ctx, i, S) if _rs_freemid(ctx, i, node, e))
        got = cnt / ctx.params.p_i(i)
        ctx.memo[key] = got
    return got


def _rs_midpret(ctx, i, node, e):
    """Pretend mark applied between this node's two recursive calls."""
    key = ("mp", i, node.k0, node.R, e)
    got = ctx.memo.get(key)
    if got is not None:
        return got
    params = ctx.params
    half = node.R // 2
    val = False
    if _rs_freemid(ctx, i, node, e):
        thr = params.threshold(i)
        for k in range(node.k0 + half, node.k0 + node.R):
            cnt = sum(
                1
                for S in _sets(ctx, e)
                if _rs_fam(ctx, i, node, k, S)
                and _rs_degmid(ctx, i, node, S) >= thr
            )
            if cnt >= params.lam10 * (1 << (k - (node.k0 + half))):
                val = True
                break
    ctx.memo[key] = val
    return val


def _rs_badd(ctx, i, node, l, S):
    """Base case: is S added within the first l iterations of this leaf?"""
    if l == 0:
        return False
    key = ("ba", i, node.k0, node.R, l, S)
    got = ctx.memo.get(key)
    if got is not None:
        return got
    old = ctx.level
    ctx.level = ("rs", i, node.k0, node.R, l)
    try:
        if _rs_badd(ctx, i, node, l - 1, S):
            val = True
        elif not _rs_fam(ctx, i, node, node.k0 + l - 1, S):
            val = False
        else:
            cnt = sum(
                1 for e in _rs_bhat(ctx, i, S) if _rs_bfree(ctx, i, node, l - 1, e)
            )
            val = cnt / ctx.params.p_i(i) >= ctx.params.threshold(i)
    finally:
        ctx.level = old
    ctx.memo[key] = val
    return val


def _rs_bfree(ctx, i, node, l, e):
    return _rs_inuniv(ctx, i, node, e) and not _rs_bcov(ctx, i, node, l, e)


def _rs_bcov(ctx, i, node, l, e):
    """Base case: is e covered within the first l iterations of this leaf?"""
    if l == 0:
        return False
    key = ("bc", i, node.k0, node.R, l, e)
    got = ctx.memo.get(key)
    if got is not None:
        return got
    old = ctx.level
    ctx.level = ("rs", i, node.k0, node.R, l)
    try:
        if _rs_bcov(ctx, i, node, l - 1, e):
            val = True
        else:
            k = node.k0 + l - 1
            val = any(
                _rs_badd(ctx, i, node, l, S)
                for S in _sets(ctx, e)
                if _rs_fam(ctx, i, node, k, S)
            )
    finally:
        ctx.level = old
    ctx.memo[key] = val
    return val


def _rs_nadd(ctx, i, node, S):
    """Is S added during this node's iteration range?"""
    if node.base:
        return _rs_badd(ctx, i, node, node.R, S)
    key = ("na", i, node.k0, node.R, S)
    got = ctx.memo.get(key)
    if got is None:
        got = _rs_nadd(ctx, i, node.c1, S) or _rs_nadd(ctx, i, node.c2, S)
        ctx.memo[key] = got
    return got


def _rs_ncov(ctx, i, node, e):
    """Is e covered or marked pretending during this node's range?"""
    if node.base:
        return _rs_bcov(ctx, i, node, node.R, e)
    key = ("nc", i, node.k0, node.R, e)
    got = ctx.memo.get(key)
    if got is None:
        got = (
            _rs_ncov(ctx, i, node.c1, e)
            or _rs_midpret(ctx, i, node, e)
            or _rs_ncov(ctx, i, node.c2, e)
        )
        ctx.memo[key] = got
    return got


def _rs_final(ctx, S):
    return _rs_schosen(ctx, ctx.params.log_s, S)


def _rs_free_final(ctx, e):
    key = ("rff", e)
    got = ctx.memo.get(key)
    if got is None:
        got = not any(_rs_final(ctx, S) for S in _sets(ctx, e))
        ctx.memo[key] = got
    return got


def _rs_add_round(ctx, S):
    """Chronologically first round (i, k) at which S enters the cover."""
    params = ctx.params
    for i in range(1, params.log_s + 1):
        if _rs_sstart(ctx, i, S):
            return (i, 0)
        if not _rs_nadd(ctx, i, ctx.tree, S):
            continue
        node = ctx.tree
        while not node.base:
            node = node.c1 if _rs_nadd(ctx, i, node.c1, S) else node.c2
        for l in range(1, node.R + 1):
            if _rs_badd(ctx, i, node, l, S):
                return (i, node.k0 + l - 1)
    return None


def oracle_recsplit_set(ctx: OracleContext, S: int) -> bool:
    """Does the repeated-sparsification cover (cleanup included) contain S?"""
    if _rs_final(ctx, S):
        return True
    for e in _elems(ctx, S):
        if _sets(ctx, e)[0] == S and _rs_free_final(ctx, e):
            return True
    return False


def oracle_recsplit_element(ctx: OracleContext, e: int):
    """(covered, covering set) for element e under the recsplit cover."""
    best = None
    for S in _sets(ctx, e):
        r = _rs_add_round(ctx, S)
        if r is not None and (best is None or (r, S) < best):
            best = (r, S)
    if best is not None:
        return True, best[1]
    return True, _sets(ctx, e)[0]


# ---------------------------------------------------------------------------
# Profiling and verification harnesses.

ORACLES = {
    "sqrt": (oracle_sqrt_set, oracle_sqrt_element),
    "recsplit": (oracle_recsplit_set, oracle_recsplit_element),
}


@dataclass
class QueryProfile:
    """Aggregate neighbor-query counts over a batch of oracle calls."""

    algo: str
    calls: int
    q_max: int
    q_mean: float
    q_total: int
    by_level: dict | None = None
    answers: list = field(default_factory=list)


def profile(
    sys: SetSystem,
    tape: RandomTape,
    params: AlgoParams,
    algo: str,
    sets=(),
    elems=(),
    cap: int | None = None,
    breakdown: bool = False,
) -> QueryProfile:
    """Run the requested oracle over a sample, one fresh context per call."""
    if algo not in ORACLES:
        raise DomainError(f"unknown oracle family {algo!r}")
    set_fn, elem_fn = ORACLES[algo]
    targets = [("set", S) for S in sets] + [("elem", e) for e in elems]
    if not targets:
        raise DomainError("profile needs a non-empty sample")
    counts = []
    levels: dict = {}
    answers = []
    for kind, obj in targets:
        ctx = OracleContext(sys, tape, params, QueryMeter(cap), breakdown=breakdown)
        ans = set_fn(ctx, obj) if kind == "set" else elem_fn(ctx, obj)
        counts.append(ctx.meter.count)
        answers.append((kind, obj, ans, ctx.meter.count))
        if breakdown:
            for lvl, c in ctx.breakdown.items():
                levels[lvl] = levels.get(lvl, 0) + c
    total = sum(counts)
    return QueryProfile(
        algo=algo,
        calls=len(counts),
        q_max=max(counts),
        q_mean=total / len(counts),
        q_total=total,
        by_level=levels if breakdown else None,
        answers=answers,
    )


def verify_against_global(
    sys: SetSystem,
    tape: RandomTape,
    params: AlgoParams,
    algo: str,
    max_mismatches: int | None = None,
) -> list[tuple]:
    """Compare every oracle answer with the global simulation.

    Returns a list of mismatch records; empty means fully consistent.
    """
    if algo not in ORACLES:
        raise DomainError(f"unknown oracle family {algo!r}")
    set_fn, elem_fn = ORACLES[algo]
    state, _ = RUNNERS[algo](sys, tape, params)
    mismatches = []
    for S in range(sys.num_sets):
        ctx = OracleContext(sys, tape, params)
        got = set_fn(ctx, S)
        want = S in state.chosen
        if got != want:
            mismatches.append(("set", S, got, want))
            if max_mismatches and len(mismatches) >= max_mismatches:
                return mismatches
    for e in range(sys.num_elements):
        ctx = OracleContext(sys, tape, params)
        got = elem_fn(ctx, e)
        want = (True, state.cover_assignment[e])
        if got != want:
            mismatches.append(("elem", e, got, want))
            if max_mismatches and len(mismatches) >= max_mismatches:
                return mismatches
    return mismatches
