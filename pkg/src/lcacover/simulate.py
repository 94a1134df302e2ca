"""Round-by-round global simulations of the set-cover algorithm ladder.

Four algorithms share one random tape:

* :func:`run_base` -- exact free-element counts, log(s) stages of log(t)
  iterations, each large set added with probability 2^k/t.
* :func:`run_generic` -- identical structure but set sizes are estimated from
  per-stage element samples; all randomness is fixed up front.
* :func:`run_sqrt` -- iterations grouped into phases of length T; oversized
  sampled sets are force-added at phase starts and overly popular elements
  are pretend-covered, which keeps per-query simulation local.
* :func:`run_recsplit` -- recursive halving of the iteration range with
  re-sparsification at every split.

All "in parallel" loops are executed as two-phase sweeps (decide everything
from a snapshot, then apply), so results are independent of sweep order.
These simulations are the ground truth that the per-query oracles in
:mod:`lcacover.lca` must reproduce bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvariantError, StateError
from .setsystem import SetSystem
from .tape import RandomTape


@dataclass(frozen=True)
class AlgoParams:
    """Loop counts and threshold multipliers for the algorithm ladder.

    ``lam5`` scales the element-sampling probability p_i = min(1, lam5*2^i/s);
    ``lam10`` scales the bad-set / bad-element thresholds.  Small defaults keep
    the sparsification machinery active at desk scale; the asymptotic regime
    uses polylog values (see :func:`polylog_params`).
    """

    s: int
    t: int
    log_s: int
    log_t: int
    T: int
    lam5: float
    lam10: float
    base_case_R: int
    bad_set_rule: str = "literal"

    @classmethod
    def for_instance(
        cls,
        sys: SetSystem,
        lam5: float = 4.0,
        lam10: float | None = None,
        bad_set_rule: str = "literal",
    ) -> "AlgoParams":
        if lam5 < 1.0:
            raise DomainError("lam5 must be >= 1")
        if lam10 is None:
            lam10 = 2.0 * lam5
        if lam10 < lam5:
            raise DomainError("lam10 must be >= lam5")
        if bad_set_rule not in ("literal", "scaled"):
            raise DomainError(f"unknown bad_set_rule {bad_set_rule!r}")
        log_s = _log2_ceil(sys.s)
        log_t = _log2_ceil(sys.t)
        T = _sqrt_ceil(log_t)
        base_case_R = max(1, _log2_ceil_of(log_t))
        return cls(sys.s, sys.t, log_s, log_t, T, lam5, lam10, base_case_R, bad_set_rule)

    def p_i(self, i: int) -> float:
        return min(1.0, self.lam5 * (1 << i) / self.s)

    def threshold(self, i: int) -> float:
        return self.s / (1 << i)

    def phase_count(self) -> int:
        return -(-self.log_t // self.T)

    def phase_iters(self, j: int) -> list[int]:
        lo = j * self.T + 1
        hi = min((j + 1) * self.T, self.log_t)
        return list(range(lo, hi + 1))


def polylog_params(sys: SetSystem) -> AlgoParams:
    """Thresholds in the asymptotic polylog regime (rarely fire at desk scale)."""
    log_s = _log2_ceil(sys.s)
    log_t = _log2_ceil(sys.t)
    T = _sqrt_ceil(log_t)
    lam5 = float(log_t * log_s**5)
    lam10 = float(4 * log_s**2 * 2 ** (3 * T))
    return AlgoParams.for_instance(sys, lam5=lam5, lam10=max(lam10, lam5))


@dataclass
class CoverState:
    """Evolving solution; chosen sets only ever grow during a run."""

    chosen: set[int]
    covered: list[bool]
    pretend: list[bool]
    cover_assignment: list[int | None]
    event_log: list[tuple]


@dataclass
class RunReport:
    algo: str
    cover_size: int
    rounds_executed: int
    bad_set_events: int
    pretend_events: int
    cleanup_adds: int
    per_stage_sizes: list[int] = field(default_factory=list)


@dataclass
class GenericTrace:
    """Per-iteration free-element snapshots of a run_generic execution.

    ``free_at[(i, k)]`` holds the boolean free mask at the *start* of
    iteration k in stage i; stage starts are the (i, 1) entries.
    """

    tape: RandomTape
    params: AlgoParams
    free_at: dict
    complete: bool = True


class _Sim:
    """Mutable run state shared by the four simulations."""

    def __init__(self, sys: SetSystem):
        self.sys = sys
        self.n = sys.num_elements
        self.m = sys.num_sets
        self.covered = np.zeros(self.n, dtype=bool)
        self.pretend = np.zeros(self.n, dtype=bool)
        self.chosen = np.zeros(self.m, dtype=bool)
        self.assign = np.full(self.n, -1, dtype=np.int64)
        self.events: list[tuple] = []
        self.stage_adds: list[int] = []

    def free(self) -> np.ndarray:
        return ~self.covered & ~self.pretend

    def set_free_counts(self, free: np.ndarray) -> np.ndarray:
        sys = self.sys
        vals = free[sys.set_elems].astype(np.int64)
        return np.add.reduceat(vals, sys.set_off[:-1])

    def elem_deg_in(self, fam: np.ndarray) -> np.ndarray:
        sys = self.sys
        vals = fam[sys.el_sets].astype(np.int64)
        return np.add.reduceat(vals, sys.el_off[:-1])

    def apply_adds(self, ids: np.ndarray, record_bad: tuple | None = None) -> int:
        """Add the given sets (ascending ids) and cover their free elements.

        Elements newly covered are credited to the smallest added set id
        containing them.
        """
        ids = ids[~self.chosen[ids]]
        if ids.size == 0:
            return 0
        self.chosen[ids] = True
        if record_bad is not None:
            self.events.extend(("bad_set", record_bad, int(S)) for S in ids)
        sys = self.sys
        counts = sys.set_off[ids + 1] - sys.set_off[ids]
        total = int(counts.sum())
        starts = np.repeat(sys.set_off[ids], counts)
        offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        cand_e = sys.set_elems[starts + offs]
        cand_s = np.repeat(ids, counts)
        new = ~self.covered[cand_e]
        if new.any():
            e_new, first = np.unique(cand_e[new], return_index=True)
            self.assign[e_new] = cand_s[new][first]
            self.covered[e_new] = True
        return ids.size

    def mark_pretend(self, mask: np.ndarray, round_id: tuple) -> None:
        ids = np.nonzero(mask)[0]
        if ids.size:
            self.pretend[ids] = True
            self.events.extend(("pretend", round_id, int(e)) for e in ids)

    def cleanup(self) -> int:
        """Cover each still-free element with its smallest containing set."""
        sys = self.sys
        free_ids = np.nonzero(~self.covered)[0]
        if free_ids.size == 0:
            return 0
        s_star = sys.el_sets[sys.el_off[free_ids]]  # membership sorted ascending
        new_sets = np.unique(s_star)
        self.chosen[new_sets] = True
        self.events.extend(("cleanup", int(e), int(S)) for e, S in zip(free_ids, s_star))
        self.assign[free_ids] = s_star
        self.covered[free_ids] = True
        return int(new_sets.size)

    def finish(self, algo: str, params: AlgoParams, cleanup_adds: int = 0):
        state = CoverState(
            chosen=set(int(S) for S in np.nonzero(self.chosen)[0]),
            covered=self.covered.tolist(),
            pretend=self.pretend.tolist(),
            cover_assignment=[int(x) if x >= 0 else None for x in self.assign],
            event_log=self.events,
        )
        report = RunReport(
            algo=algo,
            cover_size=len(state.chosen),
            rounds_executed=params.log_s * params.log_t,
            bad_set_events=sum(1 for ev in self.events if ev[0] == "bad_set"),
            pretend_events=sum(1 for ev in self.events if ev[0] == "pretend"),
            cleanup_adds=cleanup_adds,
            per_stage_sizes=self.stage_adds,
        )
        return state, report


def run_base(sys: SetSystem, tape: RandomTape, params: AlgoParams | None = None):
    """Exact-count algorithm: log(s) stages x log(t) iterations."""
    params = params or AlgoParams.for_instance(sys)
    sim = _Sim(sys)
    for i in range(1, params.log_s + 1):
        thr = params.threshold(i)
        added = 0
        for k in range(1, params.log_t + 1):
            d = sim.set_free_counts(sim.free())
            ids = np.nonzero(~sim.chosen & (d >= thr))[0]
            mask = tape.set_mask(i, k, ids, sys.t)
            added += sim.apply_adds(ids[mask])
        sim.stage_adds.append(added)
    return sim.finish("base", params)


def run_generic(sys: SetSystem, tape: RandomTape, params: AlgoParams | None = None):
    """Estimating algorithm: randomness fixed up front, samples reused per stage."""
    state, report, _ = _generic_impl(sys, tape, params, want_trace=False)
    return state, report


def run_generic_traced(sys: SetSystem, tape: RandomTape, params: AlgoParams | None = None):
    """Like :func:`run_generic` but also returns the free-mask trace."""
    return _generic_impl(sys, tape, params, want_trace=True)


def _generic_impl(sys, tape, params, want_trace):
    params = params or AlgoParams.for_instance(sys)
    sim = _Sim(sys)
    nnz_sets = np.repeat(np.arange(sys.num_sets), np.diff(sys.set_off))
    all_ids = np.arange(sys.num_sets)
    free_at = {} if want_trace else None
    for i in range(1, params.log_s + 1):
        p_i = params.p_i(i)
        thr = params.threshold(i)
        bmask = tape.elem_mask(i, nnz_sets, sys.set_elems, p_i)
        added = 0
        for k in range(1, params.log_t + 1):
            free = sim.free()
            if want_trace:
                free_at[(i, k)] = free.copy()
            cnt = np.add.reduceat(
                (bmask & free[sys.set_elems]).astype(np.int64), sys.set_off[:-1]
            )
            deg = cnt / p_i
            samp = tape.set_mask(i, k, all_ids, sys.t)
            ids = np.nonzero(~sim.chosen & samp & (deg >= thr))[0]
            added += sim.apply_adds(ids)
        sim.stage_adds.append(added)
    state, report = sim.finish("generic", params)
    trace = GenericTrace(tape, params, free_at) if want_trace else None
    return state, report, trace


def _force_add_mask(sim, tape, params, i, free0, bcnt):
    """Oversized-sample test at a phase/stage start."""
    if params.bad_set_rule == "literal":
        return ~sim.chosen & (bcnt >= params.lam10)
    # Scaled form mirrors the bad-set definition: examine the samples of all
    # later stages against thresholds growing with the stage distance.
    sys = sim.sys
    nnz_sets = np.repeat(np.arange(sys.num_sets), np.diff(sys.set_off))
    out = bcnt >= params.lam10
    for i2 in range(i + 1, params.log_s + 1):
        b2 = tape.elem_mask(i2, nnz_sets, sys.set_elems, params.p_i(i2))
        cnt2 = np.add.reduceat(
            (b2 & free0[sys.set_elems]).astype(np.int64), sys.set_off[:-1]
        )
        out |= cnt2 >= params.lam10 * (1 << (i2 - i))
    return ~sim.chosen & out


def run_sqrt(sys: SetSystem, tape: RandomTape, params: AlgoParams | None = None):
    """Phase-sparsified algorithm with bad-set force-adds and pretend marks."""
    params = params or AlgoParams.for_instance(sys)
    sim = _Sim(sys)
    nnz_sets = np.repeat(np.arange(sys.num_sets), np.diff(sys.set_off))
    all_ids = np.arange(sys.num_sets)
    el_thr = params.lam10 * (1 << params.T)
    for i in range(1, params.log_s + 1):
        p_i = params.p_i(i)
        thr = params.threshold(i)
        bmask = tape.elem_mask(i, nnz_sets, sys.set_elems, p_i)
        added = 0
        for j in range(params.phase_count()):
            iters = params.phase_iters(j)
            free0 = sim.free()
            bcnt = np.add.reduceat(
                (bmask & free0[sys.set_elems]).astype(np.int64), sys.set_off[:-1]
            )
            force = _force_add_mask(sim, tape, params, i, free0, bcnt)
            added += sim.apply_adds(np.nonzero(force)[0], record_bad=(i, j, 0))
            # Candidate families of the whole phase, filtered by the
            # phase-start estimate snapshot.
            shat = {
                k: tape.set_mask(i, k, all_ids, sys.t) & (bcnt / p_i >= thr)
                for k in iters
            }
            el_free = free0 & ~sim.covered
            pretend_new = np.zeros(sim.n, dtype=bool)
            for k in iters:
                pretend_new |= sim.elem_deg_in(shat[k]) >= el_thr
            sim.mark_pretend(pretend_new & el_free, (i, j, 0))
            for idx, k in enumerate(iters, start=1):
                free = sim.free()
                cnt = np.add.reduceat(
                    (bmask & free[sys.set_elems]).astype(np.int64), sys.set_off[:-1]
                )
                ids = np.nonzero(~sim.chosen & shat[k] & (cnt / p_i >= thr))[0]
                added += sim.apply_adds(ids)
        sim.stage_adds.append(added)
    cleanup_adds = sim.cleanup()
    return sim.finish("sqrt", params, cleanup_adds)


def run_recsplit(sys: SetSystem, tape: RandomTape, params: AlgoParams | None = None):
    """Repeated-sparsification algorithm: recursive halving of iteration ranges."""
    params = params or AlgoParams.for_instance(sys)
    sim = _Sim(sys)
    nnz_sets = np.repeat(np.arange(sys.num_sets), np.diff(sys.set_off))
    all_ids = np.arange(sys.num_sets)
    for i in range(1, params.log_s + 1):
        p_i = params.p_i(i)
        thr = params.threshold(i)
        bmask = tape.elem_mask(i, nnz_sets, sys.set_elems, p_i)
        free0 = sim.free()
        bcnt = np.add.reduceat(
            (bmask & free0[sys.set_elems]).astype(np.int64), sys.set_off[:-1]
        )
        force = _force_add_mask(sim, tape, params, i, free0, bcnt)
        added = sim.apply_adds(np.nonzero(force)[0], record_bad=(i, 0))
        fams = [
            tape.set_mask(i, k, all_ids, sys.t) & (bcnt / p_i >= thr)
            for k in range(1, params.log_t + 1)
        ]
        el_free = free0 & ~sim.covered
        pretend_new = np.zeros(sim.n, dtype=bool)
        for k in range(1, params.log_t + 1):
            pretend_new |= sim.elem_deg_in(fams[k - 1]) >= params.lam10 * (1 << k)
        sim.mark_pretend(pretend_new & el_free, (i, 0))
        univ = el_free & ~sim.pretend
        stage = _StageCtx(i, p_i, thr, bmask)
        added += _recsplit_node(sim, params, stage, 1, params.log_t, fams, univ)
        sim.stage_adds.append(added)
    cleanup_adds = sim.cleanup()
    return sim.finish("recsplit", params, cleanup_adds)


@dataclass(frozen=True)
class _StageCtx:
    i: int
    p_i: float
    thr: float
    bmask: np.ndarray


def _recsplit_node(sim, params, stage, k0, R, fams, univ) -> int:
    """Simulate iterations k0 .. k0+R-1 of the current stage."""
    sys = sim.sys
    for l, fam in enumerate(fams):
        deg = sim.elem_deg_in(fam)
        bad = univ & (deg > params.lam10 * (1 << (l + 1)))
        if bad.any():
            e = int(np.nonzero(bad)[0][0])
            raise InvariantError(
                f"recursion invariant violated at stage {stage.i}, range "
                f"[{k0}, {k0 + R}): element {e} sits in {int(deg[e])} sets of "
                f"family k={k0 + l} (cap {params.lam10 * (1 << (l + 1))})"
            )
    if R <= params.base_case_R:
        added = 0
        for l in range(R):
            free = sim.free()
            cnt = np.add.reduceat(
                (stage.bmask & free[sys.set_elems]).astype(np.int64), sys.set_off[:-1]
            )
            ids = np.nonzero(~sim.chosen & fams[l] & (cnt / stage.p_i >= stage.thr))[0]
            added += sim.apply_adds(ids)
        return added
    half = R // 2
    added = _recsplit_node(sim, params, stage, k0, half, fams[:half], univ)
    free_mid = sim.free()
    cnt_mid = np.add.reduceat(
        (stage.bmask & free_mid[sys.set_elems]).astype(np.int64), sys.set_off[:-1]
    )
    deg_ok = cnt_mid / stage.p_i >= stage.thr
    fams2 = [fams[half + idx] & deg_ok for idx in range(R - half)]
    pretend_new = np.zeros(sim.n, dtype=bool)
    for idx in range(R - half):
        pretend_new |= sim.elem_deg_in(fams2[idx]) >= params.lam10 * (1 << idx)
    sim.mark_pretend(pretend_new & free_mid, (stage.i, k0 + half))
    univ2 = free_mid & ~sim.pretend
    added += _recsplit_node(sim, params, stage, k0 + half, R - half, fams2, univ2)
    return added


def estimate_degree(sys, tape, i, S, free, p_i) -> float:
    """Sampled free-element count of set S, scaled back by 1/p_i.

    With p_i = 1 this equals the exact free count.  ``free`` is a predicate
    over element ids.
    """
    if not 0.0 < p_i <= 1.0:
        raise DomainError(f"p_i must be in (0, 1], got {p_i}")
    cnt = sum(1 for e in sys.sets[S] if tape.in_B_i(i, S, e, p_i) and free(e))
    return cnt / p_i


def detect_bad_element(sys: SetSystem, trace: GenericTrace, e: int) -> bool:
    """Element-side sparsity violation in a completed run_generic trace.

    True iff in some stage i the element was free at the start of iteration
    k1 while sitting in more than lam10 * 2^(k2-k1) sets of the iteration-k2
    candidate family whose estimate at the start of k1 was still large.
    """
    if not trace.complete:
        raise StateError("trace is incomplete")
    params, tape = trace.params, trace.tape
    memb = sys.element_membership[e]
    for i in range(1, params.log_s + 1):
        p_i = params.p_i(i)
        thr = params.threshold(i)
        for k1 in range(1, params.log_t + 1):
            free1 = trace.free_at[(i, k1)]
            if not free1[e]:
                continue
            elig = [
                S
                for S in memb
                if estimate_degree(sys, tape, i, S, lambda x: free1[x], p_i) >= thr
            ]
            for k2 in range(k1, params.log_t + 1):
                cnt = sum(1 for S in elig if tape.in_S_ik(i, k2, S, sys.t))
                if cnt > params.lam10 * (1 << (k2 - k1)):
                    return True
    return False


def detect_bad_set(sys: SetSystem, trace: GenericTrace, S: int) -> bool:
    """Set-side sparsity violation: a stage-i2 sample still holding more than
    lam10 * 2^(i2-i1) free elements at the start of stage i1."""
    if not trace.complete:
        raise StateError("trace is incomplete")
    params, tape = trace.params, trace.tape
    elems = sys.sets[S]
    for i2 in range(1, params.log_s + 1):
        p2 = params.p_i(i2)
        sample = [e for e in elems if tape.in_B_i(i2, S, e, p2)]
        for i1 in range(1, i2 + 1):
            free1 = trace.free_at[(i1, 1)]
            cnt = sum(1 for e in sample if free1[e])
            if cnt > params.lam10 * (1 << (i2 - i1)):
                return True
    return False


def scan_bad_events(sys: SetSystem, trace: GenericTrace):
    """Vectorized sweep over all elements and sets; returns two bool arrays."""
    if not trace.complete:
        raise StateError("trace is incomplete")
    params, tape = trace.params, trace.tape
    n, m = sys.num_elements, sys.num_sets
    nnz_sets = np.repeat(np.arange(m), np.diff(sys.set_off))
    all_ids = np.arange(m)
    elem_bad = np.zeros(n, dtype=bool)
    set_bad = np.zeros(m, dtype=bool)
    bmasks = {}
    for i in range(1, params.log_s + 1):
        p_i = params.p_i(i)
        thr = params.threshold(i)
        bmasks[i] = tape.elem_mask(i, nnz_sets, sys.set_elems, p_i)
        samp = {
            k2: tape.set_mask(i, k2, all_ids, sys.t)
            for k2 in range(1, params.log_t + 1)
        }
        for k1 in range(1, params.log_t + 1):
            free1 = trace.free_at[(i, k1)]
            cnt = np.add.reduceat(
                (bmasks[i] & free1[sys.set_elems]).astype(np.int64), sys.set_off[:-1]
            )
            elig = cnt / p_i >= thr
            for k2 in range(k1, params.log_t + 1):
                fam = elig & samp[k2]
                deg = np.add.reduceat(fam[sys.el_sets].astype(np.int64), sys.el_off[:-1])
                elem_bad |= free1 & (deg > params.lam10 * (1 << (k2 - k1)))
    for i2 in range(1, params.log_s + 1):
        for i1 in range(1, i2 + 1):
            free1 = trace.free_at[(i1, 1)]
            cnt = np.add.reduceat(
                (bmasks[i2] & free1[sys.set_elems]).astype(np.int64), sys.set_off[:-1]
            )
            set_bad |= cnt > params.lam10 * (1 << (i2 - i1))
    return elem_bad, set_bad


def stage1_coverage_multiplicity(sys, tape, params=None) -> np.ndarray:
    """Per-element count of covering sets in the iteration that first covered
    it during stage 1 of run_base; 0 for elements stage 1 leaves uncovered."""
    params = params or AlgoParams.for_instance(sys)
    covered = np.zeros(sys.num_elements, dtype=bool)
    chosen = np.zeros(sys.num_sets, dtype=bool)
    x = np.zeros(sys.num_elements, dtype=np.int64)
    thr = params.threshold(1)
    for k in range(1, params.log_t + 1):
        d = np.add.reduceat(
            (~covered)[sys.set_elems].astype(np.int64), sys.set_off[:-1]
        )
        ids = np.nonzero(~chosen & (d >= thr))[0]
        add = ids[tape.set_mask(1, k, ids, sys.t)]
        if add.size == 0:
            continue
        chosen[add] = True
        fam = np.zeros(sys.num_sets, dtype=bool)
        fam[add] = True
        mult = np.add.reduceat(fam[sys.el_sets].astype(np.int64), sys.el_off[:-1])
        newly = ~covered & (mult > 0)
        x[newly] = mult[newly]
        covered |= newly
    return x


def f_seq(xs, r: float) -> float:
    """Expected-coverage bound helper: first-success weighted binomial means.

    f((x_1..x_l), r) = x_1*2/r + sum_k x_k*(2^k/r)*prod_{j<k} exp(-x_j*2^j/r).
    Over monotone sequences r >= x_1 >= ... >= x_l >= 0 its value stays <= 5.
    """
    if r <= 0:
        raise DomainError("r must be positive")
    xs = list(xs)
    if not xs:
        raise DomainError("sequence must be non-empty")
    total = xs[0] * 2.0 / r
    acc = -xs[0] * 2.0 / r
    for k in range(2, len(xs) + 1):
        total += xs[k - 1] * (2.0**k / r) * math.exp(acc)
        acc -= xs[k - 1] * 2.0**k / r
    return total


def validate_cover(sys: SetSystem, state: CoverState) -> None:
    """Raise InvariantError unless every element is covered consistently."""
    for e in range(sys.num_elements):
        if not state.covered[e]:
            raise InvariantError(f"element {e} left uncovered")
        S = state.cover_assignment[e]
        if S is None or S not in state.chosen:
            raise InvariantError(f"element {e} credited to non-chosen set {S}")
        if e not in sys.sets[S]:
            raise InvariantError(f"element {e} credited to set {S} not containing it")
    for S in state.chosen:
        if not 0 <= S < sys.num_sets:
            raise InvariantError(f"chosen set {S} out of range")


RUNNERS = {
    "base": run_base,
    "generic": run_generic,
    "sqrt": run_sqrt,
    "recsplit": run_recsplit,
}


def _log2_ceil(x: int) -> int:
    if x < 1:
        raise DomainError(f"log2 of non-positive value {x}")
    return max(1, (x - 1).bit_length())


def _log2_ceil_of(x: int) -> int:
    return (x - 1).bit_length() if x > 1 else 0


def _sqrt_ceil(x: int) -> int:
    r = math.isqrt(x)
    return r if r * r == x else r + 1
