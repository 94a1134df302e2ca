"""Command-line front end: instance generation, runs, oracle queries, benchmarks.

CSV conventions: comma-separated with a header row; lines starting with ``#``
carry metadata (schema version, query accounting note).  Query counts are
base-instance neighbor queries only; repeated probes of one neighborhood
within a single oracle call are charged once.
"""

from __future__ import annotations

import argparse
import sys as _stdsys

from . import baselines, lca, setsystem, simulate
from .errors import LcaCoverError
from .setsystem import InstanceSpec, QueryMeter, SetSystem
from .simulate import AlgoParams, RUNNERS
from .tape import RandomTape

SCHEMA = "# schema=1 lcacover-csv"
ACCOUNTING = "# accounting: base-instance neighbor queries, deduplicated per oracle call"

RUN_FIELDS = (
    "algo,n,m,s,t,seed,cover_size,opt_lb,opt_method,ratio,"
    "bad_set_events,pretend_events,cleanup_adds,rounds"
)
ORACLE_FIELDS = "algo,kind,id,answer,queries"
PROFILE_FIELDS = "algo,n,m,s,t,seed,calls,q_max,q_mean,q_total"


def _params_for(sys_: SetSystem, args) -> AlgoParams:
    return AlgoParams.for_instance(
        sys_, lam5=args.lambda5, lam10=args.lambda10, bad_set_rule=args.bad_set_rule
    )


def _opt_bound(sys_: SetSystem) -> baselines.OptBound:
    if sys_.planted_opt is not None:
        return baselines.OptBound(
            exact_opt=sys_.planted_opt,
            lower_bound=-(-sys_.num_elements // sys_.s),
            method="planted",
        )
    if sys_.num_sets <= 24:
        return baselines.exact_min_cover(sys_)
    return baselines.OptBound(
        exact_opt=None, lower_bound=-(-sys_.num_elements // sys_.s), method="ns-bound"
    )


def _run_row(algo: str, sys_: SetSystem, seed: int, params: AlgoParams) -> str:
    if algo == "greedy":
        state = baselines.greedy_cover(sys_)
        report = simulate.RunReport(
            algo="greedy",
            cover_size=len(state.chosen),
            rounds_executed=0,
            bad_set_events=0,
            pretend_events=0,
            cleanup_adds=0,
        )
    else:
        state, report = RUNNERS[algo](sys_, RandomTape(seed), params)
    simulate.validate_cover(sys_, state)
    bound = _opt_bound(sys_)
    ratio = report.cover_size / bound.best()
    return ",".join(
        str(x)
        for x in (
            algo,
            sys_.num_elements,
            sys_.num_sets,
            sys_.s,
            sys_.t,
            seed,
            report.cover_size,
            bound.best(),
            bound.method,
            f"{ratio:.4f}",
            report.bad_set_events,
            report.pretend_events,
            report.cleanup_adds,
            report.rounds_executed,
        )
    )


def cmd_gen(args) -> int:
    spec = InstanceSpec(args.n, args.m, args.s, args.t, args.kind, args.seed)
    sys_ = setsystem.generate(spec)
    setsystem.write_instance(sys_, args.out)
    line = f"n={sys_.num_elements} m={sys_.num_sets} s={sys_.s} t={sys_.t}"
    if sys_.planted_opt is not None:
        line += f" planted_opt={sys_.planted_opt}"
    print(line)
    return 0


def cmd_run(args) -> int:
    sys_ = setsystem.read_instance(args.instance)
    params = _params_for(sys_, args)
    print(SCHEMA)
    print(RUN_FIELDS)
    print(_run_row(args.algo, sys_, args.seed, params))
    return 0


def _parse_ids(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x != ""]


def cmd_lca(args) -> int:
    sys_ = setsystem.read_instance(args.instance)
    params = _params_for(sys_, args)
    tape = RandomTape(args.seed)
    sets = _parse_ids(args.sets) if args.sets else []
    elems = _parse_ids(args.elems) if args.elems else []
    if args.all:
        sets = list(range(sys_.num_sets))
        elems = list(range(sys_.num_elements))
    if not sets and not elems:
        raise LcaCoverError("no targets: pass --sets/--elems or --all")
    if args.verify:
        mismatches = lca.verify_against_global(
            sys_, tape, params, args.algo, max_mismatches=1
        )
        if mismatches:
            kind, obj, got, want = mismatches[0]
            print(f"MISMATCH {kind} {obj}: oracle={got} global={want}")
            return 2
    prof = lca.profile(
        sys_, tape, params, args.algo, sets=sets, elems=elems, cap=args.meter_cap
    )
    print(SCHEMA)
    print(ACCOUNTING)
    print(ORACLE_FIELDS)
    for kind, obj, ans, q in prof.answers:
        print(f"{args.algo},{kind},{obj},{ans},{q}")
    print(PROFILE_FIELDS)
    print(
        f"{args.algo},{sys_.num_elements},{sys_.num_sets},{sys_.s},{sys_.t},"
        f"{args.seed},{prof.calls},{prof.q_max},{prof.q_mean:.2f},{prof.q_total}"
    )
    return 0


def cmd_verify(args) -> int:
    sys_ = setsystem.read_instance(args.instance)
    params = _params_for(sys_, args)
    tape = RandomTape(args.seed)
    algos = ["sqrt", "recsplit"] if args.algo == "both" else [args.algo]
    for algo in algos:
        mismatches = lca.verify_against_global(sys_, tape, params, algo, max_mismatches=1)
        if mismatches:
            kind, obj, got, want = mismatches[0]
            print(f"MISMATCH algo={algo} {kind} {obj}: oracle={got} global={want}")
            return 2
        print(f"ok algo={algo}: all {sys_.num_sets} sets and {sys_.num_elements} elements consistent")
    return 0


def cmd_bench(args) -> int:
    algos = [a.strip() for a in args.algos.split(",")]
    for a in algos:
        if a not in RUNNERS and a != "greedy":
            raise LcaCoverError(f"unknown algo {a!r}")
    rows = []
    try:
        for kind in args.kinds.split(","):
            for n in _parse_ids(args.n_list):
                for m in _parse_ids(args.m_list):
                    for s in _parse_ids(args.s_list):
                        for t in _parse_ids(args.t_list):
                            for seed in range(args.seeds):
                                sys_ = setsystem.generate(
                                    InstanceSpec(n, m, s, t, kind, seed)
                                )
                                params = AlgoParams.for_instance(
                                    sys_,
                                    lam5=args.lambda5,
                                    lam10=args.lambda10,
                                    bad_set_rule=args.bad_set_rule,
                                )
                                for algo in algos:
                                    rows.append(_run_row(algo, sys_, seed, params))
    except KeyboardInterrupt:
        print("interrupted; flushing partial results", file=_stdsys.stderr)
    rows.sort()
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(SCHEMA + "\n")
        fh.write(ACCOUNTING + "\n")
        fh.write(RUN_FIELDS + "\n")
        for row in rows:
            fh.write(row + "\n")
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda5", type=float, default=4.0)
    p.add_argument("--lambda10", type=float, default=None)
    p.add_argument(
        "--bad-set-rule", choices=("literal", "scaled"), default="literal"
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lcacover",
        description="Set-cover LCA toolkit: generate instances, run the "
        "algorithm ladder, query oracles, benchmark.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--s", type=int, required=True)
    g.add_argument("--t", type=int, required=True)
    g.add_argument("--kind", choices=setsystem.KINDS, default="uniform-random")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run one algorithm globally, print a CSV row")
    r.add_argument("--algo", choices=tuple(RUNNERS) + ("greedy",), required=True)
    r.add_argument("--instance", required=True)
    _add_common(r)
    r.set_defaults(func=cmd_run)

    o = sub.add_parser("lca", help="answer per-set/per-element oracle queries")
    o.add_argument("--algo", choices=("sqrt", "recsplit"), required=True)
    o.add_argument("--instance", required=True)
    o.add_argument("--sets", default="")
    o.add_argument("--elems", default="")
    o.add_argument("--all", action="store_true")
    o.add_argument("--verify", action="store_true")
    o.add_argument("--meter-cap", type=int, default=None)
    _add_common(o)
    o.set_defaults(func=cmd_lca)

    v = sub.add_parser("verify", help="cross-check oracles against the global run")
    v.add_argument("--algo", choices=("sqrt", "recsplit", "both"), default="both")
    v.add_argument("--instance", required=True)
    _add_common(v)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="grid sweep, write a CSV file")
    b.add_argument("--algos", default="base,generic,sqrt,recsplit,greedy")
    b.add_argument("--n-list", required=True)
    b.add_argument("--m-list", required=True)
    b.add_argument("--s-list", required=True)
    b.add_argument("--t-list", required=True)
    b.add_argument("--kinds", default="uniform-random")
    b.add_argument("--seeds", type=int, default=1)
    b.add_argument("--out", required=True)
    _add_common(b)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LcaCoverError as exc:
        print(f"error: {exc}", file=_stdsys.stderr)
        return 1


if __name__ == "__main__":
    _stdsys.exit(main())
