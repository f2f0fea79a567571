"""Command line entry point: ``kcc run | gen | verify-static | adversary``."""

from __future__ import annotations

import argparse
import sys

from . import harness
from .errors import KCCError
from .metric import EuclideanInstance, MatrixInstance, load_matrix, write_matrix
from .static import BRUTE_FORCE_LIMIT, brute_force_opt, gonzalez, hochbaum_shmoys
from .verifier import ORACLE_MODES


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kcc", description="Consistent k-center clustering with recourse 1.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an update stream through an engine")
    run.add_argument("--algo", choices=sorted(harness.ALGORITHMS), required=True)
    run.add_argument("--k", type=_positive, required=True)
    run.add_argument("--input", required=True, help="update stream file")
    run.add_argument("--matrix", help="distance matrix file (switches to the matrix backend)")
    run.add_argument("--report", help="CSV report path (default: stdout)")
    run.add_argument("--verify", choices=ORACLE_MODES, default="none")
    run.add_argument("--log", help="write failure details here instead of stderr")

    gen = sub.add_parser("gen", help="generate a workload")
    gen.add_argument("kind", choices=["random", "deletion", "insertion", "matrix", "matrix-stream"])
    gen.add_argument("--n", type=_positive, required=True)
    gen.add_argument("--dim", type=_positive, default=2)
    gen.add_argument("--seed", type=int, default=0, help="overridden by KCC_SEED")
    gen.add_argument("--churn", type=float, default=0.0, help="deletes per insert after warmup")
    gen.add_argument("--warmup", type=int, default=0)
    gen.add_argument("--deletes", type=int, help="number of deletes for a deletion stream")
    gen.add_argument("--batch", type=int, default=0, help="initial batch size for an insertion stream")
    gen.add_argument("--out", required=True)

    vs = sub.add_parser("verify-static", help="solve a static instance")
    vs.add_argument("--input", required=True, help="update stream (only inserts are used) or matrix file")
    vs.add_argument("--k", type=_positive, required=True)
    vs.add_argument("--matrix", action="store_true", help="--input is a distance matrix")
    vs.add_argument("--method", choices=["hs", "gonzalez", "brute", "all"], default="all")

    adv = sub.add_parser("adversary", help="center-churn adversary against the fully dynamic engine")
    adv.add_argument("--k", type=_positive, required=True)
    adv.add_argument("--input", required=True, help="initial stream")
    adv.add_argument("--matrix")
    adv.add_argument("--steps", type=_positive, default=1000)
    adv.add_argument("--target", help="churn this id instead of the current first center")
    adv.add_argument("--verify", choices=ORACLE_MODES, default="none")
    adv.add_argument("--report")
    adv.add_argument("--stream-out", help="write the generated stream here")
    return ap


def _cmd_run(args) -> int:
    events = harness.parse_stream(args.input, matrix=args.matrix is not None)
    log = open(args.log, "w") if args.log else sys.stderr
    try:
        res = harness.run(
            args.algo,
            args.k,
            events,
            matrix=args.matrix,
            verify=args.verify,
            report=args.report if args.report else sys.stdout,
            log=log,
        )
    finally:
        if args.log:
            log.close()
    return res.status


def _cmd_gen(args) -> int:
    if args.kind == "random":
        events = harness.gen_random(args.n, args.dim, args.seed, args.churn, args.warmup)
    elif args.kind == "deletion":
        events = harness.gen_deletion_stream(args.n, args.dim, args.seed, args.deletes)
    elif args.kind == "insertion":
        events = harness.gen_insertion_stream(args.n, args.dim, args.seed, args.batch)
    elif args.kind == "matrix":
        write_matrix(args.out, harness.gen_random_matrix(args.n, args.seed))
        return 0
    else:
        events = harness.gen_matrix_stream(args.n, args.seed, args.churn)
    harness.write_stream(args.out, events)
    return 0


def _static_instance(args):
    if args.matrix:
        M = load_matrix(args.input).matrix
        return MatrixInstance(M, present=range(len(M)), validate=False)
    events = harness.parse_stream(args.input)
    inst = EuclideanInstance(harness.stream_dim(events))
    for e in events:
        if e.op is harness.Op.INSERT and e.id not in inst:
            inst.add(e.id, e.coords)
    return inst


def _cmd_static(args) -> int:
    inst = _static_instance(args)
    methods = ["hs", "gonzalez", "brute"] if args.method == "all" else [args.method]
    for m in methods:
        if m == "hs":
            sol = hochbaum_shmoys(inst, args.k)
            centers, radius = list(sol.centers), sol.radius
        elif m == "gonzalez":
            ids = inst.sorted_ids()
            centers = gonzalez(inst, min(args.k, len(ids)), ids[0])
            radius = float(inst.distances_to(centers).min(axis=1).max())
        else:
            if len(inst) > BRUTE_FORCE_LIMIT:
                print(f"brute: skipped ({len(inst)} points > {BRUTE_FORCE_LIMIT})")
                continue
            sol = brute_force_opt(inst, args.k)
            centers, radius = list(sol.centers), sol.radius
        print(f"{m}: radius={radius!r} centers={' '.join(map(str, centers))}")
    return 0


def _cmd_adversary(args) -> int:
    initial = harness.parse_stream(args.input, matrix=args.matrix is not None)
    target = None if args.target is None else harness._parse_id(args.target)
    events, rows = harness.gen_center_churn_adversary(
        "fully", args.k, initial, args.steps, target=target, matrix=args.matrix, verify=args.verify
    )
    harness.write_report(args.report if args.report else sys.stdout, rows)
    if args.stream_out:
        harness.write_stream(args.stream_out, events)
    total = sum(r.recourse for r in rows)
    print(f"steps={args.steps} events={len(rows)} total_recourse={total} max_recourse={max((r.recourse for r in rows), default=0)}", file=sys.stderr)
    return harness.EXIT_OK if all(r.invariants_ok for r in rows) else harness.EXIT_INVARIANT


COMMANDS = {"run": _cmd_run, "gen": _cmd_gen, "verify-static": _cmd_static, "adversary": _cmd_adversary}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (KCCError, OSError) as exc:
        print(f"kcc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return harness.EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
