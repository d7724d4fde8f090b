"""``skewbal`` command line: gen, schedule, compare, simulate."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import asdict

from .partition import DEFAULT_GROUP_THRESHOLD, OperationLoads, assign_hash_baseline, operations_for
from .scheduler import (
    DEFAULT_ETA,
    DEFAULT_EXACT_THRESHOLD,
    Schedule,
    compare_schedulers,
    compute_metrics,
    schedule_dpd,
)
from .simulator import (
    AFTER_ALL_MAPS,
    AFTER_FIRST_ROUND,
    PIPELINED,
    SEQUENTIAL,
    CostModel,
    simulate_job,
)
from .workload import dump_histogram, gen_uniform, gen_zipf, load_histogram

MODE_FLAGS = {"seq": SEQUENTIAL, "pipe": PIPELINED}
COPY_START_FLAGS = {"all-maps": AFTER_ALL_MAPS, "first-round": AFTER_FIRST_ROUND}


class CliError(Exception):
    pass


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _add_source(p, required_input=False):
    g = p.add_argument_group("input")
    g.add_argument("--input", help="histogram CSV (key,count per line)")
    kind = g.add_mutually_exclusive_group()
    kind.add_argument("--zipf", action="store_true", help="generate a Zipf histogram")
    kind.add_argument("--uniform", action="store_true", help="generate a uniform histogram")
    g.add_argument("--keys", type=_positive_int, help="number of distinct keys")
    g.add_argument("--pairs", type=_positive_int, help="total number of pairs")
    g.add_argument("--skew", type=float, default=1.0, help="Zipf exponent (default 1.0)")
    g.add_argument("--seed", type=int, default=None, help="generator seed (falls back to $SKEWBAL_SEED, then 0)")


def _add_output(p):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="output path (default stdout)")


def _add_scheduling(p):
    p.add_argument("--slots", type=_positive_int, default=16, help="number of Reduce task slots")
    p.add_argument("--eta", type=float, default=DEFAULT_ETA)
    p.add_argument("--group-threshold", type=_positive_int, default=DEFAULT_GROUP_THRESHOLD)
    p.add_argument("--exact-threshold", type=_positive_int, default=DEFAULT_EXACT_THRESHOLD)
    p.add_argument("--timing", action="store_true", help="include solver wall time in the report")


def _add_cost(p):
    d = CostModel()
    g = p.add_argument_group("cost model")
    g.add_argument("--bytes-per-pair", type=float, default=d.bytes_per_pair)
    g.add_argument("--network-bw", type=float, default=d.network_bw, help="bytes/s")
    g.add_argument("--sort-rate", type=float, default=d.disk_sort_rate, help="pairs/s")
    g.add_argument("--cpu-rate", type=float, default=d.cpu_rate, help="pairs/s")
    g.add_argument("--map-finish", type=float, default=d.map_finish_time, help="time all maps finish (s)")
    g.add_argument("--map-rounds", type=_positive_int, default=1)
    g.add_argument("--first-round-end", type=float, default=None,
                   help="copy start under first-round policy (default map-finish / map-rounds)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skewbal", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic key histogram as CSV")
    _add_source(p)
    p.add_argument("--out", help="output path (default stdout)")

    p = sub.add_parser("schedule", help="assign operations to slots with DPD")
    _add_source(p)
    _add_scheduling(p)
    _add_output(p)

    p = sub.add_parser("compare", help="hash routing versus DPD")
    _add_source(p)
    _add_scheduling(p)
    _add_cost(p)
    p.add_argument("--simulate", action="store_true", help="add simulated job makespans")
    _add_output(p)

    p = sub.add_parser("simulate", help="simulate Reduce tasks of a schedule")
    _add_source(p)
    _add_scheduling(p)
    _add_cost(p)
    p.add_argument("--scheduler", choices=("dpd", "hash"), default="dpd")
    p.add_argument("--schedule", help="schedule JSON to simulate instead of scheduling inline")
    p.add_argument("--mode", choices=tuple(MODE_FLAGS), default="pipe")
    p.add_argument("--copy-start", choices=tuple(COPY_START_FLAGS), default="all-maps")
    _add_output(p)
    return parser


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SKEWBAL_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise CliError(f"SKEWBAL_SEED is not an integer: {env!r}") from None


def _generate(args):
    if args.keys is None or args.pairs is None:
        raise CliError("generators need --keys and --pairs")
    if args.uniform:
        return gen_uniform(args.keys, args.pairs, _seed(args))
    return gen_zipf(args.keys, args.pairs, args.skew, _seed(args))


def _histogram(args):
    generated = args.zipf or args.uniform
    if args.input and generated:
        raise CliError("give either --input or a generator (--zipf/--uniform), not both")
    if args.input:
        with open(args.input, "rb") as fh:
            return load_histogram(fh)
    if generated:
        return _generate(args)
    raise CliError("no input: pass --input FILE or --zipf/--uniform")


def _cost(args) -> CostModel:
    return CostModel(
        bytes_per_pair=args.bytes_per_pair,
        network_bw=args.network_bw,
        disk_sort_rate=args.sort_rate,
        cpu_rate=args.cpu_rate,
        map_finish_time=args.map_finish,
    )


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_gen(args):
    if not (args.zipf or args.uniform):
        args.zipf = True
    if args.input:
        raise CliError("gen does not read --input")
    hist = _generate(args)
    data = dump_histogram(hist)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    print(f"n_keys={len(hist)} total_pairs={hist.total_pairs}", file=sys.stderr)


def cmd_schedule(args):
    hist = _histogram(args)
    ops = operations_for(hist, args.group_threshold)
    start = time.perf_counter()
    sched = schedule_dpd(ops, args.slots, args.eta, args.exact_threshold)
    elapsed = time.perf_counter() - start
    metrics = compute_metrics(sched, ops)
    print(f"solver time: {elapsed:.6f} s", file=sys.stderr)
    if args.format == "csv":
        _emit(args, sched.to_csv())
        return
    report = {
        "n_keys": len(hist),
        "n_operations": len(ops),
        "grouped": len(hist) > args.group_threshold,
        "total_pairs": hist.total_pairs,
        "schedule": sched.to_dict(),
        "metrics": asdict(metrics),
    }
    if args.timing:
        report["solver_seconds"] = elapsed
    _emit(args, _json(report))


def _simulations(sched, loads, args) -> dict:
    cost = _cost(args)
    out = {}
    for mode_flag, mode in MODE_FLAGS.items():
        for policy_flag, policy in COPY_START_FLAGS.items():
            rep = simulate_job(sched, loads, cost, mode, policy, args.first_round_end, args.map_rounds)
            out[f"{mode_flag}/{policy_flag}"] = rep.to_dict(include_timelines=False)
    return out


def cmd_compare(args):
    hist = _histogram(args)
    rep = compare_schedulers(hist, args.slots, args.eta, args.group_threshold, args.exact_threshold)
    print(f"solver time: {rep.solver_seconds:.6f} s", file=sys.stderr)
    report = rep.to_dict(timing=args.timing)
    if args.simulate:
        report["simulation"] = {
            "hash": _simulations(rep.hash_schedule, hist.counts, args),
            "dpd": _simulations(rep.dpd_schedule, rep.operations, args),
        }
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scheduler", "max_load", "variance", "ideal_load", "max_over_ideal"])
        for name in ("hash", "dpd"):
            m = report[name]
            w.writerow([name, m["max_load"], m["variance"], m["ideal_load"], m["max_over_ideal"]])
        _emit(args, buf.getvalue())
        return
    _emit(args, _json(report))


def cmd_simulate(args):
    hist = _histogram(args)
    if args.scheduler == "hash":
        loads = OperationLoads.from_histogram(hist)
    else:
        loads = operations_for(hist, args.group_threshold)
    if args.schedule:
        with open(args.schedule) as fh:
            data = json.load(fh)
        sched = Schedule.from_dict(data.get("schedule", data), loads.loads)
    elif args.scheduler == "hash":
        sched = assign_hash_baseline(hist, args.slots)
    else:
        sched = schedule_dpd(loads, args.slots, args.eta, args.exact_threshold)
    rep = simulate_job(sched, loads, _cost(args), MODE_FLAGS[args.mode],
                       COPY_START_FLAGS[args.copy_start], args.first_round_end, args.map_rounds)
    if args.format == "csv":
        _emit(args, rep.to_csv())
    else:
        _emit(args, _json({"schedule": sched.to_dict(), "report": rep.to_dict()}))


COMMANDS = {"gen": cmd_gen, "schedule": cmd_schedule, "compare": cmd_compare, "simulate": cmd_simulate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (CliError, ValueError, OSError, KeyError) as exc:
        print(f"skewbal {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
