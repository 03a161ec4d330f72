"""Command line front end.

Subcommands cover the pipeline end to end: validate instance files, run the
classical baselines, draw tree samples, run the emulated amplified search,
print resource estimates, and drive whole benchmark campaigns.
"""

from __future__ import annotations

import argparse
import json
import sys

from .amplify import AmplificationConfig, cycles_to_runtime, qmaxsearch
from .baseline import exact_optimum, greedy_incumbent
from .bench import CampaignConfig, run_campaign
from .formats import FORMAT_NAMES, ParseError, parse_instance
from .instances import InputError, ValidationError
from .resources import (
    DEFAULT_COST_MODEL,
    VARIANTS,
    estimate_qtg,
    load_cost_model,
    qubit_count_mdkp,
    qubit_count_qkp,
)
from .rng import substream
from .sampler import (
    FOLLOW_INCUMBENT,
    QtgModel,
    evaluate_profits_batch,
    sample_paths,
    success_mass,
)


def _add_instance_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("path", help="instance file")
    sub.add_argument("--format", choices=FORMAT_NAMES, default="json")
    sub.add_argument(
        "--index", type=int, default=None,
        help="problem index within a multi-problem file (0-based)",
    )


def _add_cost_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--variant", choices=VARIANTS, default="parallel-tree")
    sub.add_argument("--cost-model", metavar="TOML", default=None,
                     help="cost model override file")


def _load_instance(args):
    return parse_instance(args.path, format=args.format, index=args.index)


def _load_costs(args):
    if args.cost_model is None:
        return DEFAULT_COST_MODEL
    return load_cost_model(args.cost_model)


def _cmd_validate(args) -> int:
    instance = _load_instance(args)
    print(f"{instance.name}: {instance.kind.value} n={instance.n} d={instance.d}")
    violations = instance.normalization_violations()
    for v in violations:
        print(f"  {v}")
    return 1 if violations else 0


def _cmd_greedy(args) -> int:
    instance = _load_instance(args)
    sol = greedy_incumbent(instance)
    print(f"bits={sol.bits} profit={sol.profit}")
    return 0


def _cmd_oracle(args) -> int:
    instance = _load_instance(args)
    sol = exact_optimum(instance, limit_n=args.limit)
    print(f"bits={sol.bits} profit={sol.profit}")
    return 0


def _cmd_sample(args) -> int:
    instance = _load_instance(args)
    bias = FOLLOW_INCUMBENT if args.follow_incumbent else args.bias
    model = QtgModel.for_instance(instance, bias=bias)
    rng = substream(args.seed, 0)
    bits = sample_paths(model, args.draws, rng)
    profits = evaluate_profits_batch(instance, bits)
    print(f"draws={args.draws} bias={model.bias:g}")
    print(f"profit mean={profits.mean():.3f} max={int(profits.max())}")
    if args.threshold is not None:
        mass = success_mass(model, args.threshold, rng=substream(args.seed, 1))
        print(f"mass(profit > {args.threshold}) = {mass.value:.6g} [{mass.mode}]")
    return 0


def _cmd_search(args) -> int:
    instance = _load_instance(args)
    config = AmplificationConfig.for_instance(
        instance,
        cost_model=_load_costs(args),
        variant=args.variant,
        max_grover_iterations=args.budget,
        bias_delta=args.bias_delta,
        seed=args.seed,
    )
    result = qmaxsearch(instance, config)
    for entry in result.trace.entries:
        seconds = cycles_to_runtime(int(entry.timestamp), args.cycle_time_ns)
        print(f"cycles={int(entry.timestamp):>14d} seconds={seconds:.6g} "
              f"profit={entry.profit} bits={entry.bits}")
    rec = result.record
    print(f"rounds={len(rec.rounds)} iterations={rec.total_iterations} "
          f"cycles={rec.total_cycles}")
    if args.trace is not None:
        from .baseline import write_trace_csv

        write_trace_csv(result.trace, args.trace)
        print(f"trace written to {args.trace}")
    return 0


def _cmd_estimate(args) -> int:
    instance = _load_instance(args)
    estimate = estimate_qtg(instance, cost_model=_load_costs(args), variant=args.variant)
    if args.json:
        print(estimate.to_json())
        return 0
    print(f"{estimate.instance_name}: {estimate.kind} n={estimate.n} d={estimate.d} "
          f"variant={estimate.variant}")
    print(f"qubits={estimate.qubits} ancilla={estimate.ancilla_qubits}")
    print(f"gates={estimate.gates} depth={estimate.qtg_depth_cycles} "
          f"iteration={estimate.grover_iteration_cycles}")
    for stage in sorted(estimate.breakdown):
        cost = estimate.breakdown[stage]
        print(f"  {stage}: gates={cost.gates} depth={cost.depth}")
    return 0


def _cmd_qubits(args) -> int:
    if len(args.capacity) == 1 and not args.mdkp:
        q = qubit_count_qkp(args.n, args.capacity[0], args.profit_bound)
    else:
        q = qubit_count_mdkp(args.n, tuple(args.capacity), args.profit_bound)
    print(q)
    return 0


def _cmd_bench(args) -> int:
    config = CampaignConfig(
        out_dir=args.out_dir,
        format=args.format,
        seed=args.seed,
        max_grover_iterations=args.budget,
        bias_delta=args.bias_delta,
        cycle_time_ns=args.cycle_time_ns,
        variant=args.variant,
        classical_traces_dir=args.classical_traces,
        workers=args.workers,
        cost_model=_load_costs(args),
    )
    summary = run_campaign(args.paths, config)
    print(f"records: {summary.records_path} ({summary.record_count} rows, "
          f"{summary.dropped} dropped)")
    print(f"summary: {summary.summary_path}")
    for failure in summary.failures:
        print(f"failed: {failure}", file=sys.stderr)
    return 0 if summary.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtg",
        description="emulation and resource estimation for tree-generator "
                    "quantum search on knapsack problems",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("validate", help="parse an instance and check normalization")
    _add_instance_args(sub)
    sub.set_defaults(func=_cmd_validate)

    sub = subs.add_parser("greedy", help="greedy incumbent")
    _add_instance_args(sub)
    sub.set_defaults(func=_cmd_greedy)

    sub = subs.add_parser("oracle", help="exact optimum by branch and bound")
    _add_instance_args(sub)
    sub.add_argument("--limit", type=int, default=24,
                     help="refuse instances with more items than this")
    sub.set_defaults(func=_cmd_oracle)

    sub = subs.add_parser("sample", help="draw feasible assignments from the tree model")
    _add_instance_args(sub)
    sub.add_argument("--draws", type=int, default=10000)
    sub.add_argument("--bias", type=float, default=None)
    sub.add_argument("--follow-incumbent", action="store_true")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--threshold", type=int, default=None,
                     help="also report the mass strictly above this profit")
    sub.set_defaults(func=_cmd_sample)

    sub = subs.add_parser("search", help="run the emulated amplified search")
    _add_instance_args(sub)
    _add_cost_args(sub)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--budget", type=int, default=None,
                     help="amplification budget per round (default: n^2)")
    sub.add_argument("--bias-delta", type=int, default=4)
    sub.add_argument("--cycle-time-ns", type=float, default=1.0)
    sub.add_argument("--trace", default=None, help="write the trace CSV here")
    sub.set_defaults(func=_cmd_search)

    sub = subs.add_parser("estimate", help="circuit resource estimate")
    _add_instance_args(sub)
    _add_cost_args(sub)
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(func=_cmd_estimate)

    sub = subs.add_parser("qubits", help="register width for given parameters")
    sub.add_argument("n", type=int)
    sub.add_argument("profit_bound", type=int)
    sub.add_argument("capacity", type=int, nargs="+")
    sub.add_argument("--mdkp", action="store_true",
                     help="force the multi-dimension layout even for d=1")
    sub.set_defaults(func=_cmd_qubits)

    sub = subs.add_parser("bench", help="run a benchmark campaign")
    sub.add_argument("out_dir")
    sub.add_argument("paths", nargs="+", help="instance files")
    sub.add_argument("--format", choices=FORMAT_NAMES, default="json")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--budget", type=int, default=None)
    sub.add_argument("--bias-delta", type=int, default=4)
    sub.add_argument("--cycle-time-ns", type=float, default=1.0)
    sub.add_argument("--variant", choices=VARIANTS, default="parallel-tree")
    sub.add_argument("--cost-model", metavar="TOML", default=None)
    sub.add_argument("--classical-traces", metavar="DIR", default=None)
    sub.add_argument("--workers", type=int, default=None)
    sub.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, InputError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
