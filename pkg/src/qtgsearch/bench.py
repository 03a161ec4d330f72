"""Campaign runner pairing emulated quantum search against classical traces.

For each instance the harness runs qmaxsearch, converts its cycle counts to
seconds under the configured cycle time, and matches incumbents against a
classical solver trace: each classical entry is paired with the earliest
quantum entry of equal or better profit, unmatched entries are dropped and
counted. Classical wall-times come from ingested external traces when
available; otherwise an internal greedy placeholder is used and labeled so
headline comparisons can exclude it.

Outputs under the campaign directory: records.csv with the fixed column
order instance,n,d,classical_seconds,quantum_cycles,quantum_seconds,gap,
one trace CSV pair and one resource-estimate JSON per instance, and
summary.json. Runs are deterministic for a fixed seed: worker processes own
their RNG streams through stable per-instance coordinates and files are
written atomically, so reruns are byte-identical.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .amplify import AmplificationConfig, cycles_to_runtime, qmaxsearch
from .baseline import (
    SearchTrace,
    TraceSource,
    greedy_trace,
    ingest_external_trace,
    write_trace_csv,
)
from .formats import ParseError, count_orlib_problems, parse_instance
from .instances import InputError, KnapsackInstance, ValidationError
from .resources import CostModel, DEFAULT_COST_MODEL, estimate_qtg
from .rng import name_seed

RECORD_COLUMNS = (
    "instance",
    "n",
    "d",
    "classical_seconds",
    "quantum_cycles",
    "quantum_seconds",
    "gap",
)

WORKERS_ENV_VAR = "QTG_WORKERS"


class GapUndefinedError(ValueError):
    """Relative gap against a zero objective is undefined."""


def relative_gap(objective: int, bound: int) -> float:
    """|bound - objective| / |objective|.

    Raises GapUndefinedError for a zero objective; callers that must not
    crash flag the record instead. A bound below the objective still yields
    a value so inconsistent bounds surface as flagged records, not crashes.
    """
    if objective == 0:
        raise GapUndefinedError("relative gap is undefined for a zero objective")
    return abs(bound - objective) / abs(objective)


@dataclass(frozen=True)
class ComparisonRecord:
    """One matched pair: a classical incumbent and the earliest quantum
    entry that meets or beats it."""

    instance: str
    n: int
    d: int
    classical_seconds: float
    classical_profit: int
    quantum_cycles: int
    quantum_seconds: float
    quantum_profit: int
    gap: float | None
    flag: str = ""

    def csv_row(self) -> list[str]:
        return [
            self.instance,
            str(self.n),
            str(self.d),
            format(self.classical_seconds, ".9g"),
            str(self.quantum_cycles),
            format(self.quantum_seconds, ".9g"),
            "" if self.gap is None else format(self.gap, ".9g"),
        ]


@dataclass(frozen=True)
class MatchResult:
    records: tuple[ComparisonRecord, ...]
    dropped: int


def match_incumbents(
    classical: SearchTrace,
    quantum: SearchTrace,
    cycle_time_ns: float = 1.0,
    instance: KnapsackInstance | None = None,
) -> MatchResult:
    """Pair every classical incumbent with the earliest at-least-as-good
    quantum incumbent; classical entries nothing qualifies for are dropped.

    The relative gap compares each classical profit against the classical
    trace's best bound when one is present.
    """
    names = {
        t.instance_name
        for t in (classical, quantum)
        if t.instance_name is not None
    }
    if instance is not None:
        names.add(instance.name)
    if len(names) > 1:
        raise InputError(f"traces refer to different instances: {sorted(names)}")
    if quantum.source is not TraceSource.QUANTUM_EMULATED:
        raise InputError(f"expected a quantum trace, got source {quantum.source.value}")
    name = names.pop() if names else ""
    n = instance.n if instance is not None else 0
    d = instance.d if instance is not None else 0
    records: list[ComparisonRecord] = []
    dropped = 0
    for centry in classical.entries:
        qualifying = [q for q in quantum.entries if q.profit >= centry.profit]
        if not qualifying:
            dropped += 1
            continue
        q = min(qualifying, key=lambda e: e.timestamp)
        gap: float | None
        flag = ""
        if classical.best_bound is None:
            gap = None
            flag = "no-bound"
        else:
            try:
                gap = relative_gap(centry.profit, classical.best_bound)
            except GapUndefinedError:
                gap = None
                flag = "zero-objective"
            else:
                if classical.best_bound < centry.profit:
                    flag = "bound-below-objective"
        if classical.source is TraceSource.INTERNAL_CLASSICAL:
            flag = (flag + ",internal-timing").strip(",")
        records.append(
            ComparisonRecord(
                instance=name,
                n=n,
                d=d,
                classical_seconds=float(centry.timestamp),
                classical_profit=centry.profit,
                quantum_cycles=int(q.timestamp),
                quantum_seconds=cycles_to_runtime(int(q.timestamp), cycle_time_ns),
                quantum_profit=q.profit,
                gap=gap,
                flag=flag,
            )
        )
    return MatchResult(records=tuple(records), dropped=dropped)


# ---------------------------------------------------------------------------
# campaign plumbing


@dataclass(frozen=True)
class CampaignConfig:
    out_dir: str
    format: str = "json"
    seed: int = 0
    max_grover_iterations: int | None = None
    bias_delta: int = 4
    cycle_time_ns: float = 1.0
    variant: str = "parallel-tree"
    classical_traces_dir: str | None = None
    workers: int | None = None
    cost_model: CostModel = DEFAULT_COST_MODEL


@dataclass(frozen=True)
class CampaignSummary:
    out_dir: str
    records_path: str
    summary_path: str
    record_count: int
    dropped: int
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def _atomic_write(path: str, text: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _expand_work_units(paths, format: str) -> list[tuple[str, int | None]]:
    units: list[tuple[str, int | None]] = []
    for path in paths:
        path = os.fspath(path)
        if format == "orlib":
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
            try:
                parse_instance_count = count_orlib_problems(text)
            except ParseError:
                parse_instance_count = 1
            if parse_instance_count > 1:
                units.extend((path, k) for k in range(parse_instance_count))
                continue
        units.append((path, None))
    return units


def _instance_seed(campaign_seed: int, name: str) -> int:
    return (int(campaign_seed) << 32) ^ name_seed(name)


def _run_one(unit: tuple[str, int | None], config: CampaignConfig) -> dict:
    path, index = unit
    instance = parse_instance(path, format=config.format, index=index)
    out = os.path.join(config.out_dir, instance.name)
    warnings: list[str] = []

    estimate = estimate_qtg(instance, cost_model=config.cost_model, variant=config.variant)
    _atomic_write(f"{out}.estimate.json", estimate.to_json())

    amp = AmplificationConfig.for_instance(
        instance,
        cost_model=config.cost_model,
        variant=config.variant,
        max_grover_iterations=config.max_grover_iterations,
        bias_delta=config.bias_delta,
        seed=_instance_seed(config.seed, instance.name),
    )
    quantum = qmaxsearch(instance, amp).trace

    classical_path = (
        os.path.join(config.classical_traces_dir, f"{instance.name}.csv")
        if config.classical_traces_dir
        else None
    )
    if classical_path and os.path.exists(classical_path):
        classical = ingest_external_trace(classical_path, instance)
    else:
        classical = greedy_trace(instance)
        warnings.append(
            f"{instance.name}: no external classical trace; internal greedy "
            "placeholder used, wall-times are not meaningful"
        )

    match = match_incumbents(
        classical, quantum, cycle_time_ns=config.cycle_time_ns, instance=instance
    )
    _write_traces(out, classical, quantum)
    return {
        "name": instance.name,
        "n": instance.n,
        "d": instance.d,
        "kind": instance.kind.value,
        "classical_source": classical.source.value,
        "classical_profit": classical.final_profit,
        "quantum_profit": quantum.final_profit,
        "matched": len(match.records),
        "dropped": match.dropped,
        "records": match.records,
        "warnings": warnings,
    }


def _write_traces(out_prefix: str, classical: SearchTrace, quantum: SearchTrace) -> None:
    for suffix, trace in ((".classical.csv", classical), (".quantum.csv", quantum)):
        path = f"{out_prefix}{suffix}"
        tmp = f"{path}.tmp.{os.getpid()}"
        write_trace_csv(trace, tmp)
        os.replace(tmp, path)


def _worker(args):
    unit, config = args
    try:
        return None, _run_one(unit, config)
    except (ParseError, ValidationError, InputError, OSError) as err:
        return f"{unit[0]}" + (f"#{unit[1]}" if unit[1] is not None else "") + f": {err}", None


def run_campaign(paths, config: CampaignConfig) -> CampaignSummary:
    """Run the full campaign over the given instance files.

    Deterministic for fixed (paths, config): per-instance randomness is
    keyed by the campaign seed and the instance name, results are merged in
    sorted name order regardless of worker scheduling.
    """
    os.makedirs(config.out_dir, exist_ok=True)
    units = _expand_work_units(paths, config.format)
    workers = config.workers
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV_VAR, "1") or "1")
    workers = max(1, workers)

    outcomes: list[dict] = []
    failures: list[str] = []
    if workers == 1 or len(units) <= 1:
        results = [_worker((unit, config)) for unit in units]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_worker, [(unit, config) for unit in units]))
    for failure, outcome in results:
        if failure is not None:
            failures.append(failure)
        else:
            outcomes.append(outcome)
    names = [o["name"] for o in outcomes]
    if len(set(names)) != len(names):
        dupes = sorted({x for x in names if names.count(x) > 1})
        raise ValidationError(f"duplicate instance names in campaign: {dupes}")
    outcomes.sort(key=lambda o: o["name"])

    all_records = [rec for o in outcomes for rec in o["records"]]
    all_records.sort(key=lambda r: (r.instance, r.classical_seconds))
    records_path = os.path.join(config.out_dir, "records.csv")
    lines = [",".join(RECORD_COLUMNS)]
    lines.extend(",".join(rec.csv_row()) for rec in all_records)
    _atomic_write(records_path, "\n".join(lines) + "\n")

    dropped = sum(o["dropped"] for o in outcomes)
    summary = {
        "config": {
            "format": config.format,
            "seed": config.seed,
            "max_grover_iterations": config.max_grover_iterations,
            "bias_delta": config.bias_delta,
            "cycle_time_ns": config.cycle_time_ns,
            "variant": config.variant,
            "classical_traces_dir": config.classical_traces_dir,
        },
        "instances": {
            o["name"]: {
                "n": o["n"],
                "d": o["d"],
                "kind": o["kind"],
                "classical_source": o["classical_source"],
                "classical_profit": o["classical_profit"],
                "quantum_profit": o["quantum_profit"],
                "matched": o["matched"],
                "dropped": o["dropped"],
            }
            for o in outcomes
        },
        "totals": {
            "instances": len(outcomes),
            "records": len(all_records),
            "dropped": dropped,
            "external_classical": sum(
                1 for o in outcomes if o["classical_source"] == "external-classical"
            ),
        },
        "warnings": sorted(w for o in outcomes for w in o["warnings"]),
        "failures": sorted(failures),
    }
    summary_path = os.path.join(config.out_dir, "summary.json")
    _atomic_write(summary_path, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return CampaignSummary(
        out_dir=config.out_dir,
        records_path=records_path,
        summary_path=summary_path,
        record_count=len(all_records),
        dropped=dropped,
        failures=tuple(sorted(failures)),
    )
