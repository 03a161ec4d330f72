"""Classical reference algorithms and search traces.

The greedy incumbent seeds the quantum-style search and the exact oracle
grades it. Both walk items in the same fixed order as the sampling tree:
descending greedy profit density with the original index as a stable
tie-break. SearchTrace is the shared record of incumbent improvements for
classical solvers (timestamps in seconds) and the emulated quantum search
(timestamps in cycles).
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from enum import Enum

from .instances import (
    InputError,
    KnapsackInstance,
    LimitExceededError,
    ProblemKind,
    Solution,
    ValidationError,
    check_feasible,
    evaluate_profit,
)

EXACT_OPTIMUM_DEFAULT_LIMIT = 24


def greedy_density(instance: KnapsackInstance, m: int) -> float:
    """Profit density of item m used for ordering.

    QKP: total profit the item can contribute (linear plus all synergies)
    per unit weight. MDKP: linear profit per unit of capacity-scaled weight.
    Items with zero denominator are infinitely dense: taking them is free.
    """
    if instance.kind is ProblemKind.QKP:
        numerator = sum(instance.profits[m])  # p[m][m] + sum of p[m][mp]
        weight = instance.weights[0][m]
        if weight == 0:
            return math.inf
        return numerator / weight
    numerator = instance.profits[m]
    scaled = sum(
        instance.weights[i][m] / instance.capacities[i] for i in range(instance.d)
    )
    if scaled == 0:
        return math.inf
    return numerator / scaled


def default_item_order(instance: KnapsackInstance) -> tuple[int, ...]:
    """Items sorted by descending greedy density; ties keep the lower index."""
    return tuple(
        sorted(range(instance.n), key=lambda m: (-greedy_density(instance, m), m))
    )


def greedy_incumbent(instance: KnapsackInstance) -> Solution:
    """Deterministic greedy solution: take every item that still fits.

    Items are visited in the density order above. For QKP the density uses
    the full synergy row, so realized profit can differ from the density
    numerator; the assignment is what matters here.
    """
    bits = ["0"] * instance.n
    residuals = list(instance.capacities)
    for m in default_item_order(instance):
        if all(instance.weights[i][m] <= residuals[i] for i in range(instance.d)):
            bits[m] = "1"
            for i in range(instance.d):
                residuals[i] -= instance.weights[i][m]
    return Solution.from_bits(instance, "".join(bits))


def exact_optimum(instance: KnapsackInstance, limit_n: int = EXACT_OPTIMUM_DEFAULT_LIMIT) -> Solution:
    """Exhaustive optimum via depth-first enumeration with infeasible pruning.

    Walks items in the tree order and abandons any branch that has already
    overrun a capacity. Refuses instances with n beyond limit_n since the
    worst case is 2**n nodes.
    """
    if instance.n > limit_n:
        raise LimitExceededError(
            f"exact_optimum is capped at n <= {limit_n} (got n={instance.n}); "
            "raise limit_n explicitly to insist"
        )
    order = default_item_order(instance)
    n = instance.n
    d = instance.d
    weights = instance.weights
    qkp = instance.kind is ProblemKind.QKP
    if qkp:
        lin = [instance.profits[m][m] for m in range(n)]
        pairs = instance.profits
    else:
        lin = list(instance.profits)

    best_bits: list[str] = ["0"] * n
    best_profit = 0
    bits = ["0"] * n
    residuals = list(instance.capacities)
    # synergy[m] accumulates pair profit between m and the currently selected set
    synergy = [0] * n

    def walk(t: int, profit: int) -> None:
        nonlocal best_profit, best_bits
        if t == n:
            if profit > best_profit:
                best_profit = profit
                best_bits = bits[:]
            return
        m = order[t]
        if all(weights[i][m] <= residuals[i] for i in range(d)):
            bits[m] = "1"
            for i in range(d):
                residuals[i] -= weights[i][m]
            gain = lin[m] + (synergy[m] if qkp else 0)
            if qkp:
                row = pairs[m]
                for other in range(n):
                    synergy[other] += row[other] + pairs[other][m]
                synergy[m] -= 2 * row[m]  # undo the self pair added above
            walk(t + 1, profit + gain)
            if qkp:
                row = pairs[m]
                for other in range(n):
                    synergy[other] -= row[other] + pairs[other][m]
                synergy[m] += 2 * row[m]
            for i in range(d):
                residuals[i] += weights[i][m]
            bits[m] = "0"
        walk(t + 1, profit)

    walk(0, 0)
    return Solution.from_bits(instance, "".join(best_bits))


# ---------------------------------------------------------------------------
# search traces


class TraceSource(str, Enum):
    INTERNAL_CLASSICAL = "internal-classical"
    EXTERNAL_CLASSICAL = "external-classical"
    QUANTUM_EMULATED = "quantum-emulated"


@dataclass(frozen=True)
class TraceEntry:
    """One incumbent improvement: when it was found and what it is worth.

    timestamp is wall seconds for classical traces and emulator cycles for
    quantum traces. bits may be None for externally reported profit-only
    rows, which are kept but flagged unverified.
    """

    timestamp: float
    profit: int
    bits: str | None = None
    verified: bool = True


@dataclass(frozen=True)
class SearchTrace:
    source: TraceSource
    entries: tuple[TraceEntry, ...]
    instance_name: str | None = None
    best_bound: int | None = None

    @property
    def timestamp_unit(self) -> str:
        return "cycles" if self.source is TraceSource.QUANTUM_EMULATED else "seconds"

    @property
    def final_profit(self) -> int:
        return self.entries[-1].profit if self.entries else 0

    def validate(self, instance: KnapsackInstance | None = None) -> "SearchTrace":
        prev_t = -math.inf
        prev_p = -1
        for k, entry in enumerate(self.entries):
            if entry.timestamp < 0:
                raise ValidationError(f"entry {k}: negative timestamp {entry.timestamp}")
            if entry.timestamp <= prev_t:
                raise ValidationError(
                    f"entry {k}: timestamp {entry.timestamp} did not increase "
                    f"(previous {prev_t})"
                )
            if entry.profit <= prev_p:
                raise ValidationError(
                    f"entry {k}: profit {entry.profit} did not increase (previous {prev_p})"
                )
            if entry.bits is not None and instance is not None:
                ok, residuals = check_feasible(instance, entry.bits)
                if not ok:
                    raise ValidationError(
                        f"entry {k}: bits {entry.bits} infeasible, residuals {residuals}"
                    )
            prev_t = entry.timestamp
            prev_p = entry.profit
        return self


TRACE_COLUMNS_CLASSICAL = ("seconds", "profit", "bits", "bound")
TRACE_COLUMNS_QUANTUM = ("cycles", "profit", "bits", "bound")


def ingest_external_trace(path: str | os.PathLike, instance: KnapsackInstance) -> SearchTrace:
    """Read a classical solver trace CSV and validate it against the instance.

    Expected header: seconds,profit,bits,bound. bits may be empty (the row
    is kept as unverified); bound may be empty, the last nonempty value wins.
    """
    path = os.fspath(path)
    entries: list[TraceEntry] = []
    best_bound: int | None = None
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty trace file") from None
        if tuple(h.strip() for h in header) != TRACE_COLUMNS_CLASSICAL:
            raise ValidationError(
                f"{path}: header {header!r} does not match "
                f"{','.join(TRACE_COLUMNS_CLASSICAL)}"
            )
        for rownum, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 4:
                raise ValidationError(f"{path}: line {rownum}: expected 4 columns, got {len(row)}")
            sec_raw, profit_raw, bits_raw, bound_raw = (cell.strip() for cell in row)
            try:
                seconds = float(sec_raw)
            except ValueError:
                raise ValidationError(
                    f"{path}: line {rownum}: seconds must be a number, got {sec_raw!r}"
                ) from None
            try:
                profit = int(profit_raw)
            except ValueError:
                raise ValidationError(
                    f"{path}: line {rownum}: profit must be an integer, got {profit_raw!r}"
                ) from None
            bits = bits_raw or None
            if bits is not None:
                ok, residuals = check_feasible(instance, bits)
                if not ok:
                    raise ValidationError(
                        f"{path}: line {rownum}: bits {bits} infeasible for "
                        f"{instance.name}, residuals {residuals}"
                    )
            if bound_raw:
                try:
                    best_bound = int(bound_raw)
                except ValueError:
                    raise ValidationError(
                        f"{path}: line {rownum}: bound must be an integer, got {bound_raw!r}"
                    ) from None
            entries.append(
                TraceEntry(timestamp=seconds, profit=profit, bits=bits, verified=bits is not None)
            )
    trace = SearchTrace(
        source=TraceSource.EXTERNAL_CLASSICAL,
        entries=tuple(entries),
        instance_name=instance.name,
        best_bound=best_bound,
    )
    try:
        return trace.validate(instance)
    except ValidationError as err:
        raise ValidationError(f"{path}: {err}") from None


def write_trace_csv(trace: SearchTrace, path: str | os.PathLike) -> None:
    """Write a trace; the timestamp column name follows the trace's unit."""
    columns = (
        TRACE_COLUMNS_QUANTUM
        if trace.source is TraceSource.QUANTUM_EMULATED
        else TRACE_COLUMNS_CLASSICAL
    )
    with open(os.fspath(path), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        last = len(trace.entries) - 1
        for k, entry in enumerate(trace.entries):
            if trace.source is TraceSource.QUANTUM_EMULATED:
                stamp = str(int(entry.timestamp))
            else:
                stamp = format(float(entry.timestamp), ".9g")
            bound = str(trace.best_bound) if (k == last and trace.best_bound is not None) else ""
            writer.writerow([stamp, str(entry.profit), entry.bits or "", bound])


def greedy_trace(instance: KnapsackInstance) -> SearchTrace:
    """Placeholder classical trace built from the internal greedy solution.

    The timestamp is zero by construction: internal wall-times are not
    meaningful benchmarks and are labeled so reports can exclude them.
    """
    greedy = greedy_incumbent(instance)
    return SearchTrace(
        source=TraceSource.INTERNAL_CLASSICAL,
        entries=(TraceEntry(timestamp=0.0, profit=greedy.profit, bits=greedy.bits),),
        instance_name=instance.name,
        best_bound=instance.known_optimum,
    )
