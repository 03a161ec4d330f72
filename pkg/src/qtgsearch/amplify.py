"""Threshold search by emulated amplitude amplification.

qsearch emulates the unknown-success-probability amplification loop: the
schedule bound grows geometrically (factor 6/5 by default, capped at
sqrt(2**n)), each round draws an iteration count j uniformly below the
bound, succeeds with probability sin((2j+1) arcsin(sqrt(p)))**2 where p is
the mass above the threshold, and a success yields a sample from the
conditional distribution of qualifying assignments. qmaxsearch chains
qsearch calls with the threshold riding the incumbent profit until a round
exhausts its iteration budget.

Cycle accounting per round: one state preparation, j amplification
iterations, one measurement; an aborted partial round (the drawn j did not
fit the remaining budget) charges only the preparation and the iterations
actually consumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .baseline import SearchTrace, TraceEntry, TraceSource, greedy_incumbent
from .instances import (
    InputError,
    KnapsackInstance,
    Solution,
    ValidationError,
)
from .resources import CostModel, DEFAULT_COST_MODEL, estimate_qtg
from .rng import substream
from .sampler import (
    DEFAULT_MC_SAMPLES,
    EXACT_ENUMERATION_LIMIT,
    QtgModel,
    SuccessMass,
    _profit_table,
    bias_for_distance,
    code_to_bits,
    evaluate_profits_batch,
    path_distribution,
    sample_paths,
    success_mass,
)

#: below this mass, rejection sampling hands over to exact enumeration
_REJECTION_FALLBACK_MASS = 1e-6

_REJECTION_BATCH = 2048


def grover_success_probability(p: float, j: int) -> float:
    """Probability that measuring after j amplification iterations succeeds.

    Equals sin((2j+1) arcsin(sqrt(p)))**2; j == 0 returns p itself exactly.
    """
    if not (0.0 <= p <= 1.0):
        raise InputError(f"success mass must lie in [0, 1], got {p}")
    if not isinstance(j, (int, np.integer)) or isinstance(j, bool) or j < 0:
        raise InputError(f"iteration count must be a nonnegative integer, got {j!r}")
    if j == 0:
        return p
    return math.sin((2 * j + 1) * math.asin(math.sqrt(p))) ** 2


def cycles_to_runtime(cycles: int, cycle_time_ns: float = 1.0) -> float:
    """Wall seconds for a cycle count under the given cycle time."""
    if cycles < 0:
        raise InputError(f"cycle count must be nonnegative, got {cycles}")
    if not (cycle_time_ns > 0):
        raise InputError(f"cycle time must be positive, got {cycle_time_ns}")
    return cycles * cycle_time_ns / 1e9


@dataclass(frozen=True)
class AmplificationConfig:
    """Knobs for qsearch/qmaxsearch plus the per-operation cycle prices.

    max_grover_iterations is the per-call budget M (defaults to n**2 at
    call time); growth_factor is the schedule multiplier. Cycle prices
    normally come from a ResourceEstimate via for_instance.
    """

    max_grover_iterations: int | None = None
    growth_factor: float = 1.2
    seed: int = 0
    bias_delta: int = 4
    fixed_bias: float | None = None
    retune_bias: bool = True
    state_prep_cycles: int = 1
    iteration_cycles: int = 1
    measurement_cycles: int = 1
    success_mass_mode: str = "auto"
    mc_samples: int = DEFAULT_MC_SAMPLES
    exact_limit: int = EXACT_ENUMERATION_LIMIT
    total_iteration_cap: int | None = None

    def __post_init__(self):
        if self.max_grover_iterations is not None and self.max_grover_iterations < 1:
            raise InputError(
                f"iteration budget must be at least 1, got {self.max_grover_iterations}"
            )
        if not (self.growth_factor > 1.0):
            raise InputError(f"growth factor must exceed 1, got {self.growth_factor}")
        if self.bias_delta < 1:
            raise InputError(f"bias delta must be positive, got {self.bias_delta}")
        for name in ("state_prep_cycles", "iteration_cycles", "measurement_cycles"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be at least 1 cycle")

    @staticmethod
    def for_instance(
        instance: KnapsackInstance,
        cost_model: CostModel = DEFAULT_COST_MODEL,
        variant: str = "parallel-tree",
        **overrides,
    ) -> "AmplificationConfig":
        estimate = estimate_qtg(instance, cost_model=cost_model, variant=variant)
        base = dict(
            state_prep_cycles=estimate.qtg_depth_cycles,
            iteration_cycles=estimate.grover_iteration_cycles,
            measurement_cycles=cost_model.measurement_cycles,
        )
        base.update(overrides)
        return AmplificationConfig(**base)


@dataclass(frozen=True)
class QsearchResult:
    solution: Optional[Solution]
    iterations: int
    cycles: int
    attempts: int
    mass: SuccessMass

    @property
    def exhausted(self) -> bool:
        return self.solution is None


def _conditional_sample(
    model: QtgModel,
    threshold: int,
    mass: float,
    rng: np.random.Generator,
    exact_limit: int,
) -> Solution:
    """Sample an assignment with profit above threshold, given one exists.

    Rejection-samples the tree distribution; for small instances with tiny
    qualifying mass it switches to exact enumeration of the conditional.
    """
    n = model.instance.n
    can_enumerate = n <= min(exact_limit, EXACT_ENUMERATION_LIMIT)
    if can_enumerate and mass < _REJECTION_FALLBACK_MASS:
        return _exact_conditional(model, threshold, rng)
    batches = 0
    while True:
        x = sample_paths(model, _REJECTION_BATCH, rng)
        profits = evaluate_profits_batch(model.instance, x)
        hits = np.flatnonzero(profits > threshold)
        if hits.size:
            row = x[hits[0]]
            bits = "".join("1" if b else "0" for b in row)
            return Solution.from_bits(model.instance, bits)
        batches += 1
        if can_enumerate and batches >= 64:
            return _exact_conditional(model, threshold, rng)
        if batches >= 100_000:
            raise RuntimeError(
                f"rejection sampling drew {batches * _REJECTION_BATCH} assignments "
                f"without finding profit > {threshold}; mass estimate {mass} was likely wrong"
            )


def _exact_conditional(model: QtgModel, threshold: int, rng: np.random.Generator) -> Solution:
    probs = path_distribution(model)
    profits = _profit_table(model.instance)
    mask = profits > threshold
    total = probs[mask].sum()
    if total <= 0.0:
        raise ValidationError(
            f"no assignment with profit above {threshold} is reachable; "
            "success mass was zero"
        )
    codes = np.flatnonzero(mask)
    weights = probs[mask] / total
    code = int(rng.choice(codes, p=weights))
    return Solution.from_bits(model.instance, code_to_bits(code, model.instance.n))


def qsearch(
    model: QtgModel,
    threshold: int,
    config: AmplificationConfig,
    budget: int | None = None,
    rng: np.random.Generator | None = None,
) -> QsearchResult:
    """One amplification run against a fixed threshold.

    Returns an improved solution or an exhausted result once the iteration
    budget is spent. Total iterations charged never exceed the budget.
    """
    n = model.instance.n
    if budget is None:
        budget = (
            config.max_grover_iterations
            if config.max_grover_iterations is not None
            else n * n
        )
    if budget < 0:
        raise InputError(f"budget must be nonnegative, got {budget}")
    if rng is None:
        rng = substream(config.seed)
    mass = success_mass(
        model,
        threshold,
        mode=config.success_mass_mode,
        samples=config.mc_samples,
        rng=rng,
        exact_limit=config.exact_limit,
    )
    p = mass.value
    m_cap = 2.0 ** (n / 2)
    m_hat = 1.0
    remaining = budget
    iterations = 0
    cycles = 0
    attempts = 0
    while True:
        j = int(rng.integers(0, math.ceil(m_hat)))
        if j > remaining:
            # partial round: prepare, run what fits, never reach measurement
            iterations += remaining
            cycles += config.state_prep_cycles + remaining * config.iteration_cycles
            return QsearchResult(None, iterations, cycles, attempts, mass)
        attempts += 1
        iterations += j
        remaining -= j
        cycles += (
            config.state_prep_cycles
            + j * config.iteration_cycles
            + config.measurement_cycles
        )
        if p > 0.0 and rng.random() < grover_success_probability(p, j):
            solution = _conditional_sample(model, threshold, p, rng, config.exact_limit)
            return QsearchResult(solution, iterations, cycles, attempts, mass)
        m_hat = min(m_hat * config.growth_factor, m_cap)


@dataclass(frozen=True)
class RoundRecord:
    threshold: int
    bias: float
    mass: SuccessMass
    iterations: int
    cycles: int
    attempts: int
    improved_bits: str | None
    improved_profit: int | None


@dataclass(frozen=True)
class QuantumRunRecord:
    instance_name: str
    rounds: tuple[RoundRecord, ...]
    total_iterations: int
    total_cycles: int
    final: Solution


@dataclass(frozen=True)
class QMaxSearchResult:
    trace: SearchTrace
    record: QuantumRunRecord


def qmaxsearch(
    instance: KnapsackInstance,
    config: AmplificationConfig | None = None,
) -> QMaxSearchResult:
    """Ascend thresholds from the greedy incumbent until a round exhausts.

    Each round rebuilds the sampling model around the current incumbent
    (bias re-tuned unless configured otherwise) and runs qsearch with the
    incumbent profit as threshold. The trace records the greedy start at
    cycle 0 and every improvement at its cumulative cycle count.
    """
    if config is None:
        config = AmplificationConfig.for_instance(instance)
    incumbent = greedy_incumbent(instance)
    entries = [TraceEntry(timestamp=0.0, profit=incumbent.profit, bits=incumbent.bits)]
    rounds: list[RoundRecord] = []
    total_cycles = 0
    total_iterations = 0
    bias = None
    round_idx = 0
    while True:
        if config.fixed_bias is not None:
            bias = config.fixed_bias
        elif bias is None or config.retune_bias:
            bias = bias_for_distance(instance.n, config.bias_delta)
        model = QtgModel.for_instance(instance, incumbent=incumbent.bits, bias=bias)
        budget = (
            config.max_grover_iterations
            if config.max_grover_iterations is not None
            else instance.n * instance.n
        )
        if config.total_iteration_cap is not None:
            budget = max(0, min(budget, config.total_iteration_cap - total_iterations))
        rng = substream(config.seed, round_idx)
        result = qsearch(model, incumbent.profit, config, budget=budget, rng=rng)
        total_cycles += result.cycles
        total_iterations += result.iterations
        rounds.append(
            RoundRecord(
                threshold=incumbent.profit,
                bias=bias,
                mass=result.mass,
                iterations=result.iterations,
                cycles=result.cycles,
                attempts=result.attempts,
                improved_bits=None if result.solution is None else result.solution.bits,
                improved_profit=None if result.solution is None else result.solution.profit,
            )
        )
        if result.solution is None:
            break
        incumbent = result.solution
        entries.append(
            TraceEntry(
                timestamp=float(total_cycles),
                profit=incumbent.profit,
                bits=incumbent.bits,
            )
        )
        round_idx += 1
    trace = SearchTrace(
        source=TraceSource.QUANTUM_EMULATED,
        entries=tuple(entries),
        instance_name=instance.name,
    ).validate(instance)
    record = QuantumRunRecord(
        instance_name=instance.name,
        rounds=tuple(rounds),
        total_iterations=total_iterations,
        total_cycles=total_cycles,
        final=incumbent,
    )
    return QMaxSearchResult(trace=trace, record=record)
