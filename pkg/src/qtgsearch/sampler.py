"""Classical emulation of the biased item-decision tree sampler.

The state-preparation circuit walks items in a fixed order and, per item,
either forces the bit to 0 (the item no longer fits any remaining capacity)
or applies a biased rotation that keeps the incumbent's bit with
probability (1+b)/(2+b) and flips it with probability 1/(2+b). Measuring
the prepared state therefore draws a feasible assignment from the product
distribution over tree branches; this module samples that distribution
directly and can also evaluate it exactly.

Bias b >= 0 is a float; b == 0 is the unbiased Hadamard regime and
b == math.inf is an explicit follow-the-incumbent mode that never draws
randomness rather than an approximation with a huge float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .baseline import default_item_order, greedy_incumbent
from .instances import (
    InputError,
    KnapsackInstance,
    LimitExceededError,
    ProblemKind,
    Solution,
    ValidationError,
    check_bits,
    check_feasible,
)

FOLLOW_INCUMBENT = math.inf

#: largest n for which exact enumeration over all 2**n assignments is allowed
EXACT_ENUMERATION_LIMIT = 20

#: default draw count for Monte-Carlo mass estimates
DEFAULT_MC_SAMPLES = 100_000

#: switch path_probability to log-space accumulation beyond this many items
_LOG_SPACE_THRESHOLD = 64


def bias_for_distance(n: int, delta: int = 4) -> float:
    """Bias that concentrates samples around Hamming distance delta.

    The tuning rule is b = n / delta; delta defaults to 4, which targets
    nearby improvements of the incumbent.
    """
    if delta <= 0:
        raise InputError(f"distance delta must be positive, got {delta}")
    if n < 1:
        raise InputError(f"need n >= 1, got {n}")
    return n / delta


def branch_probability(incumbent_bit: int, bias: float) -> tuple[float, float]:
    """(P(bit=0), P(bit=1)) for one unforced branching step.

    The two probabilities sum to 1 exactly: the flip side is computed as
    1/(2+b) and the keep side as its complement.
    """
    if incumbent_bit not in (0, 1):
        raise InputError(f"incumbent bit must be 0 or 1, got {incumbent_bit!r}")
    if not (bias >= 0):
        raise InputError(f"bias must be nonnegative, got {bias}")
    if math.isinf(bias):
        keep, flip = 1.0, 0.0
    else:
        flip = 1.0 / (2.0 + bias)
        keep = 1.0 - flip
    return (keep, flip) if incumbent_bit == 0 else (flip, keep)


@dataclass(frozen=True)
class QtgModel:
    """A fully specified sampling distribution.

    incumbent must be feasible; item_order is a permutation of range(n) and
    defaults to the same density order the greedy and the exact oracle use.
    """

    instance: KnapsackInstance
    incumbent: str
    bias: float
    item_order: tuple[int, ...]

    def __post_init__(self):
        check_bits(self.incumbent, self.instance.n)
        ok, residuals = check_feasible(self.instance, self.incumbent)
        if not ok:
            raise ValidationError(
                f"incumbent {self.incumbent} is infeasible, residuals {residuals}"
            )
        if not (self.bias >= 0):
            raise InputError(f"bias must be nonnegative, got {self.bias}")
        if sorted(self.item_order) != list(range(self.instance.n)):
            raise InputError(f"item_order must be a permutation of 0..{self.instance.n - 1}")

    @property
    def follow_incumbent(self) -> bool:
        return math.isinf(self.bias)

    @property
    def n(self) -> int:
        return self.instance.n

    @staticmethod
    def for_instance(
        instance: KnapsackInstance,
        incumbent: str | None = None,
        bias: float | None = None,
        item_order: tuple[int, ...] | None = None,
    ) -> "QtgModel":
        if incumbent is None:
            incumbent = greedy_incumbent(instance).bits
        if bias is None:
            bias = bias_for_distance(instance.n)
        if item_order is None:
            item_order = default_item_order(instance)
        return QtgModel(
            instance=instance,
            incumbent=incumbent,
            bias=float(bias),
            item_order=tuple(item_order),
        )


@lru_cache(maxsize=16)
def _model_arrays(model: QtgModel):
    inst = model.instance
    weights = np.array(inst.weights, dtype=np.int64)
    caps = np.array(inst.capacities, dtype=np.int64)
    order = np.array(model.item_order, dtype=np.int64)
    inc = np.array([1 if b == "1" else 0 for b in model.incumbent], dtype=np.uint8)
    return weights, caps, order, inc


def _flip_probability(bias: float) -> float:
    return 1.0 / (2.0 + bias)


def sample_path(model: QtgModel, rng: np.random.Generator) -> Solution:
    """Draw one assignment by walking the decision tree once.

    Residuals and profit are maintained incrementally along the walk,
    including pair synergies with previously selected items for QKP.
    """
    inst = model.instance
    qkp = inst.kind is ProblemKind.QKP
    residuals = list(inst.capacities)
    bits = ["0"] * inst.n
    profit = 0
    selected: list[int] = []
    for j in model.item_order:
        if any(inst.weights[i][j] > residuals[i] for i in range(inst.d)):
            continue  # forced branch: the item cannot fit
        if model.follow_incumbent:
            take = model.incumbent[j] == "1"
        else:
            _, p1 = branch_probability(1 if model.incumbent[j] == "1" else 0, model.bias)
            take = rng.random() < p1
        if take:
            bits[j] = "1"
            for i in range(inst.d):
                residuals[i] -= inst.weights[i][j]
            if qkp:
                profit += inst.profits[j][j]
                for other in selected:
                    profit += inst.profits[j][other] + inst.profits[other][j]
            else:
                profit += inst.profits[j]
            selected.append(j)
    return Solution(bits="".join(bits), profit=profit, residuals=tuple(residuals))


def sample_paths(model: QtgModel, draws: int, rng: np.random.Generator) -> np.ndarray:
    """Draw many assignments at once; returns a (draws, n) uint8 bit matrix.

    Columns are original item positions. The walk is vectorized over draws,
    one tree level at a time.
    """
    if draws < 0:
        raise InputError(f"draws must be nonnegative, got {draws}")
    inst = model.instance
    weights, caps, order, inc = _model_arrays(model)
    x = np.zeros((draws, inst.n), dtype=np.uint8)
    if draws == 0:
        return x
    resid = np.repeat(caps[:, None], draws, axis=1)
    follow = model.follow_incumbent
    flip = None if follow else _flip_probability(model.bias)
    for j in order:
        forced = (weights[:, j][:, None] > resid).any(axis=0)
        if follow:
            take = ~forced if inc[j] else np.zeros(draws, dtype=bool)
        else:
            # same expression as branch_probability so the sampled law and
            # the exact law agree to the last ulp
            p1 = 1.0 - flip if inc[j] else flip
            take = (~forced) & (rng.random(draws) < p1)
        if take.any():
            x[take, j] = 1
            resid[:, take] -= weights[:, j][:, None]
    return x


def evaluate_profits_batch(instance: KnapsackInstance, x: np.ndarray) -> np.ndarray:
    """Objective for each row of a bit matrix, as int64."""
    x = np.asarray(x, dtype=np.int64)
    if instance.kind is ProblemKind.MDKP:
        p = np.array(instance.profits, dtype=np.int64)
        return x @ p
    p = np.array(instance.profits, dtype=np.int64)
    out = np.empty(x.shape[0], dtype=np.int64)
    # x^T P x equals the full objective: diagonal terms survive because
    # x_m^2 == x_m, off-diagonal ordered pairs are both present in P
    chunk = 1 << 14
    for start in range(0, x.shape[0], chunk):
        blk = x[start : start + chunk]
        out[start : start + chunk] = np.einsum("ij,jk,ik->i", blk, p, blk)
    return out


def residuals_batch(instance: KnapsackInstance, x: np.ndarray) -> np.ndarray:
    """Per-dimension residual capacity for each row; shape (rows, d)."""
    x = np.asarray(x, dtype=np.int64)
    w = np.array(instance.weights, dtype=np.int64)
    caps = np.array(instance.capacities, dtype=np.int64)
    return caps[None, :] - x @ w.T


def feasible_batch(instance: KnapsackInstance, x: np.ndarray) -> np.ndarray:
    return (residuals_batch(instance, x) >= 0).all(axis=1)


def path_probability(model: QtgModel, bits: str) -> float:
    """Exact probability of drawing the given assignment; 0 if unreachable.

    Forced branches contribute factor 1 when the bit is 0 and make the path
    impossible when it is 1. Accumulation moves to log space for large n to
    dodge underflow.
    """
    inst = model.instance
    check_bits(bits, inst.n)
    residuals = list(inst.capacities)
    use_log = inst.n > _LOG_SPACE_THRESHOLD
    acc = 0.0 if use_log else 1.0
    for j in model.item_order:
        bit = bits[j]
        forced = any(inst.weights[i][j] > residuals[i] for i in range(inst.d))
        if forced:
            if bit == "1":
                return 0.0
            continue
        p0, p1 = branch_probability(1 if model.incumbent[j] == "1" else 0, model.bias)
        factor = p1 if bit == "1" else p0
        if factor == 0.0:
            return 0.0
        if use_log:
            acc += math.log(factor)
        else:
            acc *= factor
        if bit == "1":
            for i in range(inst.d):
                residuals[i] -= inst.weights[i][j]
    return math.exp(acc) if use_log else acc


# ---------------------------------------------------------------------------
# exact enumeration over all assignments


def bits_to_code(bits: str) -> int:
    """Integer code of an assignment: item j maps to bit j of the code."""
    return int(bits[::-1], 2) if bits else 0


def code_to_bits(code: int, n: int) -> str:
    return format(code, f"0{n}b")[::-1] if n else ""


@lru_cache(maxsize=4)
def assignment_matrix(n: int) -> np.ndarray:
    """All 2**n assignments as a (2**n, n) uint8 matrix in code order."""
    if n > EXACT_ENUMERATION_LIMIT:
        raise LimitExceededError(
            f"exact enumeration is capped at n <= {EXACT_ENUMERATION_LIMIT}, got {n}"
        )
    codes = np.arange(1 << n, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n)) & 1).astype(np.uint8)


@lru_cache(maxsize=8)
def _profit_table(instance: KnapsackInstance) -> np.ndarray:
    return evaluate_profits_batch(instance, assignment_matrix(instance.n))


def path_distribution(model: QtgModel) -> np.ndarray:
    """Exact probability of every assignment, indexed by code.

    Infeasible assignments get 0. Only available up to the enumeration
    limit; the array sums to 1 (up to float accumulation).
    """
    return _distribution_table(model)


@lru_cache(maxsize=8)
def _distribution_table(model: QtgModel) -> np.ndarray:
    inst = model.instance
    n = inst.n
    x = assignment_matrix(n)
    weights, caps, order, inc = _model_arrays(model)
    prob = np.ones(1 << n, dtype=np.float64)
    resid = np.repeat(caps[:, None], 1 << n, axis=1)
    follow = model.follow_incumbent
    flip = None if follow else _flip_probability(model.bias)
    for j in order:
        xm = x[:, j].astype(bool)
        forced = (weights[:, j][:, None] > resid).any(axis=0)
        prob[forced & xm] = 0.0
        free = ~forced
        if follow:
            want = bool(inc[j])
            prob[free & (xm != want)] = 0.0
        else:
            p1 = 1.0 - flip if inc[j] else flip
            p0 = flip if inc[j] else 1.0 - flip
            prob[free & xm] *= p1
            prob[free & ~xm] *= p0
        resid[:, xm] -= weights[:, j][:, None]
    prob.setflags(write=False)
    return prob


@dataclass(frozen=True)
class SuccessMass:
    """Probability of drawing an assignment with profit above a threshold."""

    value: float
    std_error: float | None
    mode: str


def success_mass(
    model: QtgModel,
    threshold: int,
    mode: str = "auto",
    samples: int = DEFAULT_MC_SAMPLES,
    rng: np.random.Generator | None = None,
    exact_limit: int = EXACT_ENUMERATION_LIMIT,
) -> SuccessMass:
    """Mass of {assignment : profit > threshold} under the model.

    mode 'exact' enumerates all assignments (n <= exact_limit), 'monte-carlo'
    estimates from samples draws and reports a binomial standard error,
    'auto' picks exact when it is allowed.
    """
    if mode not in ("auto", "exact", "monte-carlo"):
        raise InputError(f"unknown success_mass mode {mode!r}")
    n = model.instance.n
    if mode == "auto":
        mode = "exact" if n <= min(exact_limit, EXACT_ENUMERATION_LIMIT) else "monte-carlo"
    if mode == "exact":
        if n > min(exact_limit, EXACT_ENUMERATION_LIMIT):
            raise LimitExceededError(
                f"exact success_mass is capped at n <= "
                f"{min(exact_limit, EXACT_ENUMERATION_LIMIT)}, got {n}"
            )
        prob = _distribution_table(model)
        profits = _profit_table(model.instance)
        return SuccessMass(value=float(prob[profits > threshold].sum()), std_error=None, mode="exact")
    if samples < 1:
        raise InputError(f"monte-carlo needs at least one sample, got {samples}")
    if rng is None:
        from .rng import substream

        rng = substream(0)
    x = sample_paths(model, samples, rng)
    profits = evaluate_profits_batch(model.instance, x)
    hits = int((profits > threshold).sum())
    p = hits / samples
    se = math.sqrt(max(p * (1.0 - p), 0.0) / samples)
    return SuccessMass(value=p, std_error=se, mode="monte-carlo")
