"""Problem instances for 0-1 knapsack variants.

Two kinds are supported:

* quadratic knapsack (QKP): one capacity constraint, an n x n symmetric
  profit matrix whose diagonal holds linear profits and whose off-diagonal
  entries are pairwise synergies counted once per ordered pair,
* multidimensional knapsack (MDKP): d capacity constraints, linear profits.

All numeric data is kept as exact Python integers. Instances are immutable
and hashable so downstream caches can key on them directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence


class ProblemKind(str, Enum):
    QKP = "qkp"
    MDKP = "mdkp"


class InputError(ValueError):
    """An argument to an operation is malformed (wrong length, bad range)."""


class ValidationError(ValueError):
    """Instance or trace data violates a structural requirement."""


class LimitExceededError(InputError):
    """A deliberately bounded exact computation was asked to exceed its bound."""


def numbits(x: int) -> int:
    """Number of bits needed to store the nonnegative integer x.

    Equals ceil(log2(x + 1)); zero for x == 0.
    """
    if x < 0:
        raise InputError(f"numbits requires a nonnegative integer, got {x}")
    return int(x).bit_length()


def _as_int(value, what: str) -> int:
    # bool is an int subclass; reject it so True never sneaks in as 1
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{what} must be an integer, got {value!r}")
    return value


def check_bits(bits: str, n: int) -> str:
    """Validate an assignment string: exactly n characters, each 0 or 1."""
    if not isinstance(bits, str):
        raise InputError(f"bits must be a string of 0/1, got {type(bits).__name__}")
    if len(bits) != n:
        raise InputError(f"bits has length {len(bits)}, instance has {n} items")
    if bits.strip("01"):
        raise InputError(f"bits may contain only 0 and 1: {bits!r}")
    return bits


@dataclass(frozen=True)
class ProfitBound:
    """Upper bound on the achievable profit, used to size the profit register."""

    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValidationError(f"profit bound must be nonnegative, got {self.value}")

    def __int__(self) -> int:
        return self.value


@dataclass(frozen=True)
class KnapsackInstance:
    """An immutable 0-1 knapsack instance of either kind.

    weights[i][m] is the weight of item m in dimension i. For QKP d == 1 and
    profits is an n x n symmetric matrix; for MDKP profits is a length-n
    vector. known_optimum carries an externally supplied optimal profit when
    a source file provides one (0 sentinels are mapped to None by parsers).
    """

    name: str
    kind: ProblemKind
    n: int
    d: int
    capacities: tuple[int, ...]
    weights: tuple[tuple[int, ...], ...]
    profits: tuple
    known_optimum: int | None = field(default=None)

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"instance needs at least one item, got n={self.n}")
        if self.d < 1:
            raise ValidationError(f"instance needs at least one dimension, got d={self.d}")
        if self.kind is ProblemKind.QKP and self.d != 1:
            raise ValidationError(f"QKP instances are single-dimensional, got d={self.d}")
        if len(self.capacities) != self.d:
            raise ValidationError(
                f"expected {self.d} capacities, got {len(self.capacities)}"
            )
        if len(self.weights) != self.d:
            raise ValidationError(f"expected {self.d} weight rows, got {len(self.weights)}")
        for i, c in enumerate(self.capacities):
            _as_int(c, f"capacity[{i}]")
            if c < 1:
                raise ValidationError(f"capacity[{i}] must be positive, got {c}")
        for i, row in enumerate(self.weights):
            if len(row) != self.n:
                raise ValidationError(
                    f"weight row {i} has {len(row)} entries, expected {self.n}"
                )
            for m, w in enumerate(row):
                _as_int(w, f"weight[{i}][{m}]")
                if w < 0:
                    raise ValidationError(f"weight[{i}][{m}] must be nonnegative, got {w}")
                if w > self.capacities[i]:
                    raise ValidationError(
                        f"weight[{i}][{m}]={w} exceeds capacity[{i}]={self.capacities[i]}; "
                        "items that can never be packed are rejected"
                    )
        if self.kind is ProblemKind.QKP:
            if len(self.profits) != self.n:
                raise ValidationError(
                    f"profit matrix has {len(self.profits)} rows, expected {self.n}"
                )
            for m, row in enumerate(self.profits):
                if len(row) != self.n:
                    raise ValidationError(
                        f"profit matrix row {m} has {len(row)} entries, expected {self.n}"
                    )
                for mp, p in enumerate(row):
                    _as_int(p, f"profit[{m}][{mp}]")
                    if p < 0:
                        raise ValidationError(
                            f"profit[{m}][{mp}] must be nonnegative, got {p}"
                        )
            for m in range(self.n):
                for mp in range(m + 1, self.n):
                    if self.profits[m][mp] != self.profits[mp][m]:
                        raise ValidationError(
                            f"profit matrix must be symmetric: "
                            f"p[{m}][{mp}]={self.profits[m][mp]} != "
                            f"p[{mp}][{m}]={self.profits[mp][m]}"
                        )
        else:
            if len(self.profits) != self.n:
                raise ValidationError(
                    f"profit vector has {len(self.profits)} entries, expected {self.n}"
                )
            for m, p in enumerate(self.profits):
                _as_int(p, f"profit[{m}]")
                if p < 0:
                    raise ValidationError(f"profit[{m}] must be nonnegative, got {p}")
        if self.known_optimum is not None:
            _as_int(self.known_optimum, "known_optimum")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def qkp(
        name: str,
        weights: Sequence[int],
        capacity: int,
        profit_matrix: Sequence[Sequence[int]],
        known_optimum: int | None = None,
    ) -> "KnapsackInstance":
        return KnapsackInstance(
            name=name,
            kind=ProblemKind.QKP,
            n=len(weights),
            d=1,
            capacities=(int(capacity),),
            weights=(tuple(int(w) for w in weights),),
            profits=tuple(tuple(int(p) for p in row) for row in profit_matrix),
            known_optimum=known_optimum,
        )

    @staticmethod
    def mdkp(
        name: str,
        weights: Sequence[Sequence[int]],
        capacities: Sequence[int],
        profits: Sequence[int],
        known_optimum: int | None = None,
    ) -> "KnapsackInstance":
        weights = tuple(tuple(int(w) for w in row) for row in weights)
        n = len(weights[0]) if weights else 0
        return KnapsackInstance(
            name=name,
            kind=ProblemKind.MDKP,
            n=n,
            d=len(weights),
            capacities=tuple(int(c) for c in capacities),
            weights=weights,
            profits=tuple(int(p) for p in profits),
            known_optimum=known_optimum,
        )

    # -- derived views -----------------------------------------------------

    def linear_profit(self, m: int) -> int:
        """Profit of selecting item m alone."""
        if self.kind is ProblemKind.QKP:
            return self.profits[m][m]
        return self.profits[m]

    def pair_profit(self, m: int, mp: int) -> int:
        """Combined synergy of the unordered pair {m, mp}: p[m][mp] + p[mp][m]."""
        if self.kind is not ProblemKind.QKP or m == mp:
            return 0
        return self.profits[m][mp] + self.profits[mp][m]

    def normalization_violations(self) -> list[str]:
        """Check the nontrivial-instance condition max w <= c < sum w per dimension.

        The upper half (no single item exceeds capacity) is already enforced
        at construction; this reports dimensions whose capacity admits every
        item at once, which would make the search trivial. Parsers treat any
        violation as a validation error; hand-built toy instances may skip it.
        """
        out = []
        for i in range(self.d):
            total = sum(self.weights[i])
            if self.capacities[i] >= total:
                out.append(
                    f"capacity[{i}]={self.capacities[i]} admits all items "
                    f"(total weight {total}); expected capacity < total"
                )
        return out


def evaluate_profit(instance: KnapsackInstance, bits: str) -> int:
    """Objective value of an assignment.

    QKP: sum of p[m][m] over selected items plus p[m][mp] for every ordered
    pair of distinct selected items. MDKP: sum of selected linear profits.
    """
    check_bits(bits, instance.n)
    selected = [m for m, b in enumerate(bits) if b == "1"]
    if instance.kind is ProblemKind.MDKP:
        return sum(instance.profits[m] for m in selected)
    total = sum(instance.profits[m][m] for m in selected)
    for a in range(len(selected)):
        for b in range(a + 1, len(selected)):
            m, mp = selected[a], selected[b]
            total += instance.profits[m][mp] + instance.profits[mp][m]
    return total


def check_feasible(instance: KnapsackInstance, bits: str) -> tuple[bool, tuple[int, ...]]:
    """Whether the assignment fits every capacity, plus per-dimension residuals.

    Residuals are capacity minus packed weight and may be negative exactly
    when the assignment is infeasible.
    """
    check_bits(bits, instance.n)
    residuals = []
    for i in range(instance.d):
        used = sum(w for w, b in zip(instance.weights[i], bits) if b == "1")
        residuals.append(instance.capacities[i] - used)
    return all(r >= 0 for r in residuals), tuple(residuals)


def profit_upper_bound(instance: KnapsackInstance) -> ProfitBound:
    """Sum of every nonnegative profit term: selecting all items at once.

    Loose but cheap; it only has to dominate every feasible profit so that
    the profit register can hold any reachable value.
    """
    if instance.kind is ProblemKind.MDKP:
        value = sum(instance.profits)
    else:
        value = sum(sum(row) for row in instance.profits)
    return ProfitBound(max(value, 1))


@dataclass(frozen=True)
class Solution:
    """A complete 0/1 assignment with cached profit and residual capacities.

    Corresponds to one root-to-leaf path of the item decision tree. The
    cached fields must match a fresh evaluation of bits; from_bits is the
    safe way to build one.
    """

    bits: str
    profit: int
    residuals: tuple[int, ...]

    @property
    def feasible(self) -> bool:
        return all(r >= 0 for r in self.residuals)

    @staticmethod
    def from_bits(instance: KnapsackInstance, bits: str) -> "Solution":
        ok, residuals = check_feasible(instance, bits)
        return Solution(bits=bits, profit=evaluate_profit(instance, bits), residuals=residuals)

    def validate(self, instance: KnapsackInstance) -> None:
        ok, residuals = check_feasible(instance, self.bits)
        if residuals != self.residuals:
            raise ValidationError(
                f"cached residuals {self.residuals} disagree with recomputation {residuals}"
            )
        profit = evaluate_profit(instance, self.bits)
        if profit != self.profit:
            raise ValidationError(
                f"cached profit {self.profit} disagrees with recomputation {profit}"
            )
