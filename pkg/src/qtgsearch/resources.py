"""Gate, depth and qubit estimates for the tree-based state preparation.

The accounting targets an idealized noiseless machine: single-qubit gates,
singly-controlled rotations and Toffolis all cost one gate and one cycle,
gates on disjoint qubits share a cycle, and multi-controlled operations may
lean on a shared ancilla pool. Constant additions run in Fourier space
(quantum Fourier transform sandwiches around controlled-rotation cascades);
comparisons are two's-complement subtract / check sign / uncompute blocks.

Three schedule variants are estimated for the same circuit:

* ``interleaved``: every profit addition, including each pair synergy,
  is its own fully sandwiched sequential block inside its item layer,
* ``deferred``: pair synergy additions are appended after the item loop
  under one shared Fourier sandwich,
* ``parallel-tree``: synergies are loaded into ancilla registers and summed
  by a balanced pairwise-addition tree, comparisons use fan-out copies of
  the capacity register, and items before the break item (whose prefixes
  always fit) skip their comparison entirely.

Gate counts are schedule-invariant by convention: they charge the canonical
per-operation costs, so interleaved and deferred always agree on gates and
differ only in depth. Ancilla cleanup belongs to the inverse state
preparation, which amplitude amplification charges separately, so estimates
cover the forward pass.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, fields

from .baseline import default_item_order
from .instances import (
    InputError,
    KnapsackInstance,
    ProblemKind,
    ValidationError,
    numbits,
    profit_upper_bound,
)

VARIANTS = ("interleaved", "deferred", "parallel-tree")


def _ceil_log2(k: int) -> int:
    return 0 if k <= 1 else (k - 1).bit_length()


@dataclass(frozen=True)
class CostModel:
    """Primitive cost table; every cost is a positive integer of cycles/gates.

    fanout_ancillas toggles logarithmic-depth control fan-out for adder
    cascades (never applied when it would not help). pairwise_tree gates the
    parallel synergy tree; with it off the parallel-tree variant degrades to
    the deferred schedule for profits.
    """

    fanout_ancillas: bool = True
    pairwise_tree: bool = True
    measurement_cycles: int = 1
    pairwise_add_gates_per_bit: int = 5
    pairwise_add_depth_per_bit: int = 2
    pairwise_add_depth_base: int = 3

    def __post_init__(self):
        for name in (
            "measurement_cycles",
            "pairwise_add_gates_per_bit",
            "pairwise_add_depth_per_bit",
            "pairwise_add_depth_base",
        ):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValidationError(f"{name} must be a positive integer, got {value!r}")

    # -- Fourier-space arithmetic -----------------------------------------

    def qft_gates(self, k: int) -> int:
        return k * (k + 1) // 2

    def qft_depth(self, k: int) -> int:
        return 2 * k - 1

    def cadd_gates(self, k: int) -> int:
        """Controlled constant addition on a k-bit Fourier register."""
        return k

    def cadd_depth(self, k: int) -> int:
        if self.fanout_ancillas:
            return min(k, 2 * _ceil_log2(k) + 1)
        return k

    def ccadd_gates(self, k: int) -> int:
        """Doubly controlled constant addition: Toffoli compiles the pair."""
        return self.cadd_gates(k) + 2

    def ccadd_depth(self, k: int) -> int:
        return self.cadd_depth(k) + 2

    def add_block_gates(self, k: int) -> int:
        """Controlled addition with its own Fourier sandwich."""
        return 2 * self.qft_gates(k) + self.cadd_gates(k)

    def add_block_depth(self, k: int) -> int:
        return 2 * self.qft_depth(k) + self.cadd_depth(k)

    def doubly_controlled_adder_gates(self, k: int) -> int:
        """Canonical gate price of one pair-synergy addition (with sandwich)."""
        return 2 * self.qft_gates(k) + self.ccadd_gates(k)

    def doubly_controlled_adder_depth(self, k: int) -> int:
        return 2 * self.qft_depth(k) + self.ccadd_depth(k)

    # -- comparison --------------------------------------------------------

    def comparator_gates(self, k: int) -> int:
        """Compare a k-bit register against a constant and uncompute.

        Subtract in Fourier space over k+1 bits (one sign qubit), read the
        sign, add the constant back.
        """
        return 2 * (2 * self.qft_gates(k + 1) + (k + 1))

    def comparator_depth(self, k: int) -> int:
        return 2 * (2 * self.qft_depth(k + 1) + 1)

    def fanout_comparator_gates(self, k: int) -> int:
        """Comparison against fan-out copies of the register: extra copy CNOTs."""
        return self.comparator_gates(k) + 2 * k * k

    def fanout_comparator_depth(self, k: int) -> int:
        return 2 * _ceil_log2(k) + 3

    def and_tree_gates(self, d: int) -> int:
        """Conjunction of d comparison flags (compute and uncompute)."""
        return 0 if d < 2 else 2 * (d - 1)

    def and_tree_depth(self, d: int) -> int:
        return 0 if d < 2 else 2 * _ceil_log2(d)

    # -- register-register addition for the synergy tree -------------------

    def pairwise_add_gates(self, k: int) -> int:
        return self.pairwise_add_gates_per_bit * k

    def pairwise_add_depth(self, k: int) -> int:
        return self.pairwise_add_depth_per_bit * k + self.pairwise_add_depth_base

    def load_pair_gates(self, k: int) -> int:
        """Conditionally write a constant into a fresh ancilla register."""
        return k + 2

    # -- amplification-side primitives -------------------------------------

    def oracle_cycles(self, profit_bits: int) -> int:
        """Threshold test on the profit register: one comparator."""
        return self.comparator_depth(profit_bits)

    def reflection_cycles(self, qubits: int) -> int:
        """Reflection about the prepared state's zero string."""
        return 2 * _ceil_log2(qubits) + 1


DEFAULT_COST_MODEL = CostModel()


def load_cost_model(path: str | os.PathLike) -> CostModel:
    """Read a cost model from a TOML key-value table.

    Keys must be CostModel field names; unknown keys are an error so typos
    do not silently fall back to defaults.
    """
    try:
        import tomllib as toml
    except ModuleNotFoundError:  # pragma: no cover - 3.10 fallback
        import tomli as toml
    with open(os.fspath(path), "rb") as fh:
        data = toml.load(fh)
    known = {f.name for f in fields(CostModel)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ValidationError(
            f"unknown cost model keys {unknown}; known keys: {sorted(known)}"
        )
    return CostModel(**data)


# ---------------------------------------------------------------------------
# qubit formulas


def qubit_count_qkp(n: int, capacity: int, profit_bound: int) -> int:
    """Path + capacity + profit registers plus the shared work register."""
    kc = numbits(capacity)
    kp = numbits(profit_bound)
    return n + kc + kp + max(n, kc, kp)


def qubit_count_mdkp(n: int, capacities, profit_bound: int) -> int:
    """As for QKP but with one capacity register per dimension and one
    extra work qubit for the d-way comparison flag."""
    kc_sum = sum(numbits(c) for c in capacities)
    kp = numbits(profit_bound)
    return n + kc_sum + kp + max(n, kc_sum + 1, kp)


def break_item(
    instance: KnapsackInstance,
    item_order=None,
    per_dimension: bool = False,
):
    """First 1-based position whose weight prefix exceeds capacity.

    Every assignment supported on the positions before it is automatically
    feasible, which is what lets the parallel-tree schedule drop their
    comparisons. Computed along item_order (default: the given item
    labeling). MDKP requires per_dimension=True and returns one break
    position per dimension.
    """
    if instance.kind is ProblemKind.MDKP and not per_dimension:
        raise InputError(
            "break_item on a multidimensional instance needs per_dimension=True "
            "(one break position per constraint)"
        )
    order = tuple(item_order) if item_order is not None else tuple(range(instance.n))
    if sorted(order) != list(range(instance.n)):
        raise InputError(f"item_order must be a permutation of 0..{instance.n - 1}")
    positions = []
    for i in range(instance.d):
        total = 0
        position = None
        for h, j in enumerate(order, start=1):
            total += instance.weights[i][j]
            if total > instance.capacities[i]:
                position = h
                break
        if position is None:
            raise ValidationError(
                f"dimension {i}: all items together fit capacity "
                f"{instance.capacities[i]}; instance is not normalized"
            )
        positions.append(position)
    if per_dimension:
        return tuple(positions)
    return positions[0]


# ---------------------------------------------------------------------------
# estimates


@dataclass(frozen=True)
class LayerCost:
    gates: int = 0
    depth: int = 0

    def __add__(self, other: "LayerCost") -> "LayerCost":
        return LayerCost(self.gates + other.gates, self.depth + other.depth)


@dataclass(frozen=True)
class ResourceEstimate:
    instance_name: str
    kind: ProblemKind
    variant: str
    n: int
    d: int
    capacity_bits: tuple[int, ...]
    profit_bits: int
    profit_bound: int
    qubits: int
    ancilla_qubits: int
    gates: int
    qtg_depth_cycles: int
    grover_iteration_cycles: int
    breakdown: dict[str, LayerCost] = field(compare=False)
    break_positions: tuple[int, ...] = ()
    synergy_pairs: int = 0

    def to_json_dict(self) -> dict:
        return {
            "instance": self.instance_name,
            "kind": self.kind.value,
            "variant": self.variant,
            "n": self.n,
            "d": self.d,
            "capacity_bits": list(self.capacity_bits),
            "profit_bits": self.profit_bits,
            "profit_bound": self.profit_bound,
            "qubits": self.qubits,
            "ancilla_qubits": self.ancilla_qubits,
            "gates": self.gates,
            "qtg_depth_cycles": self.qtg_depth_cycles,
            "grover_iteration_cycles": self.grover_iteration_cycles,
            "breakdown": {
                name: {"gates": cost.gates, "depth": cost.depth}
                for name, cost in sorted(self.breakdown.items())
            },
            "break_positions": list(self.break_positions),
            "synergy_pairs": self.synergy_pairs,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"


def _synergy_pairs_by_position(instance: KnapsackInstance, order) -> list[int]:
    """Count of earlier-placed nonzero synergy partners per tree position."""
    if instance.kind is not ProblemKind.QKP:
        return [0] * instance.n
    placed: list[int] = []
    counts = []
    for j in order:
        counts.append(sum(1 for jp in placed if instance.pair_profit(j, jp) > 0))
        placed.append(j)
    return counts


def estimate_qtg(
    instance: KnapsackInstance,
    cost_model: CostModel = DEFAULT_COST_MODEL,
    variant: str = "parallel-tree",
    profit_bound: int | None = None,
    item_order=None,
) -> ResourceEstimate:
    """Resources of one forward state preparation under the chosen schedule.

    profit_bound overrides the automatic bound so that structurally related
    instances can be compared on identical register sizes.
    """
    if variant not in VARIANTS:
        raise InputError(f"unknown variant {variant!r}, expected one of {VARIANTS}")
    cm = cost_model
    order = tuple(item_order) if item_order is not None else default_item_order(instance)
    if sorted(order) != list(range(instance.n)):
        raise InputError(f"item_order must be a permutation of 0..{instance.n - 1}")
    bound = int(profit_bound) if profit_bound is not None else int(profit_upper_bound(instance))
    if bound < 1:
        raise InputError(f"profit bound must be positive, got {bound}")
    kp = numbits(bound)
    kcs = tuple(numbits(c) for c in instance.capacities)
    n = instance.n
    d = instance.d
    qkp = instance.kind is ProblemKind.QKP

    try:
        break_positions = break_item(instance, item_order=order, per_dimension=True)
    except ValidationError:
        # non-normalized toy instance: no position is comparison-free
        break_positions = tuple(0 for _ in range(d))
    skip_before = min(break_positions) if all(b > 0 for b in break_positions) else 0

    use_tree = variant == "parallel-tree" and cm.pairwise_tree
    use_fanout_compare = variant == "parallel-tree" and cm.fanout_ancillas
    skip_comparisons = variant == "parallel-tree"

    # -- U1: comparison-controlled branching -------------------------------
    u1 = LayerCost()
    for t in range(1, n + 1):
        if skip_comparisons and t < skip_before:
            u1 += LayerCost(gates=1, depth=1)  # unconditional branch rotation
            continue
        if use_fanout_compare:
            comp_gates = sum(cm.fanout_comparator_gates(kc) for kc in kcs)
            comp_depth = max(cm.fanout_comparator_depth(kc) for kc in kcs)
        else:
            comp_gates = sum(cm.comparator_gates(kc) for kc in kcs)
            comp_depth = max(cm.comparator_depth(kc) for kc in kcs)
        u1 += LayerCost(
            gates=comp_gates + cm.and_tree_gates(d) + 1,
            depth=comp_depth + cm.and_tree_depth(d) + 1,
        )

    # -- U2: controlled capacity subtraction, parallel across dimensions ---
    per_item_u2 = LayerCost(
        gates=sum(cm.add_block_gates(kc) for kc in kcs),
        depth=max(cm.add_block_depth(kc) for kc in kcs),
    )
    u2 = LayerCost(per_item_u2.gates * n, per_item_u2.depth * n)

    # -- U3: profit additions ----------------------------------------------
    linear_terms = sum(1 for m in range(n) if instance.linear_profit(m) > 0)
    u3 = LayerCost(
        gates=linear_terms * cm.add_block_gates(kp),
        depth=linear_terms * cm.add_block_depth(kp),
    )
    pair_counts = _synergy_pairs_by_position(instance, order)
    total_pairs = sum(pair_counts)
    tree_ancillas = 0
    if qkp and total_pairs:
        if use_tree:
            depth = 2  # pair-AND layer plus conditional constant loads
            depth += (_ceil_log2(total_pairs) + 1) * cm.pairwise_add_depth(kp)
            gates = total_pairs * (cm.load_pair_gates(kp) + cm.pairwise_add_gates(kp))
            tree_ancillas = total_pairs * (kp + 1)
            u3 += LayerCost(gates=gates, depth=depth)
        else:
            gates = total_pairs * cm.doubly_controlled_adder_gates(kp)
            if variant == "interleaved":
                depth = total_pairs * cm.doubly_controlled_adder_depth(kp)
            else:  # deferred, or parallel-tree with the tree switched off
                depth = 2 * cm.qft_depth(kp) + total_pairs * cm.ccadd_depth(kp)
            u3 += LayerCost(gates=gates, depth=depth)

    breakdown = {"u1": u1, "u2": u2, "u3": u3}
    total = u1 + u2 + u3

    if qkp:
        qubits = qubit_count_qkp(n, instance.capacities[0], bound)
    else:
        qubits = qubit_count_mdkp(n, instance.capacities, bound)
    ancilla = tree_ancillas
    if use_fanout_compare:
        ancilla += sum(kc * kc for kc in kcs)

    estimate = ResourceEstimate(
        instance_name=instance.name,
        kind=instance.kind,
        variant=variant,
        n=n,
        d=d,
        capacity_bits=kcs,
        profit_bits=kp,
        profit_bound=bound,
        qubits=qubits,
        ancilla_qubits=ancilla,
        gates=total.gates,
        qtg_depth_cycles=total.depth,
        grover_iteration_cycles=0,
        breakdown=breakdown,
        break_positions=break_positions,
        synergy_pairs=total_pairs,
    )
    return _with_iteration_cycles(estimate, cm)


def grover_iteration_cost(estimate: ResourceEstimate, cost_model: CostModel = DEFAULT_COST_MODEL) -> int:
    """Cycles of one amplification iteration.

    Two state preparations (forward and inverse), the threshold oracle on
    the profit register, and the reflection about the initial state.
    """
    return (
        2 * estimate.qtg_depth_cycles
        + cost_model.oracle_cycles(estimate.profit_bits)
        + cost_model.reflection_cycles(estimate.qubits)
    )


def _with_iteration_cycles(estimate: ResourceEstimate, cm: CostModel) -> ResourceEstimate:
    from dataclasses import replace

    return replace(estimate, grover_iteration_cycles=grover_iteration_cost(estimate, cm))
