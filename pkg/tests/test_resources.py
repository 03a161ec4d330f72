import dataclasses

import numpy as np
import pytest

from qtgsearch import (
    CostModel,
    DEFAULT_COST_MODEL,
    InputError,
    KnapsackInstance,
    ValidationError,
    break_item,
    estimate_qtg,
    grover_iteration_cost,
    load_cost_model,
    qubit_count_mdkp,
    qubit_count_qkp,
)
from qtgsearch.sampler import assignment_matrix, feasible_batch
from helpers import random_mdkp, random_qkp


def bl(x: int) -> int:
    # independent bit-length used as the substitution oracle
    return len(bin(x)) - 2 if x > 0 else 0


def test_qubit_count_qkp_examples():
    assert qubit_count_qkp(4, 10, 100) == 22
    assert qubit_count_qkp(8, 1, 1) == 18
    for k in range(1, 9):
        assert qubit_count_qkp(k, (1 << k) - 1, (1 << k) - 1) == 4 * k


def test_qubit_count_mdkp_examples():
    assert qubit_count_mdkp(4, (10, 10), 100) == 28
    assert qubit_count_mdkp(4, (10,), 100) == 22
    assert qubit_count_mdkp(32, (1, 1), 1) == 32 + 2 + 1 + 32


def test_qubit_formulas_match_substitution():
    rng = np.random.default_rng(8)
    for _ in range(40):
        n = int(rng.integers(1, 300))
        c = int(rng.integers(1, 10**6))
        P = int(rng.integers(1, 10**9))
        assert qubit_count_qkp(n, c, P) == n + bl(c) + bl(P) + max(n, bl(c), bl(P))
        caps = tuple(int(x) for x in rng.integers(1, 10**6, size=int(rng.integers(1, 6))))
        s = sum(bl(x) for x in caps)
        assert qubit_count_mdkp(n, caps, P) == n + s + bl(P) + max(n, s + 1, bl(P))


def test_break_item_examples():
    inst = KnapsackInstance.qkp("b", (3, 4, 5), 7, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    assert break_item(inst) == 3
    two = KnapsackInstance.qkp("b2", (4, 4), 7, ((1, 0), (0, 1)))
    assert break_item(two) == 2


def test_break_item_respects_order():
    inst = KnapsackInstance.qkp("bo", (5, 4, 3), 7, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    assert break_item(inst, item_order=(0, 1, 2)) == 2  # prefixes 5, 9
    assert break_item(inst, item_order=(2, 1, 0)) == 3  # prefixes 3, 7, 12


def test_break_item_mdkp_needs_flag():
    inst = KnapsackInstance.mdkp("bm", ((3, 4), (2, 2)), (5, 3), (1, 1))
    with pytest.raises(InputError):
        break_item(inst)
    assert break_item(inst, per_dimension=True) == (2, 2)


def test_break_item_rejects_non_normalized():
    toy = KnapsackInstance.qkp("toy", (1, 1), 2, ((3, 1), (1, 4)))
    with pytest.raises(ValidationError):
        break_item(toy)


def test_break_item_at_least_two_and_prefix_feasible():
    rng = np.random.default_rng(12)
    for _ in range(15):
        inst = random_qkp(rng, int(rng.integers(2, 11)))
        order = tuple(np.argsort(rng.random(inst.n)))
        b = break_item(inst, item_order=order)
        assert b >= 2
        # every assignment supported on the first b-1 order positions fits
        prefix = order[: b - 1]
        x = assignment_matrix(len(prefix))
        full = np.zeros((x.shape[0], inst.n), dtype=np.uint8)
        full[:, list(prefix)] = x
        assert feasible_batch(inst, full).all()


def dense_qkp(rng, n):
    return random_qkp(rng, n, pair_density=1.0)


def test_variant_gate_counts_equal_interleaved_deferred():
    rng = np.random.default_rng(77)
    for _ in range(10):
        inst = dense_qkp(rng, int(rng.integers(6, 13)))
        a = estimate_qtg(inst, variant="interleaved")
        b = estimate_qtg(inst, variant="deferred")
        assert a.gates == b.gates
        assert a.qtg_depth_cycles >= b.qtg_depth_cycles


def test_depth_ordering_across_variants():
    rng = np.random.default_rng(78)
    for _ in range(10):
        inst = dense_qkp(rng, int(rng.integers(6, 13)))
        tree = estimate_qtg(inst, variant="parallel-tree")
        deferred = estimate_qtg(inst, variant="deferred")
        seq = estimate_qtg(inst, variant="interleaved")
        assert tree.qtg_depth_cycles <= deferred.qtg_depth_cycles <= seq.qtg_depth_cycles


def test_qkp_minus_kp_delta_is_pair_adders():
    rng = np.random.default_rng(79)
    cm = DEFAULT_COST_MODEL
    for _ in range(10):
        inst = dense_qkp(rng, int(rng.integers(6, 11)))
        n = inst.n
        kp_twin = KnapsackInstance.qkp(
            "twin",
            inst.weights[0],
            inst.capacities[0],
            tuple(
                tuple(inst.profits[m][m] if m == mp else 0 for mp in range(n))
                for m in range(n)
            ),
        )
        for variant in ("interleaved", "deferred"):
            full = estimate_qtg(inst, variant=variant, profit_bound=1000)
            bare = estimate_qtg(kp_twin, variant=variant, profit_bound=1000)
            pairs = n * (n - 1) // 2
            assert full.synergy_pairs == pairs
            assert full.gates - bare.gates == pairs * cm.doubly_controlled_adder_gates(
                full.profit_bits
            )


def test_mdkp_d1_matches_single_dimension_layout():
    rng = np.random.default_rng(80)
    md = random_mdkp(rng, 7, 1, name="md1")
    kp = KnapsackInstance.qkp(
        "kp1",
        md.weights[0],
        md.capacities[0],
        tuple(
            tuple(md.profits[m] if m == mp else 0 for mp in range(7)) for m in range(7)
        ),
    )
    a = estimate_qtg(md, profit_bound=500, item_order=tuple(range(7)))
    b = estimate_qtg(kp, profit_bound=500, item_order=tuple(range(7)))
    for stage in ("u1", "u2", "u3"):
        assert a.breakdown[stage] == b.breakdown[stage]
    assert a.gates == b.gates and a.qtg_depth_cycles == b.qtg_depth_cycles
    assert a.qubits == qubit_count_mdkp(7, md.capacities, 500)
    assert b.qubits == qubit_count_qkp(7, md.capacities[0], 500)


def test_gates_dominate_depth():
    rng = np.random.default_rng(81)
    for _ in range(8):
        if rng.random() < 0.5:
            inst = random_qkp(rng, int(rng.integers(2, 11)))
        else:
            inst = random_mdkp(rng, int(rng.integers(2, 11)), int(rng.integers(1, 4)))
        for variant in ("interleaved", "deferred", "parallel-tree"):
            est = estimate_qtg(inst, variant=variant)
            assert est.gates >= est.qtg_depth_cycles
            for cost in est.breakdown.values():
                assert cost.gates >= cost.depth >= 0


def test_adding_item_never_decreases_counts():
    rng = np.random.default_rng(82)
    for _ in range(10):
        inst = random_qkp(rng, int(rng.integers(3, 9)))
        n = inst.n
        w_new = int(rng.integers(1, min(inst.capacities[0], 30) + 1))
        diag = int(rng.integers(0, 20))
        grown = KnapsackInstance.qkp(
            "grown",
            inst.weights[0] + (w_new,),
            inst.capacities[0],
            tuple(
                tuple(row) + (0,) for row in inst.profits
            )
            + ((0,) * n + (diag,),),
        )
        for variant in ("interleaved", "parallel-tree"):
            small = estimate_qtg(inst, variant=variant)
            big = estimate_qtg(grown, variant=variant)
            assert big.gates >= small.gates
            assert big.qtg_depth_cycles >= small.qtg_depth_cycles
            assert big.qubits >= small.qubits


def test_adding_pair_profit_never_decreases_gates():
    rng = np.random.default_rng(83)
    inst = random_qkp(rng, 8, pair_density=0.3)
    zeros = [
        (m, mp)
        for m in range(8)
        for mp in range(m + 1, 8)
        if inst.profits[m][mp] == 0
    ]
    assert zeros, "fixture needs a zero pair"
    m, mp = zeros[0]
    profits = [list(row) for row in inst.profits]
    profits[m][mp] = profits[mp][m] = 5
    richer = KnapsackInstance.qkp(
        "richer", inst.weights[0], inst.capacities[0], tuple(tuple(r) for r in profits)
    )
    for variant in ("interleaved", "deferred", "parallel-tree"):
        assert (
            estimate_qtg(richer, variant=variant).gates
            >= estimate_qtg(inst, variant=variant).gates
        )


def test_disabling_flags_never_decreases_depth_on_dense():
    rng = np.random.default_rng(84)
    for _ in range(5):
        inst = dense_qkp(rng, int(rng.integers(6, 12)))
        base = estimate_qtg(inst, variant="parallel-tree")
        no_fanout = estimate_qtg(
            inst, cost_model=CostModel(fanout_ancillas=False), variant="parallel-tree"
        )
        no_tree = estimate_qtg(
            inst, cost_model=CostModel(pairwise_tree=False), variant="parallel-tree"
        )
        assert no_fanout.qtg_depth_cycles >= base.qtg_depth_cycles
        assert no_tree.qtg_depth_cycles >= base.qtg_depth_cycles
        assert no_fanout.ancilla_qubits <= base.ancilla_qubits
        assert no_tree.ancilla_qubits <= base.ancilla_qubits


def test_estimate_pure_function():
    rng = np.random.default_rng(85)
    inst = random_qkp(rng, 7)
    a = estimate_qtg(inst)
    b = estimate_qtg(inst)
    assert a == b and a.to_json() == b.to_json()


def test_break_positions_reported():
    rng = np.random.default_rng(86)
    inst = random_qkp(rng, 6)
    est = estimate_qtg(inst)
    from qtgsearch.baseline import default_item_order

    assert est.break_positions == break_item(
        inst, item_order=default_item_order(inst), per_dimension=True
    )


def test_iteration_cost_linearity_and_floor():
    rng = np.random.default_rng(87)
    inst = random_qkp(rng, 6)
    est = estimate_qtg(inst)
    doubled = dataclasses.replace(est, qtg_depth_cycles=2 * est.qtg_depth_cycles)
    delta = est.qtg_depth_cycles
    assert grover_iteration_cost(doubled) - grover_iteration_cost(est) == 2 * delta
    assert est.grover_iteration_cycles > est.qtg_depth_cycles
    cm = DEFAULT_COST_MODEL
    assert est.grover_iteration_cycles == (
        2 * est.qtg_depth_cycles
        + cm.comparator_depth(est.profit_bits)
        + cm.reflection_cycles(est.qubits)
    )


def test_cost_model_toml_round_trip(tmp_path):
    path = tmp_path / "cm.toml"
    path.write_text(
        "fanout_ancillas = false\nmeasurement_cycles = 3\n"
        "pairwise_add_gates_per_bit = 7\n",
        encoding="utf-8",
    )
    cm = load_cost_model(path)
    assert cm.fanout_ancillas is False
    assert cm.measurement_cycles == 3
    assert cm.pairwise_add_gates_per_bit == 7
    assert cm.pairwise_tree is True


def test_cost_model_unknown_key_rejected(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("measurment_cycles = 3\n", encoding="utf-8")
    with pytest.raises(ValidationError) as err:
        load_cost_model(path)
    assert "measurment_cycles" in str(err.value)


def test_cost_model_validates_fields():
    with pytest.raises(ValidationError):
        CostModel(measurement_cycles=0)


def test_unknown_variant_rejected():
    rng = np.random.default_rng(88)
    inst = random_qkp(rng, 4)
    with pytest.raises(InputError):
        estimate_qtg(inst, variant="zigzag")
