import math

import numpy as np
import pytest

from qtgsearch import (
    FOLLOW_INCUMBENT,
    InputError,
    KnapsackInstance,
    QtgModel,
    ValidationError,
    bias_for_distance,
    branch_probability,
    path_distribution,
    path_probability,
    sample_path,
    sample_paths,
    substream,
    success_mass,
)
from qtgsearch.sampler import bits_to_code, code_to_bits, feasible_batch
from helpers import brute_force_tree_distribution, random_instance

TWO = KnapsackInstance.qkp("two", (5, 5), 7, ((10, 0), (0, 9)))


def model_00(bias: float) -> QtgModel:
    return QtgModel.for_instance(TWO, incumbent="00", bias=bias, item_order=(0, 1))


def test_branch_probability_hadamard_is_exact():
    assert branch_probability(0, 0.0) == (0.5, 0.5)
    assert branch_probability(1, 0.0) == (0.5, 0.5)


def test_branch_probability_bias_two():
    p0, p1 = branch_probability(1, 2.0)
    assert p0 == 0.25 and p1 == 0.75
    p0, p1 = branch_probability(0, 2.0)
    assert p0 == 0.75 and p1 == 0.25


def test_branch_probability_follow_limit():
    assert branch_probability(0, FOLLOW_INCUMBENT) == (1.0, 0.0)
    assert branch_probability(1, FOLLOW_INCUMBENT) == (0.0, 1.0)


def test_branch_probability_sums_to_one():
    rng = np.random.default_rng(0)
    for bias in rng.uniform(0.0, 50.0, size=50):
        p0, p1 = branch_probability(0, float(bias))
        assert math.isclose(p0 + p1, 1.0, rel_tol=0, abs_tol=1e-15)


def test_branch_probability_rejects_bad_input():
    with pytest.raises(InputError):
        branch_probability(2, 1.0)
    with pytest.raises(InputError):
        branch_probability(0, -0.5)


def test_bias_for_distance_values():
    assert bias_for_distance(20, 4) == 5.0
    assert bias_for_distance(4, 4) == 1.0
    assert bias_for_distance(7, 7) == 1.0
    with pytest.raises(InputError):
        bias_for_distance(5, 0)
    with pytest.raises(InputError):
        bias_for_distance(0, 4)


def test_model_requires_feasible_incumbent():
    with pytest.raises(ValidationError):
        QtgModel.for_instance(TWO, incumbent="11", bias=0.0)


def test_path_probability_tree_example():
    m = model_00(0.0)
    assert path_probability(m, "00") == 0.25
    assert path_probability(m, "01") == 0.25
    assert path_probability(m, "10") == 0.5
    assert path_probability(m, "11") == 0.0


def test_path_probability_infeasible_is_zero():
    m = model_00(3.0)
    assert path_probability(m, "11") == 0.0


def test_sampled_outcomes_match_tree_example():
    m = model_00(0.0)
    rng = substream(17)
    counts = {"00": 0, "01": 0, "10": 0, "11": 0}
    draws = 4000
    for _ in range(draws):
        s = sample_path(m, rng)
        counts[s.bits] += 1
    assert counts["11"] == 0
    # 4 sigma bands around 1/4, 1/4, 1/2
    for bits, p in (("00", 0.25), ("01", 0.25), ("10", 0.5)):
        sigma = math.sqrt(p * (1 - p) * draws)
        assert abs(counts[bits] - p * draws) < 4 * sigma


def test_single_item_unbiased_split():
    inst = KnapsackInstance.qkp("one", (3,), 5, ((4,),))
    m = QtgModel.for_instance(inst, incumbent="0", bias=0.0)
    rng = substream(5)
    x = sample_paths(m, 100_000, rng)
    ones = int(x.sum())
    sigma = math.sqrt(0.25 * 100_000)
    assert abs(ones - 50_000) < 3 * sigma


def test_follow_incumbent_returns_incumbent_exactly():
    rng = np.random.default_rng(9)
    for _ in range(10):
        inst = random_instance(rng, int(rng.integers(2, 11)))
        incumbent = None  # greedy
        m = QtgModel.for_instance(inst, incumbent=incumbent, bias=FOLLOW_INCUMBENT)
        for _ in range(5):
            assert sample_path(m, rng).bits == m.incumbent
        x = sample_paths(m, 64, rng)
        want = np.array([1 if b == "1" else 0 for b in m.incumbent], dtype=np.uint8)
        assert (x == want[None, :]).all()


def test_distribution_sums_to_one():
    rng = np.random.default_rng(21)
    for _ in range(12):
        inst = random_instance(rng, int(rng.integers(2, 13)))
        bias = float(rng.choice([0.0, 1.0, inst.n / 4]))
        m = QtgModel.for_instance(inst, bias=bias)
        prob = path_distribution(m)
        assert prob.shape == (1 << inst.n,)
        assert abs(prob.sum() - 1.0) < 1e-9


def test_distribution_matches_recursive_oracle():
    rng = np.random.default_rng(33)
    for _ in range(8):
        inst = random_instance(rng, int(rng.integers(2, 9)))
        bias = float(rng.choice([0.0, 2.0, FOLLOW_INCUMBENT]))
        m = QtgModel.for_instance(inst, bias=bias)
        prob = path_distribution(m)
        oracle = brute_force_tree_distribution(m)
        for bits, want in oracle.items():
            got = prob[bits_to_code(bits)]
            assert got == pytest.approx(want, rel=1e-12, abs=1e-300)
        assert prob.sum() == pytest.approx(sum(oracle.values()), rel=1e-12)


def test_path_probability_agrees_with_distribution():
    rng = np.random.default_rng(4)
    inst = random_instance(rng, 8)
    m = QtgModel.for_instance(inst, bias=1.5)
    prob = path_distribution(m)
    for code in rng.integers(0, 1 << 8, size=40):
        bits = code_to_bits(int(code), 8)
        assert path_probability(m, bits) == pytest.approx(
            float(prob[int(code)]), rel=1e-12, abs=0
        )


def test_samples_always_feasible():
    rng = np.random.default_rng(100)
    for _ in range(8):
        inst = random_instance(rng, int(rng.integers(2, 13)))
        for bias in (0.0, 1.0, inst.n / 4, FOLLOW_INCUMBENT):
            m = QtgModel.for_instance(inst, bias=bias)
            x = sample_paths(m, 2000, rng)
            assert feasible_batch(inst, x).all()


def test_incumbent_probability_grows_with_bias():
    rng = np.random.default_rng(55)
    inst = random_instance(rng, 9)
    m0 = QtgModel.for_instance(inst, bias=0.0)
    probs = []
    for bias in (0.0, 2.0, 8.0):
        m = QtgModel.for_instance(inst, bias=bias)
        probs.append(path_probability(m, m0.incumbent))
    assert probs[0] <= probs[1] <= probs[2]


def test_success_mass_examples():
    m = model_00(0.0)
    exact = success_mass(m, 9, mode="exact")
    assert exact.value == 0.5 and exact.mode == "exact"
    assert success_mass(m, -1, mode="exact").value == pytest.approx(1.0, abs=1e-12)
    # nothing exceeds the total-profit bound
    assert success_mass(m, 19, mode="exact").value == 0.0


def test_success_mass_monte_carlo_agrees():
    m = model_00(0.0)
    mc = success_mass(m, 9, mode="monte-carlo", samples=40_000, rng=substream(2))
    assert mc.mode == "monte-carlo" and mc.std_error is not None
    assert abs(mc.value - 0.5) < 4 * mc.std_error + 1e-9


def test_success_mass_auto_picks_exact_for_small_n():
    m = model_00(1.0)
    assert success_mass(m, 0).mode == "exact"


def test_bits_code_round_trip():
    for n in (1, 3, 7):
        for code in range(min(1 << n, 40)):
            assert bits_to_code(code_to_bits(code, n)) == code
    assert bits_to_code("011") == 6
