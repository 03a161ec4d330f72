"""Shared generators and independent oracles for the test suite.

The brute-force functions here deliberately reimplement feasibility and the
objective from scratch (itertools over all subsets, no pruning, no shared
code paths) so they can serve as oracles against the package.
"""

from __future__ import annotations

import itertools

import numpy as np

from qtgsearch import KnapsackInstance, ProblemKind


def random_qkp(
    rng: np.random.Generator,
    n: int,
    max_weight: int = 30,
    max_profit: int = 40,
    pair_density: float = 0.5,
    capacity_lo: float = 0.35,
    capacity_hi: float = 0.5,
    name: str = "rand-qkp",
) -> KnapsackInstance:
    assert n >= 2, "n=1 cannot satisfy max w <= c < sum w"
    while True:
        w = rng.integers(1, max_weight + 1, size=n)
        total = int(w.sum())
        ratio = rng.uniform(capacity_lo, capacity_hi)
        c = max(int(w.max()), int(round(total * ratio)))
        if c < total:
            break
    p = np.zeros((n, n), dtype=np.int64)
    for m in range(n):
        p[m, m] = int(rng.integers(1, max_profit + 1))
        for mp in range(m + 1, n):
            if rng.random() < pair_density:
                v = int(rng.integers(1, max_profit + 1))
                p[m, mp] = p[mp, m] = v
    return KnapsackInstance.qkp(
        name,
        tuple(int(x) for x in w),
        c,
        tuple(tuple(int(x) for x in row) for row in p),
    )


def random_mdkp(
    rng: np.random.Generator,
    n: int,
    d: int,
    max_weight: int = 30,
    max_profit: int = 40,
    capacity_lo: float = 0.35,
    capacity_hi: float = 0.5,
    name: str = "rand-mdkp",
) -> KnapsackInstance:
    assert n >= 2
    rows = []
    caps = []
    for _ in range(d):
        while True:
            w = rng.integers(1, max_weight + 1, size=n)
            total = int(w.sum())
            ratio = rng.uniform(capacity_lo, capacity_hi)
            c = max(int(w.max()), int(round(total * ratio)))
            if c < total:
                break
        rows.append(tuple(int(x) for x in w))
        caps.append(c)
    profits = tuple(int(x) for x in rng.integers(1, max_profit + 1, size=n))
    return KnapsackInstance.mdkp(name, tuple(rows), tuple(caps), profits)


def random_instance(rng: np.random.Generator, n: int, **kwargs) -> KnapsackInstance:
    if rng.random() < 0.5:
        return random_qkp(rng, n, **kwargs)
    return random_mdkp(rng, n, int(rng.integers(1, 4)), **kwargs)


def brute_force_profit(instance: KnapsackInstance, chosen: tuple[int, ...]) -> int:
    if instance.kind is ProblemKind.MDKP:
        return sum(instance.profits[m] for m in chosen)
    total = 0
    for m in chosen:
        total += instance.profits[m][m]
    for m, mp in itertools.combinations(chosen, 2):
        total += instance.profits[m][mp] + instance.profits[mp][m]
    return total


def brute_force_feasible(instance: KnapsackInstance, chosen: tuple[int, ...]) -> bool:
    for i in range(instance.d):
        if sum(instance.weights[i][m] for m in chosen) > instance.capacities[i]:
            return False
    return True


def brute_force_optimum(instance: KnapsackInstance) -> int:
    """Best feasible profit by plain subset enumeration, no pruning."""
    best = 0
    for r in range(instance.n + 1):
        for chosen in itertools.combinations(range(instance.n), r):
            if brute_force_feasible(instance, chosen):
                best = max(best, brute_force_profit(instance, chosen))
    return best


def chosen_to_bits(chosen: tuple[int, ...], n: int) -> str:
    out = ["0"] * n
    for m in chosen:
        out[m] = "1"
    return "".join(out)


def brute_force_tree_distribution(model) -> dict[str, float]:
    """Independent recursive evaluation of the branching distribution."""
    inst = model.instance
    out: dict[str, float] = {}

    def walk(level: int, bits: list[str], residuals: list[int], prob: float) -> None:
        if level == inst.n:
            out["".join(bits)] = prob
            return
        j = model.item_order[level]
        fits = all(inst.weights[i][j] <= residuals[i] for i in range(inst.d))
        if not fits:
            bits[j] = "0"
            walk(level + 1, bits, residuals, prob)
            return
        inc = 1 if model.incumbent[j] == "1" else 0
        if model.follow_incumbent:
            p0, p1 = (1.0, 0.0) if inc == 0 else (0.0, 1.0)
        else:
            flip = 1.0 / (2.0 + model.bias)
            p0, p1 = ((1.0 - flip), flip) if inc == 0 else (flip, 1.0 - flip)
        if p0 > 0.0:
            bits[j] = "0"
            walk(level + 1, bits, residuals, prob * p0)
        if p1 > 0.0:
            bits[j] = "1"
            reduced = [residuals[i] - inst.weights[i][j] for i in range(inst.d)]
            walk(level + 1, bits, reduced, prob * p1)
            bits[j] = "0"

    walk(0, ["0"] * inst.n, list(inst.capacities), 1.0)
    return out
