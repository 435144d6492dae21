"""Independent verification: a vertex-configuration oracle and a fuzzer.

The oracle reaches the worst-case ratio through a different search space
than the histogram program, so agreement between the two is a meaningful
cross-check.

Fix an m = n instance in which the identity allocation is envy-free. Column
j then lives in the polytope P_j = {x >= 0, sum_i x_i = 1, x_j >= x_i}.
Every vertex of P_j is uniform over a subset of items containing j: a
coordinate that is neither 0 nor equal to x_j lies on no tight inequality,
and (a) two such coordinates admit the perturbation x_a +/- eps, x_b -/+
eps, while (b) a single one, say x_a, admits b*x_a +/- eps together with
x_i -/+ eps/1 on each of the b coordinates tied at the maximum, both of
which preserve every tight constraint; either way x is a proper convex
combination of feasible points, not a vertex. The objective (welfare of a
fixed optimal allocation minus alpha times the envy-free welfare) is linear
in each column separately, so it is maximized with every column at a
vertex. A vertex column of support size s contributes 1/s for each of its
items the allocation assigns to its agent and has column maximum 1/s, so an
instance collapses to per-agent pairs (s_j, t_j) with sum t_j <= n; the
ratio of such a configuration is (sum t_j/s_j) / (sum 1/s_j).

oracle_alpha maximizes sum (t_j - alpha)/s_j by dynamic programming over
the shared item budget, exactly: for a fixed t the best support size is
forced by the sign of t - alpha (smallest legal when positive, n when
negative), which leaves a one-dimensional knapsack over the t_j.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .core import UtilityMatrix, envy_free_matching

__all__ = [
    "VertexConfig",
    "LayoutInfeasible",
    "RejectionCapExceeded",
    "oracle_alpha",
    "oracle_p_nn",
    "realize_config",
    "fuzz_instances",
]


class LayoutInfeasible(ValueError):
    def __init__(self, agent: int, detail: str):
        self.agent = agent
        super().__init__(f"LayoutInfeasible({agent}): {detail}")


class RejectionCapExceeded(RuntimeError):
    def __init__(self, instance: int, budget: int):
        self.instance = instance
        self.budget = budget
        super().__init__(
            f"aggregate attempt budget {budget} exhausted at instance "
            f"{instance}"
        )


@dataclass(frozen=True)
class VertexConfig:
    """Per-agent (support size, hit count) pairs, kept sorted.

    Agent j's column is uniform over s_j items including its own, and the
    optimal allocation hands it t_j of them. The pair order carries no
    meaning, so configs are normalized to ascending order on construction.
    """

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        n = len(self.pairs)
        if n == 0:
            raise ValueError("a config needs at least one agent")
        normalized = tuple(sorted((int(s), int(t)) for s, t in self.pairs))
        object.__setattr__(self, "pairs", normalized)
        total = 0
        for s, t in normalized:
            if not 1 <= s <= n:
                raise ValueError(f"support size {s} outside 1..{n}")
            if not 0 <= t <= s:
                raise ValueError(f"hit count {t} outside 0..{s}")
            total += t
        if total > n:
            raise ValueError(f"hit counts sum to {total}, more than {n} items")

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def ratio(self) -> Fraction:
        num = sum(Fraction(t, s) for s, t in self.pairs)
        den = sum(Fraction(1, s) for s, _ in self.pairs)
        return num / den


def _oracle_dp(n: int, alpha: Fraction) -> tuple[Fraction, VertexConfig]:
    """Exact maximum of sum (t_j - alpha)/s_j with a maximizing config.

    Integer scoring: with L = lcm(1..n) and alpha = p/q, an agent taking t
    items at support size s scores (t*q - p) * (L // s); the true objective
    is the total divided by q*L.
    """
    p, q = alpha.numerator, alpha.denominator
    scale = math.lcm(*range(1, n + 1))
    s_for = [0] * (n + 1)
    val = [0] * (n + 1)
    for t in range(n + 1):
        margin = t * q - p
        s_for[t] = max(t, 1) if margin >= 0 else n
        val[t] = margin * (scale // s_for[t])

    # dp over agents; budget axis is the exact number of items used so far
    dp = val[:]
    choice = [list(range(n + 1))]
    for _ in range(1, n):
        nxt = [0] * (n + 1)
        picked = [0] * (n + 1)
        for b in range(n + 1):
            best = None
            best_t = 0
            for t in range(b + 1):  # ascending: ties keep the smallest t
                cand = dp[b - t] + val[t]
                if best is None or cand > best:
                    best, best_t = cand, t
            nxt[b] = best
            picked[b] = best_t
        dp = nxt
        choice.append(picked)

    b_star = max(range(n + 1), key=lambda b: (dp[b], -b))
    pairs = []
    b = b_star
    for layer in range(n - 1, -1, -1):
        t = choice[layer][b]
        pairs.append((s_for[t], t))
        b -= t
    objective = Fraction(dp[b_star], q * scale)
    return objective, VertexConfig(tuple(pairs))


def oracle_alpha(n: int, alpha: Fraction) -> Fraction:
    """Exact maximum over configs of sum (t_j - alpha)/s_j, sum t_j <= n.

    Nonnegative iff the worst-case ratio is at least alpha.
    """
    if n < 1:
        raise ValueError("n must be positive")
    alpha = Fraction(alpha)
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    return _oracle_dp(n, alpha)[0]


def oracle_p_nn(n: int) -> tuple[Fraction, VertexConfig]:
    """Exact worst-case ratio over configs, with a maximizing config.

    Dinkelbach iteration: starting at alpha = 1, replace alpha with the
    ratio of the best config until the objective reaches zero. Each step
    strictly increases alpha within the finite set of attainable ratios.
    """
    if n < 1:
        raise ValueError("n must be positive")
    alpha = Fraction(1)
    for _ in range(100000):
        objective, config = _oracle_dp(n, alpha)
        if objective == 0:
            return alpha, config
        if objective < 0:
            raise AssertionError("objective below zero at an attainable ratio")
        alpha = config.ratio
    raise AssertionError("fractional iteration failed to terminate")


def realize_config(cfg: VertexConfig, n: int) -> UtilityMatrix:
    """An m = n matrix attaining the config: identity allocation envy-free,
    price ratio >= cfg.ratio, with equality when sum t_j = n and the layout
    below goes through.

    Layout: agent j's first hit is its own item; further hits are drawn
    from the items of agents with t = 0, larger supports drawing from
    larger donors first. Each item then carries a floor, the support size
    of the agent whose bundle it lands in (its own column's size if it
    lands nowhere), and remaining support slots are filled with the
    lowest-index items whose floor does not exceed the column's size. Row
    i's maximum is exactly 1/floor(i), so hit items contribute what the
    config claims. Only fills violating a floor are refused: they would
    push the optimum strictly above the claim.
    """
    pairs = cfg.pairs
    if len(pairs) != n:
        raise ValueError(f"config has {len(pairs)} agents, expected {n}")
    sizes = [s for s, _ in pairs]

    takers = sorted(
        (j for j, (_, t) in enumerate(pairs) if t >= 1),
        key=lambda j: (-sizes[j], j),
    )
    pool = sorted(
        (j for j, (_, t) in enumerate(pairs) if t == 0),
        key=lambda j: (-sizes[j], j),
    )
    hits: dict[int, list[int]] = {}
    pos = 0
    for j in takers:
        extra = pairs[j][1] - 1
        hits[j] = [j] + pool[pos : pos + extra]
        pos += extra

    floor = [sizes[i] for i in range(n)]  # unassigned: own column binds
    for j, items in hits.items():
        for i in items:
            floor[i] = sizes[j]
    for i in range(n):
        # every column must contain its own item
        if sizes[i] < floor[i]:
            raise LayoutInfeasible(
                i + 1,
                f"own support size {sizes[i]} is below the item's floor "
                f"{floor[i]}",
            )

    columns = []
    for j in range(n):
        support = set(hits.get(j, [j]))
        for i in range(n):
            if len(support) == sizes[j]:
                break
            if i not in support and floor[i] <= sizes[j]:
                support.add(i)
        if len(support) < sizes[j]:
            raise LayoutInfeasible(
                j + 1,
                f"support needs {sizes[j]} items, only {len(support)} have "
                f"a small enough floor",
            )
        share = Fraction(1, sizes[j])
        columns.append(
            tuple(share if i in support else Fraction(0) for i in range(n))
        )
    return UtilityMatrix(tuple(columns))


def fuzz_instances(
    n: int, count: int, seed: int, attempts: int = 100
) -> Iterator[UtilityMatrix]:
    """Deterministic stream of valid m = n matrices admitting envy-free
    allocations: integer weights in 0..16 normalized per column, rejection
    sampling against an aggregate budget of attempts * count draws shared
    by the whole stream.

    The fraction of draws admitting an envy-free matching shrinks with n
    (unique column maxima alone give roughly n!/n^n), so a fixed cap per
    instance would fail at moderate n even though the stream as a whole
    needs far fewer than 100 draws per emitted instance on average.
    Instance idx always draws from Random(f"fuzz:{seed}:{idx}"), so the
    emitted matrices do not depend on the budget.
    """
    if n < 1:
        raise ValueError("n must be positive")
    budget = attempts * count
    used = 0
    for idx in range(count):
        rng = random.Random(f"fuzz:{seed}:{idx}")
        while True:
            if used >= budget:
                raise RejectionCapExceeded(idx, budget)
            used += 1
            cols = []
            for _ in range(n):
                weights = [rng.randrange(17) for _ in range(n)]
                total = sum(weights)
                if total == 0:
                    break
                cols.append(tuple(Fraction(w, total) for w in weights))
            if len(cols) < n:
                continue
            x = UtilityMatrix(tuple(cols))
            if envy_free_matching(x) is not None:
                yield x
                break
