from fractions import Fraction
from itertools import combinations_with_replacement

import pytest

from envyprice.core import envy_free_matching, price_ratio
from envyprice.oracle import (
    LayoutInfeasible,
    RejectionCapExceeded,
    VertexConfig,
    fuzz_instances,
    oracle_alpha,
    oracle_p_nn,
    realize_config,
)
from envyprice.solver import KNOWN_RATIOS, solve_p_nn

F = Fraction

# independently certified optimal configs, one per n
OPTIMAL_CONFIGS = {
    1: ((1, 1),),
    2: ((2, 0), (2, 2)),
    3: ((2, 2), (3, 0), (3, 1)),
    4: ((2, 2), (2, 2), (4, 0), (4, 0)),
    5: ((2, 2), (3, 3), (5, 0), (5, 0), (5, 0)),
    6: ((3, 3), (3, 3), (6, 0), (6, 0), (6, 0), (6, 0)),
    7: ((2, 2), (2, 2), (3, 3), (7, 0), (7, 0), (7, 0), (7, 0)),
    8: ((2, 2), (3, 3), (3, 3), (8, 0), (8, 0), (8, 0), (8, 0), (8, 0)),
    9: ((3, 3), (3, 3), (3, 3)) + tuple((9, 0) for _ in range(6)),
}


# --- configs ---------------------------------------------------------------

def test_config_normalizes_pair_order():
    cfg = VertexConfig(((3, 1), (2, 2), (3, 0)))
    assert cfg.pairs == ((2, 2), (3, 0), (3, 1))
    assert cfg == VertexConfig(((2, 2), (3, 0), (3, 1)))
    assert cfg.n == 3


def test_config_ratio():
    cfg = VertexConfig(((2, 2), (3, 0), (3, 1)))
    assert cfg.ratio == F(8, 7)
    assert VertexConfig(((4, 1),) * 4).ratio == 1


@pytest.mark.parametrize(
    "pairs",
    [
        (),
        ((0, 0), (2, 0)),  # support size below 1
        ((3, 1), (2, 0)),  # support size above n
        ((2, 3), (2, 0)),  # hit count above support size
        ((2, 2), (2, 2), (2, 2)),  # hits exceed the item count
    ],
)
def test_config_validation(pairs):
    with pytest.raises(ValueError):
        VertexConfig(pairs)


# --- the parametric oracle ---------------------------------------------------

def test_alpha_one_attainable():
    # the all-uniform config (s_j = n, t_j = 1) scores exactly zero
    for n in (1, 2, 5, 9):
        assert oracle_alpha(n, F(1)) >= 0


def test_alpha_n3():
    assert oracle_alpha(3, F(8, 7)) == 0
    assert oracle_alpha(3, F(2)) < 0


def test_alpha_input_validation():
    with pytest.raises(ValueError):
        oracle_alpha(0, F(1))
    with pytest.raises(ValueError):
        oracle_alpha(3, F(-1, 2))


def _literal_best(n: int, alphas: list[Fraction]) -> list[Fraction]:
    """Independent reference: try every per-agent (s, t) tuple outright."""
    per_agent = [(s, t) for s in range(1, n + 1) for t in range(s + 1)]
    sums = []
    for combo in combinations_with_replacement(per_agent, n):
        if sum(t for _, t in combo) > n:
            continue
        num = sum(F(t, s) for s, t in combo)
        den = sum(F(1, s) for s, _ in combo)
        sums.append((num, den))
    return [max(num - a * den for num, den in sums) for a in alphas]


def test_dp_matches_literal_enumeration():
    grid = [F(0), F(1), F(8, 7), F(4, 3), F(3, 2), F(2), F(3)]
    for n in range(1, 5):
        expected = _literal_best(n, grid)
        got = [oracle_alpha(n, a) for a in grid]
        assert got == expected


def test_dp_matches_literal_enumeration_n5():
    grid = [F(1), F(60, 43), F(2)]
    assert [oracle_alpha(5, a) for a in grid] == _literal_best(5, grid)


# --- the ratio ----------------------------------------------------------------

def test_oracle_reference_values_and_configs():
    for n, pairs in OPTIMAL_CONFIGS.items():
        value, config = oracle_p_nn(n)
        assert value == KNOWN_RATIOS[n]
        assert config.pairs == pairs
        assert config.ratio == value


def test_oracle_agrees_with_solver():
    # two independent search spaces, one answer
    for n in range(1, 13):
        assert oracle_p_nn(n)[0] == solve_p_nn(n).ratio


def test_oracle_input_validation():
    with pytest.raises(ValueError):
        oracle_p_nn(0)


# --- realization ---------------------------------------------------------------

def test_realize_n3_optimum_is_w3(w3):
    _, cfg = oracle_p_nn(3)
    assert realize_config(cfg, 3) == w3


def test_realize_uniform_config():
    cfg = VertexConfig(((4, 1),) * 4)
    x = realize_config(cfg, 4)
    assert all(v == F(1, 4) for col in x.columns for v in col)
    assert price_ratio(x).ratio == 1


def test_realize_certifies_every_small_optimum():
    for n in range(1, 10):
        value, cfg = oracle_p_nn(n)
        report = price_ratio(realize_config(cfg, n))
        assert report.ratio == value


def test_realize_identity_envy_free():
    for n in range(2, 8):
        _, cfg = oracle_p_nn(n)
        x = realize_config(cfg, n)
        assert envy_free_matching(x) is not None


def test_realize_unsaturated_config_only_bounds_below():
    # two items go unassigned, so the optimum exceeds the config's claim
    cfg = VertexConfig(((3, 0), (3, 0), (3, 2)))
    x = realize_config(cfg, 3)
    assert price_ratio(x).ratio == 1 >= cfg.ratio == F(2, 3)


def test_realize_rejects_small_donor():
    # the s=3 taker must draw the s=2 idle agent's item, whose own column
    # would then push the row maximum above the claim
    cfg = VertexConfig(((1, 1), (2, 0), (3, 2)))
    with pytest.raises(LayoutInfeasible):
        realize_config(cfg, 3)


def test_realize_rejects_unfillable_support():
    # every item's floor is its own support size, so the s=2 column has a
    # single eligible item
    cfg = VertexConfig(((2, 1), (3, 1), (3, 1)))
    with pytest.raises(LayoutInfeasible) as err:
        realize_config(cfg, 3)
    assert err.value.agent == 1


def test_realize_dimension_check():
    with pytest.raises(ValueError):
        realize_config(VertexConfig(((1, 1),)), 2)


# --- fuzzer --------------------------------------------------------------------

def test_fuzz_is_deterministic():
    a = list(fuzz_instances(4, 30, seed=7))
    b = list(fuzz_instances(4, 30, seed=7))
    assert a == b
    assert a != list(fuzz_instances(4, 30, seed=8))


def test_fuzz_emits_valid_envy_free_admitting_instances():
    for x in fuzz_instances(3, 40, seed=1):
        assert x.n == x.m == 3
        assert envy_free_matching(x) is not None


def test_fuzz_soundness_n4():
    worst = max(price_ratio(x).ratio for x in fuzz_instances(4, 200, seed=0))
    assert worst <= F(4, 3)


def test_fuzz_single_agent():
    assert all(
        x.columns == ((F(1),),) for x in fuzz_instances(1, 10, seed=3)
    )


def test_fuzz_rejection_cap():
    # budget is aggregate: 5 instances x 1 attempt = 5 draws total; under
    # seed 0 instance 4 rejects its first draw with the budget already spent
    with pytest.raises(RejectionCapExceeded) as err:
        list(fuzz_instances(2, 5, seed=0, attempts=1))
    assert err.value.instance == 4
    assert err.value.budget == 5
    assert "aggregate attempt budget 5" in str(err.value)


def test_fuzz_budget_does_not_change_stream():
    # instances each draw from their own generator, so a tighter budget
    # yields the same matrices right up to the point it runs out
    loose = list(fuzz_instances(3, 12, seed=5))
    tight = list(fuzz_instances(3, 12, seed=5, attempts=5))
    assert tight == loose


def test_fuzz_input_validation():
    with pytest.raises(ValueError):
        list(fuzz_instances(0, 1, seed=0))
