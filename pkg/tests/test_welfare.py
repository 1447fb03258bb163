"""Welfare analytics: dot products, closed forms, bounds, adversarial ratios.

The closed-form values asserted here were recomputed term by term in the
tests themselves (summation oracles), never copied from the engine.
"""

import pytest
from hypothesis import given

from mbm import (
    Allocation,
    InvalidAlpha,
    MbmConfig,
    efficiency_loss_instance,
    expected_mbm_welfare,
    first_best,
    rank_bids,
    social_welfare,
    sweep_point,
    uniform_grid_limit,
    uniform_grid_prefix_sums,
    uniform_grid_welfare,
    valid_alphas,
    welfare_report,
    welfare_sweep,
)
from mbm.core import _buyout
from mbm.rational import ONE, ZERO, Rational as Q
from mbm.welfare import uniform_grid_instance, uniform_grid_valuations

from strategies import instances


# --- social welfare -----------------------------------------------------------


def test_social_welfare_worked_dot_product(worked):
    initial, profile, _ = worked
    assert social_welfare(initial, profile) == Q(69, 10)


def test_social_welfare_whole_asset_to_top_is_first_best(worked):
    _, profile, _ = worked
    top_only = Allocation.from_shares((ONE, ZERO, ZERO))
    assert social_welfare(top_only, profile) == first_best(profile) == 10


def test_social_welfare_uniform_grid_equal_shares_mean():
    for n in (3, 7, 12):
        initial = Allocation.from_shares((Q(1, n),) * n)
        profile = uniform_grid_valuations(n)
        # arithmetic mean of 1/n, 2/n, ..., 1
        assert social_welfare(initial, profile) == Q(n + 1, 2 * n)


# --- expected welfare -----------------------------------------------------------


def test_expected_welfare_worked_frozen(worked):
    initial, profile, config = worked
    # independent route: probability-weighted dot products, by hand
    high = Q(5, 8) * 10 + Q(3, 8) * 5  # 65/8
    low = Q(10)
    expected = Q(4, 5) * high + Q(1, 5) * low
    assert expected == Q(17, 2)
    assert expected_mbm_welfare(initial, profile, config) == Q(17, 2)
    assert expected > social_welfare(initial, profile)  # 17/2 > 69/10


def test_welfare_report_worked(worked):
    initial, profile, config = worked
    report = welfare_report(initial, profile, config)
    assert report.initial_welfare == Q(69, 10)
    assert report.expected_mbm_welfare == Q(17, 2)
    assert report.first_best == 10
    assert report.preservation_ratio == Q(17, 20)


@given(inst=instances())
def test_expected_welfare_never_below_initial(inst):
    initial, profile, config = inst
    assert expected_mbm_welfare(initial, profile, config) >= social_welfare(
        initial, profile
    )


@given(inst=instances(min_n=4, max_n=8))
def test_expected_welfare_weakly_increases_as_m_bar_decreases(inst):
    initial, profile, _ = inst
    n = initial.n
    values = [
        expected_mbm_welfare(initial, profile, MbmConfig(n, m_bar))
        for m_bar in range(2, n)
    ]
    assert all(a >= b for a, b in zip(values, values[1:]))


@given(inst=instances())
def test_branch_welfare_is_share_weighted_average_of_owner_values(inst):
    # proportional scaling makes each branch's welfare the initial-share
    # weighted average of the remaining owners' valuations
    initial, profile, config = inst
    from mbm import run_expected

    expected = run_expected(initial, profile, config)
    for branch in expected.branches:
        order = branch.ranking.order[: branch.realized_m]
        mass = sum((initial.shares[a] for a in order), ZERO)
        weighted = sum((initial.shares[a] * profile.bids[a] for a in order), ZERO)
        assert social_welfare(branch.final_allocation, profile) == weighted / mass


@given(inst=instances())
def test_preservation_ratio_in_unit_interval(inst):
    initial, profile, config = inst
    report = welfare_report(initial, profile, config)
    assert 0 < report.preservation_ratio <= 1
    assert report.expected_mbm_welfare >= report.initial_welfare


def test_full_retention_keeps_welfare_unchanged(worked):
    # the m_bar = n boundary: every agent keeps her stake, so welfare is the
    # initial welfare; checked through the raw buyout since the public
    # config bounds stop at m_bar = n - 1
    initial, profile, _ = worked
    ranking = rank_bids(profile)
    shares, _money = _buyout(initial, ranking, Q(5), 3)
    assert social_welfare(Allocation.from_shares(shares), profile) == social_welfare(
        initial, profile
    )


# --- equal shares, uniform grid closed forms -------------------------------------


def test_uniform_grid_instance_matches_grid():
    initial, valuations, config = uniform_grid_instance(4, 2)
    assert initial.shares == (Q(1, 4),) * 4
    assert valuations.bids == (ONE, Q(3, 4), Q(1, 2), Q(1, 4))
    assert config.m_bar == 2


def test_prefix_sums_match_term_by_term_summation():
    for n in range(3, 40):
        values = [Q(n - i, n) for i in range(n)]  # v_1 = 1 down to v_n = 1/n
        for m_bar in range(2, n):
            by_formula = uniform_grid_prefix_sums(n, m_bar)
            by_summation = (
                sum(values[:m_bar], ZERO),
                sum(values[: m_bar - 1], ZERO),
            )
            assert by_formula == by_summation


def test_prefix_sums_named_values():
    assert uniform_grid_prefix_sums(4, 2) == (Q(7, 4), Q(1))
    assert uniform_grid_prefix_sums(10, 3) == (Q(27, 10), Q(19, 10))


def test_prefix_sums_two_owner_case_any_n():
    for n in (3, 5, 11, 40):
        top, almost = uniform_grid_prefix_sums(n, 2)
        assert top == Q(2 * n - 1, n)  # 1 + (n-1)/n
        assert almost == 1


def test_closed_form_named_value():
    value = uniform_grid_welfare(10, Q(1, 2))
    assert value == Q(3, 4) + Q(3, 40) == Q(33, 40)


def test_closed_form_rejects_bad_alpha():
    with pytest.raises(InvalidAlpha):
        uniform_grid_welfare(10, Q(1, 3))  # 10/3 owners is not an integer
    with pytest.raises(InvalidAlpha):
        uniform_grid_welfare(10, Q(1, 10))  # one owner: below the domain
    with pytest.raises(InvalidAlpha):
        uniform_grid_welfare(10, ONE)  # full retention: above the domain


def test_closed_form_equals_engine_small_case():
    # n = 4, alpha = 1/2: closed form 15/16 must equal the engine on the
    # matching equal-shares instance
    assert uniform_grid_welfare(4, Q(1, 2)) == Q(15, 16)
    initial, valuations, config = uniform_grid_instance(4, 2)
    assert expected_mbm_welfare(initial, valuations, config) == Q(15, 16)


def test_closed_form_equals_engine_on_small_sweep():
    for n in range(4, 13):
        for alpha in valid_alphas(n):
            row = sweep_point(n, alpha)
            assert row.closed_form == row.engine
            assert row.preservation_ratio == row.engine  # first-best is 1 here


def test_closed_form_always_above_half():
    for n in (4, 10, 50, 200):
        for alpha in valid_alphas(n):
            assert uniform_grid_welfare(n, alpha) > Q(1, 2)


def test_limit_identity_and_range():
    for n in (4, 10, 1000):
        for alpha in valid_alphas(n):
            gap = uniform_grid_welfare(n, alpha) - uniform_grid_limit(alpha)
            assert gap == (2 - alpha) / (2 * n)
            assert Q(1, 2) < uniform_grid_limit(alpha) < 1


def test_closed_form_affine_in_alpha_with_known_slope():
    for n in (5, 12, 60):
        alphas = valid_alphas(n)
        slope = Q(-(n + 1), 2 * n)
        for a1, a2 in zip(alphas, alphas[1:]):
            delta = uniform_grid_welfare(n, a2) - uniform_grid_welfare(n, a1)
            assert delta == slope * (a2 - a1)


def test_welfare_sweep_filters_invalid_alphas():
    rows = welfare_sweep([10], alphas=[Q(1, 2), Q(1, 3)])
    assert len(rows) == 1 and rows[0].alpha == Q(1, 2)
    rows = welfare_sweep([6])
    assert [r.m_bar for r in rows] == [2, 3, 4, 5]


# --- arbitrarily small preservation ratio ----------------------------------------


@pytest.mark.parametrize("epsilon", [Q(1, 10), Q(1, 100), Q(1, 1000)])
def test_efficiency_loss_instance_beats_target(epsilon):
    initial, valuations, config = efficiency_loss_instance(epsilon)
    report = welfare_report(initial, valuations, config)
    assert report.first_best == 1
    assert report.preservation_ratio < epsilon
    assert report.expected_mbm_welfare >= report.initial_welfare


def test_efficiency_loss_instance_rejects_bad_epsilon():
    for bad in (Q(0), Q(1), Q(3, 2), Q(-1, 10)):
        with pytest.raises(ValueError):
            efficiency_loss_instance(bad)
