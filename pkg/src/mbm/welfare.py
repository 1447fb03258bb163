"""Social-welfare analytics for the restructuring mechanism.

Welfare is the share-weighted sum of valuations: seller compensation is an
internal transfer and never enters it. Because the mechanism concentrates
ownership on the highest-valuing agents while preserving their proportions,
its expected welfare can only improve on the initial allocation, and
shrinking the target owner count only helps. The benchmark it is measured
against is first-best welfare -- handing the whole asset to the single
highest-valuing agent -- which no budget-balanced, incentive-compatible
trade can reach in general.

The equal-shares / uniform-valuation-grid family (valuations (n-i+1)/n,
every initial share 1/n, m_bar = alpha * n) admits closed forms, evaluated
here exactly and cross-checked against the general engine. In that family
the preserved fraction of first-best welfare is (2-alpha)/2 + (2-alpha)/(2n):
above one half everywhere, decaying linearly in alpha, and approaching
(2-alpha)/2 as n grows. Outside it the preserved fraction can be driven
arbitrarily close to zero; ``efficiency_loss_instance`` constructs the
offending instances.

Everything here assumes truthful bidding, where the mechanism's welfare
statement lives; all functions are pure, and sweeps over (n, alpha) grids
can safely run in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .core import Allocation, BidProfile, MbmConfig, _run_expected
from .errors import InvalidAlpha, InvalidConfig
from .rational import ONE, ZERO, Rational, rational


@dataclass(frozen=True)
class WelfareReport:
    """Welfare before, welfare after (in expectation), and the benchmark."""

    initial_welfare: Rational
    expected_mbm_welfare: Rational
    first_best: Rational
    preservation_ratio: Rational


def social_welfare(allocation: Allocation, valuations: BidProfile) -> Rational:
    """Share-weighted valuation sum; money balances are excluded."""
    total = ZERO
    for s, v in zip(allocation.shares, valuations.bids):
        total += s * v
    return total


def first_best(valuations: BidProfile) -> Rational:
    """Welfare of handing the whole asset to the highest-valuing agent."""
    return max(valuations.bids)


def expected_mbm_welfare(
    initial: Allocation, valuations: BidProfile, config: MbmConfig
) -> Rational:
    """Probability-weighted welfare over both branches, from the engine's outcome.

    Uses the unmemoized engine: sweeps evaluate each (instance, config)
    point exactly once, so cache-key hashing would be pure overhead.
    """
    expected = _run_expected(initial, valuations, config)
    total = ZERO
    for branch in expected.branches:
        total += branch.branch_probability * social_welfare(
            branch.final_allocation, valuations
        )
    return total


def welfare_report(
    initial: Allocation, valuations: BidProfile, config: MbmConfig
) -> WelfareReport:
    best = first_best(valuations)
    expected = expected_mbm_welfare(initial, valuations, config)
    return WelfareReport(
        initial_welfare=social_welfare(initial, valuations),
        expected_mbm_welfare=expected,
        first_best=best,
        preservation_ratio=expected / best,
    )


# --- equal shares, uniform valuation grid ----------------------------------


@lru_cache(maxsize=256)
def uniform_grid_valuations(n: int) -> BidProfile:
    """The valuation grid 1, (n-1)/n, ..., 1/n (agent 0 highest)."""
    return BidProfile(tuple(Rational(n - i, n) for i in range(n)))


@lru_cache(maxsize=256)
def _equal_shares_allocation(n: int) -> Allocation:
    return Allocation.from_shares((Rational(1, n),) * n)


def uniform_grid_instance(n: int, m_bar: int):
    """Equal shares with the uniform valuation grid, ready to run."""
    return _equal_shares_allocation(n), uniform_grid_valuations(n), MbmConfig(n=n, m_bar=m_bar)


def _m_bar_from_alpha(n: int, alpha) -> int:
    alpha = rational(alpha)
    m_bar = alpha * n
    if m_bar.denominator != 1:
        raise InvalidAlpha(f"alpha={alpha} with n={n}: alpha * n is not an integer")
    m_bar = int(m_bar)
    if not 2 <= m_bar <= n - 1:
        raise InvalidAlpha(
            f"alpha={alpha} with n={n}: alpha must lie in {{2/n, ..., (n-1)/n}}"
        )
    return m_bar


def valid_alphas(n: int) -> list:
    """All admissible retained-owner fractions for n agents: k/n, k = 2..n-1."""
    if n <= 2:
        raise InvalidConfig(f"need more than 2 agents, got n={n}")
    return [Rational(k, n) for k in range(2, n)]


def uniform_grid_welfare(n: int, alpha) -> Rational:
    """Closed-form expected welfare on the equal-shares, uniform-grid family.

    Equals (2 - alpha)/2 + (2 - alpha)/(2n) with alpha = m_bar/n. First-best
    welfare is 1 on this family, so this is also the preserved fraction.
    """
    alpha = rational(alpha)
    _m_bar_from_alpha(n, alpha)
    return (2 - alpha) / 2 + (2 - alpha) / (2 * n)


def uniform_grid_limit(alpha) -> Rational:
    """Large-n limit of the closed form: (2 - alpha)/2, inside (1/2, 1)."""
    return (2 - rational(alpha)) / 2


def uniform_grid_prefix_sums(n: int, m_bar: int) -> tuple:
    """(sum of the top m_bar grid valuations, sum of the top m_bar - 1).

    Closed forms m_bar/n * (2n - m_bar + 1)/2 and
    (m_bar - 1)/n * (2n - m_bar + 2)/2; must agree with term-by-term
    summation exactly.
    """
    if not 1 < m_bar < n:
        raise InvalidConfig(f"need 1 < m_bar < n, got m_bar={m_bar}, n={n}")
    top = Rational(m_bar, n) * Rational(2 * n - m_bar + 1, 2)
    almost = Rational(m_bar - 1, n) * Rational(2 * n - m_bar + 2, 2)
    return (top, almost)


@dataclass(frozen=True)
class SweepRow:
    """One (n, alpha) point of the closed-form-versus-engine sweep."""

    n: int
    alpha: Rational
    m_bar: int
    closed_form: Rational
    engine: Rational
    preservation_ratio: Rational
    limit_gap: Rational


def sweep_point(n: int, alpha) -> SweepRow:
    """Evaluate one (n, alpha) point along both routes."""
    alpha = rational(alpha)
    m_bar = _m_bar_from_alpha(n, alpha)
    closed = uniform_grid_welfare(n, alpha)
    initial, valuations, config = uniform_grid_instance(n, m_bar)
    engine = expected_mbm_welfare(initial, valuations, config)
    return SweepRow(
        n=n,
        alpha=alpha,
        m_bar=m_bar,
        closed_form=closed,
        engine=engine,
        preservation_ratio=engine / first_best(valuations),
        limit_gap=closed - uniform_grid_limit(alpha),
    )


def welfare_sweep(n_values, alphas=None) -> list:
    """Sweep rows for every n in ``n_values`` and every alpha.

    ``alphas`` defaults to every valid fraction per n; an explicit list is
    filtered to the fractions valid for each n.
    """
    rows = []
    for n in n_values:
        if alphas is None:
            grid = valid_alphas(n)
        else:
            grid = []
            for alpha in alphas:
                alpha = rational(alpha)
                try:
                    _m_bar_from_alpha(n, alpha)
                except InvalidAlpha:
                    continue
                grid.append(alpha)
        for alpha in grid:
            rows.append(sweep_point(n, alpha))
    return rows


# --- arbitrarily small preservation ratio ----------------------------------


def efficiency_loss_instance(epsilon):
    """An instance whose preserved fraction of first-best welfare is below epsilon.

    The highest-valuing agent gets a vanishing initial share (epsilon/8) and
    everyone else values the asset at scraps (at most 3 * epsilon/16), so
    whichever branch realizes, expected welfare stays below epsilon while
    first-best welfare is 1. Validate the claim through the engine, not by
    trusting this construction.
    """
    epsilon = rational(epsilon)
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    sigma = epsilon / 8
    tail = epsilon / 16
    shares = (sigma, *(((ONE - sigma) / 3),) * 3)
    valuations = BidProfile((ONE, 3 * tail, 2 * tail, tail))
    return Allocation.from_shares(shares), valuations, MbmConfig(n=4, m_bar=3)
