"""Exact engine for the Multi-BMBY share-restructuring mechanism.

The mechanism reduces the owner set of a jointly held asset. Each of the
n > 2 shareholders seals one bid for the whole asset. The planner fixes a
target owner count m_bar with 1 < m_bar < n. Agents are ranked by bid,
descending, and the asset price is the m_bar-th highest bid. The eventual
owner count m is randomized between m_bar and m_bar - 1; the probability of
m = m_bar equals the combined initial share of the m_bar highest bidders,
which is exactly the weighting that cancels the threshold bidder's expected
gain. The top m bidders buy everyone else out: each buyer's share grows by
the factor 1 / (combined buyer share) and she pays for the share mass she
gains at the asset price; each seller's full stake is cashed out at the
asset price.

All arithmetic is exact rational arithmetic; there is no rounding anywhere
in this module. Every type is an immutable value and every operation is a
pure function of its inputs, so results are safe to share across threads.
``realize`` is the only randomized entry point and owns its generator
per call.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Union

from .errors import (
    DegenerateBuyerMass,
    DuplicateBids,
    InvalidAllocation,
    InvalidConfig,
    InvalidOwnerCount,
)
from .rational import ONE, ZERO, Rational, rational

_RATIONAL_TYPE = type(ZERO)


def _freeze(values: Iterable) -> tuple:
    # fast path: leave already-coerced rationals untouched
    return tuple(
        v if type(v) is _RATIONAL_TYPE else rational(v) for v in values
    )


@dataclass(frozen=True)
class Allocation:
    """Shares and money balances for all n agents.

    Valid allocations keep every share non-negative with shares summing to
    exactly 1 (a point on the n-simplex); money entries are unrestricted in
    sign. ``validate`` checks the simplex contract explicitly instead of the
    constructor so that conservation oracles have something real to verify
    on mechanism output.
    """

    shares: tuple
    money: tuple

    def __post_init__(self):
        object.__setattr__(self, "shares", _freeze(self.shares))
        object.__setattr__(self, "money", _freeze(self.money))
        if len(self.shares) != len(self.money):
            raise InvalidAllocation(
                f"{len(self.shares)} shares but {len(self.money)} money entries"
            )

    @classmethod
    def from_shares(cls, shares: Sequence) -> "Allocation":
        """Initial allocation: given shares, all money balances zero."""
        shares = _freeze(shares)
        return cls(shares, (ZERO,) * len(shares))

    @classmethod
    def _from_parts(cls, shares: tuple, money: tuple) -> "Allocation":
        # internal fast path: caller guarantees coerced equal-length tuples
        self = object.__new__(cls)
        object.__setattr__(self, "shares", shares)
        object.__setattr__(self, "money", money)
        return self

    @property
    def n(self) -> int:
        return len(self.shares)

    def validate(self) -> "Allocation":
        """Raise InvalidAllocation unless shares are a point on the simplex."""
        for i, s in enumerate(self.shares):
            if s < 0:
                raise InvalidAllocation(f"agent {i} has negative share {s}")
        total = sum(self.shares, ZERO)
        if total != 1:
            raise InvalidAllocation(f"shares sum to {total}, expected exactly 1")
        return self


@dataclass(frozen=True)
class BidProfile:
    """One sealed bid per agent for the whole asset, each non-negative.

    Ties are representable (so that tie detection can be tested) but every
    ranked operation rejects them with DuplicateBids.
    """

    bids: tuple

    def __post_init__(self):
        object.__setattr__(self, "bids", _freeze(self.bids))
        for i, b in enumerate(self.bids):
            if b < 0:
                raise ValueError(f"agent {i} bid {b} is negative")

    @property
    def n(self) -> int:
        return len(self.bids)

    def replace_bid(self, agent: int, bid) -> "BidProfile":
        """Profile with one agent's bid swapped out (used by deviation search)."""
        bids = list(self.bids)
        bids[agent] = rational(bid)
        return BidProfile(tuple(bids))


@dataclass(frozen=True)
class Ranking:
    """Descending order of agents by bid.

    ``order[k]`` is the agent holding rank k + 1 (rank 1 = highest bid);
    ``rank_of[i]`` is agent i's 1-based rank. The two are mutual inverses.
    """

    order: tuple
    rank_of: tuple

    def agent_at(self, rank: int) -> int:
        """Agent holding the given 1-based rank."""
        return self.order[rank - 1]


@dataclass(frozen=True)
class MbmConfig:
    """Agent count n and threshold owner count m_bar, with n > 2 and 1 < m_bar < n."""

    n: int
    m_bar: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n <= 2:
            raise InvalidConfig(f"need more than 2 agents, got n={self.n}")
        if not isinstance(self.m_bar, int) or not 1 < self.m_bar < self.n:
            raise InvalidConfig(
                f"m_bar must satisfy 1 < m_bar < n, got m_bar={self.m_bar}, n={self.n}"
            )


@dataclass(frozen=True)
class MechanismOutcome:
    """One realized branch: owner count, price, probability, final state."""

    realized_m: int
    price: Rational
    branch_probability: Rational
    final_allocation: Allocation
    ranking: Ranking


@dataclass(frozen=True)
class ExpectedOutcome:
    """Both branches of the owner-count lottery (m = m_bar and m = m_bar - 1).

    Probabilities sum to exactly 1; a zero-probability branch (possible when
    some initial shares are zero) is retained since it contributes nothing
    to expectations but keeps the algebra intact.
    """

    high_branch: MechanismOutcome
    low_branch: MechanismOutcome

    @property
    def branches(self) -> tuple:
        return (self.high_branch, self.low_branch)


SeedLike = Union[int, random.Random]


def _check_sizes(n_entries: int, config: MbmConfig, what: str) -> None:
    if n_entries != config.n:
        raise InvalidConfig(f"{what} has {n_entries} entries, config expects n={config.n}")


def rank_bids(profile: BidProfile) -> Ranking:
    """Rank agents by bid, descending; reject ties with DuplicateBids."""
    n = profile.n
    if n < 3:
        raise InvalidConfig(f"need at least 3 bids, got {n}")
    seen: dict = {}
    pairs = []
    for i, b in enumerate(profile.bids):
        if b in seen:
            pairs.append((seen[b], i))
        else:
            seen[b] = i
    if pairs:
        raise DuplicateBids(pairs)
    order = tuple(sorted(range(n), key=profile.bids.__getitem__, reverse=True))
    rank_of = [0] * n
    for pos, agent in enumerate(order):
        rank_of[agent] = pos + 1
    return Ranking(order=order, rank_of=tuple(rank_of))


def threshold_price(profile: BidProfile, config: MbmConfig) -> Rational:
    """The asset price: the m_bar-th highest bid."""
    _check_sizes(profile.n, config, "bid profile")
    ranking = rank_bids(profile)
    return profile.bids[ranking.agent_at(config.m_bar)]


def branch_probabilities(
    initial: Allocation, ranking: Ranking, config: MbmConfig
) -> tuple:
    """(P(m = m_bar), P(m = m_bar - 1)).

    The high branch gets the combined initial share of the m_bar highest
    bidders -- bidders, not largest shareholders -- and the low branch the
    rest, so the two sum to exactly 1.
    """
    _check_sizes(initial.n, config, "allocation")
    initial.validate()
    p_high = sum((initial.shares[a] for a in ranking.order[: config.m_bar]), ZERO)
    p_low = sum((initial.shares[a] for a in ranking.order[config.m_bar :]), ZERO)
    return (p_high, p_low)


def _buyout(initial: Allocation, ranking: Ranking, price, m: int, s_buy=None) -> tuple:
    """Final (shares, money) after the top m ranked agents buy out the rest.

    Callers guarantee ``initial`` is a valid (simplex) allocation, so the
    seller mass is the complement of the buyer mass. No owner-count
    validation: apply_branch guards the public contract and the welfare
    tests use this directly to check the m_bar = n boundary remark (full
    retention changes nothing). ``s_buy`` may carry the precomputed
    combined buyer share.
    """
    order = ranking.order
    if s_buy is None:
        s_buy = sum((initial.shares[a] for a in order[:m]), ZERO)
    if s_buy == 0:
        raise DegenerateBuyerMass(
            f"all {m} prospective buyers hold zero initial shares"
        )
    s_sell = ONE - s_buy
    ratio = s_sell / s_buy
    factor = ONE + ratio
    shares = list(initial.shares)
    money = list(initial.money)
    for pos, agent in enumerate(order):
        stake = initial.shares[agent]
        if pos < m:
            shares[agent] = stake * factor
            money[agent] = money[agent] - stake * ratio * price
        else:
            shares[agent] = ZERO
            money[agent] = money[agent] + stake * price
    return tuple(shares), tuple(money)


def apply_branch(
    initial: Allocation, profile: BidProfile, config: MbmConfig, m: int
) -> MechanismOutcome:
    """Deterministically apply one branch of the owner-count lottery.

    Buyers (rank <= m) scale their stake by 1 + S_sell/S_buy and pay
    stake * (S_sell/S_buy) * price; sellers (rank > m) drop to zero shares
    and collect stake * price. The price is the m_bar-th highest bid in
    both branches. Payments add to whatever money the initial allocation
    carries; conservation is a statement about the deltas.
    """
    _check_sizes(initial.n, config, "allocation")
    _check_sizes(profile.n, config, "bid profile")
    if m not in (config.m_bar, config.m_bar - 1):
        raise InvalidOwnerCount(
            f"owner count {m} not in {{m_bar - 1, m_bar}} = "
            f"{{{config.m_bar - 1}, {config.m_bar}}}"
        )
    initial.validate()
    ranking = rank_bids(profile)
    price = profile.bids[ranking.agent_at(config.m_bar)]
    p_high, p_low = branch_probabilities(initial, ranking, config)
    shares, money = _buyout(initial, ranking, price, m)
    return MechanismOutcome(
        realized_m=m,
        price=price,
        branch_probability=p_high if m == config.m_bar else p_low,
        final_allocation=Allocation(shares, money),
        ranking=ranking,
    )


def _run_expected(
    initial: Allocation, profile: BidProfile, config: MbmConfig
) -> ExpectedOutcome:
    """Both branches with their probabilities; consumes no randomness.

    Rankings are recomputed from the given profile on every call, never
    reused across profiles. The public ``run_expected`` memoizes this
    (inputs are immutable values, the result deterministic); hot loops that
    evaluate each profile exactly once call this directly to skip the
    cache-key hashing.
    """
    _check_sizes(initial.n, config, "allocation")
    _check_sizes(profile.n, config, "bid profile")
    initial.validate()
    ranking = rank_bids(profile)
    threshold_agent = ranking.agent_at(config.m_bar)
    price = profile.bids[threshold_agent]
    p_high = sum((initial.shares[a] for a in ranking.order[: config.m_bar]), ZERO)
    p_low = ONE - p_high
    buyer_mass = (p_high, p_high - initial.shares[threshold_agent])
    branches = []
    for m, prob, s_buy in (
        (config.m_bar, p_high, buyer_mass[0]),
        (config.m_bar - 1, p_low, buyer_mass[1]),
    ):
        shares, money = _buyout(initial, ranking, price, m, s_buy=s_buy)
        branches.append(
            MechanismOutcome(
                realized_m=m,
                price=price,
                branch_probability=prob,
                final_allocation=Allocation._from_parts(shares, money),
                ranking=ranking,
            )
        )
    return ExpectedOutcome(high_branch=branches[0], low_branch=branches[1])


run_expected = lru_cache(maxsize=4096)(_run_expected)


def realize(
    initial: Allocation, profile: BidProfile, config: MbmConfig, seed: SeedLike
) -> MechanismOutcome:
    """Sample the owner-count lottery and return the realized branch.

    ``seed`` is an int (a fresh generator is derived from it, so equal
    seeds and inputs give equal outcomes) or a ``random.Random`` instance
    for callers drawing many realizations in sequence. The draw is exact:
    an integer below the probability's denominator is compared against its
    numerator, so no floating point enters the branch choice.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    expected = run_expected(initial, profile, config)
    p_high = expected.high_branch.branch_probability
    hit_high = rng.randrange(int(p_high.denominator)) < int(p_high.numerator)
    return expected.high_branch if hit_high else expected.low_branch


def adjusted_utility(
    initial: Allocation,
    outcome: MechanismOutcome,
    valuations: BidProfile,
    agent: int,
) -> Rational:
    """Utility change for one agent: u(final) - u(initial), u(s, x) = s*v + x.

    Uses the agent's entry in ``valuations`` as her true value; pass the bid
    profile itself for utilities at face value.
    """
    v = valuations.bids[agent]
    final = outcome.final_allocation
    return (final.shares[agent] - initial.shares[agent]) * v + (
        final.money[agent] - initial.money[agent]
    )


def expected_adjusted_utility(
    initial: Allocation,
    expected: ExpectedOutcome,
    valuations: BidProfile,
    agent: int,
) -> Rational:
    """Probability-weighted utility change over both branches.

    For the agent ranked exactly m_bar this is identically zero -- whatever
    her true value -- because the branch weights cancel the buyer-side and
    seller-side terms exactly.
    """
    total = ZERO
    for branch in expected.branches:
        total += branch.branch_probability * adjusted_utility(
            initial, branch, valuations, agent
        )
    return total
