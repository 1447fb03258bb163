"""Shared hypothesis strategies: random exact-rational instances."""

from hypothesis import strategies as st

from mbm import Allocation, BidProfile, MbmConfig
from mbm.rational import Rational as Q


@st.composite
def instances(draw, min_n=3, max_n=6, allow_zero_shares=False):
    """A valid (Allocation, BidProfile, MbmConfig) triple with tie-free bids."""
    n = draw(st.integers(min_n, max_n))
    low = 0 if allow_zero_shares else 1
    weights = draw(
        st.lists(st.integers(low, 999), min_size=n, max_size=n).filter(
            lambda w: sum(w) > 0
        )
    )
    total = sum(weights)
    shares = tuple(Q(w, total) for w in weights)
    numerators = draw(
        st.lists(st.integers(0, 10**6), min_size=n, max_size=n, unique=True)
    )
    bids = tuple(Q(k, 97) for k in numerators)
    m_bar = draw(st.integers(2, n - 1))
    return (
        Allocation.from_shares(shares),
        BidProfile(bids),
        MbmConfig(n=n, m_bar=m_bar),
    )
