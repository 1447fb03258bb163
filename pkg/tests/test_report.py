"""Rational serialization round-trips and report structure."""

import json

from hypothesis import given
from hypothesis import strategies as st

from mbm.captable import parse_captable, to_instance
from mbm.rational import Rational as Q, decimal_approx, rational, rational_str
from mbm.report import build_run_report

WORKED = "agent_id,share,bid\na,0.5,10\nb,0.3,5\nc,0.2,2\n"


@given(num=st.integers(-(10**12), 10**12), den=st.integers(1, 10**12))
def test_rational_text_round_trip(num, den):
    q = Q(num, den)
    assert rational(rational_str(q)) == q


def test_rational_str_is_fraction_not_decimal():
    assert rational_str(Q(3, 10)) == "3/10"
    assert rational_str(Q(5)) == "5"
    assert rational_str(Q(-5, 10)) == "-1/2"


def test_decimal_approx_20_significant_digits():
    assert decimal_approx(Q(1, 3)) == "0.33333333333333333333"
    assert decimal_approx(Q(0)) == "0"
    assert decimal_approx(Q(33, 40)) == "0.825"


def test_report_round_trip_recovers_exact_rationals():
    records = parse_captable(WORKED)
    initial, profile, config = to_instance(records, m_bar=2)
    report = build_run_report(
        records, initial, profile, config,
        mode="expected", seed=None, captable_name="worked.csv",
    )
    parsed = json.loads(report.to_json())
    high = parsed["branches"][0]
    assert [rational(a["final_share"]) for a in high["agents"]] == [
        Q(5, 8), Q(3, 8), Q(0),
    ]
    assert rational(parsed["welfare"]["expected"]) == Q(17, 2)
    assert sum(rational(a["payment"]) for a in high["agents"]) == 0


def test_report_key_order_is_stable():
    records = parse_captable(WORKED)
    initial, profile, config = to_instance(records, m_bar=2)
    report = build_run_report(
        records, initial, profile, config,
        mode="expected", seed=None, captable_name="worked.csv",
    )
    keys = list(report.to_dict().keys())
    assert keys == [
        "captable", "n", "m_bar", "mode", "seed", "agents", "ranking",
        "price", "price_approx", "p_high", "p_high_approx", "p_low",
        "p_low_approx", "branches", "expected_adjusted_utility", "welfare",
    ]
