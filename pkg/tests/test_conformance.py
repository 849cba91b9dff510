"""The conformance report itself: flagged rows and plan statuses."""

import numpy as np

from freqcast.conformance import (
    algebra_rows,
    benchmark_plan_statuses,
    flagged_rows,
    format_report,
    full_report,
    random_valid_plans,
)


def test_recursion_agrees_with_itself_where_expected():
    assert flagged_rows(2, "product") == frozenset()
    # the two-component display only mis-conjugates its first row
    assert flagged_rows(4, "product") == frozenset({0})
    assert flagged_rows(4, "layer") == frozenset({0})


def test_higher_base_displays_deviate_everywhere():
    assert flagged_rows(8, "product") == frozenset(range(4))
    assert flagged_rows(8, "layer") == frozenset(range(4))
    assert flagged_rows(16, "product") == frozenset(range(8))
    assert flagged_rows(16, "layer") == frozenset(range(8))


def test_flagged_rows_stable_across_seeds():
    for base in (4, 8, 16):
        assert flagged_rows(base, "product", seed=0) == flagged_rows(
            base, "product", seed=99
        )


def test_deviations_are_order_one_not_roundoff():
    for row in algebra_rows():
        if not row.matches:
            assert row.max_abs_deviation > 1e-3
        else:
            assert row.max_abs_deviation < 1e-12


def test_benchmark_presets_split_into_valid_and_invalid():
    rng = np.random.default_rng(0)
    statuses = {s.name: s for s in benchmark_plan_statuses(rng)}
    assert statuses["ettm1"].valid and statuses["ettm1"].passes
    for name in ("weather", "traffic", "electricity", "etth1", "exchange"):
        assert not statuses[name].valid
        assert "window count" in statuses[name].reason


def test_random_plans_are_valid_by_construction():
    rng = np.random.default_rng(5)
    for plan in random_valid_plans(rng, 10):
        assert (plan.lookback - plan.nfft) % (plan.window_count - 1) == 0
        assert plan.hop <= plan.nfft


def test_report_text_mentions_key_sections():
    text = format_report(full_report(seed=1, samples=50, random_plans=3))
    assert "conformance" in text
    assert "round trips" in text
    assert "DEVIATES" in text
    assert "matches" in text
