import math
import random
from collections import Counter
from statistics import fmean

import pytest
from hypothesis import given, strategies as st

from crossmine.errors import DataError
from crossmine.metrics import MetricValues, RuleCounts, n_ic, term_stats
from crossmine.miner import MinedRule, MiningConfig, mine
from crossmine.thresholds import (
    SyntheticConfig,
    apply_ncomi_filter,
    build_pools,
    generate_synthetic,
    nic_filter,
    percent_to_nic,
    select_ncomi_threshold,
)
from crossmine.transactions import Transaction, TransactionSet, cocategory_ids


def tset(records, categories=("A", "B")):
    return TransactionSet(
        tuple(Transaction(f"g{i:05d}", {c: frozenset(t) for c, t in ann.items() if t}) for i, ann in enumerate(records)),
        categories,
        generalized=True,
    )


def scored(value, key=("a", "b")):
    m = MetricValues(n_comi=value, mi=0.0, iric=0.0, info_gain=0.0, support=0.0, confidence=0.0)
    return MinedRule(key[0], key[1], RuleCounts(key[0], key[1], 1, 1, 1, 1), m, 0.5, 0.5)


class TestPercentToNic:
    @pytest.mark.parametrize("percent,expect", [(5, 0.33), (2, 0.43)])
    def test_table(self, percent, expect):
        assert percent_to_nic(percent, 8176) == pytest.approx(expect, abs=0.005)

    def test_full(self):
        assert percent_to_nic(100, 17) == 0.0

    @pytest.mark.parametrize("bad", [0, -1, 100.5])
    def test_range(self, bad):
        with pytest.raises(ValueError):
            percent_to_nic(bad, 100)


class TestNicFilter:
    def test_ten_percent_term_removed_at_five(self):
        g = 8176
        cutoff = percent_to_nic(5, g)
        assert cutoff == pytest.approx(0.33, abs=0.005)
        assert n_ic(0.10, g) == pytest.approx(0.26, abs=0.005)
        assert n_ic(0.10, g) < cutoff

    def test_small_dataset(self):
        # 20 genes: "common" on 10 (50%), "rare" on 1 (5%), "edge" exactly on 5%
        records = [{"A": {"root", "common"} if i < 10 else {"root"}} for i in range(20)]
        records[0]["A"] |= {"rare"}
        records[1]["A"] |= {"edge"}
        ts = tset(records, ("A",))
        out, removed = nic_filter(ts, percent_to_nic(5, 20))
        assert {r.term for r in removed} == {"root", "common"}
        assert out.term_ids() == {"rare", "edge"}
        assert len(out) == 20
        root = next(r for r in removed if r.term == "root")
        assert root.n_ic == 0.0 and root.gene_count == 20

    def test_zero_threshold_keeps_all(self):
        ts = tset([{"A": {"a"}, "B": {"b"}}, {"A": {"a"}}])
        out, removed = nic_filter(ts, 0.0)
        assert removed == [] and out is ts

    def test_p_one_removed_at_any_positive(self):
        ts = tset([{"A": {"a"}}, {"A": {"a", "c"}}], ("A",))
        _, removed = nic_filter(ts, 1e-9)
        assert [r.term for r in removed] == ["a"]

    def test_emptied_category_changes_cocategory(self):
        ts = tset([{"A": {"top"}, "B": {"b"}}, {"A": {"top", "x"}, "B": {"b", "c"}}, {"A": {"top"}}])
        out, _ = nic_filter(ts, 0.01)
        assert out.transactions[0].annotations == {"B": {"b"}}
        assert out.transactions[2].annotations == {}
        assert len(out) == 3
        assert cocategory_ids(ts, "A", "B") == {"g00000", "g00001"}
        assert cocategory_ids(out, "A", "B") == {"g00001"}


class TestSynthetic:
    def base(self):
        return tset([
            {"A": {"a1", "a2"}, "B": {"b1"}},
            {"A": {"a1"}, "B": {"b1", "b2", "b3"}},
            {"A": {"a3"}},
            {"B": {"b2"}},
        ])

    def test_shape_preserved(self):
        ts = self.base()
        syn = generate_synthetic(ts, SyntheticConfig(seed=3))
        assert len(syn) == len(ts)
        for a, b in zip(ts, syn):
            assert a.gene == b.gene
            for cat in ts.categories:
                assert len(a.terms(cat)) == len(b.terms(cat))
        assert syn.generalized

    def test_deterministic(self):
        ts = self.base()
        one = generate_synthetic(ts, SyntheticConfig(seed=11))
        two = generate_synthetic(ts, SyntheticConfig(seed=11))
        assert one == two
        assert repr(one) == repr(two)

    def test_seed_matters(self):
        ts = tset([{"A": {f"a{i % 7}"}, "B": {f"b{i % 5}"}} for i in range(60)])
        assert generate_synthetic(ts, SyntheticConfig(seed=1)) != generate_synthetic(ts, SyntheticConfig(seed=2))

    def test_retry_cap_shrinks_slot(self):
        ts = tset([{"A": {"a", "b", "c"}}, {"A": {"a"}}], ("A",))
        pools = {"A": ("a", "b", "c")}
        # two distinct terms cap the slot at 2; one draw round of mostly "a" leaves 1
        syn = generate_synthetic(ts, SyntheticConfig(seed=0, pools={"A": ("a",) * 50 + ("b",)}, max_retries=0))
        assert syn.transactions[0].terms("A") == {"a"}
        syn = generate_synthetic(ts, SyntheticConfig(seed=0, pools=pools))
        assert syn.transactions[0].terms("A") == {"a", "b", "c"}

    def test_pool_frequencies(self):
        # q holds 30% of occurrences; 10,000 single-term slots
        pool_counts = Counter(q=30, r=45, s=25)
        ts = tset([{"A": {["q", "r", "s"][i % 3]}} for i in range(10_000)], ("A",))
        pools = {"A": tuple(t for t in sorted(pool_counts) for _ in range(pool_counts[t]))}
        syn = generate_synthetic(ts, SyntheticConfig(seed=5, pools=pools))
        drawn = Counter(t for tr in syn for t in tr.terms("A"))
        share = drawn["q"] / sum(drawn.values())
        assert 0.25 <= share <= 0.35

    def test_occurrence_and_distinct_pools(self):
        ts = self.base()
        assert build_pools(ts)["A"] == ("a1", "a1", "a2", "a3")
        assert build_pools(ts, "distinct")["A"] == ("a1", "a2", "a3")
        with pytest.raises(ValueError):
            build_pools(ts, "uniform")

    def test_bad_seed(self):
        with pytest.raises(ValueError):
            SyntheticConfig(seed=2**64)


class TestSelectThreshold:
    def test_nearest_rank(self):
        null = [scored(v) for v in (0.5, 0.3, 0.1)]
        rep = select_ncomi_threshold([], null, 0.34)
        assert rep.threshold == 0.5
        assert rep.achieved_fpr == pytest.approx(1 / 3)

    def test_target_one(self):
        null = [scored(v) for v in (0.5, 0.3, 0.1)]
        assert select_ncomi_threshold([], null, 1.0).threshold == 0.1

    def test_all_zero_null(self):
        null = [scored(0.0) for _ in range(10)]
        rep = select_ncomi_threshold([], null, 0.1)
        assert rep.threshold > 0.0 and rep.threshold == math.nextafter(0.0, 1.0)
        assert rep.achieved_fpr == 0.0
        real = [scored(0.0), scored(1e-6), scored(-0.2)]
        assert [r.metrics.n_comi for r in apply_ncomi_filter(real, rep.threshold)] == [1e-6]

    def test_empty_null(self):
        with pytest.raises(DataError):
            select_ncomi_threshold([], [], 0.05)

    def test_counts_real_passing(self):
        rep = select_ncomi_threshold([scored(0.9), scored(0.2)], [scored(v / 10) for v in range(10)], 0.2)
        assert rep.threshold == 0.8
        assert rep.n_real_passing == 1

    @given(st.lists(st.floats(-1, 1), min_size=1, max_size=200), st.floats(0.001, 1.0))
    def test_achieved_within_target(self, values, target):
        rep = select_ncomi_threshold([], [scored(v) for v in values], target)
        assert rep.achieved_fpr <= target
        assert rep.achieved_fpr == sum(v >= rep.threshold for v in values) / len(values)
        # nearest rank: the next lower null score would overshoot the target
        lower = [v for v in set(values) if v < rep.threshold]
        if lower:
            assert sum(v >= max(lower) for v in values) / len(values) > target


class TestApplyFilter:
    def test_inclusive_boundary(self):
        rules = [scored(0.6), scored(0.5), scored(0.4)]
        assert [r.metrics.n_comi for r in apply_ncomi_filter(rules, 0.5)] == [0.6, 0.5]

    def test_zero_drops_negative(self):
        rules = [scored(-0.1), scored(0.0), scored(0.2)]
        assert [r.metrics.n_comi for r in apply_ncomi_filter(rules, 0.0)] == [0.0, 0.2]

    def test_above_max(self):
        assert apply_ncomi_filter([scored(0.3)], 0.31) == []


def planted(seed, n=300):
    rng = random.Random(seed)
    recs = []
    for _ in range(n):
        k = rng.randrange(6)
        a = {f"a{k}"} if rng.random() < 0.8 else {f"a{rng.randrange(6)}"}
        b = {f"b{k}"} if rng.random() < 0.8 else {f"b{rng.randrange(6)}"}
        a.add("aroot")
        b.add("broot")
        recs.append({"A": a, "B": b} if rng.random() < 0.9 else {"A": a})
    return tset(recs)


def test_dual_threshold_synergy():
    ts = planted(1)
    cfg = MiningConfig(("A", "B"), min_support=0.0)
    raw = mine(ts, cfg)
    filtered, _ = nic_filter(ts, 0.1)
    only_nic = mine(filtered, cfg)
    null_raw = mine(generate_synthetic(ts, SyntheticConfig(seed=9)), cfg)
    null_filtered = mine(generate_synthetic(filtered, SyntheticConfig(seed=9)), cfg)
    only_ncomi = apply_ncomi_filter(raw, max(select_ncomi_threshold(raw, null_raw, 0.05).threshold, 0))
    both = apply_ncomi_filter(only_nic, max(select_ncomi_threshold(only_nic, null_filtered, 0.05).threshold, 0))

    def mean_nic(rules):
        return fmean((r.n_ic_x + r.n_ic_y) / 2 for r in rules)

    def mean_nc(rules):
        return fmean(r.metrics.n_comi for r in rules)

    assert mean_nic(only_nic) >= mean_nic(raw)
    assert mean_nc(only_ncomi) >= mean_nc(raw)
    assert mean_nc(both) >= max(mean_nc(only_nic), mean_nc(only_ncomi))


def test_term_stats_unchanged_by_filter():
    ts = planted(2)
    filtered, _ = nic_filter(ts, 0.1)
    before, after = term_stats(ts), term_stats(filtered)
    for t, s in after.items():
        assert s == before[t]
