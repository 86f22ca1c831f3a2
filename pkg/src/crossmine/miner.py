"""Frequent cross-ontology pair mining and rule ranking.

Counting follows the two passes of Apriori restricted to single-term
antecedents and consequents: frequent single terms first, then pairs of
frequent terms from opposite categories. Each term's posting list over the
co-category transactions is held as an int bitmap, so a pair count is one
AND plus a popcount.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

from crossmine.errors import DataError
from crossmine.metrics import IricWeights, MetricValues, RuleCounts, score, term_stats
from crossmine.transactions import TransactionSet

log = logging.getLogger(__name__)

RANK_KEYS = ("iric", "n_comi", "mi", "info_gain", "support", "confidence")


@dataclass(frozen=True)
class MiningConfig:
    category_pair: tuple
    min_support: float = 0.001
    emit_both_directions: bool = True
    nic_threshold: float = 0.0
    weights: IricWeights = field(default_factory=IricWeights)
    threads: int = 1

    def __post_init__(self):
        if not 0.0 <= self.min_support <= 1.0:
            raise ValueError(f"min_support must be in [0, 1], got {self.min_support}")
        if len(self.category_pair) != 2 or self.category_pair[0] == self.category_pair[1]:
            raise ValueError(f"category_pair needs two distinct labels, got {self.category_pair}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass(frozen=True)
class MinedRule:
    antecedent: str
    consequent: str
    counts: RuleCounts
    metrics: MetricValues
    n_ic_x: float
    n_ic_y: float
    rank: int = 0

    @property
    def key(self) -> tuple:
        return (self.antecedent, self.consequent)


def posting_bitmaps(ts: TransactionSet, cat_a: str, cat_b: str):
    """Bitmaps of co-category transaction positions for every term of both categories."""
    postings = {cat_a: {}, cat_b: {}}
    n = 0
    for tr in ts.transactions:
        ta, tb = tr.terms(cat_a), tr.terms(cat_b)
        if not ta or not tb:
            continue
        bit = 1 << n
        n += 1
        for cat, terms in ((cat_a, ta), (cat_b, tb)):
            table = postings[cat]
            for t in terms:
                table[t] = table.get(t, 0) | bit
    return postings[cat_a], postings[cat_b], n


def min_count_for(min_support: float, n_cocat: int) -> int:
    """Smallest pair count c >= 1 with c / n_cocat >= min_support."""
    c = max(1, int(min_support * n_cocat) - 1)
    while c / n_cocat < min_support:
        c += 1
    return c


def _count_block(block, frequent_b, min_count):
    out = []
    for a, pa in block:
        for b, pb in frequent_b:
            n_xy = (pa & pb).bit_count()
            if n_xy >= min_count:
                out.append((a, b, n_xy))
    return out


def mine(ts: TransactionSet, config: MiningConfig) -> list:
    """Mine every cross-category rule whose co-category support reaches ``min_support``.

    Pairs that never co-occur are not rules, even at ``min_support == 0``.
    Output is sorted by (antecedent, consequent) and does not depend on
    ``config.threads``.
    """
    if not ts.generalized:
        raise DataError("mine needs a generalized transaction set")
    cat_a, cat_b = config.category_pair
    ts.check_category(cat_a)
    ts.check_category(cat_b)
    post_a, post_b, n_cocat = posting_bitmaps(ts, cat_a, cat_b)
    if n_cocat == 0:
        raise DataError(f"no co-annotated transactions for {cat_a} and {cat_b}")

    min_count = min_count_for(config.min_support, n_cocat)
    # apriori pruning: n_xy <= n_x, so infrequent singletons cannot pair
    freq_a = sorted((t, p) for t, p in post_a.items() if p.bit_count() >= min_count)
    freq_b = sorted((t, p) for t, p in post_b.items() if p.bit_count() >= min_count)

    if config.threads > 1 and len(freq_a) > 1:
        size = -(-len(freq_a) // config.threads)
        blocks = [freq_a[i : i + size] for i in range(0, len(freq_a), size)]
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            found = [hit for part in pool.map(_count_block, blocks, [freq_b] * len(blocks), [min_count] * len(blocks)) for hit in part]
    else:
        found = _count_block(freq_a, freq_b, min_count)

    stats = term_stats(ts)
    w = config.weights
    rules = []
    for a, b, n_xy in found:
        counts = RuleCounts(a, b, post_a[a].bit_count(), post_b[b].bit_count(), n_xy, n_cocat)
        nic_a, nic_b = stats[a].n_ic, stats[b].n_ic
        metrics_ab = score(counts, nic_a, nic_b, w)
        if config.emit_both_directions or a < b:
            rules.append(MinedRule(a, b, counts, metrics_ab, nic_a, nic_b))
        if config.emit_both_directions or b < a:
            swapped = counts.swapped()
            # alpha stays with category A whichever side the term sits on
            rules.append(MinedRule(b, a, swapped, score(swapped, nic_a, nic_b, w), nic_b, nic_a))
    rules.sort(key=lambda r: r.key)
    log.debug("mined %d rules from %d co-category transactions", len(rules), n_cocat)
    return rules


def metric_value(rule: MinedRule, key: str):
    if key not in RANK_KEYS:
        raise ValueError(f"unknown rank key {key!r}; choose from {RANK_KEYS}")
    return getattr(rule.metrics, key)


def rank(rules: Sequence[MinedRule], key: str = "iric") -> list:
    """Order by ``key`` descending, ties by (antecedent, consequent); assign ranks 1..n.

    Rules whose value is undefined (information gain with no co-occurrence)
    are left out.
    """
    if key not in RANK_KEYS:
        raise ValueError(f"unknown rank key {key!r}; choose from {RANK_KEYS}")
    scored = [r for r in rules if metric_value(r, key) is not None]
    scored.sort(key=lambda r: (-metric_value(r, key), r.antecedent, r.consequent))
    return [replace(r, rank=i) for i, r in enumerate(scored, start=1)]


@dataclass
class OverlapReport:
    key_a: str
    key_b: str
    k: int
    top_a: list
    top_b: list
    intersection: int
    jaccard: float

    def as_dict(self) -> dict:
        return {
            "key_a": self.key_a,
            "key_b": self.key_b,
            "k": self.k,
            "intersection": self.intersection,
            "jaccard": self.jaccard,
            "top_a": [list(k) for k in self.top_a],
            "top_b": [list(k) for k in self.top_b],
        }


def compare_rankings(rules: Sequence[MinedRule], key_a: str = "iric", key_b: str = "info_gain", k: int = 100) -> OverlapReport:
    """Top-k overlap of two rankings. ``k`` is capped at the number of rules."""
    ra, rb = rank(rules, key_a), rank(rules, key_b)
    k = min(k, len(ra), len(rb))
    top_a = [r.key for r in ra[:k]]
    top_b = [r.key for r in rb[:k]]
    sa, sb = set(top_a), set(top_b)
    union = sa | sb
    inter = len(sa & sb)
    return OverlapReport(key_a, key_b, k, top_a, top_b, inter, inter / len(union) if union else 1.0)
