"""Term filtering by N_IC and Monte Carlo calibration of the N_COMI cutoff."""

from __future__ import annotations

import bisect
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from crossmine.errors import DataError
from crossmine.metrics import n_ic, term_stats
from crossmine.miner import mine
from crossmine.transactions import Transaction, TransactionSet

POOL_MODES = ("occurrence", "distinct")


@dataclass(frozen=True)
class RemovedTerm:
    term: str
    category: str
    gene_count: int
    n_ic: float


def nic_filter(ts: TransactionSet, threshold: float):
    """Drop every term with N_IC below ``threshold`` from all transactions.

    Transactions keep their slot even if a category empties out. Returns the
    filtered set and the removed terms sorted by (category, term).
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"N_IC threshold must be in [0, 1], got {threshold}")
    stats = term_stats(ts)
    drop = {t for t, s in stats.items() if s.n_ic < threshold}
    removed = sorted(
        (RemovedTerm(t, ts.category_of(t), stats[t].gene_count_closed, stats[t].n_ic) for t in drop),
        key=lambda r: (r.category, r.term),
    )
    if not drop:
        return ts, removed
    kept = []
    for tr in ts.transactions:
        ann = {c: terms - drop for c, terms in tr.annotations.items()}
        kept.append(Transaction(tr.gene, {c: t for c, t in ann.items() if t}))
    return TransactionSet(tuple(kept), ts.categories, ts.generalized), removed


def percent_to_nic(percent: float, g_total: int) -> float:
    """N_IC of a term annotated to ``percent`` % of ``g_total`` genes."""
    if not 0.0 < percent <= 100.0:
        raise ValueError(f"percent must be in (0, 100], got {percent}")
    return n_ic(percent / 100.0, g_total)


def build_pools(ts: TransactionSet, mode: str = "occurrence") -> dict:
    """Per-category sampling pools, sorted so they do not depend on set iteration order."""
    if mode not in POOL_MODES:
        raise ValueError(f"pool mode must be one of {POOL_MODES}")
    pools = {}
    for cat in ts.categories:
        occ = Counter()
        for tr in ts.transactions:
            occ.update(tr.terms(cat))
        if not occ:
            continue
        if mode == "occurrence":
            pools[cat] = tuple(t for t in sorted(occ) for _ in range(occ[t]))
        else:
            pools[cat] = tuple(sorted(occ))
    return pools


@dataclass(frozen=True)
class SyntheticConfig:
    seed: int
    pools: dict | None = None
    pool_mode: str = "occurrence"
    max_retries: int = 64

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.pools is not None and any(len(p) == 0 for p in self.pools.values()):
            raise ValueError("sampling pools must be non-empty")


def generate_synthetic(ts: TransactionSet, cfg: SyntheticConfig) -> TransactionSet:
    """Null transaction set: same genes and per-category set sizes, terms drawn with replacement.

    A slot that keeps drawing duplicates is redrawn up to ``cfg.max_retries``
    rounds and then left smaller. Draws come from one numpy stream seeded by
    ``cfg.seed``, consumed in transaction order.
    """
    if not ts.generalized:
        raise DataError("synthetic nulls are drawn from a generalized transaction set")
    pools = cfg.pools if cfg.pools is not None else build_pools(ts, cfg.pool_mode)
    rng = np.random.default_rng(cfg.seed)
    arrays = {c: np.asarray(p, dtype=object) for c, p in pools.items()}
    distinct = {c: len(set(p)) for c, p in pools.items()}
    out = []
    for tr in ts.transactions:
        ann = {}
        for cat in ts.categories:
            size = len(tr.terms(cat))
            if size == 0:
                continue
            pool = arrays.get(cat)
            if pool is None:
                raise DataError(f"no sampling pool for category {cat!r}")
            want = min(size, distinct[cat])
            picked = set()
            for _ in range(cfg.max_retries + 1):
                idx = rng.integers(0, len(pool), size=want - len(picked))
                picked.update(pool[idx])
                if len(picked) >= want:
                    break
            ann[cat] = frozenset(picked)
        out.append(Transaction(tr.gene, ann))
    return TransactionSet(tuple(out), ts.categories, generalized=True)


@dataclass
class ThresholdReport:
    target_fpr: float
    threshold: float
    null_scores: list = field(repr=False)
    achieved_fpr: float
    n_real: int = 0
    n_real_passing: int = 0

    def summary(self) -> dict:
        return {
            "target_fpr": self.target_fpr,
            "threshold": self.threshold,
            "achieved_fpr": self.achieved_fpr,
            "n_null_rules": len(self.null_scores),
            "n_real_rules": self.n_real,
            "n_real_passing": self.n_real_passing,
        }


def select_ncomi_threshold(real_rules: Sequence, null_rules: Sequence, target_fpr: float) -> ThresholdReport:
    """Smallest null N_COMI score v with share(null >= v) <= ``target_fpr``.

    Nearest rank, no interpolation. If even the top null score passes too
    many null rules (ties), the cutoff moves just above it.
    """
    if not null_rules:
        raise DataError("no rules mined from the synthetic null; cannot calibrate")
    if not 0.0 < target_fpr <= 1.0:
        raise ValueError(f"target FPR must be in (0, 1], got {target_fpr}")
    scores = sorted(r.metrics.n_comi for r in null_rules)
    n = len(scores)
    threshold = None
    for v in sorted(set(scores)):
        if (n - bisect.bisect_left(scores, v)) / n <= target_fpr:
            threshold = v
            break
    if threshold is None:
        threshold = math.nextafter(scores[-1], math.inf)
    achieved = (n - bisect.bisect_left(scores, threshold)) / n
    passing = sum(1 for r in real_rules if r.metrics.n_comi >= threshold)
    return ThresholdReport(target_fpr, threshold, scores, achieved, len(real_rules), passing)


def apply_ncomi_filter(rules: Sequence, threshold: float) -> list:
    return [r for r in rules if r.metrics.n_comi >= threshold]


def calibrate(ts: TransactionSet, mining_config, real_rules: Sequence, target_fpr: float, synth: SyntheticConfig):
    """Mine a synthetic null drawn from ``ts`` and pick the N_COMI cutoff.

    Returns ``(report, null_rules)``.
    """
    null_ts = generate_synthetic(ts, synth)
    null_rules = mine(null_ts, mining_config)
    return select_ncomi_threshold(real_rules, null_rules, target_fpr), null_rules
