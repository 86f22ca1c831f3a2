"""Term and rule measures: N_IC, MI, N_COMI, IRIC, information gain, support, confidence.

All logarithms are base 2. Rule probabilities are taken over the co-category
transactions (genes annotated in both ontologies of the rule), never over
the whole transaction set.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from crossmine.errors import DataError
from crossmine.transactions import TransactionSet

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class TermStats:
    term: str
    gene_count_closed: int
    probability: float
    n_ic: float


@dataclass(frozen=True)
class RuleCounts:
    x: str
    y: str
    n_x: int
    n_y: int
    n_xy: int
    n_cocat: int

    def __post_init__(self):
        if self.n_cocat < 1:
            raise ValueError("n_cocat must be >= 1")
        if not (0 <= self.n_xy <= min(self.n_x, self.n_y) and max(self.n_x, self.n_y) <= self.n_cocat):
            raise ValueError(f"inconsistent counts {self}")

    def swapped(self) -> "RuleCounts":
        return RuleCounts(self.y, self.x, self.n_y, self.n_x, self.n_xy, self.n_cocat)


@dataclass(frozen=True)
class IricWeights:
    """Per-ontology weights; ``alpha`` goes with the first category of a pair."""

    alpha: float = 0.5
    beta: float = 0.5

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or abs(self.alpha + self.beta - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights must be non-negative and sum to 1, got {self.alpha}, {self.beta}")

    @classmethod
    def from_alpha(cls, alpha: float) -> "IricWeights":
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {alpha}")
        return cls(alpha, 1.0 - alpha)


@dataclass(frozen=True)
class MetricValues:
    n_comi: float
    mi: float
    iric: float
    info_gain: float | None
    support: float
    confidence: float


def gene_counts(ts: TransactionSet) -> Counter:
    """Number of transactions holding each term (anywhere)."""
    counts = Counter()
    for tr in ts.transactions:
        for terms in tr.annotations.values():
            counts.update(terms)
    return counts


def term_probability(ts: TransactionSet, t: str) -> float:
    """Share of genes annotated to ``t`` or any descendant.

    On a generalized set this is a plain count: each gene counts once even
    when it is annotated to several descendants.
    """
    if not ts.generalized:
        raise DataError("term_probability needs a generalized transaction set")
    n = sum(1 for tr in ts.transactions if any(t in terms for terms in tr.annotations.values()))
    if n == 0:
        raise DataError(f"term {t!r} occurs in no transaction")
    return n / len(ts)


def n_ic(probability: float, g_total: int) -> float:
    """Normalized information content, ``-log2 p / log2 |G|``."""
    if g_total < 2:
        raise ValueError(f"need at least 2 genes, got {g_total}")
    if not (1.0 / g_total <= probability <= 1.0):
        raise ValueError(f"probability {probability} outside [1/{g_total}, 1]")
    if probability == 1.0:
        return 0.0
    # rounding in 1/|G| can overshoot 1 by an ulp
    return min(-math.log2(probability) / math.log2(g_total), 1.0)


def term_stats(ts: TransactionSet) -> dict:
    """TermStats for every term of a generalized set, keyed by term id."""
    if not ts.generalized:
        raise DataError("term_stats needs a generalized transaction set")
    g = len(ts)
    if g < 2:
        raise DataError(f"N_IC needs at least 2 genes, transaction set has {g}")
    out = {}
    for term, count in gene_counts(ts).items():
        p = count / g
        out[term] = TermStats(term, count, p, n_ic(p, g))
    return out


def rule_counts(ts: TransactionSet, x: str, y: str) -> RuleCounts:
    cat_x, cat_y = ts.category_of(x), ts.category_of(y)
    if cat_x == cat_y:
        raise DataError(f"{x} and {y} are both in {cat_x}; rules must cross ontologies")
    n_x = n_y = n_xy = n_cocat = 0
    for tr in ts.transactions:
        tx, ty = tr.terms(cat_x), tr.terms(cat_y)
        if not tx or not ty:
            continue
        n_cocat += 1
        has_x, has_y = x in tx, y in ty
        n_x += has_x
        n_y += has_y
        n_xy += has_x and has_y
    if n_cocat == 0:
        raise DataError(f"no transactions annotated in both {cat_x} and {cat_y}")
    return RuleCounts(x, y, n_x, n_y, n_xy, n_cocat)


def _lift(c: RuleCounts) -> float:
    # one correctly rounded int division, so independence gives exactly 1.0
    return (c.n_xy * c.n_cocat) / (c.n_x * c.n_y)


def _entropy_term(n: int, total: int) -> float:
    # -p log2 p written as p * log2(1/p) with 1/p from exact ints
    if n == 0 or n == total:
        return 0.0
    return (n / total) * math.log2(total / n)


def mi(counts: RuleCounts) -> float:
    """Pointwise rule mutual information ``p(xy) log2(p(xy) / (p(x) p(y)))``."""
    if counts.n_xy == 0:
        return 0.0
    return (counts.n_xy / counts.n_cocat) * math.log2(_lift(counts))


def n_comi(counts: RuleCounts) -> float:
    """MI divided by the smaller of ``-p(x) log2 p(x)`` and ``-p(y) log2 p(y)``.

    Negative values (negative association) are returned as is. Zero when
    the rule never co-occurs or when either term is absent from, or present
    in, every co-category transaction.
    """
    if counts.n_xy == 0:
        return 0.0
    denom = min(_entropy_term(counts.n_x, counts.n_cocat), _entropy_term(counts.n_y, counts.n_cocat))
    if denom == 0.0:
        return 0.0
    return mi(counts) / denom


def iric(nic_x: float, nic_y: float, ncomi: float, w: IricWeights = IricWeights()) -> float:
    if not isinstance(w, IricWeights):
        raise TypeError("weights must be IricWeights")
    w.__post_init__()
    for v in (nic_x, nic_y):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"N_IC value {v} outside [0, 1]")
    return (w.alpha * nic_x + w.beta * nic_y) * max(ncomi, 0.0)


def information_gain(counts: RuleCounts) -> float | None:
    """``log2`` of lift; None when x and y never co-occur."""
    if counts.n_xy == 0:
        return None
    return math.log2(_lift(counts))


def classic_measures(counts: RuleCounts) -> tuple:
    support = counts.n_xy / counts.n_cocat
    confidence = counts.n_xy / counts.n_x if counts.n_x else 0.0
    return support, confidence


def score(counts: RuleCounts, nic_x: float, nic_y: float, w: IricWeights = IricWeights()) -> MetricValues:
    """All rule measures at once. ``nic_x``/``nic_y`` are already weight-ordered by the caller."""
    nc = n_comi(counts)
    support, confidence = classic_measures(counts)
    return MetricValues(
        n_comi=nc,
        mi=mi(counts),
        iric=iric(nic_x, nic_y, nc, w),
        info_gain=information_gain(counts),
        support=support,
        confidence=confidence,
    )
