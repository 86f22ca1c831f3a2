"""Gene-level transactions built from annotation rows, and their generalization."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence, TextIO

from crossmine.errors import DataError
from crossmine.ontology import DEFAULT_KINDS, OntologyGraph


@dataclass(frozen=True)
class Transaction:
    gene: str
    annotations: Mapping[str, frozenset]

    def terms(self, category: str) -> frozenset:
        return self.annotations.get(category, frozenset())

    def has(self, category: str) -> bool:
        return bool(self.annotations.get(category))


@dataclass(frozen=True)
class TransactionSet:
    transactions: tuple
    categories: tuple
    generalized: bool = False

    def __post_init__(self):
        genes = [tr.gene for tr in self.transactions]
        if len(set(genes)) != len(genes):
            raise DataError("transaction set has duplicate gene ids")

    def __len__(self) -> int:
        return len(self.transactions)

    def __iter__(self):
        return iter(self.transactions)

    @property
    def genes(self) -> list:
        return [tr.gene for tr in self.transactions]

    @cached_property
    def _term_category(self) -> dict:
        out = {}
        for tr in self.transactions:
            for cat, terms in tr.annotations.items():
                for t in terms:
                    out[t] = cat
        return out

    def category_of(self, term: str) -> str:
        try:
            return self._term_category[term]
        except KeyError:
            raise DataError(f"term {term!r} occurs in no transaction") from None

    def term_ids(self, category: str | None = None) -> set:
        return {t for t, c in self._term_category.items() if category is None or c == category}

    def check_category(self, label: str):
        if label not in self.categories:
            raise DataError(f"unknown category {label!r}; have {list(self.categories)}")


def _make_transaction(gene: str, annotations: Mapping[str, Iterable[str]]) -> Transaction:
    return Transaction(gene, {c: frozenset(ts) for c, ts in annotations.items() if ts})


def load_annotations(source: TextIO, graphs: Sequence[OntologyGraph]) -> TransactionSet:
    """Merge ``gene<TAB>term`` rows into one transaction per gene.

    Each term is assigned to the single graph that contains it.
    """
    owner = {}
    ambiguous = set()
    for g in graphs:
        for tid in g.terms:
            if tid in owner:
                ambiguous.add(tid)
            owner[tid] = g.category
    obsolete = {t: g.category for g in graphs for t in g.obsolete_ids}

    merged = {}
    for lineno, raw in enumerate(source, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) < 2 or not cols[0].strip() or not cols[1].strip():
            raise DataError(f"annotations line {lineno}: expected gene<TAB>term, got {line!r}")
        gene, term = cols[0].strip(), cols[1].strip()
        if term in ambiguous:
            raise DataError(f"annotations line {lineno}: term {term} is in several ontologies")
        cat = owner.get(term)
        if cat is None:
            why = f"obsolete in {obsolete[term]}" if term in obsolete else "found in no ontology"
            raise DataError(f"annotations line {lineno}: term {term} {why}: {line!r}")
        merged.setdefault(gene, {}).setdefault(cat, set()).add(term)

    transactions = tuple(_make_transaction(g, ann) for g, ann in merged.items())
    return TransactionSet(transactions, tuple(g.category for g in graphs), generalized=False)


def generalize(ts: TransactionSet, graphs: Sequence[OntologyGraph], kinds=DEFAULT_KINDS) -> TransactionSet:
    """Add every ancestor (over ``kinds``) of every annotated term.

    Re-applying to an already generalized set changes nothing, so it is
    allowed.
    """
    by_cat = {g.category: g for g in graphs}
    out = []
    for tr in ts.transactions:
        ann = {}
        for cat, terms in tr.annotations.items():
            graph = by_cat.get(cat)
            if graph is None:
                raise DataError(f"no ontology registered for category {cat!r}")
            closed = set(terms)
            for t in terms:
                if t not in graph:
                    raise DataError(f"gene {tr.gene}: term {t} missing from {cat}")
                closed |= graph.ancestors(t, kinds)
            ann[cat] = closed
        out.append(_make_transaction(tr.gene, ann))
    return TransactionSet(tuple(out), ts.categories, generalized=True)


def cocategory_ids(ts: TransactionSet, cat_a: str, cat_b: str) -> frozenset:
    """Genes annotated in both categories."""
    ts.check_category(cat_a)
    ts.check_category(cat_b)
    return frozenset(tr.gene for tr in ts.transactions if tr.has(cat_a) and tr.has(cat_b))
