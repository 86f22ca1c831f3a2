"""OBO parsing and ancestor/descendant closure over typed relation edges."""

from __future__ import annotations

import logging
import threading
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, TextIO

from crossmine.errors import OntologyError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RelationKind:
    name: str
    is_transitive: bool = True


IS_A = RelationKind("is_a", True)
PART_OF = RelationKind("part_of", True)
DEFAULT_KINDS = frozenset({IS_A, PART_OF})


@dataclass(frozen=True)
class Term:
    id: str
    name: str = ""
    namespace: str = ""
    obsolete: bool = False


Edge = tuple  # (child id, RelationKind, parent id)


@dataclass
class ValidationReport:
    n_terms: int
    n_edges: int
    cycles: list = field(default_factory=list)
    dangling_edges: int = 0

    @property
    def valid(self) -> bool:
        return not self.cycles and self.dangling_edges == 0


class OntologyGraph:
    """Frozen term graph for one ontology category.

    Closure queries are memoized per (term, kind set). The cache is guarded
    by a lock so a graph can be shared between threads.
    """

    def __init__(
        self,
        category: str,
        terms: Mapping[str, Term],
        edges: Iterable[Edge] = (),
        obsolete_ids: Iterable[str] = (),
        parse_warnings: Mapping[str, int] | None = None,
    ):
        self.category = category
        self._terms = dict(terms)
        self._edges = frozenset(edges)
        self.obsolete_ids = frozenset(obsolete_ids)
        self.parse_warnings = Counter(parse_warnings or {})
        self._kinds = {}
        self._parents = defaultdict(list)
        self._children = defaultdict(list)
        for child, kind, parent in sorted(self._edges, key=_edge_key):
            seen = self._kinds.setdefault(kind.name, kind)
            if seen != kind:
                raise OntologyError(
                    f"relation {kind.name!r} declared both transitive and not"
                )
            self._parents[child].append((kind.name, parent))
            self._children[parent].append((kind.name, child))
        self._kinds.setdefault(IS_A.name, IS_A)
        self._cache = {}
        self._lock = threading.Lock()

    @property
    def terms(self) -> Mapping[str, Term]:
        return self._terms

    @property
    def edges(self) -> frozenset:
        return self._edges

    @property
    def relation_kinds(self) -> dict:
        return dict(self._kinds)

    def __contains__(self, term_id) -> bool:
        return term_id in self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self):
        return (
            f"OntologyGraph({self.category!r}, {len(self._terms)} terms, "
            f"{len(self._edges)} edges)"
        )

    def name_of(self, term_id: str) -> str:
        return self._terms[term_id].name

    def parents(self, term_id: str, kinds=None) -> list:
        names = None if kinds is None else self._kind_names(kinds)
        return [p for k, p in self._parents.get(term_id, ()) if names is None or k in names]

    def children(self, term_id: str, kinds=None) -> list:
        names = None if kinds is None else self._kind_names(kinds)
        return [c for k, c in self._children.get(term_id, ()) if names is None or k in names]

    def _kind_names(self, kinds) -> frozenset:
        names = []
        for kind in kinds:
            name = kind.name if isinstance(kind, RelationKind) else str(kind)
            known = self._kinds.get(name)
            if known is not None and not known.is_transitive:
                raise OntologyError(f"relation {name!r} is not transitive")
            if isinstance(kind, RelationKind) and not kind.is_transitive:
                raise OntologyError(f"relation {name!r} is not transitive")
            names.append(name)
        return frozenset(names)

    def _closure(self, term_id: str, kinds, upward: bool) -> frozenset:
        if term_id not in self._terms:
            raise OntologyError(f"unknown term {term_id!r} in {self.category!r}")
        names = self._kind_names(DEFAULT_KINDS if kinds is None else kinds)
        key = (term_id, names, upward)
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        links = self._parents if upward else self._children
        found = set()
        stack = [term_id]
        while stack:
            node = stack.pop()
            for kind, nxt in links.get(node, ()):
                if kind in names and nxt not in found:
                    found.add(nxt)
                    stack.append(nxt)
        found.discard(term_id)
        result = frozenset(found)
        with self._lock:
            self._cache[key] = result
        return result

    def ancestors(self, term_id: str, kinds=None) -> frozenset:
        return self._closure(term_id, kinds, upward=True)

    def descendants(self, term_id: str, kinds=None) -> frozenset:
        return self._closure(term_id, kinds, upward=False)


def _edge_key(edge):
    child, kind, parent = edge
    return (child, kind.name, parent)


def ancestors(graph: OntologyGraph, t: str, kinds=DEFAULT_KINDS) -> frozenset:
    """Terms reachable from ``t`` by one or more edges of ``kinds``; ``t`` excluded."""
    return graph.ancestors(t, kinds)


def descendants(graph: OntologyGraph, t: str, kinds=DEFAULT_KINDS) -> frozenset:
    return graph.descendants(t, kinds)


def validate(graph: OntologyGraph) -> ValidationReport:
    """Report cycles on the transitive subgraph and edges with missing endpoints."""
    terms = graph.terms
    dangling = 0
    succ = defaultdict(set)
    for child, kind, parent in graph.edges:
        if child not in terms or parent not in terms:
            dangling += 1
            continue
        if kind.is_transitive:
            succ[child].add(parent)
    cycles = [sorted(c) for c in _strongly_connected(succ) if len(c) > 1]
    cycles += [[n] for n in sorted(succ) if n in succ[n]]
    cycles.sort()
    return ValidationReport(len(terms), len(graph.edges), cycles, dangling)


def _strongly_connected(succ) -> list:
    # iterative Tarjan
    index = {}
    low = {}
    on_stack = set()
    stack = []
    out = []
    counter = 0
    nodes = sorted(set(succ) | {p for ps in succ.values() for p in ps})
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(sorted(succ.get(root, ()))))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(sorted(succ.get(nxt, ())))))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                out.append(comp)
    return out


RECOGNIZED_TAGS = frozenset({"id", "name", "namespace", "is_a", "relationship", "is_obsolete"})


def _strip_value(value: str) -> str:
    # drop trailing "! comment" and "{qualifiers}"
    bang = value.find(" !")
    if bang >= 0:
        value = value[:bang]
    if value.endswith("}") and "{" in value:
        value = value[: value.rfind("{")]
    return value.strip()


def parse_obo(
    source: TextIO,
    category: str,
    transitive=("is_a", "part_of"),
    namespace: str | None = None,
) -> OntologyGraph:
    """Parse the [Term] stanzas of an OBO flat file into an OntologyGraph.

    ``transitive`` names the relation kinds flagged transitive; other
    ``relationship:`` kinds are kept as non-transitive edges. With
    ``namespace`` set only terms of that namespace are kept. Edges to terms
    that are not in the graph (obsolete, filtered out, or absent) are
    dropped and counted under ``parse_warnings["dangling_edge"]``.
    """
    transitive = frozenset(transitive) | {"is_a"}
    warnings = Counter()
    stanzas = []
    current = None
    in_term = False
    for lineno, raw in enumerate(source, start=1):
        line = raw.rstrip("\r\n").strip()
        if not line or line.startswith("!"):
            continue
        if line.startswith("[") and line.endswith("]"):
            if current is not None:
                stanzas.append(current)
            in_term = line == "[Term]"
            current = {"line": lineno, "id": None, "tags": []} if in_term else None
            continue
        if not in_term:
            continue
        tag, sep, value = line.partition(":")
        if not sep:
            raise OntologyError(f"expected 'tag: value', got {line!r}", lineno)
        tag = tag.strip()
        value = _strip_value(value)
        if tag not in RECOGNIZED_TAGS:
            warnings["unrecognized_tag"] += 1
            continue
        if tag == "id":
            if current["id"] is not None:
                raise OntologyError("stanza has two id tags", lineno)
            current["id"] = value
        else:
            current["tags"].append((lineno, tag, value))
    if current is not None:
        stanzas.append(current)

    terms = {}
    obsolete = set()
    raw_edges = []
    for st in stanzas:
        tid = st["id"]
        if not tid:
            raise OntologyError("[Term] stanza without id", st["line"])
        if tid in terms or tid in obsolete:
            raise OntologyError(f"duplicate term id {tid!r}", st["line"])
        name = ns = ""
        is_obsolete = False
        links = []
        for lineno, tag, value in st["tags"]:
            if tag == "name":
                name = value
            elif tag == "namespace":
                ns = value
            elif tag == "is_obsolete":
                is_obsolete = value.lower() == "true"
            elif tag == "is_a":
                links.append(("is_a", value, lineno))
            elif tag == "relationship":
                parts = value.split()
                if len(parts) < 2:
                    raise OntologyError(f"relationship needs kind and target: {value!r}", lineno)
                links.append((parts[0], parts[1], lineno))
        if is_obsolete:
            obsolete.add(tid)
            warnings["obsolete_term"] += 1
            continue
        if namespace is not None and ns != namespace:
            continue
        terms[tid] = Term(tid, name, ns)
        raw_edges.extend((tid, kind, parent) for kind, parent, _ in links)

    edges = set()
    for child, kind, parent in raw_edges:
        if parent not in terms:
            warnings["dangling_edge"] += 1
            continue
        edges.add((child, RelationKind(kind, kind in transitive), parent))

    graph = OntologyGraph(category, terms, edges, obsolete, warnings)
    report = validate(graph)
    if report.cycles:
        raise OntologyError(f"cycle among transitive relations: {report.cycles[0]}")
    if warnings:
        log.warning("%s: parse warnings %s", category, dict(sorted(warnings.items())))
    return graph


def to_obo(graph: OntologyGraph) -> str:
    """Serialize a graph back into the supported OBO subset."""
    out = ["format-version: 1.2", ""]
    by_child = defaultdict(list)
    for child, kind, parent in graph.edges:
        by_child[child].append((kind.name, parent))
    for tid in sorted(graph.terms):
        term = graph.terms[tid]
        out.append("[Term]")
        out.append(f"id: {tid}")
        if term.name:
            out.append(f"name: {term.name}")
        if term.namespace:
            out.append(f"namespace: {term.namespace}")
        for kind, parent in sorted(by_child[tid]):
            if kind == "is_a":
                out.append(f"is_a: {parent}")
            else:
                out.append(f"relationship: {kind} {parent}")
        out.append("")
    return "\n".join(out)
