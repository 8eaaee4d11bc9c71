"""Rooted specialization hierarchies and ontology-driven query refinement.

An ontology is a rooted DAG of terms connected by parent -> child
specialization edges.  Terms may carry a short alias so that a hierarchy of
full names (e.g. "Vertebrates") can match abbreviated context attributes
(e.g. "Ve").
"""

from __future__ import annotations

import graphlib
import json
from collections import deque
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .context import Attribute, FormalContext
from .errors import OntologyError

if TYPE_CHECKING:  # pragma: no cover
    from .retrieval import Query

#: Sentinel for unbounded traversal depth.
UNLIMITED = None


@dataclass(frozen=True)
class RefinementReport:
    """What a refinement pass did to a query."""

    mode: str
    added: frozenset[Attribute]
    dropped_candidates: frozenset[str]
    hops_used: int | None
    skipped_terms: frozenset[str] = field(default_factory=frozenset)


class Ontology:
    """An immutable rooted DAG of terms under a specialization order."""

    __slots__ = ("prefix", "root", "terms", "_parents", "_children", "_alias_of", "_resolve")

    def __init__(
        self,
        prefix: str,
        root: str,
        edges: list[tuple[str, str]],
        aliases: dict[str, str] | None = None,
    ):
        aliases = dict(aliases or {})
        terms = {root}
        for parent, child in edges:
            terms.add(parent)
            terms.add(child)
        children: dict[str, list[str]] = {t: [] for t in terms}
        parents: dict[str, list[str]] = {t: [] for t in terms}
        seen_edges = set()
        for parent, child in edges:
            if (parent, child) in seen_edges:
                raise OntologyError(f"duplicate edge: {parent!r} -> {child!r}")
            seen_edges.add((parent, child))
            children[parent].append(child)
            parents[child].append(parent)
        # cycle check; TopologicalSorter names a witness node
        try:
            graphlib.TopologicalSorter(
                {t: set(parents[t]) for t in terms}
            ).prepare()
        except graphlib.CycleError as exc:
            raise OntologyError(f"cycle detected through: {exc.args[1]}") from exc
        reachable = {root}
        queue = deque([root])
        while queue:
            for c in children[queue.popleft()]:
                if c not in reachable:
                    reachable.add(c)
                    queue.append(c)
        stranded = terms - reachable
        if stranded:
            raise OntologyError(f"terms unreachable from root: {sorted(stranded)}")
        resolve: dict[str, str] = {}
        for t in sorted(terms):
            resolve[t] = t
        for name, alias in aliases.items():
            if name not in terms:
                raise OntologyError(f"alias for unknown term: {name!r}")
            if alias in resolve:
                raise OntologyError(f"duplicate term or alias: {alias!r}")
            resolve[alias] = name
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "terms", frozenset(terms))
        object.__setattr__(self, "_parents", {t: tuple(parents[t]) for t in terms})
        object.__setattr__(self, "_children", {t: tuple(children[t]) for t in terms})
        object.__setattr__(self, "_alias_of", aliases)
        object.__setattr__(self, "_resolve", resolve)

    def __setattr__(self, name, value):
        raise AttributeError("Ontology is immutable")

    def __repr__(self) -> str:
        return f"Ontology(prefix={self.prefix!r}, {len(self.terms)} terms)"

    def resolve(self, text: str) -> str | None:
        """Canonical term name for a name or alias; None if not in the ontology."""
        return self._resolve.get(text)

    def alias(self, term: str) -> str | None:
        return self._alias_of.get(term)

    def names_of(self, term: str) -> tuple[str, ...]:
        """All spellings (canonical name plus alias) of one term."""
        alias = self._alias_of.get(term)
        return (term, alias) if alias else (term,)

    def is_leaf(self, term: str) -> bool:
        return not self._children[self._require(term)]

    def is_root(self, term: str) -> bool:
        return self._require(term) == self.root

    def _require(self, term: str) -> str:
        name = self.resolve(term)
        if name is None:
            raise OntologyError(f"unknown ontology term: {term!r}")
        return name

    def _walk(self, term: str, step: dict[str, tuple[str, ...]], hops: int | None) -> list[str]:
        start = self._require(term)
        dist = {start: 0}
        order: list[tuple[int, str]] = []
        queue = deque([start])
        while queue:
            node = queue.popleft()
            if hops is not None and dist[node] >= hops:
                continue
            for nxt in step[node]:
                if nxt not in dist:
                    dist[nxt] = dist[node] + 1
                    order.append((dist[nxt], nxt))
                    queue.append(nxt)
        order.sort()
        return [name for _, name in order]

    def ancestors(self, term: str, hops: int | None = UNLIMITED) -> list[str]:
        """Terms above the given one, by increasing distance (ties by name)."""
        return self._walk(term, self._parents, hops)

    def descendants(self, term: str, hops: int | None = UNLIMITED) -> list[str]:
        """Terms below the given one, by increasing distance (ties by name)."""
        return self._walk(term, self._children, hops)

    def term_distance(self, a: str, b: str) -> int | None:
        """Shortest up-or-down path length when one term subsumes the other."""
        a = self._require(a)
        b = self._require(b)
        if a == b:
            return 0
        for step in (self._parents, self._children):
            dist = {a: 0}
            queue = deque([a])
            while queue:
                node = queue.popleft()
                for nxt in step[node]:
                    if nxt not in dist:
                        dist[nxt] = dist[node] + 1
                        if nxt == b:
                            return dist[nxt]
                        queue.append(nxt)
        return None


def load_ontology(text: str) -> Ontology:
    """Parse and validate the JSON ontology document format."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OntologyError(f"malformed ontology document: {exc}") from exc
    if not isinstance(doc, dict):
        raise OntologyError("ontology document must be a JSON object")
    for key in ("prefix", "root"):
        if key not in doc:
            raise OntologyError(f"ontology document missing field: {key!r}")
    edges = [tuple(pair) for pair in doc.get("edges", [])]
    for pair in edges:
        if len(pair) != 2 or not all(isinstance(t, str) and t for t in pair):
            raise OntologyError(f"bad edge entry: {pair!r}")
    return Ontology(doc["prefix"], doc["root"], edges, doc.get("aliases"))


# -- query refinement --------------------------------------------------------


def _attribute_for_term(ont: Ontology, ctx: FormalContext, term: str) -> Attribute | None:
    """The context attribute carrying an ontology term, under name or alias.

    Attributes with a prefix must match the ontology's prefix; bare
    attributes match by term text alone.
    """
    for spelling in ont.names_of(term):
        for prefix in (None, ont.prefix):
            candidate = Attribute(term=spelling, prefix=prefix)
            if ctx.has_attribute(candidate):
                return ctx.attribute_like(candidate)
    return None


def _resolvable(ont: Ontology, attr: Attribute) -> str | None:
    if attr.prefix is not None and attr.prefix != ont.prefix:
        return None
    return ont.resolve(attr.term)


def _refine(
    q: "Query",
    ont: Ontology,
    ctx: FormalContext,
    hops: int | None,
    mode: str,
) -> tuple["Query", RefinementReport]:
    from .retrieval import Query

    added: list[Attribute] = []
    dropped: set[str] = set()
    skipped: set[str] = set()
    for term in sorted(q.terms, key=lambda a: a.key):
        node = _resolvable(ont, term)
        if node is None:
            skipped.add(term.term)
            continue
        related: list[str] = []
        if mode in ("generalize", "both"):
            related.extend(ont.ancestors(node, hops))
        if mode in ("specialize", "both"):
            related.extend(ont.descendants(node, hops))
        for name in related:
            attr = _attribute_for_term(ont, ctx, name)
            if attr is None:
                dropped.add(name)
            elif attr not in q.terms and attr not in added:
                added.append(attr)
    report = RefinementReport(
        mode=mode,
        added=frozenset(added),
        dropped_candidates=frozenset(dropped),
        hops_used=hops,
        skipped_terms=frozenset(skipped),
    )
    refined = Query(terms=q.terms | frozenset(added), label=q.label)
    return refined, report


def refine_generalize(
    q: "Query", ont: Ontology, ctx: FormalContext, hops: int | None = UNLIMITED
) -> tuple["Query", RefinementReport]:
    """Add in-context ancestors of each query term (within the hop bound)."""
    return _refine(q, ont, ctx, hops, "generalize")


def refine_specialize(
    q: "Query", ont: Ontology, ctx: FormalContext, hops: int | None = UNLIMITED
) -> tuple["Query", RefinementReport]:
    """Add in-context descendants of each query term (within the hop bound)."""
    return _refine(q, ont, ctx, hops, "specialize")


def refine_both(
    q: "Query", ont: Ontology, ctx: FormalContext, hops: int | None = UNLIMITED
) -> tuple["Query", RefinementReport]:
    """Add both ancestors and descendants, as a single combined refinement."""
    return _refine(q, ont, ctx, hops, "both")
