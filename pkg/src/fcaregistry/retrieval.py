"""Ranked source discovery: insert a query concept, walk its subsumers.

The query is overlaid on a copy of the lattice as a virtual object; a BFS
upward through the Hasse diagram then collects sources by the distance of
the first concept that contributed them.  The base lattice is never touched.
"""

from __future__ import annotations

import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Callable

from .context import Attribute
from .errors import QueryError
from .lattice import ConceptLattice, FormalConcept, insert_object
from .ontology import (
    Ontology,
    RefinementReport,
    refine_both,
    refine_generalize,
    refine_specialize,
)


@dataclass(frozen=True)
class Query:
    """A named attribute set to search for."""

    terms: frozenset[Attribute]
    label: str = "Query"


@dataclass(frozen=True)
class RankedResult:
    """One matching source: its BFS rank and the terms it shares with the query."""

    source: str
    rank: int
    shared: frozenset[Attribute]
    via_intent: frozenset[Attribute]


@dataclass(frozen=True)
class ResultSet:
    query: Query
    results: tuple[RankedResult, ...]
    refinement_applied: RefinementReport | None = None

    def sources(self) -> list[str]:
        return [r.source for r in self.results]


def insert_query(lat: ConceptLattice, q: Query) -> tuple[ConceptLattice, FormalConcept]:
    """Overlay the query as a virtual object; return the grown lattice and its concept.

    The query concept's intent is exactly the query's term set (the virtual
    object forces closure to stop there); its extent holds the query label
    plus any sources matching every term.
    """
    if not q.terms:
        raise QueryError("query term set must be non-empty")
    if lat.context.has_object(q.label):
        raise QueryError(f"query label collides with a source id: {q.label!r}")
    augmented = insert_object(
        lat, q.label, sorted(q.terms, key=lambda a: a.key), allow_reserved=True
    )
    intent = frozenset(augmented.context.intent_of(q.label))
    concept = augmented.concept_with_intent(intent)
    assert concept is not None and q.label in concept.extent
    return augmented, concept


def search(
    lat: ConceptLattice,
    q: Query,
    *,
    tie_break: Callable[[RankedResult], object] | None = None,
) -> ResultSet:
    """All sources sharing at least one in-context query term, ranked by distance.

    Rank 0 is the query concept's own extent; each further rank is one cover
    step up.  Concepts with an empty intent never contribute, and the walk
    stops once a level has nothing else to offer.
    """
    augmented, query_concept = insert_query(lat, q)
    base_ctx = lat.context
    collected: dict[str, RankedResult] = {}
    frontier = [query_concept]
    visited = {query_concept}
    rank = 0
    while frontier:
        contributed = False
        for concept in frontier:
            if not concept.intent:
                continue
            contributed = True
            for source in sorted(concept.extent):
                if source == q.label or source in collected:
                    continue
                shared = frozenset(base_ctx.intent_of(source) & q.terms)
                collected[source] = RankedResult(
                    source=source, rank=rank, shared=shared, via_intent=concept.intent
                )
        if not contributed:
            break
        nxt = []
        for concept in frontier:
            for parent in augmented.upper_covers(concept):
                if parent not in visited:
                    visited.add(parent)
                    nxt.append(parent)
        frontier = nxt
        rank += 1
    if tie_break is None:
        key = lambda r: (r.rank, -len(r.shared), r.source)
    else:
        key = lambda r: (r.rank, -len(r.shared), tie_break(r), r.source)
    ordered = tuple(sorted(collected.values(), key=key))
    return ResultSet(query=q, results=ordered)


def search_refined(
    lat: ConceptLattice,
    q: Query,
    ont: Ontology,
    mode: str,
    hops: int | None = None,
) -> ResultSet:
    """Refine the query against the ontology, then search with the refined terms.

    Within equal rank and share count, sources matched through ontologically
    closer terms come first.
    """
    refiners = {
        "generalize": refine_generalize,
        "specialize": refine_specialize,
        "both": refine_both,
    }
    if mode not in refiners:
        raise QueryError(f"unknown refinement mode: {mode!r}")
    if not q.terms:
        raise QueryError("query term set must be non-empty")
    refined, report = refiners[mode](q, ont, lat.context, hops)
    original = sorted(q.terms, key=lambda a: a.key)

    def distance_key(result: RankedResult) -> float:
        best = math.inf
        for shared in result.shared:
            if shared.prefix is not None and shared.prefix != ont.prefix:
                continue
            if ont.resolve(shared.term) is None:
                continue
            for term in original:
                if term.prefix is not None and term.prefix != ont.prefix:
                    continue
                if ont.resolve(term.term) is None:
                    continue
                d = ont.term_distance(term.term, shared.term)
                if d is not None:
                    best = min(best, d)
        return best

    rs = search(lat, refined, tie_break=distance_key)
    return ResultSet(query=refined, results=rs.results, refinement_applied=report)


# -- serialization -----------------------------------------------------------


def result_set_to_json(rs: ResultSet) -> str:
    """Machine-readable rendering; byte-deterministic for equal inputs."""
    doc = {
        "query": {
            "label": rs.query.label,
            "terms": sorted(str(t) for t in rs.query.terms),
        },
        "refinement": None
        if rs.refinement_applied is None
        else {
            "mode": rs.refinement_applied.mode,
            "added": sorted(str(a) for a in rs.refinement_applied.added),
            "dropped_candidates": sorted(rs.refinement_applied.dropped_candidates),
            "hops": rs.refinement_applied.hops_used,
            "skipped_terms": sorted(rs.refinement_applied.skipped_terms),
        },
        "results": [
            {
                "source": r.source,
                "rank": r.rank,
                "shared": sorted(str(a) for a in r.shared),
                "via_intent": sorted(str(a) for a in r.via_intent),
            }
            for r in rs.results
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _style_enabled() -> bool:
    if os.environ.get("FCA_REGISTRY_NO_COLOR"):
        return False
    return sys.stdout.isatty()


def result_set_to_table(rs: ResultSet, styled: bool | None = None) -> str:
    """Plain-text table rendering for the CLI."""
    if styled is None:
        styled = _style_enabled()
    headers = ("source", "rank", "shared", "via intent")
    rows = [
        (
            r.source,
            str(r.rank),
            ", ".join(sorted(str(a) for a in r.shared)),
            ", ".join(sorted(str(a) for a in r.via_intent)),
        )
        for r in rs.results
    ]
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h) for i, h in enumerate(headers)]
    header = "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip()
    if styled:
        header = f"\x1b[1m{header}\x1b[0m"
    lines = [header]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    if not rows:
        lines.append("(no matching sources)")
    return "\n".join(lines) + "\n"
