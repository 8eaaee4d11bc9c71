"""Concept lattices: incremental construction, a brute-force oracle, Hasse covers.

The builder inserts one object at a time: candidate intents are the previous
intents plus their intersections with the new row, each re-closed in the grown
context.  The oracle recomputes the concept set from scratch by intersecting
row intents to a fixpoint, so the two paths share no code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .context import Attribute, FormalContext
from .errors import LatticeError

#: Attribute-count guard for the naive oracle (exponential in the worst case).
ORACLE_MAX_ATTRIBUTES = 24


@dataclass(frozen=True)
class FormalConcept:
    """A closed (extent, intent) pair; a node of the lattice."""

    extent: frozenset[str]
    intent: frozenset[Attribute]


def _intent_sort_key(intent: Iterable[Attribute]):
    keys = sorted(a.key for a in intent)
    return (len(keys), keys)


class ConceptLattice:
    """All formal concepts of a context, ordered by extent inclusion.

    Concepts are kept in canonical order (intent size, then lexicographic
    intent), so the first concept is the top and the last is the bottom.
    Instances are immutable; insertion returns a new lattice.
    """

    __slots__ = ("context", "concepts", "covers", "_index", "_parents", "_children")

    def __init__(
        self,
        context: FormalContext,
        concepts: Sequence[FormalConcept],
        covers: Sequence[tuple[int, int]],
    ):
        object.__setattr__(self, "context", context)
        object.__setattr__(self, "concepts", tuple(concepts))
        object.__setattr__(self, "covers", tuple(covers))
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(self.concepts)})
        parents: dict[int, list[int]] = {i: [] for i in range(len(self.concepts))}
        children: dict[int, list[int]] = {i: [] for i in range(len(self.concepts))}
        for child, parent in self.covers:
            parents[child].append(parent)
            children[parent].append(child)
        object.__setattr__(self, "_parents", parents)
        object.__setattr__(self, "_children", children)

    def __setattr__(self, name, value):
        raise AttributeError("ConceptLattice is immutable")

    @classmethod
    def _from_intent_masks(cls, ctx: FormalContext, intent_masks: Iterable[int]) -> "ConceptLattice":
        pairs = []
        for im in set(intent_masks):
            em = ctx._extent_mask_of_intent_mask(im)
            pairs.append((im, em))
        pairs.sort(key=lambda p: _intent_sort_key(ctx._attrs_from_mask(p[0])))
        concepts = [
            FormalConcept(
                extent=frozenset(ctx._objects_from_mask(em)),
                intent=frozenset(ctx._attrs_from_mask(im)),
            )
            for im, em in pairs
        ]
        covers = _cover_pairs([em for _, em in pairs])
        return cls(ctx, concepts, covers)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConceptLattice):
            return NotImplemented
        return (
            self.context == other.context
            and set(self.concepts) == set(other.concepts)
            and self.cover_concepts() == other.cover_concepts()
        )

    def __hash__(self):
        return hash((self.context, frozenset(self.concepts)))

    def __repr__(self) -> str:
        return f"ConceptLattice({len(self.concepts)} concepts, {len(self.covers)} covers)"

    def cover_concepts(self) -> set[tuple[FormalConcept, FormalConcept]]:
        """The cover relation as concept pairs (order-insensitive form)."""
        return {(self.concepts[c], self.concepts[p]) for c, p in self.covers}

    @property
    def top(self) -> FormalConcept:
        return self.concepts[0]

    @property
    def bottom(self) -> FormalConcept:
        return self.concepts[-1]

    def index_of(self, concept: FormalConcept) -> int:
        idx = self._index.get(concept)
        if idx is None:
            raise LatticeError(f"concept not in lattice: {concept}")
        return idx

    def concept_with_intent(self, intent: Iterable[Attribute]) -> FormalConcept | None:
        wanted = frozenset(intent)
        for c in self.concepts:
            if c.intent == wanted:
                return c
        return None

    def upper_covers(self, concept: FormalConcept) -> list[FormalConcept]:
        """Immediate parents in the Hasse diagram, in canonical order."""
        idx = self.index_of(concept)
        return [self.concepts[p] for p in sorted(self._parents[idx])]

    def lower_covers(self, concept: FormalConcept) -> list[FormalConcept]:
        idx = self.index_of(concept)
        return [self.concepts[c] for c in sorted(self._children[idx])]

    def height(self) -> int:
        """Length in edges of the longest bottom-to-top chain."""
        longest = {i: 0 for i in range(len(self.concepts))}
        # canonical order is a reverse topological order for child -> parent
        for i in reversed(range(len(self.concepts))):
            for p in self._parents[i]:
                longest[p] = max(longest[p], longest[i] + 1)
        return max(longest.values(), default=0)


def _cover_pairs(extent_masks: Sequence[int]) -> list[tuple[int, int]]:
    """Transitive reduction of the extent-inclusion order, as index pairs."""
    n = len(extent_masks)
    covers = []
    for i in range(n):
        ei = extent_masks[i]
        ups = [j for j in range(n) if j != i and ei | extent_masks[j] == extent_masks[j] and ei != extent_masks[j]]
        for j in ups:
            ej = extent_masks[j]
            if not any(
                k != j and extent_masks[k] | ej == ej and extent_masks[k] != ej
                for k in ups
            ):
                covers.append((i, j))
    covers.sort()
    return covers


def _close_over(mask: int, rows: Sequence[int], full: int) -> int:
    """Closure of an attribute mask over the given rows (full mask if no row fits)."""
    out = full
    hit = False
    for r in rows:
        if r & mask == mask:
            out &= r
            hit = True
    return out if hit else full


def build_lattice(ctx: FormalContext) -> ConceptLattice:
    """Build the concept lattice by inserting the context's objects one by one."""
    rows = ctx._rows
    full = ctx._full_attr_mask
    intents = {full}
    for k, row in enumerate(rows):
        candidates = set(intents)
        candidates.update(y & row for y in intents)
        seen = rows[: k + 1]
        intents = {_close_over(c, seen, full) for c in candidates}
    return ConceptLattice._from_intent_masks(ctx, intents)


def insert_object(
    lat: ConceptLattice,
    obj: str,
    attrs: Iterable[Attribute],
    *,
    allow_reserved: bool = False,
) -> ConceptLattice:
    """Insert one object incrementally; equals a full rebuild on the grown context."""
    ctx = lat.context.add_object(obj, attrs, allow_reserved=allow_reserved)
    rows = ctx._rows
    full = ctx._full_attr_mask
    new_row = rows[-1]
    old = {ctx._attr_mask(c.intent) for c in lat.concepts}
    candidates = set(old)
    candidates.update(y & new_row for y in old)
    # when the object introduces attributes unknown to the old context, its
    # own intent and the grown bottom intent are not old-intent intersections
    candidates.add(new_row)
    candidates.add(full)
    intents = {_close_over(c, rows, full) for c in candidates}
    return ConceptLattice._from_intent_masks(ctx, intents)


def enumerate_concepts_oracle(ctx: FormalContext) -> set[FormalConcept]:
    """Exact concept set, computed without the incremental algorithm.

    Intersects row intents to a fixpoint (every concept intent is an
    intersection of object intents, with the empty intersection giving M).
    Guarded to test-scale contexts.
    """
    if len(ctx.attributes) > ORACLE_MAX_ATTRIBUTES:
        raise LatticeError(
            f"oracle limited to {ORACLE_MAX_ATTRIBUTES} attributes (test-scale use only)"
        )
    row_intents = {g: frozenset(ctx.intent_of(g)) for g in ctx.objects}
    all_attrs = frozenset(ctx.attributes)
    intents = {all_attrs}
    frontier = set(intents)
    while frontier:
        fresh = set()
        for y in frontier:
            for ri in row_intents.values():
                z = y & ri
                if z not in intents and z not in fresh:
                    fresh.add(z)
        intents |= fresh
        frontier = fresh
    return {
        FormalConcept(
            extent=frozenset(g for g, ri in row_intents.items() if intent <= ri),
            intent=intent,
        )
        for intent in intents
    }


def enumerate_covers_oracle(
    concepts: Iterable[FormalConcept],
) -> set[tuple[FormalConcept, FormalConcept]]:
    """Brute-force cover relation (child, parent) over a concept set."""
    cs = list(concepts)
    covers = set()
    for child in cs:
        for parent in cs:
            if not child.extent < parent.extent:
                continue
            if any(
                child.extent < mid.extent < parent.extent for mid in cs
            ):
                continue
            covers.add((child, parent))
    return covers


# -- DOT export --------------------------------------------------------------


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _label(extent: Iterable[str], intent: Iterable[Attribute]) -> str:
    ext = ", ".join(sorted(extent))
    itt = ", ".join(str(a) for a in sorted(intent, key=lambda a: a.key))
    return f"{{{ext}}}\\n{{{itt}}}"


def export_dot(lat: ConceptLattice, reduced_labels: bool = False) -> str:
    """Render the Hasse diagram as a DOT digraph (child -> parent edges).

    With reduced labels every object and attribute appears only at its
    introducer concept.
    """
    ctx = lat.context
    if reduced_labels:
        own_objects: dict[int, list[str]] = {i: [] for i in range(len(lat.concepts))}
        own_attrs: dict[int, list[Attribute]] = {i: [] for i in range(len(lat.concepts))}
        by_intent = {c.intent: i for i, c in enumerate(lat.concepts)}
        for g in ctx.objects:
            own_objects[by_intent[frozenset(ctx.intent_of(g))]].append(g)
        for a in ctx.attributes:
            own_attrs[by_intent[frozenset(ctx.close_attributes([a]))]].append(a)
    lines = ["digraph concept_lattice {", "  rankdir=BT;", "  node [shape=box];"]
    for i, c in enumerate(lat.concepts):
        if reduced_labels:
            label = _label(own_objects[i], own_attrs[i])
        else:
            label = _label(c.extent, c.intent)
        lines.append(f'  c{i} [label="{_dot_escape(label)}"];')
    for child, parent in lat.covers:
        lines.append(f"  c{child} -> c{parent};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- persistence -------------------------------------------------------------


def lattice_to_json(lat: ConceptLattice) -> str:
    """Serialize a lattice as a self-describing JSON document (stable bytes)."""
    ctx = lat.context
    attr_idx = {a.key: j for j, a in enumerate(ctx.attributes)}
    doc = {
        "format": "fcaregistry-lattice",
        "version": 1,
        "context": {
            "objects": list(ctx.objects),
            "attributes": [
                {"term": a.term, "prefix": a.prefix, "category": a.category}
                for a in ctx.attributes
            ],
            "incidence": [
                "".join(str(ctx._rows[i] >> j & 1) for j in range(len(ctx.attributes)))
                for i in range(len(ctx.objects))
            ],
        },
        "concepts": [
            {
                "extent": sorted(c.extent),
                "intent": sorted(attr_idx[a.key] for a in c.intent),
            }
            for c in lat.concepts
        ],
        "covers": [list(pair) for pair in lat.covers],
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def lattice_from_json(text: str) -> ConceptLattice:
    """Reload a persisted lattice; the result is value-identical to the saved one."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LatticeError(f"unreadable lattice file: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != "fcaregistry-lattice":
        raise LatticeError("not a lattice file (missing format marker)")
    cdoc = doc["context"]
    attrs = [
        Attribute(term=a["term"], prefix=a.get("prefix"), category=a.get("category", "Subject"))
        for a in cdoc["attributes"]
    ]
    rows = [[int(ch) for ch in line] for line in cdoc["incidence"]]
    ctx = FormalContext(cdoc["objects"], attrs, rows, allow_reserved_ids=True)
    masks = set()
    for c in doc["concepts"]:
        mask = 0
        for j in c["intent"]:
            mask |= 1 << j
        masks.add(mask)
    # extents and covers are recomputed from the intents; deterministic result
    return ConceptLattice._from_intent_masks(ctx, masks)
