"""Formal contexts: source-by-metadata incidence tables and derivation operators.

A context is the triple (objects, attributes, incidence).  Rows and columns
are stored as integer bit sets, so every derivation is a chain of bitwise
ANDs over small integers.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ContextError

#: The closed set of metadata categories.
CATEGORIES = ("Identification", "Subject", "Organism", "Quality", "Availability")

#: Object id reserved for virtual query insertion (see the retrieval module).
RESERVED_OBJECT_ID = "Query"


@dataclass(frozen=True)
class Attribute:
    """A metadata term, optionally prefixed by the ontology it came from.

    Identity is the (prefix, term) pair; the category is descriptive and is
    excluded from equality so that bare query terms match context attributes.
    """

    term: str
    prefix: str | None = None
    category: str = field(default="Subject", compare=False)

    def __post_init__(self) -> None:
        if not self.term:
            raise ContextError("attribute term must be non-empty")
        if self.category not in CATEGORIES:
            raise ContextError(f"unknown attribute category: {self.category!r}")

    @property
    def key(self) -> tuple[str, str]:
        return (self.prefix or "", self.term)

    def __str__(self) -> str:
        return f"{self.prefix}:{self.term}" if self.prefix else self.term


def _ordered_attrs(attrs: Iterable[Attribute]) -> list[Attribute]:
    """Deduplicate attributes, keeping a deterministic order.

    Sequences keep their given order; unordered collections are sorted by key.
    """
    if isinstance(attrs, (set, frozenset)):
        attrs = sorted(attrs, key=lambda a: a.key)
    out: list[Attribute] = []
    seen: set[tuple[str, str]] = set()
    for a in attrs:
        if a.key not in seen:
            seen.add(a.key)
            out.append(a)
    return out


class FormalContext:
    """An immutable (objects x attributes) boolean incidence table."""

    __slots__ = ("objects", "attributes", "_rows", "_cols", "_obj_index", "_attr_index")

    def __init__(
        self,
        objects: Sequence[str],
        attributes: Sequence[Attribute],
        incidence: Sequence[Sequence[int]],
        *,
        allow_reserved_ids: bool = False,
    ):
        objects = tuple(objects)
        attributes = tuple(attributes)
        obj_index: dict[str, int] = {}
        for g in objects:
            if not g:
                raise ContextError("object id must be non-empty")
            if g == RESERVED_OBJECT_ID and not allow_reserved_ids:
                raise ContextError(f"object id {g!r} is reserved for queries")
            if g in obj_index:
                raise ContextError(f"duplicate object id: {g!r}")
            obj_index[g] = len(obj_index)
        attr_index: dict[tuple[str, str], int] = {}
        for a in attributes:
            if a.key in attr_index:
                raise ContextError(f"duplicate attribute: {a}")
            attr_index[a.key] = len(attr_index)
        if len(incidence) != len(objects):
            raise ContextError("incidence row count does not match object count")
        rows: list[int] = []
        for row in incidence:
            if len(row) != len(attributes):
                raise ContextError("incidence column count does not match attribute count")
            mask = 0
            for j, v in enumerate(row):
                if v:
                    mask |= 1 << j
            rows.append(mask)
        cols = [0] * len(attributes)
        for i, mask in enumerate(rows):
            m = mask
            while m:
                j = (m & -m).bit_length() - 1
                cols[j] |= 1 << i
                m &= m - 1
        object.__setattr__(self, "objects", objects)
        object.__setattr__(self, "attributes", attributes)
        object.__setattr__(self, "_rows", tuple(rows))
        object.__setattr__(self, "_cols", tuple(cols))
        object.__setattr__(self, "_obj_index", obj_index)
        object.__setattr__(self, "_attr_index", attr_index)

    def __setattr__(self, name, value):  # immutable after construction
        raise AttributeError("FormalContext is immutable")

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalContext):
            return NotImplemented
        return (
            self.objects == other.objects
            and self.attributes == other.attributes
            and [a.category for a in self.attributes] == [a.category for a in other.attributes]
            and self._rows == other._rows
        )

    def __hash__(self):
        return hash((self.objects, self.attributes, self._rows))

    def __repr__(self) -> str:
        return f"FormalContext({len(self.objects)} objects x {len(self.attributes)} attributes)"

    # -- lookups ---------------------------------------------------------

    def has_object(self, obj: str) -> bool:
        return obj in self._obj_index

    def has_attribute(self, attr: Attribute) -> bool:
        return attr.key in self._attr_index

    def attribute_like(self, attr: Attribute) -> Attribute:
        """Return the context's own instance for an equal attribute."""
        idx = self._attr_index.get(attr.key)
        if idx is None:
            raise ContextError(f"unknown attribute: {attr}")
        return self.attributes[idx]

    def intent_of(self, obj: str) -> set[Attribute]:
        """All attributes of a single object."""
        return self.derive_objects([obj])

    # -- mask plumbing (package-internal, used by the lattice module) ----

    @property
    def _full_attr_mask(self) -> int:
        return (1 << len(self.attributes)) - 1

    @property
    def _full_obj_mask(self) -> int:
        return (1 << len(self.objects)) - 1

    def _obj_bit(self, obj: str) -> int:
        idx = self._obj_index.get(obj)
        if idx is None:
            raise ContextError(f"unknown object id: {obj!r}")
        return idx

    def _attr_bit(self, attr: Attribute) -> int:
        idx = self._attr_index.get(attr.key)
        if idx is None:
            raise ContextError(f"unknown attribute: {attr}")
        return idx

    def _attr_mask(self, attrs: Iterable[Attribute]) -> int:
        mask = 0
        for a in attrs:
            mask |= 1 << self._attr_bit(a)
        return mask

    def _attrs_from_mask(self, mask: int) -> set[Attribute]:
        out = set()
        while mask:
            j = (mask & -mask).bit_length() - 1
            out.add(self.attributes[j])
            mask &= mask - 1
        return out

    def _objects_from_mask(self, mask: int) -> set[str]:
        out = set()
        while mask:
            i = (mask & -mask).bit_length() - 1
            out.add(self.objects[i])
            mask &= mask - 1
        return out

    def _extent_mask_of_intent_mask(self, intent_mask: int) -> int:
        mask = self._full_obj_mask
        m = intent_mask
        while m:
            j = (m & -m).bit_length() - 1
            mask &= self._cols[j]
            m &= m - 1
        return mask

    # -- derivation operators --------------------------------------------

    def derive_objects(self, objs: Iterable[str]) -> set[Attribute]:
        """Attributes common to every given object; all of M for the empty set."""
        mask = self._full_attr_mask
        for g in objs:
            mask &= self._rows[self._obj_bit(g)]
        return self._attrs_from_mask(mask)

    def derive_attributes(self, attrs: Iterable[Attribute]) -> set[str]:
        """Objects possessing every given attribute; all of G for the empty set."""
        mask = self._full_obj_mask
        for a in attrs:
            mask &= self._cols[self._attr_bit(a)]
        return self._objects_from_mask(mask)

    def close_attributes(self, attrs: Iterable[Attribute]) -> set[Attribute]:
        """The closure B'' of an attribute set; a superset of the input, idempotent."""
        ext = self._full_obj_mask
        for a in attrs:
            ext &= self._cols[self._attr_bit(a)]
        mask = self._full_attr_mask
        m = ext
        while m:
            i = (m & -m).bit_length() - 1
            mask &= self._rows[i]
            m &= m - 1
        return self._attrs_from_mask(mask)

    # -- projection views --------------------------------------------------

    def project_by_category(self, category: str) -> "FormalContext":
        """Restrict attributes to one category; keep objects with at least one left."""
        if category not in CATEGORIES:
            raise ContextError(f"unknown attribute category: {category!r}")
        keep_attrs = [a for a in self.attributes if a.category == category]
        keep_mask = self._attr_mask(keep_attrs)
        keep_objs = [g for g in self.objects if self._rows[self._obj_bit(g)] & keep_mask]
        return self._restrict(keep_objs, keep_attrs)

    def select_by_attribute(self, attr: Attribute) -> "FormalContext":
        """Restrict objects to those with the attribute; keep their attribute union."""
        col = self._cols[self._attr_bit(attr)]
        keep_objs = sorted(self._objects_from_mask(col), key=self._obj_bit)
        union = 0
        for g in keep_objs:
            union |= self._rows[self._obj_bit(g)]
        keep_attrs = [a for j, a in enumerate(self.attributes) if union >> j & 1]
        return self._restrict(keep_objs, keep_attrs)

    def _restrict(self, objs: Sequence[str], attrs: Sequence[Attribute]) -> "FormalContext":
        rows = []
        for g in objs:
            full = self._rows[self._obj_bit(g)]
            rows.append([full >> self._attr_bit(a) & 1 for a in attrs])
        return FormalContext(objs, attrs, rows, allow_reserved_ids=True)

    # -- growth -----------------------------------------------------------

    def add_object(
        self,
        obj: str,
        attrs: Iterable[Attribute],
        *,
        allow_reserved: bool = False,
    ) -> "FormalContext":
        """Return a context extended by one row; new attributes are appended to M."""
        if obj in self._obj_index:
            raise ContextError(f"duplicate object id: {obj!r}")
        if obj == RESERVED_OBJECT_ID and not allow_reserved:
            raise ContextError(f"object id {obj!r} is reserved for queries")
        ordered = _ordered_attrs(attrs)
        new_attrs = list(self.attributes)
        for a in ordered:
            if a.key not in self._attr_index:
                new_attrs.append(a)
        index = {a.key: j for j, a in enumerate(new_attrs)}
        rows = [[mask >> j & 1 for j in range(len(self.attributes))] + [0] * (len(new_attrs) - len(self.attributes)) for mask in self._rows]
        new_row = [0] * len(new_attrs)
        for a in ordered:
            new_row[index[a.key]] = 1
        rows.append(new_row)
        return FormalContext(
            list(self.objects) + [obj], new_attrs, rows, allow_reserved_ids=True
        )


# -- CSV cross-table format ------------------------------------------------


def _format_header_cell(attr: Attribute) -> str:
    name = f"{attr.prefix}:{attr.term}" if attr.prefix else attr.term
    return f"{name}@{attr.category}"


def _parse_header_cell(cell: str) -> Attribute:
    name, _, category = cell.partition("@")
    category = category or "Subject"
    prefix, sep, term = name.partition(":")
    if not sep:
        prefix, term = "", name
    return Attribute(term=term, prefix=prefix or None, category=category)


def context_to_csv(ctx: FormalContext) -> str:
    """Serialize a context as the cross-table CSV format (deterministic bytes)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([""] + [_format_header_cell(a) for a in ctx.attributes])
    for g in ctx.objects:
        mask = ctx._rows[ctx._obj_bit(g)]
        writer.writerow([g] + [str(mask >> j & 1) for j in range(len(ctx.attributes))])
    return buf.getvalue()


def context_from_csv(text: str) -> FormalContext:
    """Parse the cross-table CSV format.

    The first header cell is empty; remaining header cells are attribute names,
    optionally "prefix:term@category" (category defaults to Subject).
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ContextError("empty context file") from None
    if header and header[0].strip():
        raise ContextError("first header cell must be empty")
    attrs = [_parse_header_cell(c.strip()) for c in header[1:]]
    objects, rows = [], []
    for line in reader:
        if not line or not any(c.strip() for c in line):
            continue
        objects.append(line[0].strip())
        cells = [c.strip() for c in line[1:]]
        if len(cells) != len(attrs):
            raise ContextError(f"row {line[0]!r} has {len(cells)} cells, expected {len(attrs)}")
        for c in cells:
            if c not in ("0", "1"):
                raise ContextError(f"incidence cells must be 0 or 1, got {c!r}")
        rows.append([int(c) for c in cells])
    return FormalContext(objects, attrs, rows)
