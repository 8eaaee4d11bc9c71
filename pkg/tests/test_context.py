import random

import pytest

from fcaregistry import (
    Attribute,
    ContextError,
    FormalContext,
    context_from_csv,
    context_to_csv,
)
from conftest import make_random_context


def terms(attrs):
    return sorted(a.term for a in attrs)


class TestDeriveObjects:
    def test_single_row(self, table1):
        assert terms(table1.derive_objects({"S7"})) == ["Mo", "PS"]

    def test_empty_set_yields_all_attributes(self, table1):
        assert table1.derive_objects(set()) == set(table1.attributes)

    def test_intersection_of_rows(self, table1):
        assert terms(table1.derive_objects({"S3", "S5"})) == ["Hu", "NS"]

    def test_unknown_object_names_offender(self, table1):
        with pytest.raises(ContextError, match="S99"):
            table1.derive_objects({"S1", "S99"})


class TestDeriveAttributes:
    def test_single_column(self, table1, attrs_by_term):
        assert table1.derive_attributes({attrs_by_term["Hu"]}) == {"S3", "S5"}

    def test_empty_set_yields_all_objects(self, table1):
        assert table1.derive_attributes(set()) == set(table1.objects)

    def test_intersection_of_columns(self, table1, attrs_by_term):
        got = table1.derive_attributes({attrs_by_term["NS"], attrs_by_term["MR"]})
        assert got == {"S2"}

    def test_unknown_attribute_names_offender(self, table1):
        with pytest.raises(ContextError, match="Zz"):
            table1.derive_attributes({Attribute("Zz")})


class TestCloseAttributes:
    def test_hu_closes_to_ns_hu(self, table1, attrs_by_term):
        assert terms(table1.close_attributes({attrs_by_term["Hu"]})) == ["Hu", "NS"]

    def test_empty_set_closes_to_empty(self, table1):
        # no attribute is shared by all eight sources
        assert table1.close_attributes(set()) == set()

    def test_object_intent_is_closed(self, table1, attrs_by_term):
        intent = {attrs_by_term[t] for t in ("NS", "PS", "AO", "MR")}
        assert table1.close_attributes(intent) == intent


class TestProjectByCategory:
    def test_subject_keeps_all_objects(self, table1):
        view = table1.project_by_category("Subject")
        assert terms(view.attributes) == ["NS", "PS"]
        assert list(view.objects) == list(table1.objects)

    def test_quality_keeps_mr_holders(self, table1):
        view = table1.project_by_category("Quality")
        assert terms(view.attributes) == ["MR"]
        assert list(view.objects) == ["S1", "S2", "S4"]

    def test_availability_is_empty(self, table1):
        view = table1.project_by_category("Availability")
        assert view.attributes == ()
        assert view.objects == ()

    def test_invalid_category(self, table1):
        with pytest.raises(ContextError):
            table1.project_by_category("Subjects")

    def test_membership_commutes(self):
        rng = random.Random(7)
        cats = ("Subject", "Organism", "Quality")
        for _ in range(30):
            n_obj, n_attr = rng.randint(1, 8), rng.randint(1, 6)
            attrs = [
                Attribute(term=f"m{j}", category=rng.choice(cats)) for j in range(n_attr)
            ]
            rows = [[rng.randint(0, 1) for _ in range(n_attr)] for _ in range(n_obj)]
            ctx = FormalContext([f"g{i}" for i in range(n_obj)], attrs, rows)
            for cat in cats:
                view = ctx.project_by_category(cat)
                for g in ctx.objects:
                    has_cat = any(a.category == cat for a in ctx.intent_of(g))
                    assert view.has_object(g) == has_cat


class TestSelectByAttribute:
    def test_hu_view(self, table1, attrs_by_term):
        view = table1.select_by_attribute(attrs_by_term["Hu"])
        assert list(view.objects) == ["S3", "S5"]
        assert terms(view.attributes) == ["Hu", "NS", "PS"]

    def test_ao_view(self, table1, attrs_by_term):
        view = table1.select_by_attribute(attrs_by_term["AO"])
        assert list(view.objects) == ["S1", "S2", "S4"]
        assert terms(view.attributes) == ["AO", "MR", "NS", "PS"]

    def test_mo_view(self, table1, attrs_by_term):
        view = table1.select_by_attribute(attrs_by_term["Mo"])
        assert list(view.objects) == ["S7"]
        assert terms(view.attributes) == ["Mo", "PS"]

    def test_unknown_attribute(self, table1):
        with pytest.raises(ContextError):
            table1.select_by_attribute(Attribute("Zz"))


class TestAddObject:
    def test_first_insertion(self):
        ctx = FormalContext([], [], [])
        grown = ctx.add_object("S1", [Attribute("PS"), Attribute("AO"), Attribute("MR")])
        assert list(grown.objects) == ["S1"]
        assert terms(grown.attributes) == ["AO", "MR", "PS"]
        assert grown.intent_of("S1") == set(grown.attributes)

    def test_row_append(self, table1, attrs_by_term):
        grown = table1.add_object("S9", [attrs_by_term["NS"]])
        assert len(grown.objects) == 9
        assert len(grown.attributes) == 8
        assert terms(grown.intent_of("S9")) == ["NS"]
        for g in table1.objects:
            assert grown.intent_of(g) == table1.intent_of(g)

    def test_duplicate_id(self, table1, attrs_by_term):
        with pytest.raises(ContextError, match="S1"):
            table1.add_object("S1", [attrs_by_term["NS"]])

    def test_reserved_id(self, table1, attrs_by_term):
        with pytest.raises(ContextError, match="Query"):
            table1.add_object("Query", [attrs_by_term["NS"]])


class TestGaloisProperties:
    def test_derivations_and_closure_laws(self):
        rng = random.Random(11)
        for _ in range(100):
            ctx = make_random_context(rng)
            objs = list(ctx.objects)
            attrs = list(ctx.attributes)
            a1 = set(rng.sample(objs, rng.randint(0, len(objs))))
            a2 = a1 | set(rng.sample(objs, rng.randint(0, len(objs))))
            assert ctx.derive_objects(a2) <= ctx.derive_objects(a1)
            b1 = set(rng.sample(attrs, rng.randint(0, len(attrs))))
            b2 = b1 | set(rng.sample(attrs, rng.randint(0, len(attrs))))
            assert ctx.derive_attributes(b2) <= ctx.derive_attributes(b1)
            # extensive, monotone, idempotent closure
            c1 = ctx.close_attributes(b1)
            assert b1 <= c1
            assert c1 <= ctx.close_attributes(b2 | b1)
            assert ctx.close_attributes(c1) == c1
            # round-trip supersets
            assert ctx.derive_attributes(ctx.derive_objects(a1)) >= a1


class TestCsv:
    def test_round_trip(self, table1):
        text = context_to_csv(table1)
        again = context_from_csv(text)
        assert again == table1
        assert context_to_csv(again) == text

    def test_categories_survive(self, table1):
        again = context_from_csv(context_to_csv(table1))
        assert [a.category for a in again.attributes] == [a.category for a in table1.attributes]

    def test_prefixed_header_cell(self):
        ctx = context_from_csv(",NCBI:Human@Organism\nS1,1\n")
        (attr,) = ctx.attributes
        assert attr.prefix == "NCBI"
        assert attr.term == "Human"
        assert attr.category == "Organism"

    def test_bad_cell_rejected(self):
        with pytest.raises(ContextError):
            context_from_csv(",m1\nS1,2\n")

    def test_nonempty_corner_rejected(self):
        with pytest.raises(ContextError):
            context_from_csv("id,m1\nS1,1\n")
