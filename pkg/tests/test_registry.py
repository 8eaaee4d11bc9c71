import json

import pytest

from fcaregistry import (
    BinarizationConfig,
    FieldRule,
    MetadataRecord,
    RegistryError,
    build_context,
    build_lattice,
    load_records,
    parse_records,
    validate_record,
    write_records,
)
from conftest import FIXTURES


@pytest.fixture(scope="module")
def corpus():
    return load_records(FIXTURES / "bioregistry8")


class TestParseRecords:
    def test_fixture_corpus(self, corpus):
        assert [r.id for r in corpus] == [f"S{i}" for i in range(1, 9)]
        titles = {r.id: r.identification["title"] for r in corpus}
        assert titles["S1"] == "Swissprot"
        assert titles["S8"] == "Vega Genome Browser"

    def test_empty_list(self):
        assert parse_records('{"records": []}') == []

    def test_undeclared_prefix(self):
        text = json.dumps({"records": [{"id": "S1", "subjects": ["MESH:Genome"]}]})
        with pytest.raises(RegistryError, match="MESH"):
            parse_records(text)

    def test_free_prefix_allowed(self):
        records = parse_records(json.dumps({"records": [{"id": "S1", "subjects": ["free:notes"]}]}))
        assert records[0].subjects == ["free:notes"]

    def test_duplicate_id(self):
        text = json.dumps({"records": [{"id": "S1"}, {"id": "S1"}]})
        with pytest.raises(RegistryError, match="duplicate"):
            parse_records(text)

    def test_missing_id(self):
        with pytest.raises(RegistryError, match="id"):
            parse_records('{"records": [{"subjects": ["NS"]}]}')


class TestBuildContext:
    def test_reproduces_table1_up_to_ordering(self, corpus, table1):
        ctx = build_context(corpus)
        assert set(ctx.objects) == set(table1.objects)
        assert {a.term for a in ctx.attributes} == {a.term for a in table1.attributes}
        for g in table1.objects:
            assert {a.term for a in ctx.intent_of(g)} == {
                a.term for a in table1.intent_of(g)
            }
        assert {a.category for a in ctx.attributes} == {"Subject", "Organism", "Quality"}
        # same concept structure once latticized
        lat = build_lattice(ctx)
        ref = build_lattice(table1)
        assert len(lat.concepts) == len(ref.concepts)
        assert {
            frozenset(a.term for a in c.intent) for c in lat.concepts
        } == {frozenset(a.term for a in c.intent) for c in ref.concepts}

    def test_quality_only(self, corpus):
        ctx = build_context(corpus, BinarizationConfig(categories_included=frozenset({"Quality"})))
        assert list(ctx.objects) == ["S1", "S2", "S4"]
        assert [a.term for a in ctx.attributes] == ["MR"]
        assert ctx.derive_attributes(list(ctx.attributes)) == {"S1", "S2", "S4"}

    def test_empty_corpus(self):
        ctx = build_context([])
        assert ctx.objects == () and ctx.attributes == ()

    def test_no_categories_rejected(self, corpus):
        with pytest.raises(RegistryError):
            build_context(corpus, BinarizationConfig(categories_included=frozenset()))

    def test_field_rules(self, corpus):
        cfg = BinarizationConfig(
            field_rules=(
                FieldRule("identification", "update_frequency", "monthly", "updated:monthly"),
            )
        )
        ctx = build_context(corpus, cfg)
        rule_attrs = [a for a in ctx.attributes if a.term == "updated:monthly"]
        assert len(rule_attrs) == 1
        assert rule_attrs[0].category == "Identification"
        assert ctx.derive_attributes(rule_attrs) == set(ctx.objects)

    def test_order_stability(self, corpus):
        reordered = list(reversed(corpus))
        a = build_context(corpus)
        b = build_context(reordered)
        assert set(a.objects) == set(b.objects)
        la, lb = build_lattice(a), build_lattice(b)
        assert {(c.extent, frozenset(x.key for x in c.intent)) for c in la.concepts} == {
            (c.extent, frozenset(x.key for x in c.intent)) for c in lb.concepts
        }


class TestRoundTrip:
    def test_write_then_parse(self, corpus):
        text = write_records(corpus)
        again = parse_records(text)
        assert again == corpus
        assert write_records(again) == text

    def test_context_round_trip(self, corpus):
        again = parse_records(write_records(corpus))
        assert build_context(again) == build_context(corpus)


class TestValidateRecord:
    def test_clean_record(self, organisms):
        r = MetadataRecord(
            id="X",
            subjects=["genes"],
            organisms=["NCBI:Human"],
            quality=["reviewed"],
            ontologies_used=[],
        )
        # prefix checked against the passed ontologies, not the declarations
        findings = validate_record(r, [organisms])
        assert findings == []

    def test_unknown_ontology_term(self, organisms):
        r = MetadataRecord(id="X", subjects=["s"], organisms=["NCBI:Dog"], quality=["q"])
        findings = validate_record(r, [organisms])
        assert len(findings) == 1
        assert findings[0].level == "warning"
        assert "Dog" in findings[0].message

    def test_empty_categories(self, organisms):
        r = MetadataRecord(id="X")
        findings = validate_record(r, [organisms])
        assert [f.level for f in findings] == ["info", "info", "info"]

    def test_malformed_date(self, organisms):
        r = MetadataRecord(
            id="X",
            identification={"date_modified": "next tuesday"},
            subjects=["s"],
            organisms=["NCBI:Human"],
            quality=["q"],
        )
        findings = validate_record(r, [organisms])
        assert any("date" in f.message for f in findings if f.level == "warning")

    def test_alias_resolves(self, organisms):
        r = MetadataRecord(id="X", subjects=["s"], organisms=["NCBI:Hu"], quality=["q"])
        assert validate_record(r, [organisms]) == []
