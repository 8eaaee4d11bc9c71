"""Concept-lattice organization and ranked discovery of metadata-described data sources."""

from .context import (
    CATEGORIES,
    Attribute,
    FormalContext,
    context_from_csv,
    context_to_csv,
)
from .errors import (
    ContextError,
    FcaRegistryError,
    LatticeError,
    OntologyError,
    QueryError,
    RegistryError,
)
from .lattice import (
    ConceptLattice,
    FormalConcept,
    build_lattice,
    enumerate_concepts_oracle,
    enumerate_covers_oracle,
    export_dot,
    insert_object,
    lattice_from_json,
    lattice_to_json,
)
from .ontology import (
    Ontology,
    RefinementReport,
    load_ontology,
    refine_both,
    refine_generalize,
    refine_specialize,
)
from .registry import (
    BinarizationConfig,
    FieldRule,
    Finding,
    MetadataRecord,
    OntologyRef,
    build_context,
    load_records,
    parse_records,
    validate_record,
    write_records,
)
from .retrieval import (
    Query,
    RankedResult,
    ResultSet,
    insert_query,
    result_set_to_json,
    result_set_to_table,
    search,
    search_refined,
)

__version__ = "0.1.0"

__all__ = [
    "Attribute",
    "BinarizationConfig",
    "CATEGORIES",
    "ConceptLattice",
    "ContextError",
    "FcaRegistryError",
    "FieldRule",
    "Finding",
    "FormalConcept",
    "FormalContext",
    "LatticeError",
    "MetadataRecord",
    "Ontology",
    "OntologyError",
    "OntologyRef",
    "Query",
    "QueryError",
    "RankedResult",
    "RefinementReport",
    "RegistryError",
    "ResultSet",
    "build_context",
    "build_lattice",
    "context_from_csv",
    "context_to_csv",
    "enumerate_concepts_oracle",
    "enumerate_covers_oracle",
    "export_dot",
    "insert_object",
    "insert_query",
    "lattice_from_json",
    "lattice_to_json",
    "load_ontology",
    "load_records",
    "parse_records",
    "refine_both",
    "refine_generalize",
    "refine_specialize",
    "result_set_to_json",
    "result_set_to_table",
    "search",
    "search_refined",
    "validate_record",
    "write_records",
]
