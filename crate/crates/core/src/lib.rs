//! Clause-structured regulatory and standards text to a requirements knowledge graph.

pub mod document;
pub mod graph;
pub mod iri;
pub mod lexical;
pub mod mapping;
pub mod pipeline;
pub mod pitfall;
pub mod requirements;
pub mod terms;
pub mod text;

pub use document::{
    clause_at, parse_document, sentences_of, to_annotated_text, Clause, ClauseKind, DefinitionEntry, DocType,
    DocumentError, DocumentSource, SentenceUnit,
};
pub use graph::{
    build_graph, collection_members, concepts_of, isomorphic, parse_ntriples, requirements_using,
    serialize_ntriples, serialize_turtle, Graph, GraphError, Literal, Term, Triple,
};
pub use iri::{BaseIri, Iri, IriError};
pub use lexical::{
    align_lexical_entries, harvest_lexical_entries, link_requirements, match_concepts, ConceptMatch, LexicalEntry,
    Lexicon, LinkRole,
};
pub use mapping::{
    apply_curation, coverage_report, parse_curation, propose_alignments, CoverageReport, MappingAssertion,
    MappingError, MappingKind, PartialReason, Proposal, StrictnessDelta,
};
pub use pipeline::{process, Inputs, PipelineError, Processed};
pub use pitfall::{scan, PitfallReport, ScanConfig, VocabularyManifest};
pub use requirements::{
    atomize_requirement, classify_modality, extract_requirements, Extraction, Modality, Requirement,
    RequirementCollection,
};
pub use terms::{
    apply_relations, build_concept_scheme, infer_semantic_relations, Category, CategoryMap, Concept, ConceptScheme,
    TermError,
};
