//! The full per-document chain: parse, concepts, requirements, links, lexical entries, graph.

use thiserror::Error;

use crate::document::{parse_document, DocumentError, DocumentSource};
use crate::graph::{build_graph, Graph, GraphError};
use crate::iri::BaseIri;
use crate::lexical::{harvest_lexical_entries, link_requirements, ConceptMatch, LexicalEntry, Lexicon};
use crate::requirements::{extract_requirements, Extraction};
use crate::terms::{
    apply_relations, build_concept_scheme, extract_definitions, infer_semantic_relations, CategoryMap, ConceptScheme,
    TermError,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error(transparent)]
    Terms(#[from] TermError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Everything derived from one annotated document.
#[derive(Debug, Clone)]
pub struct Processed {
    pub document: DocumentSource,
    pub scheme: ConceptScheme,
    pub extraction: Extraction,
    pub matches: Vec<ConceptMatch>,
    pub lexical: Vec<LexicalEntry>,
    pub graph: Graph,
}

/// Inputs besides the document text. An explicit base overrides the one in `#doc`.
#[derive(Debug, Clone, Default)]
pub struct Inputs<'a> {
    pub base: Option<&'a BaseIri>,
    pub categories: Option<&'a CategoryMap>,
    pub lexicon: Option<&'a Lexicon>,
}

pub fn process(text: &str, inputs: &Inputs<'_>) -> Result<Processed, PipelineError> {
    let document = parse_document(text, inputs.base)?;
    let base = document.base_iri.clone();
    let empty_categories = CategoryMap::default();
    let empty_lexicon = Lexicon::default();
    let defs = extract_definitions(&document);
    let scheme = build_concept_scheme(
        &document.doc_id,
        &defs,
        inputs.categories.unwrap_or(&empty_categories),
        &base,
    )?;
    let edges = infer_semantic_relations(&scheme, &defs)?;
    let scheme = apply_relations(scheme, &edges)?;
    let extraction = extract_requirements(&document, &base);
    let matches = link_requirements(&extraction.requirements, &scheme);
    let lexical = harvest_lexical_entries(
        &extraction.requirements,
        &scheme,
        inputs.lexicon.unwrap_or(&empty_lexicon),
        &base,
    );
    let graph = build_graph(&document, &scheme, &extraction.requirements, &extraction.collections, &matches, &lexical)?;
    Ok(Processed { document, scheme, extraction, matches, lexical, graph })
}
