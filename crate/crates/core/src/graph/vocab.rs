//! Vocabulary IRIs. tair terms live under one fixed namespace; the rest are standard.

use crate::iri::Iri;

pub const TAIR: &str = "https://w3id.org/tair#";
pub const SKOS: &str = "http://www.w3.org/2004/02/skos/core#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const DCT: &str = "http://purl.org/dc/terms/";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const ONTOLEX: &str = "http://www.w3.org/ns/lemon/ontolex#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";

/// Prefixes declared on every built graph.
pub const NAMESPACES: [(&str, &str); 7] = [
    ("tair", TAIR),
    ("skos", SKOS),
    ("rdfs", RDFS),
    ("rdf", RDF),
    ("dct", DCT),
    ("xsd", XSD),
    ("ontolex", ONTOLEX),
];

/// Namespaces whose terms are defined elsewhere and are not linted locally.
pub const EXTERNAL: [&str; 7] = [RDF, RDFS, OWL, SKOS, DCT, XSD, ONTOLEX];

pub fn term(ns: &str, local: &str) -> Iri {
    Iri::new(format!("{ns}{local}")).expect("vocabulary IRIs are valid")
}

macro_rules! terms {
    ($ns:expr; $($name:ident => $local:literal),* $(,)?) => {
        $(
            pub fn $name() -> $crate::iri::Iri {
                super::term($ns, $local)
            }
        )*
    };
}

pub mod tair {
    terms!(super::TAIR;
        document => "Document",
        concept => "Concept",
        requirement => "Requirement",
        requirement_collection => "RequirementCollection",
        lexical_entry => "LexicalEntry",
        uses => "uses",
        implemented_by => "implementedBy",
        tracked_by => "trackedBy",
        decomposes => "decomposes",
        occurs_in => "occursIn",
        category => "category",
        modality => "modality",
        source_clause => "sourceClause",
        ordinal => "ordinal",
        sequence => "sequence",
        document_type => "documentType",
        normalized_form => "normalizedForm",
    );
}

pub mod skos {
    terms!(super::SKOS;
        concept_scheme => "ConceptScheme",
        pref_label => "prefLabel",
        alt_label => "altLabel",
        definition => "definition",
        broader => "broader",
        narrower => "narrower",
        related => "related",
    );
}

pub mod rdf {
    terms!(super::RDF; type_ => "type");
}

pub mod rdfs {
    terms!(super::RDFS; label => "label", comment => "comment");
}

pub mod dct {
    terms!(super::DCT;
        title => "title",
        description => "description",
        identifier => "identifier",
        is_part_of => "isPartOf",
    );
}

pub mod xsd {
    terms!(super::XSD; string => "string", integer => "integer");
}

/// Properties whose values are human-readable names.
pub fn label_properties() -> [Iri; 4] {
    [rdfs::label(), skos::pref_label(), skos::alt_label(), dct::title()]
}

/// Properties whose values are human-readable descriptions.
pub fn description_properties() -> [Iri; 3] {
    [rdfs::comment(), skos::definition(), dct::description()]
}

/// Whether `iri` belongs to a namespace maintained outside this project.
pub fn is_external(iri: &Iri) -> bool {
    EXTERNAL.iter().any(|ns| iri.as_str().starts_with(ns))
}
