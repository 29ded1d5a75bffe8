//! Typed read access to graph nodes.

use serde::Serialize;

use super::vocab::{dct, rdfs, skos, tair};
use super::{concepts_of, Graph};
use crate::iri::Iri;
use crate::lexical::LinkRole;
use crate::requirements::Modality;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DocumentRecord {
    pub iri: Iri,
    pub identifier: String,
    pub title: String,
    pub doc_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RequirementRecord {
    pub iri: Iri,
    pub text: String,
    pub modality: Option<Modality>,
    pub source_clause: String,
    pub ordinal: Option<i64>,
    pub sequence: Option<i64>,
    pub links: Vec<(LinkRole, Iri)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConceptRecord {
    pub iri: Iri,
    pub pref_label: String,
    pub alt_labels: Vec<String>,
    pub definition: String,
    pub category: String,
    pub source_clause: String,
    pub broader: Vec<Iri>,
    pub narrower: Vec<Iri>,
    pub related: Vec<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LexicalRecord {
    pub iri: Iri,
    pub label: String,
    pub normalized_form: String,
    pub category: Option<String>,
    pub occurrences: Vec<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CollectionRecord {
    pub iri: Iri,
    pub label: String,
    pub source_clause: String,
    pub members: Vec<Iri>,
}

fn lit(g: &Graph, s: &Iri, p: Iri) -> String {
    g.literal(s, &p).unwrap_or_default().to_string()
}

fn iris(g: &Graph, s: &Iri, p: Iri) -> Vec<Iri> {
    g.object_iris(s, &p).cloned().collect()
}

fn int(g: &Graph, s: &Iri, p: Iri) -> Option<i64> {
    g.literal(s, &p).and_then(|v| v.parse().ok())
}

/// The first `tair:Document` node, if any.
pub fn document(g: &Graph) -> Option<DocumentRecord> {
    let iri = g.instances_of(&tair::document()).into_iter().next()?;
    Some(DocumentRecord {
        identifier: lit(g, &iri, dct::identifier()),
        title: lit(g, &iri, dct::title()),
        doc_type: lit(g, &iri, tair::document_type()),
        iri,
    })
}

pub fn requirement(g: &Graph, iri: &Iri) -> Option<RequirementRecord> {
    let links = concepts_of(g, iri).ok()?;
    Some(RequirementRecord {
        iri: iri.clone(),
        text: lit(g, iri, dct::description()),
        modality: g.literal(iri, &tair::modality()).and_then(Modality::parse),
        source_clause: lit(g, iri, tair::source_clause()),
        ordinal: int(g, iri, tair::ordinal()),
        sequence: int(g, iri, tair::sequence()),
        links,
    })
}

/// Requirements in document order (by sequence, then IRI).
pub fn requirements(g: &Graph) -> Vec<RequirementRecord> {
    let mut out: Vec<_> =
        g.instances_of(&tair::requirement()).iter().filter_map(|i| requirement(g, i)).collect();
    out.sort_by(|a, b| (a.sequence.unwrap_or(i64::MAX), &a.iri).cmp(&(b.sequence.unwrap_or(i64::MAX), &b.iri)));
    out
}

pub fn concept(g: &Graph, iri: &Iri) -> Option<ConceptRecord> {
    if !g.has_type(iri, &tair::concept()) {
        return None;
    }
    Some(ConceptRecord {
        iri: iri.clone(),
        pref_label: lit(g, iri, skos::pref_label()),
        alt_labels: g
            .objects(iri, &skos::alt_label())
            .filter_map(|t| t.as_literal())
            .map(|l| l.lexical.clone())
            .collect(),
        definition: lit(g, iri, skos::definition()),
        category: lit(g, iri, tair::category()),
        source_clause: lit(g, iri, tair::source_clause()),
        broader: iris(g, iri, skos::broader()),
        narrower: iris(g, iri, skos::narrower()),
        related: iris(g, iri, skos::related()),
    })
}

/// Concepts sorted by IRI.
pub fn concepts(g: &Graph) -> Vec<ConceptRecord> {
    g.instances_of(&tair::concept()).iter().filter_map(|i| concept(g, i)).collect()
}

/// Lexical entries sorted by IRI.
pub fn lexical_entries(g: &Graph) -> Vec<LexicalRecord> {
    g.instances_of(&tair::lexical_entry())
        .into_iter()
        .map(|iri| LexicalRecord {
            label: lit(g, &iri, rdfs::label()),
            normalized_form: lit(g, &iri, tair::normalized_form()),
            category: g.literal(&iri, &tair::category()).map(str::to_string),
            occurrences: iris(g, &iri, tair::occurs_in()),
            iri,
        })
        .collect()
}

/// Collections sorted by IRI, members in document order.
pub fn collections(g: &Graph) -> Vec<CollectionRecord> {
    g.instances_of(&tair::requirement_collection())
        .into_iter()
        .map(|iri| CollectionRecord {
            label: lit(g, &iri, rdfs::label()),
            source_clause: lit(g, &iri, tair::source_clause()),
            members: super::collection_members(g, &iri).unwrap_or_default(),
            iri,
        })
        .collect()
}
