use std::collections::BTreeSet;

use super::vocab::{dct, rdf, rdfs, skos, tair};
use super::{Graph, GraphError, Literal};
use crate::document::DocumentSource;
use crate::iri::Iri;
use crate::lexical::{ConceptMatch, LexicalEntry, LinkRole};
use crate::requirements::{Requirement, RequirementCollection};
use crate::terms::ConceptScheme;

fn link_property(role: LinkRole) -> Iri {
    match role {
        LinkRole::Uses => tair::uses(),
        LinkRole::ImplementedBy => tair::implemented_by(),
        LinkRole::TrackedBy => tair::tracked_by(),
    }
}

fn check(known: &BTreeSet<&Iri>, iri: &Iri, what: &str) -> Result<(), GraphError> {
    if known.contains(iri) {
        Ok(())
    } else {
        Err(GraphError::Dangling(format!("{what} {iri}")))
    }
}

/// Materializes one document's extraction results as a graph.
///
/// Every IRI used as an object must be minted by the same inputs; matches
/// without a role are emitted as `uses`.
pub fn build_graph(
    doc: &DocumentSource,
    scheme: &ConceptScheme,
    reqs: &[Requirement],
    collections: &[RequirementCollection],
    matches: &[ConceptMatch],
    lexical: &[LexicalEntry],
) -> Result<Graph, GraphError> {
    if scheme.doc_id != doc.doc_id {
        return Err(GraphError::DocumentMismatch(doc.doc_id.clone(), scheme.doc_id.clone()));
    }
    if let Some(r) = reqs.iter().find(|r| r.doc_id != doc.doc_id) {
        return Err(GraphError::DocumentMismatch(doc.doc_id.clone(), r.doc_id.clone()));
    }
    let concepts: BTreeSet<&Iri> = scheme.concepts.iter().map(|c| &c.iri).collect();
    let requirements: BTreeSet<&Iri> = reqs.iter().map(|r| &r.iri).collect();

    let mut g = Graph::with_standard_namespaces();
    let ty = rdf::type_();

    let doc_iri = doc.base_iri.document(&doc.doc_id);
    g.add(&doc_iri, ty.clone(), tair::document());
    g.add(&doc_iri, dct::title(), Literal::en(&doc.title));
    g.add(&doc_iri, dct::identifier(), Literal::plain(&doc.doc_id));
    g.add(&doc_iri, tair::document_type(), Literal::plain(doc.doc_type.as_str()));

    g.add(&scheme.iri, ty.clone(), skos::concept_scheme());
    g.add(&scheme.iri, dct::title(), Literal::en(format!("Concepts of {}", doc.title)));
    g.add(&scheme.iri, dct::is_part_of(), doc_iri.clone());

    for c in &scheme.concepts {
        g.add(&c.iri, ty.clone(), tair::concept());
        g.add(&c.iri, skos::pref_label(), Literal::en(&c.pref_label));
        for alt in &c.alt_labels {
            g.add(&c.iri, skos::alt_label(), Literal::en(alt));
        }
        g.add(&c.iri, skos::definition(), Literal::en(&c.definition));
        g.add(&c.iri, tair::category(), Literal::plain(c.category.as_str()));
        g.add(&c.iri, tair::source_clause(), Literal::plain(&c.source_clause));
        for (list, prop) in [(&c.broader, skos::broader()), (&c.narrower, skos::narrower()), (&c.related, skos::related())] {
            for t in list {
                check(&concepts, t, "concept relation target")?;
                g.add(&c.iri, prop.clone(), t.clone());
            }
        }
    }

    for r in reqs {
        g.add(&r.iri, ty.clone(), tair::requirement());
        g.add(&r.iri, dct::description(), Literal::en(&r.text));
        g.add(&r.iri, tair::modality(), Literal::plain(r.modality.as_str()));
        g.add(&r.iri, tair::source_clause(), Literal::plain(&r.source_clause));
        g.add(&r.iri, tair::ordinal(), Literal::integer(r.ordinal as i64));
        g.add(&r.iri, tair::sequence(), Literal::integer(r.sequence as i64));
    }

    for col in collections {
        g.add(&col.iri, ty.clone(), tair::requirement_collection());
        g.add(&col.iri, rdfs::label(), Literal::en(&col.heading));
        g.add(&col.iri, tair::source_clause(), Literal::plain(&col.source_clause));
        for m in &col.members {
            check(&requirements, m, "collection member")?;
            g.add(&col.iri, tair::decomposes(), m.clone());
        }
    }

    for m in matches {
        check(&requirements, &m.requirement, "linked requirement")?;
        check(&concepts, &m.concept, "linked concept")?;
        let role = m.role.unwrap_or(LinkRole::Uses);
        g.add(&m.requirement, link_property(role), m.concept.clone());
    }

    for e in lexical {
        g.add(&e.iri, ty.clone(), tair::lexical_entry());
        g.add(&e.iri, rdfs::label(), Literal::en(&e.surface_form));
        g.add(&e.iri, tair::normalized_form(), Literal::plain(&e.normalized_form));
        if let Some(cat) = e.category {
            g.add(&e.iri, tair::category(), Literal::plain(cat.as_str()));
        }
        for occ in &e.occurrences {
            check(&requirements, occ, "lexical occurrence")?;
            g.add(&e.iri, tair::occurs_in(), occ.clone());
        }
    }
    Ok(g)
}
