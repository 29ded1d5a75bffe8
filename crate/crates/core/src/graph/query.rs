use std::collections::BTreeSet;

use super::vocab::tair;
use super::{Graph, GraphError, Term};
use crate::iri::Iri;
use crate::lexical::LinkRole;

fn role_property(role: LinkRole) -> Iri {
    match role {
        LinkRole::Uses => tair::uses(),
        LinkRole::ImplementedBy => tair::implemented_by(),
        LinkRole::TrackedBy => tair::tracked_by(),
    }
}

fn require_type(g: &Graph, iri: &Iri, class: Iri) -> Result<(), GraphError> {
    if g.has_type(iri, &class) {
        Ok(())
    } else {
        Err(GraphError::NotFound(iri.clone()))
    }
}

/// Requirements linked to `concept` by any of the three roles, sorted by IRI.
pub fn requirements_using(g: &Graph, concept: &Iri) -> Result<Vec<Iri>, GraphError> {
    require_type(g, concept, tair::concept())?;
    let o = Term::Iri(concept.clone());
    let mut out = BTreeSet::new();
    for role in LinkRole::ALL {
        let p = role_property(role);
        out.extend(g.subjects_with(&p, &o).cloned());
    }
    Ok(out.into_iter().collect())
}

/// (role, concept) links of a requirement, sorted by concept IRI then role.
pub fn concepts_of(g: &Graph, requirement: &Iri) -> Result<Vec<(LinkRole, Iri)>, GraphError> {
    require_type(g, requirement, tair::requirement())?;
    let mut out: Vec<(LinkRole, Iri)> = LinkRole::ALL
        .into_iter()
        .flat_map(|role| {
            let p = role_property(role);
            g.object_iris(requirement, &p).cloned().map(move |c| (role, c)).collect::<Vec<_>>()
        })
        .collect();
    out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(out)
}

fn sequence_of(g: &Graph, req: &Iri) -> i64 {
    g.literal(req, &tair::sequence()).and_then(|s| s.parse().ok()).unwrap_or(i64::MAX)
}

/// Members of a collection in document order (by `tair:sequence`).
pub fn collection_members(g: &Graph, collection: &Iri) -> Result<Vec<Iri>, GraphError> {
    require_type(g, collection, tair::requirement_collection())?;
    let p = tair::decomposes();
    let mut members: Vec<(i64, Iri)> =
        g.object_iris(collection, &p).map(|m| (sequence_of(g, m), m.clone())).collect();
    members.sort();
    Ok(members.into_iter().map(|(_, m)| m).collect())
}
