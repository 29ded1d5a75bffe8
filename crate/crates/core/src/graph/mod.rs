//! Named-node triple graphs: model, building, serialization and queries.

mod build;
mod ntriples;
mod query;
mod turtle;
pub mod view;
pub mod vocab;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::iri::{Iri, IriError};

pub use build::build_graph;
pub use ntriples::{parse_ntriples, serialize_ntriples};
pub use query::{collection_members, concepts_of, requirements_using};
pub use turtle::serialize_turtle;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("dangling reference: {0}")]
    Dangling(String),
    #[error("inputs belong to different documents: `{0}` and `{1}`")]
    DocumentMismatch(String, String),
    #[error("not found: {0}")]
    NotFound(Iri),
    #[error(transparent)]
    Iri(#[from] IriError),
    #[error("invalid language tag `{0}`")]
    LanguageTag(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Literal {
    pub lexical: String,
    pub lang: Option<String>,
    /// `None` for plain strings; `xsd:string` is folded to `None`.
    pub datatype: Option<Iri>,
}

fn valid_lang(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let first = parts.next().unwrap_or("");
    !first.is_empty()
        && first.len() <= 8
        && first.bytes().all(|b| b.is_ascii_alphabetic())
        && parts.all(|p| !p.is_empty() && p.len() <= 8 && p.bytes().all(|b| b.is_ascii_alphanumeric()))
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), lang: None, datatype: None }
    }

    pub fn lang(lexical: impl Into<String>, tag: &str) -> Result<Self, GraphError> {
        if !valid_lang(tag) {
            return Err(GraphError::LanguageTag(tag.to_string()));
        }
        Ok(Literal { lexical: lexical.into(), lang: Some(tag.to_ascii_lowercase()), datatype: None })
    }

    /// English literal; the tag is known to be valid.
    pub fn en(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), lang: Some("en".into()), datatype: None }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        let datatype = (datatype != vocab::xsd::string()).then_some(datatype);
        Literal { lexical: lexical.into(), lang: None, datatype }
    }

    pub fn integer(n: i64) -> Self {
        Literal::typed(n.to_string(), vocab::xsd::integer())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(i) => Some(i),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            Term::Iri(_) => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(i: Iri) -> Self {
        Term::Iri(i)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple { subject, predicate, object: object.into() }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&ntriples::triple_line(self))
    }
}

/// A set of triples plus prefix declarations used only for Turtle output.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    triples: BTreeSet<Triple>,
    namespaces: BTreeMap<String, String>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Empty graph with the standard prefixes declared.
    pub fn with_standard_namespaces() -> Self {
        let mut g = Graph::new();
        for (p, ns) in vocab::NAMESPACES {
            g.declare_namespace(p, ns);
        }
        g
    }

    pub fn declare_namespace(&mut self, prefix: &str, ns: &str) {
        self.namespaces.insert(prefix.to_string(), ns.to_string());
    }

    pub fn namespaces(&self) -> &BTreeMap<String, String> {
        &self.namespaces
    }

    /// Returns false when the triple was already present.
    pub fn insert(&mut self, t: Triple) -> bool {
        self.triples.insert(t)
    }

    pub fn add(&mut self, s: &Iri, p: Iri, o: impl Into<Term>) {
        self.triples.insert(Triple::new(s.clone(), p, o));
    }

    pub fn remove(&mut self, t: &Triple) -> bool {
        self.triples.remove(t)
    }

    pub fn retain(&mut self, keep: impl FnMut(&Triple) -> bool) {
        self.triples.retain(keep);
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.contains(t)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Triples in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    /// Triples with the given subject, in canonical order.
    pub fn about<'a, 'b>(&'a self, s: &'b Iri) -> impl Iterator<Item = &'a Triple> + use<'a, 'b> {
        self.triples
            .range(Triple::new(s.clone(), min_iri(), Term::Iri(min_iri()))..)
            .take_while(move |t| &t.subject == s)
    }

    pub fn objects<'a, 'b>(&'a self, s: &'b Iri, p: &'b Iri) -> impl Iterator<Item = &'a Term> + use<'a, 'b> {
        self.about(s).filter(move |t| &t.predicate == p).map(|t| &t.object)
    }

    pub fn object_iris<'a, 'b>(&'a self, s: &'b Iri, p: &'b Iri) -> impl Iterator<Item = &'a Iri> + use<'a, 'b> {
        self.objects(s, p).filter_map(Term::as_iri)
    }

    /// First literal value of `s p`, in canonical order.
    pub fn literal(&self, s: &Iri, p: &Iri) -> Option<&str> {
        self.objects(s, p).find_map(Term::as_literal).map(|l| l.lexical.as_str())
    }

    pub fn subjects_with<'a>(&'a self, p: &'a Iri, o: &'a Term) -> impl Iterator<Item = &'a Iri> + 'a {
        self.triples.iter().filter(move |t| &t.predicate == p && &t.object == o).map(|t| &t.subject)
    }

    pub fn types_of<'a, 'b>(&'a self, s: &'b Iri) -> impl Iterator<Item = &'a Iri> + use<'a, 'b> {
        let ty = vocab::rdf::type_();
        self.about(s)
            .filter(move |t| t.predicate == ty)
            .filter_map(|t| t.object.as_iri())
    }

    pub fn has_type(&self, s: &Iri, class: &Iri) -> bool {
        self.types_of(s).any(|t| t == class)
    }

    /// Subjects typed with `class`, sorted.
    pub fn instances_of(&self, class: &Iri) -> Vec<Iri> {
        let o = Term::Iri(class.clone());
        let ty = vocab::rdf::type_();
        let set: BTreeSet<&Iri> = self.subjects_with(&ty, &o).collect();
        set.into_iter().cloned().collect()
    }

    /// Every subject that has at least one rdf:type, sorted.
    pub fn typed_subjects(&self) -> Vec<Iri> {
        let ty = vocab::rdf::type_();
        let set: BTreeSet<&Iri> = self.triples.iter().filter(|t| t.predicate == ty).map(|t| &t.subject).collect();
        set.into_iter().cloned().collect()
    }

    pub fn predicates(&self) -> BTreeSet<&Iri> {
        self.triples.iter().map(|t| &t.predicate).collect()
    }
}

/// The smallest IRI in the ordering, used as a range lower bound.
fn min_iri() -> Iri {
    Iri::new("a:").expect("valid minimal IRI")
}

/// Graphs without blank nodes are isomorphic exactly when their triple sets are equal.
pub fn isomorphic(g1: &Graph, g2: &Graph) -> bool {
    g1.triples == g2.triples
}
