//! Defined terms to a SKOS-style concept scheme.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::document::{extends, DefinitionEntry, DocumentSource};
use crate::iri::{BaseIri, Iri};
use crate::text::{normalize_phrase, slugify};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("line {line}: {message}")]
    CategorySyntax { line: usize, message: String },
    #[error("term `{0}` is defined more than once")]
    DuplicateTerm(String),
    #[error("terms `{0}` and `{1}` produce the same concept IRI")]
    SlugCollision(String, String),
    #[error("term `{0}` yields an empty slug")]
    EmptySlug(String),
    #[error("category given for undefined term `{0}`")]
    UnknownCategoryTerm(String),
    #[error("broader cycle: {}", .0.iter().map(|i| i.as_str()).collect::<Vec<_>>().join(" -> "))]
    BroaderCycle(Vec<Iri>),
    #[error("relation refers to a concept outside the scheme: {0}")]
    UnknownConcept(Iri),
    #[error("concept {0} is related to itself")]
    SelfRelation(Iri),
    #[error("SKOS invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Actor,
    Artefact,
    Process,
    Unclassified,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Actor => "actor",
            Category::Artefact => "artefact",
            Category::Process => "process",
            Category::Unclassified => "unclassified",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "actor" => Some(Category::Actor),
            "artefact" | "artifact" => Some(Category::Artefact),
            "process" => Some(Category::Process),
            "unclassified" => Some(Category::Unclassified),
            _ => None,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Curated term to category assignments, keyed case-insensitively.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CategoryMap {
    entries: BTreeMap<String, (String, Category)>,
}

impl CategoryMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads `term = category` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, TermError> {
        let mut map = CategoryMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| TermError::CategorySyntax { line, message };
            let (term, cat) = content
                .rsplit_once('=')
                .ok_or_else(|| err(format!("expected `term = category`, got `{content}`")))?;
            let term = term.trim();
            if term.is_empty() {
                return Err(err("empty term".into()));
            }
            let category = Category::parse(cat).ok_or_else(|| err(format!("unknown category `{}`", cat.trim())))?;
            if let Some((_, prev)) = map.entries.get(&term.to_lowercase()) {
                if *prev != category {
                    return Err(err(format!("`{term}` already assigned to {prev}")));
                }
            }
            map.insert(term, category);
        }
        Ok(map)
    }

    pub fn insert(&mut self, term: &str, category: Category) {
        self.entries.insert(term.to_lowercase(), (term.to_string(), category));
    }

    pub fn get(&self, term: &str) -> Option<Category> {
        self.entries.get(&term.to_lowercase()).map(|(_, c)| *c)
    }

    /// Merges `other` into `self`; later assignments win.
    pub fn extend(&mut self, other: CategoryMap) {
        self.entries.extend(other.entries);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.values().map(|(t, _)| t.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Concept {
    pub iri: Iri,
    pub pref_label: String,
    pub alt_labels: Vec<String>,
    pub definition: String,
    pub source_clause: String,
    pub subclause_path: String,
    pub category: Category,
    pub broader: Vec<Iri>,
    pub narrower: Vec<Iri>,
    pub related: Vec<Iri>,
}

impl Concept {
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.pref_label.as_str()).chain(self.alt_labels.iter().map(String::as_str))
    }

    pub fn slug(&self) -> &str {
        self.iri.local_name()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConceptScheme {
    pub iri: Iri,
    pub doc_id: String,
    /// In definition order.
    pub concepts: Vec<Concept>,
}

impl ConceptScheme {
    pub fn get(&self, iri: &Iri) -> Option<&Concept> {
        self.concepts.iter().find(|c| &c.iri == iri)
    }

    /// Finds a concept by any of its labels, case-insensitively.
    pub fn by_label(&self, label: &str) -> Option<&Concept> {
        let lower = label.to_lowercase();
        self.concepts.iter().find(|c| c.labels().any(|l| l.to_lowercase() == lower))
    }

    /// Normalized forms of every pref and alt label.
    pub fn normalized_labels(&self) -> BTreeSet<String> {
        self.concepts.iter().flat_map(|c| c.labels().map(normalize_phrase)).collect()
    }

    fn index(&self) -> HashMap<&Iri, usize> {
        self.concepts.iter().enumerate().map(|(i, c)| (&c.iri, i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Broader,
    Related,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SemanticRelation {
    pub source: Iri,
    pub kind: RelationKind,
    pub target: Iri,
}

/// All definition entries of definitional clauses, in document order.
pub fn extract_definitions(doc: &DocumentSource) -> Vec<DefinitionEntry> {
    doc.definitions().into_iter().cloned().collect()
}

pub fn concept_iri(base: &BaseIri, doc_id: &str, label: &str) -> Iri {
    base.mint(doc_id, "concept", &slugify(label))
}

/// One concept per definition entry, with no relations yet.
pub fn build_concept_scheme(
    doc_id: &str,
    defs: &[DefinitionEntry],
    categories: &CategoryMap,
    base: &BaseIri,
) -> Result<ConceptScheme, TermError> {
    let mut seen_labels: HashMap<String, &str> = HashMap::new();
    let mut seen_slugs: HashMap<String, &str> = HashMap::new();
    let mut concepts = Vec::with_capacity(defs.len());
    for d in defs {
        let lower = d.term.to_lowercase();
        if seen_labels.insert(lower, &d.term).is_some() {
            return Err(TermError::DuplicateTerm(d.term.clone()));
        }
        let slug = slugify(&d.term);
        if slug.is_empty() {
            return Err(TermError::EmptySlug(d.term.clone()));
        }
        if let Some(prev) = seen_slugs.insert(slug, &d.term) {
            return Err(TermError::SlugCollision(prev.to_string(), d.term.clone()));
        }
        concepts.push(Concept {
            iri: concept_iri(base, doc_id, &d.term),
            pref_label: d.term.clone(),
            alt_labels: d.alt_labels.clone(),
            definition: d.definition.clone(),
            source_clause: d.clause_id.clone(),
            subclause_path: d.subclause_path.clone(),
            category: categories.get(&d.term).unwrap_or(Category::Unclassified),
            broader: Vec::new(),
            narrower: Vec::new(),
            related: Vec::new(),
        });
    }
    if let Some(unknown) = categories.terms().find(|t| !seen_labels.contains_key(&t.to_lowercase())) {
        return Err(TermError::UnknownCategoryTerm(unknown.to_string()));
    }
    Ok(ConceptScheme { iri: base.scheme(doc_id), doc_id: doc_id.to_string(), concepts })
}

/// Broader edges from terminology nesting and related edges from cross references.
///
/// Related edges are returned once per unordered pair, oriented from the first
/// definition that mentions the other term. Pairs already joined by a broader
/// edge get no related edge.
pub fn infer_semantic_relations(
    scheme: &ConceptScheme,
    defs: &[DefinitionEntry],
) -> Result<Vec<SemanticRelation>, TermError> {
    let iri_of = |d: &DefinitionEntry| -> Result<Iri, TermError> {
        scheme
            .by_label(&d.term)
            .map(|c| c.iri.clone())
            .ok_or_else(|| TermError::Invariant(format!("definition `{}` has no concept", d.term)))
    };
    let mut edges = Vec::new();
    let mut broader_pairs: BTreeSet<(Iri, Iri)> = BTreeSet::new();
    for d in defs {
        let parent = defs
            .iter()
            .filter(|p| extends(&p.subclause_path, &d.subclause_path))
            .max_by_key(|p| p.subclause_path.len());
        if let Some(p) = parent {
            let (child, parent) = (iri_of(d)?, iri_of(p)?);
            broader_pairs.insert((child.clone(), parent.clone()));
            broader_pairs.insert((parent.clone(), child.clone()));
            edges.push(SemanticRelation { source: child, kind: RelationKind::Broader, target: parent });
        }
    }
    check_broader_acyclic(scheme, edges.iter().map(|e| (&e.source, &e.target)))?;

    let mut related_pairs: BTreeSet<(Iri, Iri)> = BTreeSet::new();
    for d in defs {
        let source = iri_of(d)?;
        for r in &d.cross_refs {
            let Some(target) = scheme.by_label(r).map(|c| c.iri.clone()) else {
                continue;
            };
            if target == source || broader_pairs.contains(&(source.clone(), target.clone())) {
                continue;
            }
            let key = if source < target { (source.clone(), target.clone()) } else { (target.clone(), source.clone()) };
            if related_pairs.insert(key) {
                edges.push(SemanticRelation { source: source.clone(), kind: RelationKind::Related, target });
            }
        }
    }
    Ok(edges)
}

fn check_broader_acyclic<'a>(
    scheme: &ConceptScheme,
    edges: impl Iterator<Item = (&'a Iri, &'a Iri)>,
) -> Result<(), TermError> {
    let mut adj: BTreeMap<&Iri, Vec<&Iri>> = BTreeMap::new();
    for c in &scheme.concepts {
        for b in &c.broader {
            adj.entry(&c.iri).or_default().push(b);
        }
    }
    for (s, t) in edges {
        adj.entry(s).or_default().push(t);
    }
    find_cycle(&adj).map_or(Ok(()), |cycle| Err(TermError::BroaderCycle(cycle)))
}

/// Depth-first search for a cycle; returns it as a closed path.
fn find_cycle(adj: &BTreeMap<&Iri, Vec<&Iri>>) -> Option<Vec<Iri>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    fn visit<'a>(
        n: &'a Iri,
        adj: &BTreeMap<&'a Iri, Vec<&'a Iri>>,
        marks: &mut HashMap<&'a Iri, Mark>,
        path: &mut Vec<&'a Iri>,
    ) -> Option<Vec<Iri>> {
        match marks.get(n) {
            Some(Mark::Done) => return None,
            Some(Mark::Open) => {
                let start = path.iter().position(|p| *p == n).expect("open node is on path");
                let mut cycle: Vec<Iri> = path[start..].iter().map(|i| (*i).clone()).collect();
                cycle.push(n.clone());
                return Some(cycle);
            }
            None => {}
        }
        marks.insert(n, Mark::Open);
        path.push(n);
        for next in adj.get(n).into_iter().flatten() {
            if let Some(c) = visit(next, adj, marks, path) {
                return Some(c);
            }
        }
        path.pop();
        marks.insert(n, Mark::Done);
        None
    }
    let mut marks = HashMap::new();
    for n in adj.keys() {
        if let Some(c) = visit(n, adj, &mut marks, &mut Vec::new()) {
            return Some(c);
        }
    }
    None
}

/// Adds `edges` to the scheme, keeping broader/narrower inverse and related symmetric.
pub fn apply_relations(mut scheme: ConceptScheme, edges: &[SemanticRelation]) -> Result<ConceptScheme, TermError> {
    let index = scheme.index();
    let mut resolved = Vec::with_capacity(edges.len());
    for e in edges {
        let s = *index.get(&e.source).ok_or_else(|| TermError::UnknownConcept(e.source.clone()))?;
        let t = *index.get(&e.target).ok_or_else(|| TermError::UnknownConcept(e.target.clone()))?;
        if s == t {
            return Err(TermError::SelfRelation(e.source.clone()));
        }
        resolved.push((s, e.kind, t));
    }
    check_broader_acyclic(
        &scheme,
        edges.iter().filter(|e| e.kind == RelationKind::Broader).map(|e| (&e.source, &e.target)),
    )?;
    for (s, kind, t) in resolved {
        let (si, ti) = (scheme.concepts[s].iri.clone(), scheme.concepts[t].iri.clone());
        match kind {
            RelationKind::Broader => {
                scheme.concepts[s].broader.push(ti);
                scheme.concepts[t].narrower.push(si);
            }
            RelationKind::Related => {
                scheme.concepts[s].related.push(ti);
                scheme.concepts[t].related.push(si);
            }
        }
    }
    for c in &mut scheme.concepts {
        for list in [&mut c.broader, &mut c.narrower, &mut c.related] {
            list.sort();
            list.dedup();
        }
    }
    Ok(scheme)
}

/// Verifies the scheme-level SKOS invariants.
pub fn check_invariants(scheme: &ConceptScheme) -> Result<(), TermError> {
    let index = scheme.index();
    let mut labels = BTreeSet::new();
    for c in &scheme.concepts {
        if !labels.insert(c.pref_label.to_lowercase()) {
            return Err(TermError::DuplicateTerm(c.pref_label.clone()));
        }
    }
    let has = |from: &Iri, list: fn(&Concept) -> &Vec<Iri>, to: &Iri| -> bool {
        index.get(from).is_some_and(|&i| list(&scheme.concepts[i]).contains(to))
    };
    for c in &scheme.concepts {
        for t in c.broader.iter().chain(&c.narrower).chain(&c.related) {
            if !index.contains_key(t) {
                return Err(TermError::UnknownConcept(t.clone()));
            }
        }
        for b in &c.broader {
            if !has(b, |x| &x.narrower, &c.iri) {
                return Err(TermError::Invariant(format!("{} broader {} lacks the narrower inverse", c.iri, b)));
            }
        }
        for n in &c.narrower {
            if !has(n, |x| &x.broader, &c.iri) {
                return Err(TermError::Invariant(format!("{} narrower {} lacks the broader inverse", c.iri, n)));
            }
        }
        for r in &c.related {
            if r == &c.iri {
                return Err(TermError::SelfRelation(c.iri.clone()));
            }
            if !has(r, |x| &x.related, &c.iri) {
                return Err(TermError::Invariant(format!("{} related {} is not symmetric", c.iri, r)));
            }
        }
    }
    check_broader_acyclic(scheme, std::iter::empty())
}
