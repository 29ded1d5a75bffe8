//! Ontology pitfall scanning: missing inverses, missing annotations, unconnected nodes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::vocab::{self, rdf};
use crate::graph::{Graph, Term};
use crate::iri::Iri;

/// The vocabulary manifest shipped with the crate.
pub const DEFAULT_MANIFEST: &str = include_str!("../vocab/tair.manifest");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PitfallError {
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("unknown pitfall code `{0}`")]
    UnknownCode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Minor,
    Important,
    Critical,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Minor => "minor",
            Severity::Important => "important",
            Severity::Critical => "critical",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Structural,
    Lexical,
    Characteristic,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Structural => "structural",
            Method::Lexical => "lexical",
            Method::Characteristic => "characteristic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub code: &'static str,
    pub title: &'static str,
    pub severity: Severity,
    pub method: Method,
}

pub const CATALOG: [CatalogEntry; 3] = [
    CatalogEntry { code: "P-ANN", title: "Missing annotations", severity: Severity::Minor, method: Method::Lexical },
    CatalogEntry { code: "P-INV", title: "Missing inverse relationship", severity: Severity::Minor, method: Method::Structural },
    CatalogEntry { code: "P-UNC", title: "Unconnected ontology element", severity: Severity::Minor, method: Method::Structural },
];

fn catalog(code: &str) -> &'static CatalogEntry {
    CATALOG.iter().find(|e| e.code == code).expect("catalog code")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pitfall {
    pub code: String,
    pub severity: Severity,
    pub method: Method,
    pub affected: Vec<Iri>,
    pub message: String,
}

impl Pitfall {
    fn new(code: &str, affected: Vec<Iri>, message: String) -> Self {
        let e = catalog(code);
        Pitfall { code: code.to_string(), severity: e.severity, method: e.method, affected, message }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InverseDecl {
    Inverse(Iri),
    Symmetric,
}

/// Declared object properties and their inverses.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VocabularyManifest {
    decls: BTreeMap<Iri, Option<InverseDecl>>,
}

fn expand(token: &str) -> Option<Iri> {
    if let Some(full) = token.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        return Iri::new(full).ok();
    }
    let (prefix, local) = token.split_once(':')?;
    let ns = vocab::NAMESPACES
        .iter()
        .chain(&[("owl", vocab::OWL)])
        .find(|(p, _)| *p == prefix)
        .map(|(_, ns)| *ns)?;
    Iri::new(format!("{ns}{local}")).ok()
}

impl VocabularyManifest {
    pub fn parse(text: &str) -> Result<Self, PitfallError> {
        let mut m = VocabularyManifest::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| PitfallError::Manifest { line, message };
            let mut parts = content.split_whitespace();
            let prop_tok = parts.next().expect("nonempty line");
            let prop = expand(prop_tok).ok_or_else(|| err(format!("cannot expand `{prop_tok}`")))?;
            let decl = match parts.next() {
                None => None,
                Some("symmetric") => Some(InverseDecl::Symmetric),
                Some(attr) => {
                    let inv_tok = attr
                        .strip_prefix("inverse=")
                        .ok_or_else(|| err(format!("expected `inverse=` or `symmetric`, got `{attr}`")))?;
                    let inv = expand(inv_tok).ok_or_else(|| err(format!("cannot expand `{inv_tok}`")))?;
                    Some(InverseDecl::Inverse(inv))
                }
            };
            if let Some(extra) = parts.next() {
                return Err(err(format!("unexpected `{extra}`")));
            }
            if m.decls.insert(prop.clone(), decl).is_some() {
                return Err(err(format!("`{prop_tok}` declared twice")));
            }
        }
        Ok(m)
    }

    pub fn standard() -> Self {
        Self::parse(DEFAULT_MANIFEST).expect("bundled manifest parses")
    }

    pub fn inverse_of<'a>(&'a self, p: &'a Iri) -> Option<&'a Iri> {
        if let Some(Some(d)) = self.decls.get(p) {
            return Some(match d {
                InverseDecl::Inverse(q) => q,
                InverseDecl::Symmetric => p,
            });
        }
        self.decls.iter().find_map(|(q, d)| match d {
            Some(InverseDecl::Inverse(inv)) if inv == p => Some(q),
            _ => None,
        })
    }

    /// Removes the declaration for `p`, if any. Returns whether it existed.
    pub fn remove(&mut self, p: &Iri) -> bool {
        self.decls.remove(p).is_some()
    }

    pub fn declared(&self) -> impl Iterator<Item = &Iri> {
        self.decls.keys()
    }
}

fn in_scope_namespace(p: &Iri) -> bool {
    p.as_str().starts_with(vocab::TAIR) || p.as_str().starts_with(vocab::SKOS)
}

/// One P-INV per tair/skos property used with IRI objects and lacking an inverse.
pub fn scan_missing_inverses(g: &Graph, manifest: &VocabularyManifest) -> Vec<Pitfall> {
    let ty = rdf::type_();
    let used: BTreeSet<&Iri> = g
        .iter()
        .filter(|t| t.predicate != ty && matches!(t.object, Term::Iri(_)))
        .map(|t| &t.predicate)
        .filter(|p| in_scope_namespace(p))
        .collect();
    used.into_iter()
        .filter(|p| manifest.inverse_of(p).is_none())
        .map(|p| {
            Pitfall::new("P-INV", vec![p.clone()], format!("object property {p} has no declared inverse"))
        })
        .collect()
}

/// Informational remarks that are not pitfalls.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Note {
    pub iri: Iri,
    pub message: String,
}

/// P-ANN for every locally minted typed subject with neither a label nor a description.
/// External subjects and classes are reported as notes instead.
pub fn scan_missing_annotations(g: &Graph) -> (Vec<Pitfall>, Vec<Note>) {
    let labels = vocab::label_properties();
    let descriptions = vocab::description_properties();
    let has_any = |s: &Iri, props: &[Iri]| {
        g.about(s).any(|t| props.contains(&t.predicate) && matches!(t.object, Term::Literal(_)))
    };
    let mut pitfalls = Vec::new();
    let mut notes = BTreeSet::new();
    for s in g.typed_subjects() {
        if vocab::is_external(&s) {
            notes.insert(Note { message: format!("{s} belongs to an external vocabulary; annotations not checked"), iri: s });
            continue;
        }
        for class in g.types_of(&s) {
            if vocab::is_external(class) && !has_any(class, &labels) {
                notes.insert(Note {
                    message: format!("{class} is an external class without local annotations"),
                    iri: class.clone(),
                });
            }
        }
        if !has_any(&s, &labels) && !has_any(&s, &descriptions) {
            pitfalls.push(Pitfall::new("P-ANN", vec![s.clone()], format!("{s} has no label and no description")));
        }
    }
    (pitfalls, notes.into_iter().collect())
}

/// P-UNC for every typed subject with no IRI-valued edge other than rdf:type.
pub fn scan_unconnected(g: &Graph) -> Vec<Pitfall> {
    let ty = rdf::type_();
    let mut connected: BTreeSet<&Iri> = BTreeSet::new();
    for t in g.iter() {
        if t.predicate == ty {
            continue;
        }
        if let Term::Iri(o) = &t.object {
            connected.insert(&t.subject);
            connected.insert(o);
        }
    }
    g.typed_subjects()
        .into_iter()
        .filter(|s| !connected.contains(s))
        .map(|s| Pitfall::new("P-UNC", vec![s.clone()], format!("{s} is not connected to any other element")))
        .collect()
}

/// Which pitfall codes to run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanConfig {
    pub codes: Vec<String>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { codes: CATALOG.iter().map(|e| e.code.to_string()).collect() }
    }
}

impl ScanConfig {
    pub fn only(codes: &[&str]) -> Self {
        ScanConfig { codes: codes.iter().map(|c| c.to_string()).collect() }
    }

    pub fn without(code: &str) -> Self {
        let mut c = ScanConfig::default();
        c.codes.retain(|x| x != code);
        c
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SeverityCounts {
    pub minor: usize,
    pub important: usize,
    pub critical: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PitfallReport {
    pub graph_id: String,
    pub pitfalls: Vec<Pitfall>,
    pub notes: Vec<Note>,
    pub summary: SeverityCounts,
}

impl PitfallReport {
    pub fn count(&self, code: &str) -> usize {
        self.pitfalls.iter().filter(|p| p.code == code).count()
    }
}

/// Runs the enabled scans; pitfalls ordered by code, then first affected IRI.
pub fn scan(
    g: &Graph,
    graph_id: &str,
    manifest: &VocabularyManifest,
    config: &ScanConfig,
) -> Result<PitfallReport, PitfallError> {
    for c in &config.codes {
        if !CATALOG.iter().any(|e| e.code == c) {
            return Err(PitfallError::UnknownCode(c.clone()));
        }
    }
    let enabled = |code: &str| config.codes.iter().any(|c| c == code);
    let mut pitfalls = Vec::new();
    let mut notes = Vec::new();
    if enabled("P-INV") {
        pitfalls.extend(scan_missing_inverses(g, manifest));
    }
    if enabled("P-ANN") {
        let (p, n) = scan_missing_annotations(g);
        pitfalls.extend(p);
        notes = n;
    }
    if enabled("P-UNC") {
        pitfalls.extend(scan_unconnected(g));
    }
    pitfalls.sort_by(|a, b| (&a.code, &a.affected).cmp(&(&b.code, &b.affected)));
    let mut summary = SeverityCounts::default();
    for p in &pitfalls {
        match p.severity {
            Severity::Minor => summary.minor += 1,
            Severity::Important => summary.important += 1,
            Severity::Critical => summary.critical += 1,
        }
    }
    Ok(PitfallReport { graph_id: graph_id.to_string(), pitfalls, notes, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::vocab::{skos, tair};
    use crate::graph::Literal;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    #[test]
    fn bundled_manifest_declares_pairs() {
        let m = VocabularyManifest::standard();
        assert_eq!(m.inverse_of(&skos::broader()), Some(&skos::narrower()));
        assert_eq!(m.inverse_of(&skos::narrower()), Some(&skos::broader()));
        assert_eq!(m.inverse_of(&skos::related()), Some(&skos::related()));
        assert!(m.inverse_of(&tair::uses()).is_some());
        assert!(m.inverse_of(&vocab::term(vocab::TAIR, "constrainedBy")).is_none());
    }

    #[test]
    fn manifest_errors() {
        assert!(matches!(VocabularyManifest::parse("foo:bar"), Err(PitfallError::Manifest { line: 1, .. })));
        assert!(matches!(
            VocabularyManifest::parse("tair:a\ntair:a inverse=tair:b"),
            Err(PitfallError::Manifest { line: 2, .. })
        ));
        assert!(matches!(VocabularyManifest::parse("tair:a inverted=tair:b"), Err(PitfallError::Manifest { .. })));
    }

    #[test]
    fn undeclared_property_gives_one_inverse_pitfall() {
        let mut g = Graph::with_standard_namespaces();
        let (a, b) = (iri("http://x/a"), iri("http://x/b"));
        let constrained_by = vocab::term(vocab::TAIR, "constrainedBy");
        g.add(&a, constrained_by.clone(), b.clone());
        g.add(&a, skos::broader(), b.clone());
        g.add(&b, skos::narrower(), a.clone());
        let p = scan_missing_inverses(&g, &VocabularyManifest::standard());
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].affected, [constrained_by]);
        assert_eq!(p[0].severity, Severity::Minor);
    }

    #[test]
    fn annotations_and_external_notes() {
        let mut g = Graph::with_standard_namespaces();
        let c = iri("http://x/c");
        let bare = iri("http://x/bare");
        g.add(&c, rdf::type_(), tair::concept());
        g.add(&c, skos::pref_label(), Literal::en("c"));
        g.add(&bare, rdf::type_(), skos::concept_scheme());
        let (p, notes) = scan_missing_annotations(&g);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].affected, [bare]);
        assert_eq!(notes.len(), 1);
        assert_eq!(notes[0].iri, skos::concept_scheme());
    }

    #[test]
    fn isolated_node() {
        let mut g = Graph::new();
        let n = iri("http://x/n");
        g.add(&n, rdf::type_(), tair::concept());
        assert_eq!(scan_unconnected(&g).len(), 1);
        g.add(&n, skos::related(), iri("http://x/m"));
        assert!(scan_unconnected(&g).is_empty());
    }

    #[test]
    fn config_validation() {
        let g = Graph::new();
        let m = VocabularyManifest::standard();
        assert_eq!(scan(&g, "g", &m, &ScanConfig::only(&["P-XYZ"])), Err(PitfallError::UnknownCode("P-XYZ".into())));
        assert!(scan(&g, "g", &m, &ScanConfig::default()).unwrap().pitfalls.is_empty());
    }
}
