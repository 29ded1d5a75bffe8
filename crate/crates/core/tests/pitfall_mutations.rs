//! Pitfall scans on fixture graphs and controlled mutations of them.

mod common;

use common::{iri, run};
use tair_core::graph::vocab::{dct, skos, tair};
use tair_core::pitfall::{scan, PitfallReport, ScanConfig, Severity, VocabularyManifest, DEFAULT_MANIFEST};
use tair_core::{Graph, Term};

fn lint(g: &Graph, manifest: &VocabularyManifest) -> PitfallReport {
    scan(g, "test", manifest, &ScanConfig::default()).unwrap()
}

fn standard() -> VocabularyManifest {
    VocabularyManifest::standard()
}

#[test]
fn clean_fixture_has_no_pitfalls() {
    let r = lint(&run("mss").graph, &standard());
    assert!(r.pitfalls.is_empty(), "{:?}", r.pitfalls);
    assert_eq!(r.summary.minor, 0);
}

#[test]
fn ai_act_reports_the_unused_safety_component() {
    let r = lint(&run("ai-act").graph, &standard());
    assert_eq!(r.pitfalls.len(), 1, "{:?}", r.pitfalls);
    assert_eq!(r.pitfalls[0].code, "P-UNC");
    assert_eq!(r.pitfalls[0].affected, [iri("https://example.org/tair/ai-act/concept/safety-component")]);
}

#[test]
fn stripping_a_concepts_annotations_adds_one_missing_annotation() {
    let mut g = run("mss").graph;
    let c = iri("https://example.org/tair/mss/concept/top-management");
    let before = lint(&g, &standard());
    g.retain(|t| !(t.subject == c && matches!(t.object, Term::Literal(_))));
    let after = lint(&g, &standard());
    assert_eq!(after.count("P-ANN"), before.count("P-ANN") + 1);
    assert_eq!(after.pitfalls.len(), before.pitfalls.len() + 1);
    assert!(after.pitfalls.iter().any(|p| p.code == "P-ANN" && p.affected == [c.clone()]));
}

#[test]
fn requirement_without_text_is_unannotated() {
    let mut g = run("mss").graph;
    let r = iri("https://example.org/tair/mss/requirement/7.1-1");
    g.retain(|t| !(t.subject == r && t.predicate == dct::description()));
    let after = lint(&g, &standard());
    assert_eq!(after.count("P-ANN"), 1);
    assert_eq!(after.pitfalls[0].affected, [r]);
}

#[test]
fn isolating_a_node_adds_one_unconnected() {
    let mut g = run("mss").graph;
    let c = iri("https://example.org/tair/mss/concept/competence");
    g.retain(|t| !((t.subject == c && matches!(t.object, Term::Iri(_)) && t.predicate != tair_core::graph::vocab::rdf::type_())
        || t.object == Term::Iri(c.clone())));
    let after = lint(&g, &standard());
    assert_eq!(after.count("P-UNC"), 1);
    assert_eq!(after.pitfalls[0].affected, [c]);
}

#[test]
fn removing_a_manifest_inverse_adds_one_missing_inverse() {
    let g = run("mss").graph;
    let reduced: String = DEFAULT_MANIFEST.lines().filter(|l| !l.starts_with("tair:implementedBy")).collect::<Vec<_>>().join("\n");
    let after = lint(&g, &VocabularyManifest::parse(&reduced).unwrap());
    assert_eq!(after.count("P-INV"), 1);
    assert_eq!(after.pitfalls[0].affected, [tair::implemented_by()]);
    assert_eq!(after.pitfalls.len(), 1);
}

#[test]
fn isolated_plus_unannotated_gives_two_minor() {
    let mut g = run("mss").graph;
    let extra = iri("https://example.org/tair/mss/concept/orphan");
    g.add(&extra, tair_core::graph::vocab::rdf::type_(), tair::concept());
    let r = lint(&g, &standard());
    assert_eq!(r.summary.minor, 2);
    assert_eq!(r.summary.important + r.summary.critical, 0);
    assert_eq!(r.pitfalls.iter().map(|p| p.code.as_str()).collect::<Vec<_>>(), ["P-ANN", "P-UNC"]);
}

#[test]
fn disabling_a_code_drops_its_rows() {
    let g = run("mss").graph;
    let empty = VocabularyManifest::parse("").unwrap();
    let all = scan(&g, "t", &empty, &ScanConfig::default()).unwrap();
    assert!(all.count("P-INV") > 0);
    let without = scan(&g, "t", &empty, &ScanConfig::without("P-INV")).unwrap();
    assert_eq!(without.count("P-INV"), 0);
}

#[test]
fn every_reported_pitfall_is_minor() {
    let mut g = run("ai-act").graph;
    g.retain(|t| t.predicate != skos::pref_label() && t.predicate != skos::definition());
    let r = lint(&g, &VocabularyManifest::parse("").unwrap());
    assert!(r.count("P-ANN") > 0 && r.count("P-INV") > 0 && r.count("P-UNC") > 0);
    assert!(r.pitfalls.iter().all(|p| p.severity == Severity::Minor));
    assert_eq!(r.summary.minor, r.pitfalls.len());
    let mut sorted = r.pitfalls.clone();
    sorted.sort_by(|a, b| (&a.code, &a.affected).cmp(&(&b.code, &b.affected)));
    assert_eq!(sorted, r.pitfalls);
}

#[test]
fn external_class_is_a_note_not_a_pitfall() {
    let r = lint(&run("mss").graph, &standard());
    assert!(r.notes.iter().any(|n| n.iri == skos::concept_scheme()));
}

#[test]
fn uses_links_alone_connect_a_concept() {
    let g = run("mss").graph;
    let c = iri("https://example.org/tair/mss/concept/competence");
    assert!(g.subjects_with(&tair::uses(), &Term::Iri(c)).next().is_some());
}
