//! Modal classification, atomization and requirement collections.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::document::{sentences_of, Clause, ClauseKind, DocumentSource};
use crate::iri::{BaseIri, Iri};
use crate::text::words;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Modality {
    Shall,
    ShallNot,
    Should,
    ShouldNot,
    May,
    Can,
}

impl Modality {
    pub const ALL: [Modality; 6] =
        [Modality::Shall, Modality::ShallNot, Modality::Should, Modality::ShouldNot, Modality::May, Modality::Can];

    /// Strictness rank: shall/shall not 3, should/should not 2, may 1, can 0.
    pub fn rank(self) -> u8 {
        match self {
            Modality::Shall | Modality::ShallNot => 3,
            Modality::Should | Modality::ShouldNot => 2,
            Modality::May => 1,
            Modality::Can => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Shall => "shall",
            Modality::ShallNot => "shall not",
            Modality::Should => "should",
            Modality::ShouldNot => "should not",
            Modality::May => "may",
            Modality::Can => "can",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Modality::ALL.into_iter().find(|m| m.as_str() == s.trim().to_lowercase())
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum DiagnosticKind {
    /// "must" is recognized but not extracted.
    Must,
    /// "may not" is read as May.
    MayNot,
    /// "cannot" is read as Can.
    Cannot,
}

impl DiagnosticKind {
    pub fn message(self) -> &'static str {
        match self {
            DiagnosticKind::Must => "`must` is not an extracted modal; sentence skipped unless another modal occurs",
            DiagnosticKind::MayNot => "`may not` has ambiguous polarity; classified as May",
            DiagnosticKind::Cannot => "`cannot` has ambiguous polarity; classified as Can",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub clause: String,
    pub text: String,
}

/// One modal phrase found in a text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModalHit {
    pub modality: Modality,
    pub span: Range<usize>,
    pub diagnostic: Option<DiagnosticKind>,
}

/// Every modal phrase and "must" in `text`, left to right. "must" hits carry
/// no modality and are returned separately.
fn scan_modals(text: &str) -> (Vec<ModalHit>, Vec<DiagnosticKind>) {
    let ws = words(text);
    let mut hits = Vec::new();
    let mut diags = Vec::new();
    let mut i = 0;
    while i < ws.len() {
        let w = ws[i].lower.as_str();
        let next_not = ws.get(i + 1).is_some_and(|n| n.lower == "not");
        let span_to = |j: usize| ws[i].span.start..ws[j].span.end;
        let hit = match w {
            "shall" if next_not => Some((Modality::ShallNot, i + 1, None)),
            "shall" => Some((Modality::Shall, i, None)),
            "should" if next_not => Some((Modality::ShouldNot, i + 1, None)),
            "should" => Some((Modality::Should, i, None)),
            "may" if next_not => Some((Modality::May, i + 1, Some(DiagnosticKind::MayNot))),
            "may" => Some((Modality::May, i, None)),
            "can" => Some((Modality::Can, i, None)),
            "cannot" => Some((Modality::Can, i, Some(DiagnosticKind::Cannot))),
            "must" => {
                diags.push(DiagnosticKind::Must);
                None
            }
            _ => None,
        };
        match hit {
            Some((modality, last, diagnostic)) => {
                if let Some(d) = diagnostic {
                    diags.push(d);
                }
                hits.push(ModalHit { modality, span: span_to(last), diagnostic });
                i = last + 1;
            }
            None => i += 1,
        }
    }
    (hits, diags)
}

pub fn find_modals(text: &str) -> Vec<ModalHit> {
    scan_modals(text).0
}

/// Strongest modal in `text`; ties go to the first occurrence.
pub fn classify_modality(sentence: &str) -> Option<Modality> {
    strongest(&find_modals(sentence)).map(|h| h.modality)
}

fn strongest(hits: &[ModalHit]) -> Option<&ModalHit> {
    hits.iter().fold(None, |best: Option<&ModalHit>, h| match best {
        Some(b) if b.modality.rank() >= h.modality.rank() => Some(b),
        _ => Some(h),
    })
}

/// Diagnostics raised by `text` (must, may not, cannot).
pub fn modal_diagnostics(text: &str) -> Vec<DiagnosticKind> {
    scan_modals(text).1
}

/// Byte offsets of top-level (paren depth 0) occurrences of `pat` in `s`.
fn top_level_matches(s: &str, pat: &str) -> Vec<usize> {
    let mut out = Vec::new();
    let mut depth: usize = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ if depth == 0 && s[i..].starts_with(pat) => out.push(i),
            _ => {}
        }
    }
    out
}

fn finalize(atom: &str) -> String {
    let mut t = atom.trim().trim_end_matches([';', ',', ' ']).to_string();
    if !t.ends_with(['.', '?', '!']) {
        t.push('.');
    }
    t
}

fn split_semicolon_joints(text: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut rest = text;
    loop {
        let cut = top_level_matches(rest, "; ").into_iter().find(|&i| {
            let (l, r) = (&rest[..i], &rest[i + 2..]);
            classify_modality(l).is_some() && classify_modality(r).is_some()
        });
        match cut {
            Some(i) => {
                parts.push(rest[..i].to_string());
                let r = rest[i + 2..].trim_start();
                rest = r.strip_prefix("and ").or_else(|| r.strip_prefix("or ")).unwrap_or(r);
            }
            None => {
                parts.push(rest.to_string());
                return parts;
            }
        }
    }
}

/// Splits "X shall A and shall B" into "X shall A" and "X shall B".
fn split_and_modal(text: &str) -> Vec<String> {
    let lower = text.to_ascii_lowercase();
    let cut = top_level_matches(&lower, " and ").into_iter().find(|&i| {
        let after = &lower[i + 5..];
        let starts_modal = ["shall", "should", "may", "can"].iter().any(|m| {
            after.starts_with(m) && !after[m.len()..].starts_with(|c: char| c.is_alphanumeric())
        });
        starts_modal && classify_modality(&text[..i]).is_some()
    });
    let Some(i) = cut else {
        return vec![text.to_string()];
    };
    let left = &text[..i];
    let first_modal = find_modals(left)[0].span.start;
    let subject = left[..first_modal].trim();
    let right = text[i + 5..].trim();
    let right = if subject.is_empty() { right.to_string() } else { format!("{subject} {right}") };
    let mut out = vec![left.to_string()];
    out.extend(split_and_modal(&right));
    out
}

/// Atomic requirement texts for a modal-bearing sentence unit. List items are
/// already separate units, so only repeated-modal joints are split here.
pub fn atomize_requirement(unit: &str) -> Vec<String> {
    if classify_modality(unit).is_none() {
        return Vec::new();
    }
    split_semicolon_joints(unit)
        .iter()
        .flat_map(|part| split_and_modal(part))
        .map(|a| finalize(&a))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Requirement {
    pub iri: Iri,
    pub text: String,
    pub modality: Modality,
    pub source_clause: String,
    /// 1-based position within the source clause.
    pub ordinal: usize,
    /// 1-based position within the document.
    pub sequence: usize,
    pub doc_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RequirementCollection {
    pub iri: Iri,
    pub source_clause: String,
    pub heading: String,
    /// Requirement IRIs in text order.
    pub members: Vec<Iri>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Extraction {
    pub requirements: Vec<Requirement>,
    pub collections: Vec<RequirementCollection>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn requirement_iri(base: &BaseIri, doc_id: &str, clause_id: &str, ordinal: usize) -> Iri {
    base.mint(doc_id, "requirement", &format!("{clause_id}-{ordinal}"))
}

/// Requirements of every normative clause, grouped into one collection per
/// outermost normative clause (a normative clause with no normative ancestor).
pub fn extract_requirements(doc: &DocumentSource, base: &BaseIri) -> Extraction {
    let mut out = Extraction::default();
    for root in &doc.clauses {
        collect_roots(root, doc, base, &mut out);
    }
    out
}

fn collect_roots(clause: &Clause, doc: &DocumentSource, base: &BaseIri, out: &mut Extraction) {
    if clause.kind == ClauseKind::Normative {
        let first = out.requirements.len();
        extract_subtree(clause, doc, base, out);
        let members: Vec<Iri> = out.requirements[first..].iter().map(|r| r.iri.clone()).collect();
        if !members.is_empty() {
            out.collections.push(RequirementCollection {
                iri: base.mint(&doc.doc_id, "collection", &clause.id),
                source_clause: clause.id.clone(),
                heading: clause.title().to_string(),
                members,
            });
        }
    } else {
        for ch in &clause.children {
            collect_roots(ch, doc, base, out);
        }
    }
}

fn extract_subtree(clause: &Clause, doc: &DocumentSource, base: &BaseIri, out: &mut Extraction) {
    if clause.kind == ClauseKind::Normative {
        let mut ordinal = 0;
        for unit in sentences_of(clause) {
            for kind in modal_diagnostics(&unit.text) {
                out.diagnostics.push(Diagnostic { kind, clause: clause.id.clone(), text: unit.text.clone() });
            }
            for atom in atomize_requirement(&unit.text) {
                let modality = classify_modality(&atom).expect("atoms carry a modal");
                ordinal += 1;
                let sequence = out.requirements.len() + 1;
                out.requirements.push(Requirement {
                    iri: requirement_iri(base, &doc.doc_id, &clause.id, ordinal),
                    text: atom,
                    modality,
                    source_clause: clause.id.clone(),
                    ordinal,
                    sequence,
                    doc_id: doc.doc_id.clone(),
                });
            }
        }
    }
    for ch in &clause.children {
        if ch.kind == ClauseKind::Normative {
            extract_subtree(ch, doc, base, out);
        } else {
            // A non-normative clause inside a normative one starts its own grouping.
            collect_roots(ch, doc, base, out);
        }
    }
}
