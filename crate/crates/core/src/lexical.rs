//! Requirement to concept links and lexical entries for undefined terms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::iri::{BaseIri, Iri};
use crate::requirements::{find_modals, Requirement};
use crate::terms::{Category, ConceptScheme};
use crate::text::{find_word_sequence, normalize_phrase, slugify, words};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexicalError {
    #[error("line {line}: {message}")]
    LexiconSyntax { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum LinkRole {
    Uses,
    ImplementedBy,
    TrackedBy,
}

impl LinkRole {
    pub const ALL: [LinkRole; 3] = [LinkRole::Uses, LinkRole::ImplementedBy, LinkRole::TrackedBy];

    /// Local name of the linking property.
    pub fn as_str(self) -> &'static str {
        match self {
            LinkRole::Uses => "uses",
            LinkRole::ImplementedBy => "implementedBy",
            LinkRole::TrackedBy => "trackedBy",
        }
    }
}

impl fmt::Display for LinkRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConceptMatch {
    pub requirement: Iri,
    pub concept: Iri,
    /// Matched text as it appears in the requirement.
    pub surface: String,
    pub span: Range<usize>,
    /// Unset until `assign_link_roles` runs.
    pub role: Option<LinkRole>,
}

/// Label occurrences of scheme concepts in the requirement text.
///
/// Longer matches (in words) win over shorter ones they overlap; each concept
/// is reported once, at its first kept occurrence, ordered by position.
pub fn match_concepts(req: &Requirement, scheme: &ConceptScheme) -> Vec<ConceptMatch> {
    let ws = words(&req.text);
    // (word start, word len, concept index)
    let mut candidates: Vec<(usize, usize, usize)> = Vec::new();
    for (ci, c) in scheme.concepts.iter().enumerate() {
        for label in c.labels() {
            let needle: Vec<String> = words(label).into_iter().map(|w| w.norm).collect();
            for start in find_word_sequence(&ws, &needle) {
                candidates.push((start, needle.len(), ci));
            }
        }
    }
    candidates.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)).then(a.2.cmp(&b.2)));
    let mut taken = vec![false; ws.len()];
    let mut kept: Vec<(usize, usize, usize)> = Vec::new();
    for (start, len, ci) in candidates {
        if taken[start..start + len].iter().any(|&t| t) {
            continue;
        }
        taken[start..start + len].iter_mut().for_each(|t| *t = true);
        kept.push((start, len, ci));
    }
    kept.sort();
    let mut seen = BTreeSet::new();
    kept.into_iter()
        .filter(|&(_, _, ci)| seen.insert(ci))
        .map(|(start, len, ci)| {
            let span = ws[start].span.start..ws[start + len - 1].span.end;
            ConceptMatch {
                requirement: req.iri.clone(),
                concept: scheme.concepts[ci].iri.clone(),
                surface: req.text[span.clone()].to_string(),
                span,
                role: None,
            }
        })
        .collect()
}

/// The first actor before the first modal implements the requirement; other
/// actors track it; every other concept is used.
pub fn assign_link_roles(req: &Requirement, matches: Vec<ConceptMatch>, scheme: &ConceptScheme) -> Vec<ConceptMatch> {
    let modal_at = find_modals(&req.text).first().map(|h| h.span.start).unwrap_or(usize::MAX);
    let mut implementer_found = false;
    matches
        .into_iter()
        .map(|mut m| {
            let actor = scheme.get(&m.concept).is_some_and(|c| c.category == Category::Actor);
            let role = if !actor {
                LinkRole::Uses
            } else if !implementer_found && m.span.end <= modal_at {
                implementer_found = true;
                LinkRole::ImplementedBy
            } else {
                LinkRole::TrackedBy
            };
            m.role = Some(role);
            m
        })
        .collect()
}

/// Matches and roles for every requirement.
pub fn link_requirements(reqs: &[Requirement], scheme: &ConceptScheme) -> Vec<ConceptMatch> {
    reqs.iter()
        .flat_map(|r| assign_link_roles(r, match_concepts(r, scheme), scheme))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LexiconPhrase {
    pub phrase: String,
    pub category: Option<Category>,
}

/// Candidate phrases for lexical entries, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Lexicon {
    pub phrases: Vec<LexiconPhrase>,
}

impl Lexicon {
    /// One phrase per line, optionally followed by ` category=<actor|artefact|process>`.
    /// Phrases are lowercased; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, LexicalError> {
        let mut phrases = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (phrase, category) = match content.find("category=") {
                Some(at) => {
                    let value = content[at + "category=".len()..].trim();
                    let cat = Category::parse(value).ok_or_else(|| LexicalError::LexiconSyntax {
                        line,
                        message: format!("unknown category `{value}`"),
                    })?;
                    (content[..at].trim(), Some(cat))
                }
                None => (content, None),
            };
            if words(phrase).is_empty() {
                return Err(LexicalError::LexiconSyntax { line, message: "phrase has no words".into() });
            }
            phrases.push(LexiconPhrase { phrase: phrase.to_lowercase(), category });
        }
        Ok(Lexicon { phrases })
    }

    pub fn extend(&mut self, other: Lexicon) {
        self.phrases.extend(other.phrases);
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AlignmentCandidate {
    pub doc_id: String,
    pub concept: Iri,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LexicalEntry {
    pub iri: Iri,
    pub surface_form: String,
    pub normalized_form: String,
    pub category: Option<Category>,
    /// Requirement IRIs in document order.
    pub occurrences: Vec<Iri>,
    pub alignment_candidates: Vec<AlignmentCandidate>,
}

/// Lexicon phrases that occur in at least one requirement and are not concept labels.
pub fn harvest_lexical_entries(
    reqs: &[Requirement],
    scheme: &ConceptScheme,
    lexicon: &Lexicon,
    base: &BaseIri,
) -> Vec<LexicalEntry> {
    let defined = scheme.normalized_labels();
    let req_words: Vec<_> = reqs.iter().map(|r| words(&r.text)).collect();
    let mut seen = BTreeSet::new();
    let mut slugs: BTreeMap<String, usize> = BTreeMap::new();
    let mut out = Vec::new();
    for p in &lexicon.phrases {
        let normalized = normalize_phrase(&p.phrase);
        if defined.contains(&normalized) || seen.contains(&normalized) {
            continue;
        }
        let needle: Vec<String> = normalized.split(' ').map(str::to_string).collect();
        let occurrences: Vec<Iri> = reqs
            .iter()
            .zip(&req_words)
            .filter(|(_, ws)| !find_word_sequence(ws, &needle).is_empty())
            .map(|(r, _)| r.iri.clone())
            .collect();
        if occurrences.is_empty() {
            continue;
        }
        seen.insert(normalized.clone());
        let mut slug = slugify(&normalized);
        let n = slugs.entry(slug.clone()).or_insert(0);
        *n += 1;
        if *n > 1 {
            slug = format!("{slug}-{n}");
        }
        out.push(LexicalEntry {
            iri: base.mint(&scheme.doc_id, "lexical", &slug),
            surface_form: p.phrase.clone(),
            normalized_form: normalized,
            category: p.category,
            occurrences,
            alignment_candidates: Vec::new(),
        });
    }
    out
}

/// Concepts of another scheme whose label equals the entry, or is a trailing
/// word sequence of it ("quality management system" to "management system").
pub fn alignment_candidates(entry: &LexicalEntry, other: &ConceptScheme) -> Vec<AlignmentCandidate> {
    let entry_words: Vec<&str> = entry.normalized_form.split(' ').collect();
    let mut out: Vec<AlignmentCandidate> = other
        .concepts
        .iter()
        .filter(|c| {
            c.labels().any(|l| {
                let n = normalize_phrase(l);
                let lw: Vec<&str> = n.split(' ').collect();
                !n.is_empty() && entry_words.ends_with(&lw)
            })
        })
        .map(|c| AlignmentCandidate { doc_id: other.doc_id.clone(), concept: c.iri.clone() })
        .collect();
    out.sort();
    out
}

/// Fills `alignment_candidates` of each entry against the other schemes.
pub fn align_lexical_entries(entries: &mut [LexicalEntry], others: &[&ConceptScheme]) {
    for e in entries.iter_mut() {
        let mut all: Vec<AlignmentCandidate> = others.iter().flat_map(|s| alignment_candidates(e, s)).collect();
        all.sort();
        all.dedup();
        e.alignment_candidates = all;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::requirements::{requirement_iri, Modality};
    use crate::terms::{build_concept_scheme, CategoryMap};
    use crate::DefinitionEntry;

    fn base() -> BaseIri {
        BaseIri::new("https://example.org/tair/").unwrap()
    }

    fn scheme(terms: &[(&str, Category)]) -> ConceptScheme {
        let mut cats = CategoryMap::new();
        let defs: Vec<_> = terms
            .iter()
            .enumerate()
            .map(|(i, (t, c))| {
                cats.insert(t, *c);
                DefinitionEntry {
                    term: t.to_string(),
                    alt_labels: vec![],
                    definition: "d".into(),
                    subclause_path: format!("3.{}", i + 1),
                    cross_refs: vec![],
                    external_refs: vec![],
                    clause_id: "3".into(),
                }
            })
            .collect();
        build_concept_scheme("d", &defs, &cats, &base()).unwrap()
    }

    fn req(text: &str) -> Requirement {
        Requirement {
            iri: requirement_iri(&base(), "d", "1", 1),
            text: text.into(),
            modality: Modality::Shall,
            source_clause: "1".into(),
            ordinal: 1,
            sequence: 1,
            doc_id: "d".into(),
        }
    }

    fn slugs(ms: &[ConceptMatch]) -> Vec<(String, Option<LinkRole>)> {
        ms.iter().map(|m| (m.concept.local_name().to_string(), m.role)).collect()
    }

    #[test]
    fn longest_match_suppresses_embedded_label() {
        let s = scheme(&[
            ("biometric data", Category::Artefact),
            ("remote biometric identification system", Category::Artefact),
            ("biometric identification", Category::Process),
        ]);
        let ms = match_concepts(&req("A remote biometric identification system shall not be used."), &s);
        assert_eq!(slugs(&ms), [("remote-biometric-identification-system".into(), None)]);
    }

    #[test]
    fn plural_and_case_insensitive() {
        let s = scheme(&[("provider", Category::Actor), ("CE marking", Category::Artefact)]);
        let ms = match_concepts(&req("PROVIDERS shall affix the ce marking; providers shall rest."), &s);
        assert_eq!(slugs(&ms), [("provider".into(), None), ("ce-marking".into(), None)]);
        assert_eq!(ms[0].surface, "PROVIDERS");
        assert!(match_concepts(&req("Nothing defined shall appear."), &s).is_empty());
    }

    #[test]
    fn roles_follow_subject_rule() {
        let s = scheme(&[
            ("provider", Category::Actor),
            ("notified body", Category::Actor),
            ("quality management system", Category::Artefact),
            ("top management", Category::Actor),
        ]);
        let link = |t: &str| {
            let r = req(t);
            slugs(&assign_link_roles(&r, match_concepts(&r, &s), &s))
        };
        assert_eq!(
            link("The provider shall establish a quality management system."),
            [("provider".into(), Some(LinkRole::ImplementedBy)), ("quality-management-system".into(), Some(LinkRole::Uses))]
        );
        assert_eq!(link("Top management shall demonstrate leadership."), [("top-management".into(), Some(LinkRole::ImplementedBy))]);
        assert_eq!(
            link("The provider shall inform the notified body."),
            [("provider".into(), Some(LinkRole::ImplementedBy)), ("notified-body".into(), Some(LinkRole::TrackedBy))]
        );
        assert_eq!(link("It shall notify the provider."), [("provider".into(), Some(LinkRole::TrackedBy))]);
    }

    #[test]
    fn lexicon_parsing() {
        let l = Lexicon::parse("# header\nRisk Management System category=artefact\nlogs\n\n").unwrap();
        assert_eq!(l.phrases[0], LexiconPhrase { phrase: "risk management system".into(), category: Some(Category::Artefact) });
        assert_eq!(l.phrases[1].category, None);
        assert!(matches!(Lexicon::parse("x category=thing"), Err(LexicalError::LexiconSyntax { line: 1, .. })));
    }

    #[test]
    fn harvest_excludes_defined_and_absent() {
        let s = scheme(&[("provider", Category::Actor)]);
        let lex = Lexicon::parse("risk management system\nproviders\nrisk management systems\nchildren\n").unwrap();
        let reqs = [req("The provider shall keep a risk management system.")];
        let entries = harvest_lexical_entries(&reqs, &s, &lex, &base());
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].normalized_form, "risk management system");
        assert_eq!(entries[0].iri.as_str(), "https://example.org/tair/d/lexical/risk-management-system");
        assert_eq!(entries[0].occurrences, [reqs[0].iri.clone()]);
        assert!(harvest_lexical_entries(&reqs, &s, &Lexicon::default(), &base()).is_empty());
    }

    #[test]
    fn alignment_by_exact_or_head() {
        let other = scheme(&[("management system", Category::Artefact), ("system", Category::Artefact), ("audit", Category::Process)]);
        let e = LexicalEntry {
            iri: base().mint("d", "lexical", "qms"),
            surface_form: "quality management systems".into(),
            normalized_form: "quality management system".into(),
            category: None,
            occurrences: vec![],
            alignment_candidates: vec![],
        };
        let got: Vec<_> = alignment_candidates(&e, &other).into_iter().map(|c| c.concept.local_name().to_string()).collect();
        assert_eq!(got, ["management-system", "system"]);
    }
}
