//! Regulation to standard requirement coverage: proposals, curation and reports.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::graph::view::{self, RequirementRecord};
use crate::graph::vocab::tair;
use crate::graph::Graph;
use crate::iri::Iri;
use crate::requirements::Modality;
use crate::text::normalize_phrase;

pub const DEFAULT_THRESHOLD: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MappingError {
    #[error("curation line {line}: {message}")]
    CurationSyntax { line: usize, message: String },
    #[error("curation line {line}: unknown {side} requirement {iri}")]
    UnknownIri { line: usize, side: &'static str, iri: String },
    #[error("curation line {line}: contradicts line {previous} for the same pair")]
    Contradiction { line: usize, previous: usize },
    #[error("curation line {line}: partial mapping needs at least one reason")]
    PartialWithoutReason { line: usize },
    #[error("requirement {0} has no modality")]
    MissingModality(Iri),
    #[error("assertions do not partition the regulation requirements: {0}")]
    NotAPartition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum MappingKind {
    Full,
    Partial,
    Unmapped,
}

impl MappingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MappingKind::Full => "full",
            MappingKind::Partial => "partial",
            MappingKind::Unmapped => "unmapped",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum PartialReason {
    StrictnessWeaker,
    ConceptDefinitionDiffers,
    IncompleteCoverage,
}

impl PartialReason {
    pub fn as_str(self) -> &'static str {
        match self {
            PartialReason::StrictnessWeaker => "strictnessWeaker",
            PartialReason::ConceptDefinitionDiffers => "conceptDefinitionDiffers",
            PartialReason::IncompleteCoverage => "incompleteCoverage",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [PartialReason::StrictnessWeaker, PartialReason::ConceptDefinitionDiffers, PartialReason::IncompleteCoverage]
            .into_iter()
            .find(|r| r.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum StrictnessDelta {
    Equal,
    TargetWeaker,
    TargetStronger,
}

impl StrictnessDelta {
    pub fn as_str(self) -> &'static str {
        match self {
            StrictnessDelta::Equal => "equal",
            StrictnessDelta::TargetWeaker => "targetWeaker",
            StrictnessDelta::TargetStronger => "targetStronger",
        }
    }
}

/// Compares a source modality `a` with a target modality `b` by strictness rank.
pub fn strictness_delta(a: Modality, b: Modality) -> StrictnessDelta {
    match a.rank().cmp(&b.rank()) {
        std::cmp::Ordering::Equal => StrictnessDelta::Equal,
        std::cmp::Ordering::Greater => StrictnessDelta::TargetWeaker,
        std::cmp::Ordering::Less => StrictnessDelta::TargetStronger,
    }
}

// ---------------------------------------------------------------------------
// Proposals
// ---------------------------------------------------------------------------

const STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "also", "an", "and", "any", "are", "as", "at", "be",
    "been", "before", "being", "below", "between", "both", "but", "by", "do", "does", "doing", "down", "during",
    "each", "either", "for", "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers", "him",
    "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself", "me", "more", "most", "my", "no", "nor",
    "not", "of", "off", "on", "once", "only", "or", "other", "our", "ours", "out", "over", "own", "same", "she",
    "so", "some", "such", "than", "that", "the", "their", "theirs", "them", "then", "there", "these", "they",
    "this", "those", "through", "to", "too", "under", "until", "up", "upon", "very", "was", "we", "were", "what",
    "when", "where", "whether", "which", "while", "who", "whom", "why", "with", "within", "without", "you",
    "your", "shall", "should", "may", "can", "cannot", "must", "will", "would", "could", "might",
];

/// Lowercased alphanumeric runs that are not stop words or modal verbs.
pub fn content_tokens(text: &str) -> BTreeSet<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .filter(|w| !STOPWORDS.contains(&w.as_str()))
        .collect()
}

/// |a ∩ b| / |a ∪ b|, with two empty sets scoring 0.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequirementFeatures {
    pub iri: Iri,
    pub modality: Option<Modality>,
    pub tokens: BTreeSet<String>,
    /// Normalized preferred labels of linked concepts.
    pub concepts: BTreeSet<String>,
}

pub fn features(g: &Graph) -> Vec<RequirementFeatures> {
    let labels: HashMap<Iri, String> =
        view::concepts(g).into_iter().map(|c| (c.iri, normalize_phrase(&c.pref_label))).collect();
    view::requirements(g).into_iter().map(|r| features_of(&r, &labels)).collect()
}

fn features_of(r: &RequirementRecord, labels: &HashMap<Iri, String>) -> RequirementFeatures {
    RequirementFeatures {
        iri: r.iri.clone(),
        modality: r.modality,
        tokens: content_tokens(&r.text),
        concepts: r.links.iter().filter_map(|(_, c)| labels.get(c).cloned()).collect(),
    }
}

/// Half token overlap, half linked-concept overlap; token overlap alone when
/// neither side links any concept.
pub fn similarity(a: &RequirementFeatures, b: &RequirementFeatures) -> f64 {
    let jt = jaccard(&a.tokens, &b.tokens);
    if a.concepts.is_empty() && b.concepts.is_empty() {
        return jt;
    }
    0.5 * jt + 0.5 * jaccard(&a.concepts, &b.concepts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Proposal {
    pub source: Iri,
    pub target: Iri,
    pub score: f64,
}

/// Candidate pairs with a positive score of at least `threshold`, best first.
pub fn propose_alignments(reg: &Graph, std: &Graph, threshold: f64) -> Vec<Proposal> {
    let (rf, sf) = (features(reg), features(std));
    let mut out: Vec<Proposal> = rf
        .iter()
        .flat_map(|a| {
            sf.iter().filter_map(move |b| {
                let score = similarity(a, b);
                (score > 0.0 && score >= threshold).then(|| Proposal { source: a.iri.clone(), target: b.iri.clone(), score })
            })
        })
        .collect();
    out.sort_by(|x, y| {
        y.score
            .total_cmp(&x.score)
            .then_with(|| x.source.cmp(&y.source))
            .then_with(|| x.target.cmp(&y.target))
    });
    out
}

// ---------------------------------------------------------------------------
// Curation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurationDecision {
    Accept { kind: MappingKind, reasons: BTreeSet<PartialReason> },
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurationRow {
    pub line: usize,
    pub source: String,
    pub target: String,
    pub decision: CurationDecision,
    pub note: String,
}

/// Reads `source ; target ; full|partial|reject ; reasons=a,b ; note="..."` rows.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_curation(text: &str) -> Result<Vec<CurationRow>, MappingError> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let err = |message: String| MappingError::CurationSyntax { line, message };
        let fields = split_fields(content).map_err(err)?;
        if fields.len() < 3 {
            return Err(err(format!("expected at least 3 `;`-separated fields, got {}", fields.len())));
        }
        let mut reasons = BTreeSet::new();
        let mut note = String::new();
        for f in &fields[3..] {
            if let Some(list) = f.strip_prefix("reasons=") {
                for r in list.split(',').map(str::trim).filter(|r| !r.is_empty()) {
                    reasons.insert(PartialReason::parse(r).ok_or_else(|| err(format!("unknown reason `{r}`")))?);
                }
            } else if let Some(n) = f.strip_prefix("note=") {
                note = unquote(n).ok_or_else(|| err("note must be double-quoted".into()))?;
            } else if !f.is_empty() {
                return Err(err(format!("unknown field `{f}`")));
            }
        }
        let decision = match fields[2].as_str() {
            "full" => CurationDecision::Accept { kind: MappingKind::Full, reasons },
            "partial" => {
                if reasons.is_empty() {
                    return Err(MappingError::PartialWithoutReason { line });
                }
                CurationDecision::Accept { kind: MappingKind::Partial, reasons }
            }
            "reject" => CurationDecision::Reject,
            other => return Err(err(format!("unknown decision `{other}`"))),
        };
        rows.push(CurationRow { line, source: fields[0].clone(), target: fields[1].clone(), decision, note });
    }
    Ok(rows)
}

/// Splits on `;` outside double quotes and trims each field.
fn split_fields(s: &str) -> Result<Vec<String>, String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut in_quotes = false;
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        match c {
            '"' => {
                in_quotes = !in_quotes;
                cur.push(c);
            }
            '\\' if in_quotes => {
                cur.push(c);
                if let Some(n) = chars.next() {
                    cur.push(n);
                }
            }
            ';' if !in_quotes => fields.push(std::mem::take(&mut cur).trim().to_string()),
            c => cur.push(c),
        }
    }
    if in_quotes {
        return Err("unterminated quote".into());
    }
    fields.push(cur.trim().to_string());
    Ok(fields)
}

fn unquote(s: &str) -> Option<String> {
    let inner = s.strip_prefix('"')?.strip_suffix('"')?;
    let mut out = String::new();
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            out.push(chars.next()?);
        } else {
            out.push(c);
        }
    }
    Some(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MappingAssertion {
    pub source_req: Iri,
    pub target_reqs: Vec<Iri>,
    pub kind: MappingKind,
    pub partial_reasons: BTreeSet<PartialReason>,
    /// Against the strictest target; absent for unmapped requirements.
    pub strictness_delta: Option<StrictnessDelta>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Curated {
    pub assertions: Vec<MappingAssertion>,
    /// Proposals the curation neither accepted nor rejected.
    pub unreviewed: Vec<Proposal>,
}

/// An accepted row with its resolved target, kind and reasons.
type Accepted<'a> = (&'a CurationRow, Iri, MappingKind, &'a BTreeSet<PartialReason>);

/// Turns curation rows into one assertion per regulation requirement.
///
/// Only accepted rows produce mappings; proposals are advisory. A target
/// weaker than the source adds `strictnessWeaker` and makes the mapping partial.
pub fn apply_curation(
    proposals: &[Proposal],
    rows: &[CurationRow],
    reg: &Graph,
    std: &Graph,
) -> Result<Curated, MappingError> {
    let reg_reqs = view::requirements(reg);
    let std_modality: HashMap<Iri, Option<Modality>> =
        view::requirements(std).into_iter().map(|r| (r.iri, r.modality)).collect();
    let reg_set: BTreeSet<&Iri> = reg_reqs.iter().map(|r| &r.iri).collect();

    let mut seen: BTreeMap<(Iri, Iri), &CurationRow> = BTreeMap::new();
    let mut accepted: BTreeMap<Iri, Vec<Accepted>> = BTreeMap::new();
    for row in rows {
        let source = Iri::new(row.source.as_str())
            .ok()
            .filter(|s| reg_set.contains(s))
            .ok_or_else(|| MappingError::UnknownIri { line: row.line, side: "regulation", iri: row.source.clone() })?;
        let target = Iri::new(row.target.as_str())
            .ok()
            .filter(|t| std_modality.contains_key(t))
            .ok_or_else(|| MappingError::UnknownIri { line: row.line, side: "standard", iri: row.target.clone() })?;
        let key = (source.clone(), target.clone());
        if let Some(prev) = seen.get(&key) {
            if prev.decision != row.decision {
                return Err(MappingError::Contradiction { line: row.line, previous: prev.line });
            }
            continue;
        }
        seen.insert(key, row);
        if let CurationDecision::Accept { kind, reasons } = &row.decision {
            accepted.entry(source).or_default().push((row, target, *kind, reasons));
        }
    }

    let mut assertions = Vec::with_capacity(reg_reqs.len());
    for r in &reg_reqs {
        let Some(rows) = accepted.get(&r.iri) else {
            assertions.push(MappingAssertion {
                source_req: r.iri.clone(),
                target_reqs: Vec::new(),
                kind: MappingKind::Unmapped,
                partial_reasons: BTreeSet::new(),
                strictness_delta: None,
                note: String::new(),
            });
            continue;
        };
        let src_mod = r.modality.ok_or_else(|| MappingError::MissingModality(r.iri.clone()))?;
        let mut targets: Vec<Iri> = rows.iter().map(|(_, t, _, _)| t.clone()).collect();
        targets.sort();
        let mut strongest: Option<Modality> = None;
        for t in &targets {
            let m = std_modality[t].ok_or_else(|| MappingError::MissingModality(t.clone()))?;
            if strongest.is_none_or(|s| m.rank() > s.rank()) {
                strongest = Some(m);
            }
        }
        let delta = strictness_delta(src_mod, strongest.expect("at least one target"));
        let mut kind = if rows.iter().any(|(_, _, k, _)| *k == MappingKind::Partial) {
            MappingKind::Partial
        } else {
            MappingKind::Full
        };
        let mut reasons: BTreeSet<PartialReason> = rows.iter().flat_map(|(_, _, _, rs)| rs.iter().copied()).collect();
        if delta == StrictnessDelta::TargetWeaker {
            reasons.insert(PartialReason::StrictnessWeaker);
            kind = MappingKind::Partial;
        }
        let note = rows
            .iter()
            .map(|(row, _, _, _)| row.note.as_str())
            .filter(|n| !n.is_empty())
            .collect::<Vec<_>>()
            .join("; ");
        assertions.push(MappingAssertion {
            source_req: r.iri.clone(),
            target_reqs: targets,
            kind,
            partial_reasons: reasons,
            strictness_delta: Some(delta),
            note,
        });
    }

    let unreviewed = proposals
        .iter()
        .filter(|p| !seen.contains_key(&(p.source.clone(), p.target.clone())))
        .cloned()
        .collect();
    Ok(Curated { assertions, unreviewed })
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct KindCounts {
    pub full: usize,
    pub partial: usize,
    pub unmapped: usize,
}

impl KindCounts {
    pub fn total(&self) -> usize {
        self.full + self.partial + self.unmapped
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverageReport {
    pub regulation: String,
    pub standard: String,
    pub counts: KindCounts,
    pub assertions: Vec<MappingAssertion>,
    pub unresolved_terms: Vec<Iri>,
    pub unreviewed_proposals: Vec<Proposal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
}

/// Tallies assertions and lists regulation lexical entries that stay unresolved.
///
/// An entry is unresolved when it occurs in an unmapped or partially mapped
/// requirement and its normalized form is no concept label of the standard.
pub fn coverage_report(
    curated: &Curated,
    reg: &Graph,
    std: &Graph,
    generated_at: Option<String>,
) -> Result<CoverageReport, MappingError> {
    let assertions = &curated.assertions;
    let reg_reqs: BTreeSet<Iri> = reg.instances_of(&tair::requirement()).into_iter().collect();
    let mut covered = BTreeSet::new();
    for a in assertions {
        if !reg_reqs.contains(&a.source_req) {
            return Err(MappingError::NotAPartition(format!("{} is not a regulation requirement", a.source_req)));
        }
        if !covered.insert(a.source_req.clone()) {
            return Err(MappingError::NotAPartition(format!("{} is assessed twice", a.source_req)));
        }
    }
    if let Some(missing) = reg_reqs.difference(&covered).next() {
        return Err(MappingError::NotAPartition(format!("{missing} is not assessed")));
    }

    let mut counts = KindCounts::default();
    for a in assertions {
        match a.kind {
            MappingKind::Full => counts.full += 1,
            MappingKind::Partial => counts.partial += 1,
            MappingKind::Unmapped => counts.unmapped += 1,
        }
    }

    let open: BTreeSet<&Iri> =
        assertions.iter().filter(|a| a.kind != MappingKind::Full).map(|a| &a.source_req).collect();
    let std_labels: BTreeSet<String> = view::concepts(std)
        .iter()
        .flat_map(|c| std::iter::once(&c.pref_label).chain(&c.alt_labels).map(|l| normalize_phrase(l)))
        .collect();
    let unresolved_terms = view::lexical_entries(reg)
        .into_iter()
        .filter(|e| e.occurrences.iter().any(|o| open.contains(o)))
        .filter(|e| !std_labels.contains(&e.normalized_form))
        .map(|e| e.iri)
        .collect();

    let doc_id = |g: &Graph| view::document(g).map(|d| d.identifier).unwrap_or_default();
    Ok(CoverageReport {
        regulation: doc_id(reg),
        standard: doc_id(std),
        counts,
        assertions: assertions.clone(),
        unresolved_terms,
        unreviewed_proposals: curated.unreviewed.clone(),
        generated_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feat(text: &str, concepts: &[&str]) -> RequirementFeatures {
        RequirementFeatures {
            iri: Iri::new("http://x/r").unwrap(),
            modality: Some(Modality::Shall),
            tokens: content_tokens(text),
            concepts: concepts.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn deltas() {
        assert_eq!(strictness_delta(Modality::Shall, Modality::Should), StrictnessDelta::TargetWeaker);
        assert_eq!(strictness_delta(Modality::May, Modality::Shall), StrictnessDelta::TargetStronger);
        assert_eq!(strictness_delta(Modality::Shall, Modality::ShallNot), StrictnessDelta::Equal);
    }

    #[test]
    fn tokens_drop_stopwords_and_modals() {
        let t: Vec<_> = content_tokens("The provider shall keep the Logs; it may not delete them.").into_iter().collect();
        assert_eq!(t, ["delete", "keep", "logs", "provider"]);
    }

    #[test]
    fn similarity_cases() {
        let a = feat("The provider shall keep logs.", &["provider"]);
        assert_eq!(similarity(&a, &a), 1.0);
        let b = feat("Users may consult manuals.", &[]);
        assert_eq!(similarity(&a, &b), 0.0);
        let c = feat("keep logs", &[]);
        let d = feat("keep records", &[]);
        assert!((similarity(&c, &d) - 1.0 / 3.0).abs() < 1e-12);
        let e = feat("keep records", &["provider"]);
        assert!((similarity(&a, &e) - (0.5 * 0.25 + 0.5)).abs() < 1e-12);
        assert_eq!(similarity(&a, &e), similarity(&e, &a));
    }

    #[test]
    fn curation_rows() {
        let rows = parse_curation(
            "# header\nhttp://x/a ; http://y/b ; partial ; reasons=strictnessWeaker,incompleteCoverage ; note=\"semi; colon \\\"q\\\"\"\n\
             http://x/a ; http://y/c ; reject\n",
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].line, 2);
        assert_eq!(rows[0].note, "semi; colon \"q\"");
        match &rows[0].decision {
            CurationDecision::Accept { kind, reasons } => {
                assert_eq!(*kind, MappingKind::Partial);
                assert_eq!(reasons.len(), 2);
            }
            d => panic!("{d:?}"),
        }
        assert_eq!(rows[1].decision, CurationDecision::Reject);
        assert_eq!(parse_curation("a ; b ; partial"), Err(MappingError::PartialWithoutReason { line: 1 }));
        assert!(matches!(parse_curation("a ; b ; maybe"), Err(MappingError::CurationSyntax { line: 1, .. })));
        assert!(matches!(parse_curation("a ; b"), Err(MappingError::CurationSyntax { .. })));
        assert!(matches!(parse_curation("a ; b ; full ; reasons=vibes"), Err(MappingError::CurationSyntax { .. })));
    }
}
