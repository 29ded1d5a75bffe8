//! Annotated clause text: parsing, printing and sentence access.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::iri::{BaseIri, IriError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("no #doc directive")]
    NoDocument,
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate clause id `{id}`")]
    DuplicateClause { line: usize, id: String },
    #[error("line {line}: clause `{id}`: {message}")]
    Nesting { line: usize, id: String, message: String },
    #[error("line {line}: {message}")]
    Definition { line: usize, message: String },
    #[error("no base IRI: pass one or set `base=` on #doc")]
    MissingBase,
    #[error("invalid base IRI: {0}")]
    BadBase(#[from] IriError),
    #[error("clause `{0}` not found")]
    ClauseNotFound(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocType {
    Regulation,
    Standard,
    Guideline,
}

impl DocType {
    pub fn as_str(self) -> &'static str {
        match self {
            DocType::Regulation => "regulation",
            DocType::Standard => "standard",
            DocType::Guideline => "guideline",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "regulation" => Some(DocType::Regulation),
            "standard" => Some(DocType::Standard),
            "guideline" => Some(DocType::Guideline),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClauseKind {
    Normative,
    Definitional,
    Informative,
}

impl ClauseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClauseKind::Normative => "normative",
            ClauseKind::Definitional => "definitional",
            ClauseKind::Informative => "informative",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "normative" => Some(ClauseKind::Normative),
            "definitional" => Some(ClauseKind::Definitional),
            "informative" => Some(ClauseKind::Informative),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefinitionEntry {
    pub term: String,
    pub alt_labels: Vec<String>,
    pub definition: String,
    /// Dotted position inside the terminology section, e.g. "3.36.1".
    pub subclause_path: String,
    /// Terms of this document referenced by the definition.
    pub cross_refs: Vec<String>,
    /// Referenced terms defined elsewhere (not resolved locally).
    pub external_refs: Vec<String>,
    pub clause_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub id: String,
    pub heading: Option<String>,
    pub kind: ClauseKind,
    pub paragraphs: Vec<String>,
    pub defs: Vec<DefinitionEntry>,
    pub children: Vec<Clause>,
}

impl Clause {
    /// Heading if present, else the clause id.
    pub fn title(&self) -> &str {
        self.heading.as_deref().unwrap_or(&self.id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentSource {
    pub doc_id: String,
    pub title: String,
    pub doc_type: DocType,
    pub base_iri: BaseIri,
    /// Free text between `#doc` and the first clause.
    pub preamble: Vec<String>,
    /// Top-level clauses; nested clauses hang off `children`.
    pub clauses: Vec<Clause>,
}

impl DocumentSource {
    /// All clauses in depth-first (source) order.
    pub fn clauses_dfs(&self) -> Vec<&Clause> {
        fn walk<'a>(c: &'a Clause, out: &mut Vec<&'a Clause>) {
            out.push(c);
            for ch in &c.children {
                walk(ch, out);
            }
        }
        let mut out = Vec::new();
        for c in &self.clauses {
            walk(c, &mut out);
        }
        out
    }

    pub fn clause_at(&self, clause_id: &str) -> Result<&Clause, DocumentError> {
        self.clauses_dfs()
            .into_iter()
            .find(|c| c.id == clause_id)
            .ok_or_else(|| DocumentError::ClauseNotFound(clause_id.to_string()))
    }

    /// Every definition entry from definitional clauses, in document order.
    pub fn definitions(&self) -> Vec<&DefinitionEntry> {
        self.clauses_dfs()
            .into_iter()
            .filter(|c| c.kind == ClauseKind::Definitional)
            .flat_map(|c| c.defs.iter())
            .collect()
    }
}

pub fn clause_at<'a>(doc: &'a DocumentSource, clause_id: &str) -> Result<&'a Clause, DocumentError> {
    doc.clause_at(clause_id)
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

fn syntax(line: usize, message: impl Into<String>) -> DocumentError {
    DocumentError::Syntax { line, message: message.into() }
}

/// Splits a directive line (without its leading `#`) into name and attributes.
fn parse_directive(body: &str, line: usize) -> Result<(String, Vec<(String, String)>), DocumentError> {
    let mut chars = body.char_indices().peekable();
    let name_end = body.find(char::is_whitespace).unwrap_or(body.len());
    let name = body[..name_end].to_string();
    if name.is_empty() {
        return Err(syntax(line, "empty directive name"));
    }
    while chars.peek().is_some_and(|&(i, _)| i < name_end) {
        chars.next();
    }
    let mut attrs = Vec::new();
    loop {
        while chars.peek().is_some_and(|&(_, c)| c.is_whitespace()) {
            chars.next();
        }
        let Some(&(key_start, _)) = chars.peek() else { break };
        let mut key_end = key_start;
        while let Some(&(i, c)) = chars.peek() {
            if c == '=' {
                key_end = i;
                break;
            }
            if !(c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(syntax(line, format!("unexpected {c:?} in attribute name")));
            }
            chars.next();
            key_end = i + c.len_utf8();
        }
        let key = body[key_start..key_end].to_string();
        if chars.next().map(|(_, c)| c) != Some('=') {
            return Err(syntax(line, format!("attribute `{key}` has no value")));
        }
        if key.is_empty() {
            return Err(syntax(line, "attribute with empty name"));
        }
        let mut value = String::new();
        if chars.peek().is_some_and(|&(_, c)| c == '"') {
            chars.next();
            let mut closed = false;
            while let Some((_, c)) = chars.next() {
                match c {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => match chars.next() {
                        Some((_, e @ ('"' | '\\'))) => value.push(e),
                        _ => return Err(syntax(line, "bad escape in quoted value")),
                    },
                    c => value.push(c),
                }
            }
            if !closed {
                return Err(syntax(line, format!("unterminated quote in `{key}`")));
            }
            if chars.peek().is_some_and(|&(_, c)| !c.is_whitespace()) {
                return Err(syntax(line, format!("junk after quoted `{key}`")));
            }
        } else {
            while let Some(&(_, c)) = chars.peek() {
                if c.is_whitespace() {
                    break;
                }
                if c == '"' {
                    return Err(syntax(line, format!("stray quote in `{key}`")));
                }
                value.push(c);
                chars.next();
            }
        }
        if attrs.iter().any(|(k, _)| k == &key) {
            return Err(syntax(line, format!("attribute `{key}` given twice")));
        }
        attrs.push((key, value));
    }
    Ok((name, attrs))
}

struct Attrs {
    map: BTreeMap<String, String>,
    line: usize,
    directive: &'static str,
}

impl Attrs {
    fn new(pairs: Vec<(String, String)>, allowed: &[&str], directive: &'static str, line: usize) -> Result<Self, DocumentError> {
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            if !allowed.contains(&k.as_str()) {
                return Err(syntax(line, format!("unknown attribute `{k}` on #{directive}")));
            }
            map.insert(k, v);
        }
        Ok(Attrs { map, line, directive })
    }

    fn required(&mut self, key: &str) -> Result<String, DocumentError> {
        match self.map.remove(key) {
            Some(v) if !v.trim().is_empty() => Ok(v.trim().to_string()),
            _ => Err(syntax(self.line, format!("#{} requires `{key}=`", self.directive))),
        }
    }

    fn optional(&mut self, key: &str) -> Option<String> {
        self.map.remove(key).map(|v| v.trim().to_string()).filter(|v| !v.is_empty())
    }

    fn list(&mut self, key: &str) -> Vec<String> {
        self.optional(key)
            .map(|v| {
                v.split('|')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            })
            .unwrap_or_default()
    }
}

fn valid_doc_id(id: &str) -> bool {
    !id.is_empty() && id.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-')
}

fn valid_clause_id(id: &str) -> bool {
    !id.is_empty()
        && id.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'.' | b'-' | b'_'))
        && !id.starts_with('.')
        && !id.ends_with('.')
        && !id.contains("..")
}

fn valid_path(p: &str) -> bool {
    !p.is_empty() && p.split('.').all(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric()))
}

/// True when `child` is `parent` followed by one or more dotted segments.
pub fn extends(parent: &str, child: &str) -> bool {
    child.len() > parent.len() && child.starts_with(parent) && child.as_bytes()[parent.len()] == b'.'
}

#[derive(Clone, Copy)]
enum Target {
    Preamble,
    Clause(usize),
    Def(usize, usize),
}

struct FlatClause {
    clause: Clause,
    parent: Option<usize>,
    def_lines: Vec<usize>,
}

/// Parses annotated clause text. An explicit `base` overrides the `#doc base=` attribute.
pub fn parse_document(text: &str, base: Option<&BaseIri>) -> Result<DocumentSource, DocumentError> {
    let mut header: Option<(String, String, DocType, Option<String>)> = None;
    let mut preamble = Vec::new();
    let mut flat: Vec<FlatClause> = Vec::new();
    let mut ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut stack: Vec<usize> = Vec::new();
    let mut paths: BTreeMap<String, usize> = BTreeMap::new();
    let mut target = Target::Preamble;
    let mut para: Vec<String> = Vec::new();

    fn flush(para: &mut Vec<String>, target: Target, preamble: &mut Vec<String>, flat: &mut [FlatClause]) {
        if para.is_empty() {
            return;
        }
        let joined = para.join(" ");
        para.clear();
        match target {
            Target::Preamble => preamble.push(joined),
            Target::Clause(c) => flat[c].clause.paragraphs.push(joined),
            Target::Def(c, d) => {
                let def = &mut flat[c].clause.defs[d].definition;
                if !def.is_empty() {
                    def.push(' ');
                }
                def.push_str(&joined);
            }
        }
    }

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            flush(&mut para, target, &mut preamble, &mut flat);
            continue;
        }
        if let Some(body) = trimmed.strip_prefix('#') {
            flush(&mut para, target, &mut preamble, &mut flat);
            let (name, pairs) = parse_directive(body, line)?;
            match name.as_str() {
                "doc" => {
                    if header.is_some() {
                        return Err(syntax(line, "#doc given more than once"));
                    }
                    if !flat.is_empty() {
                        return Err(syntax(line, "#doc must be the first directive"));
                    }
                    let mut a = Attrs::new(pairs, &["id", "title", "type", "base"], "doc", line)?;
                    let id = a.required("id")?;
                    if !valid_doc_id(&id) {
                        return Err(syntax(line, format!("doc id `{id}` must match [a-z0-9-]+")));
                    }
                    let title = a.required("title")?;
                    let ty = a.required("type")?;
                    let doc_type = DocType::parse(&ty).ok_or_else(|| syntax(line, format!("unknown doc type `{ty}`")))?;
                    header = Some((id, title, doc_type, a.optional("base")));
                    target = Target::Preamble;
                }
                "clause" => {
                    if header.is_none() {
                        return Err(syntax(line, "#clause before #doc"));
                    }
                    let mut a = Attrs::new(pairs, &["id", "kind", "heading", "parent"], "clause", line)?;
                    let id = a.required("id")?;
                    if !valid_clause_id(&id) {
                        return Err(syntax(line, format!("bad clause id `{id}`")));
                    }
                    let kind_s = a.required("kind")?;
                    let kind = ClauseKind::parse(&kind_s)
                        .ok_or_else(|| syntax(line, format!("unknown clause kind `{kind_s}`")))?;
                    let heading = a.optional("heading");
                    let declared_parent = a.optional("parent");
                    if ids.contains_key(&id) {
                        return Err(DocumentError::DuplicateClause { line, id });
                    }
                    while let Some(&top) = stack.last() {
                        if extends(&flat[top].clause.id, &id) {
                            break;
                        }
                        stack.pop();
                    }
                    let parent = stack.last().copied();
                    let parent_len = parent.map(|p| flat[p].clause.id.len()).unwrap_or(0);
                    for (pos, _) in id.match_indices('.') {
                        let prefix = id[..pos].to_string();
                        if prefix.len() > parent_len && ids.contains_key(&prefix) {
                            return Err(DocumentError::Nesting {
                                line,
                                id,
                                message: format!("appears after the subtree of `{prefix}` was closed"),
                            });
                        }
                    }
                    if let Some(p) = declared_parent {
                        let actual = parent.map(|i| flat[i].clause.id.as_str());
                        if actual != Some(p.as_str()) {
                            let message = if extends(&p, &id) {
                                format!("declared parent `{p}` is not an open enclosing clause")
                            } else {
                                format!("id does not extend declared parent `{p}`")
                            };
                            return Err(DocumentError::Nesting { line, id, message });
                        }
                    }
                    let n = flat.len();
                    ids.insert(id.clone(), line);
                    flat.push(FlatClause {
                        clause: Clause { id, heading, kind, paragraphs: Vec::new(), defs: Vec::new(), children: Vec::new() },
                        parent,
                        def_lines: Vec::new(),
                    });
                    stack.push(n);
                    target = Target::Clause(n);
                }
                "def" => {
                    let c = match target {
                        Target::Clause(c) | Target::Def(c, _) => c,
                        Target::Preamble => return Err(syntax(line, "#def outside a clause")),
                    };
                    if flat[c].clause.kind != ClauseKind::Definitional {
                        return Err(DocumentError::Definition {
                            line,
                            message: format!("#def inside non-definitional clause `{}`", flat[c].clause.id),
                        });
                    }
                    let mut a = Attrs::new(pairs, &["term", "alt", "refs", "ext", "path"], "def", line)?;
                    let term = a.required("term")?;
                    let alt_labels = a.list("alt");
                    let cross_refs = a.list("refs");
                    let external_refs = a.list("ext");
                    let clause = &mut flat[c].clause;
                    let subclause_path = a
                        .optional("path")
                        .unwrap_or_else(|| format!("{}.{}", clause.id, clause.defs.len() + 1));
                    if !valid_path(&subclause_path) {
                        return Err(syntax(line, format!("bad def path `{subclause_path}`")));
                    }
                    if let Some(prev) = paths.insert(subclause_path.clone(), line) {
                        return Err(DocumentError::Definition {
                            line,
                            message: format!("def path `{subclause_path}` already used on line {prev}"),
                        });
                    }
                    let lower = term.to_lowercase();
                    if clause.defs.iter().any(|d| d.term.to_lowercase() == lower) {
                        return Err(DocumentError::Definition {
                            line,
                            message: format!("term `{term}` defined twice in clause `{}`", clause.id),
                        });
                    }
                    let d = clause.defs.len();
                    clause.defs.push(DefinitionEntry {
                        term,
                        alt_labels,
                        definition: String::new(),
                        subclause_path,
                        cross_refs,
                        external_refs,
                        clause_id: clause.id.clone(),
                    });
                    flat[c].def_lines.push(line);
                    target = Target::Def(c, d);
                }
                other => return Err(syntax(line, format!("unknown directive `#{other}`"))),
            }
            continue;
        }
        if header.is_none() {
            return Err(syntax(line, "text before #doc"));
        }
        let content = trimmed.strip_prefix('\\').unwrap_or(trimmed);
        para.push(content.to_string());
    }
    flush(&mut para, target, &mut preamble, &mut flat);

    let (doc_id, title, doc_type, doc_base) = header.ok_or(DocumentError::NoDocument)?;
    let base_iri = match (base, doc_base) {
        (Some(b), _) => b.clone(),
        (None, Some(s)) => BaseIri::new(&s)?,
        (None, None) => return Err(DocumentError::MissingBase),
    };

    // Cross-reference resolution against every label in the document.
    let labels: HashSet<String> = flat
        .iter()
        .flat_map(|f| f.clause.defs.iter())
        .flat_map(|d| std::iter::once(&d.term).chain(d.alt_labels.iter()))
        .map(|l| l.to_lowercase())
        .collect();
    for f in &flat {
        if f.clause.kind == ClauseKind::Definitional && f.clause.defs.is_empty() {
            return Err(DocumentError::Definition {
                line: ids[&f.clause.id],
                message: format!("definitional clause `{}` has no #def entries", f.clause.id),
            });
        }
        for (d, &line) in f.clause.defs.iter().zip(&f.def_lines) {
            if d.definition.is_empty() {
                return Err(DocumentError::Definition { line, message: format!("term `{}` has no definition text", d.term) });
            }
            for r in &d.cross_refs {
                if !labels.contains(&r.to_lowercase()) {
                    return Err(DocumentError::Definition {
                        line,
                        message: format!("`{}` refers to undefined term `{r}` (list it under ext= if external)", d.term),
                    });
                }
            }
        }
    }

    // Assemble the tree bottom-up; children always follow their parent.
    let mut slots: Vec<Option<Clause>> = Vec::with_capacity(flat.len());
    let parents: Vec<Option<usize>> = flat.iter().map(|f| f.parent).collect();
    for f in flat {
        slots.push(Some(f.clause));
    }
    for i in (0..slots.len()).rev() {
        if let Some(p) = parents[i] {
            let child = slots[i].take().expect("child taken once");
            slots[p].as_mut().expect("parent precedes child").children.insert(0, child);
        }
    }
    let clauses = slots.into_iter().flatten().collect();

    Ok(DocumentSource { doc_id, title, doc_type, base_iri, preamble, clauses })
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn text_line(out: &mut String, s: &str) {
    if s.starts_with('#') || s.starts_with('\\') {
        out.push('\\');
    }
    out.push_str(s);
    out.push('\n');
}

/// Prints `doc` in the annotated clause format; `parse_document` reads it back to an equal value.
pub fn to_annotated_text(doc: &DocumentSource) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "#doc id={} title={} type={} base={}",
        doc.doc_id,
        quote(&doc.title),
        doc.doc_type.as_str(),
        doc.base_iri
    );
    for p in &doc.preamble {
        text_line(&mut out, p);
        out.push('\n');
    }
    for c in doc.clauses_dfs() {
        let _ = write!(out, "#clause id={} kind={}", c.id, c.kind.as_str());
        if let Some(h) = &c.heading {
            let _ = write!(out, " heading={}", quote(h));
        }
        out.push('\n');
        for p in &c.paragraphs {
            text_line(&mut out, p);
            out.push('\n');
        }
        for d in &c.defs {
            let _ = write!(out, "#def term={}", quote(&d.term));
            for (key, list) in [("alt", &d.alt_labels), ("refs", &d.cross_refs), ("ext", &d.external_refs)] {
                if !list.is_empty() {
                    let _ = write!(out, " {key}={}", quote(&list.join("|")));
                }
            }
            let _ = writeln!(out, " path={}", d.subclause_path);
            text_line(&mut out, &d.definition);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Sentences
// ---------------------------------------------------------------------------

/// One sentence, list item or semicolon-separated part of a paragraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SentenceUnit {
    pub paragraph: usize,
    /// Byte range in the paragraph; consecutive units tile it exactly.
    pub span: Range<usize>,
    /// Lead-in of an enumerated list, shared by all its items.
    pub stem: Option<Range<usize>>,
    pub marker: Option<String>,
    /// Self-contained text: the stem plus the item body for list items.
    pub text: String,
}

const ABBREVIATIONS: [&str; 4] = ["e.g.", "i.e.", "art.", "no."];

/// Sentence units of every paragraph of `clause`, in order. Definition entries are not included.
pub fn sentences_of(clause: &Clause) -> Vec<SentenceUnit> {
    clause
        .paragraphs
        .iter()
        .enumerate()
        .flat_map(|(i, p)| paragraph_units(i, p))
        .collect()
}

/// Reassembles a paragraph from its units: each list stem once, then every span.
pub fn reassemble(paragraph: &str, units: &[SentenceUnit]) -> String {
    let mut out = String::new();
    for u in units {
        if let Some(stem) = &u.stem {
            if stem.end == u.span.start {
                out.push_str(&paragraph[stem.clone()]);
            }
        }
        out.push_str(&paragraph[u.span.clone()]);
    }
    out
}

fn paragraph_units(pi: usize, p: &str) -> Vec<SentenceUnit> {
    let mut units = Vec::new();
    for s in split_sentences(p) {
        match find_list(p, s.clone()) {
            Some((stem, items)) => {
                let stem_text = p[stem.clone()].trim().trim_end_matches(':').trim_end();
                for (marker, body) in &items {
                    let span = marker.start..body.end;
                    let cleaned = clean_item(&p[marker.end..body.end]);
                    let text = format!("{stem_text} {cleaned}.");
                    units.push(SentenceUnit {
                        paragraph: pi,
                        span,
                        stem: Some(stem.clone()),
                        marker: Some(p[marker.clone()].to_string()),
                        text,
                    });
                }
            }
            None => {
                for part in split_semicolons(p, s) {
                    let raw = p[part.clone()].trim();
                    let text = raw
                        .strip_prefix("and ")
                        .or_else(|| raw.strip_prefix("or "))
                        .unwrap_or(raw)
                        .trim()
                        .to_string();
                    units.push(SentenceUnit { paragraph: pi, span: part, stem: None, marker: None, text });
                }
            }
        }
    }
    units
}

fn clean_item(body: &str) -> String {
    let mut t = body.trim();
    loop {
        let before = t;
        t = t.trim_end_matches([';', ',', '.', ' ']);
        for tail in [" and", " or"] {
            if let Some(s) = t.strip_suffix(tail) {
                t = s;
            }
        }
        if t == before {
            break;
        }
    }
    t.to_string()
}

/// The token (run of non-space characters) ending right before byte `end`.
fn token_before(p: &str, end: usize) -> (usize, &str) {
    let start = p[..end].rfind(char::is_whitespace).map(|i| i + 1).unwrap_or(0);
    (start, &p[start..end])
}

fn prev_non_space(p: &str, before: usize) -> Option<char> {
    p[..before].chars().rev().find(|c| !c.is_whitespace())
}

/// Sentence spans tiling `p`; trailing whitespace stays with the preceding sentence.
fn split_sentences(p: &str) -> Vec<Range<usize>> {
    let bytes = p.as_bytes();
    let mut out = Vec::new();
    let mut start = 0;
    let mut depth: usize = 0;
    for (i, c) in p.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '.' if depth == 0 && bytes.get(i + 1) == Some(&b' ') => {
                let (tok_start, tok) = token_before(p, i);
                let tok_clean = tok.trim_start_matches(['(', '"', '\'']);
                let abbrev = format!("{}.", tok_clean.to_lowercase());
                if ABBREVIATIONS.contains(&abbrev.as_str()) {
                    continue;
                }
                if !tok_clean.is_empty() && tok_clean.bytes().all(|b| b.is_ascii_digit()) {
                    let prev = prev_non_space(p, tok_start);
                    if tok_start <= start || matches!(prev, Some(':' | ';')) {
                        continue;
                    }
                }
                let mut end = i + 1;
                while end < p.len() && bytes[end] == b' ' {
                    end += 1;
                }
                out.push(start..end);
                start = end;
            }
            _ => {}
        }
    }
    if start < p.len() {
        out.push(start..p.len());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MarkerStyle {
    Paren,
    NumDot,
    NumParen,
    LetterParen,
    Dash,
}

/// Recognizes a list marker at byte `at`, returning its style and end (exclusive, before the space).
fn marker_at(p: &str, at: usize) -> Option<(MarkerStyle, usize)> {
    let rest = &p[at..];
    let followed_by_space = |len: usize| rest[len..].starts_with(' ').then_some(at + len);
    if let Some(inner) = rest.strip_prefix('(') {
        let n = inner.chars().take_while(|c| c.is_ascii_alphanumeric()).count();
        if (1..=4).contains(&n) && inner[n..].starts_with(')') {
            return followed_by_space(n + 2).map(|e| (MarkerStyle::Paren, e));
        }
        return None;
    }
    for dash in ['\u{2014}', '\u{2013}', '-'] {
        if rest.starts_with(dash) {
            return followed_by_space(dash.len_utf8()).map(|e| (MarkerStyle::Dash, e));
        }
    }
    let digits = rest.bytes().take_while(|b| b.is_ascii_digit()).count();
    if digits > 0 {
        return match rest.as_bytes().get(digits) {
            Some(b'.') => followed_by_space(digits + 1).map(|e| (MarkerStyle::NumDot, e)),
            Some(b')') => followed_by_space(digits + 1).map(|e| (MarkerStyle::NumParen, e)),
            _ => None,
        };
    }
    let mut cs = rest.chars();
    if let (Some(l), Some(')')) = (cs.next(), cs.next()) {
        if l.is_ascii_lowercase() {
            return followed_by_space(2).map(|e| (MarkerStyle::LetterParen, e));
        }
    }
    None
}

fn skip_spaces(p: &str, mut i: usize, end: usize) -> usize {
    while i < end && p.as_bytes()[i] == b' ' {
        i += 1;
    }
    i
}

/// Skips an optional "and " / "or " between an item separator and the next marker.
fn skip_conjunction(p: &str, i: usize, end: usize) -> usize {
    for conj in ["and ", "or "] {
        if p[i..end].starts_with(conj) {
            return skip_spaces(p, i + conj.len(), end);
        }
    }
    i
}

type ListItems = Vec<(Range<usize>, Range<usize>)>;

/// Finds an enumerated list inside sentence `s`: a top-level ':' followed by a marker.
/// Returns the stem range and, per item, (marker range, body range). Body ranges
/// run to the start of the next marker and the last one to the sentence end.
fn find_list(p: &str, s: Range<usize>) -> Option<(Range<usize>, ListItems)> {
    let mut depth: usize = 0;
    let mut first: Option<(usize, MarkerStyle, usize)> = None;
    for (off, c) in p[s.clone()].char_indices() {
        let i = s.start + off;
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ':' if depth == 0 => {
                let m = skip_spaces(p, i + 1, s.end);
                if m > i + 1 || m == s.end {
                    if let Some((style, mend)) = marker_at(p, m) {
                        first = Some((m, style, mend));
                        break;
                    }
                }
            }
            _ => {}
        }
    }
    let (m0, style, mend0) = first?;
    let mut markers = vec![(m0, mend0)];
    let mut depth: usize = 0;
    let mut i = mend0;
    while i < s.end {
        let c = p[i..].chars().next().expect("in bounds");
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ';' | ':' if depth == 0 => {
                let j = skip_spaces(p, i + 1, s.end);
                if j > i + 1 {
                    let j = skip_conjunction(p, j, s.end);
                    if let Some((st, mend)) = marker_at(p, j) {
                        if st == style {
                            markers.push((j, mend));
                            i = mend;
                            continue;
                        }
                    }
                }
            }
            _ => {}
        }
        i += c.len_utf8();
    }
    let mut items = Vec::with_capacity(markers.len());
    for (k, &(ms, me)) in markers.iter().enumerate() {
        let body_end = markers.get(k + 1).map(|&(next, _)| next).unwrap_or(s.end);
        items.push((ms..me, me..body_end));
    }
    Some((s.start..m0, items))
}

/// Splits a list-free sentence at top-level "; " joints.
fn split_semicolons(p: &str, s: Range<usize>) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut depth: usize = 0;
    let mut start = s.start;
    for (off, c) in p[s.clone()].char_indices() {
        let i = s.start + off;
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ';' if depth == 0 && p.as_bytes().get(i + 1) == Some(&b' ') => {
                let end = skip_spaces(p, i + 1, s.end);
                out.push(start..end);
                start = end;
            }
            _ => {}
        }
    }
    if start < s.end {
        out.push(start..s.end);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "https://example.org/tair/";

    fn doc(text: &str) -> DocumentSource {
        parse_document(text, None).unwrap()
    }

    fn normative(paragraphs: &[&str]) -> Clause {
        Clause {
            id: "c".into(),
            heading: None,
            kind: ClauseKind::Normative,
            paragraphs: paragraphs.iter().map(|s| s.to_string()).collect(),
            defs: vec![],
            children: vec![],
        }
    }

    #[test]
    fn empty_text_has_no_document() {
        assert_eq!(parse_document("", None), Err(DocumentError::NoDocument));
        assert_eq!(parse_document("\n\n", None), Err(DocumentError::NoDocument));
    }

    #[test]
    fn nesting_follows_id_prefixes() {
        let d = doc(&format!(
            "#doc id=x title=\"X\" type=standard base={BASE}\n\
             #clause id=4 kind=normative heading=\"Context\"\n\
             #clause id=4.1 kind=normative\nA shall b.\n\
             #clause id=4.2 kind=normative\nC shall d.\n\
             #clause id=5 kind=informative\nNote.\n"
        ));
        assert_eq!(d.clauses.len(), 2);
        let ids: Vec<_> = d.clauses[0].children.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["4.1", "4.2"]);
        let dfs: Vec<_> = d.clauses_dfs().iter().map(|c| c.id.clone()).collect();
        assert_eq!(dfs, ["4", "4.1", "4.2", "5"]);
        assert_eq!(d.clause_at("4.2").unwrap().paragraphs, ["C shall d."]);
        assert_eq!(d.clause_at("9"), Err(DocumentError::ClauseNotFound("9".into())));
    }

    #[test]
    fn clause_reopened_after_close_is_rejected() {
        let err = parse_document(
            &format!(
                "#doc id=x title=T type=standard base={BASE}\n\
                 #clause id=4 kind=normative\n#clause id=5 kind=normative\n#clause id=4.1 kind=normative\n"
            ),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, DocumentError::Nesting { line: 4, .. }), "{err}");
    }

    #[test]
    fn declared_parent_must_match() {
        let err = parse_document(
            &format!(
                "#doc id=x title=T type=standard base={BASE}\n\
                 #clause id=4 kind=normative\n#clause id=a1 kind=normative parent=4\n"
            ),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, DocumentError::Nesting { line: 3, .. }));
        assert!(parse_document(
            &format!("#doc id=x title=T type=standard base={BASE}\n#clause id=4 kind=normative\n#clause id=4.1 kind=normative parent=4\n"),
            None
        )
        .is_ok());
    }

    #[test]
    fn duplicate_clause_and_syntax_errors_carry_lines() {
        let dup = format!("#doc id=x title=T type=standard base={BASE}\n#clause id=1 kind=normative\n#clause id=1 kind=normative\n");
        assert_eq!(
            parse_document(&dup, None),
            Err(DocumentError::DuplicateClause { line: 3, id: "1".into() })
        );
        let bad = format!("#doc id=x title=T type=standard base={BASE}\n#clause id=1 kind=weird\n");
        assert!(matches!(parse_document(&bad, None), Err(DocumentError::Syntax { line: 2, .. })));
        let unterminated = "#doc id=x title=\"T type=standard\n";
        assert!(matches!(parse_document(unterminated, None), Err(DocumentError::Syntax { line: 1, .. })));
        assert!(matches!(parse_document("hello\n#doc id=x title=T type=standard", None), Err(DocumentError::Syntax { line: 1, .. })));
        assert!(matches!(
            parse_document(&format!("#doc id=X title=T type=standard base={BASE}"), None),
            Err(DocumentError::Syntax { .. })
        ));
    }

    #[test]
    fn defs_only_in_definitional_clauses() {
        let t = format!("#doc id=x title=T type=standard base={BASE}\n#clause id=1 kind=normative\n#def term=a\nalpha\n");
        assert!(matches!(parse_document(&t, None), Err(DocumentError::Definition { line: 3, .. })));
        let empty = format!("#doc id=x title=T type=standard base={BASE}\n#clause id=3 kind=definitional\nNo entries.\n");
        assert!(matches!(parse_document(&empty, None), Err(DocumentError::Definition { line: 2, .. })));
    }

    #[test]
    fn refs_must_resolve_unless_external() {
        let t = format!(
            "#doc id=x title=T type=standard base={BASE}\n#clause id=3 kind=definitional\n\
             #def term=alpha refs=\"Beta\"\na thing\n#def term=beta alt=\"b\" ext=\"gamma\"\nanother\n"
        );
        let d = doc(&t);
        let defs = d.definitions();
        assert_eq!(defs[0].subclause_path, "3.1");
        assert_eq!(defs[1].alt_labels, ["b"]);
        assert_eq!(defs[1].external_refs, ["gamma"]);
        let bad = t.replace("refs=\"Beta\"", "refs=\"delta\"");
        assert!(matches!(parse_document(&bad, None), Err(DocumentError::Definition { line: 3, .. })));
    }

    #[test]
    fn base_resolution() {
        let t = "#doc id=x title=T type=guideline\n";
        assert_eq!(parse_document(t, None), Err(DocumentError::MissingBase));
        let b = BaseIri::new("urn:example:").unwrap();
        assert_eq!(parse_document(t, Some(&b)).unwrap().base_iri.as_str(), "urn:example:/");
    }

    #[test]
    fn paragraphs_and_escapes() {
        let d = doc(&format!(
            "#doc id=x title=T type=standard base={BASE}\nIntro\nline two.\n\n#clause id=1 kind=informative\n\\#hash text\n\nsecond\n"
        ));
        assert_eq!(d.preamble, ["Intro line two."]);
        assert_eq!(d.clauses[0].paragraphs, ["#hash text", "second"]);
    }

    #[test]
    fn print_parse_round_trip() {
        let d = doc(&format!(
            "#doc id=x title=\"Say \\\"hi\\\"\" type=standard base={BASE}\npre\n\
             #clause id=3 kind=definitional heading=\"Terms\"\nLead in.\n#def term=\"a b\" alt=\"ab|a-b\" path=3.7.1\ndef text\n\n more\n\
             #clause id=4 kind=normative\n\\\\odd\n#clause id=4.1 kind=normative\nX shall y.\n"
        ));
        let printed = to_annotated_text(&d);
        assert_eq!(parse_document(&printed, None).unwrap(), d);
    }

    #[test]
    fn two_sentences() {
        let c = normative(&["A risk management system shall be established. It shall be maintained."]);
        let texts: Vec<_> = sentences_of(&c).into_iter().map(|u| u.text).collect();
        assert_eq!(texts, ["A risk management system shall be established.", "It shall be maintained."]);
    }

    #[test]
    fn list_items_carry_stem() {
        let p = "The provider shall: (a) keep logs; (b) draw up documentation.";
        let c = normative(&[p]);
        let units = sentences_of(&c);
        let texts: Vec<_> = units.iter().map(|u| u.text.as_str()).collect();
        assert_eq!(texts, ["The provider shall keep logs.", "The provider shall draw up documentation."]);
        assert_eq!(units[0].marker.as_deref(), Some("(a)"));
        assert_eq!(reassemble(p, &units), p);
    }

    #[test]
    fn empty_clause_has_no_sentences() {
        assert!(sentences_of(&normative(&[])).is_empty());
    }

    #[test]
    fn abbreviations_do_not_split() {
        let c = normative(&["Records, e.g. logs, shall be kept under Art. 12 and No. 5 rules. Done."]);
        assert_eq!(sentences_of(&c).len(), 2);
    }

    #[test]
    fn numeric_and_dash_lists() {
        let p = "It shall include: 1. a plan; 2. a budget. Then: \u{2014} one; \u{2014} two.";
        let units = sentences_of(&normative(&[p]));
        let texts: Vec<_> = units.iter().map(|u| u.text.as_str()).collect();
        assert_eq!(texts, ["It shall include a plan.", "It shall include a budget.", "Then one.", "Then two."]);
        assert_eq!(reassemble(p, &units), p);
    }

    #[test]
    fn conjunction_before_last_item() {
        let p = "The body shall: (a) audit; and (b) report.";
        let units = sentences_of(&normative(&[p]));
        let texts: Vec<_> = units.iter().map(|u| u.text.as_str()).collect();
        assert_eq!(texts, ["The body shall audit.", "The body shall report."]);
        assert_eq!(reassemble(p, &units), p);
    }

    #[test]
    fn inline_reference_is_not_a_marker() {
        let p = "As regards paragraph 2, point (b) of this Article, it shall apply.";
        assert_eq!(sentences_of(&normative(&[p])).len(), 1);
    }

    #[test]
    fn semicolons_split_plain_sentences() {
        let p = "The user shall read it; and the user shall sign it.";
        let units = sentences_of(&normative(&[p]));
        let texts: Vec<_> = units.iter().map(|u| u.text.as_str()).collect();
        assert_eq!(texts, ["The user shall read it;", "the user shall sign it."]);
        assert_eq!(reassemble(p, &units), p);
    }

    #[test]
    fn extends_is_segment_aware() {
        assert!(extends("4", "4.1"));
        assert!(extends("art9", "art9.1.2"));
        assert!(!extends("1", "10"));
        assert!(!extends("4", "4"));
    }
}
