//! Static report pages: one per document, requirement, concept and collection, plus coverage.

use std::collections::BTreeMap;
use std::fmt::Write;

use tair_core::graph::view::{self, CollectionRecord, ConceptRecord, RequirementRecord};
use tair_core::mapping::{CoverageReport, MappingAssertion};
use tair_core::{Graph, Iri};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Html,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Markdown => "md",
            Format::Html => "html",
        }
    }
}

#[derive(Debug, Clone)]
enum Inline {
    Text(String),
    Code(String),
    /// Link to another page, by site-relative path without extension.
    Page(String, String),
    /// Link to a file, by site-relative path.
    File(String, String),
}

#[derive(Debug, Clone)]
enum Block {
    Heading(u8, String),
    Para(Vec<Inline>),
    Quote(String),
    List(Vec<Vec<Inline>>),
    Table(Vec<&'static str>, Vec<Vec<Vec<Inline>>>),
}

#[derive(Debug, Clone)]
struct Page {
    path: String,
    title: String,
    blocks: Vec<Block>,
}

fn text(s: impl Into<String>) -> Inline {
    Inline::Text(s.into())
}

fn code(s: impl Into<String>) -> Inline {
    Inline::Code(s.into())
}

/// Everything a report needs; all shown IRIs come from these graphs.
pub struct ReportInput<'a> {
    pub documents: Vec<&'a Graph>,
    pub coverage: Option<&'a CoverageReport>,
    pub generated_at: Option<&'a str>,
    /// Site-relative paths of exported graph files, per document id.
    pub graph_files: BTreeMap<String, Vec<String>>,
}

struct Site<'a> {
    input: &'a ReportInput<'a>,
    pages: BTreeMap<Iri, String>,
    labels: BTreeMap<Iri, String>,
    mapped_to: BTreeMap<Iri, &'a MappingAssertion>,
    mapped_from: BTreeMap<Iri, Vec<&'a MappingAssertion>>,
}

fn doc_id(g: &Graph) -> String {
    view::document(g).map(|d| d.identifier).unwrap_or_default()
}

impl<'a> Site<'a> {
    fn new(input: &'a ReportInput<'a>) -> Self {
        let mut pages = BTreeMap::new();
        let mut labels = BTreeMap::new();
        for d in &input.documents {
            let id = doc_id(d);
            for r in view::requirements(d) {
                pages.insert(r.iri.clone(), format!("{id}/requirement/{}", r.iri.local_name()));
                labels.insert(r.iri.clone(), format!("{id} {}", r.iri.local_name()));
            }
            for c in view::concepts(d) {
                pages.insert(c.iri.clone(), format!("{id}/concept/{}", c.iri.local_name()));
                labels.insert(c.iri.clone(), c.pref_label.clone());
            }
            for c in view::collections(d) {
                pages.insert(c.iri.clone(), format!("{id}/collection/{}", c.iri.local_name()));
                labels.insert(c.iri.clone(), c.label.clone());
            }
        }
        let mut mapped_to = BTreeMap::new();
        let mut mapped_from: BTreeMap<Iri, Vec<&MappingAssertion>> = BTreeMap::new();
        if let Some(cov) = input.coverage {
            for a in &cov.assertions {
                mapped_to.insert(a.source_req.clone(), a);
                for t in &a.target_reqs {
                    mapped_from.entry(t.clone()).or_default().push(a);
                }
            }
        }
        Site { input, pages, labels, mapped_to, mapped_from }
    }

    fn link(&self, iri: &Iri) -> Inline {
        let label = self.labels.get(iri).cloned().unwrap_or_else(|| iri.to_string());
        match self.pages.get(iri) {
            Some(p) => Inline::Page(label, p.clone()),
            None => code(iri.as_str()),
        }
    }

    fn iri_line(&self, iri: &Iri) -> Vec<Inline> {
        vec![text("IRI: "), code(iri.as_str())]
    }

    fn pages(&self) -> Vec<Page> {
        let mut out = vec![self.index()];
        for d in &self.input.documents {
            let id = doc_id(d);
            out.push(self.document_page(d, &id));
            out.extend(view::requirements(d).iter().map(|r| self.requirement_page(d, &id, r)));
            out.extend(view::concepts(d).iter().map(|c| self.concept_page(d, &id, c)));
            out.extend(view::collections(d).iter().map(|c| self.collection_page(&id, c)));
        }
        if let Some(cov) = self.input.coverage {
            out.push(self.coverage_page(cov));
        }
        out
    }

    fn index(&self) -> Page {
        let mut blocks = Vec::new();
        if let Some(ts) = self.input.generated_at {
            blocks.push(Block::Para(vec![text(format!("Generated: {ts}"))]));
        }
        let rows = self
            .input
            .documents
            .iter()
            .filter_map(|d| {
                let doc = view::document(d)?;
                let mut files = Vec::new();
                for f in self.input.graph_files.get(&doc.identifier).into_iter().flatten() {
                    if !files.is_empty() {
                        files.push(text(" "));
                    }
                    files.push(Inline::File(f.rsplit('/').next().unwrap_or(f).to_string(), f.clone()));
                }
                Some(vec![
                    vec![Inline::Page(doc.identifier.clone(), format!("{}/index", doc.identifier))],
                    vec![text(doc.title)],
                    vec![text(doc.doc_type)],
                    vec![text(view::requirements(d).len().to_string())],
                    vec![text(view::concepts(d).len().to_string())],
                    vec![text(view::lexical_entries(d).len().to_string())],
                    files,
                ])
            })
            .collect();
        blocks.push(Block::Table(
            vec!["Document", "Title", "Type", "Requirements", "Concepts", "Lexical entries", "Graph files"],
            rows,
        ));
        if let Some(cov) = self.input.coverage {
            blocks.push(Block::Heading(2, "Coverage".into()));
            blocks.push(Block::Para(vec![
                Inline::Page(format!("{} against {}", cov.regulation, cov.standard), "coverage".into()),
                text(format!(
                    ": {} full, {} partial, {} unmapped",
                    cov.counts.full, cov.counts.partial, cov.counts.unmapped
                )),
            ]));
        }
        Page { path: "index".into(), title: "Requirements knowledge graph".into(), blocks }
    }

    fn document_page(&self, g: &Graph, id: &str) -> Page {
        let doc = view::document(g);
        let title = doc.as_ref().map_or(id.to_string(), |d| d.title.clone());
        let mut blocks = Vec::new();
        if let Some(d) = &doc {
            blocks.push(Block::List(vec![self.iri_line(&d.iri), vec![text(format!("Type: {}", d.doc_type))]]));
        }
        let collections = view::collections(g);
        if !collections.is_empty() {
            blocks.push(Block::Heading(2, "Collections".into()));
            blocks.push(Block::List(
                collections
                    .iter()
                    .map(|c| vec![self.link(&c.iri), text(format!(" ({} requirements)", c.members.len()))])
                    .collect(),
            ));
        }
        let reqs = view::requirements(g);
        if !reqs.is_empty() {
            blocks.push(Block::Heading(2, "Requirements".into()));
            blocks.push(Block::Table(
                vec!["Requirement", "Modality", "Text"],
                reqs.iter()
                    .map(|r| {
                        vec![
                            vec![self.link(&r.iri)],
                            vec![text(r.modality.map(|m| m.as_str()).unwrap_or(""))],
                            vec![text(r.text.clone())],
                        ]
                    })
                    .collect(),
            ));
        }
        let concepts = view::concepts(g);
        if !concepts.is_empty() {
            blocks.push(Block::Heading(2, "Concepts".into()));
            blocks.push(Block::List(
                concepts.iter().map(|c| vec![self.link(&c.iri), text(format!(" ({})", c.category))]).collect(),
            ));
        }
        let lexical = view::lexical_entries(g);
        if !lexical.is_empty() {
            blocks.push(Block::Heading(2, "Lexical entries".into()));
            blocks.push(Block::List(
                lexical
                    .iter()
                    .map(|l| vec![text(l.label.clone()), text(format!(" ({} requirements)", l.occurrences.len()))])
                    .collect(),
            ));
        }
        Page { path: format!("{id}/index"), title, blocks }
    }

    fn requirement_page(&self, g: &Graph, id: &str, r: &RequirementRecord) -> Page {
        let mut facts = vec![
            self.iri_line(&r.iri),
            vec![text("Document: "), Inline::Page(id.to_string(), format!("{id}/index"))],
            vec![text(format!("Clause: {}", r.source_clause))],
            vec![text(format!("Modality: {}", r.modality.map(|m| m.as_str()).unwrap_or("none")))],
        ];
        for c in view::collections(g).iter().filter(|c| c.members.contains(&r.iri)) {
            facts.push(vec![text("Collection: "), self.link(&c.iri)]);
        }
        let mut blocks = vec![Block::Quote(r.text.clone()), Block::List(facts)];

        blocks.push(Block::Heading(2, "Concepts".into()));
        if r.links.is_empty() {
            blocks.push(Block::Para(vec![text("No defined concept is mentioned.")]));
        } else {
            let mut links = r.links.clone();
            links.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
            blocks.push(Block::Table(
                vec!["Role", "Concept"],
                links.iter().map(|(role, c)| vec![vec![code(role.as_str())], vec![self.link(c)]]).collect(),
            ));
        }

        let lexical: Vec<_> = view::lexical_entries(g).into_iter().filter(|l| l.occurrences.contains(&r.iri)).collect();
        if !lexical.is_empty() {
            blocks.push(Block::Heading(2, "Undefined terms".into()));
            blocks.push(Block::List(lexical.iter().map(|l| vec![text(l.label.clone())]).collect()));
        }

        if let Some(a) = self.mapped_to.get(&r.iri) {
            blocks.push(Block::Heading(2, "Mapped standard requirements".into()));
            blocks.push(Block::Para(vec![text(assessment_summary(a))]));
            if !a.target_reqs.is_empty() {
                blocks.push(Block::List(a.target_reqs.iter().map(|t| vec![self.link(t)]).collect()));
            }
        }
        if let Some(sources) = self.mapped_from.get(&r.iri) {
            blocks.push(Block::Heading(2, "Mapped from regulation requirements".into()));
            blocks.push(Block::List(
                sources.iter().map(|a| vec![self.link(&a.source_req), text(format!(" ({})", a.kind.as_str()))]).collect(),
            ));
        }
        Page { path: self.pages[&r.iri].clone(), title: format!("Requirement {}", r.iri.local_name()), blocks }
    }

    fn concept_page(&self, g: &Graph, id: &str, c: &ConceptRecord) -> Page {
        let mut facts = vec![
            self.iri_line(&c.iri),
            vec![text("Document: "), Inline::Page(id.to_string(), format!("{id}/index"))],
            vec![text(format!("Category: {}", c.category))],
            vec![text(format!("Defined in clause: {}", c.source_clause))],
        ];
        if !c.alt_labels.is_empty() {
            facts.push(vec![text(format!("Also: {}", c.alt_labels.join(", ")))]);
        }
        let mut blocks = vec![Block::Quote(c.definition.clone()), Block::List(facts)];
        for (heading, list) in [("Broader", &c.broader), ("Narrower", &c.narrower), ("Related", &c.related)] {
            if !list.is_empty() {
                blocks.push(Block::Heading(2, heading.into()));
                blocks.push(Block::List(list.iter().map(|i| vec![self.link(i)]).collect()));
            }
        }
        blocks.push(Block::Heading(2, "Requirements".into()));
        let users = tair_core::requirements_using(g, &c.iri).unwrap_or_default();
        if users.is_empty() {
            blocks.push(Block::Para(vec![text("No requirement mentions this concept.")]));
        } else {
            let mut rows: Vec<(u64, Vec<Vec<Inline>>)> = users
                .iter()
                .filter_map(|u| view::requirement(g, u))
                .map(|r| {
                    let roles: Vec<&str> =
                        r.links.iter().filter(|(_, t)| t == &c.iri).map(|(role, _)| role.as_str()).collect();
                    (
                        r.sequence.unwrap_or(i64::MAX) as u64,
                        vec![vec![self.link(&r.iri)], vec![code(roles.join(", "))], vec![text(r.text.clone())]],
                    )
                })
                .collect();
            rows.sort_by_key(|(seq, _)| *seq);
            blocks.push(Block::Table(vec!["Requirement", "Role", "Text"], rows.into_iter().map(|(_, r)| r).collect()));
        }
        Page { path: self.pages[&c.iri].clone(), title: c.pref_label.clone(), blocks }
    }

    fn collection_page(&self, id: &str, c: &CollectionRecord) -> Page {
        let blocks = vec![
            Block::List(vec![
                self.iri_line(&c.iri),
                vec![text("Document: "), Inline::Page(id.to_string(), format!("{id}/index"))],
                vec![text(format!("Clause: {}", c.source_clause))],
            ]),
            Block::Heading(2, "Decomposes into".into()),
            Block::List(c.members.iter().map(|m| vec![self.link(m)]).collect()),
        ];
        Page { path: self.pages[&c.iri].clone(), title: c.label.clone(), blocks }
    }

    fn coverage_page(&self, cov: &CoverageReport) -> Page {
        let mut blocks = Vec::new();
        if let Some(ts) = &cov.generated_at {
            blocks.push(Block::Para(vec![text(format!("Generated: {ts}"))]));
        }
        blocks.push(Block::Table(
            vec!["Full", "Partial", "Unmapped"],
            vec![vec![
                vec![text(cov.counts.full.to_string())],
                vec![text(cov.counts.partial.to_string())],
                vec![text(cov.counts.unmapped.to_string())],
            ]],
        ));
        blocks.push(Block::Heading(2, "Assessments".into()));
        blocks.push(Block::Table(
            vec!["Regulation requirement", "Kind", "Standard requirements", "Reasons", "Strictness", "Note"],
            cov.assertions
                .iter()
                .map(|a| {
                    let mut targets = Vec::new();
                    for t in &a.target_reqs {
                        if !targets.is_empty() {
                            targets.push(text(", "));
                        }
                        targets.push(self.link(t));
                    }
                    vec![
                        vec![self.link(&a.source_req)],
                        vec![text(a.kind.as_str())],
                        targets,
                        vec![text(a.partial_reasons.iter().map(|r| r.as_str()).collect::<Vec<_>>().join(", "))],
                        vec![text(a.strictness_delta.map(|d| d.as_str()).unwrap_or(""))],
                        vec![text(a.note.clone())],
                    ]
                })
                .collect(),
        ));
        if !cov.unresolved_terms.is_empty() {
            blocks.push(Block::Heading(2, "Unresolved terms".into()));
            blocks.push(Block::List(cov.unresolved_terms.iter().map(|t| vec![code(t.as_str())]).collect()));
        }
        if !cov.unreviewed_proposals.is_empty() {
            blocks.push(Block::Heading(2, "Unreviewed proposals".into()));
            blocks.push(Block::Table(
                vec!["Regulation requirement", "Standard requirement", "Score"],
                cov.unreviewed_proposals
                    .iter()
                    .map(|p| {
                        vec![vec![self.link(&p.source)], vec![self.link(&p.target)], vec![text(format!("{:.3}", p.score))]]
                    })
                    .collect(),
            ));
        }
        Page { path: "coverage".into(), title: format!("Coverage of {} by {}", cov.regulation, cov.standard), blocks }
    }
}

fn assessment_summary(a: &MappingAssertion) -> String {
    let mut s = a.kind.as_str().to_string();
    if let Some(d) = a.strictness_delta {
        let _ = write!(s, ", strictness {}", d.as_str());
    }
    if !a.partial_reasons.is_empty() {
        let reasons: Vec<&str> = a.partial_reasons.iter().map(|r| r.as_str()).collect();
        let _ = write!(s, ", reasons: {}", reasons.join(", "));
    }
    if !a.note.is_empty() {
        let _ = write!(s, ". {}", a.note);
    }
    s
}

/// Relative link from page `from` to site path `to`.
fn relative(from: &str, to: &str) -> String {
    let depth = from.matches('/').count();
    format!("{}{to}", "../".repeat(depth))
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

fn md_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if matches!(c, '\\' | '`' | '*' | '_' | '[' | ']' | '|' | '<' | '>' | '#') {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

fn md_inlines(page: &str, inlines: &[Inline]) -> String {
    let mut out = String::new();
    for i in inlines {
        match i {
            Inline::Text(t) => out.push_str(&md_escape(t)),
            Inline::Code(c) => {
                let _ = write!(out, "`{c}`");
            }
            Inline::Page(label, to) => {
                let _ = write!(out, "[{}]({}.md)", md_escape(label), relative(page, to));
            }
            Inline::File(label, to) => {
                let _ = write!(out, "[{}]({})", md_escape(label), relative(page, to));
            }
        }
    }
    out
}

fn render_markdown(p: &Page) -> String {
    let mut out = format!("# {}\n", md_escape(&p.title));
    for b in &p.blocks {
        out.push('\n');
        match b {
            Block::Heading(level, t) => {
                let _ = writeln!(out, "{} {}", "#".repeat(*level as usize), md_escape(t));
            }
            Block::Para(inl) => {
                let _ = writeln!(out, "{}", md_inlines(&p.path, inl));
            }
            Block::Quote(t) => {
                let _ = writeln!(out, "> {}", md_escape(t));
            }
            Block::List(items) => {
                for item in items {
                    let _ = writeln!(out, "- {}", md_inlines(&p.path, item));
                }
            }
            Block::Table(head, rows) => {
                let _ = writeln!(out, "| {} |", head.join(" | "));
                let _ = writeln!(out, "|{}", "---|".repeat(head.len()));
                for row in rows {
                    let cells: Vec<String> = row.iter().map(|c| md_inlines(&p.path, c)).collect();
                    let _ = writeln!(out, "| {} |", cells.join(" | "));
                }
            }
        }
    }
    out
}

fn html_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

fn html_inlines(page: &str, inlines: &[Inline]) -> String {
    let mut out = String::new();
    for i in inlines {
        match i {
            Inline::Text(t) => out.push_str(&html_escape(t)),
            Inline::Code(c) => {
                let _ = write!(out, "<code>{}</code>", html_escape(c));
            }
            Inline::Page(label, to) => {
                let _ = write!(out, "<a href=\"{}.html\">{}</a>", html_escape(&relative(page, to)), html_escape(label));
            }
            Inline::File(label, to) => {
                let _ = write!(out, "<a href=\"{}\">{}</a>", html_escape(&relative(page, to)), html_escape(label));
            }
        }
    }
    out
}

const STYLE: &str = "body{font-family:sans-serif;max-width:60em;margin:2em auto;padding:0 1em;line-height:1.4}\
table{border-collapse:collapse}td,th{border:1px solid #ccc;padding:.3em .5em;vertical-align:top;text-align:left}\
blockquote{border-left:4px solid #ccc;margin-left:0;padding-left:1em}code{font-size:90%}";

fn render_html(p: &Page) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>{}</title>\n<style>{STYLE}</style>\n</head>\n<body>\n",
        html_escape(&p.title)
    );
    if p.path != "index" {
        let _ = writeln!(out, "<nav><a href=\"{}\">Index</a></nav>", relative(&p.path, "index.html"));
    }
    let _ = writeln!(out, "<h1>{}</h1>", html_escape(&p.title));
    for b in &p.blocks {
        match b {
            Block::Heading(level, t) => {
                let _ = writeln!(out, "<h{level}>{}</h{level}>", html_escape(t));
            }
            Block::Para(inl) => {
                let _ = writeln!(out, "<p>{}</p>", html_inlines(&p.path, inl));
            }
            Block::Quote(t) => {
                let _ = writeln!(out, "<blockquote>{}</blockquote>", html_escape(t));
            }
            Block::List(items) => {
                out.push_str("<ul>\n");
                for item in items {
                    let _ = writeln!(out, "<li>{}</li>", html_inlines(&p.path, item));
                }
                out.push_str("</ul>\n");
            }
            Block::Table(head, rows) => {
                out.push_str("<table>\n<tr>");
                for h in head {
                    let _ = write!(out, "<th>{}</th>", html_escape(h));
                }
                out.push_str("</tr>\n");
                for row in rows {
                    out.push_str("<tr>");
                    for c in row {
                        let _ = write!(out, "<td>{}</td>", html_inlines(&p.path, c));
                    }
                    out.push_str("</tr>\n");
                }
                out.push_str("</table>\n");
            }
        }
    }
    out.push_str("</body>\n</html>\n");
    out
}

/// Renders every page in each requested format, as (site-relative path, contents).
pub fn render_site(input: &ReportInput<'_>, formats: &[Format]) -> Vec<(String, String)> {
    let site = Site::new(input);
    let pages = site.pages();
    let mut out = Vec::with_capacity(pages.len() * formats.len());
    for f in formats {
        for p in &pages {
            let body = match f {
                Format::Markdown => render_markdown(p),
                Format::Html => render_html(p),
            };
            out.push((format!("{}.{}", p.path, f.extension()), body));
        }
    }
    out
}
