//! `tair`: annotated clause text to requirements knowledge graph, coverage and lint reports.

mod load;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use load::{load_document, load_graph, sidecar, write, CliError, Loaded};
use report::{render_site, Format, ReportInput};
use tair_core::graph::view;
use tair_core::lexical::align_lexical_entries;
use tair_core::mapping::{self, CoverageReport, DEFAULT_THRESHOLD};
use tair_core::pitfall::{scan, ScanConfig, VocabularyManifest};
use tair_core::requirements::{classify_modality, DiagnosticKind};
use tair_core::{
    concepts_of, requirements_using, sentences_of, serialize_ntriples, serialize_turtle, BaseIri, ClauseKind, Graph,
    Iri, Modality,
};

#[derive(Parser)]
#[command(name = "tair", version, about = "Requirements knowledge graphs from annotated regulatory and standards text")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print concept and requirement counts; write the extraction as JSON with --out.
    Extract(Common),
    /// Print requirement to concept links and lexical entries.
    Link(Common),
    /// Write each document's graph as Turtle and N-Triples.
    Graph(Common),
    /// Assess how a standard (second input) covers a regulation (first input).
    Map(MapArgs),
    /// Lint graphs for missing inverses, missing annotations and unconnected nodes.
    Lint(LintArgs),
    /// Write static Markdown and HTML pages, graph files and, with --curation, coverage.
    Report(MapArgs),
    /// Look up one concept, requirement or collection.
    Query(QueryArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Annotated clause text files (or .nt graphs where noted).
    #[arg(long = "input", short = 'i', required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base IRI overriding the one declared in each document.
    #[arg(long = "base-iri")]
    base_iri: Option<String>,
    /// Category files, matched to inputs by position; default `<input>.categories`.
    #[arg(long = "categories")]
    categories: Vec<PathBuf>,
    /// Lexicon files, matched to inputs by position; default `<input>.lexicon`.
    #[arg(long = "lexicon")]
    lexicon: Vec<PathBuf>,
    /// Leave generation timestamps out of written artifacts.
    #[arg(long = "no-timestamp")]
    no_timestamp: bool,
    /// Restrict written artifacts to one format.
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
}

#[derive(Args)]
struct MapArgs {
    #[command(flatten)]
    common: Common,
    /// Curation file with accepted and rejected pairs.
    #[arg(long)]
    curation: Option<PathBuf>,
    /// Minimum similarity for a proposed pair.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
}

#[derive(Args)]
struct LintArgs {
    #[command(flatten)]
    common: Common,
    /// Vocabulary manifest declaring inverse properties; default is the bundled one.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Comma-separated pitfall codes to run; default all.
    #[arg(long, value_delimiter = ',')]
    codes: Vec<String>,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    common: Common,
    /// Concept slug, label or IRI: definition and requirements using it.
    #[arg(long, group = "target")]
    concept: Option<String>,
    /// Requirement local name or IRI: text and linked concepts.
    #[arg(long, group = "target")]
    requirement: Option<String>,
    /// Collection clause id or IRI: member requirements in order.
    #[arg(long, group = "target")]
    collection: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Ttl,
    Nt,
    Md,
    Html,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Extract(c) => extract(&c),
        Command::Link(c) => link(&c),
        Command::Graph(c) => graph(&c),
        Command::Map(m) => map(&m),
        Command::Lint(l) => lint(&l),
        Command::Report(m) => report(&m),
        Command::Query(q) => query(&q),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tair: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn base(c: &Common) -> Result<Option<BaseIri>, CliError> {
    c.base_iri
        .as_deref()
        .map(|b| BaseIri::new(b).map_err(|e| CliError::input(format!("--base-iri: {e}"))))
        .transpose()
}

fn load_all(c: &Common) -> Result<Vec<Loaded>, CliError> {
    let base = base(c)?;
    c.inputs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let cats = sidecar(p, &c.categories, i, "categories");
            let lex = sidecar(p, &c.lexicon, i, "lexicon");
            load_document(p, cats.as_deref(), lex.as_deref(), base.as_ref())
        })
        .collect()
}

fn out_dir(c: &Common) -> PathBuf {
    c.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::internal(format!("serialization: {e}")))
}

fn timestamp(c: &Common) -> Option<String> {
    (!c.no_timestamp).then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
}

// ---------------------------------------------------------------------------
// extract
// ---------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ExtractionFile<'a> {
    document: &'a str,
    concepts: &'a [tair_core::Concept],
    requirements: &'a [tair_core::Requirement],
    collections: &'a [tair_core::RequirementCollection],
    diagnostics: &'a [tair_core::requirements::Diagnostic],
}

fn extract(c: &Common) -> Result<(), CliError> {
    for l in load_all(c)? {
        let p = &l.processed;
        let clauses = p.document.clauses_dfs();
        let normative: Vec<_> = clauses.iter().filter(|c| c.kind == ClauseKind::Normative).collect();
        let units: Vec<_> = normative.iter().flat_map(|c| sentences_of(c)).collect();
        let modal_units = units.iter().filter(|u| classify_modality(&u.text).is_some()).count();
        let reqs = &p.extraction.requirements;

        println!("document: {}", p.document.doc_id);
        println!("clauses: {}", clauses.len());
        println!("definitions: {}", p.document.definitions().len());
        println!("concepts: {}", p.scheme.concepts.len());
        println!("normative_clauses: {}", normative.len());
        println!("modal_sentence_units: {modal_units}");
        println!("modal_free_sentence_units: {}", units.len() - modal_units);
        println!("requirements: {}", reqs.len());
        println!("collections: {}", p.extraction.collections.len());
        println!("lexicon_phrases: {}", l.lexicon_phrases);
        println!("lexical_entries: {}", p.lexical.len());
        for coll in &p.extraction.collections {
            println!("collection {}: {}", coll.source_clause, coll.members.len());
        }
        for m in Modality::ALL {
            let n = reqs.iter().filter(|r| r.modality == m).count();
            if n > 0 {
                println!("modality {}: {n}", m.as_str().replace(' ', "_"));
            }
        }
        let broader: usize = p.scheme.concepts.iter().map(|c| c.broader.len()).sum();
        let related: usize = p.scheme.concepts.iter().map(|c| c.related.len()).sum::<usize>() / 2;
        println!("relations broader: {broader}");
        println!("relations related: {related}");
        for (kind, key) in
            [(DiagnosticKind::Cannot, "cannot"), (DiagnosticKind::Must, "must"), (DiagnosticKind::MayNot, "may_not")]
        {
            println!("diagnostics {key}: {}", p.extraction.diagnostics.iter().filter(|d| d.kind == kind).count());
        }
        for d in &p.extraction.diagnostics {
            eprintln!("warning: {}: clause {}: {:?}: {}", l.path.display(), d.clause, d.kind, d.text);
        }
        if let Some(dir) = &c.out {
            let file = ExtractionFile {
                document: &p.document.doc_id,
                concepts: &p.scheme.concepts,
                requirements: reqs,
                collections: &p.extraction.collections,
                diagnostics: &p.extraction.diagnostics,
            };
            write(dir, &format!("{}.extraction.json", p.document.doc_id), &json(&file)?)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// link
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct LinkFile<'a> {
    document: &'a str,
    links: &'a [tair_core::ConceptMatch],
    lexical: &'a [tair_core::LexicalEntry],
}

fn link(c: &Common) -> Result<(), CliError> {
    let loaded = load_all(c)?;
    let schemes: Vec<_> = loaded.iter().map(|l| l.processed.scheme.clone()).collect();
    for (i, l) in loaded.iter().enumerate() {
        let p = &l.processed;
        let others: Vec<_> = schemes.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, s)| s).collect();
        let mut lexical = p.lexical.clone();
        align_lexical_entries(&mut lexical, &others);
        for m in &p.matches {
            let role = m.role.map_or("uses", |r| r.as_str());
            println!("{}\t{role}\t{}\t{}", m.requirement, m.concept, m.surface);
        }
        for e in &lexical {
            let candidates: Vec<&str> = e.alignment_candidates.iter().map(|a| a.concept.as_str()).collect();
            println!("{}\tlexical\t{}\t{}", e.iri, e.surface_form, candidates.join(" "));
        }
        if let Some(dir) = &c.out {
            let file = LinkFile { document: &p.document.doc_id, links: &p.matches, lexical: &lexical };
            write(dir, &format!("{}.links.json", p.document.doc_id), &json(&file)?)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// graph
// ---------------------------------------------------------------------------

fn graph_formats(c: &Common) -> Result<Vec<OutFormat>, CliError> {
    match c.format {
        None => Ok(vec![OutFormat::Ttl, OutFormat::Nt]),
        Some(f @ (OutFormat::Ttl | OutFormat::Nt)) => Ok(vec![f]),
        Some(_) => Err(CliError::input("graph output supports --format ttl or nt")),
    }
}

/// Writes the graph files and returns their paths relative to `dir`.
fn write_graph(dir: &Path, prefix: &str, id: &str, g: &Graph, formats: &[OutFormat]) -> Result<Vec<String>, CliError> {
    let mut written = Vec::new();
    for f in formats {
        let (name, body) = match f {
            OutFormat::Ttl => (format!("{prefix}{id}.ttl"), serialize_turtle(g)),
            OutFormat::Nt => (format!("{prefix}{id}.nt"), serialize_ntriples(g)),
            _ => continue,
        };
        write(dir, &name, &body)?;
        written.push(name);
    }
    Ok(written)
}

fn graph(c: &Common) -> Result<(), CliError> {
    let formats = graph_formats(c)?;
    let dir = out_dir(c);
    for l in load_all(c)? {
        let p = &l.processed;
        for name in write_graph(&dir, "", &p.document.doc_id, &p.graph, &formats)? {
            println!("{}: {} triples", dir.join(name).display(), p.graph.len());
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// map
// ---------------------------------------------------------------------------

fn coverage(m: &MapArgs, reg: &Loaded, std: &Loaded) -> Result<(CoverageReport, Vec<mapping::Proposal>), CliError> {
    if !(0.0..=1.0).contains(&m.threshold) {
        return Err(CliError::input("--threshold must lie in [0, 1]"));
    }
    let (rg, sg) = (&reg.processed.graph, &std.processed.graph);
    let proposals = mapping::propose_alignments(rg, sg, m.threshold);
    let rows = match &m.curation {
        Some(p) => mapping::parse_curation(&load::read(p)?)?,
        None => Vec::new(),
    };
    let curated = mapping::apply_curation(&proposals, &rows, rg, sg)?;
    let report = mapping::coverage_report(&curated, rg, sg, timestamp(&m.common))?;
    Ok((report, proposals))
}

fn coverage_markdown(r: &CoverageReport) -> String {
    let mut out = format!("# Coverage of {} by {}\n\n", r.regulation, r.standard);
    if let Some(ts) = &r.generated_at {
        out.push_str(&format!("Generated: {ts}\n\n"));
    }
    out.push_str(&format!(
        "| Full | Partial | Unmapped |\n|---|---|---|\n| {} | {} | {} |\n\n",
        r.counts.full, r.counts.partial, r.counts.unmapped
    ));
    out.push_str("| Regulation requirement | Kind | Standard requirements | Reasons | Strictness | Note |\n");
    out.push_str("|---|---|---|---|---|---|\n");
    for a in &r.assertions {
        let targets: Vec<&str> = a.target_reqs.iter().map(|t| t.as_str()).collect();
        let reasons: Vec<&str> = a.partial_reasons.iter().map(|x| x.as_str()).collect();
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} |\n",
            a.source_req,
            a.kind.as_str(),
            targets.join(", "),
            reasons.join(", "),
            a.strictness_delta.map_or("", |d| d.as_str()),
            a.note.replace('|', "\\|")
        ));
    }
    if !r.unresolved_terms.is_empty() {
        out.push_str("\n## Unresolved terms\n\n");
        for t in &r.unresolved_terms {
            out.push_str(&format!("- {t}\n"));
        }
    }
    if !r.unreviewed_proposals.is_empty() {
        out.push_str("\n## Unreviewed proposals\n\n| Regulation | Standard | Score |\n|---|---|---|\n");
        for p in &r.unreviewed_proposals {
            out.push_str(&format!("| {} | {} | {:.3} |\n", p.source, p.target, p.score));
        }
    }
    out
}

fn two_documents(c: &Common) -> Result<(Loaded, Loaded), CliError> {
    if c.inputs.len() != 2 {
        return Err(CliError::input("expected exactly two inputs: regulation, then standard"));
    }
    let mut loaded = load_all(c)?;
    let std = loaded.pop().expect("two inputs");
    let reg = loaded.pop().expect("two inputs");
    Ok((reg, std))
}

fn map(m: &MapArgs) -> Result<(), CliError> {
    let (reg, std) = two_documents(&m.common)?;
    let (report, proposals) = coverage(m, &reg, &std)?;
    println!("full: {}", report.counts.full);
    println!("partial: {}", report.counts.partial);
    println!("unmapped: {}", report.counts.unmapped);
    println!("proposals: {} ({} unreviewed)", proposals.len(), report.unreviewed_proposals.len());
    if let Some(dir) = &m.common.out {
        write(dir, "coverage.json", &json(&report)?)?;
        write(dir, "coverage.md", &coverage_markdown(&report))?;
        write(dir, "proposals.json", &json(&proposals)?)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// lint
// ---------------------------------------------------------------------------

fn lint(l: &LintArgs) -> Result<(), CliError> {
    let c = &l.common;
    let manifest = match &l.manifest {
        Some(p) => VocabularyManifest::parse(&load::read(p)?)?,
        None => VocabularyManifest::standard(),
    };
    let config = if l.codes.is_empty() { ScanConfig::default() } else { ScanConfig { codes: l.codes.clone() } };
    let base = base(c)?;
    for (i, path) in c.inputs.iter().enumerate() {
        let cats = sidecar(path, &c.categories, i, "categories");
        let lex = sidecar(path, &c.lexicon, i, "lexicon");
        let (id, g) = load_graph(path, cats.as_deref(), lex.as_deref(), base.as_ref())?;
        let report = scan(&g, &id, &manifest, &config)?;
        println!(
            "{id}: {} pitfalls (minor {}, important {}, critical {})",
            report.pitfalls.len(),
            report.summary.minor,
            report.summary.important,
            report.summary.critical
        );
        for p in &report.pitfalls {
            let affected: Vec<&str> = p.affected.iter().map(|a| a.as_str()).collect();
            println!("  {} {} {} {}: {}", p.code, p.severity, p.method, affected.join(" "), p.message);
        }
        for n in &report.notes {
            println!("  note {}: {}", n.iri, n.message);
        }
        if let Some(dir) = &c.out {
            write(dir, &format!("{id}.pitfalls.json"), &json(&report)?)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

fn report(m: &MapArgs) -> Result<(), CliError> {
    let c = &m.common;
    let formats = match c.format {
        None => vec![Format::Markdown, Format::Html],
        Some(OutFormat::Md) => vec![Format::Markdown],
        Some(OutFormat::Html) => vec![Format::Html],
        Some(_) => return Err(CliError::input("report output supports --format md or html")),
    };
    let loaded = if m.curation.is_some() {
        let (reg, std) = two_documents(c)?;
        vec![reg, std]
    } else {
        load_all(c)?
    };
    let coverage = match &m.curation {
        Some(_) => Some(coverage(m, &loaded[0], &loaded[1])?.0),
        None => None,
    };
    let dir = out_dir(c);
    let mut graph_files = BTreeMap::new();
    for l in &loaded {
        let p = &l.processed;
        let files = write_graph(&dir, "graph/", &p.document.doc_id, &p.graph, &[OutFormat::Ttl, OutFormat::Nt])?;
        graph_files.insert(p.document.doc_id.clone(), files);
    }
    if let Some(cov) = &coverage {
        write(&dir, "coverage.json", &json(cov)?)?;
    }
    let ts = timestamp(c);
    let input = ReportInput {
        documents: loaded.iter().map(|l| &l.processed.graph).collect(),
        coverage: coverage.as_ref(),
        generated_at: ts.as_deref(),
        graph_files,
    };
    let pages = render_site(&input, &formats);
    for (path, body) in &pages {
        write(&dir, path, body)?;
    }
    println!("{}: {} pages", dir.display(), pages.len());
    Ok(())
}

// ---------------------------------------------------------------------------
// query
// ---------------------------------------------------------------------------

/// Resolves a user-supplied name against the IRIs of one node kind.
fn resolve<'a>(candidates: &'a [Iri], key: &str, labels: impl Fn(&Iri) -> Vec<String>) -> Option<&'a Iri> {
    let lower = key.to_lowercase();
    candidates.iter().find(|i| i.as_str() == key).or_else(|| {
        candidates.iter().find(|i| i.local_name() == key || labels(i).iter().any(|l| l.to_lowercase() == lower))
    })
}

fn query(q: &QueryArgs) -> Result<(), CliError> {
    let c = &q.common;
    let base = base(c)?;
    let mut graphs = Vec::new();
    for (i, path) in c.inputs.iter().enumerate() {
        let cats = sidecar(path, &c.categories, i, "categories");
        let lex = sidecar(path, &c.lexicon, i, "lexicon");
        graphs.push(load_graph(path, cats.as_deref(), lex.as_deref(), base.as_ref())?.1);
    }
    let not_found = |kind: &str, key: &str| CliError::input(format!("no {kind} matches `{key}`"));
    if let Some(key) = &q.concept {
        for g in &graphs {
            let concepts = view::concepts(g);
            let iris: Vec<Iri> = concepts.iter().map(|c| c.iri.clone()).collect();
            let labels = |i: &Iri| {
                concepts
                    .iter()
                    .find(|c| &c.iri == i)
                    .map(|c| std::iter::once(c.pref_label.clone()).chain(c.alt_labels.clone()).collect())
                    .unwrap_or_default()
            };
            if let Some(iri) = resolve(&iris, key, labels) {
                let record = view::concept(g, iri).expect("resolved concept");
                println!("{}", record.iri);
                println!("label: {}", record.pref_label);
                for alt in &record.alt_labels {
                    println!("alt label: {alt}");
                }
                println!("definition: {}", record.definition);
                println!("category: {}", record.category);
                for r in requirements_using(g, iri)? {
                    let roles: Vec<&str> = concepts_of(g, &r)?
                        .into_iter()
                        .filter(|(_, t)| t == iri)
                        .map(|(role, _)| role.as_str())
                        .collect();
                    println!("requirement: {r} ({})", roles.join(", "));
                }
                return Ok(());
            }
        }
        return Err(not_found("concept", key));
    }
    if let Some(key) = &q.requirement {
        for g in &graphs {
            let iris = g.instances_of(&tair_core::graph::vocab::tair::requirement());
            if let Some(iri) = resolve(&iris, key, |_| Vec::new()) {
                let r = view::requirement(g, iri).expect("resolved requirement");
                println!("{}", r.iri);
                println!("text: {}", r.text);
                println!("modality: {}", r.modality.map_or("none", |m| m.as_str()));
                println!("clause: {}", r.source_clause);
                for (role, concept) in &r.links {
                    println!("{}: {concept}", role.as_str());
                }
                return Ok(());
            }
        }
        return Err(not_found("requirement", key));
    }
    if let Some(key) = &q.collection {
        for g in &graphs {
            let colls = view::collections(g);
            let iris: Vec<Iri> = colls.iter().map(|c| c.iri.clone()).collect();
            let labels = |i: &Iri| colls.iter().filter(|c| &c.iri == i).map(|c| c.label.clone()).collect();
            if let Some(iri) = resolve(&iris, key, labels) {
                let coll = colls.iter().find(|c| &c.iri == iri).expect("resolved collection");
                println!("{}", coll.iri);
                println!("label: {}", coll.label);
                for m in &coll.members {
                    println!("member: {m}");
                }
                return Ok(());
            }
        }
        return Err(not_found("collection", key));
    }
    Err(CliError::input("query needs one of --concept, --requirement or --collection"))
}
