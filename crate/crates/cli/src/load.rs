//! Reading inputs and classifying failures into exit codes.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use tair_core::mapping::MappingError;
use tair_core::pitfall::PitfallError;
use tair_core::terms::check_invariants;
use tair_core::{
    parse_ntriples, process, BaseIri, CategoryMap, Graph, GraphError, Inputs, Lexicon, PipelineError, Processed,
    TermError,
};

/// Exit status 1: bad input. Exit status 2: an internal invariant failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    Input,
    Internal,
}

#[derive(Debug)]
pub struct CliError {
    pub failure: Failure,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { failure: Failure::Input, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError { failure: Failure::Internal, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.failure {
            Failure::Input => 1,
            Failure::Internal => 2,
        }
    }

    fn context(mut self, path: &Path) -> Self {
        self.message = format!("{}: {}", path.display(), self.message);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let class = match self.failure {
            Failure::Input => "input error",
            Failure::Internal => "internal error",
        };
        write!(f, "{class}: {}", self.message)
    }
}

impl From<TermError> for CliError {
    fn from(e: TermError) -> Self {
        match e {
            TermError::UnknownConcept(_) | TermError::SelfRelation(_) | TermError::Invariant(_) => {
                CliError::internal(e.to_string())
            }
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Dangling(_) | GraphError::DocumentMismatch(..) => {
                CliError::internal(format!("dangling or mismatched IRI: {e}"))
            }
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Document(d) => CliError::input(format!("parse error: {d}")),
            PipelineError::Terms(t) => t.into(),
            PipelineError::Graph(g) => g.into(),
        }
    }
}

impl From<MappingError> for CliError {
    fn from(e: MappingError) -> Self {
        match e {
            MappingError::MissingModality(_) | MappingError::NotAPartition(_) => CliError::internal(e.to_string()),
            _ => CliError::input(format!("curation error: {e}")),
        }
    }
}

impl From<PitfallError> for CliError {
    fn from(e: PitfallError) -> Self {
        CliError::input(e.to_string())
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::input(format!("{}: {e}", parent.display())))?;
    }
    fs::write(&path, contents).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// `--flag` files matched to inputs by position; missing positions fall back to `<input>.<ext>`.
pub fn sidecar(input: &Path, explicit: &[PathBuf], index: usize, ext: &str) -> Option<PathBuf> {
    explicit.get(index).cloned().or_else(|| {
        let p = input.with_extension(ext);
        p.is_file().then_some(p)
    })
}

pub struct Loaded {
    pub path: PathBuf,
    pub lexicon_phrases: usize,
    pub processed: Processed,
}

/// Parses one annotated document and runs the extraction chain.
pub fn load_document(
    path: &Path,
    categories: Option<&Path>,
    lexicon: Option<&Path>,
    base: Option<&BaseIri>,
) -> Result<Loaded, CliError> {
    let categories = categories
        .map(|p| CategoryMap::parse(&read(p)?).map_err(|e| CliError::input(e.to_string()).context(p)))
        .transpose()?;
    let lexicon = lexicon
        .map(|p| Lexicon::parse(&read(p)?).map_err(|e| CliError::input(e.to_string()).context(p)))
        .transpose()?;
    let text = read(path)?;
    let inputs = Inputs { base, categories: categories.as_ref(), lexicon: lexicon.as_ref() };
    let processed = process(&text, &inputs).map_err(|e| CliError::from(e).context(path))?;
    check_invariants(&processed.scheme).map_err(|e| CliError::from(e).context(path))?;
    Ok(Loaded {
        path: path.to_path_buf(),
        lexicon_phrases: lexicon.map_or(0, |l| l.phrases.len()),
        processed,
    })
}

/// A graph from an annotated document, or read directly from an N-Triples file.
pub fn load_graph(
    path: &Path,
    categories: Option<&Path>,
    lexicon: Option<&Path>,
    base: Option<&BaseIri>,
) -> Result<(String, Graph), CliError> {
    if path.extension().is_some_and(|e| e == "nt") {
        let g = parse_ntriples(&read(path)?).map_err(|e| CliError::from(e).context(path))?;
        let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        return Ok((id, g));
    }
    let loaded = load_document(path, categories, lexicon, base)?;
    Ok((loaded.processed.document.doc_id.clone(), loaded.processed.graph))
}
