#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use tair_core::{process, CategoryMap, Inputs, Iri, Lexicon, Processed};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> String {
    let p = fixtures_dir().join(name);
    fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

pub fn optional_fixture(name: &str) -> Option<String> {
    fs::read_to_string(fixtures_dir().join(name)).ok()
}

/// Runs the pipeline on `<stem>.txt` with its sidecar category and lexicon files, when present.
pub fn run(stem: &str) -> Processed {
    let categories = optional_fixture(&format!("{stem}.categories")).map(|t| CategoryMap::parse(&t).unwrap());
    let lexicon = optional_fixture(&format!("{stem}.lexicon")).map(|t| Lexicon::parse(&t).unwrap());
    let inputs = Inputs { base: None, categories: categories.as_ref(), lexicon: lexicon.as_ref() };
    process(&fixture(&format!("{stem}.txt")), &inputs).unwrap()
}

pub fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

pub const STEMS: [&str; 4] = ["ai-act", "mss", "toy-regulation", "toy-standard"];
