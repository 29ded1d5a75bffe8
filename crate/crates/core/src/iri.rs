use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IriError {
    #[error("IRI is empty")]
    Empty,
    #[error("IRI `{0}` is not absolute (missing scheme)")]
    NotAbsolute(String),
    #[error("IRI `{iri}` contains forbidden character {ch:?}")]
    ForbiddenChar { iri: String, ch: char },
}

/// An absolute IRI. Characters that N-Triples would have to escape are rejected
/// up front, so the text can be written between angle brackets verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    pub fn new(s: impl Into<String>) -> Result<Self, IriError> {
        let s = s.into();
        if s.is_empty() {
            return Err(IriError::Empty);
        }
        if let Some(ch) = s
            .chars()
            .find(|&c| c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
        {
            return Err(IriError::ForbiddenChar { iri: s, ch });
        }
        let Some(colon) = s.find(':') else {
            return Err(IriError::NotAbsolute(s));
        };
        let scheme = &s[..colon];
        let valid_scheme = scheme
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic())
            && scheme
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
        if !valid_scheme {
            return Err(IriError::NotAbsolute(s));
        }
        Ok(Iri(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The part after the last `#` or `/`.
    pub fn local_name(&self) -> &str {
        let cut = self.0.rfind(['#', '/']).map(|i| i + 1).unwrap_or(0);
        &self.0[cut..]
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Iri {
    type Error = IriError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Iri::new(s)
    }
}

impl From<Iri> for String {
    fn from(iri: Iri) -> String {
        iri.0
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Prefix under which document resources are minted. Always ends in `/` or `#`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BaseIri(String);

impl BaseIri {
    pub fn new(s: &str) -> Result<Self, IriError> {
        let mut s = s.trim().to_string();
        if !s.ends_with('/') && !s.ends_with('#') {
            s.push('/');
        }
        Iri::new(s.clone())?;
        Ok(BaseIri(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// `<base><doc>` for the document node itself.
    pub fn document(&self, doc: &str) -> Iri {
        Iri(format!("{}{}", self.0, doc))
    }

    /// `<base><doc>/<kind>/<local>`; callers pass already-validated segments.
    pub fn mint(&self, doc: &str, kind: &str, local: &str) -> Iri {
        Iri(format!("{}{}/{}/{}", self.0, doc, kind, local))
    }

    pub fn scheme(&self, doc: &str) -> Iri {
        Iri(format!("{}{}/scheme", self.0, doc))
    }
}

impl fmt::Display for BaseIri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
