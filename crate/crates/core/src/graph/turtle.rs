use std::collections::BTreeMap;

use super::ntriples::write_literal;
use super::vocab::rdf;
use super::{Graph, Term, Triple};
use crate::iri::Iri;

fn is_local_name(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b) if b.is_ascii_alphanumeric() || b == b'_')
        && bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

struct Prefixes<'a>(Vec<(&'a str, &'a str)>);

impl<'a> Prefixes<'a> {
    fn new(ns: &'a BTreeMap<String, String>) -> Self {
        let mut v: Vec<(&str, &str)> = ns.iter().map(|(p, n)| (p.as_str(), n.as_str())).collect();
        // Longest namespace first so nested namespaces compact to the most specific prefix.
        v.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(b.0)));
        Prefixes(v)
    }

    fn write_iri(&self, iri: &Iri, out: &mut String) {
        for (p, ns) in &self.0 {
            if let Some(local) = iri.as_str().strip_prefix(ns) {
                if is_local_name(local) {
                    out.push_str(p);
                    out.push(':');
                    out.push_str(local);
                    return;
                }
            }
        }
        out.push('<');
        out.push_str(iri.as_str());
        out.push('>');
    }

    fn write_term(&self, t: &Term, out: &mut String) {
        match t {
            Term::Iri(i) => self.write_iri(i, out),
            Term::Literal(l) => write_literal(l, out, |dt, out| self.write_iri(dt, out)),
        }
    }
}

/// Canonical Turtle: sorted prefix prologue, then one block per subject in IRI
/// order with `a` first, remaining predicates by IRI, and objects comma-joined.
pub fn serialize_turtle(g: &Graph) -> String {
    let prefixes = Prefixes::new(g.namespaces());
    let mut out = String::new();
    for (p, ns) in g.namespaces() {
        out.push_str(&format!("@prefix {p}: <{ns}> .\n"));
    }
    let ty = rdf::type_();
    let mut by_subject: BTreeMap<&Iri, Vec<&Triple>> = BTreeMap::new();
    for t in g.iter() {
        by_subject.entry(&t.subject).or_default().push(t);
    }
    for (subject, triples) in by_subject {
        out.push('\n');
        prefixes.write_iri(subject, &mut out);
        out.push('\n');
        let mut by_pred: Vec<(&Iri, Vec<&Term>)> = Vec::new();
        for t in triples {
            match by_pred.last_mut() {
                Some((p, objs)) if *p == &t.predicate => objs.push(&t.object),
                _ => by_pred.push((&t.predicate, vec![&t.object])),
            }
        }
        by_pred.sort_by_key(|(p, _)| (**p != ty, *p));
        let n = by_pred.len();
        for (k, (p, objs)) in by_pred.into_iter().enumerate() {
            out.push_str("    ");
            if *p == ty {
                out.push('a');
            } else {
                prefixes.write_iri(p, &mut out);
            }
            for (j, o) in objs.into_iter().enumerate() {
                out.push_str(if j == 0 { " " } else { " ,\n        " });
                prefixes.write_term(o, &mut out);
            }
            out.push_str(if k + 1 == n { " .\n" } else { " ;\n" });
        }
    }
    out
}
