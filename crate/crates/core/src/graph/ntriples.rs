use super::{Graph, GraphError, Literal, Term, Triple};
use crate::iri::Iri;

pub(crate) fn escape_literal(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{8}' => out.push_str("\\b"),
            '\u{c}' => out.push_str("\\f"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
}

fn write_term(t: &Term, out: &mut String) {
    match t {
        Term::Iri(i) => {
            out.push('<');
            out.push_str(i.as_str());
            out.push('>');
        }
        Term::Literal(l) => write_literal(l, out, |dt, out| {
            out.push('<');
            out.push_str(dt.as_str());
            out.push('>');
        }),
    }
}

pub(crate) fn write_literal(l: &Literal, out: &mut String, datatype: impl Fn(&Iri, &mut String)) {
    out.push('"');
    escape_literal(&l.lexical, out);
    out.push('"');
    if let Some(tag) = &l.lang {
        out.push('@');
        out.push_str(tag);
    } else if let Some(dt) = &l.datatype {
        out.push_str("^^");
        datatype(dt, out);
    }
}

pub(crate) fn triple_line(t: &Triple) -> String {
    let mut out = String::new();
    out.push('<');
    out.push_str(t.subject.as_str());
    out.push_str("> <");
    out.push_str(t.predicate.as_str());
    out.push_str("> ");
    write_term(&t.object, &mut out);
    out.push_str(" .");
    out
}

/// One triple per line in canonical (sorted) order.
pub fn serialize_ntriples(g: &Graph) -> String {
    let mut out = String::new();
    for t in g.iter() {
        out.push_str(&triple_line(t));
        out.push('\n');
    }
    out
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> GraphError {
        GraphError::Parse { line: self.line, message: format!("column {}: {}", self.pos + 1, message.into()) }
    }

    fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: char) -> Result<(), GraphError> {
        match self.bump() {
            Some(x) if x == c => Ok(()),
            Some(x) => Err(self.err(format!("expected {c:?}, found {x:?}"))),
            None => Err(self.err(format!("expected {c:?}, found end of line"))),
        }
    }

    fn hex(&mut self, n: usize) -> Result<char, GraphError> {
        let start = self.pos;
        let digits = self.s.get(start..start + n).ok_or_else(|| self.err("truncated \\u escape"))?;
        if !digits.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(self.err(format!("bad hex digits `{digits}`")));
        }
        self.pos += n;
        let v = u32::from_str_radix(digits, 16).expect("checked hex");
        char::from_u32(v).ok_or_else(|| self.err(format!("U+{v:X} is not a scalar value")))
    }

    fn uchar(&mut self) -> Result<char, GraphError> {
        match self.bump() {
            Some('u') => self.hex(4),
            Some('U') => self.hex(8),
            _ => Err(self.err("expected \\u or \\U escape")),
        }
    }

    fn iri(&mut self) -> Result<Iri, GraphError> {
        match self.peek() {
            Some('<') => {}
            Some('_') => return Err(self.err("blank nodes are not supported")),
            Some(c) => return Err(self.err(format!("expected IRI, found {c:?}"))),
            None => return Err(self.err("expected IRI, found end of line")),
        }
        self.pos += 1;
        let mut text = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some('\\') => text.push(self.uchar()?),
                Some(c) => text.push(c),
                None => return Err(self.err("unterminated IRI")),
            }
        }
        Iri::new(text).map_err(|e| self.err(e.to_string()))
    }

    fn literal(&mut self) -> Result<Literal, GraphError> {
        self.expect('"')?;
        let mut lexical = String::new();
        loop {
            match self.bump() {
                Some('"') => break,
                Some('\\') => {
                    let c = match self.peek() {
                        Some('u' | 'U') => self.uchar()?,
                        Some(e) => {
                            self.pos += 1;
                            match e {
                                't' => '\t',
                                'b' => '\u{8}',
                                'n' => '\n',
                                'r' => '\r',
                                'f' => '\u{c}',
                                '"' => '"',
                                '\'' => '\'',
                                '\\' => '\\',
                                other => return Err(self.err(format!("unknown escape \\{other}"))),
                            }
                        }
                        None => return Err(self.err("dangling backslash")),
                    };
                    lexical.push(c);
                }
                Some('\n' | '\r') | None => return Err(self.err("unterminated literal")),
                Some(c) => lexical.push(c),
            }
        }
        match self.peek() {
            Some('@') => {
                self.pos += 1;
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '-') {
                    self.pos += 1;
                }
                let tag = &self.s[start..self.pos];
                Literal::lang(lexical, tag).map_err(|e| self.err(e.to_string()))
            }
            Some('^') => {
                self.pos += 1;
                self.expect('^')?;
                let dt = self.iri()?;
                Ok(Literal::typed(lexical, dt))
            }
            _ => Ok(Literal::plain(lexical)),
        }
    }
}

/// Parses N-Triples. Blank nodes are rejected; errors carry the 1-based line.
pub fn parse_ntriples(text: &str) -> Result<Graph, GraphError> {
    let mut g = Graph::with_standard_namespaces();
    for (i, raw) in text.split('\n').enumerate() {
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let mut c = Cursor { s: raw, pos: 0, line: i + 1 };
        c.skip_ws();
        if matches!(c.peek(), None | Some('#')) {
            continue;
        }
        let subject = c.iri()?;
        c.skip_ws();
        let predicate = c.iri()?;
        c.skip_ws();
        let object = match c.peek() {
            Some('"') => Term::Literal(c.literal()?),
            _ => Term::Iri(c.iri()?),
        };
        c.skip_ws();
        c.expect('.')?;
        c.skip_ws();
        if !matches!(c.peek(), None | Some('#')) {
            return Err(c.err("trailing characters after '.'"));
        }
        g.insert(Triple { subject, predicate, object });
    }
    Ok(g)
}
