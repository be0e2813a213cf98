//! Line-oriented N-Triples reading and writing.
//!
//! The reader is line-recoverable: a malformed statement produces one
//! [`ParseError`] for its line and parsing resumes on the next line.

use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use super::term::{is_bnode_char, is_bnode_start, BlankNode, Iri, Literal, Subject, Term, Triple};
use super::vocab::rdf;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Parses a whole document. Blank and comment-only lines are skipped.
pub fn parse_ntriples(text: &str) -> (Vec<Triple>, Vec<ParseError>) {
    let mut triples = Vec::new();
    let mut errors = Vec::new();
    for (idx, line) in split_lines(text).enumerate() {
        match parse_line(line) {
            Ok(Some(t)) => triples.push(t),
            Ok(None) => {}
            Err(mut e) => {
                e.line = idx + 1;
                errors.push(e);
            }
        }
    }
    (triples, errors)
}

/// Splits on LF, CR LF or CR, the three N-Triples end-of-line forms.
fn split_lines(text: &str) -> impl Iterator<Item = &str> {
    let mut rest = text;
    std::iter::from_fn(move || {
        if rest.is_empty() {
            return None;
        }
        match rest.find(['\n', '\r']) {
            Some(pos) => {
                let line = &rest[..pos];
                let skip = if rest[pos..].starts_with("\r\n") { 2 } else { 1 };
                rest = &rest[pos + skip..];
                Some(line)
            }
            None => {
                let line = rest;
                rest = "";
                Some(line)
            }
        }
    })
}

/// Parses a single statement line; `Ok(None)` for blank or comment lines.
pub fn parse_line(line: &str) -> Result<Option<Triple>, ParseError> {
    let mut cur = Cursor::new(line);
    cur.skip_ws();
    if cur.at_end_or_comment() {
        return Ok(None);
    }
    let subject = match cur.term()? {
        Term::Iri(i) => Subject::Iri(i),
        Term::BlankNode(b) => Subject::BlankNode(b),
        Term::Literal(_) => return Err(cur.error_at(0, "literal in subject position")),
    };
    cur.skip_ws();
    let pred_start = cur.pos;
    let predicate = match cur.term()? {
        Term::Iri(i) => i,
        _ => return Err(cur.error_at(pred_start, "predicate must be an IRI")),
    };
    cur.skip_ws();
    let object = cur.term()?;
    cur.skip_ws();
    cur.expect('.')?;
    cur.skip_ws();
    if !cur.at_end_or_comment() {
        return Err(cur.error("unexpected content after '.'"));
    }
    Ok(Some(Triple {
        subject,
        predicate,
        object,
    }))
}

/// Character cursor over one line, shared with the quad log reader.
pub(crate) struct Cursor<'a> {
    line: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(line: &'a str) -> Self {
        Self { line, pos: 0 }
    }

    pub(crate) fn rest(&self) -> &'a str {
        &self.line[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub(crate) fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    pub(crate) fn at_end_or_comment(&self) -> bool {
        matches!(self.peek(), None | Some('#'))
    }

    fn column(&self, byte_pos: usize) -> usize {
        self.line[..byte_pos].chars().count() + 1
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, byte_pos: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: 0,
            column: self.column(byte_pos),
            message: message.into(),
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(match self.peek() {
                Some(found) => self.error(format!("expected '{c}', found '{found}'")),
                None => self.error(format!("expected '{c}', found end of line")),
            })
        }
    }

    pub(crate) fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some('<') => self.iri().map(Term::Iri),
            Some('_') => self.blank_node().map(Term::BlankNode),
            Some('"') => self.literal().map(Term::Literal),
            Some(c) => Err(self.error(format!("unexpected character '{c}'"))),
            None => Err(self.error("unexpected end of line")),
        }
    }

    pub(crate) fn iri(&mut self) -> Result<Iri, ParseError> {
        let start = self.pos;
        self.expect('<')?;
        let mut value = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error_at(start, "unterminated IRI")),
                Some('>') => break,
                Some('\\') => {
                    let esc_pos = self.pos - 1;
                    match self.bump() {
                        Some('u') => value.push(self.hex_escape(4, esc_pos)?),
                        Some('U') => value.push(self.hex_escape(8, esc_pos)?),
                        _ => return Err(self.error_at(esc_pos, "invalid escape in IRI")),
                    }
                }
                Some(c) => value.push(c),
            }
        }
        Iri::new(value).map_err(|e| self.error_at(start, e.to_string()))
    }

    fn blank_node(&mut self) -> Result<BlankNode, ParseError> {
        let start = self.pos;
        self.expect('_')?;
        self.expect(':')?;
        let label_start = self.pos;
        match self.peek() {
            Some(c) if is_bnode_start(c) => {
                self.bump();
            }
            _ => return Err(self.error("invalid blank node label")),
        }
        while let Some(c) = self.peek() {
            if !is_bnode_char(c) {
                break;
            }
            self.bump();
        }
        // A label may not end with '.'; give trailing dots back to the statement.
        while self.line[label_start..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        BlankNode::new(&self.line[label_start..self.pos])
            .map_err(|e| self.error_at(start, e.to_string()))
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let start = self.pos;
        self.expect('"')?;
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error_at(start, "unterminated string literal")),
                Some('"') => break,
                Some('\\') => {
                    let esc_pos = self.pos - 1;
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_escape(4, esc_pos)?,
                        Some('U') => self.hex_escape(8, esc_pos)?,
                        _ => return Err(self.error_at(esc_pos, "invalid escape sequence")),
                    };
                    lexical.push(c);
                }
                Some(c @ ('\n' | '\r')) => {
                    return Err(self.error(format!("raw {c:?} in string literal")));
                }
                Some(c) => lexical.push(c),
            }
        }
        match self.peek() {
            Some('@') => {
                self.bump();
                let tag_start = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '-' {
                        self.bump();
                    } else {
                        break;
                    }
                }
                let tag = &self.line[tag_start..self.pos];
                if !valid_langtag(tag) {
                    return Err(self.error_at(tag_start, format!("invalid language tag {tag:?}")));
                }
                Literal::lang(lexical, tag).map_err(|e| self.error_at(tag_start, e.to_string()))
            }
            Some('^') => {
                self.bump();
                self.expect('^')?;
                let dt_pos = self.pos;
                let datatype = self.iri()?;
                if datatype.as_str() == rdf::LANG_STRING {
                    return Err(self.error_at(dt_pos, "rdf:langString requires a language tag"));
                }
                Ok(Literal::typed(lexical, datatype))
            }
            _ => Ok(Literal::string(lexical)),
        }
    }

    fn hex_escape(&mut self, digits: usize, esc_pos: usize) -> Result<char, ParseError> {
        let start = self.pos;
        for _ in 0..digits {
            match self.bump() {
                Some(c) if c.is_ascii_hexdigit() => {}
                _ => return Err(self.error_at(esc_pos, "malformed \\u escape")),
            }
        }
        let code = u32::from_str_radix(&self.line[start..self.pos], 16)
            .map_err(|_| self.error_at(esc_pos, "malformed \\u escape"))?;
        char::from_u32(code).ok_or_else(|| self.error_at(esc_pos, "escape is not a scalar value"))
    }
}

/// `[a-zA-Z]+ ('-' [a-zA-Z0-9]+)*`
fn valid_langtag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    parts
        .next()
        .is_some_and(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_alphabetic()))
        && parts.all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_alphanumeric()))
}

/// Writes `s` with N-Triples string escapes applied.
pub(crate) fn write_escaped(out: &mut impl fmt::Write, s: &str) -> fmt::Result {
    for c in s.chars() {
        match c {
            '"' => out.write_str("\\\"")?,
            '\\' => out.write_str("\\\\")?,
            '\n' => out.write_str("\\n")?,
            '\r' => out.write_str("\\r")?,
            '\t' => out.write_str("\\t")?,
            '\u{8}' => out.write_str("\\b")?,
            '\u{c}' => out.write_str("\\f")?,
            c if c < ' ' || c == '\u{7f}' => write!(out, "\\u{:04X}", c as u32)?,
            c => out.write_char(c)?,
        }
    }
    Ok(())
}

/// Serializes triples one statement per line, in input order.
pub fn serialize_ntriples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> String {
    let mut out = String::new();
    for t in triples {
        writeln!(out, "{t}").expect("writing to a String cannot fail");
    }
    out
}
