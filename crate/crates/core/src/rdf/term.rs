use std::fmt;

use thiserror::Error;

use super::vocab::{rdf, xsd};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("invalid IRI {0:?}: {1}")]
    InvalidIri(String, &'static str),
    #[error("invalid language tag {0:?}")]
    InvalidLanguage(String),
    #[error("invalid blank node label {0:?}")]
    InvalidBlankNode(String),
    #[error("language-tagged literal must use rdf:langString, got <{0}>")]
    LanguageDatatype(String),
}

/// An absolute IRI, validated syntactically only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, TermError> {
        let value = value.into();
        validate_iri(&value)?;
        Ok(Self(value))
    }

    pub(crate) fn new_unchecked(value: impl Into<String>) -> Self {
        Self(value.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

fn validate_iri(value: &str) -> Result<(), TermError> {
    let err = |reason| Err(TermError::InvalidIri(value.to_owned(), reason));
    if value.is_empty() {
        return err("empty");
    }
    // Characters excluded from IRIREF by the N-Triples grammar.
    if let Some(c) = value.chars().find(|&c| {
        c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
    }) {
        return if c.is_whitespace() {
            err("contains whitespace")
        } else {
            err("contains a forbidden character")
        };
    }
    let Some(colon) = value.find(':') else {
        return err("not absolute (missing scheme)");
    };
    let scheme = &value[..colon];
    let mut chars = scheme.chars();
    let valid_scheme = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    if !valid_scheme {
        return err("invalid scheme");
    }
    Ok(())
}

pub(crate) fn is_valid_language(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let Some(primary) = parts.next() else {
        return false;
    };
    !primary.is_empty()
        && primary.bytes().all(|b| b.is_ascii_lowercase())
        && parts.all(|p| {
            !p.is_empty() && p.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit())
        })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    language: Option<String>,
}

impl Literal {
    /// A plain literal, typed `xsd:string`.
    pub fn string(lexical: impl Into<String>) -> Self {
        Self {
            lexical: lexical.into(),
            datatype: Iri::new_unchecked(xsd::STRING),
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Self {
            lexical: lexical.into(),
            datatype,
            language: None,
        }
    }

    /// A language-tagged string. The tag is lowercased before validation.
    pub fn lang(lexical: impl Into<String>, language: &str) -> Result<Self, TermError> {
        let language = language.to_ascii_lowercase();
        if !is_valid_language(&language) {
            return Err(TermError::InvalidLanguage(language));
        }
        Ok(Self {
            lexical: lexical.into(),
            datatype: Iri::new_unchecked(rdf::LANG_STRING),
            language: Some(language),
        })
    }

    pub fn new(
        lexical: impl Into<String>,
        datatype: Iri,
        language: Option<&str>,
    ) -> Result<Self, TermError> {
        match language {
            Some(lang) => {
                if datatype.as_str() != rdf::LANG_STRING {
                    return Err(TermError::LanguageDatatype(datatype.into_string()));
                }
                Self::lang(lexical, lang)
            }
            None if datatype.as_str() == rdf::LANG_STRING => {
                Err(TermError::InvalidLanguage(String::new()))
            }
            None => Ok(Self::typed(lexical, datatype)),
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        super::ntriples::write_escaped(f, &self.lexical)?;
        f.write_str("\"")?;
        match &self.language {
            Some(lang) => write!(f, "@{lang}"),
            None if self.datatype.as_str() == xsd::STRING => Ok(()),
            None => write!(f, "^^{}", self.datatype),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlankNode(String);

impl BlankNode {
    pub fn new(label: impl Into<String>) -> Result<Self, TermError> {
        let label = label.into();
        if !is_valid_bnode_label(&label) {
            return Err(TermError::InvalidBlankNode(label));
        }
        Ok(Self(label))
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:{}", self.0)
    }
}

pub(crate) fn is_bnode_start(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

pub(crate) fn is_bnode_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '\u{00B7}')
}

fn is_valid_bnode_label(label: &str) -> bool {
    let mut chars = label.chars();
    chars.next().is_some_and(is_bnode_start)
        && chars.all(is_bnode_char)
        && !label.ends_with('.')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
    BlankNode(BlankNode),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::BlankNode(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => iri.fmt(f),
            Term::Literal(lit) => lit.fmt(f),
            Term::BlankNode(b) => b.fmt(f),
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

impl From<BlankNode> for Term {
    fn from(b: BlankNode) -> Self {
        Term::BlankNode(b)
    }
}

/// Subject position: an IRI or a blank node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subject {
    Iri(Iri),
    BlankNode(BlankNode),
}

impl From<Subject> for Term {
    fn from(s: Subject) -> Self {
        match s {
            Subject::Iri(i) => Term::Iri(i),
            Subject::BlankNode(b) => Term::BlankNode(b),
        }
    }
}

impl From<Iri> for Subject {
    fn from(iri: Iri) -> Self {
        Subject::Iri(iri)
    }
}

impl From<BlankNode> for Subject {
    fn from(b: BlankNode) -> Self {
        Subject::BlankNode(b)
    }
}

impl TryFrom<Term> for Subject {
    type Error = Term;

    fn try_from(term: Term) -> Result<Self, Term> {
        match term {
            Term::Iri(i) => Ok(Subject::Iri(i)),
            Term::BlankNode(b) => Ok(Subject::BlankNode(b)),
            other => Err(other),
        }
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Iri(i) => i.fmt(f),
            Subject::BlankNode(b) => b.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Subject,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<Subject>, predicate: Iri, object: impl Into<Term>) -> Self {
        Self {
            subject: subject.into(),
            predicate,
            object: object.into(),
        }
    }

    pub fn has_blank_nodes(&self) -> bool {
        matches!(self.subject, Subject::BlankNode(_)) || self.object.is_blank()
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}
