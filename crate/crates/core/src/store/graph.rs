use std::fmt;

use thiserror::Error;

use crate::rdf::vocab::ns;
use crate::rdf::{Iri, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid graph name {0:?}: expected [A-Za-z0-9_+-]+")]
pub struct InvalidGraphName(pub String);

/// A named graph under the `oekg-g:` namespace, identified by its short name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NamedGraphId {
    name: String,
    iri: Iri,
}

impl NamedGraphId {
    pub fn new(name: &str) -> Result<Self, InvalidGraphName> {
        let valid = !name.is_empty()
            && name
                .bytes()
                .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'+' | b'-'));
        if !valid {
            return Err(InvalidGraphName(name.to_owned()));
        }
        Ok(Self {
            name: name.to_owned(),
            iri: Iri::new_unchecked(format!("{}{name}", ns::OEKG_G)),
        })
    }

    /// Recovers the graph id from its full IRI.
    pub fn from_iri(iri: &Iri) -> Result<Self, InvalidGraphName> {
        match iri.as_str().strip_prefix(ns::OEKG_G) {
            Some(name) => Self::new(name),
            None => Err(InvalidGraphName(iri.as_str().to_owned())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn iri(&self) -> &Iri {
        &self.iri
    }
}

impl fmt::Display for NamedGraphId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quad {
    pub triple: Triple,
    pub graph: NamedGraphId,
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.triple;
        write!(f, "{} {} {} {} .", t.subject, t.predicate, t.object, self.graph.iri)
    }
}
