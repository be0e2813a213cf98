//! RDF terms, prefixes, and the N-Triples exchange format.

pub mod ntriples;
pub mod prefix;
pub mod term;
pub mod vocab;

pub use ntriples::{parse_ntriples, serialize_ntriples, ParseError};
pub use prefix::{PrefixError, PrefixTable};
pub use term::{BlankNode, Iri, Literal, Subject, Term, TermError, Triple};

/// Builds an IRI from a compile-time constant known to be valid.
pub fn iri(value: &'static str) -> Iri {
    Iri::new(value).expect("static IRI constant is valid")
}
