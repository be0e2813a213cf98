use std::collections::BTreeMap;

use thiserror::Error;

use super::term::{Iri, TermError};
use super::vocab::ns;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrefixError {
    #[error("unknown prefix {0:?}")]
    UnknownPrefix(String),
    #[error("{0:?} is not a prefixed name")]
    NotPrefixed(String),
    #[error("invalid prefix {0:?}")]
    InvalidPrefix(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// The prefixes every table starts with, in preference order for compaction.
pub const DEFAULT_PREFIXES: &[(&str, &str)] = &[
    ("oekg-r", ns::OEKG_R),
    ("oekg-s", ns::OEKG_S),
    ("oekg-g", ns::OEKG_G),
    ("uner", ns::UNER),
    ("so", ns::SO),
    ("rdf", ns::RDF),
    ("rdfs", ns::RDFS),
    ("xs", ns::XSD),
    ("sem", ns::SEM),
    ("onyx", ns::ONYX),
    ("skos", ns::SKOS),
    ("owl", ns::OWL),
    ("dbr", ns::DBR),
    ("dbo", ns::DBO),
    // Alias of `xs`; query texts conventionally write `xsd:`.
    ("xsd", ns::XSD),
];

/// Mapping from prefix to namespace IRI.
///
/// Several prefixes may share a namespace; compaction then uses the one
/// registered first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixTable {
    by_prefix: BTreeMap<String, Iri>,
    order: Vec<String>,
}

impl Default for PrefixTable {
    fn default() -> Self {
        let mut table = Self::empty();
        for (prefix, namespace) in DEFAULT_PREFIXES {
            table
                .insert(prefix, Iri::new_unchecked(*namespace))
                .expect("default prefixes are valid");
        }
        table
    }
}

impl PrefixTable {
    pub fn empty() -> Self {
        Self {
            by_prefix: BTreeMap::new(),
            order: Vec::new(),
        }
    }

    /// Binds `prefix`, replacing any previous binding for the same prefix.
    pub fn insert(&mut self, prefix: &str, namespace: Iri) -> Result<(), PrefixError> {
        if !is_valid_prefix(prefix) {
            return Err(PrefixError::InvalidPrefix(prefix.to_owned()));
        }
        if self.by_prefix.insert(prefix.to_owned(), namespace).is_none() {
            self.order.push(prefix.to_owned());
        }
        Ok(())
    }

    pub fn get(&self, prefix: &str) -> Option<&Iri> {
        self.by_prefix.get(prefix)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Iri)> {
        self.order
            .iter()
            .map(|p| (p.as_str(), &self.by_prefix[p.as_str()]))
    }

    pub fn len(&self) -> usize {
        self.by_prefix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_prefix.is_empty()
    }

    /// Reads `prefix<TAB>namespace` lines on top of the defaults.
    pub fn from_tsv(text: &str) -> Result<Self, PrefixError> {
        let mut table = Self::default();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (prefix, namespace) = line
                .split_once('\t')
                .ok_or_else(|| PrefixError::InvalidPrefix(line.to_owned()))?;
            let prefix = prefix.trim().trim_end_matches(':');
            table.insert(prefix, Iri::new(namespace.trim())?)?;
        }
        Ok(table)
    }

    pub fn expand_curie(&self, prefixed: &str) -> Result<Iri, PrefixError> {
        let (prefix, local) = prefixed
            .split_once(':')
            .ok_or_else(|| PrefixError::NotPrefixed(prefixed.to_owned()))?;
        let namespace = self
            .by_prefix
            .get(prefix)
            .ok_or_else(|| PrefixError::UnknownPrefix(prefix.to_owned()))?;
        Ok(Iri::new(format!("{}{local}", namespace.as_str()))?)
    }

    /// Compacts against the longest matching namespace whose remainder is a
    /// valid local name; falls back to `<iri>`.
    pub fn compact_iri(&self, iri: &Iri) -> String {
        let value = iri.as_str();
        let mut best: Option<(&str, &str)> = None;
        for (prefix, namespace) in self.iter() {
            let Some(local) = value.strip_prefix(namespace.as_str()) else {
                continue;
            };
            if !is_valid_local(local) {
                continue;
            }
            let better = match best {
                None => true,
                Some((_, best_local)) => local.len() < best_local.len(),
            };
            if better {
                best = Some((prefix, local));
            }
        }
        match best {
            Some((prefix, local)) => format!("{prefix}:{local}"),
            None => format!("<{value}>"),
        }
    }
}

pub(crate) fn is_valid_prefix(prefix: &str) -> bool {
    let mut chars = prefix.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_alphabetic() => {
            chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.')) && !prefix.ends_with('.')
        }
        Some(_) => false,
    }
}

/// Local names that survive a trip through a prefixed name unchanged.
pub(crate) fn is_valid_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_alphanumeric() || c == '_' => {
            chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
                && !local.ends_with('.')
        }
        Some(_) => false,
    }
}
