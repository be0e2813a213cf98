//! Canonical resource registry.
//!
//! Resolves external references (Wikipedia labels, Wikidata and DBpedia
//! URIs) to `oekg-r:` resources and mints identifiers for resources that
//! have none yet.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::term::is_valid_language;
use crate::rdf::vocab::{ns, owl};
use crate::rdf::{iri, Iri, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error("no resource registered for {0}")]
    NotFound(ExternalRef),
    #[error("{reference} is already bound to {existing}, refusing to rebind to {requested}")]
    AliasConflict {
        reference: ExternalRef,
        existing: ResourceId,
        requested: ResourceId,
    },
    #[error("invalid external reference: {0}")]
    InvalidRef(String),
    #[error("invalid resource id {0:?}")]
    InvalidResource(String),
    #[error("registry line {line}: {message}")]
    Tsv { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefSource {
    WikipediaLabel,
    WikidataUri,
    DbpediaUri,
}

impl RefSource {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::WikipediaLabel => "wikipedia-label",
            Self::WikidataUri => "wikidata-uri",
            Self::DbpediaUri => "dbpedia-uri",
        }
    }

    pub fn is_uri(self) -> bool {
        !matches!(self, Self::WikipediaLabel)
    }
}

impl FromStr for RefSource {
    type Err = LinkError;

    fn from_str(s: &str) -> Result<Self, LinkError> {
        match s {
            "wikipedia-label" => Ok(Self::WikipediaLabel),
            "wikidata-uri" => Ok(Self::WikidataUri),
            "dbpedia-uri" => Ok(Self::DbpediaUri),
            other => Err(LinkError::InvalidRef(format!("unknown source {other:?}"))),
        }
    }
}

impl fmt::Display for RefSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A reference to a real-world object in some external knowledge base.
///
/// Wikipedia labels are stored with spaces unified to underscores, so
/// `"Barack Obama"` and `"Barack_Obama"` name the same reference.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExternalRef {
    source: RefSource,
    language: Option<String>,
    value: String,
}

impl ExternalRef {
    pub fn new(source: RefSource, language: Option<&str>, value: &str) -> Result<Self, LinkError> {
        let value = value.trim();
        if value.is_empty() {
            return Err(LinkError::InvalidRef("empty value".into()));
        }
        let language = match (source, language) {
            (RefSource::WikipediaLabel, Some(lang)) => {
                let lang = lang.to_ascii_lowercase();
                if !is_valid_language(&lang) {
                    return Err(LinkError::InvalidRef(format!("invalid language {lang:?}")));
                }
                Some(lang)
            }
            (RefSource::WikipediaLabel, None) => {
                return Err(LinkError::InvalidRef("wikipedia-label requires a language".into()));
            }
            (_, Some(lang)) if !lang.is_empty() => {
                return Err(LinkError::InvalidRef(format!(
                    "{source} references take no language (got {lang:?})"
                )));
            }
            (_, _) => None,
        };
        let value = match source {
            RefSource::WikipediaLabel => value.replace(' ', "_"),
            _ => {
                Iri::new(value).map_err(|e| LinkError::InvalidRef(e.to_string()))?;
                value.to_owned()
            }
        };
        Ok(Self { source, language, value })
    }

    /// An English-or-other Wikipedia label reference.
    pub fn label(language: &str, label: &str) -> Result<Self, LinkError> {
        Self::new(RefSource::WikipediaLabel, Some(language), label)
    }

    pub fn source(&self) -> RefSource {
        self.source
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    pub fn value(&self) -> &str {
        &self.value
    }
}

impl fmt::Display for ExternalRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.language {
            Some(lang) => write!(f, "{}:{}:{}", self.source, lang, self.value),
            None => write!(f, "{}:{}", self.source, self.value),
        }
    }
}

/// A canonical resource under the `oekg-r:` namespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResourceId {
    local: String,
}

impl ResourceId {
    pub fn new(local: &str) -> Result<Self, LinkError> {
        if local.is_empty() || Iri::new(format!("{}{local}", ns::OEKG_R)).is_err() {
            return Err(LinkError::InvalidResource(local.to_owned()));
        }
        Ok(Self { local: local.to_owned() })
    }

    /// Accepts a bare local name, an `oekg-r:` prefixed name, or a full IRI
    /// in the resource namespace.
    pub fn parse(text: &str) -> Result<Self, LinkError> {
        let text = text.trim();
        let text = text.strip_prefix('<').and_then(|t| t.strip_suffix('>')).unwrap_or(text);
        let local = text
            .strip_prefix(ns::OEKG_R)
            .or_else(|| text.strip_prefix("oekg-r:"))
            .unwrap_or(text);
        Self::new(local)
    }

    pub fn from_iri(iri: &Iri) -> Option<Self> {
        iri.as_str().strip_prefix(ns::OEKG_R).and_then(|l| Self::new(l).ok())
    }

    pub fn local(&self) -> &str {
        &self.local
    }

    pub fn iri(&self) -> Iri {
        Iri::new_unchecked(format!("{}{}", ns::OEKG_R, self.local))
    }
}

impl fmt::Display for ResourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "oekg-r:{}", self.local)
    }
}

impl serde::Serialize for ResourceId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.iri().as_str())
    }
}

/// Width of minted numeric locals.
const MINT_WIDTH: usize = 10;

#[derive(Debug, Clone, Default)]
pub struct LinkRegistry {
    links: HashMap<ExternalRef, ResourceId>,
    known: HashSet<ResourceId>,
    next: u64,
}

impl LinkRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn get_id(&self, reference: &ExternalRef) -> Result<ResourceId, LinkError> {
        self.links
            .get(reference)
            .cloned()
            .ok_or_else(|| LinkError::NotFound(reference.clone()))
    }

    /// Mints a resource id that has never been handed out or registered.
    pub fn mint_resource(&mut self) -> ResourceId {
        loop {
            self.next += 1;
            let id = ResourceId { local: format!("{:0width$}", self.next, width = MINT_WIDTH) };
            if self.known.insert(id.clone()) {
                return id;
            }
        }
    }

    /// Marks a local as taken without linking any reference to it.
    pub fn reserve(&mut self, id: &ResourceId) {
        self.known.insert(id.clone());
    }

    /// Binds `reference` to `id`. For URI references the matching
    /// `owl:sameAs` triple is returned so callers can store it.
    pub fn register_alias(
        &mut self,
        reference: ExternalRef,
        id: ResourceId,
    ) -> Result<Option<Triple>, LinkError> {
        if let Some(existing) = self.links.get(&reference) {
            if *existing != id {
                return Err(LinkError::AliasConflict {
                    reference,
                    existing: existing.clone(),
                    requested: id,
                });
            }
        }
        let same_as = reference.source.is_uri().then(|| {
            Triple::new(id.iri(), iri(owl::SAME_AS), Iri::new_unchecked(reference.value.clone()))
        });
        self.known.insert(id.clone());
        self.links.insert(reference, id);
        Ok(same_as)
    }

    /// Returns the linked id, minting and registering one when absent.
    /// The flag reports whether a mint happened.
    pub fn resolve_or_mint(&mut self, reference: &ExternalRef) -> (ResourceId, bool, Option<Triple>) {
        if let Ok(id) = self.get_id(reference) {
            return (id, false, None);
        }
        let id = self.mint_resource();
        let same_as = self
            .register_alias(reference.clone(), id.clone())
            .expect("fresh reference cannot conflict");
        (id, true, same_as)
    }

    /// All registrations, sorted for stable output.
    pub fn entries(&self) -> Vec<(&ExternalRef, &ResourceId)> {
        let mut entries: Vec<_> = self.links.iter().collect();
        entries.sort();
        entries
    }

    /// Loads `source<TAB>language<TAB>value<TAB>local` rows. Lines starting
    /// with `#` and a leading `source` header row are skipped. Returns the
    /// `owl:sameAs` triples of URI-shaped references.
    pub fn load_tsv(&mut self, text: &str) -> Result<Vec<Triple>, LinkError> {
        let mut staged = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.first() == Some(&"source") {
                continue;
            }
            let err = |message: String| LinkError::Tsv { line: lineno, message };
            let [source, language, value, local] = fields[..] else {
                return Err(err(format!("expected 4 tab-separated fields, got {}", fields.len())));
            };
            let source: RefSource = source.parse().map_err(|e: LinkError| err(e.to_string()))?;
            let language = (!language.is_empty()).then_some(language);
            let reference =
                ExternalRef::new(source, language, value).map_err(|e| err(e.to_string()))?;
            let id = ResourceId::parse(local).map_err(|e| err(e.to_string()))?;
            staged.push((lineno, reference, id));
        }
        // Validate every row before mutating.
        let mut trial = self.links.clone();
        for (lineno, reference, id) in &staged {
            match trial.get(reference) {
                Some(existing) if existing != id => {
                    return Err(LinkError::Tsv {
                        line: *lineno,
                        message: format!("{reference} already bound to {existing}"),
                    });
                }
                _ => {
                    trial.insert(reference.clone(), id.clone());
                }
            }
        }
        let mut same_as = Vec::new();
        for (_, reference, id) in staged {
            same_as.extend(self.register_alias(reference, id)?);
        }
        Ok(same_as)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("source\tlanguage\tvalue\tlocal\n");
        for (reference, id) in self.entries() {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                reference.source,
                reference.language.as_deref().unwrap_or(""),
                reference.value,
                id.local
            ));
        }
        out
    }
}
