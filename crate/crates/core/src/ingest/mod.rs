//! Dataset adapters: source records in, schema-conformant triples out.
//!
//! Every adapter produces a [`Batch`] for one named graph. Entity
//! references in the sources are resolved through the [`LinkRegistry`];
//! a record that fails is reported and the rest of the batch continues.
//! Writing a batch into a store is left to the caller, so runs can be
//! validated before anything is uploaded.

mod annotate;
mod clicks;
mod descriptor;
mod news;
mod places;
mod qa;
mod sentiment;
mod tabular;

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linker::{ExternalRef, LinkError, LinkRegistry, RefSource, ResourceId};
use crate::rdf::{Iri, PrefixTable, Triple};
use crate::schema::{SchemaError, SchemaRegistry};
use crate::store::{NamedGraphId, QuadStore};

pub use annotate::{annotate_mentions, Gazetteer, Mention};
pub use clicks::{click_relations, ClickRelation, LanguageScore};
pub use descriptor::{AdapterKind, ColumnMapping, DatasetDescriptor, KeyLink, TabularSpec, ValueKind};
pub use news::{news_articles, NewsArticleDoc};
pub use places::{places, PlaceDescription, PlaceDoc};
pub use qa::{qa_pairs, QAPair};
pub use sentiment::{score_sentiment, tokenize, EmotionAnnotation, InvalidScore, Lexicon};
pub use tabular::tabular;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("descriptor line {line}: {message}")]
    Descriptor { line: usize, message: String },
    #[error("mapping error: {0}")]
    Mapping(String),
    #[error("{file} line {line}: {message}")]
    Resource { file: String, line: usize, message: String },
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

/// Why one source record was skipped.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecordFault {
    #[error("score {score} for language {language:?} is outside [0, 1]")]
    ScoreOutOfRange { language: String, score: f64 },
    #[error("more than one score for language {0:?}")]
    DuplicateLanguage(String),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordError {
    /// 1-based record number (line or data row) in the source.
    pub record: usize,
    pub message: String,
}

impl RecordError {
    pub fn new(record: usize, fault: impl fmt::Display) -> Self {
        Self { record, message: fault.to_string() }
    }
}

/// Counts describing one adapter run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IngestReport {
    pub graph: String,
    pub records: usize,
    pub cells_linked: usize,
    pub resources_minted: usize,
    pub triples_emitted: usize,
    /// Quads actually added to the store; set when the batch is applied.
    pub inserted: usize,
    pub errors: Vec<RecordError>,
}

/// The output of an adapter run.
#[derive(Debug, Clone)]
pub struct Batch {
    pub graph: NamedGraphId,
    pub triples: Vec<Triple>,
    /// `owl:sameAs` statements for external URIs that were minted a
    /// resource during the run. Callers store them in the links graph.
    pub links: Vec<Triple>,
    pub report: IngestReport,
}

/// Graph that holds `owl:sameAs` statements created by entity linking.
pub const LINKS_GRAPH: &str = "links";

impl Batch {
    pub(crate) fn new(graph: &NamedGraphId) -> Self {
        Self {
            graph: graph.clone(),
            triples: Vec::new(),
            links: Vec::new(),
            report: IngestReport { graph: graph.name().to_owned(), ..Default::default() },
        }
    }

    /// Appends one record's triples, keeping the emitted count in step.
    pub(crate) fn emit(&mut self, triples: Vec<Triple>) {
        self.report.triples_emitted += triples.len();
        self.triples.extend(triples);
    }

    pub(crate) fn fail(&mut self, record: usize, fault: impl fmt::Display) {
        self.report.errors.push(RecordError::new(record, fault));
    }

    /// Inserts the batch into `store` and returns the report with the
    /// inserted count filled in.
    pub fn apply(mut self, store: &mut QuadStore) -> IngestReport {
        self.report.inserted = store.insert_quads(&self.triples, &self.graph);
        if !self.links.is_empty() {
            let links = NamedGraphId::new(LINKS_GRAPH).expect("valid graph name");
            store.insert_quads(&self.links, &links);
        }
        self.report
    }
}

/// A reference to an entity in source data: either a canonical resource or
/// an external reference resolved through the registry.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(try_from = "RefRepr")]
pub enum EntityRef {
    Resource(ResourceId),
    External(ExternalRef),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RefRepr {
    Text(String),
    Object { source: RefSource, language: Option<String>, value: String },
}

impl TryFrom<RefRepr> for EntityRef {
    type Error = LinkError;

    fn try_from(repr: RefRepr) -> Result<Self, LinkError> {
        match repr {
            RefRepr::Text(text) => EntityRef::parse(&text, &PrefixTable::default()),
            RefRepr::Object { source, language, value } => {
                ExternalRef::new(source, language.as_deref(), &value).map(EntityRef::External)
            }
        }
    }
}

impl EntityRef {
    /// Parses the textual forms used in source files:
    ///
    /// - `oekg-r:local` or a full IRI in the resource namespace
    /// - `wikipedia-label:<lang>:<label>`
    /// - a Wikidata or DBpedia IRI, bare, in angle brackets or prefixed
    ///   (`dbr:World_War_I`)
    pub fn parse(text: &str, prefixes: &PrefixTable) -> Result<Self, LinkError> {
        let text = text.trim();
        if let Some(rest) = text.strip_prefix("wikipedia-label:") {
            let (lang, label) = rest
                .split_once(':')
                .ok_or_else(|| LinkError::InvalidRef(format!("expected wikipedia-label:<lang>:<label>, got {text:?}")))?;
            return ExternalRef::label(lang, label).map(EntityRef::External);
        }
        let unbracketed = text.strip_prefix('<').and_then(|t| t.strip_suffix('>'));
        let iri = match unbracketed {
            Some(inner) => Iri::new(inner).map_err(|e| LinkError::InvalidRef(e.to_string()))?,
            None => match prefixes.expand_curie(text) {
                Ok(iri) => iri,
                Err(_) => Iri::new(text).map_err(|e| LinkError::InvalidRef(e.to_string()))?,
            },
        };
        if let Some(id) = ResourceId::from_iri(&iri) {
            return Ok(EntityRef::Resource(id));
        }
        let source = if iri.as_str().contains("wikidata.org/") {
            RefSource::WikidataUri
        } else if iri.as_str().contains("dbpedia.org/") {
            RefSource::DbpediaUri
        } else {
            return Err(LinkError::InvalidRef(format!(
                "{iri} is neither an oekg-r resource nor a Wikidata or DBpedia URI"
            )));
        };
        ExternalRef::new(source, None, iri.as_str()).map(EntityRef::External)
    }

    /// The canonical resource, if the reference is already linked.
    pub fn resolve(&self, registry: &LinkRegistry) -> Result<ResourceId, LinkError> {
        match self {
            EntityRef::Resource(id) => Ok(id.clone()),
            EntityRef::External(r) => registry.get_id(r),
        }
    }
}

impl fmt::Display for EntityRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityRef::Resource(id) => id.fmt(f),
            EntityRef::External(r) => r.fmt(f),
        }
    }
}

/// Loads a `surface<TAB>entity` gazetteer. Entities use the
/// [`EntityRef::parse`] forms and must already be linked.
pub fn load_gazetteer(
    text: &str,
    registry: &LinkRegistry,
    prefixes: &PrefixTable,
) -> Result<Gazetteer, IngestError> {
    let mut g = Gazetteer::new();
    for (line, fields) in tsv_rows(text) {
        let err = |message: String| IngestError::Resource { file: "gazetteer".into(), line, message };
        let [surface, entity] = fields[..] else {
            return Err(err(format!("expected 2 tab-separated fields, got {}", fields.len())));
        };
        let id = EntityRef::parse(entity, prefixes)
            .and_then(|r| r.resolve(registry))
            .map_err(|e| err(e.to_string()))?;
        g.insert(surface, id);
    }
    Ok(g)
}

/// Loads a `token<TAB>score` lexicon.
pub fn load_lexicon(text: &str) -> Result<Lexicon, IngestError> {
    let mut lexicon = Lexicon::new();
    for (line, fields) in tsv_rows(text) {
        let err = |message: String| IngestError::Resource { file: "lexicon".into(), line, message };
        let [token, score] = fields[..] else {
            return Err(err(format!("expected 2 tab-separated fields, got {}", fields.len())));
        };
        let score: i64 = score.trim().parse().map_err(|_| err(format!("bad score {score:?}")))?;
        lexicon.insert(token.trim(), score).map_err(|e| err(e.to_string()))?;
    }
    Ok(lexicon)
}

fn tsv_rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i + 1, l.split('\t').collect()))
}

/// Parses JSON Lines records. Lines that fail to parse become record
/// errors; blank lines are skipped but still counted for numbering.
pub fn parse_jsonl<T: serde::de::DeserializeOwned>(text: &str) -> (Vec<(usize, T)>, Vec<RecordError>) {
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(record) => records.push((idx + 1, record)),
            Err(e) => errors.push(RecordError::new(idx + 1, e)),
        }
    }
    (records, errors)
}

/// Checks that every predicate an adapter may emit is declared.
pub(crate) fn require_schema(schema: &SchemaRegistry, properties: &[&'static str]) -> Result<(), IngestError> {
    let iris: Vec<Iri> = properties.iter().map(|p| crate::rdf::iri(p)).collect();
    schema.require_properties(&iris)?;
    Ok(())
}

/// Registers a generated resource so minting never reuses its name.
pub(crate) fn generated(registry: &mut LinkRegistry, local: &str) -> Result<ResourceId, RecordFault> {
    let id = ResourceId::new(local)?;
    registry.reserve(&id);
    Ok(id)
}
