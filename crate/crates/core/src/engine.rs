//! The integration engine: one quad store, its schema registry and the
//! link registry behind a concurrency-safe facade.
//!
//! Readers take an immutable [`Snapshot`]; they never block writers and
//! never observe a partial write. Writes are serialised, appended to the
//! quad log when the engine has a data directory, and then published by
//! swapping in the new snapshot.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};
use serde::Serialize;
use thiserror::Error;

use crate::ingest::{DatasetDescriptor, IngestError, IngestReport, LINKS_GRAPH};
use crate::linker::{ExternalRef, LinkError, LinkRegistry, ResourceId};
use crate::query::{self, Plan, Query, QueryError, QueryResults};
use crate::rdf::{parse_ntriples, ParseError, PrefixError, PrefixTable, Triple};
use crate::schema::{SchemaDelta, SchemaError, SchemaRegistry, BASE_SCHEMA, BASE_SCHEMA_GRAPH};
use crate::store::log::{LogError, QuadLog};
use crate::store::{NamedGraphId, QuadStore};

pub const LOG_FILE: &str = "quads.log";
pub const REGISTRY_FILE: &str = "registry.tsv";
pub const SCHEMA_FILE: &str = "base_schema.nt";
pub const PREFIX_FILE: &str = "prefixes.tsv";

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("the engine is read-only")]
    ReadOnly,
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Log(#[from] LogError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error("prefix table: {0}")]
    Prefix(#[from] PrefixError),
    #[error("schema document has {} malformed line(s); first at line {}: {}", .0.len(), .0[0].line, .0[0].message)]
    MalformedSchema(Vec<ParseError>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UploadMode {
    /// Add to the graph; triples already present are skipped.
    #[default]
    Extend,
    /// Drop the graph, then load the document, as one atomic step.
    Replace,
}

impl std::str::FromStr for UploadMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "extend" => Ok(Self::Extend),
            "replace" => Ok(Self::Replace),
            _ => Err(format!("mode must be 'extend' or 'replace', got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UploadReport {
    pub graph: String,
    pub inserted: usize,
    pub deleted: usize,
    pub parse_errors: Vec<ParseError>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub graphs: std::collections::BTreeMap<String, usize>,
    pub total: usize,
}

#[derive(Debug, Clone, Default)]
pub struct EngineConfig {
    /// Holds the quad log, the registry, and optional schema and prefix
    /// overrides. Without one the engine is memory-only.
    pub data_dir: Option<PathBuf>,
    /// Registry TSV loaded at startup in addition to the data directory's.
    pub bootstrap_registry: Option<PathBuf>,
    /// Replaces the default prefix table.
    pub prefix_file: Option<PathBuf>,
    pub read_only: bool,
}

#[derive(Clone)]
struct State {
    store: QuadStore,
    schema: SchemaRegistry,
}

/// An immutable view of the store and schema at one point in time.
#[derive(Clone)]
pub struct Snapshot(Arc<State>);

impl Snapshot {
    pub fn store(&self) -> &QuadStore {
        &self.0.store
    }

    pub fn schema(&self) -> &SchemaRegistry {
        &self.0.schema
    }
}

pub struct Engine {
    state: RwLock<Arc<State>>,
    writer: Mutex<Option<QuadLog>>,
    registry: RwLock<LinkRegistry>,
    prefixes: PrefixTable,
    data_dir: Option<PathBuf>,
    read_only: bool,
}

impl Engine {
    /// A memory-only engine holding the base schema.
    pub fn in_memory() -> Self {
        Self::open(&EngineConfig::default()).expect("memory-only startup cannot fail")
    }

    /// Opens the data directory (creating it when missing), replays the
    /// quad log, loads registries and makes sure the base schema is present.
    pub fn open(config: &EngineConfig) -> Result<Self, EngineError> {
        let prefixes = match &config.prefix_file {
            Some(path) => PrefixTable::from_tsv(&read(path)?)?,
            None => match &config.data_dir {
                Some(dir) if dir.join(PREFIX_FILE).exists() => PrefixTable::from_tsv(&read(&dir.join(PREFIX_FILE))?)?,
                _ => PrefixTable::default(),
            },
        };
        let mut store = QuadStore::new();
        let mut log = None;
        let mut registry = LinkRegistry::new();
        let mut link_triples = Vec::new();
        if let Some(dir) = &config.data_dir {
            fs::create_dir_all(dir).map_err(|source| EngineError::Io { path: dir.clone(), source })?;
            log = Some(QuadLog::open(dir.join(LOG_FILE), &mut store)?);
            let saved = dir.join(REGISTRY_FILE);
            if saved.exists() {
                link_triples.extend(registry.load_tsv(&read(&saved)?)?);
            }
        }
        if let Some(path) = &config.bootstrap_registry {
            link_triples.extend(registry.load_tsv(&read(path)?)?);
        }
        // Resource names already used in the store are never minted again.
        for quad in store.quads() {
            for term in [Some(quad.triple.subject.clone().into()), Some(quad.triple.object.clone())]
                .into_iter()
                .flatten()
            {
                if let crate::rdf::Term::Iri(i) = term {
                    if let Some(id) = ResourceId::from_iri(&i) {
                        registry.reserve(&id);
                    }
                }
            }
        }
        let schema = SchemaRegistry::from_store(&store);
        let engine = Self {
            state: RwLock::new(Arc::new(State { store, schema })),
            writer: Mutex::new(log),
            registry: RwLock::new(registry),
            prefixes,
            data_dir: config.data_dir.clone(),
            read_only: false,
        };

        let schema_graph = NamedGraphId::new(BASE_SCHEMA_GRAPH).expect("valid graph name");
        if engine.snapshot().store().count(&schema_graph) == 0 {
            let text = match &config.data_dir {
                Some(dir) if dir.join(SCHEMA_FILE).exists() => read(&dir.join(SCHEMA_FILE))?,
                _ => BASE_SCHEMA.to_owned(),
            };
            engine.upload_schema(&text, &schema_graph)?;
        }
        if !link_triples.is_empty() {
            engine.write(|state| {
                let links = NamedGraphId::new(LINKS_GRAPH).expect("valid graph name");
                Ok((vec![(links.clone(), state.store.insert_collect(&link_triples, &links))], Vec::new(), ()))
            })?;
        }
        engine.save_registry()?;
        Ok(Self { read_only: config.read_only, ..engine })
    }

    pub fn prefixes(&self) -> &PrefixTable {
        &self.prefixes
    }

    pub fn is_read_only(&self) -> bool {
        self.read_only
    }

    pub fn data_dir(&self) -> Option<&Path> {
        self.data_dir.as_deref()
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot(self.state.read().clone())
    }

    /// Runs `f` on a private copy of the state, logs the changes it
    /// reports, then publishes the copy. `f` returns the triples it added
    /// per graph, the graphs it dropped (logged first), and a result.
    fn write<R>(
        &self,
        f: impl FnOnce(&mut State) -> Result<(Vec<(NamedGraphId, Vec<Triple>)>, Vec<NamedGraphId>, R), EngineError>,
    ) -> Result<R, EngineError> {
        let mut log = self.writer.lock();
        let mut next = (**self.state.read()).clone();
        let (added, dropped, result) = f(&mut next)?;
        if let Some(log) = log.as_mut() {
            for g in &dropped {
                log.append_dropped(g)?;
            }
            for (g, triples) in &added {
                if !triples.is_empty() {
                    log.append_added(g, triples)?;
                }
            }
        }
        *self.state.write() = Arc::new(next);
        Ok(result)
    }

    fn check_writable(&self) -> Result<(), EngineError> {
        if self.read_only {
            Err(EngineError::ReadOnly)
        } else {
            Ok(())
        }
    }

    /// Parses an N-Triples document and loads its valid lines into `graph`.
    /// Malformed lines are reported and skipped. Schema statements in the
    /// document must keep the class hierarchy acyclic.
    pub fn upload(&self, graph: &NamedGraphId, text: &str, mode: UploadMode) -> Result<UploadReport, EngineError> {
        self.check_writable()?;
        let (triples, parse_errors) = parse_ntriples(text);
        self.upload_triples(graph, &triples, mode, parse_errors)
    }

    pub fn upload_triples(
        &self,
        graph: &NamedGraphId,
        triples: &[Triple],
        mode: UploadMode,
        parse_errors: Vec<ParseError>,
    ) -> Result<UploadReport, EngineError> {
        self.check_writable()?;
        let (inserted, deleted) = self.write(|state| {
            let mut dropped = Vec::new();
            let mut deleted = 0;
            let base_schema = match mode {
                UploadMode::Extend => state.schema.clone(),
                UploadMode::Replace => {
                    deleted = state.store.delete_graph(graph);
                    if deleted > 0 {
                        dropped.push(graph.clone());
                        SchemaRegistry::from_store(&state.store)
                    } else {
                        state.schema.clone()
                    }
                }
            };
            state.schema = base_schema.extended(triples, graph)?;
            let added = state.store.insert_collect(triples, graph);
            let inserted = added.len();
            Ok((vec![(graph.clone(), added)], dropped, (inserted, deleted)))
        })?;
        Ok(UploadReport { graph: graph.name().to_owned(), inserted, deleted, parse_errors })
    }

    /// Loads a schema document. Unlike [`Engine::upload`] a malformed line
    /// rejects the whole document.
    pub fn upload_schema(&self, text: &str, graph: &NamedGraphId) -> Result<SchemaDelta, EngineError> {
        self.check_writable()?;
        let (triples, errors) = parse_ntriples(text);
        if !errors.is_empty() {
            return Err(EngineError::MalformedSchema(errors));
        }
        self.write(|state| {
            let mut schema = state.schema.clone();
            let mut delta = schema.upload(&mut QuadStore::new(), &triples, graph)?;
            let added = state.store.insert_collect(&triples, graph);
            delta.inserted_quads = added.len();
            state.schema = schema;
            Ok((vec![(graph.clone(), added)], Vec::new(), delta))
        })
    }

    /// Removes a graph, returning how many quads it held.
    pub fn drop_graph(&self, graph: &NamedGraphId) -> Result<usize, EngineError> {
        self.check_writable()?;
        self.write(|state| {
            let deleted = state.store.delete_graph(graph);
            if deleted == 0 {
                return Ok((Vec::new(), Vec::new(), 0));
            }
            state.schema = SchemaRegistry::from_store(&state.store);
            Ok((Vec::new(), vec![graph.clone()], deleted))
        })
    }

    pub fn get_id(&self, reference: &ExternalRef) -> Result<ResourceId, LinkError> {
        self.registry.read().get_id(reference)
    }

    /// Registers `reference` for `id`; URI references also get an
    /// `owl:sameAs` statement in the links graph.
    pub fn register_alias(&self, reference: ExternalRef, id: ResourceId) -> Result<(), EngineError> {
        self.check_writable()?;
        let same_as = self.registry.write().register_alias(reference, id)?;
        self.store_links(same_as.into_iter().collect())?;
        self.save_registry()
    }

    /// Loads registry rows (see [`LinkRegistry::load_tsv`]). Returns the
    /// number of registry entries afterwards.
    pub fn load_registry(&self, text: &str) -> Result<usize, EngineError> {
        self.check_writable()?;
        let same_as = self.registry.write().load_tsv(text)?;
        self.store_links(same_as)?;
        self.save_registry()?;
        Ok(self.registry.read().len())
    }

    fn store_links(&self, triples: Vec<Triple>) -> Result<(), EngineError> {
        if triples.is_empty() {
            return Ok(());
        }
        let links = NamedGraphId::new(LINKS_GRAPH).expect("valid graph name");
        self.write(|state| Ok((vec![(links.clone(), state.store.insert_collect(&triples, &links))], Vec::new(), ())))
    }

    fn save_registry(&self) -> Result<(), EngineError> {
        let Some(dir) = &self.data_dir else { return Ok(()) };
        let path = dir.join(REGISTRY_FILE);
        let tmp = dir.join(format!("{REGISTRY_FILE}.tmp"));
        let text = self.registry.read().to_tsv();
        fs::write(&tmp, text)
            .and_then(|_| fs::rename(&tmp, &path))
            .map_err(|source| EngineError::Io { path, source })
    }

    pub fn registry_tsv(&self) -> String {
        self.registry.read().to_tsv()
    }

    pub fn parse_query(&self, text: &str) -> Result<Query, QueryError> {
        query::parse_query(text, &self.prefixes)
    }

    /// Evaluates a query over a snapshot, optionally restricted to some
    /// graphs.
    pub fn query(&self, text: &str, scope: Option<&[NamedGraphId]>) -> Result<QueryResults, QueryError> {
        let q = self.parse_query(text)?;
        let snapshot = self.snapshot();
        Ok(match scope {
            Some(graphs) => query::evaluate_scoped(snapshot.store(), &q, graphs),
            None => query::evaluate(snapshot.store(), &q),
        })
    }

    pub fn explain(&self, text: &str, scope: Option<&[NamedGraphId]>) -> Result<Plan, QueryError> {
        let q = self.parse_query(text)?;
        let snapshot = self.snapshot();
        Ok(match scope {
            Some(graphs) => query::explain_scoped(snapshot.store(), &q, graphs),
            None => query::explain(snapshot.store(), &q),
        })
    }

    pub fn stats(&self) -> Stats {
        let snapshot = self.snapshot();
        let graphs = snapshot
            .store()
            .graph_counts()
            .into_iter()
            .map(|(g, n)| (g.name().to_owned(), n))
            .collect();
        Stats { graphs, total: snapshot.store().total() }
    }

    /// Runs a dataset descriptor end to end: link, create, upload.
    pub fn ingest(&self, descriptor: &DatasetDescriptor) -> Result<IngestReport, EngineError> {
        self.check_writable()?;
        let snapshot = self.snapshot();
        let batch = {
            let mut registry = self.registry.write();
            descriptor.run(&mut registry, snapshot.schema(), &self.prefixes)?
        };
        let mode = if descriptor.replace { UploadMode::Replace } else { UploadMode::Extend };
        let upload = self.upload_triples(&batch.graph, &batch.triples, mode, Vec::new())?;
        self.store_links(batch.links)?;
        self.save_registry()?;
        Ok(IngestReport { inserted: upload.inserted, ..batch.report })
    }

    /// Loads and runs the descriptor file at `path`.
    pub fn ingest_file(&self, path: impl AsRef<Path>) -> Result<IngestReport, EngineError> {
        let descriptor = DatasetDescriptor::load(path, &self.prefixes)?;
        self.ingest(&descriptor)
    }
}

fn read(path: &Path) -> Result<String, EngineError> {
    fs::read_to_string(path).map_err(|source| EngineError::Io { path: path.to_path_buf(), source })
}
