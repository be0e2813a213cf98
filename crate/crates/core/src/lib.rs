//! Event knowledge graph integration engine.
//!
//! Datasets are linked to canonical resource URIs, turned into triples,
//! and uploaded as named graphs into one indexed quad store that answers a
//! SPARQL subset over the union of all graphs.

pub mod rdf;
pub mod store;
pub mod linker;
pub mod schema;
pub mod query;
pub mod ingest;
pub mod engine;
