//! HTTP service and command-line interface for the event knowledge graph
//! engine.

pub mod api;
pub mod cli;
pub mod config;

pub use api::router;
