//! Append-only persistence log.
//!
//! One record per line, either `A <s> <p> <o> <g> .` for an added quad or
//! `D-GRAPH <g>` for a dropped graph. Replaying the log in order rebuilds
//! the store exactly, blank node labels included.

use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{NamedGraphId, QuadStore};
use crate::rdf::ntriples::{Cursor, ParseError};
use crate::rdf::{Subject, Triple};

#[derive(Debug, Error)]
pub enum LogError {
    #[error("quad log {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("quad log {path}, line {line}: {message}")]
    Corrupt { path: PathBuf, line: usize, message: String },
}

pub struct QuadLog {
    path: PathBuf,
    writer: BufWriter<File>,
}

impl QuadLog {
    /// Replays `path` into `store` (when it exists) and opens it for appending.
    pub fn open(path: impl AsRef<Path>, store: &mut QuadStore) -> Result<Self, LogError> {
        let path = path.as_ref().to_path_buf();
        let io_err = |source| LogError::Io { path: path.clone(), source };
        if path.exists() {
            let text = std::fs::read_to_string(&path).map_err(io_err)?;
            replay(&text, store).map_err(|(line, message)| LogError::Corrupt {
                path: path.clone(),
                line,
                message,
            })?;
        }
        let file = OpenOptions::new().create(true).append(true).open(&path).map_err(io_err)?;
        Ok(Self { path, writer: BufWriter::new(file) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append_added(&mut self, graph: &NamedGraphId, triples: &[Triple]) -> Result<(), LogError> {
        for t in triples {
            writeln!(
                self.writer,
                "A {} {} {} {} .",
                t.subject,
                t.predicate,
                t.object,
                graph.iri()
            )
            .map_err(|e| self.io(e))?;
        }
        self.flush()
    }

    pub fn append_dropped(&mut self, graph: &NamedGraphId) -> Result<(), LogError> {
        writeln!(self.writer, "D-GRAPH {}", graph.iri()).map_err(|e| self.io(e))?;
        self.flush()
    }

    fn flush(&mut self) -> Result<(), LogError> {
        self.writer.flush().map_err(|e| self.io(e))
    }

    fn io(&self, source: io::Error) -> LogError {
        LogError::Io { path: self.path.clone(), source }
    }
}

fn replay(text: &str, store: &mut QuadStore) -> Result<(), (usize, String)> {
    // Consecutive adds to one graph are batched.
    let mut pending: Vec<Triple> = Vec::new();
    let mut pending_graph: Option<NamedGraphId> = None;
    let flush = |store: &mut QuadStore, pending: &mut Vec<Triple>, graph: &Option<NamedGraphId>| {
        if let Some(g) = graph {
            store.insert_exact(pending, g);
        }
        pending.clear();
    };
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("D-GRAPH ") {
            flush(store, &mut pending, &pending_graph);
            let graph = parse_graph(&mut Cursor::new(rest.trim())).map_err(|e| (lineno, e.message))?;
            store.delete_graph(&graph);
        } else if let Some(rest) = line.strip_prefix("A ") {
            let (triple, graph) = parse_added(rest).map_err(|e| (lineno, e.message))?;
            if pending_graph.as_ref() != Some(&graph) {
                flush(store, &mut pending, &pending_graph);
                pending_graph = Some(graph);
            }
            pending.push(triple);
        } else {
            return Err((lineno, "unknown record kind".into()));
        }
    }
    flush(store, &mut pending, &pending_graph);
    Ok(())
}

fn parse_added(rest: &str) -> Result<(Triple, NamedGraphId), ParseError> {
    let mut cur = Cursor::new(rest);
    cur.skip_ws();
    let subject = Subject::try_from(cur.term()?).map_err(|_| cur.error("bad subject"))?;
    cur.skip_ws();
    let predicate = cur.iri()?;
    cur.skip_ws();
    let object = cur.term()?;
    cur.skip_ws();
    let graph = parse_graph(&mut cur)?;
    cur.skip_ws();
    cur.expect('.')?;
    Ok((Triple { subject, predicate, object }, graph))
}

fn parse_graph(cur: &mut Cursor<'_>) -> Result<NamedGraphId, ParseError> {
    let iri = cur.iri()?;
    NamedGraphId::from_iri(&iri).map_err(|e| cur.error(e.to_string()))
}
