//! The `oekg` command line.
//!
//! Exit codes: 0 on success, 1 when the data or the store rejects the
//! command, 2 on usage errors.

use std::io::{Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use oekg_core::engine::{Engine, EngineConfig, EngineError, UploadMode};
use oekg_core::query::QueryError;
use oekg_core::store::{InvalidGraphName, NamedGraphId};

use crate::config::{Config, ConfigError, DEFAULT_DATA_DIR, DEFAULT_LISTEN, DEFAULT_MAX_BODY_BYTES};

#[derive(Debug, Parser)]
#[command(name = "oekg", version, about = "Event knowledge graph integration engine")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Directory holding the quad log and the registry.
    #[arg(long, global = true, value_name = "DIR")]
    pub data_dir: Option<PathBuf>,
    /// Reject every mutation.
    #[arg(long, global = true)]
    pub read_only: bool,
    /// Address the service binds to.
    #[arg(long, global = true, value_name = "ADDR")]
    pub listen: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Extend,
    Replace,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the HTTP service.
    Serve,
    /// Run a dataset descriptor: link, create, upload.
    Ingest { descriptor: PathBuf },
    /// Evaluate a query read from a file, or from stdin with `-`.
    Query {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
        /// Restrict the default graph; repeatable.
        #[arg(long = "graph", value_name = "NAME")]
        graphs: Vec<String>,
        /// Print the evaluation plan instead of the results.
        #[arg(long)]
        explain: bool,
    },
    /// Print triple counts per graph.
    Stats,
    /// Load `source<TAB>language<TAB>value<TAB>local` registry rows.
    LoadRegistry { tsv: PathBuf },
    /// Load a schema document; any malformed line rejects it.
    LoadSchema {
        nt: PathBuf,
        #[arg(long, default_value = "schema")]
        graph: String,
    },
    /// Upload an N-Triples file into a graph.
    Upload {
        nt: PathBuf,
        #[arg(long)]
        graph: String,
        #[arg(long, value_enum, default_value = "extend")]
        mode: Mode,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error("{0}")]
    Graph(#[from] InvalidGraphName),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid listen address {0:?}")]
    Listen(String),
    #[error("server: {0}")]
    Serve(std::io::Error),
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

struct Settings {
    engine: EngineConfig,
    listen: String,
    max_body_bytes: usize,
}

fn settings(cli: &Cli) -> Result<Settings, CliError> {
    let file = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let data_dir = cli.data_dir.clone().or(file.data_dir).unwrap_or_else(|| PathBuf::from(DEFAULT_DATA_DIR));
    Ok(Settings {
        engine: EngineConfig {
            data_dir: Some(data_dir),
            bootstrap_registry: file.registry,
            prefix_file: file.prefixes,
            read_only: cli.read_only || file.read_only.unwrap_or(false),
        },
        listen: cli.listen.clone().or(file.listen).unwrap_or_else(|| DEFAULT_LISTEN.to_owned()),
        max_body_bytes: file.max_body_bytes.unwrap_or(DEFAULT_MAX_BODY_BYTES),
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(io)?;
        return Ok(text);
    }
    std::fs::read_to_string(path).map_err(io)
}

fn json_line(out: &mut impl Write, value: &impl serde::Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("serialisable");
    writeln!(out, "{text}").map_err(|source| CliError::Io { path: "<stdout>".into(), source })
}

pub fn run(cli: Cli, out: &mut impl Write) -> Result<(), CliError> {
    let settings = settings(&cli)?;
    let engine = Engine::open(&settings.engine)?;
    let stdout_err = |source| CliError::Io { path: "<stdout>".into(), source };
    match cli.command {
        Command::Serve => serve(engine, &settings.listen, settings.max_body_bytes),
        Command::Ingest { descriptor } => json_line(out, &engine.ingest_file(descriptor)?),
        Command::Query { file, format, graphs, explain } => {
            let text = read(&file)?;
            let scope = graphs.iter().map(|g| NamedGraphId::new(g)).collect::<Result<Vec<_>, _>>()?;
            let scope = (!scope.is_empty()).then_some(scope.as_slice());
            if explain {
                let plan = engine.explain(&text, scope)?;
                return write!(out, "{}", plan.render(Some(engine.prefixes()))).map_err(stdout_err);
            }
            let results = engine.query(&text, scope)?;
            let body = match format {
                Format::Tsv => results.to_tsv(),
                Format::Json => format!("{}\n", results.to_json()),
            };
            out.write_all(body.as_bytes()).map_err(stdout_err)
        }
        Command::Stats => json_line(out, &engine.stats()),
        Command::LoadRegistry { tsv } => {
            let entries = engine.load_registry(&read(&tsv)?)?;
            json_line(out, &serde_json::json!({ "entries": entries }))
        }
        Command::LoadSchema { nt, graph } => {
            let delta = engine.upload_schema(&read(&nt)?, &NamedGraphId::new(&graph)?)?;
            json_line(
                out,
                &serde_json::json!({
                    "classes": delta.classes.iter().map(|c| c.as_str()).collect::<Vec<_>>(),
                    "properties": delta.properties.iter().map(|p| p.as_str()).collect::<Vec<_>>(),
                    "alignments": delta.alignments.len(),
                    "subclass_edges": delta.subclass_edges,
                    "inserted_quads": delta.inserted_quads,
                }),
            )
        }
        Command::Upload { nt, graph, mode } => {
            let mode = match mode {
                Mode::Extend => UploadMode::Extend,
                Mode::Replace => UploadMode::Replace,
            };
            json_line(out, &engine.upload(&NamedGraphId::new(&graph)?, &read(&nt)?, mode)?)
        }
    }
}

fn serve(engine: Engine, listen: &str, max_body_bytes: usize) -> Result<(), CliError> {
    let addr: SocketAddr = listen.parse().map_err(|_| CliError::Listen(listen.to_owned()))?;
    let runtime = tokio::runtime::Runtime::new().map_err(CliError::Serve)?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(CliError::Serve)?;
        eprintln!(
            "oekg listening on http://{}{}",
            listener.local_addr().map_err(CliError::Serve)?,
            if engine.is_read_only() { " (read-only)" } else { "" }
        );
        let app = crate::router(Arc::new(engine), max_body_bytes);
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(CliError::Serve)
    })
}
