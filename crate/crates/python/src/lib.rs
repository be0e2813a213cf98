//! The `oekg` Python module: an [`Engine`] with query, upload, linking and
//! ingestion. Reports come back as plain dicts.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use oekg_core::engine::{self, EngineConfig, EngineError, UploadMode};
use oekg_core::linker::{ExternalRef, LinkError, RefSource};
use oekg_core::query::QueryError;
use oekg_core::store::NamedGraphId;

create_exception!(oekg, OekgError, PyException, "Store, log or ingestion failure.");
create_exception!(oekg, ReadOnlyError, OekgError, "Mutation attempted on a read-only engine.");
create_exception!(oekg, QueryFailed, PyValueError, "Query text rejected by the parser.");

fn query_err(e: QueryError) -> PyErr {
    QueryFailed::new_err(e.to_string())
}

fn link_err(e: LinkError) -> PyErr {
    match e {
        LinkError::NotFound(_) => PyKeyError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn engine_err(e: EngineError) -> PyErr {
    match e {
        EngineError::Query(q) => query_err(q),
        EngineError::Link(l) => link_err(l),
        EngineError::ReadOnly => ReadOnlyError::new_err(e.to_string()),
        _ => OekgError::new_err(e.to_string()),
    }
}

fn graph(name: &str) -> PyResult<NamedGraphId> {
    NamedGraphId::new(name).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn to_py<'py>(py: Python<'py>, value: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match value {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, to_py(py, v)?)?;
            }
            dict.into_any()
        }
    })
}

fn report<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(value).map_err(|e| OekgError::new_err(e.to_string()))?)
}

/// An integration engine. Memory-only unless `data_dir` is given.
#[pyclass(frozen, module = "oekg")]
struct Engine {
    inner: engine::Engine,
}

#[pymethods]
impl Engine {
    #[new]
    #[pyo3(signature = (data_dir=None, registry=None, prefixes=None, read_only=false))]
    fn new(
        py: Python<'_>,
        data_dir: Option<PathBuf>,
        registry: Option<PathBuf>,
        prefixes: Option<PathBuf>,
        read_only: bool,
    ) -> PyResult<Self> {
        let config = EngineConfig { data_dir, bootstrap_registry: registry, prefix_file: prefixes, read_only };
        let inner = py.detach(|| engine::Engine::open(&config)).map_err(engine_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn read_only(&self) -> bool {
        self.inner.is_read_only()
    }

    /// Uploads N-Triples into `graph`; `mode` is "extend" or "replace".
    #[pyo3(signature = (graph, text, mode="extend"))]
    fn upload<'py>(&self, py: Python<'py>, graph: &str, text: &str, mode: &str) -> PyResult<Bound<'py, PyAny>> {
        let graph = self::graph(graph)?;
        let mode: UploadMode = mode.parse().map_err(|e: <UploadMode as std::str::FromStr>::Err| PyValueError::new_err(e.to_string()))?;
        let r = py.detach(|| self.inner.upload(&graph, text, mode)).map_err(engine_err)?;
        report(py, &r)
    }

    /// Adds a schema document; returns the number of quads inserted.
    #[pyo3(signature = (text, graph="schema"))]
    fn upload_schema(&self, py: Python<'_>, text: &str, graph: &str) -> PyResult<usize> {
        let graph = self::graph(graph)?;
        let delta = py.detach(|| self.inner.upload_schema(text, &graph)).map_err(engine_err)?;
        Ok(delta.inserted_quads)
    }

    /// Loads registry rows; returns how many were read.
    fn load_registry(&self, py: Python<'_>, text: &str) -> PyResult<usize> {
        py.detach(|| self.inner.load_registry(text)).map_err(engine_err)
    }

    /// The local id bound to an external reference. Raises KeyError when
    /// nothing is registered.
    #[pyo3(signature = (value, language=None, source="wikipedia-label"))]
    fn get_id(&self, value: &str, language: Option<&str>, source: &str) -> PyResult<String> {
        let source: RefSource = source.parse().map_err(|e: LinkError| PyValueError::new_err(e.to_string()))?;
        let reference = ExternalRef::new(source, language, value).map_err(link_err)?;
        Ok(self.inner.get_id(&reference).map_err(link_err)?.local().to_owned())
    }

    /// Evaluates a query; returns {"variables": [...], "rows": [[...]]}
    /// with cells in N-Triples syntax and None for unbound ones.
    #[pyo3(signature = (text, graphs=None))]
    fn query<'py>(&self, py: Python<'py>, text: &str, graphs: Option<Vec<String>>) -> PyResult<Bound<'py, PyAny>> {
        let scope = scope(graphs)?;
        let results = py.detach(|| self.inner.query(text, scope.as_deref())).map_err(query_err)?;
        to_py(py, &results.to_json())
    }

    /// Evaluates a query and renders it as tab-separated values.
    #[pyo3(signature = (text, graphs=None))]
    fn query_tsv(&self, py: Python<'_>, text: &str, graphs: Option<Vec<String>>) -> PyResult<String> {
        let scope = scope(graphs)?;
        let results = py.detach(|| self.inner.query(text, scope.as_deref())).map_err(query_err)?;
        Ok(results.to_tsv())
    }

    /// The evaluation plan of a query.
    fn explain(&self, text: &str) -> PyResult<String> {
        let plan = self.inner.explain(text, None).map_err(query_err)?;
        Ok(plan.render(Some(self.inner.prefixes())))
    }

    /// Runs a dataset descriptor file.
    fn ingest<'py>(&self, py: Python<'py>, descriptor: PathBuf) -> PyResult<Bound<'py, PyAny>> {
        let r = py.detach(|| self.inner.ingest_file(&descriptor)).map_err(engine_err)?;
        report(py, &r)
    }

    /// Triples per graph and their total.
    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        report(py, &self.inner.stats())
    }
}

fn scope(graphs: Option<Vec<String>>) -> PyResult<Option<Vec<NamedGraphId>>> {
    graphs.map(|g| g.iter().map(|n| graph(n)).collect()).transpose()
}

#[pymodule]
fn oekg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Engine>()?;
    m.add("OekgError", m.py().get_type::<OekgError>())?;
    m.add("ReadOnlyError", m.py().get_type::<ReadOnlyError>())?;
    m.add("QueryFailed", m.py().get_type::<QueryFailed>())?;
    Ok(())
}
