use serde_json::{json, Value};

use super::Variable;
use crate::rdf::Term;

/// Solutions of a query, one row per solution with cells in projection
/// order. `None` marks an unbound variable.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QueryResults {
    pub variables: Vec<Variable>,
    pub rows: Vec<Vec<Option<Term>>>,
}

impl QueryResults {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The column of `name`, if projected.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name() == name)
    }

    /// Tab-separated values: a `?var` header line, then one line per row
    /// with cells in N-Triples syntax. Unbound cells are empty.
    pub fn to_tsv(&self) -> String {
        let mut out = self.variables.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\t");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> =
                row.iter().map(|c| c.as_ref().map_or_else(String::new, Term::to_string)).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }

    /// `{"variables": [...], "rows": [[cell or null, ...], ...]}` with cells
    /// in N-Triples syntax.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|c| c.as_ref().map_or(Value::Null, |t| Value::String(t.to_string())))
                        .collect(),
                )
            })
            .collect();
        json!({
            "variables": self.variables.iter().map(Variable::name).collect::<Vec<_>>(),
            "rows": rows,
        })
    }
}
