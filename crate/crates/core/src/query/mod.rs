//! A SPARQL subset: `SELECT [DISTINCT]` over basic graph patterns with
//! comparison `FILTER`s and `ORDER BY`.
//!
//! Queries run over the union of all named graphs unless a graph scope is
//! given. Features outside the subset are rejected by the parser with the
//! feature's name.

mod eval;
mod parser;
mod plan;
mod results;
pub mod value;

use std::fmt;

use thiserror::Error;

use crate::rdf::{PrefixTable, Term};

pub use eval::{evaluate, evaluate_scoped};
pub use parser::parse_query;
pub use plan::{explain, explain_scoped, Plan, PlanStep};
pub use results::QueryResults;

/// A query variable. Variables introduced by desugaring blank nodes have
/// names starting with `.`, which user variables cannot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable(String);

impl Variable {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_anonymous(&self) -> bool {
        self.0.starts_with('.')
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VarOrTerm {
    Var(Variable),
    Term(Term),
}

impl VarOrTerm {
    pub fn as_var(&self) -> Option<&Variable> {
        match self {
            Self::Var(v) => Some(v),
            Self::Term(_) => None,
        }
    }

    fn render(&self, prefixes: Option<&PrefixTable>) -> String {
        match (self, prefixes) {
            (Self::Var(v), _) => v.to_string(),
            (Self::Term(Term::Iri(i)), Some(p)) => p.compact_iri(i),
            (Self::Term(t), _) => t.to_string(),
        }
    }
}

impl From<Variable> for VarOrTerm {
    fn from(v: Variable) -> Self {
        Self::Var(v)
    }
}

impl From<Term> for VarOrTerm {
    fn from(t: Term) -> Self {
        Self::Term(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: VarOrTerm,
    pub predicate: VarOrTerm,
    pub object: VarOrTerm,
}

impl TriplePattern {
    pub fn positions(&self) -> [&VarOrTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.positions().into_iter().filter_map(VarOrTerm::as_var)
    }

    /// Renders the pattern, compacting IRIs when a prefix table is given.
    pub fn render(&self, prefixes: Option<&PrefixTable>) -> String {
        format!(
            "{} {} {}",
            self.subject.render(prefixes),
            self.predicate.render(prefixes),
            self.object.render(prefixes)
        )
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(None))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            Self::Eq => "=",
            Self::Ne => "!=",
            Self::Lt => "<",
            Self::Le => "<=",
            Self::Gt => ">",
            Self::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FilterExpr {
    pub op: CompareOp,
    pub left: VarOrTerm,
    pub right: VarOrTerm,
}

impl FilterExpr {
    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        [&self.left, &self.right].into_iter().filter_map(VarOrTerm::as_var)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderKey {
    pub variable: Variable,
    pub ascending: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub projection: Vec<Variable>,
    pub distinct: bool,
    pub patterns: Vec<TriplePattern>,
    pub filters: Vec<FilterExpr>,
    pub order: Vec<OrderKey>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        offset: usize,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown prefix {prefix:?} at line {line}, column {column}")]
    UnknownPrefix {
        prefix: String,
        line: usize,
        column: usize,
    },
    #[error("unsupported SPARQL feature: {feature} (line {line}, column {column})")]
    Unsupported {
        feature: String,
        line: usize,
        column: usize,
    },
}
