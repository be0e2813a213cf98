//! Greedy join ordering.
//!
//! Each step picks the pattern that shares a variable with what is already
//! bound and has the lowest estimated cardinality. Estimates count the rows
//! matching a pattern's constants (capped), then shrink for every variable
//! that earlier steps have bound.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{Query, TriplePattern, VarOrTerm, Variable};
use crate::rdf::PrefixTable;
use crate::store::{AccessPath, IdPattern, NamedGraphId, QuadStore, TermId};

const ESTIMATE_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanStep {
    pub pattern: TriplePattern,
    /// The index the lookup for this step reads.
    pub index: AccessPath,
    /// Estimated rows produced per input solution.
    pub estimate: usize,
}

/// The evaluation order chosen for a query's patterns.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
}

impl Plan {
    pub fn uses_full_scan(&self) -> bool {
        self.steps.iter().any(|s| s.index.is_full_scan())
    }

    /// One line per step: position, pattern, index and estimate.
    pub fn render(&self, prefixes: Option<&PrefixTable>) -> String {
        let mut out = String::new();
        for (i, step) in self.steps.iter().enumerate() {
            let _ = writeln!(
                out,
                "{}. {}  [{}] est={}",
                i + 1,
                step.pattern.render(prefixes),
                step.index,
                step.estimate
            );
        }
        out
    }
}

/// A pattern position resolved against the store dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Slot {
    Var(usize),
    Const(TermId),
    /// A constant the store has never seen; the pattern matches nothing.
    Missing,
}

pub(crate) struct Compiled {
    pub variables: Vec<Variable>,
    pub patterns: Vec<[Slot; 3]>,
}

impl Compiled {
    pub fn new(store: &QuadStore, query: &Query) -> Self {
        let mut compiled = Self { variables: Vec::new(), patterns: Vec::new() };
        for tp in &query.patterns {
            let slots = tp.positions().map(|p| match p {
                VarOrTerm::Var(v) => Slot::Var(compiled.slot(v)),
                VarOrTerm::Term(t) => store.lookup(t).map_or(Slot::Missing, Slot::Const),
            });
            compiled.patterns.push(slots);
        }
        for v in query
            .projection
            .iter()
            .chain(query.filters.iter().flat_map(|f| f.variables()))
            .chain(query.order.iter().map(|k| &k.variable))
        {
            compiled.slot(v);
        }
        compiled
    }

    pub fn slot(&mut self, v: &Variable) -> usize {
        match self.variables.iter().position(|x| x == v) {
            Some(i) => i,
            None => {
                self.variables.push(v.clone());
                self.variables.len() - 1
            }
        }
    }

    pub fn index_of(&self, v: &Variable) -> usize {
        self.variables.iter().position(|x| x == v).expect("compiled variable")
    }
}

/// Picks the evaluation order for `compiled` patterns. Returns pattern
/// indexes in order, with the access path and estimate of each step.
pub(crate) fn order(
    store: &QuadStore,
    compiled: &Compiled,
    graphs: Option<&[TermId]>,
) -> Vec<(usize, AccessPath, usize)> {
    let base: Vec<usize> = compiled
        .patterns
        .iter()
        .map(|slots| {
            if slots.contains(&Slot::Missing) {
                return 0;
            }
            let constant = |s: Slot| match s {
                Slot::Const(id) => Some(id),
                _ => None,
            };
            let pat = IdPattern {
                s: constant(slots[0]),
                p: constant(slots[1]),
                o: constant(slots[2]),
                graphs,
            };
            store.count_ids_capped(&pat, ESTIMATE_CAP)
        })
        .collect();

    let mut bound: BTreeSet<usize> = BTreeSet::new();
    let mut remaining: Vec<usize> = (0..compiled.patterns.len()).collect();
    let mut steps = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let vars_of = |i: usize| {
            compiled.patterns[i].iter().filter_map(|s| match s {
                Slot::Var(v) => Some(*v),
                _ => None,
            })
        };
        let estimate = |i: usize| {
            let slots = &compiled.patterns[i];
            let mut e = base[i];
            for (pos, s) in slots.iter().enumerate() {
                if let Slot::Var(v) = s {
                    if bound.contains(v) {
                        e /= if pos == 0 { 100 } else { 10 };
                    }
                }
            }
            if base[i] > 0 {
                e.max(1)
            } else {
                0
            }
        };
        let any_connected = remaining.iter().any(|&i| vars_of(i).any(|v| bound.contains(&v)));
        let (pick_pos, &pick) = remaining
            .iter()
            .enumerate()
            .min_by_key(|&(_, &i)| {
                let connected = vars_of(i).any(|v| bound.contains(&v));
                (any_connected && !connected, estimate(i), i)
            })
            .expect("non-empty");
        let slots = compiled.patterns[pick];
        let is_bound = |s: Slot| match s {
            Slot::Var(v) => bound.contains(&v),
            _ => true,
        };
        let path = AccessPath::choose(
            is_bound(slots[0]),
            is_bound(slots[1]),
            is_bound(slots[2]),
            graphs.is_some(),
        );
        steps.push((pick, path, estimate(pick)));
        remaining.remove(pick_pos);
        bound.extend(vars_of(pick));
    }
    steps
}

/// Graph ids for a scope. `None` means the union of all graphs.
pub(crate) fn scope_ids(store: &QuadStore, scope: Option<&[NamedGraphId]>) -> Option<Vec<TermId>> {
    scope.map(|gs| store.graph_ids(gs))
}

/// The plan [`super::evaluate`] would run for `query`.
pub fn explain(store: &QuadStore, query: &Query) -> Plan {
    explain_inner(store, query, None)
}

/// The plan for `query` restricted to the given graphs.
pub fn explain_scoped(store: &QuadStore, query: &Query, scope: &[NamedGraphId]) -> Plan {
    explain_inner(store, query, Some(scope))
}

fn explain_inner(store: &QuadStore, query: &Query, scope: Option<&[NamedGraphId]>) -> Plan {
    let compiled = Compiled::new(store, query);
    let graphs = scope_ids(store, scope);
    let steps = order(store, &compiled, graphs.as_deref())
        .into_iter()
        .map(|(i, index, estimate)| PlanStep { pattern: query.patterns[i].clone(), index, estimate })
        .collect();
    Plan { steps }
}
