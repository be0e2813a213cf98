use std::cmp::Ordering;
use std::collections::HashSet;

use super::plan::{order, scope_ids, Compiled, Slot};
use super::value::{compare, order_terms};
use super::{FilterExpr, Query, QueryResults, VarOrTerm};
use crate::rdf::Term;
use crate::store::{IdPattern, NamedGraphId, QuadStore, TermId};

type Row = Vec<Option<TermId>>;

/// Evaluates `query` over the union of every named graph. A triple present
/// in several graphs contributes one solution.
pub fn evaluate(store: &QuadStore, query: &Query) -> QueryResults {
    run(store, query, None)
}

/// Evaluates `query` over the union of the given graphs.
pub fn evaluate_scoped(store: &QuadStore, query: &Query, scope: &[NamedGraphId]) -> QueryResults {
    run(store, query, Some(scope))
}

fn run(store: &QuadStore, query: &Query, scope: Option<&[NamedGraphId]>) -> QueryResults {
    let compiled = Compiled::new(store, query);
    let graphs = scope_ids(store, scope);
    let graphs = graphs.as_deref();
    let steps = order(store, &compiled, graphs);
    let dedup_graphs = match graphs {
        Some(gs) => gs.len() > 1,
        None => store.graph_count() > 1,
    };

    // Each filter runs right after the step that binds its last variable.
    let mut bound_after: Vec<HashSet<usize>> = Vec::with_capacity(steps.len());
    let mut bound = HashSet::new();
    for &(i, _, _) in &steps {
        for s in compiled.patterns[i] {
            if let Slot::Var(v) = s {
                bound.insert(v);
            }
        }
        bound_after.push(bound.clone());
    }
    let filter_step = |f: &FilterExpr| -> Option<usize> {
        let vars: Vec<usize> = f.variables().map(|v| compiled.index_of(v)).collect();
        if vars.is_empty() {
            return Some(0);
        }
        bound_after.iter().position(|b| vars.iter().all(|v| b.contains(v)))
    };
    let mut filters_at: Vec<Vec<&FilterExpr>> = vec![Vec::new(); steps.len() + 1];
    for f in &query.filters {
        match filter_step(f) {
            Some(step) if !steps.is_empty() => filters_at[step].push(f),
            _ => filters_at[steps.len()].push(f),
        }
    }

    let width = compiled.variables.len();
    let mut rows: Vec<Row> = vec![vec![None; width]];
    for (step_no, &(i, _, _)) in steps.iter().enumerate() {
        let slots = compiled.patterns[i];
        if slots.contains(&Slot::Missing) {
            rows.clear();
            break;
        }
        let mut next = Vec::new();
        let mut matches: Vec<[TermId; 3]> = Vec::new();
        for row in &rows {
            let value = |s: Slot| match s {
                Slot::Const(id) => Some(id),
                Slot::Var(v) => row[v],
                Slot::Missing => unreachable!(),
            };
            let pat = IdPattern { s: value(slots[0]), p: value(slots[1]), o: value(slots[2]), graphs };
            matches.clear();
            matches.extend(store.match_ids(&pat).map(|[s, p, o, _]| [s, p, o]));
            if dedup_graphs {
                matches.sort_unstable();
                matches.dedup();
            }
            'quad: for m in &matches {
                let mut out = row.clone();
                for (pos, s) in slots.iter().enumerate() {
                    if let Slot::Var(v) = *s {
                        match out[v] {
                            Some(existing) if existing != m[pos] => continue 'quad,
                            _ => out[v] = Some(m[pos]),
                        }
                    }
                }
                next.push(out);
            }
        }
        rows = next;
        rows.retain(|row| filters_at[step_no].iter().all(|f| passes(store, &compiled, f, row)));
        if rows.is_empty() {
            break;
        }
    }
    rows.retain(|row| filters_at[steps.len()].iter().all(|f| passes(store, &compiled, f, row)));

    let projection: Vec<usize> = query.projection.iter().map(|v| compiled.index_of(v)).collect();
    let resolve_row = |row: &Row| -> Vec<Option<Term>> {
        projection.iter().map(|&v| row[v].map(|id| store.resolve(id))).collect()
    };

    let mut results: Vec<Vec<Option<Term>>> = if query.order.is_empty() {
        let mut seen = HashSet::new();
        rows.iter()
            .filter(|row| {
                !query.distinct || seen.insert(projection.iter().map(|&v| row[v]).collect::<Vec<_>>())
            })
            .map(resolve_row)
            .collect()
    } else {
        let keys: Vec<(usize, bool)> = query
            .order
            .iter()
            .map(|k| (compiled.index_of(&k.variable), k.ascending))
            .collect();
        let mut decorated: Vec<(Vec<Option<Term>>, Vec<Option<Term>>, String)> = rows
            .iter()
            .map(|row| {
                let key_terms = keys.iter().map(|&(v, _)| row[v].map(|id| store.resolve(id))).collect();
                let projected = resolve_row(row);
                let text = row_text(&projected);
                (key_terms, projected, text)
            })
            .collect();
        decorated.sort_by(|a, b| {
            for (n, &(_, ascending)) in keys.iter().enumerate() {
                let o = order_terms(a.0[n].as_ref(), b.0[n].as_ref());
                let o = if ascending { o } else { o.reverse() };
                if o != Ordering::Equal {
                    return o;
                }
            }
            a.2.cmp(&b.2)
        });
        let mut seen = HashSet::new();
        decorated
            .into_iter()
            .filter(|(_, _, text)| !query.distinct || seen.insert(text.clone()))
            .map(|(_, projected, _)| projected)
            .collect()
    };
    results.shrink_to_fit();
    QueryResults { variables: query.projection.clone(), rows: results }
}

fn row_text(row: &[Option<Term>]) -> String {
    let cells: Vec<String> = row.iter().map(|c| c.as_ref().map_or_else(String::new, Term::to_string)).collect();
    cells.join("\t")
}

fn passes(store: &QuadStore, compiled: &Compiled, f: &FilterExpr, row: &Row) -> bool {
    let operand = |o: &VarOrTerm| -> Option<Term> {
        match o {
            VarOrTerm::Term(t) => Some(t.clone()),
            VarOrTerm::Var(v) => row[compiled.index_of(v)].map(|id| store.resolve(id)),
        }
    };
    let (left, right) = (operand(&f.left), operand(&f.right));
    compare(f.op, left.as_ref(), right.as_ref()).unwrap_or(false)
}
