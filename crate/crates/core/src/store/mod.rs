//! In-process quad store with named-graph isolation.
//!
//! Quads are interned to `[subject, predicate, object, graph]` id rows and
//! kept in three persistent ordered indexes (G-S-P-O, G-P-O-S, P-O-S-G).
//! Cloning a store is O(1); clones share structure and diverge on write,
//! which is what gives readers stable snapshots.

mod dictionary;
mod graph;
pub mod log;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use imbl::{OrdMap, OrdSet};

use crate::rdf::{BlankNode, Subject, Term, Triple};

pub(crate) use dictionary::Dictionary;
pub use dictionary::TermId;
pub use graph::{InvalidGraphName, NamedGraphId, Quad};

const S: usize = 0;
const P: usize = 1;
const O: usize = 2;
const G: usize = 3;

type Row = [TermId; 4];

/// Which named graphs a pattern ranges over.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum GraphSelector {
    #[default]
    Any,
    One(NamedGraphId),
    Set(Vec<NamedGraphId>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QuadPattern {
    pub subject: Option<Term>,
    pub predicate: Option<Term>,
    pub object: Option<Term>,
    pub graph: GraphSelector,
}

/// A pattern over interned ids; `graphs: None` ranges over every graph.
#[derive(Debug, Clone, Default)]
pub(crate) struct IdPattern<'a> {
    pub s: Option<TermId>,
    pub p: Option<TermId>,
    pub o: Option<TermId>,
    pub graphs: Option<&'a [TermId]>,
}

/// The index and prefix a lookup uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessPath {
    /// G-S-P-O prefix of the given length, repeated per graph when the
    /// graph is not fixed by the pattern.
    Gspo { prefix: usize, per_graph: bool },
    /// G-P-O-S prefix; `per_predicate` fans out over known predicates.
    Gpos { prefix: usize, per_graph: bool, per_predicate: bool },
    /// P-O-S-G prefix; `per_predicate` fans out over known predicates.
    Posg { prefix: usize, per_predicate: bool },
    FullScan,
}

impl AccessPath {
    /// Chooses the index for the given bound positions.
    pub fn choose(s: bool, p: bool, o: bool, graph_fixed: bool) -> Self {
        if graph_fixed {
            return if s {
                Self::Gspo { prefix: 2 + usize::from(p) + usize::from(p && o), per_graph: false }
            } else if p {
                Self::Gpos { prefix: 2 + usize::from(o), per_graph: false, per_predicate: false }
            } else if o {
                Self::Gpos { prefix: 3, per_graph: false, per_predicate: true }
            } else {
                Self::Gspo { prefix: 1, per_graph: false }
            };
        }
        match (s, p, o) {
            (_, true, true) => Self::Posg { prefix: 2 + usize::from(s), per_predicate: false },
            (true, true, false) => Self::Gspo { prefix: 3, per_graph: true },
            (false, true, false) => Self::Posg { prefix: 1, per_predicate: false },
            (true, false, _) => Self::Gspo { prefix: 2, per_graph: true },
            (false, false, true) => Self::Posg { prefix: 2, per_predicate: true },
            (false, false, false) => Self::FullScan,
        }
    }

    pub fn is_full_scan(&self) -> bool {
        matches!(self, Self::FullScan)
    }
}

impl fmt::Display for AccessPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const GSPO: [&str; 4] = ["g", "s", "p", "o"];
        const GPOS: [&str; 4] = ["g", "p", "o", "s"];
        const POSG: [&str; 4] = ["p", "o", "s", "g"];
        let (name, cols, prefix, fanout) = match *self {
            Self::Gspo { prefix, per_graph } => {
                ("GSPO", GSPO, prefix, per_graph.then_some(" per graph"))
            }
            Self::Gpos { prefix, per_graph, per_predicate } => (
                "GPOS",
                GPOS,
                prefix,
                if per_predicate {
                    Some(" per predicate")
                } else {
                    per_graph.then_some(" per graph")
                },
            ),
            Self::Posg { prefix, per_predicate } => {
                ("POSG", POSG, prefix, per_predicate.then_some(" per predicate"))
            }
            Self::FullScan => return f.write_str("full scan"),
        };
        write!(f, "{name}({})", cols[..prefix].join(","))?;
        if let Some(fanout) = fanout {
            f.write_str(fanout)?;
        }
        Ok(())
    }
}

#[derive(Clone, Default)]
pub struct QuadStore {
    dict: Dictionary,
    gspo: OrdSet<Row>,
    gpos: OrdSet<Row>,
    posg: OrdSet<Row>,
    graph_counts: OrdMap<TermId, usize>,
    predicate_counts: OrdMap<TermId, usize>,
    total: usize,
    next_blank: u64,
}

impl fmt::Debug for QuadStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadStore")
            .field("total", &self.total)
            .field("graphs", &self.graph_counts.len())
            .finish()
    }
}

impl QuadStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `triples` into `graph`, returning how many quads were new.
    ///
    /// Blank node labels are replaced by labels never used before in this
    /// store, consistently within the call.
    pub fn insert_quads(&mut self, triples: &[Triple], graph: &NamedGraphId) -> usize {
        self.insert_collect(triples, graph).len()
    }

    /// Like [`insert_quads`](Self::insert_quads) but returns the newly
    /// stored triples, after blank node renaming.
    pub fn insert_collect(&mut self, triples: &[Triple], graph: &NamedGraphId) -> Vec<Triple> {
        let mut renames: HashMap<String, BlankNode> = HashMap::new();
        let mut fresh = |b: &BlankNode, next: &mut u64| -> BlankNode {
            renames
                .entry(b.label().to_owned())
                .or_insert_with(|| {
                    let label = format!("b{next}");
                    *next += 1;
                    BlankNode::new(label).expect("generated label is valid")
                })
                .clone()
        };
        let mut next = self.next_blank;
        let renamed: Vec<Triple> = triples
            .iter()
            .map(|t| {
                if !t.has_blank_nodes() {
                    return t.clone();
                }
                let subject = match &t.subject {
                    Subject::BlankNode(b) => Subject::BlankNode(fresh(b, &mut next)),
                    s => s.clone(),
                };
                let object = match &t.object {
                    Term::BlankNode(b) => Term::BlankNode(fresh(b, &mut next)),
                    o => o.clone(),
                };
                Triple { subject, predicate: t.predicate.clone(), object }
            })
            .collect();
        self.next_blank = next;
        self.insert_exact(&renamed, graph)
    }

    /// Inserts without renaming blank nodes; used when replaying a log.
    pub(crate) fn insert_exact(&mut self, triples: &[Triple], graph: &NamedGraphId) -> Vec<Triple> {
        if triples.is_empty() {
            return Vec::new();
        }
        let mut inserted = Vec::new();
        let dict = self.dict.clone();
        let mut interner = dict.interner();
        let g = interner.intern(&Term::Iri(graph.iri().clone()));
        for t in triples {
            if let Subject::BlankNode(b) = &t.subject {
                self.observe_blank(b);
            }
            if let Term::BlankNode(b) = &t.object {
                self.observe_blank(b);
            }
            let row = [
                interner.intern(&t.subject.clone().into()),
                interner.intern(&Term::Iri(t.predicate.clone())),
                interner.intern(&t.object),
                g,
            ];
            if self.add_row(row) {
                inserted.push(t.clone());
            }
        }
        inserted
    }

    // Keeps generated labels ahead of any `bN` label already stored.
    fn observe_blank(&mut self, b: &BlankNode) {
        if let Some(n) = b.label().strip_prefix('b').and_then(|n| n.parse::<u64>().ok()) {
            self.next_blank = self.next_blank.max(n.saturating_add(1));
        }
    }

    fn add_row(&mut self, row: Row) -> bool {
        if self.gspo.insert([row[G], row[S], row[P], row[O]]).is_some() {
            return false;
        }
        self.gpos.insert([row[G], row[P], row[O], row[S]]);
        self.posg.insert([row[P], row[O], row[S], row[G]]);
        *self.graph_counts.entry(row[G]).or_insert(0) += 1;
        *self.predicate_counts.entry(row[P]).or_insert(0) += 1;
        self.total += 1;
        true
    }

    /// Removes every quad of `graph`, returning how many were removed.
    pub fn delete_graph(&mut self, graph: &NamedGraphId) -> usize {
        let Some(g) = self.dict.lookup(&Term::Iri(graph.iri().clone())) else {
            return 0;
        };
        let rows: Vec<Row> = self
            .gspo
            .range([g, 0, 0, 0]..=[g, TermId::MAX, TermId::MAX, TermId::MAX])
            .copied()
            .collect();
        for &[g, s, p, o] in &rows {
            self.gspo.remove(&[g, s, p, o]);
            self.gpos.remove(&[g, p, o, s]);
            self.posg.remove(&[p, o, s, g]);
            decrement(&mut self.predicate_counts, p);
        }
        self.graph_counts.remove(&g);
        self.total -= rows.len();
        rows.len()
    }

    pub fn count(&self, graph: &NamedGraphId) -> usize {
        self.dict
            .lookup(&Term::Iri(graph.iri().clone()))
            .and_then(|g| self.graph_counts.get(&g).copied())
            .unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Per-graph quad counts, ordered by graph name.
    pub fn graph_counts(&self) -> BTreeMap<NamedGraphId, usize> {
        self.graph_counts
            .iter()
            .filter_map(|(&g, &n)| match self.dict.resolve(g) {
                Term::Iri(iri) => NamedGraphId::from_iri(&iri).ok().map(|id| (id, n)),
                _ => None,
            })
            .collect()
    }

    /// Every quad, in G-S-P-O order.
    pub fn quads(&self) -> impl Iterator<Item = Quad> + '_ {
        self.gspo.iter().map(|&[g, s, p, o]| self.quad_from_row([s, p, o, g]))
    }

    /// Quads matching every bound position of `pattern`.
    pub fn matches(&self, pattern: &QuadPattern) -> Vec<Quad> {
        let lookup = |t: &Option<Term>| -> Option<Option<TermId>> {
            match t {
                None => Some(None),
                Some(t) => self.dict.lookup(t).map(Some),
            }
        };
        let (Some(s), Some(p), Some(o)) = (
            lookup(&pattern.subject),
            lookup(&pattern.predicate),
            lookup(&pattern.object),
        ) else {
            return Vec::new();
        };
        let graph_ids: Vec<TermId>;
        let graphs = match &pattern.graph {
            GraphSelector::Any => None,
            GraphSelector::One(g) => {
                graph_ids = self.graph_ids([g]);
                Some(graph_ids.as_slice())
            }
            GraphSelector::Set(gs) => {
                graph_ids = self.graph_ids(gs);
                Some(graph_ids.as_slice())
            }
        };
        self.match_ids(&IdPattern { s, p, o, graphs })
            .map(|row| self.quad_from_row(row))
            .collect()
    }

    pub(crate) fn graph_ids<'a>(
        &self,
        graphs: impl IntoIterator<Item = &'a NamedGraphId>,
    ) -> Vec<TermId> {
        let mut ids: Vec<TermId> = graphs
            .into_iter()
            .filter_map(|g| self.dict.lookup(&Term::Iri(g.iri().clone())))
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    fn quad_from_row(&self, [s, p, o, g]: Row) -> Quad {
        self.dict.with_terms(|terms| {
            let subject = Subject::try_from(terms[s as usize].clone()).expect("subject row");
            let predicate = match &terms[p as usize] {
                Term::Iri(i) => i.clone(),
                _ => unreachable!("predicate ids always name IRIs"),
            };
            let graph = match &terms[g as usize] {
                Term::Iri(i) => NamedGraphId::from_iri(i).expect("graph ids name graphs"),
                _ => unreachable!("graph ids always name IRIs"),
            };
            Quad {
                triple: Triple { subject, predicate, object: terms[o as usize].clone() },
                graph,
            }
        })
    }

    pub(crate) fn lookup(&self, term: &Term) -> Option<TermId> {
        self.dict.lookup(term)
    }

    pub(crate) fn resolve(&self, id: TermId) -> Term {
        self.dict.resolve(id)
    }

    /// Rows `[s, p, o, g]` matching the pattern, read through an index
    /// whenever any position is bound.
    pub(crate) fn match_ids<'a>(
        &'a self,
        pat: &IdPattern<'a>,
    ) -> Box<dyn Iterator<Item = [TermId; 4]> + 'a> {
        let IdPattern { s, p, o, graphs } = *pat;
        if let Some(gs) = graphs {
            if gs.is_empty() {
                return Box::new(std::iter::empty());
            }
        }
        let path = AccessPath::choose(s.is_some(), p.is_some(), o.is_some(), graphs.is_some());
        let keep = move |row: &[TermId; 4]| {
            s.is_none_or(|v| row[S] == v)
                && p.is_none_or(|v| row[P] == v)
                && o.is_none_or(|v| row[O] == v)
                && graphs.is_none_or(|gs| gs.binary_search(&row[G]).is_ok())
        };
        let graph_list = move || -> Vec<TermId> {
            match graphs {
                Some(gs) => gs.to_vec(),
                None => self.graph_counts.keys().copied().collect(),
            }
        };
        let predicate_list = move || -> Vec<TermId> {
            match p {
                Some(p) => vec![p],
                None => self.predicate_counts.keys().copied().collect(),
            }
        };
        let iter: Box<dyn Iterator<Item = [TermId; 4]> + 'a> = match path {
            AccessPath::Gspo { prefix, .. } => Box::new(graph_list().into_iter().flat_map(move |g| {
                range(&self.gspo, [Some(g), s, p, o], prefix).map(|[g, s, p, o]| [s, p, o, g])
            })),
            AccessPath::Gpos { prefix, .. } => Box::new(graph_list().into_iter().flat_map(move |g| {
                predicate_list().into_iter().flat_map(move |p| {
                    range(&self.gpos, [Some(g), Some(p), o, s], prefix)
                        .map(|[g, p, o, s]| [s, p, o, g])
                })
            })),
            AccessPath::Posg { prefix, .. } => Box::new(predicate_list().into_iter().flat_map(
                move |p| {
                    range(&self.posg, [Some(p), o, s, None], prefix).map(|[p, o, s, g]| [s, p, o, g])
                },
            )),
            AccessPath::FullScan => Box::new(self.gspo.iter().map(|&[g, s, p, o]| [s, p, o, g])),
        };
        Box::new(iter.filter(keep))
    }

    /// Counts rows matching the pattern, stopping at `cap`.
    pub(crate) fn count_ids_capped(&self, pat: &IdPattern<'_>, cap: usize) -> usize {
        if pat.s.is_none() && pat.o.is_none() && pat.graphs.is_none() {
            return match pat.p {
                Some(p) => self.predicate_counts.get(&p).copied().unwrap_or(0),
                None => self.total,
            };
        }
        self.match_ids(pat).take(cap).count()
    }

    pub(crate) fn graph_count(&self) -> usize {
        self.graph_counts.len()
    }
}

fn decrement(map: &mut OrdMap<TermId, usize>, key: TermId) {
    if let Some(n) = map.get_mut(&key) {
        *n -= 1;
        if *n == 0 {
            map.remove(&key);
        }
    }
}

/// Rows of `index` whose first `prefix` columns equal the bound `key` values.
fn range<'a>(
    index: &'a OrdSet<Row>,
    key: [Option<TermId>; 4],
    prefix: usize,
) -> impl Iterator<Item = Row> + 'a {
    let mut lo = [0; 4];
    let mut hi = [TermId::MAX; 4];
    for i in 0..prefix {
        let v = key[i].expect("prefix columns are bound");
        lo[i] = v;
        hi[i] = v;
    }
    index.range(lo..=hi).copied()
}
