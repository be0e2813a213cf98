//! Random BGP queries and a brute-force nested-loop reference evaluator.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use oekg_core::query::{evaluate, parse_query};
use oekg_core::rdf::{PrefixTable, Term, Triple};
use oekg_core::store::{NamedGraphId, QuadStore};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{Pool, XSD_INTEGER, XSD_STRING};

#[derive(Debug, Clone)]
pub enum Slot {
    Var(usize),
    Const(Term),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Case {
    pub store: QuadStore,
    pub patterns: Vec<[Slot; 3]>,
    pub projection: Vec<usize>,
    pub distinct: bool,
    pub filter: Option<(Slot, Op, Slot)>,
    pub order: Vec<(usize, bool)>,
}

fn render(slot: &Slot) -> String {
    match slot {
        Slot::Var(v) => format!("?v{v}"),
        Slot::Const(Term::Literal(l)) if l.datatype().as_str() == XSD_INTEGER => l.lexical().to_owned(),
        Slot::Const(t) => t.to_string(),
    }
}

impl Case {
    pub fn random(rng: &mut StdRng, pool: &Pool) -> Self {
        let graphs: Vec<NamedGraphId> = ["g0", "g1", "g2"].iter().map(|g| NamedGraphId::new(g).unwrap()).collect();
        let mut store = QuadStore::new();
        for _ in 0..rng.gen_range(20..=200) {
            store.insert_quads(&[pool.triple(rng)], graphs.choose(rng).unwrap());
        }
        // Variables 0..3 join subjects and objects; variable 3 only ever
        // stands for predicates, so most generated joins are satisfiable.
        let vars = rng.gen_range(1..=3);
        let var = |rng: &mut StdRng| Slot::Var(rng.gen_range(0..vars));
        let n = rng.gen_range(1..=4);
        let mut patterns = Vec::with_capacity(n);
        for i in 0..n {
            let s = if i == 0 || rng.gen_bool(0.85) {
                var(rng)
            } else {
                let iris: Vec<_> = pool.subjects.iter().filter_map(|s| Term::from(s.clone()).as_iri().cloned()).collect();
                Slot::Const(iris.choose(rng).unwrap().clone().into())
            };
            let p = if rng.gen_bool(0.2) { Slot::Var(3) } else { Slot::Const(pool.predicates.choose(rng).unwrap().clone().into()) };
            let o = match (&s, rng.gen_bool(0.8)) {
                (Slot::Var(v), true) if vars > 1 => Slot::Var((v + rng.gen_range(1..vars)) % vars),
                _ => Slot::Const(pool.objects.choose(rng).unwrap().clone()),
            };
            patterns.push([s, p, o]);
        }
        let used: Vec<usize> = patterns
            .iter()
            .flatten()
            .filter_map(|s| match s {
                Slot::Var(v) => Some(*v),
                Slot::Const(_) => None,
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut projection: Vec<usize> = used.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
        if projection.is_empty() && !used.is_empty() {
            projection.push(*used.choose(rng).unwrap());
        }
        projection.shuffle(rng);
        let ops = [Op::Eq, Op::Ne, Op::Lt, Op::Le, Op::Gt, Op::Ge];
        let filter = (!used.is_empty() && rng.gen_bool(0.6)).then(|| {
            let left = Slot::Var(*used.choose(rng).unwrap());
            let right = if rng.gen_bool(0.5) {
                Slot::Var(*used.choose(rng).unwrap())
            } else {
                Slot::Const(pool.objects.choose(rng).unwrap().clone())
            };
            (left, *ops.choose(rng).unwrap(), right)
        });
        let order = if !used.is_empty() && rng.gen_bool(0.5) {
            (0..rng.gen_range(1..=2)).map(|_| (*used.choose(rng).unwrap(), rng.gen_bool(0.5))).collect()
        } else {
            Vec::new()
        };
        Self { store, patterns, projection, distinct: rng.gen_bool(0.4), filter, order }
    }

    pub fn text(&self) -> String {
        let mut q = String::from("SELECT ");
        if self.distinct {
            q.push_str("DISTINCT ");
        }
        for v in &self.projection {
            q.push_str(&format!("?v{v} "));
        }
        q.push_str("WHERE {\n");
        for [s, p, o] in &self.patterns {
            q.push_str(&format!("  {} {} {} .\n", render(s), render(p), render(o)));
        }
        if let Some((l, op, r)) = &self.filter {
            let op = match op {
                Op::Eq => "=",
                Op::Ne => "!=",
                Op::Lt => "<",
                Op::Le => "<=",
                Op::Gt => ">",
                Op::Ge => ">=",
            };
            q.push_str(&format!("  FILTER({} {op} {})\n", render(l), render(r)));
        }
        q.push('}');
        if !self.order.is_empty() {
            q.push_str("\nORDER BY");
            for (v, asc) in &self.order {
                q.push_str(&if *asc { format!(" ASC(?v{v})") } else { format!(" DESC(?v{v})") });
            }
        }
        q
    }

    /// The engine's rows, each cell in N-Triples form.
    pub fn evaluate(&self) -> Vec<Vec<String>> {
        let query = parse_query(&self.text(), &PrefixTable::default()).expect("generated query parses");
        evaluate(&self.store, &query)
            .rows
            .iter()
            .map(|row| row.iter().map(|c| c.as_ref().map_or_else(String::new, Term::to_string)).collect())
            .collect()
    }

    /// Nested loops over the set union of all graphs.
    pub fn reference(&self) -> Vec<Vec<String>> {
        let triples: Vec<Triple> = self.store.quads().map(|q| q.triple).collect::<BTreeSet<_>>().into_iter().collect();
        let mut rows: Vec<Vec<Option<Term>>> = vec![vec![None; 4]];
        for pattern in &self.patterns {
            let mut next = Vec::new();
            for row in &rows {
                for t in &triples {
                    let parts = [Term::from(t.subject.clone()), Term::from(t.predicate.clone()), t.object.clone()];
                    let mut candidate = row.clone();
                    let ok = pattern.iter().zip(parts).all(|(slot, term)| match slot {
                        Slot::Const(c) => *c == term,
                        Slot::Var(v) => match &candidate[*v] {
                            Some(bound) => *bound == term,
                            None => {
                                candidate[*v] = Some(term);
                                true
                            }
                        },
                    });
                    if ok {
                        next.push(candidate);
                    }
                }
            }
            rows = next;
        }
        if let Some((l, op, r)) = &self.filter {
            rows.retain(|row| {
                let value = |s: &Slot| match s {
                    Slot::Var(v) => row[*v].clone(),
                    Slot::Const(t) => Some(t.clone()),
                };
                holds(value(l), *op, value(r))
            });
        }
        let project = |row: &Vec<Option<Term>>| -> Vec<String> {
            self.projection.iter().map(|&v| row[v].as_ref().map_or_else(String::new, Term::to_string)).collect()
        };
        if self.order.is_empty() {
            let mut out: Vec<Vec<String>> = rows.iter().map(project).collect();
            if self.distinct {
                let mut seen = HashSet::new();
                out.retain(|r| seen.insert(r.clone()));
            }
            return out;
        }
        let mut decorated: Vec<(&Vec<Option<Term>>, Vec<String>)> = rows.iter().map(|r| (r, project(r))).collect();
        decorated.sort_by(|a, b| {
            for &(v, asc) in &self.order {
                let o = order(a.0[v].as_ref(), b.0[v].as_ref());
                let o = if asc { o } else { o.reverse() };
                if o != Ordering::Equal {
                    return o;
                }
            }
            a.1.join("\t").cmp(&b.1.join("\t"))
        });
        let mut out: Vec<Vec<String>> = decorated.into_iter().map(|(_, p)| p).collect();
        if self.distinct {
            let mut seen = HashSet::new();
            out.retain(|r| seen.insert(r.clone()));
        }
        out
    }

    /// Ok when the engine agrees with the reference: as a multiset without
    /// ORDER BY, as a sequence with it.
    pub fn check(&self) -> Result<(), String> {
        let mut got = self.evaluate();
        let mut want = self.reference();
        if self.order.is_empty() {
            got.sort();
            want.sort();
        }
        if got == want {
            Ok(())
        } else {
            Err(format!("query:\n{}\nengine: {got:?}\nreference: {want:?}", self.text()))
        }
    }
}

fn integer(t: &Term) -> Option<i64> {
    t.as_literal().filter(|l| l.datatype().as_str() == XSD_INTEGER).and_then(|l| l.lexical().parse().ok())
}

fn plain(t: &Term) -> Option<&str> {
    t.as_literal().filter(|l| l.datatype().as_str() == XSD_STRING).map(|l| l.lexical())
}

fn holds(left: Option<Term>, op: Op, right: Option<Term>) -> bool {
    let (Some(l), Some(r)) = (left, right) else { return false };
    let ordering = match (integer(&l), integer(&r), plain(&l), plain(&r)) {
        (Some(a), Some(b), _, _) => a.cmp(&b),
        (_, _, Some(a), Some(b)) => a.cmp(b),
        _ => {
            return match op {
                Op::Eq => l == r,
                Op::Ne => l != r,
                _ => false,
            }
        }
    };
    match op {
        Op::Eq => ordering == Ordering::Equal,
        Op::Ne => ordering != Ordering::Equal,
        Op::Lt => ordering == Ordering::Less,
        Op::Le => ordering != Ordering::Greater,
        Op::Gt => ordering == Ordering::Greater,
        Op::Ge => ordering != Ordering::Less,
    }
}

fn order(a: Option<&Term>, b: Option<&Term>) -> Ordering {
    fn rank(t: Option<&Term>) -> (u8, u8) {
        match t {
            None => (0, 0),
            Some(Term::BlankNode(_)) => (1, 0),
            Some(Term::Iri(_)) => (2, 0),
            Some(t) if integer(t).is_some() => (3, 0),
            Some(_) => (3, 2),
        }
    }
    match (a, b) {
        (Some(Term::BlankNode(x)), Some(Term::BlankNode(y))) => x.label().cmp(y.label()),
        (Some(Term::Iri(x)), Some(Term::Iri(y))) => x.as_str().cmp(y.as_str()),
        (Some(x), Some(y)) if integer(x).is_some() && integer(y).is_some() => integer(x).cmp(&integer(y)),
        (Some(Term::Literal(x)), Some(Term::Literal(y))) if rank(a) == rank(b) => {
            (x.lexical(), x.datatype().as_str(), x.language()).cmp(&(y.lexical(), y.datatype().as_str(), y.language()))
        }
        _ => rank(a).cmp(&rank(b)),
    }
}
