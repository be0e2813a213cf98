mod common;

use std::collections::{BTreeMap, BTreeSet};

use oekg_core::rdf::Term;
use oekg_core::store::{GraphSelector, NamedGraphId, QuadPattern, QuadStore};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

fn graphs() -> Vec<NamedGraphId> {
    ["eventkg", "click", "news", "mlm"].iter().map(|g| NamedGraphId::new(g).unwrap()).collect()
}

fn recount(store: &QuadStore) -> BTreeMap<NamedGraphId, usize> {
    let mut counts = BTreeMap::new();
    for q in store.quads() {
        *counts.entry(q.graph).or_insert(0) += 1;
    }
    counts
}

#[test]
fn counters_match_a_full_recount_under_ten_thousand_operations() {
    let mut rng = StdRng::seed_from_u64(7);
    let pool = common::Pool::new();
    let graphs = graphs();
    let mut store = QuadStore::new();
    let mut expected: BTreeMap<NamedGraphId, BTreeSet<String>> = BTreeMap::new();
    for op in 0..10_000 {
        let g = graphs.choose(&mut rng).unwrap();
        if rng.gen_bool(0.05) {
            let removed = store.delete_graph(g);
            assert_eq!(removed, expected.remove(g).map_or(0, |s| s.len()));
        } else {
            // Ground triples only, so set semantics are checkable by text.
            let batch: Vec<_> = (0..rng.gen_range(1..6))
                .map(|_| pool.triple(&mut rng))
                .filter(|t| !t.has_blank_nodes())
                .collect();
            let inserted = store.insert_quads(&batch, g);
            let set = expected.entry(g.clone()).or_default();
            let before = set.len();
            set.extend(batch.iter().map(|t| t.to_string()));
            assert_eq!(inserted, set.len() - before, "op {op}");
        }
        let counts = store.graph_counts();
        assert_eq!(counts, recount(&store), "op {op}");
        assert_eq!(store.total(), counts.values().sum::<usize>(), "op {op}");
        assert_eq!(store.total(), store.quads().count(), "op {op}");
    }
}

fn term_pattern(rng: &mut StdRng, choices: &[Term]) -> Option<Term> {
    if rng.gen_bool(0.5) {
        None
    } else {
        choices.choose(rng).cloned()
    }
}

proptest! {
    #[test]
    fn matches_agree_with_a_filtered_scan(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let pool = common::Pool::new();
        let graphs = graphs();
        let mut store = QuadStore::new();
        for _ in 0..rng.gen_range(0..120) {
            let t = pool.triple(&mut rng);
            store.insert_quads(&[t], graphs.choose(&mut rng).unwrap());
        }
        let subjects: Vec<Term> = pool.subjects.iter().cloned().map(Term::from).collect();
        let predicates: Vec<Term> = pool.predicates.iter().cloned().map(Term::from).collect();
        let graph = match rng.gen_range(0..3) {
            0 => GraphSelector::Any,
            1 => GraphSelector::One(graphs.choose(&mut rng).unwrap().clone()),
            _ => GraphSelector::Set(graphs[..2].to_vec()),
        };
        let pattern = QuadPattern {
            subject: term_pattern(&mut rng, &subjects),
            predicate: term_pattern(&mut rng, &predicates),
            object: term_pattern(&mut rng, &pool.objects),
            graph,
        };
        let mut got: Vec<String> = store.matches(&pattern).iter().map(|q| format!("{} {}", q.triple, q.graph.name())).collect();
        let mut want: Vec<String> = store
            .quads()
            .filter(|q| {
                pattern.subject.as_ref().map_or(true, |s| Term::from(q.triple.subject.clone()) == *s)
                    && pattern.predicate.as_ref().map_or(true, |p| Term::from(q.triple.predicate.clone()) == *p)
                    && pattern.object.as_ref().map_or(true, |o| q.triple.object == *o)
                    && match &pattern.graph {
                        GraphSelector::Any => true,
                        GraphSelector::One(g) => q.graph == *g,
                        GraphSelector::Set(gs) => gs.contains(&q.graph),
                    }
            })
            .map(|q| format!("{} {}", q.triple, q.graph.name()))
            .collect();
        got.sort();
        want.sort();
        prop_assert_eq!(got, want);
    }
}
