mod common;

use common::oracle::Case;
use common::Pool;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

#[test]
fn thousand_random_queries_match_the_reference() {
    let pool = Pool::new();
    let mut rng = StdRng::seed_from_u64(2021);
    let cases: Vec<Case> = (0..1000).map(|_| Case::random(&mut rng, &pool)).collect();
    let failures: Vec<String> = cases.iter().filter_map(|c| c.check().err()).collect();
    assert!(failures.is_empty(), "{} of 1000 cases differ; first:\n{}", failures.len(), failures[0]);
    // The generator must produce informative cases, not mostly empty ones.
    let non_empty = cases.iter().filter(|c| !c.reference().is_empty()).count();
    let filtered = cases.iter().filter(|c| c.filter.is_some() && !c.reference().is_empty()).count();
    let ordered = cases.iter().filter(|c| !c.order.is_empty() && c.reference().len() > 1).count();
    println!("non-empty {non_empty}, filtered non-empty {filtered}, ordered multi-row {ordered}");
    assert!(non_empty > 350 && filtered > 75 && ordered > 100);
}

proptest! {
    #[test]
    fn pattern_order_does_not_change_results(seed in any::<u64>()) {
        let pool = Pool::new();
        let mut rng = StdRng::seed_from_u64(seed);
        let mut case = Case::random(&mut rng, &pool);
        case.order.clear();
        let mut before = case.evaluate();
        case.patterns.shuffle(&mut rng);
        let mut after = case.evaluate();
        before.sort();
        after.sort();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn random_queries_match_the_reference(seed in any::<u64>()) {
        let pool = Pool::new();
        let case = Case::random(&mut StdRng::seed_from_u64(seed), &pool);
        prop_assert!(case.check().is_ok(), "{}", case.check().unwrap_err());
    }
}
