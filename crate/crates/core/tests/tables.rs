mod common;

use common::*;

#[test]
fn bit_pattern_table() {
    assert_eq!(bit_pattern_mismatches(), Vec::<String>::new());
}

#[test]
fn t4_one_collision_table() {
    assert_eq!(inference_mismatches(4, &TABLE_T4_ONE_COLLISION), Vec::<String>::new());
}

#[test]
fn t4_cc_combinations() {
    assert!(cc_combinations_match());
}

#[test]
fn t5_one_collision_table() {
    assert_eq!(inference_mismatches(5, &TABLE_T5_ONE_COLLISION), Vec::<String>::new());
}

#[test]
fn t6_ambiguous_table() {
    assert_eq!(inference_mismatches(6, &TABLE_T6_AMBIGUOUS), Vec::<String>::new());
    assert_eq!(unlisted_ambiguous(6, &TABLE_T6_AMBIGUOUS), Vec::<String>::new());
}

#[test]
fn t4_and_t5_not_sure_families() {
    use std::collections::BTreeSet;
    let sets = |t: usize| -> BTreeSet<Vec<usize>> {
        decoder(m2m_cogmac::estimators::Protocol::Method2, t)
            .not_sure_sets()
            .into_iter()
            .map(|s| s.into_iter().map(|b| b + 1).collect())
            .collect()
    };
    let want4: BTreeSet<Vec<usize>> = [vec![], vec![3, 4], vec![1, 2], vec![1, 2, 3, 4]].into();
    assert_eq!(sets(4), want4);
    let want5: BTreeSet<Vec<usize>> =
        [vec![], vec![2, 5], vec![3, 4], vec![1, 2], vec![4, 5], vec![1, 2, 3, 4, 5]].into();
    assert_eq!(sets(5), want5);
}
