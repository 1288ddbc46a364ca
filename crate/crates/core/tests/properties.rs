use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use m2m_cogmac::analysis::{
    bound_k, bound_r, expected_k, expected_m, expected_r, hash_prob, pm_distribution, pm_total, BoundParams,
    EstimationParams, MacAnalysisParams,
};
use m2m_cogmac::estimators::{run_lof, LOF_SCALE};
use m2m_cogmac::macsim::channel_counts;
use m2m_cogmac::oracle::{exact_collision_counts, nested_sum_pm, OracleBudget};

fn counts(max_types: usize, max_n: u64) -> impl Strategy<Value = Vec<u64>> {
    (2..=max_types).prop_flat_map(move |t| prop::collection::vec(0..=max_n, t))
}

fn as_f64(r: num_rational::Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hash_probabilities_sum_to_one(t in 1u32..64) {
        let s: f64 = (0..t).map(|i| hash_prob(i, t).unwrap()).sum();
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn r_never_exceeds_k(n in counts(6, 300), t in 1u32..24) {
        let p = EstimationParams::new(n, t, 5).unwrap();
        let (k, r) = (expected_k(&p), expected_r(&p));
        prop_assert!(r >= 0.0 && r <= k + 1e-12, "E[R] {r} E[K] {k}");
        prop_assert!(k <= t as f64 + 1e-12);
    }

    #[test]
    fn no_type_one_nodes_means_no_third_phase(mut n in counts(6, 300), t in 1u32..24) {
        n[0] = 0;
        let p = EstimationParams::new(n, t, 5).unwrap();
        prop_assert_eq!(expected_r(&p), 0.0);
    }

    #[test]
    fn closed_forms_match_enumeration(n in counts(3, 2), t in 1u32..=3) {
        prop_assume!(n.iter().sum::<u64>() <= 5);
        let p = EstimationParams::new(n.clone(), t, 5).unwrap();
        let (k, r) = exact_collision_counts(&n, t, &OracleBudget::default()).unwrap();
        assert_abs_diff_eq!(expected_k(&p), as_f64(k), epsilon = 1e-12);
        assert_abs_diff_eq!(expected_r(&p), as_f64(r), epsilon = 1e-12);
    }

    #[test]
    fn theorem_two_below_theorem_one(n in counts(6, 500), s in 0u32..8) {
        let n_r = *n.iter().max().unwrap();
        prop_assume!(n_r >= 1);
        let l = m2m_cogmac::ids::ceil_log2(n_r);
        prop_assume!(l + s >= 1);
        let p = EstimationParams::new(n, l + s, 5).unwrap();
        let b = BoundParams::from_params(&p).unwrap();
        prop_assert!(bound_r(&p, &b) <= bound_k(&p, &b));
    }

    #[test]
    fn bounds_hold_from_two_nodes_up(n in counts(6, 500), s in 0u32..8) {
        let n_r = *n.iter().max().unwrap();
        prop_assume!(n_r >= 2);
        let l = m2m_cogmac::ids::ceil_log2(n_r);
        let p = EstimationParams::new(n, l + s, 5).unwrap();
        let b = BoundParams::from_params(&p).unwrap();
        prop_assert!(bound_k(&p, &b) >= expected_k(&p));
        prop_assert!(bound_r(&p, &b) >= expected_r(&p));
    }

    #[test]
    fn pm_dp_matches_nested_sum(w in 0u32..=10, d in 1u32..=3, n in 1u32..=4, extra in 0u32..=2, m in 0u32..=4) {
        let p = MacAnalysisParams::new(n, n + extra, w, d).unwrap();
        prop_assume!(m <= p.max_successes());
        let dp = pm_distribution(&p)[m as usize];
        let lit = nested_sum_pm(&p, m, &OracleBudget::default()).unwrap();
        assert_abs_diff_eq!(dp, lit, epsilon = 1e-12);
    }

    #[test]
    fn pm_is_a_subprobability(w in 0u32..=60, d in 1u32..=6, n in 1u32..=30) {
        let p = MacAnalysisParams::new(n, n, w, d).unwrap();
        let pm = pm_distribution(&p);
        prop_assert!(pm.iter().all(|&x| x >= -1e-15));
        prop_assert!(pm_total(&p) <= 1.0 + 1e-12);
        prop_assert!(expected_m(&p) <= p.max_successes() as f64 + 1e-12);
    }

    #[test]
    fn channel_counts_cover_free_channels(
        n_hat in prop::array::uniform3(0.0f64..200.0),
        w in (1.0f64..5.0, 0.0f64..1.0, 0.0f64..1.0),
        m_f in 0usize..40,
    ) {
        let weights = [w.0, w.0 * (0.2 + 0.8 * w.1), w.0 * (0.2 + 0.8 * w.1) * (0.2 + 0.8 * w.2)];
        let c = channel_counts(n_hat, weights, m_f);
        prop_assert_eq!(c.iter().sum::<usize>(), m_f);
    }

    #[test]
    fn lof_estimate_doubles_per_leading_one(hashes in prop::collection::vec(0u32..12, 0..40)) {
        let run = run_lof(&hashes, 12);
        let rho = (0..12u32).find(|i| !hashes.contains(i)).unwrap_or(12);
        prop_assert_eq!(run.estimate.rho, rho);
        assert_abs_diff_eq!(run.estimate.n_hat, LOF_SCALE * 2f64.powi(rho as i32), epsilon = 1e-9);
    }
}

#[test]
fn equal_demand_splits_evenly() {
    assert_eq!(channel_counts([5.0; 3], [1.0; 3], 9), [3, 3, 3]);
}
