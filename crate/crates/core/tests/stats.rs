mod common;

use molfm::stats::{
    average_precision, roc_auc, studentized_range_cdf, studentized_range_quantile, t_cdf, t_sf,
    tukey_hsd, Orientation,
};
use proptest::collection::vec;
use proptest::prelude::*;

/// Fraction of (positive, negative) pairs ranked correctly, ties counting half.
fn auc_by_pairs(scores: &[f64], y: &[f64]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &yi) in y.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            if yi == 1.0 && yj == 0.0 {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

/// Step-wise AP over distinct score thresholds, highest first.
fn ap_by_thresholds(scores: &[f64], y: &[f64]) -> f64 {
    let mut thresholds: Vec<f64> = scores.to_vec();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let positives = y.iter().filter(|&&v| v == 1.0).count() as f64;
    let (mut ap, mut prev_recall) = (0.0, 0.0);
    for t in thresholds {
        let selected: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] >= t).collect();
        let tp = selected.iter().filter(|&&i| y[i] == 1.0).count() as f64;
        let recall = tp / positives;
        ap += (recall - prev_recall) * tp / selected.len() as f64;
        prev_recall = recall;
    }
    ap
}

fn labelled() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..=50).prop_flat_map(|n| {
        (
            vec(0u8..6, n).prop_map(|v| v.into_iter().map(f64::from).collect()),
            vec(any::<bool>(), n).prop_map(|v| v.into_iter().map(f64::from).collect()),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn roc_auc_equals_pair_count((scores, mut y) in labelled()) {
        // make sure both classes are present
        y[0] = 1.0;
        let last = y.len() - 1;
        y[last] = 0.0;
        let got = roc_auc(&scores, &y).unwrap();
        prop_assert!((got - auc_by_pairs(&scores, &y)).abs() < 1e-12);
    }

    #[test]
    fn average_precision_equals_threshold_sum((scores, mut y) in labelled()) {
        y[0] = 1.0;
        let last = y.len() - 1;
        y[last] = 0.0;
        let got = average_precision(&scores, &y).unwrap();
        prop_assert!((got - ap_by_thresholds(&scores, &y)).abs() < 1e-12);
    }

    #[test]
    fn t_cdf_matches_quadrature(t in -12.0f64..12.0, df in 1.0f64..60.0) {
        let oracle = common::t_cdf_quadrature(t, df);
        prop_assert!((t_cdf(t, df) - oracle).abs() < 1e-8, "t={} df={}", t, df);
        prop_assert!((t_sf(t, df) - (1.0 - oracle)).abs() < 1e-8);
    }

    #[test]
    fn cauchy_closed_form(t in -1e3f64..1e3) {
        let exact = 0.5 + t.atan() / std::f64::consts::PI;
        prop_assert!((t_cdf(t, 1.0) - exact).abs() < 1e-8);
    }

    #[test]
    fn winners_survive_positive_affine_rescaling(
        means in vec(-2.0f64..2.0, 2..6),
        noise in vec(-1.0f64..1.0, 30),
        slope in 0.1f64..50.0,
        shift in -100.0f64..100.0,
    ) {
        let groups: Vec<Vec<f64>> = means
            .iter()
            .enumerate()
            .map(|(g, m)| (0..5).map(|r| m + noise[(g * 5 + r) % 30]).collect())
            .collect();
        let scaled: Vec<Vec<f64>> = groups
            .iter()
            .map(|g| g.iter().map(|v| slope * v + shift).collect())
            .collect();
        for o in [Orientation::LowerBetter, Orientation::HigherBetter] {
            let a = tukey_hsd(&groups, o, 0.05).unwrap();
            let b = tukey_hsd(&scaled, o, 0.05).unwrap();
            prop_assert_eq!(a.winners, b.winners);
        }
    }
}

#[test]
fn t_cdf_is_exactly_half_at_zero() {
    for df in [0.5, 1.0, 2.0, 3.5, 10.0, 1e3, 1e9] {
        assert_eq!(t_cdf(0.0, df), 0.5);
    }
}

#[test]
fn studentized_range_quantile_inverts_the_cdf() {
    for (k, df) in [(2, 5), (3, 12), (4, 20), (8, 40), (10, 120)] {
        let q = studentized_range_quantile(0.05, k, df).unwrap();
        let p = studentized_range_cdf(q, k, df as f64);
        assert!((p - 0.95).abs() < 1e-6, "k={k} df={df}: {p}");
        assert!(studentized_range_cdf(q * 0.9, k, df as f64) < p);
    }
}
