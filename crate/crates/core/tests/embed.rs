use molfm::embed::{
    cosine_sort, joint_probabilities, kendall_tau_b, morgan_fingerprint, tsne, TsneConfig,
};
use molfm::molgraph::canonical_reindex;
use molfm::synth::{random_permutation, toy_corpus};
use proptest::collection::vec;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Tau-b from explicit pair classification.
fn tau_by_pairs(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (mut s, mut tx, mut ty, mut pairs) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..i {
            pairs += 1.0;
            let a = (x[i] - x[j]).signum() * f64::from(x[i] != x[j]);
            let b = (y[i] - y[j]).signum() * f64::from(y[i] != y[j]);
            s += a * b;
            tx += f64::from(x[i] == x[j]);
            ty += f64::from(y[i] == y[j]);
        }
    }
    s / ((pairs - tx) * (pairs - ty)).sqrt()
}

/// Points on a 1/8 grid: differences and integer shifts are exact.
fn grid_points() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (6usize..30, 1usize..5)
        .prop_flat_map(|(n, d)| vec(vec((-80i32..80).prop_map(|v| v as f64 / 8.0), d), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn joint_probabilities_are_a_symmetric_distribution(points in grid_points()) {
        let n = points.len();
        let perp = (n as f64 / 4.0).max(1.5);
        let (p, row_perp) = joint_probabilities(&points, perp);
        let total: f64 = p.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        for i in 0..n {
            prop_assert!((row_perp[i] - perp).abs() < 1e-3);
            for j in 0..n {
                prop_assert!(p[i * n + j] >= 0.0);
                prop_assert_eq!(p[i * n + j], p[j * n + i]);
            }
        }
    }

    #[test]
    fn translation_leaves_p_bitwise_unchanged(points in grid_points(), shift in vec(-50i32..50, 4)) {
        let moved: Vec<Vec<f64>> = points
            .iter()
            .map(|p| p.iter().zip(&shift).map(|(x, s)| x + *s as f64).collect())
            .collect();
        let perp = (points.len() as f64 / 4.0).max(1.5);
        let (a, _) = joint_probabilities(&points, perp);
        let (b, _) = joint_probabilities(&moved, perp);
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn cosine_order_ignores_positive_scaling(
        lead in vec(-5.0f64..5.0, 6),
        members in vec(vec(-5.0f64..5.0, 6), 2..12),
        k in 0.01f64..100.0,
    ) {
        let a = cosine_sort(&lead, &members).unwrap();
        let scaled: Vec<Vec<f64>> = members.iter().map(|m| m.iter().map(|v| v * k).collect()).collect();
        let lead_scaled: Vec<f64> = lead.iter().map(|v| v * k).collect();
        let b = cosine_sort(&lead_scaled, &scaled).unwrap();
        // equal distances may swap under rounding; compare the sorted distance profile
        let key = |r: &molfm::embed::SortResult| r.order.iter().map(|&i| r.distances[i].unwrap()).collect::<Vec<_>>();
        let (ka, kb) = (key(&a), key(&b));
        for (x, y) in ka.iter().zip(&kb) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        let gaps_distinct = ka.windows(2).all(|w| w[1] - w[0] > 1e-9);
        if gaps_distinct {
            prop_assert_eq!(a.order, b.order);
        }
    }

    #[test]
    fn kendall_matches_pair_classification(
        x in vec(0u8..5, 3..30),
        seed in any::<u64>(),
    ) {
        let x: Vec<f64> = x.into_iter().map(f64::from).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<f64> = random_permutation(x.len(), &mut rng).into_iter().map(|v| (v % 4) as f64).collect();
        let got = kendall_tau_b(&x, &y);
        let want = tau_by_pairs(&x, &y);
        if want.is_nan() {
            prop_assert!(got.is_nan());
        } else {
            prop_assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn morgan_is_permutation_invariant(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (s, m) in toy_corpus(4, seed) {
            let p = canonical_reindex(&m, &random_permutation(m.n_atoms(), &mut rng)).unwrap();
            for radius in 0..=3 {
                prop_assert_eq!(
                    morgan_fingerprint(&m, radius, 2048).counts,
                    morgan_fingerprint(&p, radius, 2048).counts,
                    "{} radius {}", s, radius
                );
            }
        }
    }
}

#[test]
fn tsne_lowers_kl_across_seeds() {
    let points: Vec<Vec<f64>> = toy_corpus(40, 1)
        .iter()
        .map(|(_, m)| morgan_fingerprint(m, 2, 256).as_f64())
        .collect();
    for seed in 0..3 {
        let cfg = TsneConfig {
            perplexity: 8.0,
            seed,
            ..Default::default()
        };
        let r = tsne(&points, &cfg).unwrap();
        assert!(r.kl_final < r.kl_initial, "seed {seed}");
        assert!(r
            .coords
            .iter()
            .all(|c| c[0].is_finite() && c[1].is_finite()));
    }
}
