mod common;

use molfm::descriptors::{apply_scaler, compute_descriptors, fit_scaler, DescriptorMatrix};
use molfm::molgraph::parse_smiles;
use proptest::prelude::*;

#[test]
fn distance_indices_and_groups_match_oracles() {
    for (s, m) in common::small_corpus(300, 99) {
        common::check_against_oracles(&s, &m);
    }
    for s in [
        "CC(=O)OC",
        "OC(=O)CC(=O)O",
        "C[N+](=O)[O-]",
        "O=C=O",
        "[H]OC",
        "CNC(=O)C",
        "CC.CCC",
        "CC(C)C.CCCC",
        "CCCC.CC(C)C",
        "C1CC1C.CCCC",
        "CCCC.C1CC1C",
    ] {
        common::check_against_oracles(s, &parse_smiles(s).unwrap());
    }
}

#[test]
fn scaler_round_trip_on_unclipped_cells() {
    let mols: Vec<_> = common::small_corpus(200, 4)
        .into_iter()
        .map(|x| x.1)
        .collect();
    let raw = DescriptorMatrix::from_molecules(&mols, &Vec::<String>::new());
    let stats = fit_scaler(&raw).unwrap();
    let z = apply_scaler(&raw, &stats).unwrap();
    let cols = raw.n_cols();
    let mut checked = 0;
    for r in 0..raw.n_rows() {
        for c in 0..cols {
            if !z.is_valid(r, c) || z.get(r, c).abs() >= stats.clip_sigmas {
                continue;
            }
            let x = raw.get(r, c);
            let back = stats.inverse(c, z.get(r, c));
            assert!(
                (back - x).abs() <= 1e-9 * x.abs().max(1.0),
                "row {r} col {c}"
            );
            checked += 1;
        }
    }
    assert!(checked > 1000);
}

#[test]
fn homologation_increases_size_descriptors() {
    for n in 1..20 {
        let a = compute_descriptors(&parse_smiles(&"C".repeat(n)).unwrap());
        let b = compute_descriptors(&parse_smiles(&"C".repeat(n + 1)).unwrap());
        for name in ["MW", "WienerIndex", "McGowanVolume"] {
            let j = common::column(name);
            assert!(b.values[j] > a.values[j], "{name} at n = {n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_small_molecules_match_oracles(seed in 0u64..100_000) {
        for (s, m) in common::small_corpus(4, seed) {
            common::check_against_oracles(&s, &m);
        }
    }
}
