//! Seeded generators for toy molecule corpora and synthetic labels.
//!
//! Molecules are assembled from a fixed fragment vocabulary into a SMILES
//! string, then parsed. Strings that violate valence are discarded and
//! redrawn, so every returned molecule went through [`parse_smiles`].

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::descriptors::wiener_index;
use crate::molgraph::{parse_smiles, Molecule};

/// Fragments that can sit anywhere in a chain. Ring fragments close label 1
/// internally, so concatenation never leaves a ring open.
const CORE: &[&str] = &[
    "C",
    "C",
    "C",
    "CC",
    "C(C)",
    "C(C)C",
    "N",
    "O",
    "C(=O)",
    "C=C",
    "C#C",
    "S",
    "C(F)(F)",
    "N(C)",
    "C(=O)N",
    "C(=O)O",
    "c1ccccc1",
    "c1ccncc1",
    "c1ccoc1",
    "c1ccsc1",
    "c1cc[nH]c1",
    "C1CCCCC1",
    "C1CC1",
    "C1CCOC1",
    "C1CCNCC1",
    "c1ccc2ccccc2c1",
];

/// End groups, used only as branches or as the last fragment.
const CAPS: &[&str] = &[
    "F",
    "Cl",
    "Br",
    "O",
    "N",
    "C(=O)O",
    "[N+](=O)[O-]",
    "C#N",
    "OC",
    "C(=O)OC",
    "I",
];

/// Options for [`random_molecule`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    pub min_heavy: usize,
    pub max_heavy: usize,
    /// Probability that a fragment is attached as a branch.
    pub branch_prob: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            min_heavy: 2,
            max_heavy: 20,
            branch_prob: 0.35,
        }
    }
}

fn draw_smiles<R: Rng + ?Sized>(rng: &mut R, max_fragments: usize, branch_prob: f64) -> String {
    let n = rng.random_range(1..=max_fragments);
    let mut s = String::from(*CORE.choose(rng).unwrap());
    for i in 1..n {
        let last = i + 1 == n;
        if rng.random_bool(branch_prob) {
            let pool = if rng.random_bool(0.5) { CAPS } else { CORE };
            s.push('(');
            s.push_str(pool.choose(rng).unwrap());
            s.push(')');
            if last {
                s.push('C');
            }
        } else {
            let pool = if last && rng.random_bool(0.5) {
                CAPS
            } else {
                CORE
            };
            s.push_str(pool.choose(rng).unwrap());
        }
    }
    s
}

/// One random molecule and its SMILES, within the heavy-atom bounds.
pub fn random_molecule<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> (String, Molecule) {
    let max_fragments = (cfg.max_heavy / 2).clamp(1, 8);
    loop {
        let s = draw_smiles(rng, max_fragments, cfg.branch_prob);
        if let Ok(m) = parse_smiles(&s) {
            let heavy = m.heavy_atom_count();
            if (cfg.min_heavy..=cfg.max_heavy).contains(&heavy) {
                return (s, m);
            }
        }
    }
}

/// `n` distinct random molecules (distinct as SMILES strings).
pub fn random_corpus(n: usize, cfg: &GenConfig, seed: u64) -> Vec<(String, Molecule)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while out.len() < n {
        let (s, m) = random_molecule(&mut rng, cfg);
        attempts += 1;
        // the vocabulary is finite; allow repeats once distinct strings run out
        if seen.insert(s.clone()) || attempts > 50 * n {
            out.push((s, m));
        }
    }
    out
}

/// The default desk-scale corpus used by examples and smoke tests.
pub fn toy_corpus(n: usize, seed: u64) -> Vec<(String, Molecule)> {
    random_corpus(n, &GenConfig::default(), seed)
}

/// A uniformly random atom permutation.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(p.as_mut_slice(), rng);
    p
}

/// Wiener index standardized over `mols`, plus Gaussian noise of standard
/// deviation `noise`.
pub fn wiener_task(mols: &[Molecule], noise: f64, seed: u64) -> Vec<f64> {
    let w: Vec<f64> = mols.iter().map(wiener_index).collect();
    let n = w.len() as f64;
    let mean = w.iter().sum::<f64>() / n;
    let sd = (w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, noise).expect("noise must be finite and non-negative");
    w.iter()
        .map(|x| (x - mean) / if sd > 0.0 { sd } else { 1.0 } + normal.sample(&mut rng))
        .collect()
}
