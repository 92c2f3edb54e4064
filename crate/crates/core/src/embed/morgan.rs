//! Circular (Morgan) fingerprints by iterative neighborhood hashing.

use crate::molgraph::Molecule;

pub const DEFAULT_RADIUS: usize = 2;
pub const DEFAULT_WIDTH: usize = 2048;

/// Folded identifier counts; `bits()` gives the presence vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorganFp {
    pub radius: usize,
    pub counts: Vec<u32>,
}

impl MorganFp {
    pub fn width(&self) -> usize {
        self.counts.len()
    }

    pub fn bits(&self) -> Vec<bool> {
        self.counts.iter().map(|&c| c > 0).collect()
    }

    pub fn on_bits(&self) -> Vec<usize> {
        (0..self.counts.len())
            .filter(|&i| self.counts[i] > 0)
            .collect()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0100_0000_01b3;

/// FNV-1a over little-endian words; stable across platforms and releases.
fn hash_words(words: &[u64]) -> u64 {
    let mut h = FNV_OFFSET;
    for w in words {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    h
}

/// Radius-0 identifier of every atom:
/// (element, degree, charge, attached H, aromatic, in ring).
pub fn atom_invariants(m: &Molecule) -> Vec<u64> {
    (0..m.n_atoms())
        .map(|i| {
            let a = m.atom(i);
            let in_ring = m.neighbors(i).iter().any(|n| m.bonds()[n.bond].in_ring);
            hash_words(&[
                a.element.number() as u64,
                m.degree(i) as u64,
                a.formal_charge as i64 as u64,
                a.attached_h() as u64,
                a.aromatic as u64,
                in_ring as u64,
            ])
        })
        .collect()
}

/// Identifiers of all rounds `0..=radius`, every atom contributing one per round.
pub fn morgan_identifiers(m: &Molecule, radius: usize) -> Vec<u64> {
    let mut ids = atom_invariants(m);
    let mut all = ids.clone();
    for round in 1..=radius {
        let next: Vec<u64> = (0..m.n_atoms())
            .map(|i| {
                let mut env: Vec<(u64, u64)> = m
                    .neighbors(i)
                    .iter()
                    .map(|n| (m.bonds()[n.bond].order.code() as u64, ids[n.atom]))
                    .collect();
                env.sort_unstable();
                let mut words = vec![round as u64, ids[i]];
                words.extend(env.into_iter().flat_map(|(o, id)| [o, id]));
                hash_words(&words)
            })
            .collect();
        all.extend_from_slice(&next);
        ids = next;
    }
    all
}

pub fn morgan_fingerprint(m: &Molecule, radius: usize, width: usize) -> MorganFp {
    assert!(width > 0, "fingerprint width must be positive");
    let mut counts = vec![0u32; width];
    for id in morgan_identifiers(m, radius) {
        counts[(id % width as u64) as usize] += 1;
    }
    MorganFp { radius, counts }
}
