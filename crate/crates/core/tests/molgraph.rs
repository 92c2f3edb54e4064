use molfm::descriptors::{compute_descriptors, DESCRIPTORS};
use molfm::molgraph::{
    canonical_reindex, parse_smiles, to_smiles, BondOrder, Element, Molecule, SmilesError,
};
use molfm::synth::{random_permutation, toy_corpus};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DRUGS: &[&str] = &[
    "CC(=O)Oc1ccccc1C(=O)O",
    "CN1C=NC2=C1C(=O)N(C(=O)N2C)C",
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "c1ccc2c(c1)ccc1ccccc12",
    "O=C(O)c1ccccc1O",
    "c1ccoc1",
    "c1ccsc1",
    "Cc1ccncc1",
    "O=c1cc[nH]cc1",
    "CCN(CC)CC",
    "C[N+](=O)[O-]",
    "OC(=O)CC(O)(CC(=O)O)C(=O)O",
    "FC(F)(F)c1ccc(Cl)cc1Br",
    "CS(=O)(=O)C",
    "OP(=O)(O)O",
    "C1CC2CCC1C2",
    "CC.O",
];

fn molecules(n: usize, seed: u64) -> Vec<Molecule> {
    let mut out: Vec<Molecule> = DRUGS.iter().map(|s| parse_smiles(s).unwrap()).collect();
    out.extend(toy_corpus(n, seed).into_iter().map(|x| x.1));
    out
}

/// Bond-order sum with aromatic bonds counted once.
fn bond_sum(m: &Molecule, i: usize) -> u32 {
    m.neighbors(i)
        .iter()
        .map(|nb| match m.bonds()[nb.bond].order {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        })
        .sum()
}

#[test]
fn implicit_hydrogens_complete_an_allowed_valence() {
    for m in molecules(300, 21) {
        for (i, a) in m.atoms().iter().enumerate() {
            if a.explicit_h.is_some() {
                continue;
            }
            let allowed: Vec<u32> = a
                .element
                .default_valences()
                .expect("organic subset")
                .iter()
                .map(|&v| v as u32)
                .collect();
            let base = bond_sum(&m, i);
            let h = a.implicit_h as u32;
            let ok =
                allowed.contains(&(base + h)) || (a.aromatic && allowed.contains(&(base + 1 + h)));
            assert!(
                ok,
                "{} atom {i}: bonds {base} + H {h} not in {allowed:?}",
                to_smiles(&m)
            );
            if !a.aromatic {
                let smallest = allowed.iter().find(|&&v| v >= base).unwrap();
                assert_eq!(h, smallest - base, "{} atom {i}", to_smiles(&m));
            }
        }
    }
}

#[test]
fn cyclomatic_identity_on_1000_molecules() {
    for (s, m) in toy_corpus(1000, 5) {
        let expected = m.n_bonds() + m.n_components() - m.n_atoms();
        assert_eq!(m.ring_count(), expected, "{s}");
    }
}

#[test]
fn twenty_malformed_strings() {
    use SmilesError as E;
    type Check = fn(&SmilesError) -> bool;
    let cases: [(&str, Check); 20] = [
        ("", |e| matches!(e, E::Empty)),
        ("   ", |e| matches!(e, E::Empty)),
        ("C(C", |e| matches!(e, E::UnbalancedParentheses { .. })),
        ("CC)", |e| matches!(e, E::UnbalancedParentheses { .. })),
        ("CC(C)(", |e| matches!(e, E::UnbalancedParentheses { .. })),
        ("C1CC", |e| {
            matches!(e, E::UnmatchedRingClosure { label: 1 })
        }),
        ("C1CC1C1", |e| {
            matches!(e, E::UnmatchedRingClosure { label: 1 })
        }),
        ("Q", |e| matches!(e, E::UnknownElement { .. })),
        ("[Xy]", |e| matches!(e, E::UnknownElement { .. })),
        ("C(C)(C)(C)(C)C", |e| matches!(e, E::ValenceExceeded { .. })),
        ("O=O=O", |e| matches!(e, E::ValenceExceeded { .. })),
        ("Cl(C)C", |e| matches!(e, E::ValenceExceeded { .. })),
        ("N(=O)(=O)=O", |e| matches!(e, E::ValenceExceeded { .. })),
        ("C=", |e| matches!(e, E::DanglingBond { .. })),
        ("C==C", |e| matches!(e, E::DanglingBond { .. })),
        ("C11", |e| matches!(e, E::InvalidBond { .. })),
        ("[C+", |e| matches!(e, E::InvalidBracketAtom { .. })),
        ("[]", |e| matches!(e, E::InvalidBracketAtom { .. })),
        ("C$C", |e| matches!(e, E::UnexpectedCharacter { .. })),
        ("C.", |e| matches!(e, E::UnexpectedCharacter { .. })),
    ];
    for (s, check) in cases {
        let err = parse_smiles(s).unwrap_err();
        assert!(check(&err), "{s:?} gave {err:?}");
    }
}

#[test]
fn written_smiles_reparse_to_the_same_descriptors() {
    for m in molecules(300, 8) {
        let s = to_smiles(&m);
        let back = parse_smiles(&s).unwrap_or_else(|e| panic!("{s}: {e}"));
        let (a, b) = (compute_descriptors(&m), compute_descriptors(&back));
        assert_eq!(a.valid, b.valid, "{s}");
        for (j, (x, y)) in a.values.iter().zip(&b.values).enumerate() {
            if a.valid[j] {
                assert!(
                    (x - y).abs() <= 1e-9 * x.abs().max(1.0),
                    "{s} {}",
                    DESCRIPTORS[j].name
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn descriptors_survive_reindexing(corpus_seed in 0u64..1000, perm_seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
        for (s, m) in toy_corpus(5, corpus_seed) {
            let perm = random_permutation(m.n_atoms(), &mut rng);
            let p = canonical_reindex(&m, &perm).unwrap();
            let (a, b) = (compute_descriptors(&m), compute_descriptors(&p));
            prop_assert_eq!(&a.valid, &b.valid);
            for (j, d) in DESCRIPTORS.iter().enumerate() {
                if a.valid[j] {
                    prop_assert_eq!(a.values[j].to_bits(), b.values[j].to_bits(), "{} {}", s, d.name);
                }
            }
        }
    }

    #[test]
    fn reindexing_preserves_element_multiset(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (_, m) in toy_corpus(3, seed) {
            let perm = random_permutation(m.n_atoms(), &mut rng);
            let p = canonical_reindex(&m, &perm).unwrap();
            let count = |m: &Molecule| {
                let mut e: Vec<(Element, usize)> =
                    (0..m.n_atoms()).map(|i| (m.atom(i).element, m.total_h(i))).collect();
                e.sort_by_key(|&(el, h)| (el.symbol(), h));
                e
            };
            prop_assert_eq!(count(&m), count(&p));
            prop_assert_eq!(m.ring_count(), p.ring_count());
        }
    }
}
