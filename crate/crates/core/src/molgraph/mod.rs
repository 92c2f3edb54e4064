//! Molecular graphs: SMILES parsing, ring perception and substructure queries.
//!
//! A [`Molecule`] is immutable once built. Every constructor validates the
//! bond list, builds adjacency, counts connected components and flags ring
//! bonds, so downstream code can rely on those invariants without rechecking.

mod element;
mod io;
mod query;
mod rings;
mod smiles;
mod writer;

pub use element::{Element, ElementData};
pub use io::{read_smiles_corpus, CorpusEntry, CorpusError};
pub use query::{
    count_subgraph_matches, subgraph_matches, QueryAtom, QueryBond, QueryError, QueryGraph,
    MAX_QUERY_ATOMS,
};
pub use rings::{perceive_rings, RingInfo};
pub use smiles::{implicit_hydrogens, parse_smiles, SmilesError};
pub use writer::to_smiles;

use thiserror::Error;

/// Bond multiplicity. Aromatic bonds are kept as their own label (no kekulization).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Contribution to valence sums and order-weighted descriptors.
    pub fn as_f64(self) -> f64 {
        match self {
            BondOrder::Single => 1.0,
            BondOrder::Double => 2.0,
            BondOrder::Triple => 3.0,
            BondOrder::Aromatic => 1.5,
        }
    }

    /// Small stable integer code, used for hashing and one-hot features.
    pub fn code(self) -> u8 {
        match self {
            BondOrder::Single => 0,
            BondOrder::Double => 1,
            BondOrder::Triple => 2,
            BondOrder::Aromatic => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub element: Element,
    pub formal_charge: i8,
    pub aromatic: bool,
    /// Mass number from a bracket atom, e.g. `[13C]`.
    pub isotope: Option<u16>,
    /// Hydrogen count written inside a bracket atom. `None` for organic-subset atoms.
    pub explicit_h: Option<u8>,
    /// Hydrogens implied by the valence model. Always 0 when `explicit_h` is set.
    pub implicit_h: u8,
}

impl Atom {
    pub fn new(element: Element) -> Self {
        Atom {
            element,
            formal_charge: 0,
            aromatic: false,
            isotope: None,
            explicit_h: None,
            implicit_h: 0,
        }
    }

    /// Hydrogens carried on the atom itself (not counting explicit `[H]` graph neighbors).
    pub fn attached_h(&self) -> u8 {
        self.implicit_h + self.explicit_h.unwrap_or(0)
    }

    pub fn is_heavy(&self) -> bool {
        !self.element.is_hydrogen()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub begin: usize,
    pub end: usize,
    pub order: BondOrder,
    pub in_ring: bool,
}

impl Bond {
    pub fn new(begin: usize, end: usize, order: BondOrder) -> Self {
        Bond {
            begin,
            end,
            order,
            in_ring: false,
        }
    }

    /// The endpoint opposite `atom`.
    pub fn other(&self, atom: usize) -> usize {
        if self.begin == atom {
            self.end
        } else {
            self.begin
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    pub atom: usize,
    pub bond: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("molecule has no atoms")]
    Empty,
    #[error("bond {bond} references atom {atom} but the molecule has {n_atoms} atoms")]
    AtomOutOfRange {
        bond: usize,
        atom: usize,
        n_atoms: usize,
    },
    #[error("bond {bond} connects atom {atom} to itself")]
    SelfLoop { bond: usize, atom: usize },
    #[error("duplicate bond between atoms {a} and {b}")]
    DuplicateBond { a: usize, b: usize },
    #[error("aromatic bond between atoms {a} and {b} requires both atoms to be aromatic")]
    AromaticBondMismatch { a: usize, b: usize },
    #[error("permutation has length {got}, expected {expected}")]
    PermutationLength { got: usize, expected: usize },
    #[error("not a permutation: index {index} repeated or out of range")]
    InvalidPermutation { index: usize },
}

/// A validated molecular graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Molecule {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<Neighbor>>,
    component: Vec<usize>,
    n_components: usize,
    ring_count: usize,
}

impl Molecule {
    /// Builds a molecule from atoms and bonds, recomputing ring flags.
    ///
    /// Hydrogen counts on the atoms are taken as given; use [`parse_smiles`]
    /// to get them assigned from the valence model.
    pub fn new(atoms: Vec<Atom>, mut bonds: Vec<Bond>) -> Result<Self, GraphError> {
        if atoms.is_empty() {
            return Err(GraphError::Empty);
        }
        let n = atoms.len();
        let mut adjacency = vec![Vec::new(); n];
        for (i, b) in bonds.iter().enumerate() {
            for atom in [b.begin, b.end] {
                if atom >= n {
                    return Err(GraphError::AtomOutOfRange {
                        bond: i,
                        atom,
                        n_atoms: n,
                    });
                }
            }
            if b.begin == b.end {
                return Err(GraphError::SelfLoop {
                    bond: i,
                    atom: b.begin,
                });
            }
            if adjacency[b.begin]
                .iter()
                .any(|nb: &Neighbor| nb.atom == b.end)
            {
                return Err(GraphError::DuplicateBond {
                    a: b.begin,
                    b: b.end,
                });
            }
            if b.order == BondOrder::Aromatic && !(atoms[b.begin].aromatic && atoms[b.end].aromatic)
            {
                return Err(GraphError::AromaticBondMismatch {
                    a: b.begin,
                    b: b.end,
                });
            }
            adjacency[b.begin].push(Neighbor {
                atom: b.end,
                bond: i,
            });
            adjacency[b.end].push(Neighbor {
                atom: b.begin,
                bond: i,
            });
        }

        let (component, n_components) = connected_components(&adjacency);
        let rings = rings::find_ring_bonds(n, &bonds, &adjacency, n_components);
        for (b, flag) in bonds.iter_mut().zip(&rings.bond_in_ring) {
            b.in_ring = *flag;
        }

        Ok(Molecule {
            atoms,
            bonds,
            adjacency,
            component,
            n_components,
            ring_count: rings.ring_count,
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn n_bonds(&self) -> usize {
        self.bonds.len()
    }

    pub fn neighbors(&self, atom: usize) -> &[Neighbor] {
        &self.adjacency[atom]
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    /// Number of non-hydrogen neighbors.
    pub fn heavy_degree(&self, atom: usize) -> usize {
        self.adjacency[atom]
            .iter()
            .filter(|nb| self.atoms[nb.atom].is_heavy())
            .count()
    }

    /// All hydrogens on `atom`: implicit, bracket-explicit, and `[H]` graph neighbors.
    pub fn total_h(&self, atom: usize) -> usize {
        let h_neighbors = self.adjacency[atom]
            .iter()
            .filter(|nb| self.atoms[nb.atom].element.is_hydrogen())
            .count();
        self.atoms[atom].attached_h() as usize + h_neighbors
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a]
            .iter()
            .find(|nb| nb.atom == b)
            .map(|nb| nb.bond)
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }

    /// Component index of each atom, numbered in order of first appearance.
    pub fn components(&self) -> &[usize] {
        &self.component
    }

    /// Cyclomatic number: bonds − atoms + components.
    pub fn ring_count(&self) -> usize {
        self.ring_count
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.atoms.iter().filter(|a| a.is_heavy()).count()
    }

    /// Relabels atoms so that new atom `i` is old atom `perm[i]`.
    pub fn reindex(&self, perm: &[usize]) -> Result<Molecule, GraphError> {
        canonical_reindex(self, perm)
    }
}

fn connected_components(adjacency: &[Vec<Neighbor>]) -> (Vec<usize>, usize) {
    let n = adjacency.len();
    let mut component = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        component[start] = count;
        stack.push(start);
        while let Some(v) = stack.pop() {
            for nb in &adjacency[v] {
                if component[nb.atom] == usize::MAX {
                    component[nb.atom] = count;
                    stack.push(nb.atom);
                }
            }
        }
        count += 1;
    }
    (component, count)
}

/// Returns an isomorphic molecule in which new atom `i` is old atom `perm[i]`.
///
/// Bond list order is preserved; only endpoints are remapped.
pub fn canonical_reindex(m: &Molecule, perm: &[usize]) -> Result<Molecule, GraphError> {
    let n = m.n_atoms();
    if perm.len() != n {
        return Err(GraphError::PermutationLength {
            got: perm.len(),
            expected: n,
        });
    }
    let mut inverse = vec![usize::MAX; n];
    for (new, &old) in perm.iter().enumerate() {
        if old >= n || inverse[old] != usize::MAX {
            return Err(GraphError::InvalidPermutation { index: old });
        }
        inverse[old] = new;
    }
    let atoms = perm.iter().map(|&old| m.atoms[old].clone()).collect();
    let bonds = m
        .bonds
        .iter()
        .map(|b| Bond::new(inverse[b.begin], inverse[b.end], b.order))
        .collect();
    Molecule::new(atoms, bonds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_graphs() {
        let c = || Atom::new(Element::C);
        assert_eq!(Molecule::new(vec![], vec![]), Err(GraphError::Empty));
        assert!(matches!(
            Molecule::new(vec![c()], vec![Bond::new(0, 0, BondOrder::Single)]),
            Err(GraphError::SelfLoop { .. })
        ));
        assert!(matches!(
            Molecule::new(
                vec![c(), c()],
                vec![
                    Bond::new(0, 1, BondOrder::Single),
                    Bond::new(1, 0, BondOrder::Double)
                ]
            ),
            Err(GraphError::DuplicateBond { .. })
        ));
        assert!(matches!(
            Molecule::new(vec![c(), c()], vec![Bond::new(0, 1, BondOrder::Aromatic)]),
            Err(GraphError::AromaticBondMismatch { .. })
        ));
        assert!(matches!(
            Molecule::new(vec![c()], vec![Bond::new(0, 3, BondOrder::Single)]),
            Err(GraphError::AtomOutOfRange { .. })
        ));
    }

    #[test]
    fn adjacency_mirrors_bonds() {
        let m = parse_smiles("CC(=O)OC1CC1").unwrap();
        for (i, b) in m.bonds().iter().enumerate() {
            assert!(m.neighbors(b.begin).contains(&Neighbor {
                atom: b.end,
                bond: i
            }));
            assert!(m.neighbors(b.end).contains(&Neighbor {
                atom: b.begin,
                bond: i
            }));
        }
        let listed: usize = (0..m.n_atoms()).map(|a| m.degree(a)).sum();
        assert_eq!(listed, 2 * m.n_bonds());
    }

    #[test]
    fn reindex_identity_and_errors() {
        let m = parse_smiles("CCO").unwrap();
        assert_eq!(canonical_reindex(&m, &[0, 1, 2]).unwrap(), m);
        assert_eq!(
            canonical_reindex(&m, &[0, 1]),
            Err(GraphError::PermutationLength {
                got: 2,
                expected: 3
            })
        );
        assert!(matches!(
            canonical_reindex(&m, &[0, 0, 1]),
            Err(GraphError::InvalidPermutation { .. })
        ));
    }

    #[test]
    fn reversal_keeps_structure() {
        let m = parse_smiles("CCO").unwrap();
        let r = canonical_reindex(&m, &[2, 1, 0]).unwrap();
        assert_eq!(r.atom(0).element, Element::O);
        assert_eq!(r.atom(0).implicit_h, 1);
        assert_eq!(r.degree(1), 2);
        assert_eq!(r.ring_count(), 0);
    }

    #[test]
    fn total_h_counts_explicit_neighbors() {
        let m = parse_smiles("[H]OC").unwrap();
        assert_eq!(m.total_h(1), 1);
        assert_eq!(m.heavy_degree(1), 1);
        assert_eq!(m.heavy_atom_count(), 2);
    }
}
