//! Atom and bond featurization and directed-edge index tables.

use crate::molgraph::{BondOrder, Element, Molecule};

/// Bump when the feature layout changes.
pub const FEATURES_VERSION: u32 = 1;

const ELEMENTS: [Element; 11] = [
    Element::B,
    Element::C,
    Element::N,
    Element::O,
    Element::F,
    Element::P,
    Element::S,
    Element::CL,
    Element::BR,
    Element::I,
    Element::H,
];
const N_ELEMENT: usize = ELEMENTS.len() + 1;
const N_DEGREE: usize = 6;
const N_CHARGE: usize = 5;
const N_HYDROGEN: usize = 5;

/// element (11 + other) | degree 0..=5 | charge −2..=+2 | aromatic | total H 0..=4
pub const ATOM_DIM: usize = N_ELEMENT + N_DEGREE + N_CHARGE + 1 + N_HYDROGEN;
/// single | double | triple | aromatic | in ring
pub const BOND_DIM: usize = 5;

pub fn atom_features(m: &Molecule, i: usize) -> [f64; ATOM_DIM] {
    let a = m.atom(i);
    let mut f = [0.0; ATOM_DIM];
    let el = ELEMENTS
        .iter()
        .position(|&e| e == a.element)
        .unwrap_or(N_ELEMENT - 1);
    f[el] = 1.0;
    let mut o = N_ELEMENT;
    f[o + m.degree(i).min(N_DEGREE - 1)] = 1.0;
    o += N_DEGREE;
    f[o + (a.formal_charge.clamp(-2, 2) + 2) as usize] = 1.0;
    o += N_CHARGE;
    f[o] = if a.aromatic { 1.0 } else { 0.0 };
    o += 1;
    f[o + m.total_h(i).min(N_HYDROGEN - 1)] = 1.0;
    f
}

pub fn bond_features(order: BondOrder, in_ring: bool) -> [f64; BOND_DIM] {
    let mut f = [0.0; BOND_DIM];
    f[order.code() as usize] = 1.0;
    f[4] = if in_ring { 1.0 } else { 0.0 };
    f
}

/// One featurized molecule. Bond `b` yields directed edges `2b` (begin → end)
/// and `2b + 1` (end → begin), so the reverse of edge `e` is `e ^ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MolGraph {
    pub n_atoms: usize,
    /// `n_atoms × ATOM_DIM`, row-major.
    pub atom_features: Vec<f64>,
    /// `n_edges × BOND_DIM`, row-major.
    pub edge_features: Vec<f64>,
    pub edge_src: Vec<usize>,
    pub edge_dst: Vec<usize>,
}

impl MolGraph {
    pub fn n_edges(&self) -> usize {
        self.edge_src.len()
    }

    pub fn reverse(&self, e: usize) -> usize {
        e ^ 1
    }
}

pub fn featurize(m: &Molecule) -> MolGraph {
    let n = m.n_atoms();
    let mut atoms = Vec::with_capacity(n * ATOM_DIM);
    for i in 0..n {
        atoms.extend_from_slice(&atom_features(m, i));
    }
    let mut edge_features = Vec::with_capacity(m.n_bonds() * 2 * BOND_DIM);
    let mut edge_src = Vec::with_capacity(m.n_bonds() * 2);
    let mut edge_dst = Vec::with_capacity(m.n_bonds() * 2);
    for b in m.bonds() {
        let f = bond_features(b.order, b.in_ring);
        for (s, d) in [(b.begin, b.end), (b.end, b.begin)] {
            edge_features.extend_from_slice(&f);
            edge_src.push(s);
            edge_dst.push(d);
        }
    }
    MolGraph {
        n_atoms: n,
        atom_features: atoms,
        edge_features,
        edge_src,
        edge_dst,
    }
}

/// Several molecules concatenated into one disjoint graph.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchGraph {
    pub n_atoms: usize,
    pub atom_features: Vec<f64>,
    pub edge_features: Vec<f64>,
    pub edge_src: Vec<usize>,
    pub edge_dst: Vec<usize>,
    pub edge_rev: Vec<usize>,
    /// Molecule index of every atom.
    pub atom_mol: Vec<usize>,
    /// Atom range of each molecule.
    pub mol_ranges: Vec<std::ops::Range<usize>>,
}

impl BatchGraph {
    pub fn new<'a>(graphs: impl IntoIterator<Item = &'a MolGraph>) -> Self {
        let mut b = BatchGraph {
            n_atoms: 0,
            atom_features: Vec::new(),
            edge_features: Vec::new(),
            edge_src: Vec::new(),
            edge_dst: Vec::new(),
            edge_rev: Vec::new(),
            atom_mol: Vec::new(),
            mol_ranges: Vec::new(),
        };
        for (k, g) in graphs.into_iter().enumerate() {
            let atom_off = b.n_atoms;
            let edge_off = b.edge_src.len();
            b.atom_features.extend_from_slice(&g.atom_features);
            b.edge_features.extend_from_slice(&g.edge_features);
            b.edge_src.extend(g.edge_src.iter().map(|s| s + atom_off));
            b.edge_dst.extend(g.edge_dst.iter().map(|d| d + atom_off));
            b.edge_rev
                .extend((0..g.n_edges()).map(|e| g.reverse(e) + edge_off));
            b.atom_mol.extend(std::iter::repeat_n(k, g.n_atoms));
            b.mol_ranges.push(atom_off..atom_off + g.n_atoms);
            b.n_atoms += g.n_atoms;
        }
        b
    }

    pub fn n_mols(&self) -> usize {
        self.mol_ranges.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edge_src.len()
    }
}
