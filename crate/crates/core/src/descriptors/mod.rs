//! The canonical descriptor set and the standardize-then-Winsorize transform
//! that turns it into pre-training targets.
//!
//! Every descriptor is computed from the molecular graph alone. Counting and
//! aggregation descriptors sum over all fragments of a multi-fragment input;
//! the distance-based complexity indices (Wiener, Balaban J, eccentric
//! connectivity) use the largest heavy-atom fragment and set
//! [`DescriptorVector::largest_fragment_only`].

mod groups;
mod matrix;
mod scaler;
pub mod topology;

pub use groups::{functional_group, FunctionalGroup};
pub use matrix::{DescriptorMatrix, MatrixError, CHMD_MAGIC, CHMD_VERSION};
pub use scaler::{apply_scaler, fit_scaler, ScalerError, ScalerStats, DEFAULT_CLIP_SIGMAS};
pub use topology::{balaban_j, wiener_index};

use crate::molgraph::{BondOrder, Element, Molecule};
use topology::HeavyGraph;

/// Version of the canonical descriptor list. Bump when names or order change.
pub const DESCRIPTOR_SET_VERSION: u32 = 1;

/// Per-bond decrement in the McGowan volume sum (cm³/mol).
pub const MCGOWAN_BOND_DECREMENT: f64 = 6.56;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescriptorKind {
    Counting,
    Aggregation,
    Complexity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DescriptorSpec {
    pub name: &'static str,
    pub kind: DescriptorKind,
    pub domain_note: &'static str,
}

const fn spec(
    name: &'static str,
    kind: DescriptorKind,
    domain_note: &'static str,
) -> DescriptorSpec {
    DescriptorSpec {
        name,
        kind,
        domain_note,
    }
}

use DescriptorKind::{Aggregation, Complexity, Counting};

const SUM: &str = "summed over fragments";
const LARGEST: &str = "largest heavy-atom fragment";

/// The canonical descriptor list, in output order.
pub const DESCRIPTORS: [DescriptorSpec; 26] = [
    spec("nHeavy", Counting, SUM),
    spec("nC", Counting, SUM),
    spec("nN", Counting, SUM),
    spec("nO", Counting, SUM),
    spec("nHalogen", Counting, SUM),
    spec("nHetero", Counting, SUM),
    spec("nBondsHeavy", Counting, SUM),
    spec("nAromaticAtoms", Counting, SUM),
    spec("nRings", Counting, "cyclomatic number of the whole graph"),
    spec("nRotatableBonds", Counting, SUM),
    spec("nHBD", Counting, SUM),
    spec("nHBA", Counting, SUM),
    spec("nCarbonyl", Counting, SUM),
    spec("nHydroxyl", Counting, SUM),
    spec("nCarboxyl", Counting, SUM),
    spec("nAmine", Counting, SUM),
    spec("nNitro", Counting, SUM),
    spec("nEster", Counting, SUM),
    spec(
        "MW",
        Aggregation,
        "includes implicit hydrogens; summed over fragments",
    ),
    spec(
        "McGowanVolume",
        Aggregation,
        "includes implicit hydrogens; summed over fragments",
    ),
    spec("RandicChi", Aggregation, SUM),
    spec("ZagrebM1", Aggregation, SUM),
    spec("ZagrebM2", Aggregation, SUM),
    spec("WienerIndex", Complexity, LARGEST),
    spec(
        "BalabanJ",
        Complexity,
        "largest heavy-atom fragment; invalid below two heavy atoms",
    ),
    spec("EccentricConnectivity", Complexity, LARGEST),
];

pub fn descriptor_names() -> Vec<String> {
    DESCRIPTORS.iter().map(|d| d.name.to_string()).collect()
}

/// Column index of a descriptor by name.
pub fn descriptor_index(name: &str) -> Option<usize> {
    DESCRIPTORS.iter().position(|d| d.name == name)
}

/// Descriptor values for one molecule. Invalid cells hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorVector {
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
    /// Set when the input had several heavy-atom fragments and the
    /// complexity indices were computed on the largest one.
    pub largest_fragment_only: bool,
}

impl DescriptorVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        let i = descriptor_index(name)?;
        self.valid[i].then_some(self.values[i])
    }
}

/// McGowan characteristic volume in cm³/mol: atomic volumes of all atoms
/// (hydrogens included) minus 6.56 per bond, counting bonds to hydrogens.
pub fn mcgowan_volume(m: &Molecule) -> Option<f64> {
    let h_volume = Element::H.data().mcgowan_volume;
    let mut terms = Vec::with_capacity(m.n_atoms());
    let mut bonds = m.n_bonds();
    for a in m.atoms() {
        let v = a.element.data().mcgowan_volume;
        if !v.is_finite() {
            return None;
        }
        let h = a.attached_h() as usize;
        terms.push(v + h as f64 * h_volume);
        bonds += h;
    }
    Some(topology::order_free_sum(terms) - MCGOWAN_BOND_DECREMENT * bonds as f64)
}

/// Average molecular weight including every hydrogen.
pub fn molecular_weight(m: &Molecule) -> f64 {
    let h = Element::H.data().weight;
    topology::order_free_sum(
        m.atoms()
            .iter()
            .map(|a| {
                let own = a.isotope.map_or(a.element.data().weight, f64::from);
                own + a.attached_h() as f64 * h
            })
            .collect(),
    )
}

/// Computes the canonical descriptor vector for `m`.
pub fn compute_descriptors(m: &Molecule) -> DescriptorVector {
    let g = HeavyGraph::new(m);
    let heavy = |i: usize| m.atom(i).is_heavy();
    let count_el = |e: Element| m.atoms().iter().filter(|a| a.element == e).count() as f64;

    let n_heavy = g.n_vertices() as f64;
    let n_halogen = m.atoms().iter().filter(|a| a.element.is_halogen()).count() as f64;
    let n_hetero = m
        .atoms()
        .iter()
        .filter(|a| a.is_heavy() && a.element != Element::C)
        .count() as f64;
    let n_aromatic = m
        .atoms()
        .iter()
        .filter(|a| a.is_heavy() && a.aromatic)
        .count() as f64;
    let n_rotatable = m
        .bonds()
        .iter()
        .filter(|b| {
            b.order == BondOrder::Single
                && !b.in_ring
                && heavy(b.begin)
                && heavy(b.end)
                && m.heavy_degree(b.begin) >= 2
                && m.heavy_degree(b.end) >= 2
        })
        .count() as f64;
    let is_n_or_o = |i: usize| matches!(m.atom(i).element, Element::N | Element::O);
    let n_hbd = (0..m.n_atoms())
        .filter(|&i| is_n_or_o(i) && m.total_h(i) >= 1)
        .count() as f64;
    let n_hba = (0..m.n_atoms()).filter(|&i| is_n_or_o(i)).count() as f64;
    let group = |fg: FunctionalGroup| groups::count(m, fg) as f64;
    let (m1, m2) = topology::zagreb(&g);

    let components = g.components();
    let (wiener, balaban, eccentric) = match topology::largest_fragment_indices(&g) {
        None => (None, None, None),
        Some(fi) => (
            Some(fi.wiener),
            fi.balaban_j,
            Some(fi.eccentric_connectivity),
        ),
    };

    let raw: [Option<f64>; 26] = [
        Some(n_heavy),
        Some(count_el(Element::C)),
        Some(count_el(Element::N)),
        Some(count_el(Element::O)),
        Some(n_halogen),
        Some(n_hetero),
        Some(g.edges.len() as f64),
        Some(n_aromatic),
        Some(m.ring_count() as f64),
        Some(n_rotatable),
        Some(n_hbd),
        Some(n_hba),
        Some(group(FunctionalGroup::Carbonyl)),
        Some(group(FunctionalGroup::Hydroxyl)),
        Some(group(FunctionalGroup::Carboxyl)),
        Some(group(FunctionalGroup::Amine)),
        Some(group(FunctionalGroup::Nitro)),
        Some(group(FunctionalGroup::Ester)),
        Some(molecular_weight(m)),
        mcgowan_volume(m),
        Some(topology::randic_chi(&g)),
        Some(m1),
        Some(m2),
        wiener,
        balaban,
        eccentric,
    ];

    DescriptorVector {
        values: raw.iter().map(|v| v.unwrap_or(f64::NAN)).collect(),
        valid: raw.iter().map(Option::is_some).collect(),
        largest_fragment_only: components.len() > 1,
    }
}
