//! Shipped functional-group patterns.

use std::sync::LazyLock;

use crate::molgraph::{
    count_subgraph_matches, BondOrder, Element, Molecule, QueryAtom, QueryBond, QueryGraph,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionalGroup {
    /// C=O
    Carbonyl,
    /// O bearing exactly one H, single-bonded to a heavy atom (acid OH included).
    Hydroxyl,
    /// `C(=O)[OH]`
    Carboxyl,
    /// Neutral non-aromatic N with only single bonds (amide N included).
    Amine,
    /// N(=O)~O, charge-separated or not
    Nitro,
    /// C(=O)-O-C
    Ester,
}

fn bond(a: usize, b: usize, order: Option<BondOrder>) -> QueryBond {
    QueryBond { a, b, order }
}

static PATTERNS: LazyLock<[QueryGraph; 6]> = LazyLock::new(|| {
    use BondOrder::{Double, Single};
    let c = || QueryAtom::of(Element::C);
    let o = || QueryAtom::of(Element::O);
    let n = || QueryAtom::of(Element::N);
    let build = |atoms, bonds| QueryGraph::new(atoms, bonds).expect("shipped pattern is valid");
    [
        build(vec![c(), o()], vec![bond(0, 1, Some(Double))]),
        build(
            vec![o().hydrogens(1), QueryAtom::any()],
            vec![bond(0, 1, Some(Single))],
        ),
        build(
            vec![c(), o(), o().hydrogens(1)],
            vec![bond(0, 1, Some(Double)), bond(0, 2, Some(Single))],
        ),
        QueryGraph::atom(n().aromatic(false).charge(0).saturated(true)),
        build(
            vec![n(), o(), o()],
            vec![bond(0, 1, Some(Double)), bond(0, 2, None)],
        ),
        build(
            vec![c(), o(), o(), c()],
            vec![
                bond(0, 1, Some(Double)),
                bond(0, 2, Some(Single)),
                bond(2, 3, Some(Single)),
            ],
        ),
    ]
});

pub fn functional_group(group: FunctionalGroup) -> &'static QueryGraph {
    let i = match group {
        FunctionalGroup::Carbonyl => 0,
        FunctionalGroup::Hydroxyl => 1,
        FunctionalGroup::Carboxyl => 2,
        FunctionalGroup::Amine => 3,
        FunctionalGroup::Nitro => 4,
        FunctionalGroup::Ester => 5,
    };
    &PATTERNS[i]
}

pub(crate) fn count(m: &Molecule, group: FunctionalGroup) -> usize {
    count_subgraph_matches(m, functional_group(group))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;
    use FunctionalGroup::*;

    fn n(s: &str, g: FunctionalGroup) -> usize {
        count(&parse_smiles(s).unwrap(), g)
    }

    #[test]
    fn group_counts() {
        assert_eq!(n("CC(=O)O", Carbonyl), 1);
        assert_eq!(n("CC(=O)O", Carboxyl), 1);
        assert_eq!(n("CC(=O)O", Hydroxyl), 1);
        assert_eq!(n("CC(=O)OC", Ester), 1);
        assert_eq!(n("CC(=O)OC", Carboxyl), 0);
        assert_eq!(n("OC(=O)CCC(=O)O", Carboxyl), 2);
        assert_eq!(n("C[N+](=O)[O-]", Nitro), 1);
        assert_eq!(n("CN(=O)=O", Nitro), 1);
        assert_eq!(n("CCN", Amine), 1);
        assert_eq!(n("CN(C)C", Amine), 1);
        assert_eq!(n("c1ccncc1", Amine), 0);
        assert_eq!(n("CC#N", Amine), 0);
        assert_eq!(n("Oc1ccccc1", Hydroxyl), 1);
        assert_eq!(n("O", Hydroxyl), 0);
    }
}
