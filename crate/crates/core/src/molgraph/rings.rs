//! Ring perception: cyclomatic ring count plus bridge detection for ring flags.

use super::{Bond, Molecule, Neighbor};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingInfo {
    /// Cyclomatic number (size of the cycle basis).
    pub ring_count: usize,
    /// `true` for every bond lying on at least one cycle.
    pub bond_in_ring: Vec<bool>,
}

/// Recomputes ring information for a molecule from scratch.
pub fn perceive_rings(m: &Molecule) -> RingInfo {
    let adjacency: Vec<Vec<Neighbor>> = (0..m.n_atoms()).map(|a| m.neighbors(a).to_vec()).collect();
    find_ring_bonds(m.n_atoms(), m.bonds(), &adjacency, m.n_components())
}

/// A bond is on a cycle iff it is not a bridge. Bridges are found with an
/// iterative low-link DFS so deep chains cannot overflow the stack.
pub(crate) fn find_ring_bonds(
    n_atoms: usize,
    bonds: &[Bond],
    adjacency: &[Vec<Neighbor>],
    n_components: usize,
) -> RingInfo {
    let mut disc = vec![usize::MAX; n_atoms];
    let mut low = vec![0usize; n_atoms];
    let mut is_bridge = vec![false; bonds.len()];
    let mut timer = 0;

    // (atom, bond used to enter it, next neighbor cursor)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n_atoms {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(frame) = stack.last_mut() {
            let (v, parent_bond, cursor) = *frame;
            if cursor < adjacency[v].len() {
                frame.2 += 1;
                let nb = adjacency[v][cursor];
                if nb.bond == parent_bond {
                    continue;
                }
                if disc[nb.atom] == usize::MAX {
                    disc[nb.atom] = timer;
                    low[nb.atom] = timer;
                    timer += 1;
                    stack.push((nb.atom, nb.bond, 0));
                } else {
                    low[v] = low[v].min(disc[nb.atom]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        is_bridge[parent_bond] = true;
                    }
                }
            }
        }
    }

    RingInfo {
        ring_count: (bonds.len() + n_components).saturating_sub(n_atoms),
        bond_in_ring: is_bridge.iter().map(|b| !b).collect(),
    }
}
