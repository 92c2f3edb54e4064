//! Small substructure queries matched by backtracking.
//!
//! Matches are counted once per distinct set of target atoms, so a symmetric
//! pattern such as `O=C=O` matched on carbon dioxide counts as two carbonyls,
//! while the two orderings of a single `C=O` embedding count once.

use std::collections::HashSet;

use thiserror::Error;

use super::{BondOrder, Element, Molecule};

pub const MAX_QUERY_ATOMS: usize = 12;

/// Constraints on a single matched atom. Unset fields match anything.
///
/// Hydrogen atoms in the target are only matched when `element` is
/// explicitly hydrogen.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryAtom {
    pub element: Option<Element>,
    pub aromatic: Option<bool>,
    pub charge: Option<i8>,
    pub heavy_degree: Option<u8>,
    pub total_h: Option<u8>,
    /// Require (or forbid) that every incident bond is single.
    pub saturated: Option<bool>,
}

impl QueryAtom {
    pub fn any() -> Self {
        QueryAtom::default()
    }

    pub fn of(element: Element) -> Self {
        QueryAtom {
            element: Some(element),
            ..QueryAtom::default()
        }
    }

    pub fn aromatic(mut self, aromatic: bool) -> Self {
        self.aromatic = Some(aromatic);
        self
    }

    pub fn charge(mut self, charge: i8) -> Self {
        self.charge = Some(charge);
        self
    }

    pub fn heavy_degree(mut self, degree: u8) -> Self {
        self.heavy_degree = Some(degree);
        self
    }

    pub fn hydrogens(mut self, h: u8) -> Self {
        self.total_h = Some(h);
        self
    }

    pub fn saturated(mut self, saturated: bool) -> Self {
        self.saturated = Some(saturated);
        self
    }

    fn accepts(&self, m: &Molecule, atom: usize) -> bool {
        let a = m.atom(atom);
        match self.element {
            Some(e) if e != a.element => return false,
            None if a.element.is_hydrogen() => return false,
            _ => {}
        }
        if self.aromatic.is_some_and(|x| x != a.aromatic)
            || self.charge.is_some_and(|c| c != a.formal_charge)
            || self
                .heavy_degree
                .is_some_and(|d| d as usize != m.heavy_degree(atom))
            || self.total_h.is_some_and(|h| h as usize != m.total_h(atom))
        {
            return false;
        }
        if let Some(sat) = self.saturated {
            let all_single = m
                .neighbors(atom)
                .iter()
                .all(|nb| m.bonds()[nb.bond].order == BondOrder::Single);
            if sat != all_single {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryBond {
    pub a: usize,
    pub b: usize,
    /// `None` matches any bond order.
    pub order: Option<BondOrder>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("query has no atoms")]
    Empty,
    #[error("query has {0} atoms; at most {MAX_QUERY_ATOMS} are supported")]
    TooLarge(usize),
    #[error("query bond {0} references a missing atom or loops on itself")]
    BadBond(usize),
    #[error("query graph is not connected")]
    Disconnected,
}

/// A connected pattern graph of at most [`MAX_QUERY_ATOMS`] atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryGraph {
    atoms: Vec<QueryAtom>,
    bonds: Vec<QueryBond>,
    adjacency: Vec<Vec<(usize, usize)>>,
    /// Visit order: each atom after the first is adjacent to an earlier one.
    order: Vec<usize>,
}

impl QueryGraph {
    pub fn new(atoms: Vec<QueryAtom>, bonds: Vec<QueryBond>) -> Result<Self, QueryError> {
        if atoms.is_empty() {
            return Err(QueryError::Empty);
        }
        if atoms.len() > MAX_QUERY_ATOMS {
            return Err(QueryError::TooLarge(atoms.len()));
        }
        let mut adjacency = vec![Vec::new(); atoms.len()];
        for (i, b) in bonds.iter().enumerate() {
            if b.a >= atoms.len() || b.b >= atoms.len() || b.a == b.b {
                return Err(QueryError::BadBond(i));
            }
            adjacency[b.a].push((b.b, i));
            adjacency[b.b].push((b.a, i));
        }
        let mut order = vec![0];
        let mut seen = vec![false; atoms.len()];
        seen[0] = true;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &(w, _) in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
        }
        if order.len() != atoms.len() {
            return Err(QueryError::Disconnected);
        }
        Ok(QueryGraph {
            atoms,
            bonds,
            adjacency,
            order,
        })
    }

    /// Single-atom query.
    pub fn atom(atom: QueryAtom) -> Self {
        QueryGraph::new(vec![atom], vec![]).expect("single atom query is valid")
    }

    pub fn atoms(&self) -> &[QueryAtom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[QueryBond] {
        &self.bonds
    }
}

/// All distinct matched atom sets (each sorted ascending), in discovery order.
pub fn subgraph_matches(m: &Molecule, q: &QueryGraph) -> Vec<Vec<usize>> {
    let mut state = Search {
        m,
        q,
        mapping: vec![usize::MAX; q.atoms.len()],
        used: vec![false; m.n_atoms()],
        seen: HashSet::new(),
        found: Vec::new(),
    };
    let first = q.order[0];
    for t in 0..m.n_atoms() {
        if state.candidate_ok(first, t) {
            state.assign(first, t);
            state.extend(1);
            state.unassign(first, t);
        }
    }
    state.found
}

/// Number of distinct embeddings of `q` in `m`, deduplicated by matched atom set.
pub fn count_subgraph_matches(m: &Molecule, q: &QueryGraph) -> usize {
    subgraph_matches(m, q).len()
}

struct Search<'a> {
    m: &'a Molecule,
    q: &'a QueryGraph,
    mapping: Vec<usize>,
    used: Vec<bool>,
    seen: HashSet<Vec<usize>>,
    found: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn candidate_ok(&self, qa: usize, t: usize) -> bool {
        !self.used[t]
            && self.m.degree(t) >= self.q.adjacency[qa].len()
            && self.q.atoms[qa].accepts(self.m, t)
    }

    fn assign(&mut self, qa: usize, t: usize) {
        self.mapping[qa] = t;
        self.used[t] = true;
    }

    fn unassign(&mut self, qa: usize, t: usize) {
        self.mapping[qa] = usize::MAX;
        self.used[t] = false;
    }

    fn bonds_consistent(&self, qa: usize, t: usize) -> bool {
        self.q.adjacency[qa].iter().all(|&(qb, bi)| {
            let tb = self.mapping[qb];
            if tb == usize::MAX {
                return true;
            }
            match self.m.bond_between(t, tb) {
                None => false,
                Some(b) => self.q.bonds[bi]
                    .order
                    .is_none_or(|o| o == self.m.bonds()[b].order),
            }
        })
    }

    fn extend(&mut self, depth: usize) {
        if depth == self.q.order.len() {
            let mut set = self.mapping.clone();
            set.sort_unstable();
            if self.seen.insert(set.clone()) {
                self.found.push(set);
            }
            return;
        }
        let qa = self.q.order[depth];
        // anchor on an already-mapped query neighbor
        let anchor = self.q.adjacency[qa]
            .iter()
            .map(|&(qb, _)| self.mapping[qb])
            .find(|&t| t != usize::MAX)
            .expect("visit order keeps the query connected");
        let candidates: Vec<usize> = self.m.neighbors(anchor).iter().map(|nb| nb.atom).collect();
        for t in candidates {
            if self.candidate_ok(qa, t) && self.bonds_consistent(qa, t) {
                self.assign(qa, t);
                self.extend(depth + 1);
                self.unassign(qa, t);
            }
        }
    }
}
