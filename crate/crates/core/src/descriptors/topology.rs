//! Distance-based topological indices on the hydrogen-suppressed graph.

use std::collections::VecDeque;

use crate::molgraph::Molecule;

/// Hydrogen-suppressed view of a molecule: heavy atoms only, re-indexed densely.
#[derive(Debug, Clone)]
pub struct HeavyGraph {
    /// Original atom index of each heavy vertex.
    pub atoms: Vec<usize>,
    pub adjacency: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl HeavyGraph {
    pub fn new(m: &Molecule) -> Self {
        let mut index = vec![usize::MAX; m.n_atoms()];
        let mut atoms = Vec::new();
        for (i, a) in m.atoms().iter().enumerate() {
            if a.is_heavy() {
                index[i] = atoms.len();
                atoms.push(i);
            }
        }
        let mut adjacency = vec![Vec::new(); atoms.len()];
        let mut edges = Vec::new();
        for b in m.bonds() {
            let (u, v) = (index[b.begin], index[b.end]);
            if u != usize::MAX && v != usize::MAX {
                adjacency[u].push(v);
                adjacency[v].push(u);
                edges.push((u, v));
            }
        }
        HeavyGraph {
            atoms,
            adjacency,
            edges,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.atoms.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Vertex sets of connected components, each sorted ascending.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n_vertices();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                head += 1;
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// BFS distances from `source`; `usize::MAX` for unreachable vertices.
    pub fn bfs(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n_vertices()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Distance-derived indices of one connected fragment.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentIndices {
    pub wiener: f64,
    /// `None` for fragments with fewer than two atoms.
    pub balaban_j: Option<f64>,
    pub eccentric_connectivity: f64,
}

/// Wiener, Balaban J and eccentric connectivity for the vertex set `fragment`,
/// which must be a connected component of `g`.
pub fn fragment_indices(g: &HeavyGraph, fragment: &[usize]) -> FragmentIndices {
    let mut row_sums = vec![0usize; g.n_vertices()];
    let mut total = 0usize;
    let mut eccentric = 0usize;
    for &s in fragment {
        let dist = g.bfs(s);
        let mut sum = 0;
        let mut ecc = 0;
        for &t in fragment {
            sum += dist[t];
            ecc = ecc.max(dist[t]);
        }
        row_sums[s] = sum;
        total += sum;
        eccentric += ecc * g.degree(s);
    }

    let in_fragment = |v: usize| fragment.binary_search(&v).is_ok();
    let edges: Vec<(usize, usize)> = g
        .edges
        .iter()
        .copied()
        .filter(|&(u, _)| in_fragment(u))
        .collect();
    let balaban_j = (fragment.len() >= 2).then(|| {
        let m = edges.len() as f64;
        let cyclomatic = edges.len() + 1 - fragment.len();
        let s = order_free_sum(
            edges
                .iter()
                .map(|&(u, v)| 1.0 / ((row_sums[u] as f64) * (row_sums[v] as f64)).sqrt())
                .collect(),
        );
        m / (cyclomatic as f64 + 1.0) * s
    });

    FragmentIndices {
        wiener: (total / 2) as f64,
        balaban_j,
        eccentric_connectivity: eccentric as f64,
    }
}

/// Indices of the largest fragment. Among equally large fragments the one
/// with the most edges, then the highest Wiener index, eccentric connectivity
/// and Balaban J is used, so the result does not depend on atom order.
/// `None` when there are no heavy atoms.
pub fn largest_fragment_indices(g: &HeavyGraph) -> Option<FragmentIndices> {
    let components = g.components();
    let size = components.iter().map(Vec::len).max()?;
    components
        .iter()
        .filter(|c| c.len() == size)
        .map(|c| {
            let edges = g
                .edges
                .iter()
                .filter(|e| c.binary_search(&e.0).is_ok())
                .count();
            (edges, fragment_indices(g, c))
        })
        .max_by(|(ea, a), (eb, b)| {
            ea.cmp(eb)
                .then(a.wiener.total_cmp(&b.wiener))
                .then(
                    a.eccentric_connectivity
                        .total_cmp(&b.eccentric_connectivity),
                )
                .then(
                    a.balaban_j
                        .unwrap_or(-1.0)
                        .total_cmp(&b.balaban_j.unwrap_or(-1.0)),
                )
        })
        .map(|x| x.1)
}

/// Wiener index of the largest heavy-atom fragment.
pub fn wiener_index(m: &Molecule) -> f64 {
    largest_fragment_indices(&HeavyGraph::new(m)).map_or(0.0, |f| f.wiener)
}

/// Balaban J of the largest heavy-atom fragment; `None` below two heavy atoms.
pub fn balaban_j(m: &Molecule) -> Option<f64> {
    largest_fragment_indices(&HeavyGraph::new(m))?.balaban_j
}

/// Randić connectivity index summed over all heavy-atom edges.
pub fn randic_chi(g: &HeavyGraph) -> f64 {
    order_free_sum(
        g.edges
            .iter()
            .map(|&(u, v)| 1.0 / ((g.degree(u) * g.degree(v)) as f64).sqrt())
            .collect(),
    )
}

/// Sum of `terms` in ascending order, so equal multisets give identical bits
/// whatever order the atoms come in.
pub(crate) fn order_free_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

/// First and second Zagreb indices.
pub fn zagreb(g: &HeavyGraph) -> (f64, f64) {
    let m1: usize = (0..g.n_vertices()).map(|v| g.degree(v).pow(2)).sum();
    let m2: usize = g
        .edges
        .iter()
        .map(|&(u, v)| g.degree(u) * g.degree(v))
        .sum();
    (m1 as f64, m2 as f64)
}
