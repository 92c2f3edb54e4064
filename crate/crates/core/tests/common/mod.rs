//! Brute-force oracles shared by the integration tests. Each one recomputes a
//! quantity from the raw atom and bond lists without the library's helpers.

#![allow(dead_code)]

use molfm::descriptors::{compute_descriptors, DESCRIPTORS};
use molfm::molgraph::{BondOrder, Element, Molecule};
use molfm::synth::{random_corpus, GenConfig};

/// Corpus of small molecules (at most 12 heavy atoms).
pub fn small_corpus(n: usize, seed: u64) -> Vec<(String, Molecule)> {
    let cfg = GenConfig {
        min_heavy: 1,
        max_heavy: 12,
        branch_prob: 0.35,
    };
    random_corpus(n, &cfg, seed)
}

pub fn column(name: &str) -> usize {
    DESCRIPTORS.iter().position(|d| d.name == name).unwrap()
}

/// Panics on the first descriptor that disagrees with a brute-force oracle.
pub fn check_against_oracles(s: &str, m: &Molecule) {
    let d = compute_descriptors(m);
    let get = |name: &str| d.values[column(name)];
    assert_eq!(get("WienerIndex"), wiener(m) as f64, "{s}");
    let (m1, m2) = zagreb(m);
    assert_eq!(
        (get("ZagrebM1"), get("ZagrebM2")),
        (m1 as f64, m2 as f64),
        "{s}"
    );
    let r = randic(m);
    assert!((get("RandicChi") - r).abs() <= 1e-9 * r.max(1.0), "{s}");
    match balaban_j(m) {
        Some(j) => assert!((get("BalabanJ") - j).abs() <= 1e-9 * j, "{s}"),
        None => assert!(!d.valid[column("BalabanJ")], "{s}"),
    }
    for p in group_patterns() {
        assert_eq!(get(p.name), count_matches(m, &p) as f64, "{s} {}", p.name);
    }
}

pub struct Heavy {
    /// Original atom index of each heavy vertex.
    pub atoms: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub dist: Vec<Vec<u64>>,
}

const INF: u64 = u64::MAX / 4;

impl Heavy {
    pub fn new(m: &Molecule) -> Self {
        let atoms: Vec<usize> = (0..m.n_atoms())
            .filter(|&i| m.atom(i).element != Element::H)
            .collect();
        let pos = |a: usize| atoms.iter().position(|&x| x == a);
        let edges: Vec<(usize, usize)> = m
            .bonds()
            .iter()
            .filter_map(|b| Some((pos(b.begin)?, pos(b.end)?)))
            .collect();
        let n = atoms.len();
        let mut dist = vec![vec![INF; n]; n];
        for (i, row) in dist.iter_mut().enumerate() {
            row[i] = 0;
        }
        for &(u, v) in &edges {
            dist[u][v] = 1;
            dist[v][u] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let through = dist[i][k] + dist[k][j];
                    if through < dist[i][j] {
                        dist[i][j] = through;
                    }
                }
            }
        }
        Heavy { atoms, edges, dist }
    }

    pub fn degree(&self, v: usize) -> u64 {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count() as u64
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let n = self.atoms.len();
        (0..n)
            .filter_map(|s| {
                let c: Vec<usize> = (0..n).filter(|&t| self.dist[s][t] < INF).collect();
                (c[0] == s).then_some(c)
            })
            .collect()
    }

    fn wiener_on(&self, f: &[usize]) -> u64 {
        let mut w = 0;
        for (a, &i) in f.iter().enumerate() {
            for &j in &f[a + 1..] {
                w += self.dist[i][j];
            }
        }
        w
    }

    fn eccentric_on(&self, f: &[usize]) -> u64 {
        f.iter()
            .map(|&i| f.iter().map(|&j| self.dist[i][j]).max().unwrap() * self.degree(i))
            .sum()
    }

    fn balaban_on(&self, f: &[usize]) -> Option<f64> {
        if f.len() < 2 {
            return None;
        }
        let row = |i: usize| -> u64 { f.iter().map(|&j| self.dist[i][j]).sum() };
        let edges: Vec<_> = self.edges.iter().filter(|(u, _)| f.contains(u)).collect();
        let mu = edges.len() as f64 - f.len() as f64 + 1.0;
        let s: f64 = edges
            .iter()
            .map(|&&(u, v)| ((row(u) * row(v)) as f64).powf(-0.5))
            .sum();
        Some(edges.len() as f64 / (mu + 1.0) * s)
    }

    /// Largest connected vertex set. Ties go to more edges, then larger
    /// Wiener index, eccentric connectivity and Balaban J.
    pub fn largest_fragment(&self) -> Vec<usize> {
        let comps = self.components();
        let size = comps.iter().map(Vec::len).max().unwrap_or(0);
        let key = |f: &Vec<usize>| {
            let edges = self.edges.iter().filter(|(u, _)| f.contains(u)).count();
            (
                edges,
                self.wiener_on(f),
                self.eccentric_on(f),
                self.balaban_on(f).unwrap_or(-1.0),
            )
        };
        comps
            .into_iter()
            .filter(|c| c.len() == size)
            .max_by(|a, b| {
                let (ka, kb) = (key(a), key(b));
                (ka.0, ka.1, ka.2)
                    .cmp(&(kb.0, kb.1, kb.2))
                    .then(ka.3.total_cmp(&kb.3))
            })
            .unwrap_or_default()
    }
}

pub fn wiener(m: &Molecule) -> u64 {
    let h = Heavy::new(m);
    h.wiener_on(&h.largest_fragment())
}

pub fn balaban_j(m: &Molecule) -> Option<f64> {
    let h = Heavy::new(m);
    h.balaban_on(&h.largest_fragment())
}

pub fn zagreb(m: &Molecule) -> (u64, u64) {
    let h = Heavy::new(m);
    let m1 = (0..h.atoms.len()).map(|v| h.degree(v).pow(2)).sum();
    let m2 = h
        .edges
        .iter()
        .map(|&(u, v)| h.degree(u) * h.degree(v))
        .sum();
    (m1, m2)
}

pub fn randic(m: &Molecule) -> f64 {
    let h = Heavy::new(m);
    h.edges
        .iter()
        .map(|&(u, v)| ((h.degree(u) * h.degree(v)) as f64).powf(-0.5))
        .sum()
}

type AtomTest = fn(&Molecule, usize) -> bool;

/// A pattern for exhaustive matching: atom predicates plus bonds
/// `(i, j, required order or any)`.
pub struct Pattern {
    pub name: &'static str,
    pub atoms: Vec<AtomTest>,
    pub bonds: Vec<(usize, usize, Option<BondOrder>)>,
}

fn bond_order(m: &Molecule, a: usize, b: usize) -> Option<BondOrder> {
    m.bonds()
        .iter()
        .find(|x| (x.begin == a && x.end == b) || (x.begin == b && x.end == a))
        .map(|x| x.order)
}

fn is(m: &Molecule, i: usize, e: Element) -> bool {
    m.atom(i).element == e
}

fn hydrogens(m: &Molecule, i: usize) -> usize {
    let a = m.atom(i);
    let attached = m
        .bonds()
        .iter()
        .filter(|b| {
            (b.begin == i && m.atom(b.end).element == Element::H)
                || (b.end == i && m.atom(b.begin).element == Element::H)
        })
        .count();
    a.implicit_h as usize + a.explicit_h.unwrap_or(0) as usize + attached
}

/// The six shipped functional groups, restated as independent predicates.
pub fn group_patterns() -> Vec<Pattern> {
    use BondOrder::{Double, Single};
    vec![
        Pattern {
            name: "nCarbonyl",
            atoms: vec![|m, i| is(m, i, Element::C), |m, i| is(m, i, Element::O)],
            bonds: vec![(0, 1, Some(Double))],
        },
        Pattern {
            name: "nHydroxyl",
            atoms: vec![
                |m, i| is(m, i, Element::O) && hydrogens(m, i) == 1,
                |m, i| !is(m, i, Element::H),
            ],
            bonds: vec![(0, 1, Some(Single))],
        },
        Pattern {
            name: "nCarboxyl",
            atoms: vec![
                |m, i| is(m, i, Element::C),
                |m, i| is(m, i, Element::O),
                |m, i| is(m, i, Element::O) && hydrogens(m, i) == 1,
            ],
            bonds: vec![(0, 1, Some(Double)), (0, 2, Some(Single))],
        },
        Pattern {
            name: "nAmine",
            atoms: vec![|m, i| {
                let a = m.atom(i);
                a.element == Element::N
                    && !a.aromatic
                    && a.formal_charge == 0
                    && m.bonds()
                        .iter()
                        .filter(|b| b.begin == i || b.end == i)
                        .all(|b| b.order == BondOrder::Single)
            }],
            bonds: vec![],
        },
        Pattern {
            name: "nNitro",
            atoms: vec![
                |m, i| is(m, i, Element::N),
                |m, i| is(m, i, Element::O),
                |m, i| is(m, i, Element::O),
            ],
            bonds: vec![(0, 1, Some(Double)), (0, 2, None)],
        },
        Pattern {
            name: "nEster",
            atoms: vec![
                |m, i| is(m, i, Element::C),
                |m, i| is(m, i, Element::O),
                |m, i| is(m, i, Element::O),
                |m, i| is(m, i, Element::C),
            ],
            bonds: vec![
                (0, 1, Some(Double)),
                (0, 2, Some(Single)),
                (2, 3, Some(Single)),
            ],
        },
    ]
}

/// Distinct matched atom sets over every injective assignment of pattern atoms.
pub fn count_matches(m: &Molecule, p: &Pattern) -> usize {
    let n = m.n_atoms();
    let k = p.atoms.len();
    let mut sets = std::collections::BTreeSet::new();
    let mut tuple = vec![0usize; k];
    let total = n.pow(k as u32);
    for code in 0..total {
        let mut c = code;
        for t in tuple.iter_mut() {
            *t = c % n;
            c /= n;
        }
        let distinct = (0..k).all(|a| (a + 1..k).all(|b| tuple[a] != tuple[b]));
        if !distinct || !(0..k).all(|a| (p.atoms[a])(m, tuple[a])) {
            continue;
        }
        let bonds_ok =
            p.bonds.iter().all(
                |&(a, b, order)| match (bond_order(m, tuple[a], tuple[b]), order) {
                    (None, _) => false,
                    (Some(_), None) => true,
                    (Some(o), Some(want)) => o == want,
                },
            );
        if bonds_ok {
            let mut s = tuple.clone();
            s.sort_unstable();
            sets.insert(s);
        }
    }
    sets.len()
}

/// One-sided t-distribution CDF by direct quadrature of the density, used to
/// check closed-form implementations. Integrates from 0 with composite
/// Simpson on a tan-substituted variable.
pub fn t_cdf_quadrature(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let ln_c = statrs::function::gamma::ln_gamma((df + 1.0) / 2.0)
        - statrs::function::gamma::ln_gamma(df / 2.0)
        - 0.5 * (df * std::f64::consts::PI).ln();
    let density = |x: f64| (ln_c - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp();
    // x = tan(u), dx = sec²(u) du maps [0, t] to [0, atan t]
    let upper = t.abs().atan();
    let n = 20_000;
    let h = upper / n as f64;
    let f = |u: f64| {
        let c = u.cos();
        density(u.tan()) / (c * c)
    };
    let mut s = f(0.0) + f(upper);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(i as f64 * h);
    }
    let half = s * h / 3.0;
    if t >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}
