//! SMILES output. Not canonical: the string depends on atom order, but
//! parsing it back yields the same graph up to atom relabeling.

use std::fmt::Write;

use super::smiles::implicit_hydrogens;
use super::{BondOrder, Element, Molecule};

const ORGANIC: [Element; 10] = [
    Element::B,
    Element::C,
    Element::N,
    Element::O,
    Element::P,
    Element::S,
    Element::F,
    Element::CL,
    Element::BR,
    Element::I,
];

/// Writes a SMILES string for `m`, depth-first from the lowest atom index of
/// each component.
pub fn to_smiles(m: &Molecule) -> String {
    let n = m.n_atoms();
    // pass 1: spanning forest, remembering non-tree bonds as ring closures
    let mut visited = vec![false; n];
    let mut tree_bond = vec![false; m.n_bonds()];
    let mut children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut roots = Vec::new();
    let mut order = vec![usize::MAX; n];
    let mut counter = 0;
    for root in 0..n {
        if visited[root] {
            continue;
        }
        roots.push(root);
        let mut stack = vec![(root, 0usize)];
        visited[root] = true;
        order[root] = counter;
        counter += 1;
        while let Some(frame) = stack.last_mut() {
            let (v, cursor) = *frame;
            if cursor >= m.degree(v) {
                stack.pop();
                continue;
            }
            frame.1 += 1;
            let nb = m.neighbors(v)[cursor];
            if !visited[nb.atom] {
                visited[nb.atom] = true;
                order[nb.atom] = counter;
                counter += 1;
                tree_bond[nb.bond] = true;
                children[v].push((nb.atom, nb.bond));
                stack.push((nb.atom, 0));
            }
        }
    }

    // ring-closure bonds per atom, opened at whichever endpoint is written first
    let mut closures: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, b) in m.bonds().iter().enumerate() {
        if !tree_bond[i] {
            closures[b.begin].push(i);
            closures[b.end].push(i);
        }
    }
    for list in &mut closures {
        list.sort_by_key(|&bi| {
            let b = &m.bonds()[bi];
            (order[b.begin].max(order[b.end]), bi)
        });
    }

    let mut w = Writer {
        m,
        out: String::new(),
        labels: vec![0; m.n_bonds()],
        in_use: Vec::new(),
        children,
        closures,
    };
    for (k, &root) in roots.iter().enumerate() {
        if k > 0 {
            w.out.push('.');
        }
        w.write_tree(root);
    }
    w.out
}

struct Writer<'a> {
    m: &'a Molecule,
    out: String,
    labels: Vec<u32>,
    in_use: Vec<bool>,
    children: Vec<Vec<(usize, usize)>>,
    closures: Vec<Vec<usize>>,
}

impl Writer<'_> {
    fn write_tree(&mut self, root: usize) {
        // explicit stack of (atom, bond into it, is_branch, next child cursor)
        enum Step {
            Enter {
                atom: usize,
                bond: Option<usize>,
                branch: bool,
            },
            Close,
        }
        let mut stack = vec![Step::Enter {
            atom: root,
            bond: None,
            branch: false,
        }];
        while let Some(step) = stack.pop() {
            match step {
                Step::Close => self.out.push(')'),
                Step::Enter { atom, bond, branch } => {
                    if branch {
                        self.out.push('(');
                        stack.push(Step::Close);
                    }
                    if let Some(b) = bond {
                        self.write_bond(b);
                    }
                    self.write_atom(atom);
                    self.write_closures(atom);
                    let kids = self.children[atom].clone();
                    let last = kids.len().saturating_sub(1);
                    // push in reverse so the first child is written first
                    for (k, &(child, b)) in kids.iter().enumerate().rev() {
                        stack.push(Step::Enter {
                            atom: child,
                            bond: Some(b),
                            branch: k != last,
                        });
                    }
                }
            }
        }
    }

    fn write_closures(&mut self, atom: usize) {
        for bi in self.closures[atom].clone() {
            if self.labels[bi] == 0 {
                let label = match self.in_use.iter().position(|&u| !u) {
                    Some(i) => i,
                    None => {
                        self.in_use.push(false);
                        self.in_use.len() - 1
                    }
                };
                self.in_use[label] = true;
                self.labels[bi] = label as u32 + 1;
                self.write_bond(bi);
                self.write_label(label as u32 + 1);
            } else {
                let label = self.labels[bi];
                self.in_use[label as usize - 1] = false;
                self.write_label(label);
            }
        }
    }

    fn write_label(&mut self, label: u32) {
        if label < 10 {
            write!(self.out, "{label}").unwrap();
        } else {
            write!(self.out, "%{label:02}").unwrap();
        }
    }

    fn write_bond(&mut self, bi: usize) {
        let b = &self.m.bonds()[bi];
        let both_aromatic = self.m.atom(b.begin).aromatic && self.m.atom(b.end).aromatic;
        match b.order {
            BondOrder::Single if both_aromatic => self.out.push('-'),
            BondOrder::Single | BondOrder::Aromatic => {}
            BondOrder::Double => self.out.push('='),
            BondOrder::Triple => self.out.push('#'),
        }
    }

    fn write_atom(&mut self, i: usize) {
        let m = self.m;
        let a = m.atom(i);
        let symbol = if a.aromatic {
            a.element.symbol().to_ascii_lowercase()
        } else {
            a.element.symbol().to_string()
        };
        if a.formal_charge == 0 && a.isotope.is_none() && ORGANIC.contains(&a.element) {
            let mut arom = 0;
            let mut other = 0;
            for nb in m.neighbors(i) {
                match m.bonds()[nb.bond].order {
                    BondOrder::Aromatic => arom += 1,
                    o => other += o.as_f64() as u32,
                }
            }
            if implicit_hydrogens(a.element, a.aromatic, arom, other) == Some(a.attached_h()) {
                self.out.push_str(&symbol);
                return;
            }
        }
        self.out.push('[');
        if let Some(iso) = a.isotope {
            write!(self.out, "{iso}").unwrap();
        }
        self.out.push_str(&symbol);
        match a.attached_h() {
            0 => {}
            1 => self.out.push('H'),
            h => write!(self.out, "H{h}").unwrap(),
        }
        match a.formal_charge {
            0 => {}
            1 => self.out.push('+'),
            -1 => self.out.push('-'),
            c if c > 0 => write!(self.out, "+{c}").unwrap(),
            c => write!(self.out, "-{}", -c).unwrap(),
        }
        self.out.push(']');
    }
}
