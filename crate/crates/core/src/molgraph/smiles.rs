//! SMILES reader covering the organic subset, bracket atoms, branches, ring
//! closures, explicit bond symbols and dot-separated components.
//!
//! Stereo markers (`/`, `\`, `@`, `@@`, `@TH1`, ...) are accepted and dropped.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Atom, Bond, BondOrder, Element, GraphError, Molecule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesError {
    #[error("empty SMILES string")]
    Empty,
    #[error("unbalanced parentheses at position {position}")]
    UnbalancedParentheses { position: usize },
    #[error("ring closure {label} opened but never closed")]
    UnmatchedRingClosure { label: u32 },
    #[error("unknown element '{symbol}' at position {position}")]
    UnknownElement { symbol: String, position: usize },
    #[error("valence exceeded on atom {atom} ({element})")]
    ValenceExceeded { atom: usize, element: Element },
    #[error("unexpected character '{character}' at position {position}")]
    UnexpectedCharacter { character: char, position: usize },
    #[error("malformed bracket atom at position {position}")]
    InvalidBracketAtom { position: usize },
    #[error("bond symbol at position {position} is not followed by an atom or ring closure")]
    DanglingBond { position: usize },
    #[error("invalid bond at position {position}: {reason}")]
    InvalidBond {
        position: usize,
        reason: &'static str,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum BondSymbol {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondSymbol {
    fn order(self) -> BondOrder {
        match self {
            BondSymbol::Single => BondOrder::Single,
            BondSymbol::Double => BondOrder::Double,
            BondSymbol::Triple => BondOrder::Triple,
            BondSymbol::Aromatic => BondOrder::Aromatic,
        }
    }
}

struct RingOpening {
    atom: usize,
    bond: Option<BondSymbol>,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    atoms: Vec<Atom>,
    bracket: Vec<bool>,
    bonds: Vec<Bond>,
    prev: Option<usize>,
    pending: Option<(BondSymbol, usize)>,
    branches: Vec<(usize, usize, bool)>,
    rings: BTreeMap<u32, RingOpening>,
}

/// Parses a SMILES string into a [`Molecule`] with implicit hydrogens assigned.
pub fn parse_smiles(s: &str) -> Result<Molecule, SmilesError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(SmilesError::Empty);
    }
    let mut p = Parser {
        src: s.as_bytes(),
        pos: 0,
        atoms: Vec::new(),
        bracket: Vec::new(),
        bonds: Vec::new(),
        prev: None,
        pending: None,
        branches: Vec::new(),
        rings: BTreeMap::new(),
    };
    p.run()?;
    p.assign_hydrogens()?;
    Ok(Molecule::new(p.atoms, p.bonds)?)
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn unexpected(&self, at: usize) -> SmilesError {
        let character = std::str::from_utf8(&self.src[at..])
            .ok()
            .and_then(|s| s.chars().next())
            .unwrap_or('?');
        SmilesError::UnexpectedCharacter {
            character,
            position: at,
        }
    }

    fn run(&mut self) -> Result<(), SmilesError> {
        while let Some(c) = self.peek() {
            let at = self.pos;
            match c {
                b'(' => {
                    let Some(prev) = self.prev else {
                        return Err(self.unexpected(at));
                    };
                    if self.pending.is_some() {
                        return Err(SmilesError::DanglingBond { position: at });
                    }
                    self.branches.push((prev, at, false));
                    self.pos += 1;
                }
                b')' => {
                    let Some((anchor, _, had_atom)) = self.branches.pop() else {
                        return Err(SmilesError::UnbalancedParentheses { position: at });
                    };
                    if let Some((_, bpos)) = self.pending {
                        return Err(SmilesError::DanglingBond { position: bpos });
                    }
                    if !had_atom {
                        return Err(self.unexpected(at));
                    }
                    self.prev = Some(anchor);
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b':' | b'/' | b'\\' => {
                    if self.prev.is_none() || self.pending.is_some() {
                        return Err(SmilesError::DanglingBond { position: at });
                    }
                    let sym = match c {
                        b'=' => BondSymbol::Double,
                        b'#' => BondSymbol::Triple,
                        b':' => BondSymbol::Aromatic,
                        _ => BondSymbol::Single,
                    };
                    self.pending = Some((sym, at));
                    self.pos += 1;
                }
                b'0'..=b'9' | b'%' => {
                    let label = self.ring_label()?;
                    self.ring_closure(label, at)?;
                }
                b'.' => {
                    if let Some((_, bpos)) = self.pending {
                        return Err(SmilesError::DanglingBond { position: bpos });
                    }
                    if self.prev.is_none() {
                        return Err(self.unexpected(at));
                    }
                    self.prev = None;
                    self.pos += 1;
                }
                b'[' => {
                    let atom = self.bracket_atom()?;
                    self.push_atom(atom, true)?;
                }
                _ => {
                    let atom = self.organic_atom()?;
                    self.push_atom(atom, false)?;
                }
            }
        }
        if let Some(&(_, position, _)) = self.branches.last() {
            return Err(SmilesError::UnbalancedParentheses { position });
        }
        if let Some((_, position)) = self.pending {
            return Err(SmilesError::DanglingBond { position });
        }
        // a trailing '.' separates nothing
        if self.prev.is_none() && !self.atoms.is_empty() {
            return Err(self.unexpected(self.src.len() - 1));
        }
        if let Some((&label, _)) = self.rings.iter().next() {
            return Err(SmilesError::UnmatchedRingClosure { label });
        }
        if self.atoms.is_empty() {
            return Err(SmilesError::Empty);
        }
        Ok(())
    }

    fn ring_label(&mut self) -> Result<u32, SmilesError> {
        let at = self.pos;
        if self.peek() == Some(b'%') {
            let digits = self.src.get(at + 1..at + 3);
            match digits {
                Some(d) if d.iter().all(u8::is_ascii_digit) => {
                    self.pos += 3;
                    Ok(((d[0] - b'0') * 10 + (d[1] - b'0')) as u32)
                }
                _ => Err(self.unexpected(at)),
            }
        } else {
            self.pos += 1;
            Ok((self.src[at] - b'0') as u32)
        }
    }

    fn ring_closure(&mut self, label: u32, at: usize) -> Result<(), SmilesError> {
        let Some(current) = self.prev else {
            return Err(self.unexpected(at));
        };
        let symbol = self.pending.take().map(|(s, _)| s);
        match self.rings.remove(&label) {
            None => {
                self.rings.insert(
                    label,
                    RingOpening {
                        atom: current,
                        bond: symbol,
                    },
                );
                Ok(())
            }
            Some(open) => {
                let symbol = match (open.bond, symbol) {
                    (Some(a), Some(b)) if a != b => {
                        return Err(SmilesError::InvalidBond {
                            position: at,
                            reason: "conflicting ring-closure bond symbols",
                        })
                    }
                    (a, b) => a.or(b),
                };
                if open.atom == current {
                    return Err(SmilesError::InvalidBond {
                        position: at,
                        reason: "ring closure bonds an atom to itself",
                    });
                }
                self.add_bond(open.atom, current, symbol, at)
            }
        }
    }

    fn add_bond(
        &mut self,
        a: usize,
        b: usize,
        symbol: Option<BondSymbol>,
        at: usize,
    ) -> Result<(), SmilesError> {
        let both_aromatic = self.atoms[a].aromatic && self.atoms[b].aromatic;
        let order = match symbol {
            Some(BondSymbol::Aromatic) if !both_aromatic => {
                return Err(SmilesError::InvalidBond {
                    position: at,
                    reason: "aromatic bond between non-aromatic atoms",
                })
            }
            Some(s) => s.order(),
            None if both_aromatic => BondOrder::Aromatic,
            None => BondOrder::Single,
        };
        if self
            .bonds
            .iter()
            .any(|x| (x.begin == a && x.end == b) || (x.begin == b && x.end == a))
        {
            return Err(SmilesError::InvalidBond {
                position: at,
                reason: "duplicate bond between the same atoms",
            });
        }
        self.bonds.push(Bond::new(a, b, order));
        Ok(())
    }

    fn push_atom(&mut self, atom: Atom, bracket: bool) -> Result<(), SmilesError> {
        let idx = self.atoms.len();
        self.atoms.push(atom);
        self.bracket.push(bracket);
        if let Some(prev) = self.prev {
            let (symbol, at) = match self.pending.take() {
                Some((s, at)) => (Some(s), at),
                None => (None, self.pos),
            };
            self.add_bond(prev, idx, symbol, at)?;
        }
        if let Some(top) = self.branches.last_mut() {
            top.2 = true;
        }
        self.prev = Some(idx);
        Ok(())
    }

    fn organic_atom(&mut self) -> Result<Atom, SmilesError> {
        let at = self.pos;
        let rest = &self.src[at..];
        let (element, aromatic, len) = match rest {
            [b'C', b'l', ..] => (Element::CL, false, 2),
            [b'B', b'r', ..] => (Element::BR, false, 2),
            [b'B', ..] => (Element::B, false, 1),
            [b'C', ..] => (Element::C, false, 1),
            [b'N', ..] => (Element::N, false, 1),
            [b'O', ..] => (Element::O, false, 1),
            [b'P', ..] => (Element::P, false, 1),
            [b'S', ..] => (Element::S, false, 1),
            [b'F', ..] => (Element::F, false, 1),
            [b'I', ..] => (Element::I, false, 1),
            [b'b', ..] => (Element::B, true, 1),
            [b'c', ..] => (Element::C, true, 1),
            [b'n', ..] => (Element::N, true, 1),
            [b'o', ..] => (Element::O, true, 1),
            [b'p', ..] => (Element::P, true, 1),
            [b's', ..] => (Element::S, true, 1),
            [c, ..] if c.is_ascii_alphabetic() || *c == b'*' => {
                let len = if rest.len() > 1 && rest[1].is_ascii_lowercase() {
                    2
                } else {
                    1
                };
                let symbol = String::from_utf8_lossy(&rest[..len]).into_owned();
                return Err(SmilesError::UnknownElement {
                    symbol,
                    position: at,
                });
            }
            _ => return Err(self.unexpected(at)),
        };
        self.pos += len;
        let mut atom = Atom::new(element);
        atom.aromatic = aromatic;
        Ok(atom)
    }

    fn digits(&mut self) -> Option<u32> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()?
            .parse()
            .ok()
    }

    fn bracket_atom(&mut self) -> Result<Atom, SmilesError> {
        let open = self.pos;
        let invalid = SmilesError::InvalidBracketAtom { position: open };
        let Some(close) = self.src[open..]
            .iter()
            .position(|&c| c == b']')
            .map(|i| open + i)
        else {
            return Err(invalid);
        };
        self.pos += 1;

        let isotope = match self.digits() {
            Some(v) if v > u16::MAX as u32 => return Err(invalid),
            v => v.map(|v| v as u16),
        };

        let sym_at = self.pos;
        let rest = &self.src[sym_at..close];
        let (element, aromatic, len) = bracket_symbol(rest).ok_or_else(|| {
            if rest
                .first()
                .is_some_and(|c| c.is_ascii_alphabetic() || *c == b'*')
            {
                let len = if rest.len() > 1 && rest[1].is_ascii_lowercase() {
                    2
                } else {
                    1
                };
                SmilesError::UnknownElement {
                    symbol: String::from_utf8_lossy(&rest[..len]).into_owned(),
                    position: sym_at,
                }
            } else {
                invalid.clone()
            }
        })?;
        self.pos += len;

        // chirality: @, @@, @TH1, @AL2, @SP3, @TB12, @OH25
        if self.peek() == Some(b'@') {
            self.pos += 1;
            if self.peek() == Some(b'@') {
                self.pos += 1;
            } else {
                while matches!(self.peek(), Some(b'A'..=b'Z')) && self.pos < close {
                    let two = &self.src[self.pos..(self.pos + 2).min(close)];
                    if matches!(two, b"TH" | b"AL" | b"SP" | b"TB" | b"OH") {
                        self.pos += 2;
                        self.digits();
                    } else {
                        break;
                    }
                }
            }
        }

        let mut explicit_h = 0u8;
        if self.peek() == Some(b'H') {
            self.pos += 1;
            explicit_h = match self.digits() {
                Some(v) if v > 9 => return Err(invalid),
                Some(v) => v as u8,
                None => 1,
            };
        }

        let mut charge: i32 = 0;
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            let unit = if sign == b'+' { 1 } else { -1 };
            self.pos += 1;
            if let Some(v) = self.digits() {
                charge = unit * v as i32;
            } else {
                charge = unit;
                while self.peek() == Some(sign) {
                    self.pos += 1;
                    charge += unit;
                }
            }
            if charge.abs() > 15 {
                return Err(invalid);
            }
        }

        if self.peek() == Some(b':') {
            self.pos += 1;
            if self.digits().is_none() {
                return Err(invalid);
            }
        }

        if self.pos != close {
            return Err(invalid);
        }
        self.pos = close + 1;

        Ok(Atom {
            element,
            formal_charge: charge as i8,
            aromatic,
            isotope,
            explicit_h: Some(explicit_h),
            implicit_h: 0,
        })
    }

    fn assign_hydrogens(&mut self) -> Result<(), SmilesError> {
        let n = self.atoms.len();
        let mut aromatic_bonds = vec![0u32; n];
        let mut other_sum = vec![0u32; n];
        for b in &self.bonds {
            for a in [b.begin, b.end] {
                match b.order {
                    BondOrder::Aromatic => aromatic_bonds[a] += 1,
                    o => other_sum[a] += o.as_f64() as u32,
                }
            }
        }
        for i in 0..n {
            if self.bracket[i] {
                continue;
            }
            let atom = &self.atoms[i];
            self.atoms[i].implicit_h =
                implicit_hydrogens(atom.element, atom.aromatic, aromatic_bonds[i], other_sum[i])
                    .ok_or(SmilesError::ValenceExceeded {
                        atom: i,
                        element: atom.element,
                    })?;
        }
        Ok(())
    }
}

fn bracket_symbol(rest: &[u8]) -> Option<(Element, bool, usize)> {
    const AROMATIC: [(&[u8], Element); 8] = [
        (b"se", Element::SE),
        (b"as", Element::AS),
        (b"b", Element::B),
        (b"c", Element::C),
        (b"n", Element::N),
        (b"o", Element::O),
        (b"p", Element::P),
        (b"s", Element::S),
    ];
    for (sym, el) in AROMATIC {
        if rest.starts_with(sym) {
            return Some((el, true, sym.len()));
        }
    }
    let first = *rest.first()?;
    if !first.is_ascii_uppercase() {
        return None;
    }
    if rest.len() > 1 && rest[1].is_ascii_lowercase() {
        let two = std::str::from_utf8(&rest[..2]).ok()?;
        if let Some(e) = Element::from_symbol(two) {
            return Some((e, false, 2));
        }
    }
    let one = std::str::from_utf8(&rest[..1]).ok()?;
    Element::from_symbol(one).map(|e| (e, false, 1))
}

/// Implicit hydrogen count for an organic-subset atom.
///
/// Aromatic bonds count 1 each. Aromatic B, C, N and P additionally carry one
/// unit for their π bond when that still fits the lowest valence; aromatic O
/// and S donate a lone pair instead. Non-aromatic atoms take the smallest
/// allowed valence at or above their bond-order sum. Returns `None` when the
/// bonds exceed every allowed valence.
pub fn implicit_hydrogens(
    element: Element,
    aromatic: bool,
    aromatic_bonds: u32,
    other_bond_sum: u32,
) -> Option<u8> {
    let valences = element.default_valences()?;
    let base = aromatic_bonds + other_bond_sum;
    if aromatic {
        let lowest = valences[0] as u32;
        let donates_pi = matches!(element, Element::B | Element::C | Element::N | Element::P);
        if donates_pi && base < lowest {
            return Some((lowest - base - 1) as u8);
        }
        if base <= lowest {
            return Some((lowest - base) as u8);
        }
    }
    valences
        .iter()
        .map(|&v| v as u32)
        .find(|&v| v >= base)
        .map(|v| (v - base) as u8)
}
