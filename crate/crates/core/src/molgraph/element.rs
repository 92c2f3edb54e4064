//! Periodic table data used by the parser and the descriptor calculators.

use std::fmt;

/// Static per-element data: average atomic weight and McGowan atomic volume (cm³/mol).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementData {
    pub symbol: &'static str,
    pub number: u8,
    pub weight: f64,
    pub mcgowan_volume: f64,
}

static TABLE: [ElementData; 103] = [
    ElementData {
        symbol: "H",
        number: 1,
        weight: 1.008,
        mcgowan_volume: 8.71,
    },
    ElementData {
        symbol: "He",
        number: 2,
        weight: 4.003,
        mcgowan_volume: 6.75,
    },
    ElementData {
        symbol: "Li",
        number: 3,
        weight: 6.941,
        mcgowan_volume: 22.23,
    },
    ElementData {
        symbol: "Be",
        number: 4,
        weight: 9.012,
        mcgowan_volume: 20.27,
    },
    ElementData {
        symbol: "B",
        number: 5,
        weight: 10.812,
        mcgowan_volume: 18.31,
    },
    ElementData {
        symbol: "C",
        number: 6,
        weight: 12.011,
        mcgowan_volume: 16.35,
    },
    ElementData {
        symbol: "N",
        number: 7,
        weight: 14.007,
        mcgowan_volume: 14.39,
    },
    ElementData {
        symbol: "O",
        number: 8,
        weight: 15.999,
        mcgowan_volume: 12.43,
    },
    ElementData {
        symbol: "F",
        number: 9,
        weight: 18.998,
        mcgowan_volume: 10.47,
    },
    ElementData {
        symbol: "Ne",
        number: 10,
        weight: 20.18,
        mcgowan_volume: 8.51,
    },
    ElementData {
        symbol: "Na",
        number: 11,
        weight: 22.99,
        mcgowan_volume: 32.71,
    },
    ElementData {
        symbol: "Mg",
        number: 12,
        weight: 24.305,
        mcgowan_volume: 30.75,
    },
    ElementData {
        symbol: "Al",
        number: 13,
        weight: 26.982,
        mcgowan_volume: 28.79,
    },
    ElementData {
        symbol: "Si",
        number: 14,
        weight: 28.086,
        mcgowan_volume: 26.83,
    },
    ElementData {
        symbol: "P",
        number: 15,
        weight: 30.974,
        mcgowan_volume: 24.87,
    },
    ElementData {
        symbol: "S",
        number: 16,
        weight: 32.067,
        mcgowan_volume: 22.91,
    },
    ElementData {
        symbol: "Cl",
        number: 17,
        weight: 35.453,
        mcgowan_volume: 20.95,
    },
    ElementData {
        symbol: "Ar",
        number: 18,
        weight: 39.948,
        mcgowan_volume: 18.99,
    },
    ElementData {
        symbol: "K",
        number: 19,
        weight: 39.098,
        mcgowan_volume: 51.89,
    },
    ElementData {
        symbol: "Ca",
        number: 20,
        weight: 40.078,
        mcgowan_volume: 50.28,
    },
    ElementData {
        symbol: "Sc",
        number: 21,
        weight: 44.956,
        mcgowan_volume: 48.68,
    },
    ElementData {
        symbol: "Ti",
        number: 22,
        weight: 47.867,
        mcgowan_volume: 47.07,
    },
    ElementData {
        symbol: "V",
        number: 23,
        weight: 50.944,
        mcgowan_volume: 45.47,
    },
    ElementData {
        symbol: "Cr",
        number: 24,
        weight: 51.996,
        mcgowan_volume: 43.86,
    },
    ElementData {
        symbol: "Mn",
        number: 25,
        weight: 54.938,
        mcgowan_volume: 42.26,
    },
    ElementData {
        symbol: "Fe",
        number: 26,
        weight: 55.845,
        mcgowan_volume: 40.65,
    },
    ElementData {
        symbol: "Co",
        number: 27,
        weight: 58.933,
        mcgowan_volume: 39.05,
    },
    ElementData {
        symbol: "Ni",
        number: 28,
        weight: 58.693,
        mcgowan_volume: 37.44,
    },
    ElementData {
        symbol: "Cu",
        number: 29,
        weight: 63.546,
        mcgowan_volume: 35.84,
    },
    ElementData {
        symbol: "Zn",
        number: 30,
        weight: 65.39,
        mcgowan_volume: 34.23,
    },
    ElementData {
        symbol: "Ga",
        number: 31,
        weight: 69.723,
        mcgowan_volume: 32.63,
    },
    ElementData {
        symbol: "Ge",
        number: 32,
        weight: 72.61,
        mcgowan_volume: 31.02,
    },
    ElementData {
        symbol: "As",
        number: 33,
        weight: 74.922,
        mcgowan_volume: 29.42,
    },
    ElementData {
        symbol: "Se",
        number: 34,
        weight: 78.96,
        mcgowan_volume: 27.81,
    },
    ElementData {
        symbol: "Br",
        number: 35,
        weight: 79.904,
        mcgowan_volume: 26.21,
    },
    ElementData {
        symbol: "Kr",
        number: 36,
        weight: 83.8,
        mcgowan_volume: 24.6,
    },
    ElementData {
        symbol: "Rb",
        number: 37,
        weight: 85.468,
        mcgowan_volume: 60.22,
    },
    ElementData {
        symbol: "Sr",
        number: 38,
        weight: 87.62,
        mcgowan_volume: 58.61,
    },
    ElementData {
        symbol: "Y",
        number: 39,
        weight: 88.906,
        mcgowan_volume: 57.01,
    },
    ElementData {
        symbol: "Zr",
        number: 40,
        weight: 91.224,
        mcgowan_volume: 55.4,
    },
    ElementData {
        symbol: "Nb",
        number: 41,
        weight: 92.906,
        mcgowan_volume: 53.8,
    },
    ElementData {
        symbol: "Mo",
        number: 42,
        weight: 95.94,
        mcgowan_volume: 52.19,
    },
    ElementData {
        symbol: "Tc",
        number: 43,
        weight: 98.0,
        mcgowan_volume: 50.59,
    },
    ElementData {
        symbol: "Ru",
        number: 44,
        weight: 101.07,
        mcgowan_volume: 48.98,
    },
    ElementData {
        symbol: "Rh",
        number: 45,
        weight: 102.906,
        mcgowan_volume: 47.38,
    },
    ElementData {
        symbol: "Pd",
        number: 46,
        weight: 106.42,
        mcgowan_volume: 45.77,
    },
    ElementData {
        symbol: "Ag",
        number: 47,
        weight: 107.868,
        mcgowan_volume: 44.17,
    },
    ElementData {
        symbol: "Cd",
        number: 48,
        weight: 112.412,
        mcgowan_volume: 42.56,
    },
    ElementData {
        symbol: "In",
        number: 49,
        weight: 114.818,
        mcgowan_volume: 40.96,
    },
    ElementData {
        symbol: "Sn",
        number: 50,
        weight: 118.711,
        mcgowan_volume: 39.35,
    },
    ElementData {
        symbol: "Sb",
        number: 51,
        weight: 121.76,
        mcgowan_volume: 37.75,
    },
    ElementData {
        symbol: "Te",
        number: 52,
        weight: 127.6,
        mcgowan_volume: 36.14,
    },
    ElementData {
        symbol: "I",
        number: 53,
        weight: 126.904,
        mcgowan_volume: 34.54,
    },
    ElementData {
        symbol: "Xe",
        number: 54,
        weight: 131.29,
        mcgowan_volume: 32.93,
    },
    ElementData {
        symbol: "Cs",
        number: 55,
        weight: 132.905,
        mcgowan_volume: 77.25,
    },
    ElementData {
        symbol: "Ba",
        number: 56,
        weight: 137.328,
        mcgowan_volume: 76.0,
    },
    ElementData {
        symbol: "La",
        number: 57,
        weight: 138.906,
        mcgowan_volume: 74.75,
    },
    ElementData {
        symbol: "Ce",
        number: 58,
        weight: 140.116,
        mcgowan_volume: 73.49,
    },
    ElementData {
        symbol: "Pr",
        number: 59,
        weight: 140.908,
        mcgowan_volume: 72.24,
    },
    ElementData {
        symbol: "Nd",
        number: 60,
        weight: 144.24,
        mcgowan_volume: 70.99,
    },
    ElementData {
        symbol: "Pm",
        number: 61,
        weight: 145.0,
        mcgowan_volume: 69.74,
    },
    ElementData {
        symbol: "Sm",
        number: 62,
        weight: 150.36,
        mcgowan_volume: 68.49,
    },
    ElementData {
        symbol: "Eu",
        number: 63,
        weight: 151.964,
        mcgowan_volume: 67.23,
    },
    ElementData {
        symbol: "Gd",
        number: 64,
        weight: 157.25,
        mcgowan_volume: 65.98,
    },
    ElementData {
        symbol: "Tb",
        number: 65,
        weight: 158.925,
        mcgowan_volume: 64.73,
    },
    ElementData {
        symbol: "Dy",
        number: 66,
        weight: 162.5,
        mcgowan_volume: 63.48,
    },
    ElementData {
        symbol: "Ho",
        number: 67,
        weight: 164.93,
        mcgowan_volume: 62.23,
    },
    ElementData {
        symbol: "Er",
        number: 68,
        weight: 167.26,
        mcgowan_volume: 60.97,
    },
    ElementData {
        symbol: "Tm",
        number: 69,
        weight: 168.934,
        mcgowan_volume: 59.72,
    },
    ElementData {
        symbol: "Yb",
        number: 70,
        weight: 173.04,
        mcgowan_volume: 58.47,
    },
    ElementData {
        symbol: "Lu",
        number: 71,
        weight: 174.967,
        mcgowan_volume: 57.22,
    },
    ElementData {
        symbol: "Hf",
        number: 72,
        weight: 178.49,
        mcgowan_volume: 55.97,
    },
    ElementData {
        symbol: "Ta",
        number: 73,
        weight: 180.948,
        mcgowan_volume: 54.71,
    },
    ElementData {
        symbol: "W",
        number: 74,
        weight: 183.84,
        mcgowan_volume: 53.46,
    },
    ElementData {
        symbol: "Re",
        number: 75,
        weight: 186.207,
        mcgowan_volume: 52.21,
    },
    ElementData {
        symbol: "Os",
        number: 76,
        weight: 190.23,
        mcgowan_volume: 50.96,
    },
    ElementData {
        symbol: "Ir",
        number: 77,
        weight: 192.217,
        mcgowan_volume: 49.71,
    },
    ElementData {
        symbol: "Pt",
        number: 78,
        weight: 195.078,
        mcgowan_volume: 48.45,
    },
    ElementData {
        symbol: "Au",
        number: 79,
        weight: 196.967,
        mcgowan_volume: 47.2,
    },
    ElementData {
        symbol: "Hg",
        number: 80,
        weight: 200.59,
        mcgowan_volume: 45.95,
    },
    ElementData {
        symbol: "Tl",
        number: 81,
        weight: 204.383,
        mcgowan_volume: 44.7,
    },
    ElementData {
        symbol: "Pb",
        number: 82,
        weight: 207.2,
        mcgowan_volume: 43.45,
    },
    ElementData {
        symbol: "Bi",
        number: 83,
        weight: 208.98,
        mcgowan_volume: 42.19,
    },
    ElementData {
        symbol: "Po",
        number: 84,
        weight: 209.0,
        mcgowan_volume: 40.94,
    },
    ElementData {
        symbol: "At",
        number: 85,
        weight: 210.0,
        mcgowan_volume: 39.69,
    },
    ElementData {
        symbol: "Rn",
        number: 86,
        weight: 222.0,
        mcgowan_volume: 38.44,
    },
    ElementData {
        symbol: "Fr",
        number: 87,
        weight: 223.0,
        mcgowan_volume: 75.59,
    },
    ElementData {
        symbol: "Ra",
        number: 88,
        weight: 226.0,
        mcgowan_volume: 74.34,
    },
    ElementData {
        symbol: "Ac",
        number: 89,
        weight: 227.0,
        mcgowan_volume: 73.09,
    },
    ElementData {
        symbol: "Th",
        number: 90,
        weight: 232.038,
        mcgowan_volume: 71.83,
    },
    ElementData {
        symbol: "Pa",
        number: 91,
        weight: 231.036,
        mcgowan_volume: 70.58,
    },
    ElementData {
        symbol: "U",
        number: 92,
        weight: 238.029,
        mcgowan_volume: 69.33,
    },
    ElementData {
        symbol: "Np",
        number: 93,
        weight: 237.0,
        mcgowan_volume: 68.08,
    },
    ElementData {
        symbol: "Pu",
        number: 94,
        weight: 244.0,
        mcgowan_volume: 66.83,
    },
    ElementData {
        symbol: "Am",
        number: 95,
        weight: 243.0,
        mcgowan_volume: 65.57,
    },
    ElementData {
        symbol: "Cm",
        number: 96,
        weight: 247.0,
        mcgowan_volume: 64.32,
    },
    ElementData {
        symbol: "Bk",
        number: 97,
        weight: 247.0,
        mcgowan_volume: 63.07,
    },
    ElementData {
        symbol: "Cf",
        number: 98,
        weight: 251.0,
        mcgowan_volume: 61.82,
    },
    ElementData {
        symbol: "Es",
        number: 99,
        weight: 252.0,
        mcgowan_volume: 60.57,
    },
    ElementData {
        symbol: "Fm",
        number: 100,
        weight: 257.0,
        mcgowan_volume: 59.31,
    },
    ElementData {
        symbol: "Md",
        number: 101,
        weight: 258.0,
        mcgowan_volume: 58.06,
    },
    ElementData {
        symbol: "No",
        number: 102,
        weight: 259.0,
        mcgowan_volume: 56.81,
    },
    ElementData {
        symbol: "Lr",
        number: 103,
        weight: 262.0,
        mcgowan_volume: 55.56,
    },
];

/// A chemical element, identified by atomic number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(u8);

impl Element {
    pub const H: Element = Element(1);
    pub const B: Element = Element(5);
    pub const C: Element = Element(6);
    pub const N: Element = Element(7);
    pub const O: Element = Element(8);
    pub const F: Element = Element(9);
    pub const P: Element = Element(15);
    pub const S: Element = Element(16);
    pub const CL: Element = Element(17);
    pub const AS: Element = Element(33);
    pub const SE: Element = Element(34);
    pub const BR: Element = Element(35);
    pub const I: Element = Element(53);

    pub fn from_number(number: u8) -> Option<Element> {
        (1..=TABLE.len() as u8)
            .contains(&number)
            .then_some(Element(number))
    }

    /// Case-sensitive lookup (`"Cl"`, not `"CL"`).
    pub fn from_symbol(symbol: &str) -> Option<Element> {
        TABLE
            .iter()
            .find(|e| e.symbol == symbol)
            .map(|e| Element(e.number))
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn data(self) -> &'static ElementData {
        &TABLE[self.0 as usize - 1]
    }

    pub fn symbol(self) -> &'static str {
        self.data().symbol
    }

    pub fn is_hydrogen(self) -> bool {
        self == Element::H
    }

    pub fn is_halogen(self) -> bool {
        matches!(self, Element::F | Element::CL | Element::BR | Element::I)
    }

    /// Allowed valences for organic-subset atoms, smallest first.
    pub fn default_valences(self) -> Option<&'static [u8]> {
        match self {
            Element::B => Some(&[3]),
            Element::C => Some(&[4]),
            Element::N => Some(&[3, 5]),
            Element::O => Some(&[2]),
            Element::P => Some(&[3, 5]),
            Element::S => Some(&[2, 4, 6]),
            Element::F | Element::CL | Element::BR | Element::I => Some(&[1]),
            _ => None,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}
