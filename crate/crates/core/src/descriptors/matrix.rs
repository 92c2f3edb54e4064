//! Dense descriptor matrix with a validity mask, plus the `CHMD` binary format.
//!
//! Layout (all little-endian):
//!
//! ```text
//! magic  b"CHMD"
//! u32    format version
//! u64    rows
//! u64    cols
//! cols × (u32 byte length, UTF-8 name)
//! rows × cols f32, row-major; invalid cells are quiet NaN
//! ```

use std::io::{self, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use super::{compute_descriptors, descriptor_names};
use crate::molgraph::Molecule;

pub const CHMD_MAGIC: [u8; 4] = *b"CHMD";
pub const CHMD_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not a descriptor matrix file (bad magic {0:?})")]
    BadMagic([u8; 4]),
    #[error("unsupported descriptor matrix version {0}")]
    UnsupportedVersion(u32),
    #[error("descriptor name is not valid UTF-8")]
    BadName,
    #[error("row has {got} values, expected {expected}")]
    RowLength { got: usize, expected: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorMatrix {
    names: Vec<String>,
    values: Vec<f64>,
    mask: Vec<bool>,
    row_ids: Vec<String>,
}

impl DescriptorMatrix {
    pub fn new(names: Vec<String>) -> Self {
        DescriptorMatrix {
            names,
            values: Vec::new(),
            mask: Vec::new(),
            row_ids: Vec::new(),
        }
    }

    /// Appends a row. Cells that are non-finite or flagged invalid are stored as NaN.
    pub fn push_row(
        &mut self,
        id: impl Into<String>,
        values: &[f64],
        valid: &[bool],
    ) -> Result<(), MatrixError> {
        let cols = self.n_cols();
        if values.len() != cols || valid.len() != cols {
            return Err(MatrixError::RowLength {
                got: values.len(),
                expected: cols,
            });
        }
        for (&v, &ok) in values.iter().zip(valid) {
            let ok = ok && v.is_finite();
            self.mask.push(ok);
            self.values.push(if ok { v } else { f64::NAN });
        }
        self.row_ids.push(id.into());
        Ok(())
    }

    /// Builds a matrix from plain rows, treating NaN as invalid.
    pub fn from_rows(names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let mut m = DescriptorMatrix::new(names);
        for (i, row) in rows.iter().enumerate() {
            let valid: Vec<bool> = row.iter().map(|v| v.is_finite()).collect();
            m.push_row(i.to_string(), row, &valid)?;
        }
        Ok(m)
    }

    /// Computes the canonical descriptors for every molecule, in parallel.
    pub fn from_molecules<S: AsRef<str> + Sync>(molecules: &[Molecule], ids: &[S]) -> Self {
        let rows: Vec<_> = molecules.par_iter().map(compute_descriptors).collect();
        let mut m = DescriptorMatrix::new(descriptor_names());
        for (i, row) in rows.iter().enumerate() {
            let id = ids
                .get(i)
                .map_or_else(|| i.to_string(), |s| s.as_ref().to_string());
            m.push_row(id, &row.values, &row.valid)
                .expect("canonical row width");
        }
        m
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_cols() + col]
    }

    pub fn is_valid(&self, row: usize, col: usize) -> bool {
        self.mask[row * self.n_cols() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let c = self.n_cols();
        &self.values[row * c..(row + 1) * c]
    }

    pub fn row_mask(&self, row: usize) -> &[bool] {
        let c = self.n_cols();
        &self.mask[row * c..(row + 1) * c]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Valid cells of one column.
    pub fn column_valid(&self, col: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_rows())
            .filter(move |&r| self.is_valid(r, col))
            .map(move |r| self.get(r, col))
    }

    /// New matrix holding only the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> DescriptorMatrix {
        let mut out = DescriptorMatrix::new(self.names.clone());
        for &r in rows {
            out.values.extend_from_slice(self.row(r));
            out.mask.extend_from_slice(self.row_mask(r));
            out.row_ids.push(self.row_ids[r].clone());
        }
        out
    }

    pub(crate) fn from_parts(
        names: Vec<String>,
        values: Vec<f64>,
        mask: Vec<bool>,
        row_ids: Vec<String>,
    ) -> Self {
        debug_assert_eq!(values.len(), names.len() * row_ids.len());
        debug_assert_eq!(values.len(), mask.len());
        DescriptorMatrix {
            names,
            values,
            mask,
            row_ids,
        }
    }

    pub fn write_chmd<W: Write>(&self, mut w: W) -> Result<(), MatrixError> {
        w.write_all(&CHMD_MAGIC)?;
        w.write_all(&CHMD_VERSION.to_le_bytes())?;
        w.write_all(&(self.n_rows() as u64).to_le_bytes())?;
        w.write_all(&(self.n_cols() as u64).to_le_bytes())?;
        for name in &self.names {
            w.write_all(&(name.len() as u32).to_le_bytes())?;
            w.write_all(name.as_bytes())?;
        }
        let mut buf = Vec::with_capacity(self.values.len() * 4);
        for (&v, &ok) in self.values.iter().zip(&self.mask) {
            let x = if ok { v as f32 } else { f32::NAN };
            buf.extend_from_slice(&x.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    /// Reads a `CHMD` stream. Row ids are not stored in the format and come
    /// back as row indices.
    pub fn read_chmd<R: Read>(mut r: R) -> Result<Self, MatrixError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if magic != CHMD_MAGIC {
            return Err(MatrixError::BadMagic(magic));
        }
        let version = read_u32(&mut r)?;
        if version != CHMD_VERSION {
            return Err(MatrixError::UnsupportedVersion(version));
        }
        let rows = read_u64(&mut r)? as usize;
        let cols = read_u64(&mut r)? as usize;
        let mut names = Vec::with_capacity(cols);
        for _ in 0..cols {
            let len = read_u32(&mut r)? as usize;
            let mut bytes = vec![0u8; len];
            r.read_exact(&mut bytes)?;
            names.push(String::from_utf8(bytes).map_err(|_| MatrixError::BadName)?);
        }
        let mut raw = vec![0u8; rows * cols * 4];
        r.read_exact(&mut raw)?;
        let mut values = Vec::with_capacity(rows * cols);
        let mut mask = Vec::with_capacity(rows * cols);
        for chunk in raw.chunks_exact(4) {
            let x = f32::from_le_bytes(chunk.try_into().unwrap());
            mask.push(!x.is_nan());
            values.push(x as f64);
        }
        let row_ids = (0..rows).map(|i| i.to_string()).collect();
        Ok(DescriptorMatrix {
            names,
            values,
            mask,
            row_ids,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), MatrixError> {
        let f = std::fs::File::create(path)?;
        let mut w = io::BufWriter::new(f);
        self.write_chmd(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MatrixError> {
        let f = std::fs::File::open(path)?;
        Self::read_chmd(io::BufReader::new(f))
    }

    /// CSV export: header `id,<names...>`, empty cells for invalid values.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), MatrixError> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["id".to_string()];
        header.extend(self.names.iter().cloned());
        out.write_record(&header)?;
        for r in 0..self.n_rows() {
            let mut record = vec![self.row_ids[r].clone()];
            for c in 0..self.n_cols() {
                record.push(if self.is_valid(r, c) {
                    format!("{}", self.get(r, c))
                } else {
                    String::new()
                });
            }
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    fn sample() -> DescriptorMatrix {
        let mols: Vec<_> = ["CCO", "C", "c1ccccc1"]
            .iter()
            .map(|s| parse_smiles(s).unwrap())
            .collect();
        DescriptorMatrix::from_molecules(&mols, &["a", "b", "c"])
    }

    #[test]
    fn binary_layout() {
        let m = sample();
        let mut buf = Vec::new();
        m.write_chmd(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"CHMD");
        assert_eq!(
            u32::from_le_bytes(buf[4..8].try_into().unwrap()),
            CHMD_VERSION
        );
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 3);
        assert_eq!(u64::from_le_bytes(buf[16..24].try_into().unwrap()), 26);
        let names_len: usize = m.names().iter().map(|n| 4 + n.len()).sum();
        assert_eq!(buf.len(), 24 + names_len + 3 * 26 * 4);
    }

    #[test]
    fn read_back_preserves_mask_and_values() {
        let m = sample();
        let mut buf = Vec::new();
        m.write_chmd(&mut buf).unwrap();
        let back = DescriptorMatrix::read_chmd(buf.as_slice()).unwrap();
        assert_eq!(back.names(), m.names());
        assert_eq!(back.mask(), m.mask());
        for (a, b) in m.values().iter().zip(back.values()) {
            if a.is_nan() {
                assert!(b.is_nan());
            } else {
                assert_eq!(*a as f32 as f64, *b);
            }
        }
        // re-serializing the loaded matrix is byte-identical
        let mut again = Vec::new();
        back.write_chmd(&mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn rejects_bad_headers() {
        assert!(matches!(
            DescriptorMatrix::read_chmd(&b"XXXX\x01\x00\x00\x00"[..]),
            Err(MatrixError::BadMagic(_))
        ));
        assert!(matches!(
            DescriptorMatrix::read_chmd(&b"CHMD\x09\x00\x00\x00"[..]),
            Err(MatrixError::UnsupportedVersion(9))
        ));
        assert!(matches!(
            DescriptorMatrix::read_chmd(&b"CHMD\x01\x00"[..]),
            Err(MatrixError::Io(_))
        ));
    }

    #[test]
    fn csv_leaves_invalid_cells_empty() {
        let m = sample();
        let mut out = Vec::new();
        m.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let methane = text.lines().nth(2).unwrap();
        assert!(methane.starts_with("b,1,1,"));
        // BalabanJ is column 25 of 27 fields; invalid for a single atom
        assert_eq!(methane.split(',').nth(25), Some(""));
    }

    #[test]
    fn push_row_checks_width() {
        let mut m = DescriptorMatrix::new(vec!["a".into(), "b".into()]);
        assert!(m.push_row("r", &[1.0], &[true]).is_err());
        m.push_row("r", &[1.0, f64::INFINITY], &[true, true])
            .unwrap();
        assert!(!m.is_valid(0, 1));
    }
}
