//! Fingerprint analysis: Morgan fingerprints, series sorting by cosine
//! distance, and t-SNE projection of embeddings.

mod morgan;
mod series;
mod tsne;

use std::io::Write;

use thiserror::Error;

pub use morgan::{
    atom_invariants, morgan_fingerprint, morgan_identifiers, MorganFp, DEFAULT_RADIUS,
    DEFAULT_WIDTH,
};
pub use series::{
    cosine_distance, cosine_sort, kendall_tau_b, parse_series, read_series, sort_series, Series,
    SeriesSpec, SortResult,
};
pub use tsne::{
    conditional_probabilities, joint_probabilities, kl_divergence, squared_distances, tsne,
    TsneConfig, TsneInit, TsneResult, DISTANCE_FLOOR,
};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Format(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    NonFinite(String),
}

/// Writes `id,x,y,series_label`.
pub fn write_projection_csv<W: Write>(
    w: W,
    ids: &[String],
    coords: &[[f64; 2]],
    labels: &[String],
) -> Result<(), EmbedError> {
    if ids.len() != coords.len() || labels.len() != coords.len() {
        return Err(EmbedError::Invalid(
            "ids, coordinates and labels differ in length".into(),
        ));
    }
    let mut out = csv::Writer::from_writer(w);
    let err = |e: csv::Error| EmbedError::Io(e.to_string());
    out.write_record(["id", "x", "y", "series_label"])
        .map_err(err)?;
    for ((id, c), label) in ids.iter().zip(coords).zip(labels) {
        out.write_record([
            id.as_str(),
            &c[0].to_string(),
            &c[1].to_string(),
            label.as_str(),
        ])
        .map_err(err)?;
    }
    out.flush().map_err(|e| EmbedError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_csv() {
        let mut buf = Vec::new();
        write_projection_csv(&mut buf, &["a".into()], &[[0.5, -1.0]], &["s1".into()]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "id,x,y,series_label\na,0.5,-1,s1\n"
        );
        assert!(write_projection_csv(Vec::new(), &[], &[[0.0, 0.0]], &[]).is_err());
    }
}
