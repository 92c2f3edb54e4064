//! Chemical series: cosine-distance sorting against the lead and rank agreement.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EmbedError;
use crate::molgraph::{parse_smiles, Molecule};

/// One series as stored on disk: members listed in reference order
/// (increasingly dissimilar from the lead).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub lead: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub lead_smiles: String,
    pub lead: Molecule,
    pub member_smiles: Vec<String>,
    pub members: Vec<Molecule>,
}

pub fn parse_series(text: &str) -> Result<Vec<Series>, EmbedError> {
    let specs: Vec<SeriesSpec> =
        serde_json::from_str(text).map_err(|e| EmbedError::Format(format!("series JSON: {e}")))?;
    specs
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let name = s.name.unwrap_or_else(|| format!("series_{}", i + 1));
            if s.members.is_empty() {
                return Err(EmbedError::Format(format!("{name}: no members")));
            }
            let parse = |smi: &str| {
                parse_smiles(smi)
                    .map_err(|e| EmbedError::Format(format!("{name}: SMILES '{smi}': {e}")))
            };
            let lead = parse(&s.lead)?;
            let members = s
                .members
                .iter()
                .map(|m| parse(m))
                .collect::<Result<_, _>>()?;
            Ok(Series {
                name,
                lead_smiles: s.lead,
                lead,
                member_smiles: s.members,
                members,
            })
        })
        .collect()
}

pub fn read_series(path: impl AsRef<Path>) -> Result<Vec<Series>, EmbedError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| EmbedError::Io(format!("{}: {e}", path.display())))?;
    parse_series(&text).map_err(|e| match e {
        EmbedError::Format(m) => EmbedError::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Cosine distance `1 − a·b / (|a||b|)`; `None` when either vector has zero norm.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> Option<f64> {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (na > 0.0 && nb > 0.0).then(|| 1.0 - dot / (na * nb))
}

/// Kendall rank correlation with tie correction,
/// `(n_c − n_d) / √((n₀ − n₁)(n₀ − n₂))`. NaN when either side is constant.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "kendall_tau_b needs equal lengths");
    let n = x.len();
    let (mut conc, mut disc, mut tie_x, mut tie_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i].total_cmp(&x[j]) as i64;
            let dy = y[i].total_cmp(&y[j]) as i64;
            match (dx, dy) {
                (0, 0) => {
                    tie_x += 1;
                    tie_y += 1;
                }
                (0, _) => tie_x += 1,
                (_, 0) => tie_y += 1,
                _ if dx == dy => conc += 1,
                _ => disc += 1,
            }
        }
    }
    let n0 = (n * n.saturating_sub(1) / 2) as i64;
    let denom = (((n0 - tie_x) * (n0 - tie_y)) as f64).sqrt();
    if denom == 0.0 {
        f64::NAN
    } else {
        (conc - disc) as f64 / denom
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SortResult {
    /// Member indices, nearest to the lead first.
    pub order: Vec<usize>,
    /// Distance of each member to the lead; `None` for zero-norm embeddings.
    pub distances: Vec<Option<f64>>,
    /// Members whose embedding (or the lead's) had zero norm; they sort last.
    pub zero_norm: Vec<usize>,
    /// Kendall tau-b between reference positions and distances.
    pub tau: f64,
}

/// Sorts members by cosine distance to the lead (stable on ties) and scores the
/// order against the reference order `0, 1, …, n−1`.
pub fn cosine_sort(lead: &[f64], members: &[Vec<f64>]) -> Result<SortResult, EmbedError> {
    if members.len() < 2 {
        return Err(EmbedError::Invalid(format!(
            "series needs at least 2 members, got {}",
            members.len()
        )));
    }
    let distances: Vec<Option<f64>> = members.iter().map(|m| cosine_distance(lead, m)).collect();
    let key = |i: usize| distances[i].unwrap_or(f64::INFINITY);
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| key(a).total_cmp(&key(b)));
    let zero_norm = (0..members.len())
        .filter(|&i| distances[i].is_none())
        .collect();
    let reference: Vec<f64> = (0..members.len()).map(|i| i as f64).collect();
    let keys: Vec<f64> = (0..members.len()).map(key).collect();
    Ok(SortResult {
        order,
        distances,
        zero_norm,
        tau: kendall_tau_b(&reference, &keys),
    })
}

/// Embeds a series with `fp` and sorts it.
pub fn sort_series(
    series: &Series,
    fp: impl Fn(&Molecule) -> Vec<f64>,
) -> Result<SortResult, EmbedError> {
    let lead = fp(&series.lead);
    let members: Vec<Vec<f64>> = series.members.iter().map(&fp).collect();
    cosine_sort(&lead, &members)
}
