//! Replicate orchestration, suite and results files, and the aggregated report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hsd::{aggregate_wins, cliff_consistency, tukey_hsd, CliffResult, WinSummary};
use super::metrics::{rmse, Metric, Orientation};
use super::StatsError;
use crate::molgraph::{parse_smiles, Molecule};
use crate::train::Task;

pub type BoxError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateResult {
    pub benchmark: String,
    pub model: String,
    pub seed: u64,
    pub metric: String,
    pub value: f64,
    pub orientation: Orientation,
    pub rmse_cliff: Option<f64>,
    pub rmse_noncliff: Option<f64>,
}

/// A benchmark with its fixed train/test split.
#[derive(Debug, Clone)]
pub struct BenchmarkData {
    pub id: String,
    pub task: Task,
    pub metric: Metric,
    pub orientation: Orientation,
    pub train_mols: Vec<Molecule>,
    pub train_labels: Vec<f64>,
    pub test_mols: Vec<Molecule>,
    pub test_labels: Vec<f64>,
    /// Per test row: true for activity-cliff molecules.
    pub cliff: Option<Vec<bool>>,
}

/// A model that can be trained from scratch on a benchmark's training rows.
pub trait ReplicateModel: Sync {
    fn id(&self) -> &str;
    /// Trains with `seed` driving the validation split and weight init, and
    /// returns predictions for `data.test_mols` (probabilities for classification).
    fn fit_predict(&self, data: &BenchmarkData, seed: u64) -> Result<Vec<f64>, BoxError>;
}

pub fn evaluate_replicate(
    data: &BenchmarkData,
    model: &dyn ReplicateModel,
    seed: u64,
) -> Result<ReplicateResult, StatsError> {
    let fail = |message: String| StatsError::Replicate {
        benchmark: data.id.clone(),
        model: model.id().to_string(),
        seed,
        message,
    };
    let pred = model
        .fit_predict(data, seed)
        .map_err(|e| fail(e.to_string()))?;
    let value = data
        .metric
        .compute(&pred, &data.test_labels)
        .map_err(|e| fail(e.to_string()))?;
    if !value.is_finite() {
        return Err(fail(format!("{} is not finite", data.metric.name())));
    }
    let (rmse_cliff, rmse_noncliff) = match &data.cliff {
        Some(flags) => {
            let pick = |want: bool| -> (Vec<f64>, Vec<f64>) {
                flags
                    .iter()
                    .zip(pred.iter().zip(&data.test_labels))
                    .filter(|(f, _)| **f == want)
                    .map(|(_, (p, y))| (*p, *y))
                    .unzip()
            };
            let (pc, yc) = pick(true);
            let (pn, yn) = pick(false);
            let c = rmse(&pc, &yc).map_err(|e| fail(format!("cliff subgroup: {e}")))?;
            let n = rmse(&pn, &yn).map_err(|e| fail(format!("noncliff subgroup: {e}")))?;
            (Some(c), Some(n))
        }
        None => (None, None),
    };
    Ok(ReplicateResult {
        benchmark: data.id.clone(),
        model: model.id().to_string(),
        seed,
        metric: data.metric.name().to_string(),
        value,
        orientation: data.orientation,
        rmse_cliff,
        rmse_noncliff,
    })
}

/// Runs seeds `1..=n_reps` in order.
pub fn run_replicates(
    data: &BenchmarkData,
    model: &dyn ReplicateModel,
    n_reps: u64,
) -> Result<Vec<ReplicateResult>, StatsError> {
    (1..=n_reps)
        .map(|seed| evaluate_replicate(data, model, seed))
        .collect()
}

/// Every (benchmark, model, seed) triple, run on up to `workers` threads.
/// Output order is benchmark, then model, then seed regardless of scheduling.
pub fn run_suite(
    benchmarks: &[BenchmarkData],
    models: &[&dyn ReplicateModel],
    n_reps: u64,
    workers: usize,
) -> Result<Vec<ReplicateResult>, StatsError> {
    let jobs: Vec<(usize, usize, u64)> = (0..benchmarks.len())
        .flat_map(|b| (0..models.len()).flat_map(move |m| (1..=n_reps).map(move |s| (b, m, s))))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| StatsError::Invalid(format!("worker pool: {e}")))?;
    pool.install(|| {
        jobs.par_iter()
            .map(|&(b, m, s)| evaluate_replicate(&benchmarks[b], models[m], s))
            .collect()
    })
}

// ---------------------------------------------------------------------------
// Suite files

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub id: String,
    /// Dataset CSV; relative paths resolve against the suite file's directory.
    pub dataset: PathBuf,
    pub task: Task,
    pub metric: Metric,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Orientation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cliff_column: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SuiteFile {
    List(Vec<SuiteEntry>),
    Object { benchmarks: Vec<SuiteEntry> },
}

pub fn parse_suite(text: &str) -> Result<Vec<SuiteEntry>, StatsError> {
    let file: SuiteFile =
        serde_json::from_str(text).map_err(|e| StatsError::Format(format!("suite JSON: {e}")))?;
    let entries = match file {
        SuiteFile::List(v) | SuiteFile::Object { benchmarks: v } => v,
    };
    let mut seen = std::collections::HashSet::new();
    for e in &entries {
        if !seen.insert(&e.id) {
            return Err(StatsError::Format(format!(
                "duplicate benchmark id '{}'",
                e.id
            )));
        }
    }
    Ok(entries)
}

/// Reads a suite and every dataset it names.
pub fn load_suite(path: impl AsRef<Path>) -> Result<Vec<BenchmarkData>, StatsError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| StatsError::Io(format!("{}: {e}", path.display())))?;
    let entries =
        parse_suite(&text).map_err(|e| StatsError::Format(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    entries.iter().map(|e| load_benchmark(e, base)).collect()
}

/// Reads a benchmark CSV with `smiles`, `target`, `split` (train/test) and the
/// optional cliff column (`1`/`0`/`true`/`false`).
pub fn load_benchmark(entry: &SuiteEntry, base: &Path) -> Result<BenchmarkData, StatsError> {
    let path = if entry.dataset.is_absolute() {
        entry.dataset.clone()
    } else {
        base.join(&entry.dataset)
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| StatsError::Io(format!("{}: {e}", path.display())))?;
    parse_benchmark_csv(entry, &text).map_err(|e| match e {
        StatsError::Format(m) => StatsError::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_benchmark_csv(entry: &SuiteEntry, text: &str) -> Result<BenchmarkData, StatsError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| StatsError::Format(format!("header: {e}")))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| StatsError::Format(format!("missing column '{name}'")))
    };
    let (c_smiles, c_target, c_split) = (col("smiles")?, col("target")?, col("split")?);
    let c_cliff = entry.cliff_column.as_deref().map(col).transpose()?;
    let mut data = BenchmarkData {
        id: entry.id.clone(),
        task: entry.task,
        metric: entry.metric,
        orientation: entry.orientation.unwrap_or(entry.metric.orientation()),
        train_mols: Vec::new(),
        train_labels: Vec::new(),
        test_mols: Vec::new(),
        test_labels: Vec::new(),
        cliff: c_cliff.map(|_| Vec::new()),
    };
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let bad = |m: String| StatsError::Format(format!("line {line}: {m}"));
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |c: usize| rec.get(c).unwrap_or("");
        let smiles = field(c_smiles);
        let mol = parse_smiles(smiles).map_err(|e| bad(format!("SMILES '{smiles}': {e}")))?;
        let target: f64 = field(c_target)
            .parse()
            .ok()
            .filter(|t: &f64| t.is_finite())
            .ok_or_else(|| {
                bad(format!(
                    "target '{}' is not a finite number",
                    field(c_target)
                ))
            })?;
        if entry.task == Task::BinaryClassification && target != 0.0 && target != 1.0 {
            return Err(bad(format!("classification target {target} is not 0 or 1")));
        }
        match field(c_split) {
            "train" => {
                data.train_mols.push(mol);
                data.train_labels.push(target);
            }
            "test" => {
                data.test_mols.push(mol);
                data.test_labels.push(target);
                if let (Some(c), Some(flags)) = (c_cliff, data.cliff.as_mut()) {
                    let flag = match field(c) {
                        "1" | "true" | "True" => true,
                        "0" | "false" | "False" | "" => false,
                        other => return Err(bad(format!("cliff flag '{other}' is not 0/1"))),
                    };
                    flags.push(flag);
                }
            }
            other => return Err(bad(format!("split '{other}' is not train or test"))),
        }
    }
    if data.train_mols.is_empty() || data.test_mols.is_empty() {
        return Err(StatsError::Format(
            "benchmark needs both train and test rows".into(),
        ));
    }
    Ok(data)
}

// ---------------------------------------------------------------------------
// Results CSV

const RESULT_COLUMNS: [&str; 6] = [
    "benchmark",
    "model",
    "seed",
    "metric",
    "value",
    "orientation",
];

pub fn write_results_csv<W: Write>(w: W, results: &[ReplicateResult]) -> Result<(), StatsError> {
    let cliff = results.iter().any(|r| r.rmse_cliff.is_some());
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = RESULT_COLUMNS.to_vec();
    if cliff {
        header.extend(["rmse_cliff", "rmse_noncliff"]);
    }
    let csv_err = |e: csv::Error| StatsError::Io(e.to_string());
    out.write_record(&header).map_err(csv_err)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in results {
        let mut rec = vec![
            r.benchmark.clone(),
            r.model.clone(),
            r.seed.to_string(),
            r.metric.clone(),
            r.value.to_string(),
            r.orientation.as_str().to_string(),
        ];
        if cliff {
            rec.push(opt(r.rmse_cliff));
            rec.push(opt(r.rmse_noncliff));
        }
        out.write_record(&rec).map_err(csv_err)?;
    }
    out.flush().map_err(|e| StatsError::Io(e.to_string()))
}

pub fn parse_results_csv(text: &str) -> Result<Vec<ReplicateResult>, StatsError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| StatsError::Format(format!("header: {e}")))?
        .clone();
    for (i, want) in RESULT_COLUMNS.iter().enumerate() {
        if headers.get(i) != Some(*want) {
            return Err(StatsError::Format(format!(
                "column {} must be '{want}'",
                i + 1
            )));
        }
    }
    let has_cliff =
        headers.len() >= 8 && &headers[6] == "rmse_cliff" && &headers[7] == "rmse_noncliff";
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let bad = |m: String| StatsError::Format(format!("line {line}: {m}"));
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |c: usize| -> Result<f64, StatsError> {
            rec[c]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("'{}' is not a finite number", &rec[c])))
        };
        let opt = |c: usize| -> Result<Option<f64>, StatsError> {
            if !has_cliff || rec.get(c).unwrap_or("").is_empty() {
                Ok(None)
            } else {
                num(c).map(Some)
            }
        };
        out.push(ReplicateResult {
            benchmark: rec[0].to_string(),
            model: rec[1].to_string(),
            seed: rec[2]
                .parse()
                .map_err(|_| bad(format!("seed '{}' is not an integer", &rec[2])))?,
            metric: rec[3].to_string(),
            value: num(4)?,
            orientation: Orientation::parse(&rec[5])
                .ok_or_else(|| bad(format!("orientation '{}'", &rec[5])))?,
            rmse_cliff: opt(6)?,
            rmse_noncliff: opt(7)?,
        });
    }
    Ok(out)
}

pub fn read_results_csv(path: impl AsRef<Path>) -> Result<Vec<ReplicateResult>, StatsError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| StatsError::Io(format!("{}: {e}", path.display())))?;
    parse_results_csv(&text).map_err(|e| match e {
        StatsError::Format(m) => StatsError::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

// ---------------------------------------------------------------------------
// Report

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub model: String,
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub winner: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkOutcome {
    pub benchmark: String,
    pub metric: String,
    pub orientation: Orientation,
    pub q_crit: f64,
    pub ms_within: f64,
    pub models: Vec<ModelSummary>,
    pub winners: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub benchmark: String,
    pub model: String,
    pub result: CliffResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub benchmarks: Vec<BenchmarkOutcome>,
    pub wins: Vec<WinSummary>,
    pub consistency: Vec<ConsistencyRow>,
}

fn first_seen<'a>(items: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in items {
        if !out.iter().any(|x| x == s) {
            out.push(s.to_string());
        }
    }
    out
}

/// Tukey winners per benchmark, win counts over all benchmarks, and the cliff
/// test for every (benchmark, model) with subgroup RMSEs.
pub fn build_report(results: &[ReplicateResult], alpha: f64) -> Result<BenchReport, StatsError> {
    let bench_ids = first_seen(results.iter().map(|r| r.benchmark.as_str()));
    let model_ids = first_seen(results.iter().map(|r| r.model.as_str()));
    let mut benchmarks = Vec::new();
    let mut consistency = Vec::new();
    for b in &bench_ids {
        let rows: Vec<&ReplicateResult> = results.iter().filter(|r| &r.benchmark == b).collect();
        let (metric, orientation) = (rows[0].metric.clone(), rows[0].orientation);
        if rows
            .iter()
            .any(|r| r.metric != metric || r.orientation != orientation)
        {
            return Err(StatsError::Invalid(format!(
                "benchmark '{b}' mixes metrics or orientations"
            )));
        }
        let models = first_seen(rows.iter().map(|r| r.model.as_str()));
        let mut per_model: Vec<Vec<&ReplicateResult>> = Vec::new();
        for m in &models {
            let mut by_seed: BTreeMap<u64, &ReplicateResult> = BTreeMap::new();
            for r in rows.iter().filter(|r| &r.model == m) {
                if by_seed.insert(r.seed, r).is_some() {
                    return Err(StatsError::Invalid(format!(
                        "benchmark '{b}', model '{m}': duplicate seed {}",
                        r.seed
                    )));
                }
            }
            per_model.push(by_seed.into_values().collect());
        }
        let groups: Vec<Vec<f64>> = per_model
            .iter()
            .map(|g| g.iter().map(|r| r.value).collect())
            .collect();
        let hsd = tukey_hsd(&groups, orientation, alpha)
            .map_err(|e| StatsError::Invalid(format!("benchmark '{b}': {e}")))?;
        let summaries = models
            .iter()
            .zip(&groups)
            .enumerate()
            .map(|(i, (m, g))| {
                let mean = hsd.means[i];
                let sd = (g.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (g.len() - 1) as f64)
                    .sqrt();
                ModelSummary {
                    model: m.clone(),
                    n: g.len(),
                    mean,
                    sd,
                    winner: hsd.winners.contains(&i),
                }
            })
            .collect();
        for (m, g) in models.iter().zip(&per_model) {
            let diffs: Option<Vec<f64>> = g
                .iter()
                .map(|r| Some(r.rmse_cliff? - r.rmse_noncliff?))
                .collect();
            if let Some(diffs) = diffs {
                let result = cliff_consistency(&diffs, alpha).map_err(|e| {
                    StatsError::Invalid(format!("benchmark '{b}', model '{m}': {e}"))
                })?;
                consistency.push(ConsistencyRow {
                    benchmark: b.clone(),
                    model: m.clone(),
                    result,
                });
            }
        }
        benchmarks.push(BenchmarkOutcome {
            benchmark: b.clone(),
            metric,
            orientation,
            q_crit: hsd.q_crit,
            ms_within: hsd.ms_within,
            models: summaries,
            winners: hsd.winners.iter().map(|&i| models[i].clone()).collect(),
        });
    }
    let sets: Vec<Vec<String>> = benchmarks.iter().map(|b| b.winners.clone()).collect();
    let wins = aggregate_wins(&model_ids, &sets);
    Ok(BenchReport {
        benchmarks,
        wins,
        consistency,
    })
}

fn csv_string(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

impl BenchReport {
    /// `benchmark,metric,orientation,model,n,mean,sd,winner`
    pub fn benchmarks_csv(&self) -> String {
        csv_string(
            &[
                "benchmark",
                "metric",
                "orientation",
                "model",
                "n",
                "mean",
                "sd",
                "winner",
            ],
            self.benchmarks.iter().flat_map(|b| {
                b.models.iter().map(move |m| {
                    vec![
                        b.benchmark.clone(),
                        b.metric.clone(),
                        b.orientation.as_str().into(),
                        m.model.clone(),
                        m.n.to_string(),
                        m.mean.to_string(),
                        m.sd.to_string(),
                        m.winner.to_string(),
                    ]
                })
            }),
        )
    }

    /// `model,wins,total,win_rate`
    pub fn wins_csv(&self) -> String {
        csv_string(
            &["model", "wins", "total", "win_rate"],
            self.wins.iter().map(|w| {
                vec![
                    w.model.clone(),
                    w.wins.to_string(),
                    w.total.to_string(),
                    w.rate.to_string(),
                ]
            }),
        )
    }

    /// `benchmark,model,n,mean_diff,sd_diff,t,p,consistent`
    pub fn consistency_csv(&self) -> String {
        csv_string(
            &[
                "benchmark",
                "model",
                "n",
                "mean_diff",
                "sd_diff",
                "t",
                "p",
                "consistent",
            ],
            self.consistency.iter().map(|c| {
                let r = &c.result;
                vec![
                    c.benchmark.clone(),
                    c.model.clone(),
                    r.n.to_string(),
                    r.mean.to_string(),
                    r.sd.to_string(),
                    r.t.to_string(),
                    r.p.to_string(),
                    r.consistent.to_string(),
                ]
            }),
        )
    }

    /// Plain-text summary: winners per benchmark, win table, cliff tests.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let name_w = self
            .wins
            .iter()
            .map(|w| w.model.len())
            .max()
            .unwrap_or(5)
            .max(5);
        for b in &self.benchmarks {
            let _ = writeln!(
                s,
                "{} ({}, {})",
                b.benchmark,
                b.metric,
                b.orientation.as_str()
            );
            for m in &b.models {
                let mark = if m.winner { "*" } else { " " };
                let _ = writeln!(
                    s,
                    "  {mark} {:<name_w$}  {:>10.4} ± {:<8.4}",
                    m.model, m.mean, m.sd
                );
            }
        }
        let _ = writeln!(s, "\n{:<name_w$}  {:>4}  {:>5}", "model", "wins", "rate");
        for w in &self.wins {
            let _ = writeln!(s, "{:<name_w$}  {:>4}  {:>4}%", w.model, w.wins, w.rate);
        }
        if !self.consistency.is_empty() {
            let _ = writeln!(s, "\ncliff consistency (H1: cliff RMSE > noncliff RMSE)");
            for c in &self.consistency {
                let verdict = if c.result.consistent {
                    "consistent"
                } else {
                    "inconsistent"
                };
                let _ = writeln!(
                    s,
                    "  {} / {}: t = {:.3}, p = {:.4}, {verdict}",
                    c.benchmark, c.model, c.result.t, c.result.p
                );
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Constant(f64);

    impl ReplicateModel for Constant {
        fn id(&self) -> &str {
            "const"
        }
        fn fit_predict(&self, data: &BenchmarkData, _seed: u64) -> Result<Vec<f64>, BoxError> {
            Ok(vec![self.0; data.test_mols.len()])
        }
    }

    struct Failing;

    impl ReplicateModel for Failing {
        fn id(&self) -> &str {
            "broken"
        }
        fn fit_predict(&self, _: &BenchmarkData, seed: u64) -> Result<Vec<f64>, BoxError> {
            Err(format!("diverged at seed {seed}").into())
        }
    }

    fn entry(cliff: bool) -> SuiteEntry {
        SuiteEntry {
            id: "toy".into(),
            dataset: "toy.csv".into(),
            task: Task::Regression,
            metric: Metric::Rmse,
            orientation: None,
            cliff_column: cliff.then(|| "cliff".to_string()),
        }
    }

    const CSV: &str =
        "smiles,target,split,cliff\nC,1,train,0\nCC,2,train,0\nCCC,3,test,1\nCCCC,4,test,0\n";

    #[test]
    fn stub_model_replicates() {
        let data = parse_benchmark_csv(&entry(true), CSV).unwrap();
        let r = run_replicates(&data, &Constant(3.0), 5).unwrap();
        assert_eq!(
            r.iter().map(|r| r.seed).collect::<Vec<_>>(),
            vec![1, 2, 3, 4, 5]
        );
        assert!(r.iter().all(|x| x.value == r[0].value));
        assert_eq!(
            (r[0].rmse_cliff, r[0].rmse_noncliff),
            (Some(0.0), Some(1.0))
        );
        let plain = parse_benchmark_csv(&entry(false), CSV).unwrap();
        assert_eq!(
            run_replicates(&plain, &Constant(3.0), 1).unwrap()[0].rmse_cliff,
            None
        );
    }

    #[test]
    fn failures_carry_seed() {
        let data = parse_benchmark_csv(&entry(false), CSV).unwrap();
        let e = run_replicates(&data, &Failing, 3).unwrap_err().to_string();
        assert!(
            e.contains("seed 1") && e.contains("broken") && e.contains("toy"),
            "{e}"
        );
    }

    #[test]
    fn results_csv_round_trip() {
        let data = parse_benchmark_csv(&entry(true), CSV).unwrap();
        let r = run_suite(
            std::slice::from_ref(&data),
            &[&Constant(2.5), &Constant(3.1)],
            3,
            2,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_results_csv(&mut buf, &r).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "benchmark,model,seed,metric,value,orientation,rmse_cliff,rmse_noncliff\n"
        ));
        assert_eq!(parse_results_csv(&text).unwrap(), r);
    }

    #[test]
    fn suite_forms() {
        let list = r#"[{"id":"a","dataset":"a.csv","task":"regression","metric":"mae"}]"#;
        let obj = r#"{"benchmarks":[{"id":"a","dataset":"a.csv","task":"binary_classification","metric":"roc_auc","cliff_column":"c"}]}"#;
        assert_eq!(parse_suite(list).unwrap()[0].metric, Metric::Mae);
        assert_eq!(
            parse_suite(obj).unwrap()[0].cliff_column.as_deref(),
            Some("c")
        );
        let dup = r#"[{"id":"a","dataset":"a.csv","task":"regression","metric":"mae"},{"id":"a","dataset":"b.csv","task":"regression","metric":"mae"}]"#;
        assert!(parse_suite(dup).is_err());
    }

    #[test]
    fn benchmark_csv_errors_name_line() {
        let e = parse_benchmark_csv(&entry(false), "smiles,target,split\nC,1,train\nC,1,valid\n")
            .unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        assert!(parse_benchmark_csv(&entry(false), "smiles,target\nC,1\n").is_err());
    }

    fn row(b: &str, m: &str, seed: u64, value: f64) -> ReplicateResult {
        ReplicateResult {
            benchmark: b.into(),
            model: m.into(),
            seed,
            metric: "rmse".into(),
            value,
            orientation: Orientation::LowerBetter,
            rmse_cliff: None,
            rmse_noncliff: None,
        }
    }

    #[test]
    fn dominance_report() {
        let mut results = Vec::new();
        for b in ["b1", "b2", "b3"] {
            for s in 1..=5 {
                let noise = 0.01 * s as f64;
                results.push(row(b, "A", s, 1.0 + noise));
                results.push(row(b, "B", s, 2.0 + noise));
            }
        }
        let rep = build_report(&results, 0.05).unwrap();
        assert_eq!(
            rep.wins[0],
            WinSummary {
                model: "A".into(),
                wins: 3,
                total: 3,
                rate: 100
            }
        );
        assert_eq!(rep.wins[1].rate, 0);
        assert!(rep.table().contains("100%"));
        assert!(rep
            .wins_csv()
            .starts_with("model,wins,total,win_rate\nA,3,3,100\n"));
    }
}
