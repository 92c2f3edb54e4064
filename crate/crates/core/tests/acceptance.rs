//! Acceptance suite. Runs every criterion in turn, prints one PASS/FAIL line
//! each and exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use molfm::descriptors::{apply_scaler, compute_descriptors, fit_scaler, DescriptorMatrix};
use molfm::dmpnn::{featurize, BatchGraph, Mpnn, MpnnConfig, MpnnError};
use molfm::embed::{joint_probabilities, tsne, TsneConfig};
use molfm::molgraph::{canonical_reindex, parse_smiles};
use molfm::stats::{
    cliff_consistency, rmse, studentized_range_quantile, tukey_hsd, win_rate, Orientation,
};
use molfm::synth::{random_corpus, random_permutation, toy_corpus, wiener_task, GenConfig};
use molfm::tensor::{grad_check, grad_check_many, Tape, Tensor, TensorError, Var};
use molfm::train::{finetune, pretrain, split_indices, FinetuneConfig, PretrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const ORACLE_BUDGET: Duration = Duration::from_secs(30);
const MCGOWAN_TOL: f64 = 1e-3;
const PRIMITIVE_GRAD_TOL: f64 = 1e-4;
const GRAPH_GRAD_TOL: f64 = 1e-3;
const EMBEDDING_TOL: f64 = 1e-5;
const PRETRAIN_RMSE: f64 = 0.7;
const PRETRAIN_BUDGET: Duration = Duration::from_secs(300);
const TRANSFER_WINS: usize = 4;
const TRANSFER_BUDGET: Duration = Duration::from_secs(600);
const Q_LARGE_DF: (f64, f64) = (2.772, 0.01);
const Q_DF12: (f64, f64) = (3.77, 0.02);
const FWER: (f64, f64) = (0.05, 0.015);
const CLIFF_TOL: f64 = 1e-6;
const PERPLEXITY_TOL: f64 = 1e-3;
const SILHOUETTE: f64 = 0.5;
const SMOKE_BUDGET: Duration = Duration::from_secs(600);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn descriptor_oracles() -> Outcome {
    let t = Instant::now();
    let corpus = common::small_corpus(500, 2024);
    for (s, m) in &corpus {
        ensure(m.heavy_atom_count() <= 12, || format!("{s} is too large"))?;
        common::check_against_oracles(s, m);
    }
    let dt = t.elapsed();
    ensure(dt < ORACLE_BUDGET, || format!("took {dt:.1?}"))?;
    Ok(format!("{} molecules in {dt:.1?}", corpus.len()))
}

fn mcgowan_fixture() -> Outcome {
    let text = include_str!("fixtures/mcgowan.csv");
    let col = common::column("McGowanVolume");
    let mut worst = 0.0f64;
    let mut n = 0;
    for line in text.lines().skip(1) {
        let (s, v) = line.split_once(',').ok_or("malformed fixture line")?;
        let want: f64 = v.parse().map_err(err)?;
        let m = parse_smiles(s).map_err(|e| format!("{s}: {e}"))?;
        let got = compute_descriptors(&m).values[col];
        let diff = (got - want).abs();
        ensure(diff < MCGOWAN_TOL, || {
            format!("{s}: got {got}, reference {want}")
        })?;
        worst = worst.max(diff);
        n += 1;
    }
    ensure(n == 50, || format!("fixture holds {n} molecules"))?;
    Ok(format!("{n} molecules, max |diff| {worst:.2e}"))
}

fn random_tensor(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Tensor {
    let data = (0..rows * cols)
        .map(|_| {
            let x: f64 = rng.random_range(0.05..2.0);
            if rng.random_bool(0.5) {
                -x
            } else {
                x
            }
        })
        .collect();
    Tensor::matrix(rows, cols, data).unwrap()
}

fn weighted_sum(tape: &mut Tape, out: Var) -> Result<Var, TensorError> {
    let t = tape.value(out).clone();
    let w = random_tensor(t.rows(), t.cols(), &mut ChaCha8Rng::seed_from_u64(99));
    let w = tape.constant(w);
    let prod = tape.mul(out, w)?;
    Ok(tape.sum(prod))
}

fn gradient_checks() -> Outcome {
    const EPS: f64 = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (n, m, k) = (4, 3, 5);
    let a = random_tensor(n, m, &mut rng);
    let b = random_tensor(n, m, &mut rng);
    let c = random_tensor(m, k, &mut rng);
    let row = random_tensor(1, m, &mut rng);
    let factors: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let gather: Vec<usize> = (0..k + 2).map(|_| rng.random_range(0..n)).collect();
    let scatter: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    let labels = Tensor::matrix(
        n,
        m,
        (0..n * m)
            .map(|_| f64::from(rng.random_bool(0.5)))
            .collect(),
    )
    .unwrap();
    let mask: Vec<bool> = (0..n * m).map(|i| i % 4 != 1).collect();

    let mut checks: Vec<(&str, f64)> = Vec::new();
    let two = |f: fn(&mut Tape, Var, Var) -> Result<Var, TensorError>, x: &Tensor, y: &Tensor| {
        grad_check_many(
            |t, v| {
                let o = f(t, v[0], v[1])?;
                weighted_sum(t, o)
            },
            &[x.clone(), y.clone()],
            EPS,
        )
    };
    checks.push((
        "matmul",
        two(|t, x, y| t.matmul(x, y), &a, &c).map_err(err)?,
    ));
    checks.push(("add", two(|t, x, y| t.add(x, y), &a, &b).map_err(err)?));
    checks.push((
        "broadcast add",
        two(|t, x, y| t.add(x, y), &a, &row).map_err(err)?,
    ));
    checks.push(("sub", two(|t, x, y| t.sub(x, y), &a, &b).map_err(err)?));
    checks.push(("mul", two(|t, x, y| t.mul(x, y), &a, &b).map_err(err)?));
    checks.push((
        "concat",
        two(|t, x, y| t.concat(&[x, y]), &a, &b).map_err(err)?,
    ));
    let one = |f: &dyn Fn(&mut Tape, Var) -> Result<Var, TensorError>| {
        grad_check(
            |t, x| {
                let o = f(t, x)?;
                weighted_sum(t, o)
            },
            &a,
            EPS,
        )
    };
    checks.push(("scale", one(&|t, x| Ok(t.scale(x, -1.7))).map_err(err)?));
    checks.push((
        "scale_rows",
        one(&|t, x| t.scale_rows(x, factors.clone())).map_err(err)?,
    ));
    checks.push(("relu", one(&|t, x| Ok(t.relu(x))).map_err(err)?));
    checks.push((
        "gather_rows",
        one(&|t, x| t.gather_rows(x, gather.clone())).map_err(err)?,
    ));
    checks.push((
        "scatter_add_rows",
        one(&|t, x| t.scatter_add_rows(x, scatter.clone(), k)).map_err(err)?,
    ));
    let square = |t: &mut Tape, x: Var| t.mul(x, x);
    checks.push((
        "sum",
        grad_check(
            |t, x| {
                let q = square(t, x)?;
                Ok(t.sum(q))
            },
            &a,
            EPS,
        )
        .map_err(err)?,
    ));
    checks.push((
        "mean",
        grad_check(
            |t, x| {
                let q = square(t, x)?;
                Ok(t.mean(q))
            },
            &a,
            EPS,
        )
        .map_err(err)?,
    ));
    checks.push((
        "mse_masked",
        grad_check(|t, x| t.mse_masked(x, &b, &mask), &a, EPS).map_err(err)?,
    ));
    checks.push((
        "bce_with_logits",
        grad_check(|t, x| t.bce_with_logits(x, &labels, &mask), &a, EPS).map_err(err)?,
    ));
    let worst_primitive = checks.iter().map(|c| c.1).fold(0.0, f64::max);
    for (name, e) in &checks {
        ensure(*e < PRIMITIVE_GRAD_TOL, || format!("{name}: {e:.2e}"))?;
    }

    let cfg = MpnnConfig {
        hidden_size: 6,
        depth: 3,
        ffn_layers: 2,
        ffn_hidden: 5,
        output_dim: 3,
    };
    let model = Mpnn::new(cfg, 5).map_err(err)?;
    let graphs: Vec<_> = ["CC(=O)Oc1ccccc1", "C1CC1N", "O"]
        .iter()
        .map(|s| featurize(&parse_smiles(s).unwrap()))
        .collect();
    let batch = BatchGraph::new(&graphs);
    let target = random_tensor(3, 3, &mut rng);
    let mask = [true, false, true, true, true, false, true, true, true];
    let graph_err = grad_check_many(
        |tape, vars| {
            let f = model.forward(tape, vars, &batch).map_err(|e| match e {
                MpnnError::Tensor(t) => t,
                other => panic!("{other}"),
            })?;
            tape.mse_masked(f.output, &target, &mask)
        },
        model.params().tensors(),
        EPS,
    )
    .map_err(err)?;
    ensure(graph_err < GRAPH_GRAD_TOL, || {
        format!("D-MPNN + masked MSE: {graph_err:.2e}")
    })?;
    Ok(format!(
        "{} primitives max {worst_primitive:.1e}, full graph {graph_err:.1e}",
        checks.len()
    ))
}

fn permutation_invariance() -> Outcome {
    let corpus = toy_corpus(200, 404);
    let model = Mpnn::new(MpnnConfig::default(), 8).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for (s, m) in &corpus {
        let d = compute_descriptors(m);
        let e = model.fingerprints(std::slice::from_ref(m)).remove(0);
        for _ in 0..5 {
            let p =
                canonical_reindex(m, &random_permutation(m.n_atoms(), &mut rng)).map_err(err)?;
            let dp = compute_descriptors(&p);
            ensure(d.valid == dp.valid, || {
                format!("{s}: validity mask changed")
            })?;
            for j in 0..d.values.len() {
                if d.valid[j] {
                    ensure(d.values[j].to_bits() == dp.values[j].to_bits(), || {
                        format!(
                            "{s}: {} {} vs {}",
                            molfm::descriptors::DESCRIPTORS[j].name,
                            d.values[j],
                            dp.values[j]
                        )
                    })?;
                }
            }
            let ep = model.fingerprints(&[p]).remove(0);
            for (x, y) in e.iter().zip(&ep) {
                let rel = (x - y).abs() / x.abs().max(y.abs()).max(1e-12);
                worst = worst.max(rel);
            }
        }
    }
    ensure(worst < EMBEDDING_TOL, || {
        format!("embedding relative drift {worst:.2e}")
    })?;
    Ok(format!(
        "200 x 5 permutations, descriptors bitwise equal, embedding drift {worst:.1e}"
    ))
}

/// The fixed pre-training setup shared by the pre-training and transfer criteria.
fn pretrained() -> Result<
    (
        molfm::train::PretrainOutcome,
        Vec<molfm::molgraph::Molecule>,
    ),
    String,
> {
    let mols: Vec<_> = toy_corpus(500, 7).into_iter().map(|x| x.1).collect();
    let raw = DescriptorMatrix::from_molecules(&mols, &Vec::<String>::new());
    let scaler = fit_scaler(&raw).map_err(err)?;
    let z = apply_scaler(&raw, &scaler).map_err(err)?;
    let cfg = PretrainConfig {
        epochs: 30,
        seed: 1,
        ..Default::default()
    };
    let out = pretrain(&mols, &z, Some(&scaler), &cfg).map_err(err)?;
    Ok((out, mols))
}

fn pretraining_sanity() -> Outcome {
    let t = Instant::now();
    let (out, _) = pretrained()?;
    let dt = t.elapsed();
    let kept = out.val_rmse[out.history.best_epoch];
    ensure(kept < PRETRAIN_RMSE, || format!("held-out RMSE {kept:.4}"))?;
    let first: Vec<f64> = out.history.epochs[..5]
        .iter()
        .map(|r| r.train_loss)
        .collect();
    ensure(first.windows(2).all(|w| w[1] < w[0]), || {
        format!("train loss over epochs 1-5 not monotone: {first:?}")
    })?;
    ensure(dt < PRETRAIN_BUDGET, || format!("took {dt:.1?}"))?;
    Ok(format!(
        "held-out RMSE {kept:.4} (epoch {}), in {dt:.1?}",
        out.history.best_epoch
    ))
}

fn transfer_benefit() -> Outcome {
    let t = Instant::now();
    let (out, _) = pretrained()?;
    let pre = out.checkpoint.model;
    let mut wins = 0;
    let mut pairs = Vec::new();
    for seed in 1..=5u64 {
        let task: Vec<_> = random_corpus(100, &GenConfig::default(), 1000 + seed)
            .into_iter()
            .map(|x| x.1)
            .collect();
        let y = wiener_task(&task, 0.1, seed);
        let (train, test) = split_indices(task.len(), 0.2, 77 + seed);
        let pick = |rows: &[usize]| -> (Vec<_>, Vec<f64>) {
            rows.iter().map(|&i| (task[i].clone(), y[i])).unzip()
        };
        let (train_m, train_y) = pick(&train);
        let (test_m, test_y) = pick(&test);
        let fc = FinetuneConfig {
            seed,
            ..Default::default()
        };
        let scratch = Mpnn::new(*pre.config(), seed).map_err(err)?;
        let a = finetune(&pre, &train_m, &train_y, &fc).map_err(err)?.model;
        let b = finetune(&scratch, &train_m, &train_y, &fc)
            .map_err(err)?
            .model;
        let ra = rmse(&a.predict(&test_m), &test_y).map_err(err)?;
        let rb = rmse(&b.predict(&test_m), &test_y).map_err(err)?;
        wins += usize::from(ra < rb);
        pairs.push(format!("{ra:.3}/{rb:.3}"));
    }
    let dt = t.elapsed();
    ensure(wins >= TRANSFER_WINS, || {
        format!("pretrained won {wins}/5 ({})", pairs.join(" "))
    })?;
    ensure(dt < TRANSFER_BUDGET, || format!("took {dt:.1?}"))?;
    Ok(format!(
        "pretrained won {wins}/5, test RMSE pretrained/random {}, in {dt:.1?}",
        pairs.join(" ")
    ))
}

fn tukey_hsd_calibration() -> Outcome {
    let q_large = studentized_range_quantile(0.05, 2, 1_000_000).map_err(err)?;
    ensure((q_large - Q_LARGE_DF.0).abs() <= Q_LARGE_DF.1, || {
        format!("q(0.05, 2, 1e6) = {q_large}")
    })?;
    let q12 = studentized_range_quantile(0.05, 3, 12).map_err(err)?;
    ensure((q12 - Q_DF12.0).abs() <= Q_DF12.1, || {
        format!("q(0.05, 3, 12) = {q12}")
    })?;
    let (sims, k, n) = (2000, 4, 5);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2000);
    let mut false_alarms = 0;
    for _ in 0..sims {
        let groups: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n).map(|_| normal.sample(&mut rng)).collect())
            .collect();
        let r = tukey_hsd(&groups, Orientation::LowerBetter, 0.05).map_err(err)?;
        false_alarms += usize::from(r.significant.iter().flatten().any(|&s| s));
    }
    let fwer = false_alarms as f64 / sims as f64;
    ensure((fwer - FWER.0).abs() <= FWER.1, || {
        format!("family-wise error {fwer:.4}")
    })?;
    Ok(format!(
        "q(0.05,2,1e6) {q_large:.4}, q(0.05,3,12) {q12:.4}, FWER {:.2}% over {sims}",
        fwer * 100.0
    ))
}

fn win_arithmetic() -> Outcome {
    for (wins, total, want) in [(22, 28, 79), (29, 30, 97), (0, 30, 0)] {
        let got = win_rate(wins, total);
        ensure(got == want, || format!("{wins}/{total} gave {got}"))?;
    }
    Ok("22/28 -> 79, 29/30 -> 97, 0/30 -> 0".into())
}

fn cliff_test() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(3..15);
        let shift: f64 = rng.random_range(-0.3..0.3);
        let spread: f64 = rng.random_range(0.05..0.5);
        let normal = Normal::new(shift, spread).unwrap();
        let d: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        let mean = d.iter().sum::<f64>() / n as f64;
        let var = d.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        let t = mean * (n as f64).sqrt() / var.sqrt();
        let p = 1.0 - common::t_cdf_quadrature(t, (n - 1) as f64);
        let r = cliff_consistency(&d, 0.05).map_err(err)?;
        worst = worst.max((r.t - t).abs()).max((r.p - p).abs());
        ensure(
            (r.t - t).abs() < CLIFF_TOL && (r.p - p).abs() < CLIFF_TOL,
            || format!("n={n}: t {} vs {t}, p {} vs {p}", r.t, r.p),
        )?;
        ensure(r.consistent == (p >= 0.05), || format!("n={n}: verdict"))?;
    }
    let zero = cliff_consistency(&[0.2, 0.2, 0.2], 0.05).map_err(err)?;
    ensure(
        zero.t == f64::INFINITY && zero.p == 0.0 && !zero.consistent,
        || format!("positive constant: {zero:?}"),
    )?;
    let neg = cliff_consistency(&[-0.1, -0.1], 0.05).map_err(err)?;
    ensure(
        neg.t == f64::NEG_INFINITY && neg.p == 1.0 && neg.consistent,
        || format!("negative constant: {neg:?}"),
    )?;
    let flat = cliff_consistency(&[0.0, 0.0, 0.0, 0.0], 0.05).map_err(err)?;
    ensure(flat.t == 0.0 && flat.p == 0.5 && flat.consistent, || {
        format!("all zero: {flat:?}")
    })?;
    ensure(cliff_consistency(&[0.3], 0.05).is_err(), || {
        "single difference accepted".into()
    })?;
    ensure(cliff_consistency(&[0.3, f64::NAN], 0.05).is_err(), || {
        "NaN difference accepted".into()
    })?;
    Ok(format!(
        "20 fixtures, max |diff| {worst:.1e}; degenerate conventions hold"
    ))
}

fn silhouette(coords: &[[f64; 2]], labels: &[usize]) -> f64 {
    let dist = |a: &[f64; 2], b: &[f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let n = coords.len();
    let mut total = 0.0;
    for i in 0..n {
        let mean_to = |c: usize| {
            let others: Vec<usize> = (0..n).filter(|&j| j != i && labels[j] == c).collect();
            others
                .iter()
                .map(|&j| dist(&coords[i], &coords[j]))
                .sum::<f64>()
                / others.len() as f64
        };
        let a = mean_to(labels[i]);
        let b = mean_to(1 - labels[i]);
        total += (b - a) / a.max(b);
    }
    total / n as f64
}

fn tsne_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for i in 0..60 {
        let c = i % 2;
        let centre = if c == 0 { 0.0 } else { 6.0 };
        points.push(
            (0..10)
                .map(|_| centre + normal.sample(&mut rng))
                .collect::<Vec<f64>>(),
        );
        labels.push(c);
    }
    let perplexity = 10.0;
    let (_, row_perp) = joint_probabilities(&points, perplexity);
    let worst = row_perp
        .iter()
        .map(|p| (p - perplexity).abs())
        .fold(0.0, f64::max);
    ensure(worst < PERPLEXITY_TOL, || {
        format!("row perplexity off by {worst:.2e}")
    })?;
    let cfg = TsneConfig {
        perplexity,
        seed: 1,
        ..Default::default()
    };
    let r = tsne(&points, &cfg).map_err(err)?;
    let s = silhouette(&r.coords, &labels);
    ensure(s > SILHOUETTE, || format!("silhouette {s:.3}"))?;
    ensure(r.kl_final < r.kl_initial, || {
        format!("KL {} -> {}", r.kl_initial, r.kl_final)
    })?;
    Ok(format!(
        "perplexity error {worst:.1e}, silhouette {s:.3}, KL {:.3} -> {:.3}",
        r.kl_initial, r.kl_final
    ))
}

fn write_smoke_inputs(dir: &Path) -> std::io::Result<()> {
    let corpus: String = toy_corpus(300, 11)
        .into_iter()
        .map(|(s, _)| s + "\n")
        .collect();
    std::fs::write(dir.join("corpus.smi"), corpus)?;
    let task = random_corpus(100, &GenConfig::default(), 500);
    let mols: Vec<_> = task.iter().map(|x| x.1.clone()).collect();
    let y = wiener_task(&mols, 0.1, 3);
    let (_, test) = split_indices(task.len(), 0.2, 5);
    let mut median = y.clone();
    median.sort_by(f64::total_cmp);
    let median = median[median.len() / 2];
    let (mut reg, mut cls) = (
        String::from("smiles,target,split,cliff\n"),
        String::from("smiles,target,split\n"),
    );
    for (i, (s, _)) in task.iter().enumerate() {
        let split = if test.contains(&i) { "test" } else { "train" };
        reg += &format!("{s},{},{split},{}\n", y[i], u8::from(i % 3 == 0));
        cls += &format!("{s},{},{split}\n", u8::from(y[i] > median));
    }
    std::fs::write(dir.join("reg.csv"), reg)?;
    std::fs::write(dir.join("cls.csv"), cls)?;
    std::fs::write(
        dir.join("suite.json"),
        r#"{"benchmarks":[
 {"id":"wiener","dataset":"reg.csv","task":"regression","metric":"rmse","cliff_column":"cliff"},
 {"id":"wiener_cls","dataset":"cls.csv","task":"binary_classification","metric":"roc_auc"}
]}"#,
    )?;
    std::fs::write(
        dir.join("roster.json"),
        r#"[
 {"id":"mpnn_pre","kind":"mpnn","checkpoint":"pre.chmc","epochs":15},
 {"id":"desc_fnn","kind":"descriptor_fnn","hidden":[32],"epochs":30},
 {"id":"pcamlp","kind":"pcamlp","pca":"pca.chmc","hidden":[32],"epochs":30}
]"#,
    )
}

fn run_pipeline(dir: &Path) -> Result<(), String> {
    let steps: [&[&str]; 5] = [
        &[
            "featurize",
            "--input",
            "corpus.smi",
            "--output",
            "d.chmd",
            "--pca",
            "pca.chmc",
        ],
        &[
            "pretrain",
            "--corpus",
            "corpus.smi",
            "--descriptors",
            "d.chmd",
            "--output",
            "pre.chmc",
            "--epochs",
            "5",
            "--hidden-size",
            "32",
            "--ffn-hidden",
            "32",
        ],
        &[
            "finetune",
            "--data",
            "reg.csv",
            "--checkpoint",
            "pre.chmc",
            "--output",
            "ft.chmc",
            "--epochs",
            "20",
        ],
        &[
            "benchmark",
            "--suite",
            "suite.json",
            "--roster",
            "roster.json",
            "--output",
            "res.csv",
            "--replicates",
            "3",
        ],
        &["report", "--results", "res.csv", "--output-dir", "rep"],
    ];
    for args in steps {
        let o = Command::new(env!("CARGO_BIN_EXE_molfm"))
            .current_dir(dir)
            .args(args)
            .output()
            .map_err(err)?;
        ensure(o.status.success(), || {
            format!("{}: {}", args[0], String::from_utf8_lossy(&o.stderr).trim())
        })?;
    }
    Ok(())
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                out.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn smoke_pipeline() -> Outcome {
    let t = Instant::now();
    let root = tempfile::tempdir().map_err(err)?;
    let runs = [root.path().join("a"), root.path().join("b")];
    for dir in &runs {
        std::fs::create_dir(dir).map_err(err)?;
        write_smoke_inputs(dir).map_err(err)?;
        run_pipeline(dir)?;
    }
    let (a, b) = (tree(&runs[0]), tree(&runs[1]));
    let names = |t: &[(String, Vec<u8>)]| t.iter().map(|x| x.0.clone()).collect::<Vec<_>>();
    ensure(names(&a) == names(&b), || {
        "runs wrote different files".into()
    })?;
    for ((name, x), (_, y)) in a.iter().zip(&b) {
        ensure(x == y, || format!("{name} differs between runs"))?;
    }
    for needed in ["rep/wins.csv", "rep/consistency.csv", "res.csv", "ft.chmc"] {
        ensure(a.iter().any(|x| x.0 == needed), || {
            format!("missing {needed}")
        })?;
    }
    let dt = t.elapsed();
    ensure(dt < SMOKE_BUDGET, || format!("took {dt:.1?}"))?;
    Ok(format!(
        "two runs, {} files byte-identical, in {dt:.1?}",
        a.len()
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("descriptor oracles", descriptor_oracles),
        ("McGowan volume vs reference", mcgowan_fixture),
        ("gradient checks", gradient_checks),
        ("permutation invariance", permutation_invariance),
        ("pre-training sanity", pretraining_sanity),
        ("transfer benefit", transfer_benefit),
        ("Tukey HSD", tukey_hsd_calibration),
        ("win aggregation", win_arithmetic),
        ("cliff consistency test", cliff_test),
        ("t-SNE", tsne_checks),
        ("end-to-end smoke pipeline", smoke_pipeline),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
