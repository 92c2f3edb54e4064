use std::path::Path;

use super::roster::load_roster;
use super::{
    echo_config, write_file, BenchmarkArgs, CliError, CliResult, FeaturizeArgs, FinetuneArgs,
    FingerprintArgs, InitArg, PredictArgs, PretrainArgs, ProjectArgs, ReportArgs,
};
use crate::baselines::PcaBundle;
use crate::descriptors::{apply_scaler, fit_scaler, DescriptorMatrix};
use crate::dmpnn::{Mpnn, MpnnConfig};
use crate::embed::{
    cosine_sort, morgan_fingerprint, read_series, tsne, write_projection_csv, TsneConfig, TsneInit,
};
use crate::molgraph::{parse_smiles, read_smiles_corpus, Molecule};
use crate::stats::{
    build_report, load_suite, read_results_csv, run_suite, write_results_csv, ReplicateModel,
};
use crate::train::{
    finetune as run_finetune, pretrain as run_pretrain, read_labeled_csv, Checkpoint,
    FinetuneConfig, FittedModel, PretrainConfig, Split,
};

fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Molecules and row ids (the corpus id, or the SMILES when absent).
fn load_corpus(path: &Path) -> CliResult<(Vec<Molecule>, Vec<String>, Vec<String>)> {
    let entries = read_smiles_corpus(path)?;
    if entries.is_empty() {
        return Err(CliError::input(format!("{}: no molecules", path.display())));
    }
    let ids = entries
        .iter()
        .map(|e| e.id.clone().unwrap_or_else(|| e.smiles.clone()))
        .collect();
    let smiles = entries.iter().map(|e| e.smiles.clone()).collect();
    Ok((
        entries.into_iter().map(|e| e.molecule).collect(),
        ids,
        smiles,
    ))
}

fn load_checkpoint(path: &Path) -> CliResult<Checkpoint> {
    Checkpoint::load(path).map_err(|e| CliError::from(e).context(path.display()))
}

pub fn featurize(a: FeaturizeArgs, workers: usize) -> CliResult<()> {
    let (mols, ids, _) = load_corpus(&a.input)?;
    let m = DescriptorMatrix::from_molecules(&mols, &ids);
    m.save(&a.output)
        .map_err(|e| CliError::from(e).context(a.output.display()))?;
    if let Some(path) = &a.csv {
        let mut buf = Vec::new();
        m.write_csv(&mut buf)?;
        write_file(path, &buf)?;
    }
    if let Some(path) = &a.pca {
        let bundle = PcaBundle::fit(&m, a.variance_threshold)
            .map_err(|e| CliError::from(e).context(a.input.display()))?;
        bundle
            .save(path)
            .map_err(|e| CliError::from(e).context(path.display()))?;
        eprintln!(
            "pca: {} components capture {:.3} of the variance",
            bundle.pca.k,
            bundle.pca.captured_ratio()
        );
    }
    echo_config(&a.output, "featurize", &a, workers)?;
    eprintln!(
        "featurized {} molecules x {} descriptors",
        m.n_rows(),
        m.n_cols()
    );
    Ok(())
}

pub fn pretrain(a: PretrainArgs, workers: usize) -> CliResult<()> {
    let (mols, ids, _) = load_corpus(&a.corpus)?;
    let raw = match &a.descriptors {
        Some(p) => DescriptorMatrix::load(p).map_err(|e| CliError::from(e).context(p.display()))?,
        None => DescriptorMatrix::from_molecules(&mols, &ids),
    };
    if raw.n_rows() != mols.len() {
        return Err(CliError::input(format!(
            "{} molecules in the corpus but {} descriptor rows",
            mols.len(),
            raw.n_rows()
        )));
    }
    let scaler = fit_scaler(&raw).map_err(|e| CliError::from(e).context(a.corpus.display()))?;
    let z =
        apply_scaler(&raw, &scaler).map_err(|e| CliError::from(e).context(a.corpus.display()))?;
    let cfg = PretrainConfig {
        mpnn: MpnnConfig {
            hidden_size: a.hidden_size,
            depth: a.depth,
            ffn_layers: a.ffn_layers,
            ffn_hidden: a.ffn_hidden,
            output_dim: z.n_cols(),
        },
        epochs: a.epochs,
        batch_size: a.batch_size,
        lr: a.lr,
        mask_fraction: a.mask_fraction,
        validity_mask: !a.no_validity_mask,
        random_mask: !a.no_random_mask,
        val_fraction: a.val_fraction,
        warmup_epochs: a.warmup_epochs,
        seed: a.seed,
    };
    let out = run_pretrain(&mols, &z, Some(&scaler), &cfg)
        .map_err(|e| CliError::from(e).context(a.corpus.display()))?;
    out.checkpoint
        .save(&a.output)
        .map_err(|e| CliError::from(e).context(a.output.display()))?;
    let rows: Vec<Vec<String>> = out
        .history
        .epochs
        .iter()
        .zip(&out.val_rmse[1..])
        .map(|(r, rmse)| {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            vec![
                r.epoch.to_string(),
                r.train_loss.to_string(),
                opt(r.val_loss),
                rmse.to_string(),
            ]
        })
        .collect();
    let header = ["epoch", "train_loss", "val_loss", "val_rmse"].map(String::from);
    let mut history = a.output.as_os_str().to_owned();
    history.push(".history.csv");
    write_file(Path::new(&history), &csv_bytes(&header, &rows))?;
    echo_config(&a.output, "pretrain", &a, workers)?;
    eprintln!(
        "pretrained {} epochs; held-out RMSE {:.4} -> {:.4}",
        out.history.epochs.len(),
        out.val_rmse[0],
        out.val_rmse
            .iter()
            .skip(1)
            .cloned()
            .fold(f64::INFINITY, f64::min)
    );
    Ok(())
}

pub fn finetune(a: FinetuneArgs, workers: usize) -> CliResult<()> {
    let rows =
        read_labeled_csv(&a.data).map_err(|e| CliError::from(e).context(a.data.display()))?;
    let (mols, labels): (Vec<Molecule>, Vec<f64>) = rows
        .into_iter()
        .filter(|r| r.split != Some(Split::Test))
        .map(|r| (r.molecule, r.target))
        .unzip();
    let base = match &a.checkpoint {
        Some(p) => load_checkpoint(p)?.model,
        None => Mpnn::new(
            MpnnConfig {
                hidden_size: a.hidden_size,
                depth: a.depth,
                ffn_layers: a.ffn_layers,
                ffn_hidden: a.ffn_hidden,
                output_dim: 1,
            },
            a.seed,
        )?,
    };
    let cfg = FinetuneConfig {
        task: a.task.into(),
        epochs: a.epochs,
        batch_size: a.batch_size,
        lr_head: a.lr_head,
        lr_mp: a.lr_mp,
        val_fraction: a.val_fraction,
        patience: a.patience,
        freeze_mp: a.freeze_mp,
        warmup_epochs: a.warmup_epochs,
        seed: a.seed,
        ..FinetuneConfig::default()
    };
    let out = run_finetune(&base, &mols, &labels, &cfg)
        .map_err(|e| CliError::from(e).context(a.data.display()))?;
    let best = out.history.best_val_loss().unwrap_or(f64::NAN);
    let ck = out
        .model
        .to_checkpoint(out.history.epochs.len(), best, a.seed);
    ck.save(&a.output)
        .map_err(|e| CliError::from(e).context(a.output.display()))?;
    echo_config(&a.output, "finetune", &a, workers)?;
    eprintln!(
        "fine-tuned on {} rows ({} validation); best validation loss {best:.4} at epoch {}",
        out.train_rows.len(),
        out.val_rows.len(),
        out.history.best_epoch
    );
    Ok(())
}

/// Molecules from a SMILES corpus, or from a CSV with a `smiles` (and optional `id`) column.
fn load_inputs(path: &Path) -> CliResult<(Vec<Molecule>, Vec<String>, Vec<String>)> {
    if path.extension().and_then(|e| e.to_str()) != Some("csv") {
        return load_corpus(path);
    }
    let at = |m: String| CliError::input(format!("{}: {m}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| at(e.to_string()))?;
    let headers = reader.headers().map_err(|e| at(e.to_string()))?.clone();
    let c_smiles = headers
        .iter()
        .position(|h| h == "smiles")
        .ok_or_else(|| at("missing column 'smiles'".into()))?;
    let c_id = headers.iter().position(|h| h == "id");
    let (mut mols, mut ids, mut smiles) = (Vec::new(), Vec::new(), Vec::new());
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| at(format!("line {}: {e}", i + 2)))?;
        let smi = rec.get(c_smiles).unwrap_or("");
        let m =
            parse_smiles(smi).map_err(|e| at(format!("line {}: SMILES '{smi}': {e}", i + 2)))?;
        mols.push(m);
        ids.push(c_id.and_then(|c| rec.get(c)).unwrap_or(smi).to_string());
        smiles.push(smi.to_string());
    }
    Ok((mols, ids, smiles))
}

pub fn predict(a: PredictArgs, workers: usize) -> CliResult<()> {
    let model = FittedModel::from_checkpoint(load_checkpoint(&a.checkpoint)?)
        .map_err(|e| CliError::from(e).context(a.checkpoint.display()))?;
    let (mols, ids, smiles) = load_inputs(&a.input)?;
    let preds = model.predict(&mols);
    if let Some(i) = preds.iter().position(|p| !p.is_finite()) {
        return Err(CliError::numeric(format!(
            "non-finite prediction for '{}'",
            smiles[i]
        )));
    }
    let rows: Vec<Vec<String>> = ids
        .into_iter()
        .zip(smiles)
        .zip(&preds)
        .map(|((id, s), p)| vec![id, s, p.to_string()])
        .collect();
    let header = ["id", "smiles", "prediction"].map(String::from);
    write_file(&a.output, &csv_bytes(&header, &rows))?;
    echo_config(&a.output, "predict", &a, workers)?;
    Ok(())
}

pub fn benchmark(a: BenchmarkArgs, workers: usize) -> CliResult<()> {
    if a.replicates < 2 {
        return Err(CliError::usage(
            "--replicates must be at least 2 for the HSD test",
        ));
    }
    let benchmarks = load_suite(&a.suite)?;
    let models = load_roster(&a.roster)?;
    let refs: Vec<&dyn ReplicateModel> = models.iter().map(|m| m as &dyn ReplicateModel).collect();
    let results = run_suite(&benchmarks, &refs, a.replicates, workers)?;
    let mut buf = Vec::new();
    write_results_csv(&mut buf, &results)?;
    write_file(&a.output, &buf)?;
    echo_config(&a.output, "benchmark", &a, workers)?;
    eprintln!(
        "{} results: {} benchmarks x {} models x {} seeds",
        results.len(),
        benchmarks.len(),
        models.len(),
        a.replicates
    );
    Ok(())
}

pub fn report(a: ReportArgs, workers: usize) -> CliResult<()> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(CliError::usage("--alpha must lie in (0, 1)"));
    }
    let results = read_results_csv(&a.results)?;
    if results.is_empty() {
        return Err(CliError::input(format!(
            "{}: no results",
            a.results.display()
        )));
    }
    let report = build_report(&results, a.alpha)?;
    let dir = &a.output_dir;
    write_file(
        &dir.join("benchmarks.csv"),
        report.benchmarks_csv().as_bytes(),
    )?;
    write_file(&dir.join("wins.csv"), report.wins_csv().as_bytes())?;
    write_file(
        &dir.join("consistency.csv"),
        report.consistency_csv().as_bytes(),
    )?;
    let table = report.table();
    write_file(&dir.join("report.txt"), table.as_bytes())?;
    echo_config(&dir.join("report"), "report", &a, workers)?;
    print!("{table}");
    Ok(())
}

type Embedder = Box<dyn Fn(&[Molecule]) -> Vec<Vec<f64>>>;

/// Learned fingerprints from a checkpoint's encoder, or Morgan counts.
fn embedder(
    checkpoint: Option<&Path>,
    morgan: bool,
    radius: usize,
    width: usize,
) -> CliResult<Embedder> {
    match (checkpoint, morgan) {
        (Some(p), false) => {
            let model = load_checkpoint(p)?.model;
            Ok(Box::new(move |mols| model.fingerprints(mols)))
        }
        (None, true) => {
            if width == 0 {
                return Err(CliError::usage("--width must be positive"));
            }
            Ok(Box::new(move |mols| {
                mols.iter()
                    .map(|m| morgan_fingerprint(m, radius, width).as_f64())
                    .collect()
            }))
        }
        _ => Err(CliError::usage(
            "give exactly one of --checkpoint or --morgan",
        )),
    }
}

pub fn fingerprint(a: FingerprintArgs, workers: usize) -> CliResult<()> {
    let (mols, ids, _) = load_corpus(&a.input)?;
    let embed = embedder(a.checkpoint.as_deref(), a.morgan, a.radius, a.width)?;
    let fps = embed(&mols);
    let dim = fps.first().map_or(0, Vec::len);
    let mut header = vec!["id".to_string()];
    header.extend((0..dim).map(|i| format!("f{i}")));
    let rows: Vec<Vec<String>> = ids
        .into_iter()
        .zip(&fps)
        .map(|(id, fp)| {
            std::iter::once(id)
                .chain(fp.iter().map(f64::to_string))
                .collect()
        })
        .collect();
    write_file(&a.output, &csv_bytes(&header, &rows))?;
    echo_config(&a.output, "fingerprint", &a, workers)?;
    Ok(())
}

fn read_embeddings(path: &Path) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
    let at = |m: String| CliError::input(format!("{}: {m}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| at(e.to_string()))?;
    let headers = reader.headers().map_err(|e| at(e.to_string()))?.clone();
    if headers.get(0) != Some("id") || headers.len() < 2 {
        return Err(at("expected header 'id,f0,...'".into()));
    }
    let (mut ids, mut points) = (Vec::new(), Vec::new());
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| at(format!("line {line}: {e}")))?;
        let v = rec
            .iter()
            .skip(1)
            .map(|s| s.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| at(format!("line {line}: non-numeric or non-finite value")))?;
        ids.push(rec[0].to_string());
        points.push(v);
    }
    Ok((ids, points))
}

pub fn project(a: ProjectArgs, workers: usize) -> CliResult<()> {
    let (ids, points, labels) = match (&a.series, &a.embeddings) {
        (Some(path), None) => {
            let series = read_series(path)?;
            let embed = embedder(a.checkpoint.as_deref(), a.morgan, a.radius, a.width)?;
            let (mut ids, mut points, mut labels, mut sorting) =
                (Vec::new(), Vec::new(), Vec::new(), Vec::new());
            for s in &series {
                let mut mols = vec![s.lead.clone()];
                mols.extend(s.members.iter().cloned());
                let emb = embed(&mols);
                let sorted = cosine_sort(&emb[0], &emb[1..])
                    .map_err(|e| CliError::from(e).context(format!("series '{}'", s.name)))?;
                let join =
                    |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
                sorting.push(vec![
                    s.name.clone(),
                    s.members.len().to_string(),
                    sorted.tau.to_string(),
                    join(&sorted.order),
                    join(&sorted.zero_norm),
                ]);
                for (k, e) in emb.into_iter().enumerate() {
                    ids.push(format!("{}:{k}", s.name));
                    points.push(e);
                    labels.push(s.name.clone());
                }
            }
            let header = [
                "series",
                "n_members",
                "kendall_tau_b",
                "predicted_order",
                "zero_norm",
            ]
            .map(String::from);
            let mut out = a.output.as_os_str().to_owned();
            out.push(".sorting.csv");
            write_file(Path::new(&out), &csv_bytes(&header, &sorting))?;
            (ids, points, labels)
        }
        (None, Some(path)) => {
            let (ids, points) = read_embeddings(path)?;
            let labels = vec![String::new(); ids.len()];
            (ids, points, labels)
        }
        _ => {
            return Err(CliError::usage(
                "give exactly one of --series or --embeddings",
            ))
        }
    };
    let cfg = TsneConfig {
        perplexity: a.perplexity,
        iterations: a.iterations,
        learning_rate: a.learning_rate,
        early_exaggeration: a.early_exaggeration,
        init: match a.init {
            InitArg::Pca => TsneInit::Pca,
            InitArg::Random => TsneInit::Random,
        },
        seed: a.seed,
        ..TsneConfig::default()
    };
    let source = a
        .series
        .as_ref()
        .or(a.embeddings.as_ref())
        .expect("checked above");
    let result = tsne(&points, &cfg).map_err(|e| CliError::from(e).context(source.display()))?;
    let mut buf = Vec::new();
    write_projection_csv(&mut buf, &ids, &result.coords, &labels)?;
    write_file(&a.output, &buf)?;
    echo_config(&a.output, "project", &a, workers)?;
    eprintln!(
        "t-SNE of {} points: KL {:.4} -> {:.4}",
        ids.len(),
        result.kl_initial,
        result.kl_final
    );
    Ok(())
}
