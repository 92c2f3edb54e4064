//! Pre-train a D-MPNN on standardized descriptors of a toy corpus and save
//! the checkpoint.

use molfm::descriptors::{apply_scaler, fit_scaler, DescriptorMatrix};
use molfm::synth::toy_corpus;
use molfm::train::{pretrain, Checkpoint, PretrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = toy_corpus(500, 7);
    let ids: Vec<&str> = corpus.iter().map(|(s, _)| s.as_str()).collect();
    let mols: Vec<_> = corpus.iter().map(|(_, m)| m.clone()).collect();
    let raw = DescriptorMatrix::from_molecules(&mols, &ids);
    let scaler = fit_scaler(&raw)?;
    let z = apply_scaler(&raw, &scaler)?;

    let cfg = PretrainConfig {
        epochs: 30,
        seed: 1,
        ..Default::default()
    };
    let out = pretrain(&mols, &z, Some(&scaler), &cfg)?;
    println!("epoch  train_loss  val_rmse");
    println!("{:>5}  {:>10}  {:>8.4}", 0, "-", out.val_rmse[0]);
    for (r, rmse) in out.history.epochs.iter().zip(&out.val_rmse[1..]) {
        println!("{:>5}  {:>10.4}  {:>8.4}", r.epoch, r.train_loss, rmse);
    }

    let path = std::env::temp_dir().join("molfm_pretrain_example.chmc");
    out.checkpoint.save(&path)?;
    let back = Checkpoint::load(&path)?;
    println!(
        "kept epoch {}; checkpoint with {} descriptor targets at {}",
        out.history.best_epoch,
        back.descriptor_names.len(),
        path.display()
    );
    Ok(())
}
