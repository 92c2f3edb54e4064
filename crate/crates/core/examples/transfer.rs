//! Fine-tune a descriptor-pretrained network and a randomly initialized one
//! on a small synthetic task (standardized Wiener index plus noise) and
//! compare test RMSE per seed.

use molfm::descriptors::{apply_scaler, fit_scaler, DescriptorMatrix};
use molfm::dmpnn::Mpnn;
use molfm::stats::rmse;
use molfm::synth::{random_corpus, toy_corpus, wiener_task, GenConfig};
use molfm::train::{finetune, pretrain, split_indices, FinetuneConfig, PretrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mols: Vec<_> = toy_corpus(500, 7).into_iter().map(|x| x.1).collect();
    let raw = DescriptorMatrix::from_molecules(&mols, &Vec::<String>::new());
    let scaler = fit_scaler(&raw)?;
    let z = apply_scaler(&raw, &scaler)?;
    let cfg = PretrainConfig {
        epochs: 30,
        seed: 1,
        ..Default::default()
    };
    let pre = pretrain(&mols, &z, Some(&scaler), &cfg)?.checkpoint.model;

    let mut wins = 0;
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
        let scratch = Mpnn::new(*pre.config(), seed)?;
        let a = finetune(&pre, &train_m, &train_y, &fc)?.model;
        let b = finetune(&scratch, &train_m, &train_y, &fc)?.model;
        let ra = rmse(&a.predict(&test_m), &test_y)?;
        let rb = rmse(&b.predict(&test_m), &test_y)?;
        wins += usize::from(ra < rb);
        println!("seed {seed}: pretrained {ra:.4}  random init {rb:.4}");
    }
    println!("pretrained wins {wins}/5");
    Ok(())
}
