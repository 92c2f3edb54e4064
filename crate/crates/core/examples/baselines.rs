//! Descriptor FNN and PCA+MLP baselines on a synthetic regression task.

use molfm::baselines::{descriptor_fnn_fit, pcamlp_fit, BaselineConfig, Projection};
use molfm::stats::rmse;
use molfm::synth::{toy_corpus, wiener_task};
use molfm::train::{split_indices, FinetuneConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mols: Vec<_> = toy_corpus(150, 5).into_iter().map(|x| x.1).collect();
    let y = wiener_task(&mols, 0.1, 5);
    let (train, test) = split_indices(mols.len(), 0.2, 9);
    let pick = |rows: &[usize]| -> (Vec<_>, Vec<f64>) {
        rows.iter().map(|&i| (mols[i].clone(), y[i])).unzip()
    };
    let (train_m, train_y) = pick(&train);
    let (test_m, test_y) = pick(&test);

    let cfg = BaselineConfig {
        hidden: vec![64, 64],
        variance_threshold: 0.95,
        train: FinetuneConfig {
            seed: 1,
            ..Default::default()
        },
    };
    let (fnn, _) = descriptor_fnn_fit(&train_m, &train_y, &cfg)?;
    let (pcamlp, _) = pcamlp_fit(&train_m, &train_y, Projection::Local, &cfg)?;
    let k = pcamlp.pca.as_ref().map_or(0, |p| p.k);
    println!(
        "descriptor FNN test RMSE {:.4}",
        rmse(&fnn.predict(&test_m)?, &test_y)?
    );
    println!(
        "PCA+MLP ({k} components) test RMSE {:.4}",
        rmse(&pcamlp.predict(&test_m)?, &test_y)?
    );
    Ok(())
}
