//! Exact t-SNE on two Gaussian clusters in 10 dimensions, written as a
//! projection CSV.

use molfm::embed::{tsne, write_projection_csv, TsneConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let noise = Normal::new(0.0, 1.0)?;
    let points: Vec<Vec<f64>> = (0..60)
        .map(|i| {
            let centre = if i < 30 { 0.0 } else { 8.0 };
            (0..10).map(|_| centre + noise.sample(&mut rng)).collect()
        })
        .collect();

    let cfg = TsneConfig {
        perplexity: 10.0,
        ..Default::default()
    };
    let r = tsne(&points, &cfg)?;
    println!("KL {:.4} -> {:.4}", r.kl_initial, r.kl_final);

    let ids: Vec<String> = (0..points.len()).map(|i| format!("p{i}")).collect();
    let labels: Vec<String> = (0..points.len())
        .map(|i| if i < 30 { "a" } else { "b" }.to_string())
        .collect();
    let path = std::env::temp_dir().join("molfm_tsne_example.csv");
    write_projection_csv(std::fs::File::create(&path)?, &ids, &r.coords, &labels)?;
    println!("coordinates written to {}", path.display());
    Ok(())
}
