//! Compute the descriptor panel for a toy corpus, standardize it and
//! round-trip it through a CHMD file.

use molfm::descriptors::{
    apply_scaler, compute_descriptors, descriptor_names, fit_scaler, DescriptorMatrix,
};
use molfm::molgraph::parse_smiles;
use molfm::synth::toy_corpus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let aspirin = parse_smiles("CC(=O)Oc1ccccc1C(=O)O")?;
    let d = compute_descriptors(&aspirin);
    println!("aspirin:");
    for name in descriptor_names() {
        match d.get(&name) {
            Some(v) => println!("  {name:<24} {v:.4}"),
            None => println!("  {name:<24} (invalid)"),
        }
    }

    let corpus = toy_corpus(200, 3);
    let ids: Vec<&str> = corpus.iter().map(|(s, _)| s.as_str()).collect();
    let mols: Vec<_> = corpus.iter().map(|(_, m)| m.clone()).collect();
    let raw = DescriptorMatrix::from_molecules(&mols, &ids);
    let stats = fit_scaler(&raw)?;
    let z = apply_scaler(&raw, &stats)?;

    let path = std::env::temp_dir().join("molfm_descriptors_example.chmd");
    z.save(&path)?;
    let back = DescriptorMatrix::load(&path)?;
    // values are stored as f32; invalid cells come back masked
    assert_eq!(back.mask(), z.mask());
    let worst = back
        .values()
        .iter()
        .zip(z.values())
        .filter(|(a, _)| !a.is_nan())
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0, f64::max);
    println!("max round-trip error {worst:.1e}");
    println!(
        "\n{} x {} standardized matrix written to {}",
        back.n_rows(),
        back.n_cols(),
        path.display()
    );
    Ok(())
}
