//! Parse a few SMILES strings and print the resulting graphs.
//!
//! Run with `cargo run --example parse_smiles -- "CC(=O)O" "c1ccncc1"`.

use molfm::molgraph::{parse_smiles, to_smiles};

fn main() {
    let mut inputs: Vec<String> = std::env::args().skip(1).collect();
    if inputs.is_empty() {
        inputs = [
            "CCO",
            "CC(=O)O",
            "c1ccccc1",
            "c1cc[nH]c1",
            "C[N+](C)(C)C",
            "C1CC",
        ]
        .map(String::from)
        .to_vec();
    }
    for s in &inputs {
        let m = match parse_smiles(s) {
            Ok(m) => m,
            Err(e) => {
                println!("{s}: rejected ({e})");
                continue;
            }
        };
        println!(
            "{s}: {} heavy atoms, {} bonds, {} rings -> {}",
            m.heavy_atom_count(),
            m.n_bonds(),
            m.ring_count(),
            to_smiles(&m)
        );
        for (i, a) in m.atoms().iter().enumerate() {
            println!(
                "  {i:>2} {:<2} aromatic={:<5} charge={:+} H={} degree={}",
                a.element.symbol(),
                a.aromatic,
                a.formal_charge,
                m.total_h(i),
                m.degree(i)
            );
        }
    }
}
