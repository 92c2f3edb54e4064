//! Sort a chemical series by cosine distance to its lead using Morgan count
//! fingerprints and score the order with Kendall tau-b.

use molfm::embed::{morgan_fingerprint, parse_series, sort_series};

const SERIES: &str = r#"[
  {"name": "alcohols", "lead": "CCO",
   "members": ["CCCO", "CCCCO", "CCCCCCO", "OCc1ccccc1", "c1ccccc1"]},
  {"name": "toluenes", "lead": "Cc1ccccc1",
   "members": ["CCc1ccccc1", "CCCc1ccccc1", "CCc1ccncc1", "C1CCCCC1", "CCCCCC"]}
]"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for s in parse_series(SERIES)? {
        let r = sort_series(&s, |m| morgan_fingerprint(m, 2, 2048).as_f64())?;
        println!("{} (lead {}): tau-b {:.3}", s.name, s.lead_smiles, r.tau);
        for &i in &r.order {
            let d = r.distances[i].map_or("n/a".to_string(), |d| format!("{d:.3}"));
            println!("  {:<14} distance {d}", s.member_smiles[i]);
        }
    }
    Ok(())
}
