//! Tukey HSD winner sets, win-rate aggregation and the cliff consistency test
//! on hand-made replicate values.

use molfm::stats::{
    aggregate_wins, cliff_consistency, studentized_range_quantile, tukey_hsd, Orientation,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "q(0.05; k=3, df=12) = {:.4}",
        studentized_range_quantile(0.05, 3, 12)?
    );

    let models = ["pretrained", "scratch", "descriptor_fnn"];
    // per benchmark: RMSE of each model over five seeds
    let benchmarks = [
        vec![
            vec![0.41, 0.43, 0.40, 0.42, 0.44],
            vec![0.55, 0.52, 0.57, 0.54, 0.53],
            vec![0.42, 0.45, 0.43, 0.41, 0.46],
        ],
        vec![
            vec![1.10, 1.05, 1.12, 1.08, 1.07],
            vec![1.09, 1.11, 1.06, 1.10, 1.08],
            vec![0.90, 0.92, 0.88, 0.91, 0.89],
        ],
    ];
    let mut winner_sets = Vec::new();
    for (b, groups) in benchmarks.iter().enumerate() {
        let r = tukey_hsd(groups, Orientation::LowerBetter, 0.05)?;
        let winners: Vec<String> = r.winners.iter().map(|&i| models[i].to_string()).collect();
        println!("benchmark {b}: q_crit {:.3}, winners {winners:?}", r.q_crit);
        winner_sets.push(winners);
    }
    for w in aggregate_wins(&models, &winner_sets) {
        println!("{:<15} {}/{} = {}%", w.model, w.wins, w.total, w.rate);
    }

    let diffs = [0.08, 0.12, 0.05, 0.10, 0.09];
    let c = cliff_consistency(&diffs, 0.05)?;
    println!(
        "cliff minus noncliff RMSE: t = {:.3}, p = {:.4}, consistent = {}",
        c.t, c.p, c.consistent
    );
    Ok(())
}
