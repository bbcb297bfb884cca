//! Pairs of users on different machines may swap ("2-flip") when the swap
//! lowers the larger of the two loads. Which flip gets picked changes how many
//! are needed: mip (smallest pair) against map (largest pair).

use sslab::coalitions::CoalitionPriority;
use sslab::experiments::{
    classify_growth, run_experiment, ExperimentConfig, MachineCount, PriorityRule, WeightDistribution,
};
use sslab::model::CostPolicy;

fn main() -> sslab::Result<()> {
    let ns = vec![20, 40, 60, 80, 100, 140, 200];
    for cp in [CoalitionPriority::Mip, CoalitionPriority::Map] {
        let mut config = ExperimentConfig::new(
            CostPolicy::Makespan,
            PriorityRule::Maw,
            WeightDistribution::D,
            ns.clone(),
        );
        config.coalition = Some(cp);
        config.m = MachineCount::Fixed(10);
        config.repetitions = Some(20);
        config.seed = 5;
        let rows = run_experiment(&config)?;
        println!("{cp}: mean flips per n");
        for r in &rows {
            println!(
                "  n={:<4} flips={:>8.1} single moves={:>6.1}",
                r.n,
                r.mean_flips,
                r.mean_steps - r.mean_flips
            );
        }
        let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.mean_flips)).collect();
        println!("  growth: {}\n", classify_growth(&points));
    }
    Ok(())
}
