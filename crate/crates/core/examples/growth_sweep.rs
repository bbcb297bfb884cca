//! Sweeps n for one configuration and classifies how the step count grows.
//! The sweep stops once the mean passes 10^4 steps.

use sslab::experiments::{
    run_experiment, write_series_csv, write_summary, ExperimentConfig, PriorityRule, WeightDistribution,
};
use sslab::model::CostPolicy;

fn main() -> sslab::Result<()> {
    let mut config = ExperimentConfig::new(
        CostPolicy::Sjf,
        PriorityRule::Maw,
        WeightDistribution::D,
        (10..=60).step_by(2).collect(),
    );
    config.stop_above = Some(10_000);
    config.seed = 42;

    let rows = run_experiment(&config)?;
    let stdout = std::io::stdout();
    write_series_csv(stdout.lock(), &config, &rows)?;
    println!();
    write_summary(stdout.lock(), &config, &rows)?;
    Ok(())
}
