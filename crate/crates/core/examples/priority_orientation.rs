//! Under SJF and LJF the order in which users are allowed to move matters a
//! great deal. Letting the light users go first under SJF (or the heavy ones
//! under LJF) settles in at most n moves; the opposite pairing blows up.

use sslab::dynamics::{run_with, PriorityAlgorithm, RunOptions};
use sslab::experiments::{gen_weights, WeightDistribution};
use sslab::model::{CostPolicy, Instance, State};

fn steps(inst: &Instance, policy: CostPolicy, algo: PriorityAlgorithm) -> sslab::Result<u64> {
    let opts = RunOptions {
        max_steps: 10_000_000,
        trace: false,
    };
    Ok(run_with(inst, State::all_on(inst, 0)?, policy, algo, opts)?.steps)
}

fn main() -> sslab::Result<()> {
    use PriorityAlgorithm::{Maw, Miw};
    println!("weights 1..n (dist e), m = ceil(n/2), everyone starts on machine 0");
    println!(
        "{:>4} {:>9} {:>9} {:>9} {:>9}",
        "n", "miw+sjf", "maw+ljf", "maw+sjf", "miw+ljf"
    );
    for n in (8..=30).step_by(2) {
        let inst = Instance::identical(gen_weights(WeightDistribution::E, n, 0)?, n.div_ceil(2))?;
        println!(
            "{n:>4} {:>9} {:>9} {:>9} {:>9}",
            steps(&inst, CostPolicy::Sjf, Miw)?,
            steps(&inst, CostPolicy::Ljf, Maw)?,
            steps(&inst, CostPolicy::Sjf, Maw)?,
            steps(&inst, CostPolicy::Ljf, Miw)?,
        );
    }
    Ok(())
}
