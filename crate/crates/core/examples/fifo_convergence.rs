//! FIFO scheduling converges fast no matter which user gets to move: on
//! identical machines every user moves at most once, and on unrelated
//! machines the sum of completion times drops by at least one per move.

use sslab::dynamics::{potential, run_to_ne, PriorityAlgorithm};
use sslab::experiments::{build_instance, MachineCount, WeightDistribution};
use sslab::model::{CostPolicy, MachineModel, State};
use sslab::rng::SplitMix64;

fn main() -> sslab::Result<()> {
    let mut rng = SplitMix64::new(2024);
    let priorities = [
        PriorityAlgorithm::Maw,
        PriorityAlgorithm::Miw,
        PriorityAlgorithm::Fifo,
        PriorityAlgorithm::Random { seed: 1 },
    ];

    println!("identical machines, all users start on machine 0");
    println!(
        "{:>5} {:>5} {:>6} {:>6} {:>6} {:>6}",
        "dist", "n", "maw", "miw", "fifo", "random"
    );
    for dist in WeightDistribution::ALL {
        for n in [20, 80, 160] {
            let inst = build_instance(MachineModel::Identical, dist, n, MachineCount::PerUsers(2), &mut rng)?;
            let steps: Vec<u64> = priorities
                .iter()
                .map(|&algo| {
                    run_to_ne(&inst, State::all_on(&inst, 0)?, CostPolicy::Fifo, algo, 1_000_000).map(|r| r.steps)
                })
                .collect::<sslab::Result<_>>()?;
            println!(
                "{dist:>5} {n:>5} {:>6} {:>6} {:>6} {:>6}",
                steps[0], steps[1], steps[2], steps[3]
            );
        }
    }

    let inst = build_instance(
        MachineModel::Unrelated,
        WeightDistribution::D,
        30,
        MachineCount::Fixed(6),
        &mut rng,
    )?;
    let start = State::random(&inst, 7)?;
    let run = run_to_ne(
        &inst,
        start.clone(),
        CostPolicy::Fifo,
        PriorityAlgorithm::Random { seed: 3 },
        1_000_000,
    )?;
    println!("\nunrelated machines, n=30 m=6: potential along the run");
    print!("{}", potential(&inst, &start, CostPolicy::Fifo)?);
    for ev in &run.trace {
        print!(" -> {}", ev.potential);
    }
    println!("\n{} moves", run.steps);
    Ok(())
}
