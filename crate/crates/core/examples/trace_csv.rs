//! Loads an instance from JSON, runs one simulation and writes its trace as CSV.

use sslab::dynamics::{run_to_ne, write_trace_csv, PriorityAlgorithm};
use sslab::model::{CostPolicy, Instance, State};

const INSTANCE: &str = r#"{
  "model": "unrelated",
  "cost_matrix": [[4, 9, 2], [3, 3, 8], [7, 1, 5], [2, 6, 6], [5, 5, 1]]
}"#;

fn main() -> sslab::Result<()> {
    let inst = Instance::from_json(INSTANCE)?;
    let run = run_to_ne(
        &inst,
        State::all_on(&inst, 0)?,
        CostPolicy::Ljf,
        PriorityAlgorithm::Fifo,
        1000,
    )?;
    write_trace_csv(std::io::stdout().lock(), &run.trace)?;
    eprintln!("reached equilibrium: {} after {} moves", run.reached_ne, run.steps);
    Ok(())
}
