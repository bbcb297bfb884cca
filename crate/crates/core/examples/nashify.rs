//! Turns an arbitrary assignment into a Nash equilibrium without increasing
//! the makespan, on identical and on related machines.

use sslab::model::{is_pure_ne, weights, CostPolicy, Instance, State};
use sslab::nashification::nashify;

fn show(label: &str, inst: &Instance, start: State) -> sslab::Result<()> {
    let result = nashify(inst, start.clone())?;
    println!("{label}");
    println!(
        "  before: {:?} makespan {}",
        start.assignment(),
        result.initial_makespan
    );
    println!(
        "  after:  {:?} makespan {}",
        result.final_state.assignment(),
        result.final_makespan
    );
    println!(
        "  {} moves, equilibrium: {}",
        result.moves,
        is_pure_ne(inst, &result.final_state, CostPolicy::Makespan)?
    );
    Ok(())
}

fn main() -> sslab::Result<()> {
    let inst = Instance::identical(weights(&[3, 3, 2]), 2)?;
    show("three jobs stacked on one machine", &inst, State::all_on(&inst, 0)?)?;

    let inst = Instance::identical(weights(&[9, 7, 6, 5, 5, 4, 2, 1]), 3)?;
    show(
        "random start, eight jobs on three machines",
        &inst,
        State::random(&inst, 11)?,
    )?;

    let inst = Instance::related(weights(&[8, 6, 6, 3, 2]), vec![1, 2, 4])?;
    show("related machines with speeds 1, 2, 4", &inst, State::all_on(&inst, 0)?)?;
    Ok(())
}
