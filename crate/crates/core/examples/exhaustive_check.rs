//! Brute force over every configuration of a small game: count the Nash
//! equilibria and find the longest chain of best responses.

use sslab::model::{weights, CostPolicy, Instance};
use sslab::oracle::{self, ConfigurationGraph, PathOutcome, DEFAULT_BUDGET};

fn main() -> sslab::Result<()> {
    let inst = Instance::identical(weights(&[4, 3, 2, 1]), 3)?;
    println!("weights 4,3,2,1 on 3 identical machines");
    for policy in CostPolicy::ALL {
        let report = oracle::verify(&inst, policy, DEFAULT_BUDGET)?;
        let longest = report
            .longest_path
            .map_or("none (cycle)".to_string(), |l| l.to_string());
        println!(
            "  {policy:<8} states={} equilibria={} longest path={longest} cyclic={}",
            report.states, report.ne_states, report.cyclic
        );
    }

    let inst = Instance::identical(weights(&[1, 1, 2]), 2)?;
    let graph = ConfigurationGraph::build(&inst, CostPolicy::Makespan, DEFAULT_BUDGET)?;
    println!(
        "\nweights 1,1,2 on 2 machines, makespan: {} configurations",
        graph.node_count()
    );
    for id in graph.sinks() {
        println!("  equilibrium {:?}", graph.node(id));
    }
    if let PathOutcome::Acyclic { length, witness } = graph.longest_path(None) {
        println!("  longest best-response path: {length} moves from {:?}", witness.start);
        for (user, target) in witness.moves {
            println!("    user {user} -> machine {target}");
        }
    }
    Ok(())
}
