//! Game model: instances, states and the four machine cost policies.
//!
//! A user's cost on a machine is its completion time there. Makespan charges
//! every resident the whole load; SJF and LJF serve residents in increasing
//! or decreasing weight order (equal weights by ascending id); FIFO serves in
//! arrival order. A user evaluating a machine it is not on is costed as if it
//! joined that machine's queue tail.

mod cost;
mod instance;
mod state;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cost::Cost;
pub use instance::{weights, Instance, InstanceFile, MachineModel, Weight};
pub use state::State;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostPolicy {
    Makespan,
    Sjf,
    Ljf,
    Fifo,
}

impl CostPolicy {
    pub const ALL: [CostPolicy; 4] = [CostPolicy::Makespan, CostPolicy::Sjf, CostPolicy::Ljf, CostPolicy::Fifo];
}

impl fmt::Display for CostPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            CostPolicy::Makespan => "makespan",
            CostPolicy::Sjf => "sjf",
            CostPolicy::Ljf => "ljf",
            CostPolicy::Fifo => "fifo",
        })
    }
}

impl FromStr for CostPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "makespan" => Ok(CostPolicy::Makespan),
            "sjf" => Ok(CostPolicy::Sjf),
            "ljf" => Ok(CostPolicy::Ljf),
            "fifo" => Ok(CostPolicy::Fifo),
            other => Err(Error::Parse(format!("unknown cost policy `{other}`"))),
        }
    }
}

/// A strictly improving unilateral deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Improvement {
    pub user: usize,
    pub source: usize,
    pub target: usize,
    pub cost_before: Cost,
    pub cost_after: Cost,
}

fn add(acc: u128, x: u128) -> Result<u128> {
    acc.checked_add(x).ok_or(Error::Overflow("user cost"))
}

/// Unscaled completion time of `user` on `machine`.
fn cost_units(inst: &Instance, state: &State, user: usize, machine: usize, policy: CostPolicy) -> Result<u128> {
    let own = inst.processing(user, machine);
    let resident = state.machine_of(user) == machine;
    match policy {
        CostPolicy::Makespan => {
            if resident {
                Ok(state.load_units(machine))
            } else {
                add(state.load_units(machine), own)
            }
        }
        CostPolicy::Fifo => {
            if !resident {
                return add(state.load_units(machine), own);
            }
            let mut total = 0u128;
            for &k in state.queue(machine) {
                total = add(total, inst.processing(k, machine))?;
                if k == user {
                    break;
                }
            }
            Ok(total)
        }
        CostPolicy::Sjf | CostPolicy::Ljf => {
            let shortest_first = policy == CostPolicy::Sjf;
            let mut total = own;
            for &k in state.queue(machine) {
                if k == user {
                    continue;
                }
                let p = inst.processing(k, machine);
                let ahead = if p == own {
                    k < user
                } else {
                    (p < own) == shortest_first
                };
                if ahead {
                    total = add(total, p)?;
                }
            }
            Ok(total)
        }
    }
}

/// Cost of `user` on `machine` under `policy`, either where it sits or as a tail arrival.
pub fn user_cost(inst: &Instance, state: &State, user: usize, machine: usize, policy: CostPolicy) -> Result<Cost> {
    inst.check_user(user)?;
    inst.check_machine(machine)?;
    let units = cost_units(inst, state, user, machine, policy)?;
    Ok(Cost::new(units, inst.speed(machine)))
}

pub fn machine_load(inst: &Instance, state: &State, machine: usize) -> Result<Cost> {
    inst.check_machine(machine)?;
    Ok(Cost::new(state.load_units(machine), inst.speed(machine)))
}

/// Largest machine load (the social cost).
pub fn makespan(inst: &Instance, state: &State) -> Cost {
    (0..inst.machines())
        .map(|j| Cost::new(state.load_units(j), inst.speed(j)))
        .max()
        .unwrap_or(Cost::ZERO)
}

/// The cheapest alternative machine for `user`, if it is strictly cheaper
/// than staying. Equally cheap machines resolve to the lowest index.
pub fn best_response(inst: &Instance, state: &State, user: usize, policy: CostPolicy) -> Result<Option<Improvement>> {
    inst.check_user(user)?;
    let source = state.machine_of(user);
    let current = Cost::new(cost_units(inst, state, user, source, policy)?, inst.speed(source));
    let mut best: Option<(usize, Cost)> = None;
    for target in (0..inst.machines()).filter(|&j| j != source) {
        let c = Cost::new(cost_units(inst, state, user, target, policy)?, inst.speed(target));
        if best.is_none_or(|(_, b)| c < b) {
            best = Some((target, c));
        }
    }
    Ok(best
        .filter(|&(_, c)| c < current)
        .map(|(target, cost_after)| Improvement {
            user,
            source,
            target,
            cost_before: current,
            cost_after,
        }))
}

pub fn is_pure_ne(inst: &Instance, state: &State, policy: CostPolicy) -> Result<bool> {
    for user in 0..inst.users() {
        if best_response(inst, state, user, policy)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cost(inst: &Instance, s: &State, user: usize, machine: usize, p: CostPolicy) -> Cost {
        user_cost(inst, s, user, machine, p).unwrap()
    }

    // users (id, w): (0,9) parked on machine 1; (1,4), (2,2), (3,7) on machine 0
    fn three_on_zero() -> (Instance, State) {
        let inst = Instance::identical(weights(&[9, 4, 2, 7]), 2).unwrap();
        let s = State::from_assignment(&inst, &[1, 0, 0, 0]).unwrap();
        (inst, s)
    }

    #[test]
    fn makespan_charges_the_load() {
        let inst = Instance::identical(weights(&[3, 2, 2]), 2).unwrap();
        let s = State::from_assignment(&inst, &[0, 0, 1]).unwrap();
        assert_eq!(cost(&inst, &s, 1, 0, CostPolicy::Makespan), Cost::integer(5));
        assert_eq!(cost(&inst, &s, 2, 0, CostPolicy::Makespan), Cost::integer(7));
    }

    #[test]
    fn sjf_and_ljf_completion_times() {
        let (inst, s) = three_on_zero();
        assert_eq!(cost(&inst, &s, 1, 0, CostPolicy::Sjf), Cost::integer(6));
        assert_eq!(cost(&inst, &s, 2, 0, CostPolicy::Ljf), Cost::integer(13));
    }

    #[test]
    fn fifo_queue_prefix() {
        let inst = Instance::identical(weights(&[1, 4, 1, 7]), 2).unwrap();
        let s = State::from_queues(&inst, &[vec![3, 1], vec![0, 2]]).unwrap();
        assert_eq!(cost(&inst, &s, 1, 0, CostPolicy::Fifo), Cost::integer(11));
        assert_eq!(cost(&inst, &s, 3, 0, CostPolicy::Fifo), Cost::integer(7));
        // joining machine 1 lands behind users 0 and 2
        assert_eq!(cost(&inst, &s, 1, 1, CostPolicy::Fifo), Cost::integer(6));
    }

    #[test]
    fn equal_weights_served_by_id() {
        let inst = Instance::identical(weights(&[5, 5, 5]), 1).unwrap();
        let s = State::all_on(&inst, 0).unwrap();
        for p in [CostPolicy::Sjf, CostPolicy::Ljf] {
            assert_eq!(cost(&inst, &s, 0, 0, p), Cost::integer(5));
            assert_eq!(cost(&inst, &s, 2, 0, p), Cost::integer(15));
        }
    }

    #[test]
    fn machine_loads() {
        let inst = Instance::identical(weights(&[5, 1]), 2).unwrap();
        let s = State::all_on(&inst, 0).unwrap();
        assert_eq!(machine_load(&inst, &s, 1).unwrap(), Cost::ZERO);
        assert_eq!(machine_load(&inst, &s, 0).unwrap(), Cost::integer(6));
        let rel = Instance::related(weights(&[6]), vec![1, 2]).unwrap();
        let s = State::all_on(&rel, 1).unwrap();
        assert_eq!(machine_load(&rel, &s, 1).unwrap(), Cost::integer(3));
        assert!(matches!(machine_load(&rel, &s, 2), Err(Error::UnknownMachine(2))));
    }

    #[test]
    fn related_costs_are_exact_fractions() {
        let inst = Instance::related(weights(&[3, 2]), vec![2, 3]).unwrap();
        let s = State::from_assignment(&inst, &[0, 1]).unwrap();
        assert_eq!(cost(&inst, &s, 0, 0, CostPolicy::Makespan).to_string(), "3/2");
        assert_eq!(cost(&inst, &s, 0, 1, CostPolicy::Makespan).to_string(), "5/3");
    }

    #[test]
    fn unrelated_uses_matrix_entries() {
        let inst = Instance::unrelated(vec![weights(&[4, 1]), weights(&[2, 9])]).unwrap();
        let s = State::all_on(&inst, 0).unwrap();
        assert_eq!(cost(&inst, &s, 0, 0, CostPolicy::Makespan), Cost::integer(6));
        assert_eq!(cost(&inst, &s, 0, 0, CostPolicy::Sjf), Cost::integer(6));
        assert_eq!(cost(&inst, &s, 1, 0, CostPolicy::Sjf), Cost::integer(2));
        assert_eq!(cost(&inst, &s, 1, 1, CostPolicy::Fifo), Cost::integer(9));
        assert_eq!(
            best_response(&inst, &s, 0, CostPolicy::Makespan)
                .unwrap()
                .unwrap()
                .target,
            1
        );
    }

    #[test]
    fn unknown_ids_and_overflow() {
        let (inst, s) = three_on_zero();
        assert!(matches!(
            user_cost(&inst, &s, 7, 0, CostPolicy::Sjf),
            Err(Error::UnknownUser(7))
        ));
        assert!(matches!(
            user_cost(&inst, &s, 0, 3, CostPolicy::Sjf),
            Err(Error::UnknownMachine(3))
        ));
        let big = Instance::identical(weights(&[u128::MAX - 1, 1, 1]), 2).unwrap();
        let s = State::from_assignment(&big, &[0, 0, 1]).unwrap();
        assert!(matches!(
            user_cost(&big, &s, 2, 0, CostPolicy::Makespan),
            Err(Error::Overflow(_))
        ));
        assert!(best_response(&big, &s, 2, CostPolicy::Fifo).is_err());
    }

    #[test]
    fn best_response_moves_to_lightest_machine() {
        // mover w=3 shares machine 0 with load 7; machine 1 holds 2, machine 2 holds 4
        let inst = Instance::identical(weights(&[3, 7, 2, 4]), 3).unwrap();
        let s = State::from_assignment(&inst, &[0, 0, 1, 2]).unwrap();
        let imp = best_response(&inst, &s, 0, CostPolicy::Makespan).unwrap().unwrap();
        assert_eq!(
            (imp.target, imp.cost_after, imp.cost_before),
            (1, Cost::integer(5), Cost::integer(10))
        );
    }

    #[test]
    fn no_alternative_or_no_gain() {
        let inst = Instance::identical(weights(&[4, 2]), 1).unwrap();
        let s = State::all_on(&inst, 0).unwrap();
        assert_eq!(best_response(&inst, &s, 0, CostPolicy::Makespan).unwrap(), None);
        let single = Instance::identical(weights(&[3]), 2).unwrap();
        let s = State::all_on(&single, 1).unwrap();
        for p in CostPolicy::ALL {
            assert_eq!(best_response(&single, &s, 0, p).unwrap(), None);
        }
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let inst = Instance::identical(weights(&[1, 1, 1, 1]), 4).unwrap();
        let s = State::from_assignment(&inst, &[3, 3, 1, 2]).unwrap();
        let imp = best_response(&inst, &s, 1, CostPolicy::Makespan).unwrap().unwrap();
        assert_eq!(imp.target, 0);
    }

    #[test]
    fn ne_predicate() {
        let inst = Instance::identical(weights(&[3, 2, 3]), 2).unwrap();
        let s = State::from_assignment(&inst, &[0, 0, 1]).unwrap();
        assert!(is_pure_ne(&inst, &s, CostPolicy::Makespan).unwrap());
        let pair = Instance::identical(weights(&[1, 1]), 2).unwrap();
        let s = State::all_on(&pair, 0).unwrap();
        assert!(!is_pure_ne(&pair, &s, CostPolicy::Makespan).unwrap());
    }

    fn identical_state() -> impl Strategy<Value = (Instance, State)> {
        (1usize..5, prop::collection::vec(1u128..50, 1..9)).prop_flat_map(|(m, ws)| {
            let n = ws.len();
            (Just(m), Just(ws), prop::collection::vec(0..m, n), Just(())).prop_map(|(m, ws, assign, _)| {
                let inst = Instance::identical(weights(&ws), m).unwrap();
                let state = State::from_assignment(&inst, &assign).unwrap();
                (inst, state)
            })
        })
    }

    proptest! {
        #[test]
        fn makespan_cost_is_machine_load((inst, s) in identical_state()) {
            for u in 0..inst.users() {
                let j = s.machine_of(u);
                prop_assert_eq!(cost(&inst, &s, u, j, CostPolicy::Makespan), machine_load(&inst, &s, j).unwrap());
            }
        }

        #[test]
        fn extreme_users_pay_full_load((inst, s) in identical_state()) {
            let w = |u: usize| inst.processing(u, 0);
            for j in 0..inst.machines() {
                let q = s.queue(j);
                if q.is_empty() { continue; }
                let load = machine_load(&inst, &s, j).unwrap();
                // last in SJF order: max weight, highest id among ties
                let heaviest = *q.iter().max_by_key(|&&u| (w(u), u)).unwrap();
                let lightest = *q.iter().min_by_key(|&&u| (w(u), std::cmp::Reverse(u))).unwrap();
                prop_assert_eq!(cost(&inst, &s, heaviest, j, CostPolicy::Sjf), load);
                prop_assert_eq!(cost(&inst, &s, lightest, j, CostPolicy::Ljf), load);
                if q.len() == 1 {
                    for p in CostPolicy::ALL {
                        prop_assert_eq!(cost(&inst, &s, q[0], j, p), Cost::integer(w(q[0])));
                    }
                }
            }
        }

        #[test]
        fn fifo_tail_join_cost((inst, s) in identical_state()) {
            for u in 0..inst.users() {
                for j in (0..inst.machines()).filter(|&j| j != s.machine_of(u)) {
                    let expect = s.load_units(j) + inst.processing(u, j);
                    prop_assert_eq!(cost(&inst, &s, u, j, CostPolicy::Fifo), Cost::integer(expect));
                }
            }
        }

        #[test]
        fn sjf_plus_ljf_is_load_plus_own((inst, s) in identical_state()) {
            for u in 0..inst.users() {
                let j = s.machine_of(u);
                let mut ws: Vec<u128> = s.queue(j).iter().map(|&k| inst.processing(k, j)).collect();
                ws.sort_unstable();
                ws.dedup();
                if ws.len() != s.queue(j).len() { continue; }
                let both = cost(&inst, &s, u, j, CostPolicy::Sjf).numer() + cost(&inst, &s, u, j, CostPolicy::Ljf).numer();
                prop_assert_eq!(both, s.load_units(j) + inst.processing(u, j));
            }
        }
    }
}
