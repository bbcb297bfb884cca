//! Coalitions of two users on identical machines under the makespan policy.
//!
//! Besides unilateral moves, two users on different machines may exchange
//! machines (a 2-flip). A flip is improving when it strictly lowers the larger
//! of the two machines' loads: with `a` the heavier user on machine `A`, that
//! holds exactly when `0 < w_a - w_b < load(A) - load(B)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{self, Mover, RunOptions, Selector, TraceEvent};
use crate::error::{Error, Result};
use crate::model::{makespan, Cost, CostPolicy, Instance, MachineModel, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FlipMove {
    /// The heavier user, on the more loaded machine.
    pub user_a: usize,
    pub user_b: usize,
    pub machine_a: usize,
    pub machine_b: usize,
    /// `w_a - w_b`.
    pub pair_key: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoalitionPriority {
    /// Largest weight difference first.
    Map,
    /// Smallest weight difference first.
    Mip,
}

impl fmt::Display for CoalitionPriority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            CoalitionPriority::Map => "map",
            CoalitionPriority::Mip => "mip",
        })
    }
}

impl FromStr for CoalitionPriority {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "map" => Ok(CoalitionPriority::Map),
            "mip" => Ok(CoalitionPriority::Mip),
            other => Err(Error::Parse(format!("unknown coalition priority `{other}`"))),
        }
    }
}

/// Rejects anything but identical machines with the makespan policy.
pub fn check_supported(inst: &Instance, policy: CostPolicy) -> Result<()> {
    if inst.model() != MachineModel::Identical {
        return Err(Error::Unsupported(format!(
            "2-flips need identical machines, got {}",
            inst.model()
        )));
    }
    if policy != CostPolicy::Makespan {
        return Err(Error::Unsupported(format!(
            "2-flips need the makespan policy, got {policy}"
        )));
    }
    Ok(())
}

fn for_each_flip(inst: &Instance, state: &State, mut visit: impl FnMut(FlipMove)) {
    let m = inst.machines();
    for ma in 0..m {
        let la = state.load_units(ma);
        for mb in (0..m).filter(|&mb| state.load_units(mb) < la) {
            let gap = la - state.load_units(mb);
            for &a in state.queue(ma) {
                let wa = inst.processing(a, ma);
                for &b in state.queue(mb) {
                    let wb = inst.processing(b, mb);
                    if wa > wb && wa - wb < gap {
                        visit(FlipMove {
                            user_a: a,
                            user_b: b,
                            machine_a: ma,
                            machine_b: mb,
                            pair_key: wa - wb,
                        });
                    }
                }
            }
        }
    }
}

/// Every improving 2-flip, sorted by `(user_a, user_b)`.
pub fn improving_flips(inst: &Instance, state: &State) -> Result<Vec<FlipMove>> {
    check_supported(inst, CostPolicy::Makespan)?;
    let mut flips = Vec::new();
    for_each_flip(inst, state, |f| flips.push(f));
    flips.sort_unstable_by_key(|f| (f.user_a, f.user_b));
    Ok(flips)
}

fn preferred(priority: CoalitionPriority, x: &FlipMove, y: &FlipMove) -> bool {
    let key = match priority {
        CoalitionPriority::Map => y.pair_key.cmp(&x.pair_key),
        CoalitionPriority::Mip => x.pair_key.cmp(&y.pair_key),
    };
    key.then((x.user_a, x.user_b).cmp(&(y.user_a, y.user_b))).is_lt()
}

pub fn select_flip(flips: &[FlipMove], priority: CoalitionPriority) -> Result<FlipMove> {
    let mut best = *flips
        .first()
        .ok_or(Error::ContractViolation("select_flip needs at least one flip"))?;
    for f in &flips[1..] {
        if preferred(priority, f, &best) {
            best = *f;
        }
    }
    Ok(best)
}

/// The flip `priority` would pick, without materializing the candidate list.
pub fn best_flip(inst: &Instance, state: &State, priority: CoalitionPriority) -> Result<Option<FlipMove>> {
    check_supported(inst, CostPolicy::Makespan)?;
    let mut best: Option<FlipMove> = None;
    for_each_flip(inst, state, |f| {
        if best.as_ref().is_none_or(|b| preferred(priority, &f, b)) {
            best = Some(f);
        }
    });
    Ok(best)
}

#[derive(Debug, Clone)]
pub struct CoalitionRunResult {
    pub single_moves: u64,
    pub flips: u64,
    pub reached_ne: bool,
    pub final_state: State,
    pub trace: Vec<TraceEvent>,
}

impl CoalitionRunResult {
    pub fn steps(&self) -> u64 {
        self.single_moves + self.flips
    }
}

/// Unilateral best responses (picked by `algo`) take precedence; once none
/// exist, the flip picked by `cpriority` is executed. Stops when neither kind
/// of move improves.
pub fn run_coalitional(
    inst: &Instance,
    initial: State,
    algo: dynamics::PriorityAlgorithm,
    cpriority: CoalitionPriority,
    max_steps: u64,
) -> Result<CoalitionRunResult> {
    run_coalitional_with(inst, initial, algo, cpriority, RunOptions { max_steps, trace: true })
}

pub fn run_coalitional_with(
    inst: &Instance,
    initial: State,
    algo: dynamics::PriorityAlgorithm,
    cpriority: CoalitionPriority,
    opts: RunOptions,
) -> Result<CoalitionRunResult> {
    check_supported(inst, CostPolicy::Makespan)?;
    if opts.max_steps == 0 {
        return Err(Error::ContractViolation("max_steps must be at least 1"));
    }
    let policy = CostPolicy::Makespan;
    let mut state = initial;
    let mut selector = Selector::new(algo, inst.users());
    let mut result = CoalitionRunResult {
        single_moves: 0,
        flips: 0,
        reached_ne: false,
        final_state: state.clone(),
        trace: Vec::new(),
    };
    while result.steps() < opts.max_steps {
        if let Some(imp) = dynamics::step(inst, &mut state, policy, &mut selector)? {
            result.single_moves += 1;
            if opts.trace {
                let event = TraceEvent::single(result.steps(), &imp, inst, &state, policy)?;
                result.trace.push(event);
            }
            continue;
        }
        let Some(flip) = best_flip(inst, &state, cpriority)? else {
            result.reached_ne = true;
            break;
        };
        let before = pair_max(inst, &state, &flip);
        state.swap_users(inst, flip.user_a, flip.user_b)?;
        result.flips += 1;
        if opts.trace {
            result.trace.push(TraceEvent {
                step: result.steps(),
                mover: Mover::Pair(flip.user_a, flip.user_b),
                source: flip.machine_a,
                target: flip.machine_b,
                cost_before: before,
                cost_after: pair_max(inst, &state, &flip),
                potential: dynamics::potential(inst, &state, policy)?,
                makespan: makespan(inst, &state),
            });
        }
    }
    if !result.reached_ne {
        result.reached_ne =
            dynamics::improvements(inst, &state, policy)?.is_empty() && best_flip(inst, &state, cpriority)?.is_none();
    }
    result.final_state = state;
    Ok(result)
}

fn pair_max(inst: &Instance, state: &State, flip: &FlipMove) -> Cost {
    let a = Cost::new(state.load_units(flip.machine_a), inst.speed(flip.machine_a));
    let b = Cost::new(state.load_units(flip.machine_b), inst.speed(flip.machine_b));
    a.max(b)
}
