//! Sequential best-response dynamics: at every step one improving user,
//! chosen by a priority rule, migrates to its best response.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::CheckedAdd;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{best_response, makespan, Cost, CostPolicy, Improvement, Instance, MachineModel, State};
use crate::rng::SplitMix64;

pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;

/// Which improving user moves next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PriorityAlgorithm {
    /// Heaviest candidate, lowest id on ties.
    Maw,
    /// Lightest candidate, lowest id on ties.
    Miw,
    /// Least recently selected candidate; never-selected users first, by id.
    Fifo,
    /// Uniform over candidates, drawn from a SplitMix64 stream.
    Random { seed: u64 },
}

impl PriorityAlgorithm {
    pub fn tag(&self) -> &'static str {
        match self {
            PriorityAlgorithm::Maw => "maw",
            PriorityAlgorithm::Miw => "miw",
            PriorityAlgorithm::Fifo => "fifo",
            PriorityAlgorithm::Random { .. } => "random",
        }
    }

    /// Parses a tag; `seed` is only used by `random`.
    pub fn parse(tag: &str, seed: u64) -> Result<Self> {
        match tag {
            "maw" => Ok(PriorityAlgorithm::Maw),
            "miw" => Ok(PriorityAlgorithm::Miw),
            "fifo" => Ok(PriorityAlgorithm::Fifo),
            "random" => Ok(PriorityAlgorithm::Random { seed }),
            other => Err(Error::Parse(format!("unknown priority algorithm `{other}`"))),
        }
    }
}

impl fmt::Display for PriorityAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.tag())
    }
}

/// Weight a priority rule sees for `user`: its processing amount on the
/// machine it currently occupies.
pub fn priority_weight(inst: &Instance, state: &State, user: usize) -> u128 {
    inst.processing(user, state.machine_of(user))
}

/// Selection history and random stream for one run.
#[derive(Debug, Clone)]
pub struct Selector {
    algo: PriorityAlgorithm,
    rng: SplitMix64,
    last_selected: Vec<u64>,
    selections: u64,
}

impl Selector {
    pub fn new(algo: PriorityAlgorithm, users: usize) -> Self {
        let seed = match algo {
            PriorityAlgorithm::Random { seed } => seed,
            _ => 0,
        };
        Selector {
            algo,
            rng: SplitMix64::new(seed),
            last_selected: vec![0; users],
            selections: 0,
        }
    }

    pub fn algorithm(&self) -> PriorityAlgorithm {
        self.algo
    }

    /// Picks one of `candidates` (ascending ids) and records the choice.
    pub fn select(&mut self, inst: &Instance, state: &State, candidates: &[usize]) -> Result<usize> {
        if candidates.is_empty() {
            return Err(Error::ContractViolation("select_user needs at least one candidate"));
        }
        let w = |u: usize| priority_weight(inst, state, u);
        let chosen = match self.algo {
            PriorityAlgorithm::Maw => *candidates
                .iter()
                .max_by_key(|&&u| (w(u), std::cmp::Reverse(u)))
                .unwrap(),
            PriorityAlgorithm::Miw => *candidates.iter().min_by_key(|&&u| (w(u), u)).unwrap(),
            PriorityAlgorithm::Fifo => *candidates.iter().min_by_key(|&&u| (self.last_selected[u], u)).unwrap(),
            PriorityAlgorithm::Random { .. } => candidates[self.rng.index(candidates.len())],
        };
        self.selections += 1;
        self.last_selected[chosen] = self.selections;
        Ok(chosen)
    }
}

/// All strictly improving deviations, in ascending user id.
pub fn improvements(inst: &Instance, state: &State, policy: CostPolicy) -> Result<Vec<Improvement>> {
    if inst.model() == MachineModel::Identical && matches!(policy, CostPolicy::Makespan | CostPolicy::Fifo) {
        return tail_join_improvements(inst, state, policy);
    }
    let mut out = Vec::new();
    for user in 0..inst.users() {
        if let Some(imp) = best_response(inst, state, user, policy)? {
            out.push(imp);
        }
    }
    Ok(out)
}

/// Identical machines where joining machine `j` costs `load(j) + w`: every
/// user's best response is the least-loaded other machine, so two scans
/// replace the per-user search.
fn tail_join_improvements(inst: &Instance, state: &State, policy: CostPolicy) -> Result<Vec<Improvement>> {
    let m = inst.machines();
    if m < 2 {
        return Ok(Vec::new());
    }
    let lightest = (0..m).min_by_key(|&j| (state.load_units(j), j)).unwrap();
    let runner_up = (0..m)
        .filter(|&j| j != lightest)
        .min_by_key(|&j| (state.load_units(j), j))
        .unwrap();
    let mut current = vec![0u128; inst.users()];
    for machine in 0..m {
        let mut prefix = 0u128;
        for &u in state.queue(machine) {
            prefix += inst.processing(u, machine);
            current[u] = match policy {
                CostPolicy::Fifo => prefix,
                _ => state.load_units(machine),
            };
        }
    }
    let mut out = Vec::new();
    for (user, &cost) in current.iter().enumerate() {
        let source = state.machine_of(user);
        let target = if source == lightest { runner_up } else { lightest };
        let after = state
            .load_units(target)
            .checked_add(inst.processing(user, target))
            .ok_or(Error::Overflow("user cost"))?;
        if after < cost {
            out.push(Improvement {
                user,
                source,
                target,
                cost_before: Cost::integer(cost),
                cost_after: Cost::integer(after),
            });
        }
    }
    Ok(out)
}

/// Users that can strictly lower their cost by moving, ascending.
pub fn improving_users(inst: &Instance, state: &State, policy: CostPolicy) -> Result<Vec<usize>> {
    Ok(improvements(inst, state, policy)?
        .into_iter()
        .map(|imp| imp.user)
        .collect())
}

/// One selfish move. Returns the executed improvement, or `None` at a pure NE.
pub fn step(
    inst: &Instance,
    state: &mut State,
    policy: CostPolicy,
    selector: &mut Selector,
) -> Result<Option<Improvement>> {
    let moves = improvements(inst, state, policy)?;
    if moves.is_empty() {
        return Ok(None);
    }
    let users: Vec<usize> = moves.iter().map(|imp| imp.user).collect();
    let chosen = selector.select(inst, state, &users)?;
    let imp = moves[users.binary_search(&chosen).expect("selected user is a candidate")];
    state.move_user(inst, imp.user, imp.target)?;
    Ok(Some(imp))
}

/// Sum of all users' current costs under `policy`.
pub fn potential(inst: &Instance, state: &State, policy: CostPolicy) -> Result<Cost> {
    let overflow = || Error::Overflow("potential");
    let mut total = Ratio::from_integer(0u128);
    for machine in 0..inst.machines() {
        let queue = state.queue(machine);
        let p = |u: usize| inst.processing(u, machine);
        let units = match policy {
            CostPolicy::Makespan => state
                .load_units(machine)
                .checked_mul(queue.len() as u128)
                .ok_or_else(overflow)?,
            CostPolicy::Fifo => completion_sum(queue.iter().map(|&u| p(u))).ok_or_else(overflow)?,
            CostPolicy::Sjf | CostPolicy::Ljf => {
                let mut order: Vec<(u128, usize)> = queue.iter().map(|&u| (p(u), u)).collect();
                if policy == CostPolicy::Sjf {
                    order.sort_unstable();
                } else {
                    order.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
                }
                completion_sum(order.into_iter().map(|(w, _)| w)).ok_or_else(overflow)?
            }
        };
        let term = Ratio::new(units, inst.speed(machine));
        total = total.checked_add(&term).ok_or_else(overflow)?;
    }
    Ok(total.into())
}

/// Sum of prefix sums of `ws`.
fn completion_sum(ws: impl Iterator<Item = u128>) -> Option<u128> {
    let mut prefix = 0u128;
    let mut total = 0u128;
    for w in ws {
        prefix = prefix.checked_add(w)?;
        total = total.checked_add(prefix)?;
    }
    Some(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveType {
    Single,
    Flip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mover {
    User(usize),
    Pair(usize, usize),
}

impl fmt::Display for Mover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mover::User(u) => write!(f, "{u}"),
            Mover::Pair(a, b) => write!(f, "{a}+{b}"),
        }
    }
}

/// One executed move. For flips, `source`/`target` are the two machines and
/// the costs are the larger of their two loads before and after.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub step: u64,
    pub mover: Mover,
    pub source: usize,
    pub target: usize,
    pub cost_before: Cost,
    pub cost_after: Cost,
    pub potential: Cost,
    pub makespan: Cost,
}

impl TraceEvent {
    pub fn move_type(&self) -> MoveType {
        match self.mover {
            Mover::User(_) => MoveType::Single,
            Mover::Pair(..) => MoveType::Flip,
        }
    }

    /// Event for a single move already applied to `state`.
    pub fn single(step: u64, imp: &Improvement, inst: &Instance, state: &State, policy: CostPolicy) -> Result<Self> {
        Ok(TraceEvent {
            step,
            mover: Mover::User(imp.user),
            source: imp.source,
            target: imp.target,
            cost_before: imp.cost_before,
            cost_after: imp.cost_after,
            potential: potential(inst, state, policy)?,
            makespan: makespan(inst, state),
        })
    }
}

pub const TRACE_HEADER: &str = "step,mover,source,target,cost_before,cost_after,potential,makespan,move_type";

pub fn write_trace_csv<W: Write>(mut out: W, trace: &[TraceEvent]) -> std::io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for e in trace {
        let kind = match e.move_type() {
            MoveType::Single => "single",
            MoveType::Flip => "flip",
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            e.step, e.mover, e.source, e.target, e.cost_before, e.cost_after, e.potential, e.makespan, kind
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub max_steps: u64,
    /// Record a full trace (costs potential and makespan bookkeeping every step).
    pub trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_steps: DEFAULT_MAX_STEPS,
            trace: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub steps: u64,
    pub reached_ne: bool,
    pub final_state: State,
    /// Empty when the run was made without tracing.
    pub trace: Vec<TraceEvent>,
}

/// Runs selfish dynamics from `initial` until a pure NE or `max_steps` moves.
pub fn run_to_ne(
    inst: &Instance,
    initial: State,
    policy: CostPolicy,
    algo: PriorityAlgorithm,
    max_steps: u64,
) -> Result<RunResult> {
    run_with(inst, initial, policy, algo, RunOptions { max_steps, trace: true })
}

pub fn run_with(
    inst: &Instance,
    initial: State,
    policy: CostPolicy,
    algo: PriorityAlgorithm,
    opts: RunOptions,
) -> Result<RunResult> {
    if opts.max_steps == 0 {
        return Err(Error::ContractViolation("max_steps must be at least 1"));
    }
    let mut state = initial;
    let mut selector = Selector::new(algo, inst.users());
    let mut trace = Vec::new();
    let mut steps = 0u64;
    while steps < opts.max_steps {
        match step(inst, &mut state, policy, &mut selector)? {
            None => {
                return Ok(RunResult {
                    steps,
                    reached_ne: true,
                    final_state: state,
                    trace,
                })
            }
            Some(imp) => {
                steps += 1;
                if opts.trace {
                    trace.push(TraceEvent::single(steps, &imp, inst, &state, policy)?);
                }
            }
        }
    }
    let reached_ne = improvements(inst, &state, policy)?.is_empty();
    Ok(RunResult {
        steps,
        reached_ne,
        final_state: state,
        trace,
    })
}

impl FromStr for MoveType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(MoveType::Single),
            "flip" => Ok(MoveType::Flip),
            other => Err(Error::Parse(format!("unknown move type `{other}`"))),
        }
    }
}
