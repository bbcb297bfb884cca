//! Brute-force ground truth for small instances.
//!
//! Costs here are recomputed from scratch by materializing each deviation as
//! a new configuration and charging the mover by the service order on its
//! machine; nothing is shared with the incremental cost code in `model`.
//! A configuration is the list of per-machine queues (oldest first). Except
//! under FIFO, queue order does not affect costs and configurations are
//! canonicalized to ascending ids.

use std::collections::HashMap;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::model::{CostPolicy, Instance, State};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

pub type Queues = Vec<Vec<usize>>;

/// All `m^n` assignments in lexicographic order (last user varies fastest).
pub fn enumerate_states(n: usize, m: usize, budget: u64) -> Result<impl Iterator<Item = Vec<usize>>> {
    let total = state_count(n, m)?;
    if total > budget {
        return Err(Error::Range(format!("{m}^{n} states exceed the budget of {budget}")));
    }
    let mut next = (m > 0).then(|| vec![0usize; n]);
    Ok(std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        for pos in (0..n).rev() {
            succ[pos] += 1;
            if succ[pos] < m {
                next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(current)
    }))
}

pub fn state_count(n: usize, m: usize) -> Result<u64> {
    u32::try_from(n)
        .ok()
        .and_then(|n| (m as u64).checked_pow(n))
        .ok_or_else(|| Error::Range(format!("{m}^{n} states overflow")))
}

/// Queues for an assignment, each in ascending id order.
pub fn canonical_queues(m: usize, assignment: &[usize]) -> Queues {
    let mut queues = vec![Vec::new(); m];
    for (user, &machine) in assignment.iter().enumerate() {
        queues[machine].push(user);
    }
    queues
}

fn locate(queues: &Queues, user: usize) -> usize {
    queues.iter().position(|q| q.contains(&user)).expect("user is queued")
}

/// Cost of `user` in `queues`, by the definition of each service order.
pub fn cost_in(inst: &Instance, queues: &Queues, user: usize, policy: CostPolicy) -> Ratio<u128> {
    let machine = locate(queues, user);
    let p = |u: usize| inst.processing(u, machine);
    let mut order = queues[machine].clone();
    match policy {
        CostPolicy::Makespan | CostPolicy::Fifo => {}
        CostPolicy::Sjf => order.sort_by_key(|&u| (p(u), u)),
        CostPolicy::Ljf => order.sort_by_key(|&u| (std::cmp::Reverse(p(u)), u)),
    }
    let served: u128 = if policy == CostPolicy::Makespan {
        order.iter().map(|&u| p(u)).sum()
    } else {
        let pos = order.iter().position(|&u| u == user).unwrap();
        order[..=pos].iter().map(|&u| p(u)).sum()
    };
    Ratio::new(served, inst.speed(machine))
}

/// `queues` after `user` leaves its machine and joins the tail of `target`.
pub fn deviate(queues: &Queues, user: usize, target: usize) -> Queues {
    let mut next = queues.clone();
    for q in next.iter_mut() {
        q.retain(|&u| u != user);
    }
    next[target].push(user);
    next
}

/// Cheapest strictly improving deviation of `user` (lowest machine on ties).
pub fn best_deviation(inst: &Instance, queues: &Queues, user: usize, policy: CostPolicy) -> Option<usize> {
    let here = locate(queues, user);
    let current = cost_in(inst, queues, user, policy);
    (0..inst.machines())
        .filter(|&j| j != here)
        .map(|j| (cost_in(inst, &deviate(queues, user, j), user, policy), j))
        .filter(|(c, _)| *c < current)
        .min()
        .map(|(_, j)| j)
}

pub fn is_ne_by_deviation(inst: &Instance, queues: &Queues, policy: CostPolicy) -> bool {
    (0..inst.users()).all(|u| best_deviation(inst, queues, u, policy).is_none())
}

/// Every assignment (with canonical queues) from which no user gains by deviating.
pub fn verify_ne_oracle(inst: &Instance, policy: CostPolicy, budget: u64) -> Result<Vec<Vec<usize>>> {
    let m = inst.machines();
    Ok(enumerate_states(inst.users(), m, budget)?
        .filter(|a| is_ne_by_deviation(inst, &canonical_queues(m, a), policy))
        .collect())
}

/// Whether moving `mover` to `target` is a best-response edge out of `state`.
pub fn is_best_response_edge(inst: &Instance, state: &State, mover: usize, target: usize, policy: CostPolicy) -> bool {
    best_deviation(inst, &state.queues().to_vec(), mover, policy) == Some(target)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub mover: usize,
    pub target: usize,
    pub to: usize,
}

/// Configurations reachable by best-response moves, with one edge per improving user.
#[derive(Debug, Clone)]
pub struct ConfigurationGraph {
    policy: CostPolicy,
    nodes: Vec<Queues>,
    index: HashMap<Queues, usize>,
    edges: Vec<Vec<Edge>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImprovementPath {
    pub start: Queues,
    /// `(mover, target)` pairs in order.
    pub moves: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathOutcome {
    Acyclic { length: u64, witness: ImprovementPath },
    Cyclic,
}

impl PathOutcome {
    pub fn length(&self) -> Option<u64> {
        match self {
            PathOutcome::Acyclic { length, .. } => Some(*length),
            PathOutcome::Cyclic => None,
        }
    }
}

impl ConfigurationGraph {
    /// Closure of `starts` under best-response moves.
    pub fn explore(
        inst: &Instance,
        policy: CostPolicy,
        starts: impl IntoIterator<Item = Queues>,
        budget: u64,
    ) -> Result<Self> {
        let mut graph = ConfigurationGraph {
            policy,
            nodes: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
        };
        for start in starts {
            graph.intern(start, budget)?;
        }
        let mut cursor = 0;
        while cursor < graph.nodes.len() {
            let queues = graph.nodes[cursor].clone();
            let mut out = Vec::new();
            for user in 0..inst.users() {
                if let Some(target) = best_deviation(inst, &queues, user, policy) {
                    let to = graph.intern(deviate(&queues, user, target), budget)?;
                    out.push(Edge {
                        mover: user,
                        target,
                        to,
                    });
                }
            }
            graph.edges.push(out);
            cursor += 1;
        }
        Ok(graph)
    }

    /// The full graph over all `m^n` assignments. Under FIFO the nodes are the
    /// configurations reachable from canonically queued assignments.
    pub fn build(inst: &Instance, policy: CostPolicy, budget: u64) -> Result<Self> {
        let m = inst.machines();
        let starts: Vec<Queues> = enumerate_states(inst.users(), m, budget)?
            .map(|a| canonical_queues(m, &a))
            .collect();
        Self::explore(inst, policy, starts, budget)
    }

    fn key(&self, mut queues: Queues) -> Queues {
        if self.policy != CostPolicy::Fifo {
            for q in queues.iter_mut() {
                q.sort_unstable();
            }
        }
        queues
    }

    fn intern(&mut self, queues: Queues, budget: u64) -> Result<usize> {
        let key = self.key(queues);
        if let Some(&id) = self.index.get(&key) {
            return Ok(id);
        }
        if self.nodes.len() as u64 >= budget {
            return Err(Error::Range(format!("configuration graph exceeds {budget} nodes")));
        }
        let id = self.nodes.len();
        self.index.insert(key.clone(), id);
        self.nodes.push(key);
        Ok(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: usize) -> &Queues {
        &self.nodes[id]
    }

    pub fn lookup(&self, queues: &Queues) -> Option<usize> {
        self.index.get(&self.key(queues.clone())).copied()
    }

    pub fn edges(&self, id: usize) -> &[Edge] {
        &self.edges[id]
    }

    pub fn sinks(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&id| self.edges[id].is_empty())
    }

    /// Longest best-response path out of every node, or `None` if a cycle exists.
    pub fn longest_paths(&self) -> Option<Vec<u64>> {
        const WHITE: u8 = 0;
        const GRAY: u8 = 1;
        const BLACK: u8 = 2;
        let mut color = vec![WHITE; self.nodes.len()];
        let mut longest = vec![0u64; self.nodes.len()];
        for root in 0..self.nodes.len() {
            if color[root] != WHITE {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            color[root] = GRAY;
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                if let Some(edge) = self.edges[node].get(*next) {
                    *next += 1;
                    match color[edge.to] {
                        GRAY => return None,
                        WHITE => {
                            color[edge.to] = GRAY;
                            stack.push((edge.to, 0));
                        }
                        _ => {}
                    }
                } else {
                    longest[node] = self.edges[node].iter().map(|e| longest[e.to] + 1).max().unwrap_or(0);
                    color[node] = BLACK;
                    stack.pop();
                }
            }
        }
        Some(longest)
    }

    /// Longest path starting at `from` (any node when `None`).
    pub fn longest_path(&self, from: Option<usize>) -> PathOutcome {
        let Some(longest) = self.longest_paths() else {
            return PathOutcome::Cyclic;
        };
        let start = from.unwrap_or_else(|| {
            (0..self.nodes.len())
                .max_by_key(|&v| (longest[v], std::cmp::Reverse(v)))
                .unwrap_or(0)
        });
        let mut moves = Vec::new();
        let mut node = start;
        while let Some(edge) = self.edges[node].iter().find(|e| longest[e.to] + 1 == longest[node]) {
            moves.push((edge.mover, edge.target));
            node = edge.to;
        }
        PathOutcome::Acyclic {
            length: longest[start],
            witness: ImprovementPath {
                start: self.nodes[start].clone(),
                moves,
            },
        }
    }
}

/// Longest best-response path over the whole configuration graph; an upper
/// bound on the steps any priority rule can take on `inst`.
pub fn longest_improvement_path(inst: &Instance, policy: CostPolicy, budget: u64) -> Result<PathOutcome> {
    Ok(ConfigurationGraph::build(inst, policy, budget)?.longest_path(None))
}

/// Longest best-response path from one starting state.
pub fn longest_improvement_path_from(
    inst: &Instance,
    policy: CostPolicy,
    start: &State,
    budget: u64,
) -> Result<PathOutcome> {
    let graph = ConfigurationGraph::explore(inst, policy, [start.queues().to_vec()], budget)?;
    Ok(graph.longest_path(Some(0)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub states: u64,
    pub ne_states: usize,
    pub longest_path: Option<u64>,
    pub cyclic: bool,
}

/// Summary for the `verify` command: state count, NE count, longest path and cycle flag.
pub fn verify(inst: &Instance, policy: CostPolicy, budget: u64) -> Result<VerifyReport> {
    let states = state_count(inst.users(), inst.machines())?;
    let ne_states = verify_ne_oracle(inst, policy, budget)?.len();
    let outcome = longest_improvement_path(inst, policy, budget)?;
    Ok(VerifyReport {
        states,
        ne_states,
        longest_path: outcome.length(),
        cyclic: outcome == PathOutcome::Cyclic,
    })
}
