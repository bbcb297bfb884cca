//! Steering an assignment to a pure NE without raising the makespan.
//!
//! Realized as heaviest-first best-response dynamics under the makespan
//! policy: every move lands the mover on a machine whose new load is below
//! the mover's old cost, so the social cost never increases. On identical
//! machines each user moves at most once.

use crate::dynamics::{run_to_ne, PriorityAlgorithm, TraceEvent, DEFAULT_MAX_STEPS};
use crate::error::{Error, Result};
use crate::model::{makespan, Cost, CostPolicy, Instance, MachineModel, State};

#[derive(Debug, Clone)]
pub struct NashifyResult {
    pub moves: u64,
    pub final_state: State,
    pub initial_makespan: Cost,
    pub final_makespan: Cost,
    pub trace: Vec<TraceEvent>,
}

pub fn nashify(inst: &Instance, initial: State) -> Result<NashifyResult> {
    if inst.model() == MachineModel::Unrelated {
        return Err(Error::Unsupported(
            "nashification needs identical or related machines".into(),
        ));
    }
    let initial_makespan = makespan(inst, &initial);
    let run = run_to_ne(
        inst,
        initial,
        CostPolicy::Makespan,
        PriorityAlgorithm::Maw,
        DEFAULT_MAX_STEPS,
    )?;
    if !run.reached_ne {
        return Err(Error::Range(format!("no equilibrium within {DEFAULT_MAX_STEPS} moves")));
    }
    Ok(NashifyResult {
        moves: run.steps,
        final_makespan: makespan(inst, &run.final_state),
        final_state: run.final_state,
        initial_makespan,
        trace: run.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{is_pure_ne, weights};

    #[test]
    fn three_jobs_two_machines() {
        let inst = Instance::identical(weights(&[3, 3, 2]), 2).unwrap();
        let r = nashify(&inst, State::all_on(&inst, 0).unwrap()).unwrap();
        assert_eq!(r.moves, 1);
        assert_eq!(
            (r.initial_makespan, r.final_makespan),
            (Cost::integer(8), Cost::integer(5))
        );
        assert_eq!(r.final_state.assignment(), &[1, 0, 0]);
        assert!(is_pure_ne(&inst, &r.final_state, CostPolicy::Makespan).unwrap());
    }

    #[test]
    fn equilibrium_input_is_untouched() {
        let inst = Instance::identical(weights(&[3, 2, 3]), 2).unwrap();
        let s = State::from_assignment(&inst, &[0, 0, 1]).unwrap();
        let r = nashify(&inst, s.clone()).unwrap();
        assert_eq!(r.moves, 0);
        assert_eq!(r.final_state, s);
    }

    #[test]
    fn related_machines_never_raise_makespan() {
        let inst = Instance::related(weights(&[7, 5, 4, 4, 2, 1]), vec![1, 2, 3]).unwrap();
        for seed in 0..20 {
            let s = State::random(&inst, seed).unwrap();
            let r = nashify(&inst, s).unwrap();
            assert!(r.final_makespan <= r.initial_makespan);
            let mut last = r.initial_makespan;
            for e in &r.trace {
                assert!(e.makespan <= last);
                last = e.makespan;
            }
        }
    }

    #[test]
    fn unrelated_rejected() {
        let inst = Instance::unrelated(vec![weights(&[1, 2])]).unwrap();
        let s = State::all_on(&inst, 0).unwrap();
        assert!(matches!(nashify(&inst, s), Err(Error::Unsupported(_))));
    }
}
