use crate::error::{Error, Result};
use crate::model::Instance;
use crate::rng::SplitMix64;

/// An assignment of users to machines together with each machine's
/// arrival queue (oldest first) and the raw load units it carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    assignment: Vec<usize>,
    queues: Vec<Vec<usize>>,
    stamps: Vec<u64>,
    clock: u64,
    loads: Vec<u128>,
}

impl State {
    /// Every user on `machine`, queued in ascending id order.
    pub fn all_on(inst: &Instance, machine: usize) -> Result<Self> {
        inst.check_machine(machine)?;
        Self::from_assignment(inst, &vec![machine; inst.users()])
    }

    /// Builds a state from a plain assignment; each queue holds its users in ascending id order.
    pub fn from_assignment(inst: &Instance, assignment: &[usize]) -> Result<Self> {
        if assignment.len() != inst.users() {
            return Err(Error::InvalidState(format!(
                "assignment has {} entries for {} users",
                assignment.len(),
                inst.users()
            )));
        }
        let mut state = State {
            assignment: assignment.to_vec(),
            queues: vec![Vec::new(); inst.machines()],
            stamps: vec![0; assignment.len()],
            clock: 0,
            loads: vec![0; inst.machines()],
        };
        for (user, &machine) in assignment.iter().enumerate() {
            inst.check_machine(machine)?;
            state.enqueue(inst, user, machine)?;
        }
        Ok(state)
    }

    /// Builds a state from explicit per-machine queues (oldest first).
    pub fn from_queues(inst: &Instance, queues: &[Vec<usize>]) -> Result<Self> {
        if queues.len() != inst.machines() {
            return Err(Error::InvalidState("one queue per machine required".into()));
        }
        let n = inst.users();
        let mut seen = vec![false; n];
        let mut state = State {
            assignment: vec![0; n],
            queues: vec![Vec::new(); inst.machines()],
            stamps: vec![0; n],
            clock: 0,
            loads: vec![0; inst.machines()],
        };
        for (machine, queue) in queues.iter().enumerate() {
            for &user in queue {
                inst.check_user(user)?;
                if std::mem::replace(&mut seen[user], true) {
                    return Err(Error::InvalidState(format!("user {user} queued twice")));
                }
                state.enqueue(inst, user, machine)?;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidState(format!("user {missing} not queued")));
        }
        Ok(state)
    }

    /// Uniformly random placement drawn from `seed`.
    pub fn random(inst: &Instance, seed: u64) -> Result<Self> {
        let mut rng = SplitMix64::new(seed);
        let assignment: Vec<usize> = (0..inst.users()).map(|_| rng.index(inst.machines())).collect();
        Self::from_assignment(inst, &assignment)
    }

    fn enqueue(&mut self, inst: &Instance, user: usize, machine: usize) -> Result<()> {
        self.clock += 1;
        self.stamps[user] = self.clock;
        self.assignment[user] = machine;
        self.queues[machine].push(user);
        self.loads[machine] = self.loads[machine]
            .checked_add(inst.processing(user, machine))
            .ok_or(Error::Overflow("machine load"))?;
        Ok(())
    }

    fn dequeue(&mut self, inst: &Instance, user: usize) {
        let machine = self.assignment[user];
        let queue = &mut self.queues[machine];
        let pos = queue
            .iter()
            .position(|&u| u == user)
            .expect("user queued on its machine");
        queue.remove(pos);
        self.loads[machine] -= inst.processing(user, machine);
    }

    /// Moves `user` to the tail of `target`'s queue with a fresh arrival stamp.
    pub fn move_user(&mut self, inst: &Instance, user: usize, target: usize) -> Result<()> {
        inst.check_user(user)?;
        inst.check_machine(target)?;
        if self.assignment[user] == target {
            return Err(Error::InvalidState(format!("user {user} already on machine {target}")));
        }
        self.dequeue(inst, user);
        self.enqueue(inst, user, target)
    }

    /// Exchanges the machines of two users on different machines; `a` arrives first.
    pub fn swap_users(&mut self, inst: &Instance, a: usize, b: usize) -> Result<()> {
        inst.check_user(a)?;
        inst.check_user(b)?;
        let (ma, mb) = (self.assignment[a], self.assignment[b]);
        if ma == mb {
            return Err(Error::InvalidState(format!("users {a} and {b} share machine {ma}")));
        }
        self.dequeue(inst, a);
        self.dequeue(inst, b);
        self.enqueue(inst, a, mb)?;
        self.enqueue(inst, b, ma)
    }

    pub fn machine_of(&self, user: usize) -> usize {
        self.assignment[user]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn queue(&self, machine: usize) -> &[usize] {
        &self.queues[machine]
    }

    pub fn queues(&self) -> &[Vec<usize>] {
        &self.queues
    }

    /// Unscaled load units on `machine` (divide by speed for the load).
    #[inline]
    pub fn load_units(&self, machine: usize) -> u128 {
        self.loads[machine]
    }

    pub fn arrival_stamp(&self, user: usize) -> u64 {
        self.stamps[user]
    }

    pub fn arrivals(&self) -> u64 {
        self.clock
    }

    /// Re-derives queues, stamps and loads from scratch and reports the first inconsistency.
    pub fn validate(&self, inst: &Instance) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidState(msg));
        if self.assignment.len() != inst.users() || self.queues.len() != inst.machines() {
            return bad("dimensions do not match instance".into());
        }
        let mut seen = vec![0usize; inst.users()];
        for (machine, queue) in self.queues.iter().enumerate() {
            let mut load = 0u128;
            let mut last = 0u64;
            for &user in queue {
                seen[user] += 1;
                if self.assignment[user] != machine {
                    return bad(format!("user {user} queued on {machine} but assigned elsewhere"));
                }
                if self.stamps[user] <= last {
                    return bad(format!("queue {machine} out of arrival order"));
                }
                last = self.stamps[user];
                load += inst.processing(user, machine);
            }
            if load != self.loads[machine] {
                return bad(format!("cached load of machine {machine} is stale"));
            }
        }
        if let Some(user) = seen.iter().position(|&c| c != 1) {
            return bad(format!("user {user} appears {} times", seen[user]));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::weights;

    #[test]
    fn moves_keep_queues_consistent() {
        let inst = Instance::identical(weights(&[3, 3, 2]), 3).unwrap();
        let mut s = State::all_on(&inst, 0).unwrap();
        assert_eq!(s.queue(0), &[0, 1, 2]);
        s.move_user(&inst, 1, 2).unwrap();
        s.move_user(&inst, 0, 2).unwrap();
        assert_eq!(s.queue(2), &[1, 0]);
        assert_eq!(s.load_units(2), 6);
        assert_eq!(s.load_units(0), 2);
        s.swap_users(&inst, 2, 1).unwrap();
        assert_eq!(s.queue(0), &[1]);
        assert_eq!(s.queue(2), &[0, 2]);
        s.validate(&inst).unwrap();
    }

    #[test]
    fn invalid_moves_rejected() {
        let inst = Instance::identical(weights(&[1, 1]), 2).unwrap();
        let mut s = State::all_on(&inst, 0).unwrap();
        assert!(matches!(s.move_user(&inst, 0, 5), Err(Error::UnknownMachine(5))));
        assert!(matches!(s.move_user(&inst, 9, 1), Err(Error::UnknownUser(9))));
        assert!(s.move_user(&inst, 0, 0).is_err());
        assert!(s.swap_users(&inst, 0, 1).is_err());
        assert!(State::from_assignment(&inst, &[0]).is_err());
        assert!(State::from_queues(&inst, &[vec![0, 0], vec![]]).is_err());
        assert!(State::from_queues(&inst, &[vec![0], vec![]]).is_err());
    }

    #[test]
    fn load_overflow_is_an_error() {
        let inst = Instance::identical(weights(&[u128::MAX, 1]), 1).unwrap();
        assert!(matches!(State::all_on(&inst, 0), Err(Error::Overflow(_))));
    }

    #[test]
    fn random_placement_is_seeded() {
        let inst = Instance::identical(weights(&[1; 20]), 4).unwrap();
        let a = State::random(&inst, 9).unwrap();
        assert_eq!(a, State::random(&inst, 9).unwrap());
        assert_ne!(a.assignment(), State::random(&inst, 10).unwrap().assignment());
    }
}
