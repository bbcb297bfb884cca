//! Selfish best-response dynamics on parallel machines.
//!
//! `n` weighted users each pick one of `m` machines. Machines charge users by
//! a cost policy (makespan, SJF, LJF or FIFO); users that can strictly lower
//! their cost migrate one at a time, chosen by a priority rule, until a pure
//! Nash equilibrium is reached. The crate also covers pairwise exchanges
//! (2-flips) between coalitions of two users, nashification, exhaustive
//! small-instance oracles and growth-rate experiments.

pub mod cli;
pub mod coalitions;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod io;
pub mod model;
pub mod nashification;
pub mod oracle;
pub mod rng;

pub use error::{Error, Result};
