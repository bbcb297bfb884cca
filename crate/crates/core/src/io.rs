//! Assignment files: CSV with header `user,machine`, 0-based ids, one row per user.

use std::io::{Read, Write};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{Instance, State};

pub const ASSIGNMENT_HEADER: &str = "user,machine";

#[derive(Debug, Deserialize)]
struct Row {
    user: usize,
    machine: usize,
}

/// Reads an assignment; rows may come in any order but every user must appear once.
pub fn read_assignment<R: Read>(input: R, users: usize) -> Result<Vec<usize>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["user", "machine"] {
        return Err(Error::Parse(format!("assignment header must be `{ASSIGNMENT_HEADER}`")));
    }
    let mut assignment = vec![None; users];
    for row in reader.deserialize::<Row>() {
        let row = row.map_err(|e| Error::Parse(e.to_string()))?;
        let slot = assignment.get_mut(row.user).ok_or(Error::UnknownUser(row.user))?;
        if slot.replace(row.machine).is_some() {
            return Err(Error::Parse(format!("user {} listed twice", row.user)));
        }
    }
    assignment
        .into_iter()
        .enumerate()
        .map(|(user, m)| m.ok_or_else(|| Error::Parse(format!("user {user} missing from assignment"))))
        .collect()
}

pub fn read_state<R: Read>(input: R, inst: &Instance) -> Result<State> {
    let assignment = read_assignment(input, inst.users())?;
    State::from_assignment(inst, &assignment)
}

pub fn write_assignment<W: Write>(mut out: W, assignment: &[usize]) -> std::io::Result<()> {
    writeln!(out, "{ASSIGNMENT_HEADER}")?;
    for (user, machine) in assignment.iter().enumerate() {
        writeln!(out, "{user},{machine}")?;
    }
    Ok(())
}
