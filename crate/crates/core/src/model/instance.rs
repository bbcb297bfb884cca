use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer load units a user places on a machine; always at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u128", into = "u128")]
pub struct Weight(u128);

impl Weight {
    pub fn new(value: u128) -> Result<Self> {
        if value == 0 {
            return Err(Error::InvalidInstance("weights must be >= 1".into()));
        }
        Ok(Weight(value))
    }

    pub fn get(self) -> u128 {
        self.0
    }
}

impl TryFrom<u128> for Weight {
    type Error = Error;

    fn try_from(value: u128) -> Result<Self> {
        Weight::new(value)
    }
}

impl From<Weight> for u128 {
    fn from(w: Weight) -> u128 {
        w.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MachineModel {
    Identical,
    Related,
    Unrelated,
}

impl fmt::Display for MachineModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            MachineModel::Identical => "identical",
            MachineModel::Related => "related",
            MachineModel::Unrelated => "unrelated",
        })
    }
}

impl FromStr for MachineModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identical" => Ok(MachineModel::Identical),
            "related" => Ok(MachineModel::Related),
            "unrelated" => Ok(MachineModel::Unrelated),
            other => Err(Error::Parse(format!("unknown machine model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Jobs {
    Identical { weights: Vec<Weight> },
    Related { weights: Vec<Weight>, speeds: Vec<u128> },
    Unrelated { costs: Vec<Vec<Weight>> },
}

/// A parallel-links game: `n` users choosing among `m` machines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    machines: usize,
    jobs: Jobs,
}

impl Instance {
    pub fn identical(weights: Vec<Weight>, machines: usize) -> Result<Self> {
        check_sizes(weights.len(), machines)?;
        Ok(Instance {
            machines,
            jobs: Jobs::Identical { weights },
        })
    }

    /// Machines with positive integer speeds; a user's load on machine `j` is `w / speed[j]`.
    pub fn related(weights: Vec<Weight>, speeds: Vec<u128>) -> Result<Self> {
        check_sizes(weights.len(), speeds.len())?;
        if speeds.contains(&0) {
            return Err(Error::InvalidInstance("speeds must be positive".into()));
        }
        Ok(Instance {
            machines: speeds.len(),
            jobs: Jobs::Related { weights, speeds },
        })
    }

    /// `costs[i][j]` is the processing amount of user `i` on machine `j`.
    pub fn unrelated(costs: Vec<Vec<Weight>>) -> Result<Self> {
        let machines = costs.first().map_or(0, Vec::len);
        check_sizes(costs.len(), machines)?;
        if costs.iter().any(|row| row.len() != machines) {
            return Err(Error::InvalidInstance("cost matrix rows differ in length".into()));
        }
        Ok(Instance {
            machines,
            jobs: Jobs::Unrelated { costs },
        })
    }

    pub fn users(&self) -> usize {
        match &self.jobs {
            Jobs::Identical { weights } | Jobs::Related { weights, .. } => weights.len(),
            Jobs::Unrelated { costs } => costs.len(),
        }
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn model(&self) -> MachineModel {
        match self.jobs {
            Jobs::Identical { .. } => MachineModel::Identical,
            Jobs::Related { .. } => MachineModel::Related,
            Jobs::Unrelated { .. } => MachineModel::Unrelated,
        }
    }

    /// Per-user weight; `None` on unrelated machines.
    pub fn weights(&self) -> Option<&[Weight]> {
        match &self.jobs {
            Jobs::Identical { weights } | Jobs::Related { weights, .. } => Some(weights),
            Jobs::Unrelated { .. } => None,
        }
    }

    pub fn speeds(&self) -> Option<&[u128]> {
        match &self.jobs {
            Jobs::Related { speeds, .. } => Some(speeds),
            _ => None,
        }
    }

    pub fn cost_matrix(&self) -> Option<&[Vec<Weight>]> {
        match &self.jobs {
            Jobs::Unrelated { costs } => Some(costs),
            _ => None,
        }
    }

    /// Load units user `user` adds to machine `machine` (before speed scaling).
    #[inline]
    pub fn processing(&self, user: usize, machine: usize) -> u128 {
        match &self.jobs {
            Jobs::Identical { weights } | Jobs::Related { weights, .. } => weights[user].get(),
            Jobs::Unrelated { costs } => costs[user][machine].get(),
        }
    }

    #[inline]
    pub fn speed(&self, machine: usize) -> u128 {
        match &self.jobs {
            Jobs::Related { speeds, .. } => speeds[machine],
            _ => 1,
        }
    }

    /// Largest weight, or largest matrix entry on unrelated machines.
    pub fn max_weight(&self) -> u128 {
        match &self.jobs {
            Jobs::Identical { weights } | Jobs::Related { weights, .. } => {
                weights.iter().map(|w| w.get()).max().unwrap_or(0)
            }
            Jobs::Unrelated { costs } => costs.iter().flatten().map(|w| w.get()).max().unwrap_or(0),
        }
    }

    pub fn check_user(&self, user: usize) -> Result<()> {
        if user < self.users() {
            Ok(())
        } else {
            Err(Error::UnknownUser(user))
        }
    }

    pub fn check_machine(&self, machine: usize) -> Result<()> {
        if machine < self.machines {
            Ok(())
        } else {
            Err(Error::UnknownMachine(machine))
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&InstanceFile::from(self)).expect("instance serializes")
    }
}

fn check_sizes(n: usize, m: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInstance("need at least one user".into()));
    }
    if m == 0 {
        return Err(Error::InvalidInstance("need at least one machine".into()));
    }
    Ok(())
}

/// On-disk instance layout. Fields that do not belong to the model must be absent.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub model: MachineModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub machines: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Weight>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speeds: Option<Vec<u128>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_matrix: Option<Vec<Vec<Weight>>>,
}

impl TryFrom<InstanceFile> for Instance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Instance> {
        let absent = |present: bool, field: &str| -> Result<()> {
            if present {
                Err(Error::config(
                    field,
                    format!("must be absent for the {} model", file.model),
                ))
            } else {
                Ok(())
            }
        };
        match file.model {
            MachineModel::Identical => {
                absent(file.speeds.is_some(), "speeds")?;
                absent(file.cost_matrix.is_some(), "cost_matrix")?;
                let weights = file.weights.ok_or_else(|| Error::config("weights", "required"))?;
                let machines = file.machines.ok_or_else(|| Error::config("machines", "required"))?;
                Instance::identical(weights, machines)
            }
            MachineModel::Related => {
                absent(file.cost_matrix.is_some(), "cost_matrix")?;
                let weights = file.weights.ok_or_else(|| Error::config("weights", "required"))?;
                let speeds = file.speeds.ok_or_else(|| Error::config("speeds", "required"))?;
                if file.machines.is_some_and(|m| m != speeds.len()) {
                    return Err(Error::config("machines", "disagrees with speeds"));
                }
                Instance::related(weights, speeds)
            }
            MachineModel::Unrelated => {
                absent(file.weights.is_some(), "weights")?;
                absent(file.speeds.is_some(), "speeds")?;
                let costs = file
                    .cost_matrix
                    .ok_or_else(|| Error::config("cost_matrix", "required"))?;
                let inst = Instance::unrelated(costs)?;
                if file.machines.is_some_and(|m| m != inst.machines()) {
                    return Err(Error::config("machines", "disagrees with cost_matrix"));
                }
                Ok(inst)
            }
        }
    }
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        let mut file = InstanceFile {
            model: inst.model(),
            machines: None,
            weights: None,
            speeds: None,
            cost_matrix: None,
        };
        match &inst.jobs {
            Jobs::Identical { weights } => {
                file.machines = Some(inst.machines);
                file.weights = Some(weights.clone());
            }
            Jobs::Related { weights, speeds } => {
                file.weights = Some(weights.clone());
                file.speeds = Some(speeds.clone());
            }
            Jobs::Unrelated { costs } => file.cost_matrix = Some(costs.clone()),
        }
        file
    }
}

/// Convenience for tests and examples: panics on zero weights.
pub fn weights(values: &[u128]) -> Vec<Weight> {
    values.iter().map(|&v| Weight::new(v).expect("weight >= 1")).collect()
}
