#![allow(dead_code)]

use sslab::model::{weights, Instance, MachineModel, Weight};
use sslab::rng::SplitMix64;

pub fn uniform_weights(rng: &mut SplitMix64, n: usize, max: u128) -> Vec<Weight> {
    (0..n).map(|_| Weight::new(1 + rng.below_u128(max)).unwrap()).collect()
}

/// Random instance of the given machine model with entries in `1..=max`.
pub fn random_instance(rng: &mut SplitMix64, model: MachineModel, n: usize, m: usize, max: u128) -> Instance {
    match model {
        MachineModel::Identical => Instance::identical(uniform_weights(rng, n, max), m).unwrap(),
        MachineModel::Related => {
            let speeds = (0..m).map(|_| 1 + rng.below(4) as u128).collect();
            Instance::related(uniform_weights(rng, n, max), speeds).unwrap()
        }
        MachineModel::Unrelated => {
            let rows = (0..n).map(|_| uniform_weights(rng, m, max)).collect();
            Instance::unrelated(rows).unwrap()
        }
    }
}

/// Small hand-picked weight vectors, including ties and one dominant job.
pub fn weight_grid(n: usize) -> Vec<Vec<u128>> {
    let all: &[&[u128]] = &[
        &[1, 1, 1, 1],
        &[1, 2, 3, 4],
        &[4, 3, 2, 1],
        &[1, 1, 2, 2],
        &[3, 3, 2, 5],
        &[10, 1, 1, 1],
        &[2, 7, 7, 3],
        &[5, 1, 4, 2],
    ];
    all.iter().map(|w| w[..n].to_vec()).collect()
}

pub fn grid_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for n in 1..=4 {
        for m in 1..=3 {
            for w in weight_grid(n) {
                out.push(Instance::identical(weights(&w), m).unwrap());
                let speeds: Vec<u128> = [1, 2, 3][..m].to_vec();
                out.push(Instance::related(weights(&w), speeds).unwrap());
                let rows = w
                    .iter()
                    .enumerate()
                    .map(|(i, &wi)| {
                        weights(
                            &(0..m)
                                .map(|j| 1 + (wi * (j as u128 + 1) + i as u128) % 6)
                                .collect::<Vec<_>>(),
                        )
                    })
                    .collect();
                out.push(Instance::unrelated(rows).unwrap());
            }
        }
    }
    out
}
