#![allow(dead_code)]

use nalgebra::DMatrix;
use pird::{psd_from_var, FrequencyGrid, Scenario, SpectralMatrix, VarModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GRID: usize = 2049;

/// A labelled model whose channel 0 is the target and every other channel a source.
pub struct Case {
    pub label: String,
    pub model: VarModel,
}

impl Case {
    pub fn sources(&self) -> Vec<usize> {
        (1..self.model.dim()).collect()
    }

    pub fn psd(&self) -> SpectralMatrix {
        self.psd_on(GRID)
    }

    pub fn psd_on(&self, n: usize) -> SpectralMatrix {
        let grid = FrequencyGrid::new(n, self.model.fs()).unwrap();
        psd_from_var(&self.model, &grid).unwrap()
    }
}

pub fn benchmarks() -> Vec<Case> {
    let mut out = Vec::new();
    for c in [0.0, 0.4, 0.8] {
        out.push(Case { label: format!("sim1(c={c})"), model: Scenario::Sim1 { c }.build().unwrap() });
        out.push(Case { label: format!("sim2(c={c})"), model: Scenario::Sim2 { c }.build().unwrap() });
    }
    out.push(Case { label: "sim3".into(), model: Scenario::Sim3.build().unwrap() });
    out
}

/// Seeded random stable VARs with 2 ≤ Q ≤ 4, 1 ≤ p ≤ 4 and companion
/// radius drawn uniformly from [0.3, 0.9].
pub fn random_models(n: usize, seed: u64) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let q = rng.random_range(2..=4);
            let p = rng.random_range(1..=4);
            let radius = rng.random_range(0.3..0.9);
            let s = rng.random::<u64>();
            Case {
                label: format!("random#{i}(Q={q},p={p},r={radius:.3})"),
                model: VarModel::random_stable(q, p, radius, s).unwrap(),
            }
        })
        .collect()
}

/// Models with no dynamics (every `A_k = 0`) and correlated innovations.
pub fn white_models(n: usize, seed: u64) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let q = rng.random_range(2..=4);
            let b = DMatrix::from_fn(q, q, |_, _| rng.random_range(-1.0..1.0));
            let sigma = &b * b.transpose() + DMatrix::identity(q, q) * 0.3;
            let sigma = (&sigma + sigma.transpose()) * 0.5;
            Case { label: format!("white#{i}(Q={q})"), model: VarModel::from_parts(vec![], sigma).unwrap() }
        })
        .collect()
}

/// Benchmarks plus 50 random stable VARs.
pub fn model_set() -> Vec<Case> {
    let mut v = benchmarks();
    v.extend(random_models(50, 2024));
    v
}
