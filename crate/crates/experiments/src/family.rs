//! Seeded test-function family: cap indicators, random +-1 step functions
//! and truncated power spikes.
//!
//! Centers and anchors are drawn as ambient unit vectors, so a family is the
//! same set of functions at every resolution.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use tangential::{Error, Space};

use crate::config::FamilySpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberKind {
    Constant,
    Cap,
    Steps,
    Spike,
}

#[derive(Clone, Debug)]
pub struct TestFunction {
    pub label: String,
    pub kind: MemberKind,
    pub values: Vec<f64>,
}

pub fn random_unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Distances from every point of the space to an ambient point.
pub fn distances_to(space: &Space, coords: &[f64]) -> Vec<f64> {
    (0..space.len()).map(|i| space.distance_to(i, coords)).collect()
}

/// Spike `min(d(x, c)^(-gamma/q), 2^(cap/q))`.
pub fn spike(space: &Space, center: &[f64], q: f64, cap_exponent: f64) -> Vec<f64> {
    let cap = 2f64.powf(cap_exponent / q);
    let e = -space.gamma() / q;
    distances_to(space, center)
        .into_iter()
        .map(|d| if d > 0.0 { d.powf(e).min(cap) } else { cap })
        .collect()
}

pub fn generate(space: &Space, spec: &FamilySpec, p: f64, seed: u64) -> Result<Vec<TestFunction>, Error> {
    if !(spec.spike_margin > 0.0) {
        return Err(Error::InvalidArgument("spike margin must be positive".into()));
    }
    if spec.steps > 0 && spec.step_anchors < 2 {
        return Err(Error::InvalidArgument(
            "step functions need at least two anchors".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = space.dim();
    let n = space.len();
    let mut out = Vec::new();
    if spec.constant {
        out.push(TestFunction {
            label: "constant".into(),
            kind: MemberKind::Constant,
            values: vec![1.0; n],
        });
    }
    for (k, &r) in spec.cap_radii.iter().enumerate() {
        let c = random_unit_vector(&mut rng, dim);
        let values = distances_to(space, &c)
            .into_iter()
            .map(|d| if d < r { 1.0 } else { 0.0 })
            .collect();
        out.push(TestFunction {
            label: format!("cap{k}_r{r}"),
            kind: MemberKind::Cap,
            values,
        });
    }
    for k in 0..spec.steps {
        let anchors: Vec<Vec<f64>> = (0..spec.step_anchors)
            .map(|_| random_unit_vector(&mut rng, dim))
            .collect();
        let values = (0..n)
            .map(|i| {
                let nearest = anchors
                    .iter()
                    .enumerate()
                    .map(|(a, c)| (space.distance_to(i, c), a))
                    .min_by(|x, y| x.partial_cmp(y).expect("finite distances"))
                    .map_or(0, |(_, a)| a);
                if nearest % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        out.push(TestFunction {
            label: format!("steps{k}"),
            kind: MemberKind::Steps,
            values,
        });
    }
    let q = p * (1.0 + spec.spike_margin);
    for k in 0..spec.spikes {
        let c = random_unit_vector(&mut rng, dim);
        out.push(TestFunction {
            label: format!("spike{k}"),
            kind: MemberKind::Spike,
            values: spike(space, &c, q, spec.spike_cap_exponent),
        });
    }
    Ok(out)
}
