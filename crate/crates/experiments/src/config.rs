//! Experiment configuration: per-suite defaults overlaid with a JSON file
//! and command-line overrides.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use tangential::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    VerifySpace,
    StrongType,
    Decay,
    WeakType,
    Convergence,
    Weighted,
    Local,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::VerifySpace,
        Suite::StrongType,
        Suite::Decay,
        Suite::WeakType,
        Suite::Convergence,
        Suite::Weighted,
        Suite::Local,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::VerifySpace => "verify-space",
            Suite::StrongType => "strong-type",
            Suite::Decay => "decay",
            Suite::WeakType => "weak-type",
            Suite::Convergence => "convergence",
            Suite::Weighted => "weighted",
            Suite::Local => "local",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Circle,
    RealSphere,
    ComplexSphere,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub kind: ModelKind,
    /// Ambient real dimension of a real sphere, complex dimension of a
    /// complex sphere; ignored for the circle.
    pub dim: usize,
    /// Number of points.
    pub resolution: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub constant: bool,
    /// Radii of cap indicators, one randomly centered cap per radius.
    pub cap_radii: Vec<f64>,
    /// Number of random +-1 step functions.
    pub steps: usize,
    /// Anchors per step function; the sign is that of the nearest anchor.
    pub step_anchors: usize,
    /// Number of truncated power spikes.
    pub spikes: usize,
    /// Spikes decay like `d^(-gamma/q)` with `q = p (1 + margin)`.
    pub spike_margin: f64,
    /// Spikes are capped at `2^(cap_exponent / q)`.
    pub spike_cap_exponent: f64,
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec {
            constant: true,
            cap_radii: vec![0.1, 0.3, 1.0],
            steps: 2,
            step_anchors: 6,
            spikes: 2,
            spike_margin: 0.1,
            spike_cap_exponent: 8.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative drift of operator-norm ratios under one refinement.
    pub stability: f64,
    /// Allowed excess of a decay slope over `-gamma/p`.
    pub slope: f64,
    /// Change of a decay slope under one refinement (reported).
    pub slope_refinement: f64,
    pub domination_drift: f64,
    pub weighted_drift: f64,
    pub local_drift: f64,
    /// Agreement of the `beta = 0` weighted ratio with the strong ratio (reported).
    pub beta_zero_agreement: f64,
    /// Spike ratios relative to the cap baseline.
    pub spike_envelope: f64,
    pub homogeneity_max: f64,
    pub homogeneity_drift: f64,
    pub metric_slack: f64,
    /// Proven upper bound for the complex sphere quasimetric constant.
    pub complex_quasi_max: f64,
    pub convergence_eps: f64,
    pub monotone_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            stability: 0.10,
            slope: 0.15,
            slope_refinement: 0.05,
            domination_drift: 0.25,
            weighted_drift: 0.15,
            local_drift: 0.25,
            beta_zero_agreement: 0.15,
            spike_envelope: 3.0,
            homogeneity_max: 8.0,
            homogeneity_drift: 0.25,
            metric_slack: 1e-12,
            complex_quasi_max: 2.0,
            convergence_eps: 0.05,
            monotone_slack: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalSpec {
    /// Center of `G` and `K` in ambient coordinates; the first basis vector
    /// when absent.
    pub center: Option<Vec<f64>>,
    /// `G = {d(x, c) < g_radius}`.
    pub g_radius: f64,
    /// `K = {d(x, c) <= k_radius}`.
    pub k_radius: f64,
    /// Exponent `s` of the outside spike `d(x, -c)^(-gamma s)`, in `(1/p, 1)`.
    pub spike_exponent: f64,
}

impl Default for LocalSpec {
    fn default() -> Self {
        LocalSpec {
            center: None,
            g_radius: 1.0,
            k_radius: 0.5,
            spike_exponent: 0.9,
        }
    }
}

/// `sum_k a_k cos(k theta) + b_k sin(k theta)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigPolynomial {
    pub label: String,
    /// `(k, a_k, b_k)` triples.
    pub terms: Vec<(u32, f64, f64)>,
}

impl TrigPolynomial {
    pub fn eval(&self, theta: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(k, a, b)| {
                let kt = k as f64 * theta;
                a * kt.cos() + b * kt.sin()
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    /// Smallest `t0`; must be a grid scale.
    pub t0: f64,
    /// Number of evenly spaced sample points.
    pub samples: usize,
    pub per_octave: usize,
    pub functions: Vec<TrigPolynomial>,
}

impl Default for ConvergenceSpec {
    fn default() -> Self {
        ConvergenceSpec {
            t0: 2f64.powi(-9),
            samples: 64,
            per_octave: 1,
            functions: vec![
                TrigPolynomial {
                    label: "cos".into(),
                    terms: vec![(1, 1.0, 0.0)],
                },
                TrigPolynomial {
                    label: "mixed".into(),
                    terms: vec![(0, 0.5, 0.0), (2, 0.5, 0.0), (3, 0.0, 0.25)],
                },
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub space: SpaceConfig,
    pub p: f64,
    /// Defaults to `p / gamma`.
    pub delta: Option<f64>,
    /// Factors `A` of the decay suite; must be geometric.
    pub a_values: Vec<f64>,
    /// Scales per octave of the interior grid.
    pub per_octave: usize,
    pub family: FamilySpec,
    pub tolerances: Tolerances,
    pub seed: u64,
    /// Also run at twice the resolution.
    pub refine: bool,
    pub lambda_grid: usize,
    pub quasimetric_samples: usize,
    /// The homogeneity sweep starts at this multiple of the resolution floor.
    pub homogeneity_floor_factor: f64,
    pub local: LocalSpec,
    pub convergence: ConvergenceSpec,
}

impl ExperimentConfig {
    pub fn default_for(suite: Suite) -> Self {
        let mut cfg = ExperimentConfig {
            space: SpaceConfig {
                kind: ModelKind::Circle,
                dim: 2,
                resolution: 512,
            },
            p: 2.0,
            delta: None,
            a_values: vec![1.0, 2.0, 4.0, 8.0],
            per_octave: 4,
            family: FamilySpec::default(),
            tolerances: Tolerances::default(),
            seed: 20_240_601,
            refine: false,
            lambda_grid: tangential::measures::DEFAULT_LAMBDA_GRID,
            quasimetric_samples: 100_000,
            homogeneity_floor_factor: 4.0,
            local: LocalSpec::default(),
            convergence: ConvergenceSpec::default(),
        };
        match suite {
            Suite::VerifySpace | Suite::Decay => cfg.space.resolution = 1024,
            Suite::Convergence => cfg.space.resolution = 4096,
            Suite::WeakType => cfg.p = 1.0,
            Suite::Weighted => cfg.delta = Some(1.0),
            Suite::StrongType | Suite::Local => {}
        }
        cfg
    }

    /// Suite defaults overlaid with the JSON document at `path`.
    pub fn load(suite: Suite, path: Option<&Path>) -> Result<Self, Error> {
        let mut base = serde_json::to_value(Self::default_for(suite))?;
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)?;
            let overlay: Value = serde_json::from_str(&text)?;
            merge(&mut base, overlay);
        }
        Ok(serde_json::from_value(base)?)
    }

    /// Lowercase hex SHA-256 of the canonical (key-sorted) JSON form.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let canonical = serde_json::to_string(&value).expect("value serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        for suite in Suite::ALL {
            let cfg = ExperimentConfig::default_for(suite);
            let text = serde_json::to_string(&cfg).unwrap();
            let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn overlay_keeps_unset_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(
            &path,
            r#"{"p": 3.0, "space": {"resolution": 256}, "tolerances": {"slope": 0.2}}"#,
        )
        .unwrap();
        let cfg = ExperimentConfig::load(Suite::StrongType, Some(&path)).unwrap();
        assert_eq!(cfg.p, 3.0);
        assert_eq!(cfg.space.resolution, 256);
        assert_eq!(cfg.space.kind, ModelKind::Circle);
        assert_eq!(cfg.tolerances.slope, 0.2);
        assert_eq!(cfg.tolerances.stability, 0.10);
    }

    #[test]
    fn unknown_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"space": {"resolutoin": 256}}"#).unwrap();
        assert!(ExperimentConfig::load(Suite::Decay, Some(&path)).is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default_for(Suite::Local);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        b.seed += 1;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn trig_polynomial_values() {
        let f = TrigPolynomial {
            label: "x".into(),
            terms: vec![(0, 2.0, 0.0), (1, 1.0, 0.0), (2, 0.0, 3.0)],
        };
        assert!((f.eval(0.0) - 3.0).abs() < 1e-15);
        assert!((f.eval(std::f64::consts::FRAC_PI_4) - (2.0 + 0.5f64.sqrt() + 3.0)).abs() < 1e-12);
    }
}
