use tangential::space::{verify_homogeneity, verify_quasimetric};
use tangential::{Error, Quasimetric};

use super::{build_space, drift, resolutions};
use crate::config::{ExperimentConfig, Suite};
use crate::report::{ExperimentReport, Verdict};

/// Quasimetric constant and homogeneity constant of the configured space.
pub fn run_verify_space(cfg: &ExperimentConfig) -> Result<ExperimentReport, Error> {
    let mut report = ExperimentReport::new(Suite::VerifySpace, cfg);
    let tol = &cfg.tolerances;
    let mut constants = Vec::new();
    for n in resolutions(cfg) {
        let space = build_space(&cfg.space, n)?;
        let a = verify_quasimetric(&space, cfg.quasimetric_samples, cfg.seed)?;
        let h = space.resolution_floor();
        let t_max = 1.0f64.min(space.diameter());
        let t_min = (cfg.homogeneity_floor_factor * h).min(t_max);
        let c = verify_homogeneity(&space, t_min, t_max)?;
        report.record("space", n, &[("a_d", a), ("c_mu", c), ("floor", h), ("t_min", t_min)]);
        report.spaces.push(space.descriptor());
        match space.metric() {
            Quasimetric::Euclidean => report.verdict(Verdict::at_most(format!("a_d@{n}"), a, 1.0 + tol.metric_slack)),
            Quasimetric::ComplexNonisotropic => {
                report.verdict(Verdict::at_most(format!("a_d@{n}"), a, tol.complex_quasi_max))
            }
        }
        report.verdict(Verdict::at_most(format!("c_mu@{n}"), c, tol.homogeneity_max));
        constants.push(c);
    }
    if let [coarse, fine] = constants[..] {
        report.verdict(Verdict::at_most(
            "c_mu_drift",
            drift(coarse, fine),
            tol.homogeneity_drift,
        ));
    }
    Ok(report)
}
