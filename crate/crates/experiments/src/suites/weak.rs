use tangential::measures::{distribution_function, lambda_grid, lp_norm};
use tangential::{Error, ScaleGrid, WeightMeasure};

use super::{build_space, check_p, drift, max_of, resolutions, resolve_delta, tangential_of_p0};
use crate::config::{ExperimentConfig, Suite};
use crate::family::generate;
use crate::report::{ExperimentReport, Verdict};

/// Weak-type constants `sup_lambda lambda^p mu{L_delta(P_0 f) > lambda} / ||f||_p^p`.
/// For `p > 1` each is checked against the strong ratio raised to `p`.
pub fn run_weak_type(cfg: &ExperimentConfig) -> Result<ExperimentReport, Error> {
    check_p(cfg.p, false)?;
    let mut report = ExperimentReport::new(Suite::WeakType, cfg);
    let p = cfg.p;
    let mut constants = Vec::new();
    for n in resolutions(cfg) {
        let space = build_space(&cfg.space, n)?;
        let delta = resolve_delta(cfg, space.gamma(), false)?;
        let grid = ScaleGrid::for_space(&space, cfg.per_octave)?;
        let mu = WeightMeasure::from_space(&space);
        let family = generate(&space, &cfg.family, p, cfg.seed)?;
        let mut weak_all = Vec::new();
        for f in &family {
            let f_norm = lp_norm(&space, &f.values, p)?;
            if f_norm == 0.0 {
                report.warn(format!("{} vanishes at resolution {n}; skipped", f.label));
                continue;
            }
            let g = tangential_of_p0(&space, &grid, &f.values, delta)?;
            let mut weak = 0.0f64;
            for lambda in lambda_grid(&g, cfg.lambda_grid) {
                weak = weak.max(lambda.powf(p) * distribution_function(&g, lambda, &mu)?);
            }
            weak /= f_norm.powf(p);
            let mut values = vec![("weak", weak)];
            if p > 1.0 {
                let strong_pow = (lp_norm(&space, &g, p)? / f_norm).powf(p);
                values.push(("strong_pow", strong_pow));
                report.verdict(Verdict::at_most(
                    format!("chebyshev[{}]@{n}", f.label),
                    weak,
                    strong_pow * (1.0 + 1e-12),
                ));
            }
            report.record(&f.label, n, &values);
            weak_all.push(weak);
        }
        let c = max_of(weak_all);
        report.verdict(Verdict::at_most(format!("weak_constant_finite@{n}"), c, f64::MAX));
        constants.push(c);
    }
    if let [a, b] = constants[..] {
        report.verdict(Verdict::at_most(
            "weak_constant_drift",
            drift(a, b),
            cfg.tolerances.stability,
        ));
    } else {
        report.warn("refinement disabled; stability not assessed");
    }
    Ok(report)
}
