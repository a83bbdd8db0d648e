use tangential::measures::{build_log_content, frostman_verify, layer_cake_norm, lp_norm};
use tangential::{Error, ScaleGrid};

use super::{build_space, check_p, drift, invalid, max_of, resolutions, resolve_delta, tangential_of_p0};
use crate::config::{ExperimentConfig, Suite};
use crate::family::generate;
use crate::report::{ExperimentReport, Verdict};

/// Weighted ratios `||L_delta(P_0 f)||_{nu,p} / ||f||_{mu,p}` for the
/// logarithmic content `nu` of exponent `beta = p - gamma delta`.
pub fn run_weighted(cfg: &ExperimentConfig) -> Result<ExperimentReport, Error> {
    check_p(cfg.p, true)?;
    let mut report = ExperimentReport::new(Suite::Weighted, cfg);
    let tol = &cfg.tolerances;
    let mut maxima = Vec::new();
    for n in resolutions(cfg) {
        let space = build_space(&cfg.space, n)?;
        let gamma = space.gamma();
        let delta = resolve_delta(cfg, gamma, false)?;
        let beta = cfg.p - gamma * delta;
        if beta < -1e-12 {
            return Err(invalid(format!("beta = p - gamma delta = {beta} must be >= 0")));
        }
        let beta = beta.max(0.0);
        let nu = build_log_content(&space, beta)?;
        let c = frostman_verify(&space, &nu, gamma, beta)?;
        report.record("content", n, &[("frostman", c), ("kappa", nu.kappa()), ("beta", beta)]);
        report.verdict(Verdict::at_most(format!("frostman@{n}"), c, 1.0));
        let grid = ScaleGrid::for_space(&space, cfg.per_octave)?;
        let family = generate(&space, &cfg.family, cfg.p, cfg.seed)?;
        let mut ratios = Vec::new();
        let mut unweighted = Vec::new();
        for f in &family {
            let f_norm = lp_norm(&space, &f.values, cfg.p)?;
            if f_norm == 0.0 {
                report.warn(format!("{} vanishes at resolution {n}; skipped", f.label));
                continue;
            }
            let g = tangential_of_p0(&space, &grid, &f.values, delta)?;
            let weighted = layer_cake_norm(&g, cfg.p, &nu, cfg.lambda_grid)? / f_norm;
            let plain = lp_norm(&space, &g, cfg.p)? / f_norm;
            report.record(&f.label, n, &[("weighted", weighted), ("unweighted", plain)]);
            ratios.push(weighted);
            unweighted.push(plain);
        }
        let top = max_of(ratios);
        report.verdict(Verdict::at_most(format!("weighted_finite@{n}"), top, f64::MAX));
        if beta == 0.0 {
            let v = Verdict::at_most(
                format!("beta_zero_agreement@{n}"),
                drift(max_of(unweighted), top),
                tol.beta_zero_agreement,
            );
            report.verdict(v.reported());
        }
        maxima.push(top);
    }
    if let [a, b] = maxima[..] {
        report.verdict(Verdict::at_most("weighted_drift", drift(a, b), tol.weighted_drift));
    } else {
        report.warn("refinement disabled; stability not assessed");
    }
    Ok(report)
}
