use std::collections::BTreeMap;

use tangential::maximal::{ball_means, parametric_domain_nonempty, parametric_maximal};
use tangential::measures::lp_norm;
use tangential::{Approach, Error, ScaleGrid};

use super::{build_space, check_p, invalid, resolutions, resolve_delta};
use crate::config::{ExperimentConfig, Suite};
use crate::family::{generate, MemberKind};
use crate::report::{ExperimentReport, Verdict};

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn check_a_values(a: &[f64]) -> Result<(), Error> {
    if a.len() < 4 {
        return Err(invalid("the decay suite needs at least four values of A"));
    }
    if a.iter().any(|&x| !(x >= 1.0 && x.is_finite())) {
        return Err(invalid("every A must be a finite number >= 1"));
    }
    let ratio = a[1] / a[0];
    if !(ratio > 1.0) || a.windows(2).any(|w| ((w[1] / w[0]) - ratio).abs() > 1e-9 * ratio) {
        return Err(invalid("A values must form an increasing geometric sequence"));
    }
    Ok(())
}

/// Decay of `||L_{A,delta} u||_p` in `A` for the ball means `u` of each
/// family member; the fitted log-log slope should not exceed `-gamma/p`
/// by more than the slope tolerance.
pub fn run_decay(cfg: &ExperimentConfig) -> Result<ExperimentReport, Error> {
    check_p(cfg.p, false)?;
    check_a_values(&cfg.a_values)?;
    let mut report = ExperimentReport::new(Suite::Decay, cfg);
    let tol = &cfg.tolerances;
    let mut slopes: Vec<BTreeMap<String, f64>> = Vec::new();
    for n in resolutions(cfg) {
        let space = build_space(&cfg.space, n)?;
        let gamma = space.gamma();
        let delta = resolve_delta(cfg, gamma, false)?;
        let grid = ScaleGrid::for_space(&space, cfg.per_octave)?;
        if let Some(&a) = cfg.a_values.iter().find(|&&a| grid.shift_for(a).is_none()) {
            return Err(invalid(format!(
                "A = {a} is not 2^(k/{}) for an integer k",
                cfg.per_octave
            )));
        }
        let kept: Vec<f64> = cfg
            .a_values
            .iter()
            .copied()
            .filter(|&a| parametric_domain_nonempty(&grid, a, delta))
            .collect();
        for &a in cfg.a_values.iter().filter(|a| !kept.contains(a)) {
            report.warn(format!("A = {a} has an empty domain at resolution {n}; dropped"));
        }
        let target = -gamma / cfg.p + tol.slope;
        let family = generate(&space, &cfg.family, cfg.p, cfg.seed)?;
        let mut level_slopes = BTreeMap::new();
        for f in &family {
            let u = ball_means(&space, &grid, &f.values)?;
            let mut norms = Vec::new();
            for &a in &kept {
                let v = parametric_maximal(&space, &u, &Approach::parametric(a, delta))?;
                let norm = lp_norm(&space, &v, cfg.p)?;
                report.record(&f.label, n, &[("a", a), ("norm", norm)]);
                norms.push(norm);
            }
            if f.kind == MemberKind::Constant && !kept.is_empty() {
                // u = 1, so the supremum is 1 / log2(2/t*) at the largest admissible scale
                let shift = grid.shift_for(kept[0]).expect("checked above");
                let j = (shift..grid.len())
                    .find(|&j| grid.log_factor::<f64>(j).powf(delta) > kept[0])
                    .expect("domain is nonempty");
                let t_star: f64 = grid.scale(j);
                let expected = space.total_mass().powf(1.0 / cfg.p) / (2.0 / t_star).log2();
                report.verdict(Verdict::at_most(
                    format!("constant_norm_error@{n}"),
                    (norms[0] - expected).abs() / expected,
                    1e-9,
                ));
            }
            if norms.len() < 2 || norms.iter().any(|&v| !(v > 0.0)) {
                report.warn(format!("{} at resolution {n}: too few nonzero norms to fit", f.label));
                continue;
            }
            let slope = fit_slope(&kept, &norms);
            report.record(&f.label, n, &[("slope", slope), ("fitted_a", kept.len() as f64)]);
            let v = Verdict::at_most(format!("slope[{}]@{n}", f.label), slope, target);
            report.verdict(if kept.len() >= 3 { v } else { v.reported() });
            level_slopes.insert(f.label.clone(), slope);
        }
        slopes.push(level_slopes);
    }
    if let [coarse, fine] = &slopes[..] {
        for (label, a) in coarse {
            if let Some(b) = fine.get(label) {
                let v = Verdict::at_most(format!("slope_change[{label}]"), (a - b).abs(), tol.slope_refinement);
                report.verdict(v.reported());
            }
        }
    }
    Ok(report)
}
