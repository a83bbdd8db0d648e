use rayon::prelude::*;
use tangential::kernels::normalized_power_field;
use tangential::scalar::approach_width;
use tangential::{Error, Interior, KernelKind, ScaleGrid, Space};

use super::{build_space, invalid, resolutions, resolve_delta};
use crate::config::{ExperimentConfig, ModelKind, Suite, TrigPolynomial};
use crate::report::{ExperimentReport, Verdict};

/// `e(t_j) = max over samples x, levels j' >= j and y with
/// d(x, y) < phi(t_j') of |u(y, t_j') - f(x)|`.
pub fn tail_errors(space: &Space, u: &Interior, f: &[f64], samples: &[usize], delta: f64) -> Vec<f64> {
    let grid = u.grid();
    let levels = grid.len();
    let per_level: Vec<Vec<f64>> = samples
        .par_iter()
        .map(|&x| {
            let widths: Vec<f64> = (0..levels).map(|j| approach_width(grid.scale(j), delta)).collect();
            let mut worst = vec![0.0f64; levels];
            for y in 0..space.len() {
                let d = space.distance(x, y);
                for (j, w) in worst.iter_mut().enumerate() {
                    if d < widths[j] {
                        *w = w.max((u.get(y, j) - f[x]).abs());
                    }
                }
            }
            worst
        })
        .collect();
    let mut tail = vec![0.0f64; levels];
    let mut running = 0.0f64;
    for j in (0..levels).rev() {
        for row in &per_level {
            running = running.max(row[j]);
        }
        tail[j] = running;
    }
    tail
}

/// Tail errors of the normalized `l = 0` Poisson operator over
/// nontangential and tangential regions for trigonometric polynomials.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ExperimentReport, Error> {
    if cfg.space.kind != ModelKind::Circle {
        return Err(invalid("the convergence suite runs on the circle"));
    }
    let spec = &cfg.convergence;
    if spec.samples == 0 {
        return Err(invalid("need at least one sample point"));
    }
    let tol = &cfg.tolerances;
    let mut report = ExperimentReport::new(Suite::Convergence, cfg);
    for n in resolutions(cfg) {
        let space = build_space(&cfg.space, n)?;
        let delta = resolve_delta(cfg, space.gamma(), true)?;
        let grid = ScaleGrid::for_space(&space, spec.per_octave)?;
        let j0 = grid
            .level_of(spec.t0)
            .ok_or_else(|| invalid(format!("t0 = {} is not a grid scale at resolution {n}", spec.t0)))?;
        let stride = (n / spec.samples).max(1);
        let samples: Vec<usize> = (0..n).step_by(stride).collect();
        let constant = TrigPolynomial {
            label: "constant".into(),
            terms: vec![(0, 1.0, 0.0)],
        };
        for poly in std::iter::once(&constant).chain(&spec.functions) {
            let f: Vec<f64> = (0..n)
                .map(|i| {
                    let p = space.point(i);
                    poly.eval(p[1].atan2(p[0]))
                })
                .collect();
            let u = normalized_power_field(&space, &grid, &f, 0.0, KernelKind::Disk)?;
            let e_nt = tail_errors(&space, &u, &f, &samples, 0.0);
            let e_tan = tail_errors(&space, &u, &f, &samples, delta);
            for j in 0..grid.len() {
                report.record(
                    &poly.label,
                    n,
                    &[
                        ("t0", grid.scale(j)),
                        ("e_nontangential", e_nt[j]),
                        ("e_tangential", e_tan[j]),
                    ],
                );
            }
            let label = &poly.label;
            let rise = e_tan.windows(2).map(|w| w[1] - w[0]).fold(0.0f64, f64::max);
            report.verdict(Verdict::at_most(
                format!("monotone[{label}]@{n}"),
                rise,
                tol.monotone_slack,
            ));
            let excess = e_nt
                .iter()
                .zip(&e_tan)
                .map(|(a, b)| a - b)
                .fold(f64::NEG_INFINITY, f64::max);
            report.verdict(Verdict::at_most(
                format!("nontangential_below_tangential[{label}]@{n}"),
                excess,
                0.0,
            ));
            if poly.label == "constant" {
                report.verdict(Verdict::at_most(format!("constant_error@{n}"), e_tan[0], 1e-12));
            } else {
                report.verdict(Verdict::at_most(
                    format!("tail_error[{label}]@{n}"),
                    e_tan[j0],
                    tol.convergence_eps,
                ));
            }
        }
    }
    Ok(report)
}
