use tangential::maximal::truncated_hl_maximal;
use tangential::measures::lp_norm;
use tangential::{Error, ScaleGrid, Space};

use super::{build_space, check_p, drift, invalid, masked_lp, max_of, resolutions, resolve_delta, tangential_of_p0};
use crate::config::{ExperimentConfig, LocalSpec, Suite};
use crate::family::distances_to;
use crate::report::{ExperimentReport, Verdict};

struct Region {
    g: Vec<bool>,
    k: Vec<bool>,
    gap: f64,
}

fn region(space: &Space, center: &[f64], g_radius: f64, k_radius: f64) -> Result<Region, Error> {
    if !(0.0 < k_radius && k_radius < g_radius) {
        return Err(invalid(format!(
            "need 0 < k_radius < g_radius, got {k_radius} and {g_radius}"
        )));
    }
    let d = distances_to(space, center);
    let g: Vec<bool> = d.iter().map(|&v| v < g_radius).collect();
    let k: Vec<bool> = d.iter().map(|&v| v <= k_radius).collect();
    if !k.iter().any(|&b| b) {
        return Err(invalid("K contains no grid point"));
    }
    let mut gap = f64::INFINITY;
    for x in (0..space.len()).filter(|&x| k[x]) {
        for z in (0..space.len()).filter(|&z| !g[z]) {
            gap = gap.min(space.distance(x, z));
        }
    }
    if !(gap > 0.0) {
        return Err(invalid("K is not compactly inside G"));
    }
    Ok(Region { g, k, gap })
}

fn center(space: &Space, spec: &LocalSpec) -> Result<Vec<f64>, Error> {
    let c = spec.center.clone().unwrap_or_else(|| {
        let mut e = vec![0.0; space.dim()];
        e[0] = 1.0;
        e
    });
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if c.len() != space.dim() || (norm - 1.0).abs() > 1e-9 {
        return Err(invalid(format!(
            "center must be a unit vector of length {}",
            space.dim()
        )));
    }
    Ok(c)
}

/// Test functions: a power spike outside `G` that is integrable but not
/// `p`-integrable in the limit, the constant, and a cap on `K` plus the spike.
fn local_family(space: &Space, region: &Region, c: &[f64], exponent: f64) -> Vec<(&'static str, Vec<f64>)> {
    let anti: Vec<f64> = c.iter().map(|x| -x).collect();
    let floor = space.resolution_floor() / 2.0;
    let e = -space.gamma() * exponent;
    let spike: Vec<f64> = distances_to(space, &anti)
        .into_iter()
        .zip(&region.g)
        .map(|(d, &in_g)| if in_g { 0.0 } else { d.max(floor).powf(e) })
        .collect();
    let cap_and_spike = spike
        .iter()
        .zip(&region.k)
        .map(|(s, &in_k)| s + if in_k { 1.0 } else { 0.0 })
        .collect();
    vec![
        ("outside_spike", spike),
        ("constant", vec![1.0; space.len()]),
        ("cap_and_spike", cap_and_spike),
    ]
}

fn local_constants(
    space: &Space,
    grid: &ScaleGrid,
    region: &Region,
    fam: &[(&'static str, Vec<f64>)],
    p: f64,
    delta: f64,
) -> Result<Vec<[f64; 4]>, Error> {
    let all = vec![true; space.len()];
    fam.iter()
        .map(|(_, f)| {
            let g = tangential_of_p0(space, grid, f, delta)?;
            let lhs = masked_lp(space, &g, &region.k, p);
            let l1 = masked_lp(space, f, &all, 1.0);
            let lp_g = masked_lp(space, f, &region.g, p);
            Ok([lhs / (l1 + lp_g), l1, lp_g, lp_norm(space, f, p)?])
        })
        .collect()
}

/// Local bound `||L_delta(P_0 f)||_{L^p(K)} <= C (||f||_1 + ||f||_{L^p(G)})`.
pub fn run_local(cfg: &ExperimentConfig) -> Result<ExperimentReport, Error> {
    check_p(cfg.p, true)?;
    let spec = &cfg.local;
    if !(spec.spike_exponent > 1.0 / cfg.p && spec.spike_exponent < 1.0) {
        return Err(invalid(format!(
            "spike exponent must lie in (1/p, 1), got {}",
            spec.spike_exponent
        )));
    }
    let mut report = ExperimentReport::new(Suite::Local, cfg);
    let mut maxima = Vec::new();
    for (level, n) in resolutions(cfg).into_iter().enumerate() {
        let space = build_space(&cfg.space, n)?;
        let delta = resolve_delta(cfg, space.gamma(), true)?;
        let grid = ScaleGrid::for_space(&space, cfg.per_octave)?;
        let c = center(&space, spec)?;
        let region = region(&space, &c, spec.g_radius, spec.k_radius)?;
        let a_d = space.quasi_constant();
        let eps = (region.gap / (4.0 * a_d * a_d)).min(1.0);
        let fam = local_family(&space, &region, &c, spec.spike_exponent);
        let consts = local_constants(&space, &grid, &region, &fam, cfg.p, delta)?;
        for ((label, f), [local, l1, lp_g, lp_x]) in fam.iter().zip(&consts) {
            let mut values = vec![
                ("local", *local),
                ("l1", *l1),
                ("lp_g", *lp_g),
                ("lp_x", *lp_x),
                ("gap", region.gap),
                ("eps", eps),
            ];
            if eps >= space.resolution_floor() {
                let m = truncated_hl_maximal(&space, &grid, f, eps)?;
                values.push(("truncated_hl", masked_lp(&space, &m, &region.k, cfg.p)));
            }
            report.record(*label, n, &values);
        }
        if eps < space.resolution_floor() {
            report.warn(format!(
                "eps = {eps} is below the resolution floor at {n}; truncated maximal function skipped"
            ));
        }
        let top = max_of(consts.iter().map(|c| c[0]));
        report.verdict(Verdict::at_most(format!("local_constant_finite@{n}"), top, f64::MAX));
        if level == 0 {
            // K grown halfway to the boundary of G: the gap roughly halves
            let k2 = (spec.k_radius + spec.g_radius) / 2.0;
            let narrow = region_or_warn(&mut report, &space, &c, spec.g_radius, k2);
            if let Some(narrow) = narrow {
                let fam2 = local_family(&space, &narrow, &c, spec.spike_exponent);
                let top2 = max_of(
                    local_constants(&space, &grid, &narrow, &fam2, cfg.p, delta)?
                        .iter()
                        .map(|c| c[0]),
                );
                report.record(
                    "gap_sweep",
                    n,
                    &[("gap", narrow.gap), ("local", top2), ("factor", top2 / top)],
                );
            }
        }
        maxima.push(top);
    }
    if let [a, b] = maxima[..] {
        report.verdict(Verdict::at_most(
            "local_constant_drift",
            drift(a, b),
            cfg.tolerances.local_drift,
        ));
    } else {
        report.warn("refinement disabled; stability not assessed");
    }
    Ok(report)
}

fn region_or_warn(report: &mut ExperimentReport, space: &Space, c: &[f64], g: f64, k: f64) -> Option<Region> {
    match region(space, c, g, k) {
        Ok(r) => Some(r),
        Err(e) => {
            report.warn(format!("gap sweep skipped: {e}"));
            None
        }
    }
}
