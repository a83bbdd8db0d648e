use tangential::maximal::pointwise_domination;
use tangential::measures::lp_norm;
use tangential::{Error, ScaleGrid};

use super::{build_space, check_p, drift, max_of, resolutions, resolve_delta, tangential_of_p0};
use crate::config::{ExperimentConfig, Suite};
use crate::family::{generate, MemberKind};
use crate::report::{ExperimentReport, Verdict};

/// Strong-type ratios `||L_delta(P_0 f)||_p / ||f||_p` with
/// `delta = p / gamma`, and the pointwise three-term domination.
pub fn run_strong_type(cfg: &ExperimentConfig) -> Result<ExperimentReport, Error> {
    check_p(cfg.p, true)?;
    let mut report = ExperimentReport::new(Suite::StrongType, cfg);
    let tol = &cfg.tolerances;
    let mut max_ratio = Vec::new();
    let mut max_dom = Vec::new();
    for n in resolutions(cfg) {
        let space = build_space(&cfg.space, n)?;
        let delta = resolve_delta(cfg, space.gamma(), true)?;
        let grid = ScaleGrid::for_space(&space, cfg.per_octave)?;
        let family = generate(&space, &cfg.family, cfg.p, cfg.seed)?;
        let mut ratios = Vec::new();
        let mut doms = Vec::new();
        for f in &family {
            let f_norm = lp_norm(&space, &f.values, cfg.p)?;
            if f_norm == 0.0 {
                report.warn(format!("{} vanishes at resolution {n}; skipped", f.label));
                continue;
            }
            let g = tangential_of_p0(&space, &grid, &f.values, delta)?;
            let lhs = lp_norm(&space, &g, cfg.p)?;
            let dom = pointwise_domination(&space, &grid, &f.values, delta, None)?.max_ratio();
            let ratio = lhs / f_norm;
            report.record(
                &f.label,
                n,
                &[
                    ("f_norm", f_norm),
                    ("lhs_norm", lhs),
                    ("ratio", ratio),
                    ("domination", dom),
                ],
            );
            ratios.push((f.kind, ratio));
            doms.push(dom);
        }
        let top = max_of(ratios.iter().map(|r| r.1));
        let top_dom = max_of(doms.iter().copied());
        report.verdict(Verdict::at_most(format!("max_ratio_finite@{n}"), top, f64::MAX));
        report.verdict(Verdict::at_most(format!("domination_finite@{n}"), top_dom, f64::MAX));
        let caps = max_of(ratios.iter().filter(|r| r.0 == MemberKind::Cap).map(|r| r.1));
        let spikes = max_of(ratios.iter().filter(|r| r.0 == MemberKind::Spike).map(|r| r.1));
        if caps.is_finite() && spikes.is_finite() {
            report.verdict(Verdict::at_most(
                format!("spike_over_cap@{n}"),
                spikes / caps,
                tol.spike_envelope,
            ));
        }
        max_ratio.push(top);
        max_dom.push(top_dom);
    }
    if let ([a, b], [da, db]) = (&max_ratio[..], &max_dom[..]) {
        report.verdict(Verdict::at_most("max_ratio_drift", drift(*a, *b), tol.stability));
        report.verdict(Verdict::at_most(
            "domination_drift",
            drift(*da, *db),
            tol.domination_drift,
        ));
    } else {
        report.warn("refinement disabled; stability not assessed");
    }
    Ok(report)
}
