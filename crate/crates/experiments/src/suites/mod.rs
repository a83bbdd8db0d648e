//! Verification suites. Each suite runs at the configured resolution and,
//! with `refine`, again at twice the resolution.

mod convergence;
mod decay;
mod local;
mod space;
mod strong;
mod weak;
mod weighted;

use tangential::kernels::p0_field;
use tangential::maximal::tangential_maximal;
use tangential::space::{build_circle, build_complex_sphere, build_real_sphere};
use tangential::{Approach, Error, ScaleGrid, Space};

use crate::config::{ExperimentConfig, ModelKind, SpaceConfig, Suite};
use crate::report::ExperimentReport;

pub use convergence::run_convergence;
pub use decay::{fit_slope, run_decay};
pub use local::run_local;
pub use space::run_verify_space;
pub use strong::run_strong_type;
pub use weak::run_weak_type;
pub use weighted::run_weighted;

pub fn run(suite: Suite, cfg: &ExperimentConfig) -> Result<ExperimentReport, Error> {
    match suite {
        Suite::VerifySpace => run_verify_space(cfg),
        Suite::StrongType => run_strong_type(cfg),
        Suite::Decay => run_decay(cfg),
        Suite::WeakType => run_weak_type(cfg),
        Suite::Convergence => run_convergence(cfg),
        Suite::Weighted => run_weighted(cfg),
        Suite::Local => run_local(cfg),
    }
}

pub fn build_space(cfg: &SpaceConfig, resolution: usize) -> Result<Space, Error> {
    match cfg.kind {
        ModelKind::Circle => build_circle(resolution),
        ModelKind::RealSphere => build_real_sphere(cfg.dim, resolution),
        ModelKind::ComplexSphere => build_complex_sphere(cfg.dim, resolution),
    }
}

/// The configured resolution, followed by its double when refining.
pub(crate) fn resolutions(cfg: &ExperimentConfig) -> Vec<usize> {
    let n = cfg.space.resolution;
    if cfg.refine {
        vec![n, 2 * n]
    } else {
        vec![n]
    }
}

/// `|fine - coarse| / |coarse|`; zero when both vanish.
pub(crate) fn drift(coarse: f64, fine: f64) -> f64 {
    if coarse == fine {
        0.0
    } else {
        (fine - coarse).abs() / coarse.abs()
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn check_p(p: f64, strict: bool) -> Result<(), Error> {
    let ok = if strict { p > 1.0 } else { p >= 1.0 };
    if ok && p.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!(
            "p = {p} must be {} 1",
            if strict { ">" } else { ">=" }
        )))
    }
}

/// `delta`, defaulting to `p / gamma`; with `exact`, any other value is
/// rejected.
pub(crate) fn resolve_delta(cfg: &ExperimentConfig, gamma: f64, exact: bool) -> Result<f64, Error> {
    let natural = cfg.p / gamma;
    match cfg.delta {
        None => Ok(natural),
        Some(d) if exact && (d - natural).abs() > 1e-12 * natural => Err(invalid(format!(
            "this suite requires delta = p/gamma = {natural}, got {d}"
        ))),
        Some(d) if d >= 0.0 => Ok(d),
        Some(d) => Err(invalid(format!("delta = {d} must be >= 0"))),
    }
}

/// `L_delta(P_0 f)` on the space's grid.
pub(crate) fn tangential_of_p0(space: &Space, grid: &ScaleGrid, f: &[f64], delta: f64) -> Result<Vec<f64>, Error> {
    let u = p0_field(space, grid, f)?;
    tangential_maximal(space, &u, &Approach::tangential(delta))
}

/// `L^p` norm over a subset given as a mask.
pub(crate) fn masked_lp(space: &Space, f: &[f64], mask: &[bool], p: f64) -> f64 {
    f.iter()
        .zip(space.weights())
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|((v, w), _)| v.abs().powf(p) * w)
        .sum::<f64>()
        .powf(1.0 / p)
}

pub(crate) fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}
