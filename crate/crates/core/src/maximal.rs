//! Ball means, Hardy-Littlewood maximal functions and maximal operators over
//! logarithmic approach regions.
//!
//! Every operator here is a supremum of the form
//!
//! ```text
//! Tu(x) = max { factor_j * u(y, t_src(j)) : d(x, y) < radius_j }
//! ```
//!
//! over a list of scale windows `j`. Sorting the windows by decreasing
//! radius turns the admissible windows for a given `d(x, y)` into a prefix,
//! so one prefix-max table per point answers each `(x, y)` pair with a
//! binary search. The cost is `O(n^2 log J)` regardless of the window count.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::field::InteriorFunction;
use crate::kernels::p0_field;
use crate::scalar::Real;
use crate::space::{Ball, HomogeneousSpace, ScaleGrid};

/// Parameters of an approach region: aperture `a`, logarithmic exponent
/// `delta` and, for the parametric family, the factor `A >= 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproachSpec<T> {
    pub aperture: T,
    pub delta: T,
    pub scale_factor: Option<T>,
}

impl<T: Real> ApproachSpec<T> {
    /// Aperture 1, no parametric factor.
    pub fn tangential(delta: T) -> Self {
        ApproachSpec {
            aperture: T::one(),
            delta,
            scale_factor: None,
        }
    }

    pub fn nontangential() -> Self {
        Self::tangential(T::zero())
    }

    pub fn parametric(factor: T, delta: T) -> Self {
        ApproachSpec {
            aperture: T::one(),
            delta,
            scale_factor: Some(factor),
        }
    }

    pub fn with_aperture(mut self, a: T) -> Self {
        self.aperture = a;
        self
    }

    /// `phi(t) = t (log2(2/t))^delta`.
    pub fn width(&self, t: T) -> T {
        crate::scalar::approach_width(t, self.delta)
    }

    fn validate(&self) -> Result<()> {
        if !(self.aperture > T::zero()) {
            return invalid("aperture must be positive");
        }
        if !(self.delta >= T::zero()) {
            return invalid("delta must be >= 0");
        }
        if let Some(a) = self.scale_factor {
            if !(a >= T::one()) {
                return invalid(format!("scale factor A = {a} must be >= 1"));
            }
        }
        Ok(())
    }
}

/// Cutoff `tau_A = 2^(1 - A^(1/delta))`: the parametric region keeps scales
/// `t < tau_A`, i.e. `A < (log2(2/t))^delta`.
pub fn tau<T: Real>(factor: T, delta: T) -> T {
    if delta == T::zero() {
        return T::zero();
    }
    T::lit(2.0).powf(T::one() - factor.powf(T::one() / delta))
}

#[derive(Clone, Copy, Debug)]
struct Window<T> {
    source: usize,
    radius: T,
    factor: T,
}

/// `max { w.factor * v(y, w.source) : d(x, y) < w.radius }` for every `x`,
/// where `v` is `u` or `|u|`. Returns zeros when there are no windows.
fn window_sup<T: Real>(
    space: &HomogeneousSpace<T>,
    u: &InteriorFunction<T>,
    mut windows: Vec<Window<T>>,
    absolute: bool,
) -> Vec<T> {
    let n = space.len();
    if windows.is_empty() {
        return vec![T::zero(); n];
    }
    windows.sort_by(|a, b| b.radius.partial_cmp(&a.radius).expect("finite radii"));
    let radii: Vec<T> = windows.iter().map(|w| w.radius).collect();
    let e = windows.len();
    let mut prefix = vec![T::neg_infinity(); n * e];
    for (y, slot) in prefix.chunks_exact_mut(e).enumerate() {
        let mut best = T::neg_infinity();
        for (k, w) in windows.iter().enumerate() {
            let raw = u.get(y, w.source);
            let v = w.factor * if absolute { raw.abs() } else { raw };
            best = best.max(v);
            slot[k] = best;
        }
    }
    (0..n)
        .into_par_iter()
        .map_init(
            || vec![T::zero(); n],
            |row, x| {
                space.fill_distances(x, row);
                let mut best = T::neg_infinity();
                for (y, &d) in row.iter().enumerate() {
                    let k = radii.partition_point(|&r| r > d);
                    if k > 0 {
                        best = best.max(prefix[y * e + k - 1]);
                    }
                }
                best
            },
        )
        .collect()
}

fn check_grid_floor<T: Real>(space: &HomogeneousSpace<T>, grid: &ScaleGrid) -> Result<()> {
    match (0..grid.len()).find(|&j| grid.scale::<T>(j) < space.resolution_floor()) {
        Some(j) => invalid(format!("grid level {j} lies below the resolution floor")),
        None => Ok(()),
    }
}

fn check_interior<T: Real>(space: &HomogeneousSpace<T>, u: &InteriorFunction<T>) -> Result<()> {
    if u.len() != space.len() {
        return invalid(format!(
            "interior function has {} points, space has {}",
            u.len(),
            space.len()
        ));
    }
    Ok(())
}

/// Mean of `|f|` over `B(y, t)`.
pub fn ball_mean<T: Real>(space: &HomogeneousSpace<T>, f: &[T], y: usize, t: T) -> Result<T> {
    space.check_function(f)?;
    if y >= space.len() {
        return invalid(format!("point {y} out of range"));
    }
    if t < space.resolution_floor() || !(t > T::zero()) {
        return invalid(format!(
            "radius {t} below the resolution floor {}",
            space.resolution_floor()
        ));
    }
    let mut num = T::zero();
    let mut den = T::zero();
    for z in 0..space.len() {
        if space.distance(y, z) < t {
            let w = space.weights()[z];
            num += f[z].abs() * w;
            den += w;
        }
    }
    Ok(num / den)
}

/// Ball means `u(y, t_j)` of `|f|` at every grid pair.
pub fn ball_means<T: Real>(space: &HomogeneousSpace<T>, grid: &ScaleGrid, f: &[T]) -> Result<InteriorFunction<T>> {
    space.check_function(f)?;
    check_grid_floor(space, grid)?;
    let scales = grid.scales::<T>();
    let levels = scales.len();
    let n = space.len();
    let rows: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map_init(
            || vec![T::zero(); n],
            |row, y| {
                space.fill_distances(y, row);
                let mut num = vec![T::zero(); levels];
                let mut den = vec![T::zero(); levels];
                for (z, &d) in row.iter().enumerate() {
                    // levels 0..k contain z
                    let k = scales.partition_point(|&t| t > d);
                    if k > 0 {
                        let w = space.weights()[z];
                        num[k - 1] += f[z].abs() * w;
                        den[k - 1] += w;
                    }
                }
                for j in (0..levels.saturating_sub(1)).rev() {
                    let (nf, df) = (num[j + 1], den[j + 1]);
                    num[j] += nf;
                    den[j] += df;
                }
                num.iter().zip(&den).map(|(&a, &b)| a / b).collect()
            },
        )
        .collect();
    InteriorFunction::from_rows(*grid, rows)
}

/// `Mf(x)`: the largest mean of `|f|` over grid balls containing `x` and
/// over the whole space.
pub fn hl_maximal<T: Real>(space: &HomogeneousSpace<T>, grid: &ScaleGrid, f: &[T]) -> Result<Vec<T>> {
    let u = ball_means(space, grid, f)?;
    let windows = (0..grid.len())
        .map(|j| Window {
            source: j,
            radius: grid.scale(j),
            factor: T::one(),
        })
        .collect();
    let global = f
        .iter()
        .zip(space.weights())
        .fold(T::zero(), |s, (&v, &w)| s + v.abs() * w)
        / space.total_mass();
    Ok(window_sup(space, &u, windows, false)
        .into_iter()
        .map(|m| m.max(global))
        .collect())
}

/// `M_eps f(x)`: as [`hl_maximal`] but only balls of radius `t < eps`.
pub fn truncated_hl_maximal<T: Real>(space: &HomogeneousSpace<T>, grid: &ScaleGrid, f: &[T], eps: T) -> Result<Vec<T>> {
    if eps < space.resolution_floor() {
        return invalid(format!("eps = {eps} below the resolution floor"));
    }
    if eps > space.diameter() {
        return invalid(format!("eps = {eps} above the diameter"));
    }
    let u = ball_means(space, grid, f)?;
    let windows = (0..grid.len())
        .filter(|&j| grid.scale::<T>(j) < eps)
        .map(|j| Window {
            source: j,
            radius: grid.scale(j),
            factor: T::one(),
        })
        .collect();
    Ok(window_sup(space, &u, windows, false))
}

/// `L_delta u(x) = max { |u(y, t)| : d(x, y) < a t (log2(2/t))^delta }`.
/// With `delta = 0` this is the nontangential maximal function `N u`.
pub fn tangential_maximal<T: Real>(
    space: &HomogeneousSpace<T>,
    u: &InteriorFunction<T>,
    spec: &ApproachSpec<T>,
) -> Result<Vec<T>> {
    spec.validate()?;
    if spec.scale_factor.is_some() {
        return invalid("tangential_maximal takes a spec without a scale factor");
    }
    check_interior(space, u)?;
    let grid = u.grid();
    let windows = (0..grid.len())
        .map(|j| Window {
            source: j,
            radius: spec.aperture * spec.width(grid.scale(j)),
            factor: T::one(),
        })
        .collect();
    Ok(window_sup(space, u, windows, true))
}

/// As [`tangential_maximal`], but only over scales `t <= t_max`.
pub fn tangential_maximal_below<T: Real>(
    space: &HomogeneousSpace<T>,
    u: &InteriorFunction<T>,
    spec: &ApproachSpec<T>,
    t_max: T,
) -> Result<Vec<T>> {
    spec.validate()?;
    check_interior(space, u)?;
    let grid = u.grid();
    let windows = (0..grid.len())
        .filter(|&j| grid.scale::<T>(j) <= t_max)
        .map(|j| Window {
            source: j,
            radius: spec.aperture * spec.width(grid.scale(j)),
            factor: T::one(),
        })
        .collect();
    Ok(window_sup(space, u, windows, true))
}

fn shift_for<T: Real>(grid: &ScaleGrid, factor: T) -> Result<usize> {
    grid.shift_for(factor).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "scale factor {factor} is not 2^(k/{}) for an integer k >= 0",
            grid.per_octave()
        ))
    })
}

/// The parametric operator
/// `L_{A,delta} u(x) = max { u(y, A t) / log2(2/t) : d(x, y) < phi(t), A < (log2(2/t))^delta }`.
///
/// `A t` must land on the grid, so `A` has to be `2^(k/s)`. Returns zeros
/// when no grid scale satisfies the cutoff.
pub fn parametric_maximal<T: Real>(
    space: &HomogeneousSpace<T>,
    u: &InteriorFunction<T>,
    spec: &ApproachSpec<T>,
) -> Result<Vec<T>> {
    spec.validate()?;
    let factor = spec
        .scale_factor
        .ok_or_else(|| Error::InvalidArgument("parametric_maximal needs a scale factor".into()))?;
    check_interior(space, u)?;
    let grid = u.grid();
    let shift = shift_for(grid, factor)?;
    let windows = (shift..grid.len())
        .filter(|&j| grid.log_factor::<T>(j).powf(spec.delta) > factor)
        .map(|j| Window {
            source: j - shift,
            radius: spec.aperture * spec.width(grid.scale(j)),
            factor: T::one() / grid.log_factor::<T>(j),
        })
        .collect();
    Ok(window_sup(space, u, windows, false))
}

/// Whether the parametric region for `A` contains at least one grid scale.
pub fn parametric_domain_nonempty<T: Real>(grid: &ScaleGrid, factor: T, delta: T) -> bool {
    match grid.shift_for(factor) {
        Some(shift) => (shift..grid.len()).any(|j| grid.log_factor::<T>(j).powf(delta) > factor),
        None => false,
    }
}

/// `N_A u(x) = max { u(y, A tau) : d(x, y) < A tau / (4 a_d^2), tau < tau_A }`.
pub fn modified_nontangential<T: Real>(
    space: &HomogeneousSpace<T>,
    u: &InteriorFunction<T>,
    factor: T,
    delta: T,
) -> Result<Vec<T>> {
    if !(factor >= T::one()) {
        return invalid(format!("scale factor A = {factor} must be >= 1"));
    }
    if !(delta >= T::zero()) {
        return invalid("delta must be >= 0");
    }
    check_interior(space, u)?;
    let grid = u.grid();
    let shift = shift_for(grid, factor)?;
    let a_d = space.quasi_constant();
    let shrink = T::lit(4.0) * a_d * a_d;
    let windows = (shift..grid.len())
        .filter(|&j| grid.log_factor::<T>(j).powf(delta) > factor)
        .map(|j| Window {
            source: j - shift,
            radius: factor * grid.scale::<T>(j) / shrink,
            factor: T::one(),
        })
        .collect();
    Ok(window_sup(space, u, windows, false))
}

/// Both sides of the three-term domination
/// `L_delta(P_0 f) <= c (Mf + sum_nu L_{2^nu, delta} u)` at every point.
#[derive(Clone, Debug, Serialize)]
pub struct Domination<T> {
    pub lhs: Vec<T>,
    pub rhs: Vec<T>,
    /// `lhs / rhs`; 0 where both vanish, infinite where only `rhs` does.
    pub ratio: Vec<T>,
    pub nu_max: usize,
}

impl<T: Real> Domination<T> {
    pub fn max_ratio(&self) -> T {
        self.ratio.iter().copied().fold(T::zero(), T::max)
    }
}

/// Smallest `nu` with `2^nu > (log2(2/t_min))^delta`; larger factors have
/// empty parametric regions on the grid.
pub fn default_nu_max<T: Real>(grid: &ScaleGrid, delta: T) -> usize {
    let top = if grid.is_empty() {
        T::one()
    } else {
        grid.log_factor::<T>(grid.len() - 1).powf(delta)
    };
    let mut nu = 0usize;
    while T::lit(2.0).powi(nu as i32) <= top {
        nu += 1;
    }
    nu
}

pub fn pointwise_domination<T: Real>(
    space: &HomogeneousSpace<T>,
    grid: &ScaleGrid,
    f: &[T],
    delta: T,
    nu_max: Option<usize>,
) -> Result<Domination<T>> {
    if grid.per_octave() == 0 {
        return invalid("empty grid");
    }
    let nu_max = nu_max.unwrap_or_else(|| default_nu_max(grid, delta));
    let field = p0_field(space, grid, f)?;
    let lhs = tangential_maximal(space, &field, &ApproachSpec::tangential(delta))?;
    let u = ball_means(space, grid, f)?;
    let mut rhs = hl_maximal(space, grid, f)?;
    for nu in 0..=nu_max {
        let factor = T::lit(2.0).powi(nu as i32);
        if grid.shift_for(factor).is_none_or(|s| s >= grid.len()) {
            break;
        }
        let term = parametric_maximal(space, &u, &ApproachSpec::parametric(factor, delta))?;
        for (r, t) in rhs.iter_mut().zip(term) {
            *r += t;
        }
    }
    let ratio = lhs
        .iter()
        .zip(&rhs)
        .map(|(&l, &r)| {
            if r > T::zero() {
                l / r
            } else if l > T::zero() {
                T::infinity()
            } else {
                T::zero()
            }
        })
        .collect();
    Ok(Domination {
        lhs,
        rhs,
        ratio,
        nu_max,
    })
}

/// Disjoint subfamily selected by [`vitali_select`] and the dilation factor
/// `rho_d` under which it covers the target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverResult<T> {
    pub selected: Vec<Ball<T>>,
    /// Positions of the selected balls in the input sequence.
    pub selected_indices: Vec<usize>,
    pub dilation: T,
}

impl<T: Real> CoverResult<T> {
    /// Pairwise disjointness of the selected balls as point sets.
    pub fn is_pairwise_disjoint(&self, space: &HomogeneousSpace<T>) -> bool {
        let mut owner = vec![usize::MAX; space.len()];
        for (k, b) in self.selected.iter().enumerate() {
            for y in space.ball_members(b) {
                if owner[y] != usize::MAX {
                    return false;
                }
                owner[y] = k;
            }
        }
        true
    }

    /// Target points outside every dilated selected ball.
    pub fn uncovered(&self, space: &HomogeneousSpace<T>, target: &[usize]) -> Vec<usize> {
        target
            .iter()
            .copied()
            .filter(|&z| {
                !self
                    .selected
                    .iter()
                    .any(|b| space.distance(b.center, z) < self.dilation * b.radius)
            })
            .collect()
    }

    /// JSON document `{centers, radii, dilation}` with center coordinates.
    pub fn to_json(&self, space: &HomogeneousSpace<T>) -> Result<String> {
        #[derive(Serialize)]
        struct Doc {
            centers: Vec<Vec<f64>>,
            center_indices: Vec<usize>,
            radii: Vec<f64>,
            dilation: f64,
        }
        let doc = Doc {
            centers: self
                .selected
                .iter()
                .map(|b| space.point(b.center).iter().map(|c| c.as_f64()).collect())
                .collect(),
            center_indices: self.selected.iter().map(|b| b.center).collect(),
            radii: self.selected.iter().map(|b| b.radius.as_f64()).collect(),
            dilation: self.dilation.as_f64(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

/// `rho_d = a_d (2 a_d + 1)`.
pub fn vitali_dilation<T: Real>(a_d: T) -> T {
    a_d * (T::lit(2.0) * a_d + T::one())
}

/// Greedy Vitali selection: visit balls by decreasing radius (ties by input
/// position) and keep a ball iff it shares no point with the kept ones.
pub fn vitali_select<T: Real>(
    space: &HomogeneousSpace<T>,
    balls: &[Ball<T>],
    target: &[usize],
) -> Result<CoverResult<T>> {
    let n = space.len();
    for b in balls {
        if b.center >= n {
            return invalid(format!("ball center {} out of range", b.center));
        }
        if !(b.radius > T::zero() && b.radius.is_finite()) {
            return invalid(format!("ball radius {} must be positive and finite", b.radius));
        }
    }
    if let Some(&z) = target.iter().find(|&&z| z >= n) {
        return invalid(format!("target point {z} out of range"));
    }
    let members: Vec<Vec<usize>> = balls.iter().map(|b| space.ball_members(b)).collect();
    let mut covered = vec![false; n];
    for m in &members {
        for &y in m {
            covered[y] = true;
        }
    }
    let uncovered: Vec<usize> = target.iter().copied().filter(|&z| !covered[z]).collect();
    if !uncovered.is_empty() {
        return Err(Error::Uncovered { uncovered });
    }
    let mut order: Vec<usize> = (0..balls.len()).collect();
    order.sort_by(|&a, &b| balls[b].radius.partial_cmp(&balls[a].radius).expect("finite radii"));
    let mut occupied = vec![false; n];
    let mut selected_indices = Vec::new();
    for k in order {
        if members[k].iter().all(|&y| !occupied[y]) {
            for &y in &members[k] {
                occupied[y] = true;
            }
            selected_indices.push(k);
        }
    }
    Ok(CoverResult {
        selected: selected_indices.iter().map(|&k| balls[k]).collect(),
        selected_indices,
        dilation: vitali_dilation(space.quasi_constant()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::build_circle;
    use approx::assert_relative_eq;

    fn circle(n: usize) -> (HomogeneousSpace<f64>, ScaleGrid) {
        let c = build_circle::<f64>(n).unwrap();
        let g = ScaleGrid::dyadic(&c);
        (c, g)
    }

    fn spike(n: usize, at: usize) -> Vec<f64> {
        let mut f = vec![0.0; n];
        f[at] = 1.0;
        f
    }

    /// Exhaustive sup over every grid ball containing `x`.
    fn brute_hl(space: &HomogeneousSpace<f64>, grid: &ScaleGrid, f: &[f64], x: usize, eps: f64) -> f64 {
        let mut best = 0.0f64;
        for y in 0..space.len() {
            for j in 0..grid.len() {
                let t: f64 = grid.scale(j);
                if t >= eps || space.distance(x, y) >= t {
                    continue;
                }
                let (mut num, mut den) = (0.0, 0.0);
                for z in 0..space.len() {
                    if space.distance(y, z) < t {
                        num += f[z].abs() * space.weights()[z];
                        den += space.weights()[z];
                    }
                }
                best = best.max(num / den);
            }
        }
        best
    }

    #[test]
    fn ball_mean_constant_and_nested() {
        let (c, _) = circle(256);
        let f = vec![-3.0; 256];
        assert_relative_eq!(ball_mean(&c, &f, 5, 0.3).unwrap(), 3.0, max_relative = 1e-14);
        let half = Ball::new(10, 0.2);
        let ind: Vec<f64> = (0..256).map(|z| if c.contains(&half, z) { 1.0 } else { 0.0 }).collect();
        let expected = c.ball_mass(&half) / c.ball_mass(&Ball::new(10, 0.4));
        assert_relative_eq!(ball_mean(&c, &ind, 10, 0.4).unwrap(), expected, max_relative = 1e-14);
        assert!(ball_mean(&c, &f, 0, c.resolution_floor() * 0.5).is_err());
    }

    #[test]
    fn ball_means_match_direct_sums() {
        let (c, g) = circle(128);
        let f: Vec<f64> = (0..128)
            .map(|i| if (20..50).contains(&i) { 1.0 } else { 0.0 })
            .collect();
        let u = ball_means(&c, &g, &f).unwrap();
        for y in [0, 19, 35, 90] {
            for j in 0..g.len() {
                assert_relative_eq!(
                    u.get(y, j),
                    ball_mean(&c, &f, y, g.scale(j)).unwrap(),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn hl_maximal_of_constant_and_spike() {
        let (c, g) = circle(64);
        let m = hl_maximal(&c, &g, &vec![1.0; 64]).unwrap();
        assert!(m.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        let f = spike(64, 7);
        let m = hl_maximal(&c, &g, &f).unwrap();
        let global = 1.0 / 64.0;
        for x in 0..64 {
            let grid_sup = brute_hl(&c, &g, &f, x, f64::INFINITY);
            assert_relative_eq!(m[x], grid_sup.max(global), max_relative = 1e-12);
        }
        // far from the spike only the whole circle sees it
        assert!(m[7] > m[10] && m[10] > m[39]);
        assert_relative_eq!(m[39], global, max_relative = 1e-12);
    }

    #[test]
    fn hl_maximal_dominates_function() {
        let (c, g) = circle(128);
        let f: Vec<f64> = (0..128).map(|i| ((i * 37 % 11) as f64) - 5.0).collect();
        let m = hl_maximal(&c, &g, &f).unwrap();
        // the finest ball at x contains only x
        let fine = ball_means(&c, &g, &f).unwrap();
        for x in 0..128 {
            assert!(m[x] >= fine.get(x, g.len() - 1) - 1e-12);
        }
    }

    #[test]
    fn truncated_versus_full() {
        let (c, g) = circle(64);
        let f = spike(64, 0);
        let full = hl_maximal(&c, &g, &f).unwrap();
        let global = 1.0 / 64.0;
        let same = truncated_hl_maximal(&c, &g, &f, c.diameter()).unwrap();
        for x in 0..64 {
            assert_relative_eq!(full[x], same[x].max(global), max_relative = 1e-12);
        }
        let eps = 0.3;
        let trunc = truncated_hl_maximal(&c, &g, &f, eps).unwrap();
        for x in 0..64 {
            assert!(trunc[x] <= full[x]);
            assert_relative_eq!(trunc[x], brute_hl(&c, &g, &f, x, eps), max_relative = 1e-12);
        }
        assert!(trunc[10] == 0.0 && full[10] >= global);
        assert!(truncated_hl_maximal(&c, &g, &f, c.resolution_floor() / 2.0).is_err());
        let ones = truncated_hl_maximal(&c, &g, &vec![1.0; 64], 0.2).unwrap();
        assert!(ones.iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn nontangential_of_means_equals_hl() {
        let (c, g) = circle(128);
        let f: Vec<f64> = (0..128).map(|i| (i as f64 * 0.37).sin()).collect();
        let u = ball_means(&c, &g, &f).unwrap();
        let n = tangential_maximal(&c, &u, &ApproachSpec::nontangential()).unwrap();
        let m = hl_maximal(&c, &g, &f).unwrap();
        assert_eq!(n, m);
    }

    #[test]
    fn tangential_constant_and_monotone() {
        let (c, g) = circle(128);
        let u = InteriorFunction::constant(g, 128, -2.5).unwrap();
        let l = tangential_maximal(&c, &u, &ApproachSpec::tangential(1.5)).unwrap();
        assert!(l.iter().all(|&v| v == 2.5));
        let f: Vec<f64> = (0..128).map(|i| if i < 10 { 1.0 } else { 0.0 }).collect();
        let u = ball_means(&c, &g, &f).unwrap();
        let mut prev = tangential_maximal(&c, &u, &ApproachSpec::tangential(0.0)).unwrap();
        for delta in [0.5, 1.0, 2.0] {
            let cur = tangential_maximal(&c, &u, &ApproachSpec::tangential(delta)).unwrap();
            assert!(prev.iter().zip(&cur).all(|(a, b)| a <= b));
            prev = cur;
        }
        assert!(tangential_maximal(&c, &u, &ApproachSpec::parametric(1.0, 1.0)).is_err());
    }

    #[test]
    fn parametric_empty_and_constant() {
        let (c, g) = circle(256);
        let u = InteriorFunction::constant(g, 256, 1.0).unwrap();
        let top: f64 = g.log_factor(g.len() - 1);
        let big = 2f64.powi(top.powi(2).log2().ceil() as i32 + 1);
        let v = parametric_maximal(&c, &u, &ApproachSpec::parametric(big, 2.0)).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
        // A = 1, delta = 2: the largest admissible scale is 1/2 (log factor 2)
        let v = parametric_maximal(&c, &u, &ApproachSpec::parametric(1.0, 2.0)).unwrap();
        assert!(v.iter().all(|&x| (x - 0.5).abs() < 1e-15));
        assert!(parametric_maximal(&c, &u, &ApproachSpec::parametric(0.5, 2.0)).is_err());
        assert!(parametric_maximal(&c, &u, &ApproachSpec::parametric(3.0, 2.0)).is_err());
    }

    #[test]
    fn tau_matches_log_condition() {
        for &(a, d) in &[(1.0f64, 2.0f64), (4.0, 2.0), (8.0, 1.0)] {
            let t = tau(a, d);
            assert_relative_eq!(crate::scalar::log_factor(t).powf(d), a, max_relative = 1e-12);
        }
    }

    #[test]
    fn modified_nontangential_bounds() {
        let (c, g) = circle(128);
        let u = InteriorFunction::constant(g, 128, 3.0).unwrap();
        let v = modified_nontangential(&c, &u, 1.0, 2.0).unwrap();
        assert!(v.iter().all(|&x| x == 3.0));
        let f: Vec<f64> = (0..128).map(|i| ((i * 13 % 7) as f64).sqrt()).collect();
        let u = ball_means(&c, &g, &f).unwrap();
        let n = tangential_maximal(&c, &u, &ApproachSpec::nontangential()).unwrap();
        for a in [1.0, 2.0, 4.0] {
            let na = modified_nontangential(&c, &u, a, 2.0).unwrap();
            assert!(na.iter().zip(&n).all(|(x, y)| x <= y));
        }
        // A = 1, a_d = 1: aperture 1/4 over scales t < tau_1 = 1
        let na = modified_nontangential(&c, &u, 1.0, 2.0).unwrap();
        for x in 0..128 {
            let mut best = f64::NEG_INFINITY;
            for y in 0..128 {
                for j in 1..g.len() {
                    let t: f64 = g.scale(j);
                    if c.distance(x, y) < t / 4.0 {
                        best = best.max(u.get(y, j));
                    }
                }
            }
            assert_eq!(na[x], best);
        }
    }

    #[test]
    fn domination_of_zero_and_constant() {
        let (c, g) = circle(128);
        let d = pointwise_domination(&c, &g, &vec![0.0; 128], 2.0, None).unwrap();
        assert!(d.lhs.iter().all(|&v| v == 0.0));
        assert!(d.rhs.iter().all(|&v| v == 0.0));
        assert_eq!(d.max_ratio(), 0.0);
        let d = pointwise_domination(&c, &g, &vec![1.0; 128], 2.0, None).unwrap();
        assert!(d.max_ratio().is_finite() && d.max_ratio() > 0.0);
    }

    #[test]
    fn vitali_single_ball() {
        let (c, _) = circle(64);
        let ball = Ball::new(3, 0.5);
        let target = c.ball_members(&ball);
        let r = vitali_select(&c, &[ball], &target).unwrap();
        assert_eq!(r.selected, vec![ball]);
        assert_eq!(r.dilation, 3.0);
        assert!(r.uncovered(&c, &target).is_empty());
    }

    #[test]
    fn vitali_three_arcs() {
        let (c, _) = circle(360);
        let balls = [Ball::new(0, 0.5), Ball::new(45, 0.3), Ball::new(75, 0.25)];
        let target: Vec<usize> = (0..=80).collect();
        let r = vitali_select(&c, &balls, &target).unwrap();
        assert_eq!(r.selected_indices, vec![0, 2]);
        assert!(r.is_pairwise_disjoint(&c));
        assert!(r.uncovered(&c, &target).is_empty());
        let json: serde_json::Value = serde_json::from_str(&r.to_json(&c).unwrap()).unwrap();
        assert_eq!(json["dilation"], 3.0);
    }

    #[test]
    fn vitali_rejects_uncovered_target() {
        let (c, _) = circle(64);
        match vitali_select(&c, &[Ball::new(0, 0.2)], &[0, 32]) {
            Err(Error::Uncovered { uncovered }) => assert_eq!(uncovered, vec![32]),
            other => panic!("expected uncovered error, got {other:?}"),
        }
    }
}
