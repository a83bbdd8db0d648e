//! `L^p` norms, distribution functions, layer-cake norms for outer measures
//! and a logarithmic Frostman content.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::{log_factor, Power, Real};
use crate::space::{HomogeneousSpace, ScaleGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Weights,
    LogContent,
}

/// A monotone, subadditive set function on the points of a space.
pub trait OuterMeasure<T: Real>: Sync {
    /// Number of points of the underlying space.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn kind(&self) -> MeasureKind;

    /// Measure of the set of listed points. Indices must be distinct.
    fn measure_indices(&self, set: &[usize]) -> T;

    /// Measure of `{x : set[x]}`.
    fn measure(&self, set: &[bool]) -> T {
        let idx: Vec<usize> = set.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
        self.measure_indices(&idx)
    }
}

/// `nu(E) = sum of w(x) over x in E`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMeasure<T> {
    weights: Vec<T>,
}

impl<T: Real> WeightMeasure<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= T::zero())) {
            return invalid("weights must be finite and nonnegative");
        }
        Ok(WeightMeasure { weights })
    }

    /// The reference measure `mu` of the space.
    pub fn from_space(space: &HomogeneousSpace<T>) -> Self {
        WeightMeasure {
            weights: space.weights().to_vec(),
        }
    }

    /// Unit mass at point `at`.
    pub fn point_mass(len: usize, at: usize) -> Result<Self> {
        if at >= len {
            return invalid(format!("point {at} out of range"));
        }
        let mut weights = vec![T::zero(); len];
        weights[at] = T::one();
        Ok(WeightMeasure { weights })
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

impl<T: Real> OuterMeasure<T> for WeightMeasure<T> {
    fn len(&self) -> usize {
        self.weights.len()
    }

    fn kind(&self) -> MeasureKind {
        MeasureKind::Weights
    }

    fn measure_indices(&self, set: &[usize]) -> T {
        set.iter().fold(T::zero(), |acc, &i| acc + self.weights[i])
    }

    fn measure(&self, set: &[bool]) -> T {
        set.iter()
            .zip(&self.weights)
            .filter(|(&b, _)| b)
            .fold(T::zero(), |acc, (_, &w)| acc + w)
    }
}

fn check_p<T: Real>(p: T) -> Result<()> {
    if !(p >= T::one() && p.is_finite()) {
        return invalid(format!("p = {p} must be a finite number >= 1"));
    }
    Ok(())
}

/// `(sum |f|^p w)^(1/p)`.
pub fn lp_norm<T: Real>(space: &HomogeneousSpace<T>, f: &[T], p: T) -> Result<T> {
    check_p(p)?;
    space.check_function(f)?;
    let pw = Power::new(p);
    let s = f
        .iter()
        .zip(space.weights())
        .fold(T::zero(), |acc, (&v, &w)| acc + pw.apply(v.abs()) * w);
    Ok(s.powf(p.recip()))
}

fn check_len<T: Real, M: OuterMeasure<T> + ?Sized>(f: &[T], nu: &M) -> Result<()> {
    if f.len() != nu.len() {
        return invalid(format!(
            "function has {} values, measure has {} points",
            f.len(),
            nu.len()
        ));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return invalid("function values must be finite");
    }
    Ok(())
}

/// `nu{x : |f(x)| > lambda}`.
pub fn distribution_function<T: Real, M: OuterMeasure<T> + ?Sized>(f: &[T], lambda: T, nu: &M) -> Result<T> {
    check_len(f, nu)?;
    if !(lambda >= T::zero()) {
        return invalid(format!("lambda = {lambda} must be >= 0"));
    }
    let set: Vec<usize> = (0..f.len()).filter(|&i| f[i].abs() > lambda).collect();
    Ok(nu.measure_indices(&set))
}

/// Default number of nodes of the geometric lambda grid.
pub const DEFAULT_LAMBDA_GRID: usize = 256;

/// Geometric lambda grid over `[min+|f| / 4, 4 max|f|]` merged with the
/// distinct values of `|f|`. Empty for `f = 0`.
pub fn lambda_grid<T: Real>(f: &[T], grid_size: usize) -> Vec<T> {
    let mut vals: Vec<T> = f.iter().map(|v| v.abs()).filter(|&v| v > T::zero()).collect();
    if vals.is_empty() {
        return Vec::new();
    }
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let lo = vals[0] / T::lit(4.0);
    let hi = vals[vals.len() - 1] * T::lit(4.0);
    let steps = T::from_usize_lossy(grid_size.max(2) - 1);
    let ratio = (hi / lo).ln() / steps;
    let mut grid: Vec<T> = (0..grid_size.max(2))
        .map(|k| lo * (ratio * T::from_usize_lossy(k)).exp())
        .collect();
    let last = grid.len() - 1;
    grid[last] = hi;
    grid.extend(vals);
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    grid.dedup();
    grid
}

/// `(p int_0^inf lambda^(p-1) nu{|f| > lambda} d lambda)^(1/p)`.
///
/// The lambda grid contains every value of `|f|`, so the distribution
/// function is constant on each grid interval and the quadrature is exact;
/// consecutive intervals with equal distribution values are merged before
/// summing.
pub fn layer_cake_norm<T: Real, M: OuterMeasure<T> + ?Sized>(f: &[T], p: T, nu: &M, grid_size: usize) -> Result<T> {
    check_p(p)?;
    check_len(f, nu)?;
    if grid_size < 64 {
        return invalid(format!("lambda grid size {grid_size} must be >= 64"));
    }
    let grid = lambda_grid(f, grid_size);
    if grid.is_empty() {
        return Ok(T::zero());
    }
    let pw = Power::new(p);
    let mut total = T::zero();
    // below the grid the level set is the support
    let mut run_start = T::zero();
    let mut run_value = distribution_function(f, T::zero(), nu)?;
    for w in grid.windows(2) {
        let mid = (w[0] + w[1]) / T::lit(2.0);
        let v = distribution_function(f, mid, nu)?;
        if v != run_value {
            total += run_value * (pw.apply(w[0]) - pw.apply(run_start));
            run_start = w[0];
            run_value = v;
        }
    }
    let end = grid[grid.len() - 1];
    total += run_value * (pw.apply(end) - pw.apply(run_start));
    Ok(total.powf(p.recip()))
}

/// CSV table `lambda,nu` of the distribution function at the given levels.
pub fn write_distribution_csv<T: Real, M: OuterMeasure<T> + ?Sized, W: Write>(
    f: &[T],
    nu: &M,
    lambdas: &[T],
    mut out: W,
) -> Result<()> {
    writeln!(out, "lambda,nu")?;
    for &l in lambdas {
        writeln!(out, "{},{}", l, distribution_function(f, l, nu)?)?;
    }
    Ok(())
}

/// `t^gamma (log2(2/t))^beta`.
pub fn frostman_gauge<T: Real>(t: T, gamma: T, beta: T) -> T {
    t.powf(gamma) * log_factor(t).powf(beta)
}

/// Logarithmic content: the cheapest cover of a set by the cells of a
/// hierarchy of nested nets, a level-`j` cell costing
/// `kappa * t_j^gamma (log2(2/t_j))^beta` and a single point costing the same
/// gauge at the resolution floor.
///
/// Nets are greedy `t_j`-separated sets on the dyadic grid, each containing
/// the coarser ones; every net point hangs under its nearest coarser net
/// point. Cells are therefore nested and the minimal cover is found exactly
/// by a bottom-up pass, which makes the content monotone and subadditive.
/// `kappa <= 1` is the largest factor for which every grid ball satisfies
/// `nu(B(x, t)) <= t^gamma (log2(2/t))^beta`.
#[derive(Clone, Debug)]
pub struct LogContent<T> {
    gamma: T,
    beta: T,
    grid: ScaleGrid,
    kappa: T,
    /// Gauge per level; the last entry is the point level.
    costs: Vec<T>,
    /// `parents[j][node]` is the level `j - 1` parent; `parents[0]` is empty.
    parents: Vec<Vec<usize>>,
    /// Finest net node holding each point.
    leaf_parent: Vec<usize>,
}

impl<T: Real> LogContent<T> {
    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn grid(&self) -> &ScaleGrid {
        &self.grid
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    fn cover_cost(&self, set: &[usize]) -> T {
        let leaf = self.costs[self.costs.len() - 1];
        let mut cur: Vec<(usize, T)> = set.iter().map(|&x| (self.leaf_parent[x], leaf)).collect();
        for level in (0..self.parents.len()).rev() {
            cur.sort_unstable_by_key(|e| e.0);
            let mut merged: Vec<(usize, T)> = Vec::with_capacity(cur.len());
            for (node, c) in cur {
                match merged.last_mut() {
                    Some(last) if last.0 == node => last.1 += c,
                    _ => merged.push((node, c)),
                }
            }
            let g = self.costs[level];
            for e in merged.iter_mut() {
                e.1 = e.1.min(g);
                if level > 0 {
                    e.0 = self.parents[level][e.0];
                }
            }
            cur = merged;
        }
        cur.iter().fold(T::zero(), |acc, e| acc + e.1)
    }
}

impl<T: Real> OuterMeasure<T> for LogContent<T> {
    fn len(&self) -> usize {
        self.leaf_parent.len()
    }

    fn kind(&self) -> MeasureKind {
        MeasureKind::LogContent
    }

    fn measure_indices(&self, set: &[usize]) -> T {
        self.kappa * self.cover_cost(set)
    }
}

fn nearest<T: Real>(space: &HomogeneousSpace<T>, x: usize, net: &[usize]) -> usize {
    let mut best = (T::infinity(), 0);
    for (k, &c) in net.iter().enumerate() {
        let d = space.distance(c, x);
        if d < best.0 {
            best = (d, k);
        }
    }
    best.1
}

/// Largest `nu(B(x, t_j)) / (t_j^gamma (log2(2/t_j))^beta)` over all grid
/// balls, for a set function given on index lists.
fn max_ball_ratio<T: Real>(
    space: &HomogeneousSpace<T>,
    grid: &ScaleGrid,
    gamma: T,
    beta: T,
    eval: impl Fn(&[usize]) -> T + Sync,
) -> T {
    let scales = grid.scales::<T>();
    (0..space.len())
        .into_par_iter()
        .map_init(
            || vec![T::zero(); space.len()],
            |row, x| {
                space.fill_distances(x, row);
                let mut order: Vec<usize> = (0..row.len()).collect();
                order.sort_by(|&a, &b| row[a].partial_cmp(&row[b]).expect("finite distances"));
                let mut worst = T::zero();
                for &t in &scales {
                    let k = order.partition_point(|&y| row[y] < t);
                    let r = eval(&order[..k]) / frostman_gauge(t, gamma, beta);
                    worst = worst.max(r);
                }
                worst
            },
        )
        .reduce(T::zero, T::max)
}

/// Builds the logarithmic content of exponent `beta` on the space's dyadic
/// grid.
pub fn build_log_content<T: Real>(space: &HomogeneousSpace<T>, beta: T) -> Result<LogContent<T>> {
    if !(beta >= T::zero() && beta.is_finite()) {
        return invalid(format!("beta = {beta} must be finite and >= 0"));
    }
    let grid = ScaleGrid::dyadic(space);
    if grid.is_empty() {
        return invalid("the space has no dyadic scale above its resolution floor");
    }
    let gamma = space.gamma();
    let n = space.len();
    let mut nets: Vec<Vec<usize>> = Vec::with_capacity(grid.len());
    let mut in_net = vec![false; n];
    for j in 0..grid.len() {
        let t: T = grid.scale(j);
        let mut net = nets.last().cloned().unwrap_or_default();
        for x in 0..n {
            if !in_net[x] && net.iter().all(|&c| space.distance(c, x) >= t) {
                in_net[x] = true;
                net.push(x);
            }
        }
        nets.push(net);
    }
    let mut parents = vec![Vec::new()];
    for j in 1..nets.len() {
        let coarse = &nets[j - 1];
        parents.push(nets[j].par_iter().map(|&x| nearest(space, x, coarse)).collect());
    }
    let finest = &nets[nets.len() - 1];
    let leaf_parent: Vec<usize> = (0..n).into_par_iter().map(|x| nearest(space, x, finest)).collect();
    let mut costs: Vec<T> = (0..grid.len())
        .map(|j| frostman_gauge(grid.scale(j), gamma, beta))
        .collect();
    costs.push(frostman_gauge(space.resolution_floor().min(T::one()), gamma, beta));
    let mut content = LogContent {
        gamma,
        beta,
        grid,
        kappa: T::one(),
        costs,
        parents,
        leaf_parent,
    };
    let worst = max_ball_ratio(space, &grid, gamma, beta, |set| content.cover_cost(set));
    if worst > T::zero() {
        let margin = T::one() - T::lit(4.0) * T::epsilon();
        content.kappa = (margin / worst).min(T::one());
    }
    Ok(content)
}

/// Smallest `c` with `nu(B(x, t)) <= c t^gamma (log2(2/t))^beta` over all
/// balls with dyadic radii in `[h, 1]`.
pub fn frostman_verify<T: Real, M: OuterMeasure<T> + ?Sized>(
    space: &HomogeneousSpace<T>,
    nu: &M,
    gamma: T,
    beta: T,
) -> Result<T> {
    if nu.len() != space.len() {
        return invalid(format!("measure has {} points, space has {}", nu.len(), space.len()));
    }
    let grid = ScaleGrid::dyadic(space);
    Ok(max_ball_ratio(space, &grid, gamma, beta, |set| nu.measure_indices(set)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::build_circle;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn lp_norm_examples() {
        let c = build_circle::<f64>(256).unwrap();
        assert_relative_eq!(
            lp_norm(&c, &vec![1.0; 256], 3.0).unwrap(),
            (2.0 * PI).powf(1.0 / 3.0),
            max_relative = 1e-13
        );
        let half: Vec<f64> = (0..256).map(|i| if i < 128 { 1.0 } else { 0.0 }).collect();
        assert_relative_eq!(lp_norm(&c, &half, 2.0).unwrap(), PI.sqrt(), max_relative = 1e-13);
        assert!(lp_norm(&c, &half, 0.5).is_err());
    }

    #[test]
    fn distribution_examples() {
        let c = build_circle::<f64>(64).unwrap();
        let mu = WeightMeasure::from_space(&c);
        let one = vec![1.0; 64];
        assert_eq!(distribution_function(&one, 2.0, &mu).unwrap(), 0.0);
        assert_relative_eq!(
            distribution_function(&one, 0.5, &mu).unwrap(),
            2.0 * PI,
            max_relative = 1e-13
        );
        let step: Vec<f64> = (0..64).map(|i| (i / 16) as f64).collect();
        let w = 2.0 * PI / 64.0;
        assert_relative_eq!(
            distribution_function(&step, 1.5, &mu).unwrap(),
            32.0 * w,
            max_relative = 1e-13
        );
        assert!(distribution_function(&step, -1.0, &mu).is_err());
    }

    #[test]
    fn layer_cake_matches_lp() {
        let c = build_circle::<f64>(128).unwrap();
        let mu = WeightMeasure::from_space(&c);
        let f: Vec<f64> = (0..128).map(|i| (i as f64 * 0.71).sin() * 3.0).collect();
        for p in [1.0, 1.5, 2.0, 4.0] {
            let a = layer_cake_norm(&f, p, &mu, 256).unwrap();
            let b = lp_norm(&c, &f, p).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-10);
        }
        assert_eq!(layer_cake_norm(&vec![0.0; 128], 2.0, &mu, 64).unwrap(), 0.0);
        assert!(layer_cake_norm(&f, 2.0, &mu, 63).is_err());
    }

    #[test]
    fn point_mass_fails_frostman() {
        let c = build_circle::<f64>(256).unwrap();
        let pm = WeightMeasure::point_mass(256, 3).unwrap();
        let ratio = frostman_verify(&c, &pm, 1.0, 0.0).unwrap();
        assert!(ratio >= 1.0 / c.resolution_floor() * 0.5);
    }

    #[test]
    fn content_is_frostman_and_bounded_by_points() {
        let c = build_circle::<f64>(256).unwrap();
        for beta in [0.0, 1.0, 2.5] {
            let nu = build_log_content(&c, beta).unwrap();
            assert!(nu.kappa() > 0.0 && nu.kappa() <= 1.0);
            assert!(frostman_verify(&c, &nu, 1.0, beta).unwrap() <= 1.0);
            let h = c.resolution_floor();
            assert!(nu.measure_indices(&[17]) <= frostman_gauge(h, 1.0, beta));
            assert_eq!(nu.measure_indices(&[]), 0.0);
        }
    }

    #[test]
    fn content_indicator_layer_cake() {
        let c = build_circle::<f64>(128).unwrap();
        let nu = build_log_content(&c, 1.0).unwrap();
        let f: Vec<f64> = (0..128)
            .map(|i| if (30..70).contains(&i) { 1.0 } else { 0.0 })
            .collect();
        let support: Vec<usize> = (30..70).collect();
        let expected = nu.measure_indices(&support).powf(0.5);
        assert_eq!(layer_cake_norm(&f, 2.0, &nu, 64).unwrap(), expected);
    }

    #[test]
    fn distribution_csv() {
        let c = build_circle::<f64>(16).unwrap();
        let mu = WeightMeasure::from_space(&c);
        let mut out = Vec::new();
        write_distribution_csv(&[1.0; 16], &mu, &[0.5, 2.0], &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("lambda,nu\n0.5,"));
        assert!(text.ends_with("2,0\n"), "{text}");
    }
}
