//! Discretized spaces of homogeneous type `(X, d, mu)`.
//!
//! A [`HomogeneousSpace`] is a finite point cloud with a quasimetric and
//! quadrature weights approximating `mu`. Three model spaces are built in:
//! the unit circle with Lebesgue measure, the real unit sphere with normalized
//! surface measure, and the complex unit sphere with the nonisotropic
//! quasimetric `|1 - <z, w>|`.
//!
//! Suprema over scales are taken on a [`ScaleGrid`], a geometric grid
//! `t_j = 2^(-j/s)` truncated at the resolution floor of the space.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{Power, Real};

/// Seed used when a builder estimates the quasi-triangle constant.
pub const QUASI_CONSTANT_SEED: u64 = 0x5eed_a11d;
/// Number of random triples used by builders that estimate `a_d`.
pub const QUASI_CONSTANT_SAMPLES: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quasimetric {
    /// `|x - y|` in the ambient real coordinates.
    Euclidean,
    /// `|1 - <z, w>|` with coordinates read as `(re_0, im_0, re_1, im_1, ...)`.
    ComplexNonisotropic,
}

impl Quasimetric {
    /// Distance between two coordinate vectors of equal length.
    ///
    /// Both formulas are bit-symmetric in their arguments, and identical
    /// inputs give exactly zero.
    #[inline]
    pub fn eval<T: Real>(self, a: &[T], b: &[T]) -> T {
        if a == b {
            return T::zero();
        }
        match self {
            Quasimetric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(&x, &y)| (x - y) * (x - y))
                .fold(T::zero(), |s, v| s + v)
                .sqrt(),
            Quasimetric::ComplexNonisotropic => {
                let mut re = T::zero();
                let mut im = T::zero();
                for (za, zb) in a.chunks_exact(2).zip(b.chunks_exact(2)) {
                    // a * conj(b)
                    re += za[0] * zb[0] + za[1] * zb[1];
                    im += za[1] * zb[0] - za[0] * zb[1];
                }
                let one_minus = T::one() - re;
                (one_minus * one_minus + im * im).sqrt()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    Circle { n: usize },
    RealSphere { n_dim: usize, m: usize },
    ComplexSphere { n_complex: usize, m: usize },
    Custom { len: usize },
}

/// An open ball `B(center, radius) = { y : d(center, y) < radius }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball<T> {
    pub center: usize,
    pub radius: T,
}

impl<T> Ball<T> {
    pub fn new(center: usize, radius: T) -> Self {
        Ball { center, radius }
    }
}

/// Finite discretization of a space of homogeneous type.
///
/// Immutable after construction; all queries are pure.
#[derive(Clone, Debug)]
pub struct HomogeneousSpace<T> {
    kind: SpaceKind,
    metric: Quasimetric,
    dim: usize,
    coords: Vec<T>,
    weights: Vec<T>,
    gamma: T,
    quasi_constant: T,
    diameter: T,
    resolution_floor: T,
}

impl<T: Real> HomogeneousSpace<T> {
    /// Builds a space from raw coordinates (`dim` reals per point).
    ///
    /// The resolution floor is the largest nearest-neighbour distance,
    /// computed by exhaustive search. No axiom is checked here; use
    /// [`verify_quasimetric`] and [`verify_homogeneity`].
    pub fn from_points(
        coords: Vec<T>,
        dim: usize,
        weights: Vec<T>,
        metric: Quasimetric,
        gamma: T,
        quasi_constant: T,
        diameter: T,
    ) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return invalid("coordinate buffer is not a whole number of points");
        }
        let len = coords.len() / dim;
        if len < 2 {
            return invalid("a space needs at least two points");
        }
        if weights.len() != len {
            return invalid(format!("{} weights for {} points", weights.len(), len));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > T::zero())) {
            return invalid("weights must be finite and strictly positive");
        }
        if metric == Quasimetric::ComplexNonisotropic && !dim.is_multiple_of(2) {
            return invalid("complex coordinates need an even real dimension");
        }
        if !(gamma > T::zero()) || !(quasi_constant >= T::one()) || !(diameter > T::zero()) {
            return invalid("gamma and diameter must be positive and quasi_constant >= 1");
        }
        let mut space = HomogeneousSpace {
            kind: SpaceKind::Custom { len },
            metric,
            dim,
            coords,
            weights,
            gamma,
            quasi_constant,
            diameter,
            resolution_floor: T::zero(),
        };
        space.resolution_floor = space.max_nearest_neighbor();
        Ok(space)
    }

    fn max_nearest_neighbor(&self) -> T {
        (0..self.len())
            .into_par_iter()
            .map(|i| {
                let p = self.point(i);
                (0..self.len())
                    .filter(|&j| j != i)
                    .map(|j| self.metric.eval(p, self.point(j)))
                    .fold(T::infinity(), T::min)
            })
            .reduce(T::zero, T::max)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn metric(&self) -> Quasimetric {
        self.metric
    }

    /// Real coordinates per point.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn quasi_constant(&self) -> T {
        self.quasi_constant
    }

    pub fn diameter(&self) -> T {
        self.diameter
    }

    /// Smallest trusted scale `h`.
    pub fn resolution_floor(&self) -> T {
        self.resolution_floor
    }

    pub fn total_mass(&self) -> T {
        self.weights.iter().copied().sum()
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> T {
        if i == j {
            return T::zero();
        }
        self.metric.eval(self.point(i), self.point(j))
    }

    /// Distance from grid point `i` to an arbitrary coordinate vector.
    pub fn distance_to(&self, i: usize, coords: &[T]) -> T {
        self.metric.eval(self.point(i), coords)
    }

    /// Writes `d(i, j)` for every `j` into `row`.
    #[inline]
    pub fn fill_distances(&self, i: usize, row: &mut [T]) {
        let p = self.point(i);
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = if j == i {
                T::zero()
            } else {
                self.metric.eval(p, self.point(j))
            };
        }
    }

    pub fn contains(&self, ball: &Ball<T>, j: usize) -> bool {
        self.distance(ball.center, j) < ball.radius
    }

    pub fn ball_members(&self, ball: &Ball<T>) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.contains(ball, j)).collect()
    }

    pub fn ball_mass(&self, ball: &Ball<T>) -> T {
        (0..self.len())
            .filter(|&j| self.contains(ball, j))
            .fold(T::zero(), |acc, j| acc + self.weights[j])
    }

    /// Returns a copy with a different quasi-triangle constant.
    pub fn with_quasi_constant(mut self, a_d: T) -> Result<Self> {
        if !(a_d >= T::one()) {
            return invalid("quasi_constant must be >= 1");
        }
        self.quasi_constant = a_d;
        Ok(self)
    }

    pub(crate) fn check_function(&self, f: &[T]) -> Result<()> {
        if f.len() != self.len() {
            return invalid(format!("function has {} values for {} points", f.len(), self.len()));
        }
        if f.iter().any(|v| !v.is_finite()) {
            return invalid("function values must be finite");
        }
        Ok(())
    }

    pub fn descriptor(&self) -> SpaceDescriptor {
        SpaceDescriptor {
            kind: self.kind.clone(),
            points: self.len(),
            gamma: self.gamma.as_f64(),
            quasi_constant: self.quasi_constant.as_f64(),
            resolution_floor: self.resolution_floor.as_f64(),
            diameter: self.diameter.as_f64(),
            total_mass: self.total_mass().as_f64(),
        }
    }

    /// CSV with columns `index,x0,...,x{dim-1},weight`.
    pub fn write_points_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = (0..self.dim).map(|k| format!("x{k}")).collect();
        writeln!(out, "index,{},weight", header.join(","))?;
        for i in 0..self.len() {
            let coords: Vec<String> = self.point(i).iter().map(|c| format!("{c}")).collect();
            writeln!(out, "{i},{},{}", coords.join(","), self.weights[i])?;
        }
        Ok(())
    }
}

/// JSON summary of a space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    #[serde(flatten)]
    pub kind: SpaceKind,
    pub points: usize,
    pub gamma: f64,
    pub quasi_constant: f64,
    pub resolution_floor: f64,
    pub diameter: f64,
    pub total_mass: f64,
}

impl SpaceDescriptor {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn circle_coords<T: Real>(n: usize) -> Vec<T> {
    let mut coords = Vec::with_capacity(2 * n);
    for k in 0..n {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        coords.push(T::lit(theta.cos()));
        coords.push(T::lit(theta.sin()));
    }
    coords
}

/// Unit circle with `n` equally spaced points, chordal metric and weights
/// `2 pi / n` (total mass `2 pi`).
pub fn build_circle<T: Real>(n: usize) -> Result<HomogeneousSpace<T>> {
    if n < 8 {
        return invalid(format!("circle needs at least 8 points, got {n}"));
    }
    let coords = circle_coords::<T>(n);
    let w = T::lit(2.0 * std::f64::consts::PI / n as f64);
    let mut space = HomogeneousSpace {
        kind: SpaceKind::Circle { n },
        metric: Quasimetric::Euclidean,
        dim: 2,
        coords,
        weights: vec![w; n],
        gamma: T::one(),
        quasi_constant: T::one(),
        diameter: T::lit(2.0),
        resolution_floor: T::zero(),
    };
    // Equally spaced: every nearest neighbour is an adjacent point.
    space.resolution_floor = (0..n).map(|i| space.distance(i, (i + 1) % n)).fold(T::zero(), T::max);
    Ok(space)
}

fn fibonacci_coords<T: Real>(m: usize) -> Vec<T> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut coords = Vec::with_capacity(3 * m);
    for i in 0..m {
        let z = 1.0 - (2 * i + 1) as f64 / m as f64;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let phi = golden * i as f64;
        coords.push(T::lit(r * phi.cos()));
        coords.push(T::lit(r * phi.sin()));
        coords.push(T::lit(z));
    }
    coords
}

/// Root of `x^(d+1) = x + 1`, the generator of the `d`-dimensional
/// Kronecker sequence.
fn kronecker_ratio(d: usize) -> f64 {
    let mut x = 2.0f64;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / (d as f64 + 1.0));
    }
    x
}

/// Deterministic low-discrepancy points on the unit sphere of `R^dim`:
/// a Kronecker sequence in the unit cube pushed through Box-Muller pairs
/// and normalized.
fn kronecker_sphere_coords<T: Real>(dim: usize, m: usize) -> Vec<T> {
    let pairs = dim.div_ceil(2);
    let cube_dim = 2 * pairs;
    let g = kronecker_ratio(cube_dim);
    let alpha: Vec<f64> = (1..=cube_dim).map(|k| (1.0 / g.powi(k as i32)).fract()).collect();
    let mut coords = Vec::with_capacity(dim * m);
    let mut gauss = vec![0.0f64; cube_dim];
    for i in 0..m {
        for p in 0..pairs {
            let u1 = (0.5 + (i as f64 + 1.0) * alpha[2 * p]).fract().max(1e-12);
            let u2 = (0.5 + (i as f64 + 1.0) * alpha[2 * p + 1]).fract();
            let r = (-2.0 * u1.ln()).sqrt();
            let th = 2.0 * std::f64::consts::PI * u2;
            gauss[2 * p] = r * th.cos();
            gauss[2 * p + 1] = r * th.sin();
        }
        let norm = gauss[..dim].iter().map(|g| g * g).sum::<f64>().sqrt();
        coords.extend(gauss[..dim].iter().map(|g| T::lit(g / norm)));
    }
    coords
}

/// Unit sphere `S^(n_dim - 1)` in `R^n_dim` with `m` points, Euclidean metric
/// and uniform weights summing to 1.
pub fn build_real_sphere<T: Real>(n_dim: usize, m: usize) -> Result<HomogeneousSpace<T>> {
    if n_dim < 2 {
        return invalid(format!("real sphere needs n_dim >= 2, got {n_dim}"));
    }
    if m < 64 {
        return invalid(format!("real sphere needs at least 64 points, got {m}"));
    }
    let coords = match n_dim {
        2 => circle_coords::<T>(m),
        3 => fibonacci_coords::<T>(m),
        d => kronecker_sphere_coords::<T>(d, m),
    };
    let w = T::one() / T::from_usize_lossy(m);
    let mut space = HomogeneousSpace::from_points(
        coords,
        n_dim,
        vec![w; m],
        Quasimetric::Euclidean,
        T::from_usize_lossy(n_dim - 1),
        T::one(),
        T::lit(2.0),
    )?;
    space.kind = SpaceKind::RealSphere { n_dim, m };
    Ok(space)
}

/// Unit sphere `S^(2n-1)` in `C^n` with the nonisotropic quasimetric
/// `|1 - <z, w>|` and uniform weights summing to 1. The quasi-triangle
/// constant is estimated with [`verify_quasimetric`] and stored.
pub fn build_complex_sphere<T: Real>(n_complex: usize, m: usize) -> Result<HomogeneousSpace<T>> {
    if n_complex < 1 {
        return invalid("complex sphere needs n_complex >= 1");
    }
    if m < 64 {
        return invalid(format!("complex sphere needs at least 64 points, got {m}"));
    }
    let dim = 2 * n_complex;
    let coords = if n_complex == 1 {
        circle_coords::<T>(m)
    } else {
        kronecker_sphere_coords::<T>(dim, m)
    };
    let w = T::one() / T::from_usize_lossy(m);
    let mut space = HomogeneousSpace::from_points(
        coords,
        dim,
        vec![w; m],
        Quasimetric::ComplexNonisotropic,
        T::from_usize_lossy(n_complex),
        T::one(),
        T::lit(2.0),
    )?;
    space.kind = SpaceKind::ComplexSphere { n_complex, m };
    let a_d = verify_quasimetric(&space, QUASI_CONSTANT_SAMPLES, QUASI_CONSTANT_SEED)?;
    space.quasi_constant = a_d.max(T::one());
    Ok(space)
}

/// Estimates the quasi-triangle constant `a_d` as the largest observed
/// `d(x,y) / (d(x,z) + d(z,y))` over `samples` random triples.
///
/// Symmetry is checked bit-exactly on every sampled pair. Distinctness
/// (`d(x,y) = 0` only for `x = y`) is checked exhaustively for spaces of at
/// most 4096 points and on sampled pairs otherwise.
pub fn verify_quasimetric<T: Real>(space: &HomogeneousSpace<T>, samples: usize, seed: u64) -> Result<T> {
    if samples == 0 {
        return invalid("samples must be >= 1");
    }
    let n = space.len();
    if n == 0 {
        return invalid("empty space");
    }
    if n <= 4096 {
        let witness = (0..n).into_par_iter().find_map_any(|i| {
            let mut row = vec![T::zero(); n];
            space.fill_distances(i, &mut row);
            row.iter()
                .enumerate()
                .skip(i + 1)
                .find(|(_, d)| !(**d > T::zero()))
                .map(|(j, _)| (i, j))
        });
        if let Some((i, j)) = witness {
            return Err(Error::AxiomViolation {
                first: i,
                second: j,
                reason: "zero distance between distinct points".into(),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    for _ in 0..samples {
        let x = rng.gen_range(0..n);
        let y = rng.gen_range(0..n);
        let z = rng.gen_range(0..n);
        let dxy = space.distance(x, y);
        let dyx = space.distance(y, x);
        if dxy != dyx {
            return Err(Error::AxiomViolation {
                first: x,
                second: y,
                reason: format!("asymmetric distance {dxy} vs {dyx}"),
            });
        }
        if x != y && !(dxy > T::zero()) {
            return Err(Error::AxiomViolation {
                first: x,
                second: y,
                reason: "zero distance between distinct points".into(),
            });
        }
        if space.distance(x, x) != T::zero() {
            return Err(Error::AxiomViolation {
                first: x,
                second: x,
                reason: "nonzero self-distance".into(),
            });
        }
        let denom = space.distance(x, z) + space.distance(z, y);
        if denom > T::zero() {
            worst = worst.max(dxy / denom);
        }
    }
    Ok(worst)
}

/// Smallest `C >= 1` with `t^gamma / C <= mu(B(x, t)) <= C t^gamma` over all
/// points and all dyadic `t = 2^k` in `[t_min, t_max]`.
pub fn verify_homogeneity<T: Real>(space: &HomogeneousSpace<T>, t_min: T, t_max: T) -> Result<T> {
    if !(t_min > T::zero()) || !(t_min <= t_max) || t_max > space.diameter() {
        return invalid("need 0 < t_min <= t_max <= diameter");
    }
    let scales = dyadic_scales_between(t_min, t_max);
    if scales.is_empty() {
        return invalid("no dyadic scale in the requested range");
    }
    let pow = Power::new(space.gamma());
    let targets: Vec<T> = scales.iter().map(|&t| pow.apply(t)).collect();
    let n = space.len();
    let worst = (0..n)
        .into_par_iter()
        .map_init(
            || vec![T::zero(); n],
            |row, x| {
                space.fill_distances(x, row);
                let mut mass = vec![T::zero(); scales.len()];
                for (d, w) in row.iter().zip(space.weights()) {
                    // scales are decreasing; every prefix with t > d contains y
                    let k = scales.partition_point(|&t| t > *d);
                    if k > 0 {
                        mass[k - 1] += *w;
                    }
                }
                for k in (0..scales.len().saturating_sub(1)).rev() {
                    let finer = mass[k + 1];
                    mass[k] += finer;
                }
                mass.iter()
                    .zip(&targets)
                    .map(|(&m, &g)| (m / g).max(g / m))
                    .fold(T::one(), T::max)
            },
        )
        .reduce(T::one, T::max);
    Ok(worst)
}

/// Decreasing list of the powers of two in `[lo, hi]`.
fn dyadic_scales_between<T: Real>(lo: T, hi: T) -> Vec<T> {
    let top = hi.log2().floor().to_i32().unwrap_or(0);
    let mut out = Vec::new();
    let mut k = top;
    loop {
        let t = T::lit(2.0).powi(k);
        if t < lo {
            break;
        }
        if t <= hi {
            out.push(t);
        }
        k -= 1;
        if k < -1000 {
            break;
        }
    }
    out
}

/// Geometric scale grid `t_j = 2^(-j/s)`, `j = 0..len`, with `s` levels per
/// octave. `s = 1` is the dyadic grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleGrid {
    per_octave: usize,
    levels: usize,
}

impl ScaleGrid {
    pub fn new(per_octave: usize, levels: usize) -> Result<Self> {
        if per_octave == 0 {
            return invalid("per_octave must be >= 1");
        }
        Ok(ScaleGrid { per_octave, levels })
    }

    /// All levels with `t_j >= h` for the space's resolution floor `h`.
    pub fn for_space<T: Real>(space: &HomogeneousSpace<T>, per_octave: usize) -> Result<Self> {
        Self::down_to(space.resolution_floor(), per_octave)
    }

    pub fn dyadic<T: Real>(space: &HomogeneousSpace<T>) -> Self {
        Self::for_space(space, 1).expect("per_octave 1 is valid")
    }

    /// All levels with `t_j >= floor`.
    pub fn down_to<T: Real>(floor: T, per_octave: usize) -> Result<Self> {
        let mut grid = ScaleGrid::new(per_octave, 0)?;
        while grid.scale_at::<T>(grid.levels) >= floor && grid.levels < 64 * per_octave {
            grid.levels += 1;
        }
        Ok(grid)
    }

    pub fn per_octave(&self) -> usize {
        self.per_octave
    }

    pub fn len(&self) -> usize {
        self.levels
    }

    pub fn is_empty(&self) -> bool {
        self.levels == 0
    }

    fn scale_at<T: Real>(&self, j: usize) -> T {
        let whole = (j / self.per_octave) as i32;
        let part = j % self.per_octave;
        let base = T::lit(0.5).powi(whole);
        if part == 0 {
            base
        } else {
            base * T::lit(2.0).powf(-T::from_usize_lossy(part) / T::from_usize_lossy(self.per_octave))
        }
    }

    /// `t_j = 2^(-j/s)`; exact at whole octaves.
    pub fn scale<T: Real>(&self, j: usize) -> T {
        debug_assert!(j < self.levels);
        self.scale_at(j)
    }

    /// `log2(2 / t_j) = 1 + j/s`.
    pub fn log_factor<T: Real>(&self, j: usize) -> T {
        T::one() + T::from_usize_lossy(j) / T::from_usize_lossy(self.per_octave)
    }

    pub fn scales<T: Real>(&self) -> Vec<T> {
        (0..self.levels).map(|j| self.scale(j)).collect()
    }

    /// Level offset `k` with `A t_j = t_(j-k)`, when `A = 2^(k/s)` for an
    /// integer `k >= 0`.
    pub fn shift_for<T: Real>(&self, factor: T) -> Option<usize> {
        if !(factor >= T::one()) {
            return None;
        }
        let k = factor.log2() * T::from_usize_lossy(self.per_octave);
        let r = k.round();
        if (k - r).abs() <= T::lit(1e-9) * r.max(T::one()) {
            r.to_usize()
        } else {
            None
        }
    }

    /// The level whose scale equals `t` (within relative `1e-12`), if any.
    pub fn level_of<T: Real>(&self, t: T) -> Option<usize> {
        (0..self.levels).find(|&j| {
            let s: T = self.scale(j);
            (s - t).abs() <= T::lit(1e-12) * s
        })
    }
}
