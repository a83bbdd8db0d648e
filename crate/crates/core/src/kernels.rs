//! Poisson kernels, their powers and the log-normalized potential `P_0`.
//!
//! Interior points are parameterized as (boundary point, scale) pairs: the
//! point `(xi, t)` stands for `(1 - t) xi` in the ball. Every integral is a
//! plain weighted sum over the point cloud of the space.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::InteriorFunction;
use crate::scalar::{log_factor, Power, Real};
use crate::space::{HomogeneousSpace, Quasimetric, ScaleGrid};

/// Interior point `(1 - scale) * base`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteriorPoint<T> {
    pub base: usize,
    pub scale: T,
}

impl<T> InteriorPoint<T> {
    pub fn new(base: usize, scale: T) -> Self {
        InteriorPoint { base, scale }
    }
}

/// Which Poisson kernel a power integral uses. Each kernel carries its own
/// exponent offset: `P_l` integrates `kernel^(l + offset)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `(1/2pi) (1 - r^2) / |r - e^(i gap)|^2` on the unit circle, offset 1/2.
    Disk,
    /// `(1 - |x|^2) / |x - theta|^n` on `S^(n-1)`, offset `(n-1)/n`.
    RealBall,
    /// `(1 - |z|^2)^n / |1 - <z, zeta>|^(2n)` on `S^(2n-1)`, offset 1/2.
    ComplexBall,
}

impl KernelKind {
    pub fn exponent_offset<T: Real>(self, space: &HomogeneousSpace<T>) -> T {
        match self {
            KernelKind::Disk | KernelKind::ComplexBall => T::lit(0.5),
            KernelKind::RealBall => {
                let n = T::from_usize_lossy(space.dim());
                (n - T::one()) / n
            }
        }
    }

    /// Natural kernel for a space's metric.
    pub fn for_space<T: Real>(space: &HomogeneousSpace<T>) -> Self {
        match (space.metric(), space.dim()) {
            (Quasimetric::Euclidean, 2) => KernelKind::Disk,
            (Quasimetric::Euclidean, _) => KernelKind::RealBall,
            (Quasimetric::ComplexNonisotropic, _) => KernelKind::ComplexBall,
        }
    }

    fn check<T: Real>(self, space: &HomogeneousSpace<T>) -> Result<()> {
        let ok = match self {
            KernelKind::Disk => space.metric() == Quasimetric::Euclidean && space.dim() == 2,
            KernelKind::RealBall => space.metric() == Quasimetric::Euclidean,
            KernelKind::ComplexBall => space.metric() == Quasimetric::ComplexNonisotropic,
        };
        if ok {
            Ok(())
        } else {
            invalid(format!(
                "{self:?} kernel does not match a {:?} space of dimension {}",
                space.metric(),
                space.dim()
            ))
        }
    }

    /// Kernel value at `(1 - t) xi` against boundary point `eta`, both unit vectors.
    #[inline]
    fn eval_unit<T: Real>(self, xi: &[T], eta: &[T], r: T) -> T {
        match self {
            KernelKind::Disk | KernelKind::RealBall => {
                // |r xi - eta|^2 = (1 - r)^2 + r |xi - eta|^2 for unit xi, eta
                let chord2 = xi
                    .iter()
                    .zip(eta)
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .fold(T::zero(), |s, v| s + v);
                let dist2 = (T::one() - r) * (T::one() - r) + r * chord2;
                let num = T::one() - r * r;
                if self == KernelKind::Disk {
                    num / dist2 / (T::lit(2.0) * T::PI())
                } else {
                    num / dist2.powf(T::from_usize_lossy(xi.len()) / T::lit(2.0))
                }
            }
            KernelKind::ComplexBall => {
                let n = xi.len() / 2;
                let mut re = T::zero();
                let mut im = T::zero();
                for (a, b) in xi.chunks_exact(2).zip(eta.chunks_exact(2)) {
                    re += a[0] * b[0] + a[1] * b[1];
                    im += a[1] * b[0] - a[0] * b[1];
                }
                let dre = T::one() - r * re;
                let dim = r * im;
                let denom = (dre * dre + dim * dim).powi(n as i32);
                (T::one() - r * r).powi(n as i32) / denom
            }
        }
    }
}

/// Poisson kernel of the unit disk at `z = r`, boundary angle `angle_gap`.
pub fn poisson_disk_kernel<T: Real>(r: T, angle_gap: T) -> Result<T> {
    if !(r >= T::zero() && r < T::one()) {
        return invalid(format!("radius {r} outside [0, 1)"));
    }
    // |r - e^(i a)|^2 = (1 - r)^2 + 4 r sin^2(a/2)
    let s = (angle_gap / T::lit(2.0)).sin();
    let dist2 = (T::one() - r) * (T::one() - r) + T::lit(4.0) * r * s * s;
    Ok((T::one() - r * r) / dist2 / (T::lit(2.0) * T::PI()))
}

/// Poisson kernel `(1 - |x|^2) / |x - theta|^n` of the unit ball in `R^n`.
pub fn poisson_ball_kernel<T: Real>(x: &[T], theta: &[T]) -> Result<T> {
    if x.len() != theta.len() || x.is_empty() {
        return invalid("x and theta must have the same positive dimension");
    }
    let r2 = x.iter().map(|&v| v * v).fold(T::zero(), |s, v| s + v);
    if !(r2 < T::one()) {
        return invalid("|x| must be < 1");
    }
    let d2 = x
        .iter()
        .zip(theta)
        .map(|(&a, &b)| (a - b) * (a - b))
        .fold(T::zero(), |s, v| s + v);
    let n = T::from_usize_lossy(x.len());
    Ok((T::one() - r2) / d2.powf(n / T::lit(2.0)))
}

/// Invariant Poisson kernel `(1 - |z|^2)^n / |1 - <z, zeta>|^(2n)` of the
/// unit ball in `C^n`.
pub fn invariant_poisson_kernel<T: Real>(z: &[Complex<T>], zeta: &[Complex<T>]) -> Result<T> {
    if z.len() != zeta.len() || z.is_empty() {
        return invalid("z and zeta must have the same positive dimension");
    }
    let r2 = z.iter().map(|c| c.norm_sqr()).fold(T::zero(), |s, v| s + v);
    if !(r2 < T::one()) {
        return invalid("|z| must be < 1");
    }
    let inner = z
        .iter()
        .zip(zeta)
        .map(|(a, b)| a * b.conj())
        .fold(Complex::new(T::zero(), T::zero()), |s, v| s + v);
    let n = z.len() as i32;
    let gap = (Complex::new(T::one(), T::zero()) - inner).norm_sqr();
    Ok((T::one() - r2).powi(n) / gap.powi(n))
}

fn check_interior<T: Real>(space: &HomogeneousSpace<T>, z: &InteriorPoint<T>) -> Result<()> {
    if z.base >= space.len() {
        return invalid(format!("base point {} out of range", z.base));
    }
    if !(z.scale > T::zero() && z.scale <= T::one()) {
        return invalid(format!("scale {} outside (0, 1]", z.scale));
    }
    Ok(())
}

/// `P_l f(z) = sum_eta kernel(z, eta)^(l + offset) f(eta) w(eta)`.
pub fn power_integral<T: Real>(
    space: &HomogeneousSpace<T>,
    f: &[T],
    z: InteriorPoint<T>,
    l: T,
    kernel: KernelKind,
) -> Result<T> {
    let (num, _) = power_pair(space, f, z, l, kernel)?;
    Ok(num)
}

/// `P_l f(z) / P_l 1(z)`.
pub fn normalized_power_integral<T: Real>(
    space: &HomogeneousSpace<T>,
    f: &[T],
    z: InteriorPoint<T>,
    l: T,
    kernel: KernelKind,
) -> Result<T> {
    let (num, den) = power_pair(space, f, z, l, kernel)?;
    if !(den > T::zero()) {
        return Err(Error::Internal(format!(
            "P_l 1 vanished at base {} scale {}",
            z.base, z.scale
        )));
    }
    Ok(num / den)
}

fn power_pair<T: Real>(
    space: &HomogeneousSpace<T>,
    f: &[T],
    z: InteriorPoint<T>,
    l: T,
    kernel: KernelKind,
) -> Result<(T, T)> {
    if !(l >= T::zero()) {
        return invalid(format!("power index l = {l} must be >= 0"));
    }
    space.check_function(f)?;
    kernel.check(space)?;
    check_interior(space, &z)?;
    let pow = Power::new(l + kernel.exponent_offset(space));
    let r = T::one() - z.scale;
    let xi = space.point(z.base);
    let mut num = T::zero();
    let mut den = T::zero();
    for (eta, (&fv, &w)) in f.iter().zip(space.weights()).enumerate() {
        let k = pow.apply(kernel.eval_unit(xi, space.point(eta), r)) * w;
        num += k * fv;
        den += k;
    }
    Ok((num, den))
}

/// `P_l f / P_l 1` at every `(y, t_j)` of the grid.
pub fn normalized_power_field<T: Real>(
    space: &HomogeneousSpace<T>,
    grid: &ScaleGrid,
    f: &[T],
    l: T,
    kernel: KernelKind,
) -> Result<InteriorFunction<T>> {
    if !(l >= T::zero()) {
        return invalid(format!("power index l = {l} must be >= 0"));
    }
    space.check_function(f)?;
    kernel.check(space)?;
    let pow = Power::new(l + kernel.exponent_offset(space));
    let radii: Vec<T> = (0..grid.len()).map(|j| T::one() - grid.scale::<T>(j)).collect();
    let rows: Vec<Vec<T>> = (0..space.len())
        .into_par_iter()
        .map(|y| {
            let xi = space.point(y);
            radii
                .iter()
                .map(|&r| {
                    let mut num = T::zero();
                    let mut den = T::zero();
                    for (eta, (&fv, &w)) in f.iter().zip(space.weights()).enumerate() {
                        let k = pow.apply(kernel.eval_unit(xi, space.point(eta), r)) * w;
                        num += k * fv;
                        den += k;
                    }
                    num / den
                })
                .collect()
        })
        .collect();
    InteriorFunction::from_rows(*grid, rows)
}

/// The log-normalized potential
/// `P_0 f(x, t) = (log2(2/t))^-1 sum_y f(y) w(y) / (d(x, y) + t)^gamma`.
pub fn p0<T: Real>(space: &HomogeneousSpace<T>, f: &[T], x: usize, t: T) -> Result<T> {
    space.check_function(f)?;
    if x >= space.len() {
        return invalid(format!("point {x} out of range"));
    }
    if t < space.resolution_floor() || !(t > T::zero()) {
        return invalid(format!(
            "scale {t} below the resolution floor {}",
            space.resolution_floor()
        ));
    }
    if t > T::one() {
        return invalid(format!("scale {t} above 1"));
    }
    let pow = Power::new(space.gamma());
    let sum = f
        .iter()
        .zip(space.weights())
        .enumerate()
        .map(|(y, (&fv, &w))| fv * w / pow.apply(space.distance(x, y) + t))
        .fold(T::zero(), |s, v| s + v);
    Ok(sum / log_factor(t))
}

/// [`p0`] at every `(x, t_j)` of the grid.
pub fn p0_field<T: Real>(space: &HomogeneousSpace<T>, grid: &ScaleGrid, f: &[T]) -> Result<InteriorFunction<T>> {
    space.check_function(f)?;
    if let Some(j) = (0..grid.len()).find(|&j| grid.scale::<T>(j) < space.resolution_floor()) {
        return invalid(format!("grid level {j} lies below the resolution floor"));
    }
    let pow = Power::new(space.gamma());
    let support: Vec<(usize, T)> = f
        .iter()
        .zip(space.weights())
        .enumerate()
        .filter(|(_, (&fv, _))| fv != T::zero())
        .map(|(y, (&fv, &w))| (y, fv * w))
        .collect();
    let scales = grid.scales::<T>();
    let logs: Vec<T> = (0..grid.len()).map(|j| grid.log_factor(j)).collect();
    let n = space.len();
    let rows: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map_init(
            || vec![T::zero(); n],
            |row, x| {
                space.fill_distances(x, row);
                scales
                    .iter()
                    .zip(&logs)
                    .map(|(&t, &lf)| {
                        let s = support
                            .iter()
                            .map(|&(y, fw)| fw / pow.apply(row[y] + t))
                            .fold(T::zero(), |s, v| s + v);
                        s / lf
                    })
                    .collect()
            },
        )
        .collect();
    InteriorFunction::from_rows(*grid, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_circle, build_complex_sphere, build_real_sphere};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn disk_kernel_values() {
        assert_relative_eq!(
            poisson_disk_kernel(0.0, 1.3).unwrap(),
            1.0 / (2.0 * PI),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            poisson_disk_kernel(0.5, 0.0).unwrap(),
            3.0 / (2.0 * PI),
            epsilon = 1e-14
        );
        assert!(poisson_disk_kernel(1.0, 0.0).is_err());
    }

    #[test]
    fn ball_kernel_values() {
        let theta = [0.0, 0.6, 0.8];
        assert_relative_eq!(poisson_ball_kernel(&[0.0, 0.0, 0.0], &theta).unwrap(), 1.0);
        let x: Vec<f64> = theta.iter().map(|v| 0.5 * v).collect();
        assert_relative_eq!(poisson_ball_kernel(&x, &theta).unwrap(), 0.75 / 0.125, epsilon = 1e-12);
        assert!(poisson_ball_kernel(&[1.0, 0.0, 0.0], &theta).is_err());
        // n = 2 agrees with 2 pi times the disk kernel
        let gap: f64 = 0.7;
        let v = poisson_ball_kernel(&[0.3, 0.0], &[gap.cos(), gap.sin()]).unwrap();
        assert_relative_eq!(
            v,
            2.0 * PI * poisson_disk_kernel(0.3, gap).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn invariant_kernel_values() {
        let zeta = [Complex::new(0.6, 0.0), Complex::new(0.0, 0.8)];
        let origin = [Complex::new(0.0, 0.0); 2];
        assert_relative_eq!(invariant_poisson_kernel(&origin, &zeta).unwrap(), 1.0);
        let r = 0.4;
        let z: Vec<Complex<f64>> = zeta.iter().map(|c| c * r).collect();
        assert_relative_eq!(
            invariant_poisson_kernel(&z, &zeta).unwrap(),
            ((1.0 + r) / (1.0 - r)).powi(2),
            max_relative = 1e-12
        );
        let gap: f64 = 2.1;
        let v = invariant_poisson_kernel(&[Complex::new(0.3, 0.0)], &[Complex::new(gap.cos(), gap.sin())]).unwrap();
        assert_relative_eq!(
            v,
            2.0 * PI * poisson_disk_kernel(0.3, gap).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn classical_poisson_integral_of_one() {
        let c = build_circle::<f64>(4096).unwrap();
        let one = vec![1.0; c.len()];
        let v = power_integral(&c, &one, InteriorPoint::new(17, 0.1), 0.5, KernelKind::Disk).unwrap();
        assert!((v - 1.0).abs() <= 1e-4);
    }

    #[test]
    fn square_root_kernel_at_center() {
        let c = build_circle::<f64>(256).unwrap();
        let one = vec![1.0; c.len()];
        let v = power_integral(&c, &one, InteriorPoint::new(0, 1.0), 0.0, KernelKind::Disk).unwrap();
        assert_relative_eq!(v, (2.0 * PI).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn negative_power_and_kernel_mismatch_rejected() {
        let c = build_circle::<f64>(64).unwrap();
        let one = vec![1.0; c.len()];
        let z = InteriorPoint::new(0, 0.5);
        assert!(matches!(
            power_integral(&c, &one, z, -0.1, KernelKind::Disk),
            Err(Error::InvalidArgument(_))
        ));
        assert!(power_integral(&c, &one, z, 0.0, KernelKind::ComplexBall).is_err());
        let s = build_real_sphere::<f64>(3, 64).unwrap();
        assert!(power_integral(&s, &vec![1.0; 64], z, 0.0, KernelKind::Disk).is_err());
        assert!(power_integral(&s, &vec![1.0; 64], z, 0.0, KernelKind::RealBall).is_ok());
    }

    #[test]
    fn normalized_reproduces_constants() {
        let s = build_complex_sphere::<f64>(2, 128).unwrap();
        let five = vec![5.0; s.len()];
        for &l in &[0.0, 0.5, 2.0] {
            let v =
                normalized_power_integral(&s, &five, InteriorPoint::new(3, 0.05), l, KernelKind::ComplexBall).unwrap();
            assert_relative_eq!(v, 5.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn p0_rejects_scales_below_floor() {
        let c = build_circle::<f64>(64).unwrap();
        let f = vec![1.0; 64];
        assert!(p0(&c, &f, 0, c.resolution_floor() / 2.0).is_err());
        assert!(p0(&c, &f, 0, 0.5).is_ok());
        assert_eq!(p0(&c, &vec![0.0; 64], 5, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn p0_field_matches_pointwise() {
        let c = build_circle::<f64>(128).unwrap();
        let grid = ScaleGrid::for_space(&c, 2).unwrap();
        let f: Vec<f64> = (0..128).map(|i| (i as f64 * 0.1).sin()).collect();
        let field = p0_field(&c, &grid, &f).unwrap();
        for &(x, j) in &[(0, 0), (7, 3), (100, grid.len() - 1)] {
            let direct = p0(&c, &f, x, grid.scale(j)).unwrap();
            assert_relative_eq!(field.get(x, j), direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn normalized_field_matches_pointwise() {
        let c = build_circle::<f64>(128).unwrap();
        let grid = ScaleGrid::for_space(&c, 1).unwrap();
        let f: Vec<f64> = (0..128).map(|i| (i as f64 * 0.3).cos()).collect();
        let field = normalized_power_field(&c, &grid, &f, 0.0, KernelKind::Disk).unwrap();
        let direct =
            normalized_power_integral(&c, &f, InteriorPoint::new(9, grid.scale(2)), 0.0, KernelKind::Disk).unwrap();
        assert_relative_eq!(field.get(9, 2), direct, max_relative = 1e-12);
    }
}
