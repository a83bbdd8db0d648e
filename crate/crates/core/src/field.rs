use std::io::Write;

use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::space::ScaleGrid;

/// Values `u(y, t_j)` on (point, scale level) pairs.
///
/// Stored level-major: `values[j * len + y]`.
#[derive(Clone, Debug, PartialEq)]
pub struct InteriorFunction<T> {
    grid: ScaleGrid,
    len: usize,
    values: Vec<T>,
}

impl<T: Real> InteriorFunction<T> {
    pub fn new(grid: ScaleGrid, len: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() * len {
            return invalid(format!(
                "expected {} values for {} levels x {} points, got {}",
                grid.len() * len,
                grid.len(),
                len,
                values.len()
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("interior function values must be finite");
        }
        Ok(InteriorFunction { grid, len, values })
    }

    pub fn from_fn(grid: ScaleGrid, len: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len() * len);
        for j in 0..grid.len() {
            for y in 0..len {
                values.push(f(y, j));
            }
        }
        Self::new(grid, len, values)
    }

    pub fn constant(grid: ScaleGrid, len: usize, c: T) -> Result<Self> {
        Self::new(grid, len, vec![c; grid.len() * len])
    }

    pub fn grid(&self) -> &ScaleGrid {
        &self.grid
    }

    /// Number of boundary points.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn levels(&self) -> usize {
        self.grid.len()
    }

    #[inline]
    pub fn get(&self, y: usize, j: usize) -> T {
        self.values[j * self.len + y]
    }

    pub fn level(&self, j: usize) -> &[T] {
        &self.values[j * self.len..(j + 1) * self.len]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        InteriorFunction {
            grid: self.grid,
            len: self.len,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Assembles a level-major buffer from per-point rows `rows[y][j]`.
    pub(crate) fn from_rows(grid: ScaleGrid, rows: Vec<Vec<T>>) -> Result<Self> {
        let len = rows.len();
        let mut values = vec![T::zero(); grid.len() * len];
        for (y, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                values[j * len + y] = v;
            }
        }
        Self::new(grid, len, values)
    }

    /// CSV with columns `index,scale,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "index,scale,value")?;
        for j in 0..self.levels() {
            let t: T = self.grid.scale(j);
            for y in 0..self.len {
                writeln!(out, "{y},{t},{}", self.get(y, j))?;
            }
        }
        Ok(())
    }
}

/// CSV with columns `index,value` for a boundary field.
pub fn write_boundary_csv<T: Real, W: Write>(values: &[T], mut out: W) -> Result<()> {
    writeln!(out, "index,value")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{i},{v}")?;
    }
    Ok(())
}
