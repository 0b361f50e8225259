use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Uniform rectangular grid in the transverse plane, lengths in units of λ₁.
///
/// Node coordinates are generated symmetrically about the grid centre, so a
/// grid spanning `[-L, L]` maps exactly onto itself under `x -> -x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpatialGrid {
    pub nx: usize,
    pub ny: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl SpatialGrid {
    pub fn new(nx: usize, ny: usize, x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        let grid = Self { nx, ny, x_min: x.0, x_max: x.1, y_min: y.0, y_max: y.1 };
        grid.validate()?;
        Ok(grid)
    }

    /// Square grid of `n × n` nodes over `[-half_width, half_width]²`.
    pub fn square(n: usize, half_width: f64) -> Result<Self> {
        Self::new(n, n, (-half_width, half_width), (-half_width, half_width))
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return domain(format!("grid needs at least 2 nodes per axis, got {}x{}", self.nx, self.ny));
        }
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite());
        if !finite || self.x_max <= self.x_min || self.y_max <= self.y_min {
            return domain("grid bounds must be finite with min < max");
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, ix: usize) -> f64 {
        let c = 0.5 * (self.x_min + self.x_max);
        c + (ix as f64 - 0.5 * (self.nx - 1) as f64) * self.dx()
    }

    pub fn y(&self, iy: usize) -> f64 {
        let c = 0.5 * (self.y_min + self.y_max);
        c + (iy as f64 - 0.5 * (self.ny - 1) as f64) * self.dy()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|i| self.y(i)).collect()
    }

    /// Row-major flat index, `y` rows of `nx` nodes each.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    /// Same spacing and centre, `pad` extra nodes on each side of both axes.
    pub fn padded(&self, pad_x: usize, pad_y: usize) -> Self {
        let (dx, dy) = (self.dx(), self.dy());
        Self {
            nx: self.nx + 2 * pad_x,
            ny: self.ny + 2 * pad_y,
            x_min: self.x_min - pad_x as f64 * dx,
            x_max: self.x_max + pad_x as f64 * dx,
            y_min: self.y_min - pad_y as f64 * dy,
            y_max: self.y_max + pad_y as f64 * dy,
        }
    }

    /// Trapezoidal integral of row-major samples on this grid.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        trapezoid_2d(values, self.nx, self.ny, self.dx(), self.dy())
    }
}

pub(crate) fn trapezoid_2d(values: &[f64], nx: usize, ny: usize, dx: f64, dy: f64) -> f64 {
    debug_assert_eq!(values.len(), nx * ny);
    let mut total = 0.0;
    for iy in 0..ny {
        let wy = if iy == 0 || iy == ny - 1 { 0.5 } else { 1.0 };
        let row = &values[iy * nx..(iy + 1) * nx];
        let mut acc = 0.0;
        for (ix, v) in row.iter().enumerate() {
            let wx = if ix == 0 || ix == nx - 1 { 0.5 } else { 1.0 };
            acc += wx * v;
        }
        total += wy * acc;
    }
    total * dx * dy
}

/// Fraction of the (absolute) mass lying in the outer `ring` nodes of a grid.
pub(crate) fn edge_fraction(values: &[f64], nx: usize, ny: usize, ring: usize) -> f64 {
    let mut edge = 0.0;
    let mut total = 0.0;
    for iy in 0..ny {
        for ix in 0..nx {
            let v = values[iy * nx + ix].abs();
            total += v;
            if ix < ring || iy < ring || ix + ring >= nx || iy + ring >= ny {
                edge += v;
            }
        }
    }
    if total > 0.0 {
        edge / total
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_coordinates_are_exact() {
        let g = SpatialGrid::square(201, 1.2).unwrap();
        for i in 0..g.nx {
            assert_eq!(g.x(i), -g.x(g.nx - 1 - i));
        }
        assert_eq!(g.x(100), 0.0);
        assert!((g.x(0) + 1.2).abs() < 1e-14);
        assert!((g.x(200) - 1.2).abs() < 1e-14);
    }

    #[test]
    fn padding_keeps_nodes_aligned() {
        let g = SpatialGrid::square(33, 1.0).unwrap();
        let p = g.padded(16, 16);
        assert_eq!(p.nx, 65);
        for i in 0..g.nx {
            assert!((p.x(i + 16) - g.x(i)).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(SpatialGrid::square(1, 1.0).is_err());
        assert!(SpatialGrid::new(4, 4, (1.0, 1.0), (0.0, 1.0)).is_err());
        assert!(SpatialGrid::new(4, 4, (0.0, f64::NAN), (0.0, 1.0)).is_err());
    }

    #[test]
    fn trapezoid_of_constant() {
        let g = SpatialGrid::new(11, 21, (0.0, 2.0), (-1.0, 2.0)).unwrap();
        let v = vec![1.5; g.len()];
        assert!((g.integrate(&v) - 9.0).abs() < 1e-12);
    }
}
