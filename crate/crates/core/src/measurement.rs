//! Conditional position and momentum distributions of the atom, given a
//! projective measurement of both cavity modes.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::dynamics::{component_index, AmplitudeSource};
use crate::error::{domain, DeflectionError, Result};
use crate::fockbasis::{quadrature_overlaps, PhaseOutcome, QuadratureOutcome};
use crate::grid::{edge_fraction, trapezoid_2d, SpatialGrid};
use crate::par::for_each_row;
use crate::spectral::fft2;

/// Largest admissible `|Φ⁽ⁱ⁾ₙ,ₘ⟨ref|n⟩⟨ref|m⟩|` on the Fock cutoff, relative
/// to the largest local amplitude norm.
pub const TRUNCATION_LIMIT: f64 = 1e-8;

/// Largest admissible share of the mass on the outer ring of a grid.
pub const EDGE_LIMIT: f64 = 1e-6;

/// Momentum unit ℏk₁ with λ₁ = 1.
const K1: f64 = 2.0 * PI;

/// Field reference state both modes are projected onto.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    Quadrature(QuadratureOutcome, QuadratureOutcome),
    Phase(PhaseOutcome, PhaseOutcome),
}

impl Reference {
    /// Per-mode contraction weights `w₁(n)`, `w₂(m)`.
    ///
    /// For phase states the weights are `e^{−inφ}/√(2π)`, so that the
    /// conditional density is `(2π)^{−2} Σᵢ |Σ Φ e^{−i(nφ₁+mφ₂)}|²`.
    pub fn weights(&self, n_max: usize, m_max: usize) -> (Vec<C64>, Vec<C64>) {
        match *self {
            Reference::Quadrature(q1, q2) => (quadrature_overlaps(q1, n_max), quadrature_overlaps(q2, m_max)),
            Reference::Phase(p1, p2) => {
                let s = 1.0 / (2.0 * PI).sqrt();
                let w = |phi: f64, n: usize| (0..=n).map(|k| C64::from_polar(s, -phi * k as f64)).collect();
                (w(p1.phi, n_max), w(p2.phi, m_max))
            }
        }
    }
}

/// Channel amplitudes after projecting the field:
/// `ψᵢ(x, y) = Σₙ,ₘ Φ⁽ⁱ⁾ₙ,ₘ(x, y) w₁(n) w₂(m)`.
#[derive(Debug, Clone)]
pub struct ConditionedField {
    pub grid: SpatialGrid,
    pub channels: [Vec<C64>; 2],
}

impl ConditionedField {
    /// `W(x, y) = Σᵢ |ψᵢ|²`, not renormalised.
    pub fn density(&self) -> DistributionGrid {
        let values = self.channels[0].iter().zip(&self.channels[1]).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect();
        DistributionGrid { axes: Axes::Position(self.grid), values, normalization: Normalization::Raw }
    }
}

#[derive(Clone, Copy, Default)]
struct PointOut {
    psi: [C64; 2],
    cutoff: f64,
    local: f64,
}

/// Projects every node of `src` onto `reference`.
///
/// Fails with [`DeflectionError::TruncationTail`] when the amplitude carried by
/// the outermost retained Fock states exceeds [`TRUNCATION_LIMIT`].
pub fn condition<S: AmplitudeSource + ?Sized>(src: &S, reference: &Reference) -> Result<ConditionedField> {
    let grid = *src.grid();
    let (n_max, m_max) = (src.n_max(), src.m_max());
    let (nd, md) = (n_max + 1, m_max + 1);
    let (w1, w2) = reference.weights(n_max, m_max);
    let k = src.components();
    let mut points = vec![PointOut::default(); grid.len()];
    for_each_row(&mut points, grid.nx, |iy, row| {
        let mut buf = vec![C64::new(0.0, 0.0); k];
        for (ix, out) in row.iter_mut().enumerate() {
            src.fill_point(ix, iy, &mut buf);
            let mut cutoff = 0.0f64;
            for ch in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for n in 0..nd {
                    let mut inner = C64::new(0.0, 0.0);
                    for m in 0..md {
                        let term = buf[component_index(nd, md, ch, n, m)] * w2[m];
                        if n == n_max || m == m_max {
                            cutoff = cutoff.max((term * w1[n]).norm());
                        }
                        inner += term;
                    }
                    acc += inner * w1[n];
                }
                out.psi[ch] = acc;
            }
            out.cutoff = cutoff;
            out.local = buf.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
    });
    let scale = points.iter().map(|p| p.local).fold(0.0, f64::max).sqrt();
    let cutoff = points.iter().map(|p| p.cutoff).fold(0.0, f64::max);
    if scale > 0.0 && cutoff / scale > TRUNCATION_LIMIT {
        return Err(DeflectionError::TruncationTail { tail: cutoff / scale, limit: TRUNCATION_LIMIT, n_max });
    }
    let channels = [points.iter().map(|p| p.psi[0]).collect(), points.iter().map(|p| p.psi[1]).collect()];
    Ok(ConditionedField { grid, channels })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Raw,
    UnitMass,
}

/// Conjugate momentum grid of a position grid, in units of ℏk₁.
///
/// Node `i` sits at `(i − ⌊n/2⌋)·dp` with `dp = 2π/(n·dx)` in ℏ = 1 units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumGrid {
    pub npx: usize,
    pub npy: usize,
    pub dpx: f64,
    pub dpy: f64,
}

impl MomentumGrid {
    pub fn conjugate_to(grid: &SpatialGrid) -> Self {
        Self {
            npx: grid.nx,
            npy: grid.ny,
            dpx: 2.0 * PI / (grid.nx as f64 * grid.dx()) / K1,
            dpy: 2.0 * PI / (grid.ny as f64 * grid.dy()) / K1,
        }
    }

    pub fn px(&self, i: usize) -> f64 {
        (i as f64 - (self.npx / 2) as f64) * self.dpx
    }

    pub fn py(&self, i: usize) -> f64 {
        (i as f64 - (self.npy / 2) as f64) * self.dpy
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axes {
    /// `x`, `y` in units of λ₁.
    Position(SpatialGrid),
    /// `p_x`, `p_y` in units of ℏk₁.
    Momentum(MomentumGrid),
}

/// Non-negative density sampled on a position or momentum grid, row-major
/// with `ny` rows of `nx` values.
#[derive(Debug, Clone)]
pub struct DistributionGrid {
    pub axes: Axes,
    pub values: Vec<f64>,
    pub normalization: Normalization,
}

impl DistributionGrid {
    pub fn nx(&self) -> usize {
        match self.axes {
            Axes::Position(g) => g.nx,
            Axes::Momentum(g) => g.npx,
        }
    }

    pub fn ny(&self) -> usize {
        match self.axes {
            Axes::Position(g) => g.ny,
            Axes::Momentum(g) => g.npy,
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        match self.axes {
            Axes::Position(g) => g.xs(),
            Axes::Momentum(g) => (0..g.npx).map(|i| g.px(i)).collect(),
        }
    }

    pub fn ys(&self) -> Vec<f64> {
        match self.axes {
            Axes::Position(g) => g.ys(),
            Axes::Momentum(g) => (0..g.npy).map(|i| g.py(i)).collect(),
        }
    }

    pub fn spacing(&self) -> (f64, f64) {
        match self.axes {
            Axes::Position(g) => (g.dx(), g.dy()),
            Axes::Momentum(g) => (g.dpx, g.dpy),
        }
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx() + ix]
    }

    /// Trapezoidal integral over the grid.
    pub fn mass(&self) -> f64 {
        let (dx, dy) = self.spacing();
        trapezoid_2d(&self.values, self.nx(), self.ny(), dx, dy)
    }

    /// Share of the mass on the outermost ring of nodes.
    pub fn edge_fraction(&self) -> f64 {
        edge_fraction(&self.values, self.nx(), self.ny(), 1)
    }

    /// Rescaled copy with unit trapezoidal mass.
    pub fn to_unit_mass(&self) -> Result<Self> {
        let mass = self.mass();
        if !(mass > 0.0 && mass.is_finite()) {
            return domain("cannot normalise a distribution with zero mass");
        }
        Ok(Self {
            axes: self.axes,
            values: self.values.iter().map(|v| v / mass).collect(),
            normalization: Normalization::UnitMass,
        })
    }

    pub fn normalized(&self, normalization: Normalization) -> Result<Self> {
        match normalization {
            Normalization::Raw => Ok(self.clone()),
            Normalization::UnitMass => self.to_unit_mass(),
        }
    }

    /// Fails if more than [`EDGE_LIMIT`] of the mass sits on the grid edge.
    pub fn check_edges(&self, remedy: &str) -> Result<()> {
        let fraction = self.edge_fraction();
        if fraction > EDGE_LIMIT {
            return Err(DeflectionError::EdgeMass { fraction, limit: EDGE_LIMIT, remedy: remedy.into() });
        }
        Ok(())
    }
}

/// Conditional position density for quadrature outcomes on both modes:
/// `W(x, y) = Σᵢ |Σₙ,ₘ Φ⁽ⁱ⁾ₙ,ₘ ⟨χ_θ₁|n⟩⟨χ_θ₂|m⟩|²`.
pub fn position_distribution_quadrature<S: AmplitudeSource + ?Sized>(
    amps: &S,
    out1: QuadratureOutcome,
    out2: QuadratureOutcome,
) -> Result<DistributionGrid> {
    Ok(condition(amps, &Reference::Quadrature(out1, out2))?.density())
}

/// Conditional position density for phase-state references:
/// `W(x, y) = (2π)^{−2} Σᵢ |Σₙ,ₘ Φ⁽ⁱ⁾ₙ,ₘ e^{−i(nφ₁+mφ₂)}|²`.
pub fn position_distribution_phase<S: AmplitudeSource + ?Sized>(
    amps: &S,
    phi1: PhaseOutcome,
    phi2: PhaseOutcome,
) -> Result<DistributionGrid> {
    Ok(condition(amps, &Reference::Phase(phi1, phi2))?.density())
}

/// Conditional momentum density for quadrature outcomes on both modes.
pub fn momentum_distribution<S: AmplitudeSource + ?Sized>(
    amps: &S,
    out1: QuadratureOutcome,
    out2: QuadratureOutcome,
) -> Result<DistributionGrid> {
    momentum_of(&condition(amps, &Reference::Quadrature(out1, out2))?)
}

/// Momentum density of already-conditioned channel amplitudes,
/// `ψ̃(p) = (2π)^{−1} ∫∫ ψ(x, y) e^{−i(p_x x + p_y y)} dx dy`.
///
/// The transform is linear, so transforming the two contracted channels is
/// the same as transforming every `Φ⁽ⁱ⁾ₙ,ₘ` first. The output is a density
/// in ℏk₁ units with the same integral as the position density.
pub fn momentum_of(cond: &ConditionedField) -> Result<DistributionGrid> {
    let grid = cond.grid;
    cond.density().check_edges("enlarge the position grid before transforming")?;
    let (nx, ny) = (grid.nx, grid.ny);
    // |e^{−ip·x₀}| = 1, so the origin offset of the grid drops out of |ψ̃|².
    let scale = grid.cell_area() / (2.0 * PI);
    let mut values = vec![0.0; grid.len()];
    for ch in &cond.channels {
        let mut data = ch.clone();
        fft2(&mut data, nx, ny, FftDirection::Forward);
        for iy in 0..ny {
            let ky = (iy + ny - ny / 2) % ny;
            for ix in 0..nx {
                let kx = (ix + nx - nx / 2) % nx;
                values[iy * nx + ix] += (data[ky * nx + kx] * scale).norm_sqr() * K1 * K1;
            }
        }
    }
    let dist = DistributionGrid {
        axes: Axes::Momentum(MomentumGrid::conjugate_to(&grid)),
        values,
        normalization: Normalization::Raw,
    };
    dist.check_edges("refine the position grid spacing to extend the momentum range")?;
    Ok(dist)
}

/// Principal-axis orientation of a density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    /// Angle of the major axis in `(−π/2, π/2]`; 0 when isotropic.
    pub angle: f64,
    pub isotropic: bool,
    pub centroid: (f64, f64),
    /// Covariance eigenvalues, major first.
    pub spreads: (f64, f64),
}

/// Orientation of the major eigenvector of the covariance matrix of `dist`
/// about its centroid.
pub fn orientation_angle(dist: &DistributionGrid) -> Result<Orientation> {
    let (xs, ys) = (dist.xs(), dist.ys());
    let nx = xs.len();
    let (mut m0, mut mx, mut my) = (0.0, 0.0, 0.0);
    for (p, v) in dist.values.iter().enumerate() {
        let (x, y) = (xs[p % nx], ys[p / nx]);
        m0 += v;
        mx += v * x;
        my += v * y;
    }
    if !(m0 > 0.0 && m0.is_finite()) {
        return domain("orientation needs a distribution with non-zero mass");
    }
    let (cx, cy) = (mx / m0, my / m0);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (p, v) in dist.values.iter().enumerate() {
        let (x, y) = (xs[p % nx] - cx, ys[p / nx] - cy);
        sxx += v * x * x;
        syy += v * y * y;
        sxy += v * x * y;
    }
    let (sxx, syy, sxy) = (sxx / m0, syy / m0, sxy / m0);
    let mean = 0.5 * (sxx + syy);
    let radius = (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
    let isotropic = radius <= 1e-9 * mean.abs();
    let mut angle = if isotropic { 0.0 } else { 0.5 * (2.0 * sxy).atan2(sxx - syy) };
    if angle <= -PI / 2.0 {
        angle += PI;
    }
    Ok(Orientation { angle, isotropic, centroid: (cx, cy), spreads: (mean + radius, mean - radius) })
}

/// Difference of two axis orientations, wrapped into `(−π/2, π/2]`.
pub fn axis_difference(a: f64, b: f64) -> f64 {
    let mut d = (a - b).rem_euclid(PI);
    if d > PI / 2.0 {
        d -= PI;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::*;
    use crate::fockbasis::{FockTruncation, TwoModeCoherent};

    fn gaussian_dist(sx: f64, sy: f64, rot: f64, n: usize) -> DistributionGrid {
        let grid = SpatialGrid::square(n, 5.0).unwrap();
        let (c, s) = (rot.cos(), rot.sin());
        let mut values = vec![0.0; grid.len()];
        for iy in 0..n {
            for ix in 0..n {
                let (x, y) = (grid.x(ix), grid.y(iy));
                let (u, v) = (c * x + s * y, -s * x + c * y);
                values[grid.index(ix, iy)] = (-0.5 * (u * u / (sx * sx) + v * v / (sy * sy))).exp();
            }
        }
        DistributionGrid { axes: Axes::Position(grid), values, normalization: Normalization::Raw }
    }

    #[test]
    fn orientation_of_gaussians() {
        let o = orientation_angle(&gaussian_dist(1.0, 0.5, 0.0, 101)).unwrap();
        assert!(o.angle.abs() < 1e-12 && !o.isotropic);
        let o = orientation_angle(&gaussian_dist(1.0, 0.5, PI / 4.0, 101)).unwrap();
        assert!((o.angle - PI / 4.0).abs() < 1e-9);
        let o = orientation_angle(&gaussian_dist(1.0, 0.5, PI / 2.0, 101)).unwrap();
        assert!((o.angle - PI / 2.0).abs() < 1e-9);
        let o = orientation_angle(&gaussian_dist(0.7, 0.7, 0.0, 101)).unwrap();
        assert!(o.isotropic && o.angle == 0.0);
    }

    #[test]
    fn orientation_needs_mass() {
        let mut d = gaussian_dist(1.0, 0.5, 0.0, 11);
        d.values.iter_mut().for_each(|v| *v = 0.0);
        assert!(orientation_angle(&d).is_err());
        assert!(d.to_unit_mass().is_err());
    }

    #[test]
    fn axis_difference_wraps() {
        assert!((axis_difference(PI / 2.0, -PI / 4.0) - (-PI / 4.0)).abs() < 1e-15);
        assert!((axis_difference(0.1, 0.0) - 0.1).abs() < 1e-15);
        assert!((axis_difference(-1.5, 1.5) - (PI - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn unit_mass_integrates_to_one() {
        let d = gaussian_dist(1.0, 0.5, 0.3, 81).to_unit_mass().unwrap();
        assert!((d.mass() - 1.0).abs() < 1e-12);
        assert_eq!(d.normalization, Normalization::UnitMass);
    }

    fn model(a: f64, b: f64, regime: Regime, n: usize) -> InteractionModel {
        let params = match regime {
            Regime::RamanResonant => InteractionParams::raman(1.0, 1.0).unwrap(),
            Regime::OffResonant => InteractionParams::off_resonant(1.0, 1.4, 1.0).unwrap(),
        };
        let beam = GaussianBeam::centered(0.2, 0.2).unwrap();
        InteractionModel::new(
            AtomSuperposition::real(a, b).unwrap(),
            TwoModeCoherent::real(2.0, 2.0).unwrap(),
            CouplingField::symmetric(1.0).unwrap(),
            params,
            beam,
            beam.grid(n, 6.0).unwrap(),
            FockTruncation::new(30, 1e-16),
        )
        .unwrap()
    }

    #[test]
    fn zero_time_quadrature_density_is_the_beam() {
        let beam = GaussianBeam::centered(0.2, 0.25).unwrap();
        let grid = beam.grid(41, 6.0).unwrap();
        let m = InteractionModel::new(
            AtomSuperposition::real(1.0, 0.0).unwrap(),
            TwoModeCoherent::real(2.0, 2.0).unwrap(),
            CouplingField::symmetric(1.0).unwrap(),
            InteractionParams::raman(1.0, 0.0).unwrap(),
            beam,
            grid,
            FockTruncation::new(30, 1e-16),
        )
        .unwrap();
        let q = QuadratureOutcome::new(0.0, 4.0).unwrap();
        let w = position_distribution_quadrature(&m, q, q).unwrap();
        let ratio = w.values[0] / beam.density(grid.x(0), grid.y(0));
        for iy in 0..41 {
            for ix in 0..41 {
                let r = w.at(ix, iy) / beam.density(grid.x(ix), grid.y(iy));
                assert!((r / ratio - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_time_phase_density_is_the_beam() {
        let beam = GaussianBeam::centered(0.3, 0.3).unwrap();
        let grid = beam.grid(21, 6.0).unwrap();
        let m = InteractionModel::new(
            AtomSuperposition::real(0.6, 0.8).unwrap(),
            TwoModeCoherent::real(2.0, 2.0).unwrap(),
            CouplingField::symmetric(1.0).unwrap(),
            InteractionParams::off_resonant(1.0, 2.0, 0.0).unwrap(),
            beam,
            grid,
            FockTruncation::new(30, 1e-16),
        )
        .unwrap();
        let p = PhaseOutcome::new(0.0).unwrap();
        let w = position_distribution_phase(&m, p, p).unwrap();
        let ratio = w.values[0] / beam.density(grid.x(0), grid.y(0));
        for (p, v) in w.values.iter().enumerate() {
            let r = v / beam.density(grid.x(p % 21), grid.y(p / 21));
            assert!((r / ratio - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn truncation_guard_fires() {
        let beam = GaussianBeam::centered(0.2, 0.2).unwrap();
        let m = InteractionModel::new(
            AtomSuperposition::real(1.0, 0.0).unwrap(),
            TwoModeCoherent::real(2.0, 2.0).unwrap(),
            CouplingField::symmetric(1.0).unwrap(),
            InteractionParams::raman(1.0, 1.0).unwrap(),
            beam,
            beam.grid(9, 6.0).unwrap(),
            FockTruncation::new(8, 1e-2),
        )
        .unwrap();
        let p = PhaseOutcome::new(0.0).unwrap();
        assert!(matches!(position_distribution_phase(&m, p, p), Err(DeflectionError::TruncationTail { .. })));
    }

    #[test]
    fn densities_are_finite_and_non_negative() {
        let q = QuadratureOutcome::new(0.4, 1.5).unwrap();
        for regime in [Regime::RamanResonant, Regime::OffResonant] {
            let w = position_distribution_quadrature(&model(0.3, 0.9, regime, 31), q, q).unwrap();
            assert!(w.values.iter().all(|v| v.is_finite() && *v >= 0.0));
        }
    }

    #[test]
    fn momentum_guard_rejects_clipped_packets() {
        let beam = GaussianBeam::centered(0.2, 0.2).unwrap();
        let m = InteractionModel::new(
            AtomSuperposition::real(1.0, 0.0).unwrap(),
            TwoModeCoherent::real(2.0, 2.0).unwrap(),
            CouplingField::symmetric(1.0).unwrap(),
            InteractionParams::raman(1.0, 1.0).unwrap(),
            beam,
            beam.grid(31, 1.5).unwrap(),
            FockTruncation::new(30, 1e-16),
        )
        .unwrap();
        let q = QuadratureOutcome::new(0.0, 4.0).unwrap();
        assert!(matches!(momentum_distribution(&m, q, q), Err(DeflectionError::EdgeMass { .. })));
    }
}
