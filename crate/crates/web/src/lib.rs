//! Browser bindings: conditional position and momentum patterns for a
//! user-chosen atomic superposition, with the pattern's principal-axis angle.

use deflection::scenario::{preset, OutputKind, ScenarioConfig};
use deflection::{orientation_angle, DistributionGrid};
use wasm_bindgen::prelude::*;

/// Controls exposed in the demo page.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Controls {
    pub a_re: f64,
    pub a_im: f64,
    pub b: f64,
    /// Interaction phase `g0²τ/Δ`.
    pub eta: f64,
    /// Quadrature outcome for both modes.
    pub chi: f64,
    /// Grid points per axis.
    pub points: usize,
}

/// Fock cutoff for the demo; enough for α = 2 at the default χ range.
const DEMO_N_MAX: usize = 29;

fn config(c: Controls, kind: OutputKind) -> ScenarioConfig {
    let mut cfg = preset("fig2e").expect("preset exists").with_grid_points(c.points).with_n_max(DEMO_N_MAX);
    cfg.name = None;
    cfg.description = None;
    cfg.atom.a = [c.a_re, c.a_im];
    cfg.atom.b = [c.b, 0.0];
    cfg.interaction.tau = c.eta;
    if let deflection::scenario::MeasurementConfig::Quadrature { chi1, chi2, .. } = &mut cfg.measurement {
        *chi1 = c.chi;
        *chi2 = c.chi;
    }
    cfg.outputs = vec![kind];
    cfg
}

/// Computes one distribution, unit-mass normalised.
pub fn compute(c: Controls, kind: OutputKind) -> Result<DistributionGrid, String> {
    if !(9..=301).contains(&c.points) {
        return Err(format!("grid points must lie in 9..=301, got {}", c.points));
    }
    let out = config(c, kind).resolve().and_then(|s| s.run()).map_err(|e| e.to_string())?;
    let dist = out.get(kind).expect("requested output").to_unit_mass().map_err(|e| e.to_string())?;
    Ok(dist)
}

/// Linear grayscale RGBA, bright = high, top row = highest `y`.
pub fn rgba(dist: &DistributionGrid) -> Vec<u8> {
    let (nx, ny) = (dist.nx(), dist.ny());
    let peak = dist.values.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::with_capacity(4 * nx * ny);
    for iy in (0..ny).rev() {
        for ix in 0..nx {
            let v = if peak > 0.0 { dist.at(ix, iy) / peak } else { 0.0 };
            let g = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
            out.extend_from_slice(&[g, g, g, 255]);
        }
    }
    out
}

#[wasm_bindgen]
pub struct Pattern {
    dist: DistributionGrid,
    angle: f64,
    isotropic: bool,
}

#[wasm_bindgen]
impl Pattern {
    pub fn width(&self) -> usize {
        self.dist.nx()
    }

    pub fn height(&self) -> usize {
        self.dist.ny()
    }

    /// Major-axis angle in radians, `(−π/2, π/2]`.
    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn isotropic(&self) -> bool {
        self.isotropic
    }

    /// Half-extent of the axes (λ₁ for position, ℏk₁ for momentum).
    pub fn extent(&self) -> f64 {
        self.dist.xs().last().copied().unwrap_or(0.0)
    }

    pub fn values(&self) -> Vec<f64> {
        self.dist.values.clone()
    }

    pub fn rgba(&self) -> Vec<u8> {
        rgba(&self.dist)
    }
}

fn pattern(c: Controls, kind: OutputKind) -> Result<Pattern, JsError> {
    let dist = compute(c, kind).map_err(|e| JsError::new(&e))?;
    let o = orientation_angle(&dist).map_err(|e| JsError::new(&e.to_string()))?;
    Ok(Pattern { dist, angle: o.angle, isotropic: o.isotropic })
}

/// Quadrature-conditioned position pattern at the cavity exit.
#[wasm_bindgen]
pub fn position_pattern(a_re: f64, a_im: f64, b: f64, eta: f64, chi: f64, points: usize) -> Result<Pattern, JsError> {
    pattern(Controls { a_re, a_im, b, eta, chi, points }, OutputKind::Position)
}

/// Quadrature-conditioned momentum pattern.
#[wasm_bindgen]
pub fn momentum_pattern(a_re: f64, a_im: f64, b: f64, eta: f64, chi: f64, points: usize) -> Result<Pattern, JsError> {
    pattern(Controls { a_re, a_im, b, eta, chi, points }, OutputKind::Momentum)
}
