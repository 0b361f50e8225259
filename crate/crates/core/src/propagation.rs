//! Free flight from the cavity exit to the detection plane.
//!
//! The Fresnel convolution is evaluated in the Fourier domain: each amplitude
//! plane is zero-padded to twice its extent, multiplied by the free-particle
//! transfer function `exp(−iβ(k_x² + k_y²)/2)` and transformed back, where
//! `β = ℏt/M` in units of λ₁².

use num_complex::Complex64 as C64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::dynamics::AmplitudeField;
use crate::error::{domain, DeflectionError, Result};
use crate::grid::{edge_fraction, SpatialGrid};
use crate::measurement::{ConditionedField, EDGE_LIMIT};
use crate::spectral::{angular_frequency, fft2};

const HBAR: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationParams {
    /// `β = ℏ t_free / M` in units of λ₁².
    pub fresnel_scale: f64,
}

impl PropagationParams {
    pub fn new(fresnel_scale: f64) -> Result<Self> {
        if !(fresnel_scale.is_finite() && fresnel_scale >= 0.0) {
            return domain(format!("fresnel scale must be finite and non-negative, got {fresnel_scale}"));
        }
        Ok(Self { fresnel_scale })
    }

    /// Flight over `length` metres at `speed` m/s for an atom of `mass` kg,
    /// with the first cavity wavelength `wavelength` in metres.
    pub fn from_flight(length: f64, speed: f64, mass: f64, wavelength: f64) -> Result<Self> {
        if !(length >= 0.0 && speed > 0.0 && mass > 0.0 && wavelength > 0.0) {
            return domain("flight length, speed, mass and wavelength must be positive");
        }
        let t = length / speed;
        Self::new(HBAR * t / (mass * wavelength * wavelength))
    }
}

/// Grid produced by [`propagate_far_field`]: same spacing and centre,
/// roughly twice the extent, with every input node also an output node.
pub fn far_field_grid(grid: &SpatialGrid) -> SpatialGrid {
    grid.padded(grid.nx / 2, grid.ny / 2)
}

fn check_transfer_sampling(grid: &SpatialGrid, beta: f64) -> Result<()> {
    // Phase step of the transfer function between neighbouring frequency
    // bins at the Nyquist frequency must stay below π.
    for (n, d) in [(grid.nx, grid.dx()), (grid.ny, grid.dy())] {
        let limit = n as f64 * d * d / (2.0 * std::f64::consts::PI);
        if beta >= limit {
            return Err(DeflectionError::Sampling(format!(
                "fresnel scale {beta:.3e} exceeds {limit:.3e} for the padded grid; enlarge the grid extent"
            )));
        }
    }
    Ok(())
}

/// Propagates one row-major plane from `grid` to `far_field_grid(grid)`.
fn propagate_plane(plane: &[C64], grid: &SpatialGrid, beta: f64) -> Vec<C64> {
    let out = far_field_grid(grid);
    let (px, py) = (grid.nx / 2, grid.ny / 2);
    let mut data = vec![C64::new(0.0, 0.0); out.len()];
    for iy in 0..grid.ny {
        let src = &plane[iy * grid.nx..(iy + 1) * grid.nx];
        let start = (iy + py) * out.nx + px;
        data[start..start + grid.nx].copy_from_slice(src);
    }
    fft2(&mut data, out.nx, out.ny, FftDirection::Forward);
    let kx: Vec<f64> = (0..out.nx).map(|k| angular_frequency(k, out.nx, out.dx())).collect();
    let ky: Vec<f64> = (0..out.ny).map(|k| angular_frequency(k, out.ny, out.dy())).collect();
    let norm = 1.0 / out.len() as f64;
    for iy in 0..out.ny {
        for ix in 0..out.nx {
            let phase = -0.5 * beta * (kx[ix] * kx[ix] + ky[iy] * ky[iy]);
            data[iy * out.nx + ix] *= C64::from_polar(norm, phase);
        }
    }
    fft2(&mut data, out.nx, out.ny, FftDirection::Inverse);
    data
}

fn check_wrap(values: &[f64], grid: &SpatialGrid) -> Result<()> {
    let ring = (grid.nx.min(grid.ny) / 32).max(1);
    let fraction = edge_fraction(values, grid.nx, grid.ny, ring);
    if fraction > EDGE_LIMIT {
        return Err(DeflectionError::EdgeMass {
            fraction,
            limit: EDGE_LIMIT,
            remedy: "the packet spreads past the padded grid; enlarge the grid or shorten the flight".into(),
        });
    }
    Ok(())
}

/// Propagates every component `Φ⁽ⁱ⁾ₙ,ₘ` through free flight.
///
/// A zero fresnel scale returns the input unchanged.
pub fn propagate_far_field(amps: &AmplitudeField, params: PropagationParams) -> Result<AmplitudeField> {
    let beta = params.fresnel_scale;
    if beta == 0.0 {
        return Ok(amps.clone());
    }
    check_transfer_sampling(&far_field_grid(&amps.grid), beta)?;
    let out_grid = far_field_grid(&amps.grid);
    let mut out = AmplitudeField::zeros(out_grid, amps.n_max, amps.m_max);
    let k = amps.components();
    for c in 0..k {
        let plane: Vec<C64> = (0..amps.grid.len()).map(|p| amps.data[p * k + c]).collect();
        let moved = propagate_plane(&plane, &amps.grid, beta);
        for (p, v) in moved.into_iter().enumerate() {
            out.data[p * k + c] = v;
        }
    }
    check_wrap(&out.local_norms(), &out_grid)?;
    Ok(out)
}

/// Propagates already-conditioned channel amplitudes; by linearity this
/// equals conditioning the propagated `Φ⁽ⁱ⁾ₙ,ₘ`.
pub fn propagate_conditioned(cond: &ConditionedField, params: PropagationParams) -> Result<ConditionedField> {
    let beta = params.fresnel_scale;
    if beta == 0.0 {
        return Ok(cond.clone());
    }
    let out_grid = far_field_grid(&cond.grid);
    check_transfer_sampling(&out_grid, beta)?;
    let channels = [
        propagate_plane(&cond.channels[0], &cond.grid, beta),
        propagate_plane(&cond.channels[1], &cond.grid, beta),
    ];
    let out = ConditionedField { grid: out_grid, channels };
    check_wrap(&out.density().values, &out_grid)?;
    Ok(out)
}

/// Direct quadrature of the Fresnel integral
/// `ψ̄(x, y) = (−i/2πβ) ∫∫ ψ(x′, y′) exp(i((x−x′)² + (y−y′)²)/2β) dx′dy′`
/// evaluated at the nodes of `target`. Cost is `O(N⁴)`; meant for checking
/// the spectral route on small grids.
pub fn fresnel_direct(plane: &[C64], grid: &SpatialGrid, beta: f64, target: &SpatialGrid) -> Result<Vec<C64>> {
    if !(beta > 0.0) {
        return domain("direct Fresnel quadrature needs a positive fresnel scale");
    }
    let d2 = grid.dx().max(grid.dy()).powi(2);
    if d2 / (2.0 * beta) >= std::f64::consts::FRAC_PI_4 {
        let need = (std::f64::consts::FRAC_PI_2 * beta).sqrt();
        return Err(DeflectionError::Sampling(format!(
            "kernel under-resolved: spacing {:.3e} must be below {need:.3e}",
            d2.sqrt()
        )));
    }
    let pref = C64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI * beta)) * grid.cell_area();
    let (xs, ys) = (grid.xs(), grid.ys());
    let mut out = Vec::with_capacity(target.len());
    for ty in 0..target.ny {
        let y = target.y(ty);
        for tx in 0..target.nx {
            let x = target.x(tx);
            let mut acc = C64::new(0.0, 0.0);
            for (iy, yp) in ys.iter().enumerate() {
                let dy2 = (y - yp).powi(2);
                for (ix, xp) in xs.iter().enumerate() {
                    let phase = ((x - xp).powi(2) + dy2) / (2.0 * beta);
                    acc += plane[iy * grid.nx + ix] * C64::from_polar(1.0, phase);
                }
            }
            out.push(acc * pref);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_plane(grid: &SpatialGrid, sigma: f64) -> Vec<C64> {
        let norm = (2.0 * std::f64::consts::PI * sigma * sigma).sqrt();
        (0..grid.len())
            .map(|p| {
                let (x, y) = (grid.x(p % grid.nx), grid.y(p / grid.nx));
                C64::new((-(x * x + y * y) / (4.0 * sigma * sigma)).exp() / norm, 0.0)
            })
            .collect()
    }

    #[test]
    fn flight_conversion() {
        // 5 ms of flight, 1e-25 kg, λ = 1 µm.
        let p = PropagationParams::from_flight(0.5, 100.0, 1e-25, 1e-6).unwrap();
        assert!((p.fresnel_scale - HBAR * 5e-3 / 1e-25 / 1e-12).abs() < 1e-12);
        assert!(PropagationParams::from_flight(0.5, 0.0, 1.0, 1.0).is_err());
        assert!(PropagationParams::new(-1.0).is_err());
    }

    #[test]
    fn output_grid_contains_input_nodes() {
        for n in [32, 33] {
            let g = SpatialGrid::square(n, 1.0).unwrap();
            let f = far_field_grid(&g);
            let off = n / 2;
            for i in 0..n {
                assert!((f.x(i + off) - g.x(i)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn gaussian_width_grows_as_expected() {
        let grid = SpatialGrid::square(65, 1.6).unwrap();
        let sigma = 0.15;
        let beta = 0.02;
        let plane = gaussian_plane(&grid, sigma);
        let cond = ConditionedField { grid, channels: [plane, vec![C64::new(0.0, 0.0); grid.len()]] };
        let out = propagate_conditioned(&cond, PropagationParams::new(beta).unwrap()).unwrap();
        let d = out.density();
        let xs = d.xs();
        let (mut m0, mut m2) = (0.0, 0.0);
        for (p, v) in d.values.iter().enumerate() {
            let x = xs[p % d.nx()];
            m0 += v;
            m2 += v * x * x;
        }
        let want = sigma * sigma + beta * beta / (4.0 * sigma * sigma);
        assert!((m2 / m0 - want).abs() / want < 1e-6);
    }

    #[test]
    fn transfer_sampling_guard() {
        let grid = SpatialGrid::square(17, 1.0).unwrap();
        let cond = ConditionedField { grid, channels: [gaussian_plane(&grid, 0.2), gaussian_plane(&grid, 0.2)] };
        assert!(matches!(
            propagate_conditioned(&cond, PropagationParams::new(10.0).unwrap()),
            Err(DeflectionError::Sampling(_))
        ));
    }

    #[test]
    fn direct_quadrature_sampling_guard() {
        let grid = SpatialGrid::square(9, 1.0).unwrap();
        let plane = gaussian_plane(&grid, 0.2);
        assert!(matches!(fresnel_direct(&plane, &grid, 1e-4, &grid), Err(DeflectionError::Sampling(_))));
        assert!(fresnel_direct(&plane, &grid, 0.0, &grid).is_err());
    }
}
