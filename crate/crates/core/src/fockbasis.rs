//! Truncated Fock-space scalars: coherent-state coefficients and the overlaps
//! of number states with quadrature eigenstates and phase states.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, DeflectionError, Result};

/// Inclusive photon-number cutoff applied to both modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockTruncation {
    pub n_max: usize,
    pub tail_tolerance: f64,
}

impl FockTruncation {
    pub fn new(n_max: usize, tail_tolerance: f64) -> Self {
        Self { n_max, tail_tolerance }
    }

    /// Number of retained states per mode.
    pub fn dim(&self) -> usize {
        self.n_max + 1
    }
}

/// Product coherent state `|α₁⟩|α₂⟩` of the two cavity modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCoherent {
    pub alpha1: C64,
    pub alpha2: C64,
}

impl TwoModeCoherent {
    pub fn new(alpha1: C64, alpha2: C64) -> Result<Self> {
        if !(alpha1.re.is_finite() && alpha1.im.is_finite() && alpha2.re.is_finite() && alpha2.im.is_finite()) {
            return domain("coherent amplitudes must be finite");
        }
        Ok(Self { alpha1, alpha2 })
    }

    pub fn real(alpha1: f64, alpha2: f64) -> Result<Self> {
        Self::new(C64::new(alpha1, 0.0), C64::new(alpha2, 0.0))
    }

    /// Smallest cutoff that keeps the Poisson tail of both modes below `tol`.
    pub fn truncation(&self, tail_tolerance: f64) -> Result<FockTruncation> {
        let t1 = truncation_for(self.alpha1, tail_tolerance)?;
        let t2 = truncation_for(self.alpha2, tail_tolerance)?;
        Ok(FockTruncation::new(t1.n_max.max(t2.n_max), tail_tolerance))
    }

    /// `C_{n,m}` for `0 ≤ n, m ≤ n_max + extra`, row-major in `n`.
    pub fn coefficient_table(&self, n_max: usize, extra: usize) -> CoefficientTable {
        let dim = n_max + extra + 1;
        CoefficientTable {
            dim,
            mode1: coherent_amplitudes(self.alpha1, dim - 1),
            mode2: coherent_amplitudes(self.alpha2, dim - 1),
        }
    }

    /// Retained probability `Σ_{n,m ≤ n_max} |C_{n,m}|²`.
    pub fn retained_mass(&self, n_max: usize) -> f64 {
        let p1: f64 = coherent_amplitudes(self.alpha1, n_max).iter().map(|c| c.norm_sqr()).sum();
        let p2: f64 = coherent_amplitudes(self.alpha2, n_max).iter().map(|c| c.norm_sqr()).sum();
        p1 * p2
    }
}

/// Tabulated `C_{n,m} = c₁(n)·c₂(m)`; the two-mode coefficient factorises.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    dim: usize,
    mode1: Vec<C64>,
    mode2: Vec<C64>,
}

impl CoefficientTable {
    /// `C_{n,m}`, zero for negative or out-of-table indices.
    #[inline]
    pub fn get(&self, n: isize, m: isize) -> C64 {
        if n < 0 || m < 0 || n as usize >= self.dim || m as usize >= self.dim {
            return C64::new(0.0, 0.0);
        }
        self.mode1[n as usize] * self.mode2[m as usize]
    }
}

/// Measured quadrature: angle `θ` in the phase plane and eigenvalue `χ_θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOutcome {
    pub theta: f64,
    pub chi: f64,
}

impl QuadratureOutcome {
    /// Wraps `theta` into `[0, 2π)`.
    pub fn new(theta: f64, chi: f64) -> Result<Self> {
        if !theta.is_finite() || !chi.is_finite() {
            return domain("quadrature outcome must be finite");
        }
        Ok(Self { theta: wrap_angle(theta), chi })
    }
}

/// Phase-state parameter `φ` of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseOutcome {
    pub phi: f64,
}

impl PhaseOutcome {
    pub fn new(phi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return domain("phase outcome must be finite");
        }
        Ok(Self { phi: wrap_angle(phi) })
    }
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

/// `ln n!` by direct summation.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn check_index(n: i64, what: &str) -> Result<usize> {
    if n < 0 {
        return domain(format!("{what} must be non-negative, got {n}"));
    }
    Ok(n as usize)
}

/// Single-mode coherent amplitude `e^{-|α|²/2} αⁿ/√n!`, evaluated in log space.
fn coherent_single(alpha: C64, n: usize) -> C64 {
    let r = alpha.norm();
    if n == 0 {
        return C64::new((-0.5 * r * r).exp(), 0.0);
    }
    if r == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let ln_mod = -0.5 * r * r + n as f64 * r.ln() - 0.5 * ln_factorial(n);
    C64::from_polar(ln_mod.exp(), n as f64 * alpha.arg())
}

/// Two-mode coherent coefficient
/// `C_{n,m} = e^{-(|α₁|²+|α₂|²)/2} α₁ⁿ α₂ᵐ / √(n! m!)`.
///
/// Factorials and powers are taken in log space with the complex phase kept
/// separately, so large photon numbers do not overflow.
pub fn coherent_coeff(alpha1: C64, alpha2: C64, n: i64, m: i64) -> Result<C64> {
    let n = check_index(n, "n")?;
    let m = check_index(m, "m")?;
    Ok(coherent_single(alpha1, n) * coherent_single(alpha2, m))
}

/// Single-mode coefficients `c(0..=n_max)` by the ratio recurrence
/// `c(n+1) = c(n)·α/√(n+1)`.
pub fn coherent_amplitudes(alpha: C64, n_max: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..=n_max {
        out.push(c);
        c = c * alpha / ((n + 1) as f64).sqrt();
    }
    out
}

/// `⟨χ_θ|n⟩` for a single `n`.
pub fn quadrature_overlap(outcome: QuadratureOutcome, n: i64) -> Result<C64> {
    let n = check_index(n, "n")?;
    Ok(quadrature_overlaps(outcome, n)[n])
}

/// `⟨χ_θ|n⟩` for `n = 0..=n_max`:
/// `(2π)^{-1/4} e^{-inθ} e^{-χ²/4} Hₙ(χ/√2) / √(2ⁿ n!)`.
///
/// The normalised Hermite functions are generated by the three-term
/// recurrence `h_{n+1} = χ h_n/√(n+1) − √(n/(n+1)) h_{n-1}` with the Gaussian
/// prefactor carried as a separate log-scale, so neither the polynomial nor
/// the Gaussian under- or overflows.
pub fn quadrature_overlaps(outcome: QuadratureOutcome, n_max: usize) -> Vec<C64> {
    let chi = outcome.chi;
    let mut log_scale = -0.25 * (2.0 * PI).ln() - 0.25 * chi * chi;
    let mut real = Vec::with_capacity(n_max + 1);
    // Values are stored relative to the running scale and fixed up at the end.
    let mut scales = Vec::with_capacity(n_max + 1);
    let mut prev = 0.0;
    let mut cur = 1.0;
    for n in 0..=n_max {
        real.push(cur);
        scales.push(log_scale);
        let next = chi * cur / ((n + 1) as f64).sqrt() - (n as f64 / (n + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
        let mag = cur.abs().max(prev.abs());
        if mag > 1e150 || (mag < 1e-150 && mag > 0.0) {
            let s = mag.ln();
            prev /= mag;
            cur /= mag;
            log_scale += s;
        }
    }
    real.iter()
        .zip(&scales)
        .enumerate()
        .map(|(n, (h, s))| {
            let value = h * s.exp();
            C64::from_polar(1.0, -(n as f64) * outcome.theta) * value
        })
        .collect()
}

/// `⟨φ|n⟩ = e^{iφn}/√(2π)` for the phase state `|φ⟩ = (2π)^{-1/2} Σₙ e^{-iφn}|n⟩`.
pub fn phase_overlap(outcome: PhaseOutcome, n: i64) -> Result<C64> {
    let n = check_index(n, "n")?;
    Ok(C64::from_polar(1.0 / (2.0 * PI).sqrt(), outcome.phi * n as f64))
}

/// Minimal `n_max` whose Poisson tail `Σ_{n>n_max} e^{-|α|²}|α|^{2n}/n!` is
/// below `tail_tolerance`.
pub fn truncation_for(alpha: C64, tail_tolerance: f64) -> Result<FockTruncation> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return domain("coherent amplitude must be finite");
    }
    if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
        return domain(format!("tail tolerance must lie in (0, 1), got {tail_tolerance}"));
    }
    let tails = poisson_tails(alpha);
    let n_max = tails
        .iter()
        .position(|&t| t < tail_tolerance)
        .ok_or_else(|| DeflectionError::Domain(format!("no cutoff below {} reaches the tolerance", tails.len())))?;
    Ok(FockTruncation::new(n_max, tail_tolerance))
}

/// Poisson mass of `|α⟩` above `n_max`, `Σ_{k>n_max} e^{-|α|²}|α|^{2k}/k!`.
pub fn poisson_tail(alpha: C64, n_max: usize) -> f64 {
    poisson_tails(alpha).get(n_max).copied().unwrap_or(0.0)
}

/// `tails[n] = Σ_{k>n} p_k`, summed from the top down to avoid cancellation.
fn poisson_tails(alpha: C64) -> Vec<f64> {
    let mean = alpha.norm_sqr();
    // Far enough out that the remaining Poisson mass is below 1e-300.
    let top = (mean + 40.0 * mean.sqrt() + 800.0).ceil() as usize;
    let ln_p = |k: usize| -> f64 {
        if mean == 0.0 {
            return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
        }
        -mean + k as f64 * mean.ln() - ln_factorial_fast(k)
    };
    let mut tails = vec![0.0; top + 1];
    let mut acc = 0.0;
    for n in (0..top).rev() {
        acc += ln_p(n + 1).exp();
        tails[n] = acc;
    }
    tails
}

fn ln_factorial_fast(k: usize) -> f64 {
    // Stirling series; exact summation for small k.
    if k < 32 {
        return ln_factorial(k);
    }
    let x = (k + 1) as f64;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}
