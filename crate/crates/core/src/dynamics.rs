//! Joint atom–field amplitudes `Φ⁽ⁱ⁾ₙ,ₘ(x, y)` after the cavity transit.
//!
//! The atom's transverse position is frozen during the interaction, so at
//! every point `(x, y)` the evolution is a fixed-point problem in the space
//! spanned by `|i⟩|n⟩₁|m⟩₂`. In the Raman-resonant case the effective
//! Hamiltonian only couples `|1,n,m⟩ ↔ |2,n−1,m+1⟩`; each such pair carries
//! a rank-one 2×2 block whose propagator is
//! `1 + (e^{−iτΩ/Δ} − 1)·vvᵀ/Ω`, which is what [`InteractionModel`] evaluates.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, DeflectionError, Result};
use crate::fockbasis::{CoefficientTable, FockTruncation, TwoModeCoherent};
use crate::grid::SpatialGrid;
use crate::par::for_each_row;

/// Atomic lower-level superposition `a|1⟩ + b|2⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSuperposition {
    pub a: C64,
    pub b: C64,
}

impl AtomSuperposition {
    pub fn new(a: C64, b: C64) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return domain(format!("|a|² + |b|² must equal 1, got {norm}"));
        }
        Ok(Self { a, b })
    }

    /// Rescales `(a, b)` to unit norm.
    pub fn normalized(a: C64, b: C64) -> Result<Self> {
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return domain("atomic state must be non-zero and finite");
        }
        Self::new(a / norm, b / norm)
    }

    pub fn real(a: f64, b: f64) -> Result<Self> {
        Self::normalized(C64::new(a, 0.0), C64::new(b, 0.0))
    }
}

/// Peak couplings and wave numbers of the two standing waves,
/// `g₁(x) = g01·sin(k1·x)` and `g₂(y) = g02·sin(k2·y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingField {
    pub g01: f64,
    pub g02: f64,
    pub k1: f64,
    pub k2: f64,
}

impl CouplingField {
    pub fn new(g01: f64, g02: f64, k1: f64, k2: f64) -> Result<Self> {
        let c = Self { g01, g02, k1, k2 };
        c.validate()?;
        Ok(c)
    }

    /// Equal couplings, `k1 = k2 = 2π` (wavelength λ₁ = 1).
    pub fn symmetric(g0: f64) -> Result<Self> {
        Self::new(g0, g0, 2.0 * PI, 2.0 * PI)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.g01, self.g02].iter().all(|g| g.is_finite() && *g >= 0.0)
            && [self.k1, self.k2].iter().all(|k| k.is_finite() && *k > 0.0);
        if !ok {
            return domain("couplings must be finite and non-negative, wave numbers positive");
        }
        Ok(())
    }

    #[inline]
    pub fn g1(&self, x: f64) -> f64 {
        self.g01 * (self.k1 * x).sin()
    }

    #[inline]
    pub fn g2(&self, y: f64) -> f64 {
        self.g02 * (self.k2 * y).sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    RamanResonant,
    OffResonant,
}

/// Detunings and interaction time. `delta` is used in the Raman-resonant
/// regime, `delta1`/`delta2` in the off-resonant one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionParams {
    pub regime: Regime,
    pub delta: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub tau: f64,
}

impl InteractionParams {
    pub fn raman(delta: f64, tau: f64) -> Result<Self> {
        let p = Self { regime: Regime::RamanResonant, delta, delta1: delta, delta2: delta, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn off_resonant(delta1: f64, delta2: f64, tau: f64) -> Result<Self> {
        let p = Self { regime: Regime::OffResonant, delta: f64::NAN, delta1, delta2, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return domain("interaction time must be finite and non-negative");
        }
        let nonzero = |d: f64| d.is_finite() && d != 0.0;
        match self.regime {
            Regime::RamanResonant if !nonzero(self.delta) => domain("Raman-resonant regime needs Δ ≠ 0"),
            Regime::OffResonant if !(nonzero(self.delta1) && nonzero(self.delta2)) => {
                domain("off-resonant regime needs Δ₁ ≠ 0 and Δ₂ ≠ 0")
            }
            _ => Ok(()),
        }
    }

    /// Detunings seen by the `|1⟩` and `|2⟩` channels.
    pub fn detunings(&self) -> (f64, f64) {
        match self.regime {
            Regime::RamanResonant => (self.delta, self.delta),
            Regime::OffResonant => (self.delta1, self.delta2),
        }
    }

    /// Peak interaction phases `η₁ = g01²τ/Δ₁`, `η₂ = g02²τ/Δ₂`.
    pub fn phases(&self, coupling: &CouplingField) -> (f64, f64) {
        let (d1, d2) = self.detunings();
        (coupling.g01.powi(2) * self.tau / d1, coupling.g02.powi(2) * self.tau / d2)
    }
}

/// Gaussian transverse profile with `|f|²` normalised to unit mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianBeam {
    pub sigma_x: f64,
    pub sigma_y: f64,
    #[serde(default)]
    pub center_x: f64,
    #[serde(default)]
    pub center_y: f64,
}

impl GaussianBeam {
    pub fn new(sigma_x: f64, sigma_y: f64, center_x: f64, center_y: f64) -> Result<Self> {
        let b = Self { sigma_x, sigma_y, center_x, center_y };
        b.validate()?;
        Ok(b)
    }

    /// Centred on the common node `x = y = 0`.
    pub fn centered(sigma_x: f64, sigma_y: f64) -> Result<Self> {
        Self::new(sigma_x, sigma_y, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.sigma_x > 0.0
            && self.sigma_y > 0.0
            && self.sigma_x.is_finite()
            && self.sigma_y.is_finite()
            && self.center_x.is_finite()
            && self.center_y.is_finite();
        if !ok {
            return domain("beam widths must be positive and finite");
        }
        Ok(())
    }

    /// `|f(x, y)|²`.
    pub fn density(&self, x: f64, y: f64) -> f64 {
        let u = (x - self.center_x) / self.sigma_x;
        let v = (y - self.center_y) / self.sigma_y;
        (-0.5 * (u * u + v * v)).exp() / (2.0 * PI * self.sigma_x * self.sigma_y)
    }

    /// Real, non-negative amplitude `f(x, y)`.
    pub fn amplitude(&self, x: f64, y: f64) -> f64 {
        self.density(x, y).sqrt()
    }

    /// Grid over `±half_widths` standard deviations around the centre.
    pub fn grid(&self, n: usize, half_widths: f64) -> Result<SpatialGrid> {
        let hx = half_widths * self.sigma_x;
        let hy = half_widths * self.sigma_y;
        SpatialGrid::new(
            n,
            n,
            (self.center_x - hx, self.center_x + hx),
            (self.center_y - hy, self.center_y + hy),
        )
    }
}

/// Anything that can produce the full amplitude vector `Φ⁽ⁱ⁾ₙ,ₘ` at a grid node.
///
/// Components are laid out as `(i·(n_max+1) + n)·(m_max+1) + m`, channel
/// `i = 0` for `|1⟩` and `i = 1` for `|2⟩`.
pub trait AmplitudeSource: Sync {
    fn grid(&self) -> &SpatialGrid;

    fn n_max(&self) -> usize;

    fn m_max(&self) -> usize;

    fn components(&self) -> usize {
        2 * (self.n_max() + 1) * (self.m_max() + 1)
    }

    fn fill_point(&self, ix: usize, iy: usize, out: &mut [C64]);
}

#[inline]
pub fn component_index(n_dim: usize, m_dim: usize, channel: usize, n: usize, m: usize) -> usize {
    (channel * n_dim + n) * m_dim + m
}

/// Dense amplitudes stored point-major: node `(ix, iy)` owns a contiguous
/// block of [`AmplitudeSource::components`] values.
#[derive(Debug, Clone)]
pub struct AmplitudeField {
    pub grid: SpatialGrid,
    pub n_max: usize,
    pub m_max: usize,
    pub data: Vec<C64>,
}

impl AmplitudeField {
    pub fn zeros(grid: SpatialGrid, n_max: usize, m_max: usize) -> Self {
        let k = 2 * (n_max + 1) * (m_max + 1);
        Self { grid, n_max, m_max, data: vec![C64::new(0.0, 0.0); k * grid.len()] }
    }

    /// Samples any amplitude source into memory.
    pub fn from_source<S: AmplitudeSource + ?Sized>(src: &S) -> Self {
        let grid = *src.grid();
        let mut field = Self::zeros(grid, src.n_max(), src.m_max());
        let k = field.components();
        for_each_row(&mut field.data, k * grid.nx, |iy, row| {
            for ix in 0..grid.nx {
                src.fill_point(ix, iy, &mut row[ix * k..(ix + 1) * k]);
            }
        });
        field
    }

    pub fn components(&self) -> usize {
        2 * (self.n_max + 1) * (self.m_max + 1)
    }

    pub fn point(&self, ix: usize, iy: usize) -> &[C64] {
        let k = self.components();
        let p = self.grid.index(ix, iy);
        &self.data[p * k..(p + 1) * k]
    }

    pub fn get(&self, channel: usize, n: usize, m: usize, ix: usize, iy: usize) -> C64 {
        self.point(ix, iy)[component_index(self.n_max + 1, self.m_max + 1, channel, n, m)]
    }

    /// One component `Φ⁽ⁱ⁾ₙ,ₘ` over the whole grid, row-major.
    pub fn component(&self, channel: usize, n: usize, m: usize) -> Vec<C64> {
        let k = self.components();
        let c = component_index(self.n_max + 1, self.m_max + 1, channel, n, m);
        (0..self.grid.len()).map(|p| self.data[p * k + c]).collect()
    }

    /// `Σ_{i,n,m} |Φ⁽ⁱ⁾ₙ,ₘ|²` at every node, row-major.
    pub fn local_norms(&self) -> Vec<f64> {
        let k = self.components();
        self.data.chunks(k).map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect()
    }

    /// Integrated probability `∫∫ Σ|Φ|²` (trapezoidal).
    pub fn total_norm(&self) -> f64 {
        self.grid.integrate(&self.local_norms())
    }
}

impl AmplitudeSource for AmplitudeField {
    fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    fn n_max(&self) -> usize {
        self.n_max
    }

    fn m_max(&self) -> usize {
        self.m_max
    }

    fn fill_point(&self, ix: usize, iy: usize, out: &mut [C64]) {
        out.copy_from_slice(self.point(ix, iy));
    }
}

/// `(e^{−iφ} − 1)/Ω` with `φ = τΩ/Δ`, tending to `−iτ/Δ` as `Ω → 0`.
#[inline]
fn transfer_factor(omega: f64, tau_over_delta: f64) -> C64 {
    if omega.abs() < 1e-12 {
        return C64::new(0.0, -tau_over_delta);
    }
    let phi = tau_over_delta * omega;
    let half = (0.5 * phi).sin();
    C64::new(-2.0 * half * half, -phi.sin()) / omega
}

/// Closed-form interaction model evaluated lazily on a grid.
#[derive(Debug, Clone)]
pub struct InteractionModel {
    pub atom: AtomSuperposition,
    pub field: TwoModeCoherent,
    pub coupling: CouplingField,
    pub params: InteractionParams,
    pub beam: GaussianBeam,
    pub grid: SpatialGrid,
    pub trunc: FockTruncation,
    coeffs: CoefficientTable,
}

impl InteractionModel {
    pub fn new(
        atom: AtomSuperposition,
        field: TwoModeCoherent,
        coupling: CouplingField,
        params: InteractionParams,
        beam: GaussianBeam,
        grid: SpatialGrid,
        trunc: FockTruncation,
    ) -> Result<Self> {
        coupling.validate()?;
        params.validate()?;
        beam.validate()?;
        grid.validate()?;
        // Raman blocks reach one photon beyond the cutoff in either mode.
        let coeffs = field.coefficient_table(trunc.n_max, 1);
        Ok(Self { atom, field, coupling, params, beam, grid, trunc, coeffs })
    }

    /// Internal-and-field amplitudes at `(x, y)` without the spatial envelope `f`.
    pub fn fock_amplitudes_at(&self, x: f64, y: f64, out: &mut [C64]) {
        let g1 = self.coupling.g1(x);
        let g2 = self.coupling.g2(y);
        match self.params.regime {
            Regime::RamanResonant => self.raman_at(g1, g2, out),
            Regime::OffResonant => self.off_resonant_at(g1, g2, out),
        }
    }

    fn raman_at(&self, g1: f64, g2: f64, out: &mut [C64]) {
        let dim = self.trunc.dim();
        let (a, b) = (self.atom.a, self.atom.b);
        let t_over_d = self.params.tau / self.params.delta;
        let (g11, g22, g12) = (g1 * g1, g2 * g2, g1 * g2);
        let c = &self.coeffs;
        for n in 0..dim {
            for m in 0..dim {
                let (ni, mi) = (n as isize, m as isize);
                let (nf, mf) = (n as f64, m as f64);
                let c_nm = c.get(ni, mi);

                let omega1 = g11 * nf + g22 * (mf + 1.0);
                let drive1 = g11 * nf * a * c_nm + g12 * (nf * (mf + 1.0)).sqrt() * b * c.get(ni - 1, mi + 1);
                out[component_index(dim, dim, 0, n, m)] = a * c_nm + drive1 * transfer_factor(omega1, t_over_d);

                let omega2 = g11 * (nf + 1.0) + g22 * mf;
                let drive2 = g12 * ((nf + 1.0) * mf).sqrt() * a * c.get(ni + 1, mi - 1) + g22 * mf * b * c_nm;
                out[component_index(dim, dim, 1, n, m)] = b * c_nm + drive2 * transfer_factor(omega2, t_over_d);
            }
        }
    }

    fn off_resonant_at(&self, g1: f64, g2: f64, out: &mut [C64]) {
        let dim = self.trunc.dim();
        let phase1 = g1 * g1 * self.params.tau / self.params.delta1;
        let phase2 = g2 * g2 * self.params.tau / self.params.delta2;
        let c = &self.coeffs;
        for n in 0..dim {
            let rot1 = C64::from_polar(1.0, -phase1 * n as f64);
            for m in 0..dim {
                let c_nm = c.get(n as isize, m as isize);
                let rot2 = C64::from_polar(1.0, -phase2 * m as f64);
                out[component_index(dim, dim, 0, n, m)] = self.atom.a * c_nm * rot1;
                out[component_index(dim, dim, 1, n, m)] = self.atom.b * c_nm * rot2;
            }
        }
    }

    /// Full amplitudes including the envelope `f(x, y)`.
    pub fn amplitudes_at(&self, x: f64, y: f64, out: &mut [C64]) {
        self.fock_amplitudes_at(x, y, out);
        let f = self.beam.amplitude(x, y);
        out.iter_mut().for_each(|z| *z *= f);
    }

    pub fn materialize(&self) -> AmplitudeField {
        AmplitudeField::from_source(self)
    }
}

impl AmplitudeSource for InteractionModel {
    fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    fn n_max(&self) -> usize {
        self.trunc.n_max
    }

    fn m_max(&self) -> usize {
        self.trunc.n_max
    }

    fn fill_point(&self, ix: usize, iy: usize, out: &mut [C64]) {
        self.amplitudes_at(self.grid.x(ix), self.grid.y(iy), out);
    }
}

/// Position-dependent Rabi frequency `Ωₙ,ₘ = g₁²n + g₂²m`.
pub fn rabi(n: usize, m: usize, g1: f64, g2: f64) -> f64 {
    g1 * g1 * n as f64 + g2 * g2 * m as f64
}

/// Raman-resonant amplitudes on `grid`.
pub fn amplitudes_raman(
    atom: AtomSuperposition,
    field: TwoModeCoherent,
    coupling: CouplingField,
    params: InteractionParams,
    beam: GaussianBeam,
    grid: SpatialGrid,
    trunc: FockTruncation,
) -> Result<AmplitudeField> {
    if params.regime != Regime::RamanResonant {
        return domain("amplitudes_raman needs the Raman-resonant regime");
    }
    Ok(InteractionModel::new(atom, field, coupling, params, beam, grid, trunc)?.materialize())
}

/// Off-resonant amplitudes on `grid`: each channel only picks up a phase.
pub fn amplitudes_offresonant(
    atom: AtomSuperposition,
    field: TwoModeCoherent,
    coupling: CouplingField,
    params: InteractionParams,
    beam: GaussianBeam,
    grid: SpatialGrid,
    trunc: FockTruncation,
) -> Result<AmplitudeField> {
    if params.regime != Regime::OffResonant {
        return domain("amplitudes_offresonant needs the off-resonant regime");
    }
    Ok(InteractionModel::new(atom, field, coupling, params, beam, grid, trunc)?.materialize())
}

/// Reference solution: integrates `i dψ/dt = H ψ` at the fixed point `(x, y)`
/// with classical RK4 in the truncated number basis.
///
/// The integration basis extends one photon past `trunc.n_max` in each mode
/// so every retained state keeps its Raman partner; only `n, m ≤ n_max` are
/// returned, in [`component_index`] order and without the envelope `f`.
/// The step count doubles until two successive results differ by less than
/// `1e-10`.
pub fn integrate_schrodinger(
    atom: AtomSuperposition,
    field: TwoModeCoherent,
    coupling: CouplingField,
    params: InteractionParams,
    trunc: FockTruncation,
    x: f64,
    y: f64,
    steps: usize,
) -> Result<Vec<C64>> {
    params.validate()?;
    let system = TruncatedSystem::new(&atom, &field, &coupling, &params, trunc.n_max + 1, x, y);
    let mut steps = steps.max(1);
    let mut prev = system.evolve(params.tau, steps);
    for _ in 0..14 {
        steps *= 2;
        let next = system.evolve(params.tau, steps);
        let diff = prev.iter().zip(&next).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        if diff < 1e-10 {
            return Ok(system.restrict(&next, trunc.n_max));
        }
        prev = next;
    }
    Err(DeflectionError::Oracle(format!("RK4 did not converge within {steps} steps")))
}

struct TruncatedSystem {
    dim: usize,
    diag: Vec<f64>,
    // (from, to, weight) entries of the off-diagonal part, both directions.
    hops: Vec<(usize, usize, f64)>,
    initial: Vec<C64>,
}

impl TruncatedSystem {
    fn new(
        atom: &AtomSuperposition,
        field: &TwoModeCoherent,
        coupling: &CouplingField,
        params: &InteractionParams,
        dim_max: usize,
        x: f64,
        y: f64,
    ) -> Self {
        let dim = dim_max + 1;
        let (g1, g2) = (coupling.g1(x), coupling.g2(y));
        let (d1, d2) = params.detunings();
        let idx = |i: usize, n: usize, m: usize| component_index(dim, dim, i, n, m);
        let size = 2 * dim * dim;
        let mut diag = vec![0.0; size];
        let mut hops = Vec::new();
        let c1 = crate::fockbasis::coherent_amplitudes(field.alpha1, dim_max);
        let c2 = crate::fockbasis::coherent_amplitudes(field.alpha2, dim_max);
        let mut initial = vec![C64::new(0.0, 0.0); size];
        for n in 0..dim {
            for m in 0..dim {
                // (g₁²/Δ) a₁†a₁ σ₁₁ + (g₂²/Δ) a₂†a₂ σ₂₂
                diag[idx(0, n, m)] = g1 * g1 * n as f64 / d1;
                diag[idx(1, n, m)] = g2 * g2 * m as f64 / d2;
                initial[idx(0, n, m)] = atom.a * c1[n] * c2[m];
                initial[idx(1, n, m)] = atom.b * c1[n] * c2[m];
                // (g₁g₂/Δ) a₁a₂† σ₂₁ : |1,n,m⟩ → √n √(m+1) |2,n−1,m+1⟩
                if params.regime == Regime::RamanResonant && n >= 1 && m + 1 < dim {
                    let w = g1 * g2 * (n as f64 * (m + 1) as f64).sqrt() / params.delta;
                    hops.push((idx(0, n, m), idx(1, n - 1, m + 1), w));
                    hops.push((idx(1, n - 1, m + 1), idx(0, n, m), w));
                }
            }
        }
        Self { dim, diag, hops, initial }
    }

    fn apply(&self, psi: &[C64], out: &mut [C64]) {
        // out = −i H ψ
        for ((o, p), d) in out.iter_mut().zip(psi).zip(&self.diag) {
            *o = C64::new(p.im * d, -p.re * d);
        }
        for &(from, to, w) in &self.hops {
            let p = psi[from];
            out[to] += C64::new(p.im * w, -p.re * w);
        }
    }

    fn evolve(&self, tau: f64, steps: usize) -> Vec<C64> {
        let h = tau / steps as f64;
        let n = self.initial.len();
        let mut psi = self.initial.clone();
        let zero = C64::new(0.0, 0.0);
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
            (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
        for _ in 0..steps {
            self.apply(&psi, &mut k1);
            for j in 0..n {
                tmp[j] = psi[j] + k1[j] * (0.5 * h);
            }
            self.apply(&tmp, &mut k2);
            for j in 0..n {
                tmp[j] = psi[j] + k2[j] * (0.5 * h);
            }
            self.apply(&tmp, &mut k3);
            for j in 0..n {
                tmp[j] = psi[j] + k3[j] * h;
            }
            self.apply(&tmp, &mut k4);
            for j in 0..n {
                psi[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0);
            }
        }
        psi
    }

    fn restrict(&self, psi: &[C64], n_max: usize) -> Vec<C64> {
        let keep = n_max + 1;
        let mut out = vec![C64::new(0.0, 0.0); 2 * keep * keep];
        for i in 0..2 {
            for n in 0..keep {
                for m in 0..keep {
                    out[component_index(keep, keep, i, n, m)] = psi[component_index(self.dim, self.dim, i, n, m)];
                }
            }
        }
        out
    }
}
