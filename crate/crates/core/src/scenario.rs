//! Scenario configuration, the built-in presets and the in-memory pipeline
//! shared by the command-line tool and the browser demo.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{AtomSuperposition, CouplingField, GaussianBeam, InteractionModel, InteractionParams, Regime};
use crate::error::{DeflectionError, Result};
use crate::fockbasis::{poisson_tail, truncation_for, FockTruncation, PhaseOutcome, QuadratureOutcome, TwoModeCoherent};
use crate::grid::SpatialGrid;
use crate::measurement::{condition, momentum_of, DistributionGrid, Reference};
use crate::propagation::{propagate_conditioned, PropagationParams};

/// Minimum grid half-extent, in beam standard deviations.
pub const MIN_GRID_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    /// `[re, im]` of the `|1⟩` weight.
    pub a: [f64; 2],
    /// `[re, im]` of the `|2⟩` weight.
    pub b: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub alpha1: [f64; 2],
    pub alpha2: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionConfig {
    pub regime: Regime,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta2: Option<f64>,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasurementConfig {
    Quadrature { theta1: f64, chi1: f64, theta2: f64, chi2: f64 },
    Phase { phi1: f64, phi2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Position,
    Momentum,
    FarField,
}

impl OutputKind {
    pub fn file_stem(&self) -> &'static str {
        match self {
            OutputKind::Position => "position",
            OutputKind::Momentum => "momentum",
            OutputKind::FarField => "far_field",
        }
    }
}

/// Complete description of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub outputs: Vec<OutputKind>,
    pub atom: AtomConfig,
    pub field: FieldConfig,
    pub coupling: CouplingField,
    pub interaction: InteractionConfig,
    pub beam: GaussianBeam,
    pub grid: SpatialGrid,
    pub measurement: MeasurementConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub propagation: Option<PropagationParams>,
    pub truncation: FockTruncation,
}

fn c(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

fn cfg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(DeflectionError::Config(msg.into()))
}

/// Validated, resolved scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub model: InteractionModel,
    pub reference: Reference,
    pub propagation: Option<PropagationParams>,
}

/// Distributions produced by [`Scenario::run`], keyed by output kind.
#[derive(Debug, Clone, Default)]
pub struct ScenarioOutputs {
    pub position: Option<DistributionGrid>,
    pub momentum: Option<DistributionGrid>,
    pub far_field: Option<DistributionGrid>,
}

impl ScenarioOutputs {
    pub fn get(&self, kind: OutputKind) -> Option<&DistributionGrid> {
        match kind {
            OutputKind::Position => self.position.as_ref(),
            OutputKind::Momentum => self.momentum.as_ref(),
            OutputKind::FarField => self.far_field.as_ref(),
        }
    }
}

impl ScenarioConfig {
    /// Checks the configuration and builds the interaction model.
    ///
    /// The atomic weights are rescaled to unit norm; every other parameter
    /// is used as given.
    pub fn resolve(&self) -> Result<Scenario> {
        let wrap = |e: DeflectionError| match e {
            DeflectionError::Domain(m) => DeflectionError::Config(m),
            other => other,
        };
        if self.outputs.is_empty() {
            return cfg_err("at least one output must be requested");
        }
        let atom = AtomSuperposition::normalized(c(self.atom.a), c(self.atom.b)).map_err(wrap)?;
        let field = TwoModeCoherent::new(c(self.field.alpha1), c(self.field.alpha2)).map_err(wrap)?;
        self.coupling.validate().map_err(wrap)?;
        let i = &self.interaction;
        let params = match i.regime {
            Regime::RamanResonant => {
                if i.delta1.is_some() || i.delta2.is_some() {
                    return cfg_err("raman_resonant takes `delta`, not `delta1`/`delta2`");
                }
                let delta = i.delta.ok_or_else(|| DeflectionError::Config("raman_resonant needs `delta`".into()))?;
                InteractionParams::raman(delta, i.tau)
            }
            Regime::OffResonant => {
                if i.delta.is_some() {
                    return cfg_err("off_resonant takes `delta1`/`delta2`, not `delta`");
                }
                match (i.delta1, i.delta2) {
                    (Some(d1), Some(d2)) => InteractionParams::off_resonant(d1, d2, i.tau),
                    _ => return cfg_err("off_resonant needs `delta1` and `delta2`"),
                }
            }
        }
        .map_err(wrap)?;
        self.beam.validate().map_err(wrap)?;
        self.grid.validate().map_err(wrap)?;
        let b = &self.beam;
        let g = &self.grid;
        let covers = g.x_min <= b.center_x - MIN_GRID_SIGMAS * b.sigma_x
            && g.x_max >= b.center_x + MIN_GRID_SIGMAS * b.sigma_x
            && g.y_min <= b.center_y - MIN_GRID_SIGMAS * b.sigma_y
            && g.y_max >= b.center_y + MIN_GRID_SIGMAS * b.sigma_y;
        if !covers {
            return cfg_err(format!("grid must cover the beam to ±{MIN_GRID_SIGMAS} standard deviations"));
        }
        let t = &self.truncation;
        let need = truncation_for(field.alpha1, t.tail_tolerance)
            .and_then(|a| truncation_for(field.alpha2, t.tail_tolerance).map(|b| a.n_max.max(b.n_max)))
            .map_err(wrap)?;
        if t.n_max < need {
            return cfg_err(format!(
                "n_max = {} leaves a Poisson tail above {:e}; need at least {need}",
                t.n_max, t.tail_tolerance
            ));
        }
        let reference = match self.measurement {
            MeasurementConfig::Quadrature { theta1, chi1, theta2, chi2 } => Reference::Quadrature(
                QuadratureOutcome::new(theta1, chi1).map_err(wrap)?,
                QuadratureOutcome::new(theta2, chi2).map_err(wrap)?,
            ),
            MeasurementConfig::Phase { phi1, phi2 } => {
                Reference::Phase(PhaseOutcome::new(phi1).map_err(wrap)?, PhaseOutcome::new(phi2).map_err(wrap)?)
            }
        };
        let wants_far = self.outputs.contains(&OutputKind::FarField);
        let propagation = match self.propagation {
            Some(p) => Some(PropagationParams::new(p.fresnel_scale).map_err(wrap)?),
            None if wants_far => return cfg_err("far_field output needs a [propagation] section"),
            None => None,
        };
        let model = InteractionModel::new(atom, field, self.coupling, params, *b, *g, *t).map_err(wrap)?;
        Ok(Scenario { config: self.clone(), model, reference, propagation })
    }

    /// Square `n × n` grid with the same extent.
    pub fn with_grid_points(mut self, n: usize) -> Self {
        self.grid.nx = n;
        self.grid.ny = n;
        self
    }

    /// Sets the Fock cutoff and relaxes the tail tolerance to what that
    /// cutoff actually achieves. The measurement guard still rejects a
    /// cutoff that is too small for the requested outcome.
    pub fn with_n_max(mut self, n_max: usize) -> Self {
        let tail = [self.field.alpha1, self.field.alpha2]
            .iter()
            .map(|a| poisson_tail(c(*a), n_max))
            .fold(0.0, f64::max);
        self.truncation.n_max = n_max;
        self.truncation.tail_tolerance = self.truncation.tail_tolerance.max((2.0 * tail).min(0.5)).max(f64::MIN_POSITIVE);
        self
    }
}

impl Scenario {
    pub fn run(&self) -> Result<ScenarioOutputs> {
        let cond = condition(&self.model, &self.reference)?;
        let near = cond.density();
        near.check_edges("widen the position grid")?;
        let mut out = ScenarioOutputs::default();
        for kind in &self.config.outputs {
            match kind {
                OutputKind::Position => out.position = Some(near.clone()),
                OutputKind::Momentum => out.momentum = Some(momentum_of(&cond)?),
                OutputKind::FarField => {
                    let params = self.propagation.expect("validated in resolve");
                    out.far_field = Some(propagate_conditioned(&cond, params)?.density());
                }
            }
        }
        Ok(out)
    }
}

/// Grid points per axis used by the presets.
pub const PRESET_GRID_POINTS: usize = 201;
/// Preset grid half-extent in beam standard deviations.
pub const PRESET_GRID_SIGMAS: f64 = 6.0;
/// Interaction phase `η = g0²τ/Δ` used by the presets.
pub const PRESET_ETA: f64 = 1.0;
/// Free-flight scale `ℏt/M` (units of λ₁²) of the far-field preset.
pub const PRESET_FRESNEL_SCALE: f64 = 1e-3;

pub const PRESET_NAMES: [&str; 14] = [
    "fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig2f", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b",
    "fig6a", "fig6b",
];

struct PresetDef {
    description: &'static str,
    a: f64,
    b: f64,
    sigma: f64,
    regime: Regime,
    phase_measurement: bool,
    outputs: &'static [OutputKind],
}

fn preset_def(name: &str) -> Option<PresetDef> {
    use OutputKind::*;
    use Regime::*;
    let quad = |description, a, b, outputs| PresetDef {
        description,
        a,
        b,
        sigma: 0.2,
        regime: RamanResonant,
        phase_measurement: false,
        outputs,
    };
    let phase = |description, a, b, regime| PresetDef {
        description,
        a,
        b,
        sigma: 0.3,
        regime,
        phase_measurement: true,
        outputs: &[Position],
    };
    Some(match name {
        "fig2a" => quad("quadrature-conditioned position, a=-1, b=0", -1.0, 0.0, &[Position]),
        "fig2b" => quad("quadrature-conditioned position, a=-1/sqrt2, b=1/sqrt2", -FRAC_1_SQRT_2, FRAC_1_SQRT_2, &[Position]),
        "fig2c" => quad("quadrature-conditioned position, a=-0.2, b=0.98", -0.2, 0.98, &[Position]),
        "fig2d" => quad("quadrature-conditioned position, a=0.2, b=0.98", 0.2, 0.98, &[Position]),
        "fig2e" => quad("quadrature-conditioned position, a=1/sqrt2, b=1/sqrt2", FRAC_1_SQRT_2, FRAC_1_SQRT_2, &[Position]),
        "fig2f" => quad("quadrature-conditioned position, a=1, b=0", 1.0, 0.0, &[Position]),
        "fig3a" => quad("position at the cavity exit, a=1, b=0", 1.0, 0.0, &[Position]),
        "fig3b" => quad("position after free flight to the far field, a=1, b=0", 1.0, 0.0, &[Position, FarField]),
        "fig4a" => quad("quadrature-conditioned momentum, a=-1/sqrt2, b=1/sqrt2", -FRAC_1_SQRT_2, FRAC_1_SQRT_2, &[Momentum]),
        "fig4b" => quad("quadrature-conditioned momentum, a=1/sqrt2, b=1/sqrt2", FRAC_1_SQRT_2, FRAC_1_SQRT_2, &[Momentum]),
        "fig5a" => phase("off-resonant, phase-conditioned position, a=1, b=0", 1.0, 0.0, OffResonant),
        "fig5b" => phase("off-resonant, phase-conditioned position, a=b=1/sqrt2", FRAC_1_SQRT_2, FRAC_1_SQRT_2, OffResonant),
        "fig6a" => phase("Raman-resonant, phase-conditioned position, a=1, b=0", 1.0, 0.0, RamanResonant),
        "fig6b" => phase("Raman-resonant, phase-conditioned position, a=b=1/sqrt2", FRAC_1_SQRT_2, FRAC_1_SQRT_2, RamanResonant),
        _ => return None,
    })
}

/// Built-in scenario for one preset name.
pub fn preset(name: &str) -> Option<ScenarioConfig> {
    let def = preset_def(name)?;
    let half = PRESET_GRID_SIGMAS * def.sigma;
    let interaction = match def.regime {
        Regime::RamanResonant => InteractionConfig { regime: def.regime, delta: Some(1.0), delta1: None, delta2: None, tau: PRESET_ETA },
        // Δ₁ ≠ Δ₂: the second channel sees a weaker phase.
        Regime::OffResonant => InteractionConfig {
            regime: def.regime,
            delta: None,
            delta1: Some(1.0),
            delta2: Some(1.25),
            tau: PRESET_ETA,
        },
    };
    let measurement = if def.phase_measurement {
        MeasurementConfig::Phase { phi1: 0.0, phi2: 0.0 }
    } else {
        MeasurementConfig::Quadrature { theta1: 0.0, chi1: 4.0, theta2: 0.0, chi2: 4.0 }
    };
    let propagation = def
        .outputs
        .contains(&OutputKind::FarField)
        .then_some(PropagationParams { fresnel_scale: PRESET_FRESNEL_SCALE });
    Some(ScenarioConfig {
        name: Some(name.to_string()),
        description: Some(def.description.to_string()),
        outputs: def.outputs.to_vec(),
        atom: AtomConfig { a: [def.a, 0.0], b: [def.b, 0.0] },
        field: FieldConfig { alpha1: [2.0, 0.0], alpha2: [2.0, 0.0] },
        coupling: CouplingField { g01: 1.0, g02: 1.0, k1: 2.0 * PI, k2: 2.0 * PI },
        interaction,
        beam: GaussianBeam { sigma_x: def.sigma, sigma_y: def.sigma, center_x: 0.0, center_y: 0.0 },
        grid: SpatialGrid {
            nx: PRESET_GRID_POINTS,
            ny: PRESET_GRID_POINTS,
            x_min: -half,
            x_max: half,
            y_min: -half,
            y_max: half,
        },
        measurement,
        propagation,
        truncation: FockTruncation { n_max: 29, tail_tolerance: 1e-16 },
    })
}

/// One line per preset with its main parameters.
pub fn list_presets() -> String {
    let mut out = String::new();
    for name in PRESET_NAMES {
        let cfg = preset(name).expect("every listed preset exists");
        let regime = match cfg.interaction.regime {
            Regime::RamanResonant => "raman",
            Regime::OffResonant => "off-resonant",
        };
        let meas = match cfg.measurement {
            MeasurementConfig::Quadrature { theta1, chi1, .. } => format!("quadrature θ={theta1} χ={chi1}"),
            MeasurementConfig::Phase { phi1, .. } => format!("phase φ={phi1}"),
        };
        let outputs: Vec<&str> = cfg.outputs.iter().map(|o| o.file_stem()).collect();
        let _ = writeln!(
            out,
            "{name:<6} a={:+.4} b={:+.4} α={} σ={}λ {regime:<12} {meas:<22} outputs={}  # {}",
            cfg.atom.a[0],
            cfg.atom.b[0],
            cfg.field.alpha1[0],
            cfg.beam.sigma_x,
            outputs.join(","),
            cfg.description.as_deref().unwrap_or(""),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourteen_presets_all_resolve() {
        assert_eq!(PRESET_NAMES.len(), 14);
        assert_eq!(list_presets().lines().count(), 14);
        for name in PRESET_NAMES {
            preset(name).unwrap().resolve().unwrap();
        }
        assert!(preset("fig7a").is_none());
    }

    #[test]
    fn presets_carry_their_parameters() {
        for name in ["fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig2f"] {
            let p = preset(name).unwrap();
            assert_eq!(p.measurement, MeasurementConfig::Quadrature { theta1: 0.0, chi1: 4.0, theta2: 0.0, chi2: 4.0 });
            assert_eq!(p.field.alpha1, [2.0, 0.0]);
            assert_eq!(p.field.alpha2, [2.0, 0.0]);
            assert_eq!((p.beam.sigma_x, p.beam.sigma_y), (0.2, 0.2));
            assert_eq!(p.interaction.regime, Regime::RamanResonant);
        }
        let ab = |n: &str| {
            let p = preset(n).unwrap();
            (p.atom.a[0], p.atom.b[0])
        };
        assert_eq!(ab("fig2a"), (-1.0, 0.0));
        assert_eq!(ab("fig2b"), (-FRAC_1_SQRT_2, FRAC_1_SQRT_2));
        assert_eq!(ab("fig2c"), (-0.2, 0.98));
        assert_eq!(ab("fig2d"), (0.2, 0.98));
        assert_eq!(ab("fig2e"), (FRAC_1_SQRT_2, FRAC_1_SQRT_2));
        assert_eq!(ab("fig2f"), (1.0, 0.0));
        assert_eq!(ab("fig3a"), (1.0, 0.0));
        assert_eq!(ab("fig3b"), (1.0, 0.0));
        assert!(preset("fig3b").unwrap().outputs.contains(&OutputKind::FarField));
        assert_eq!(ab("fig4a"), (-FRAC_1_SQRT_2, FRAC_1_SQRT_2));
        assert_eq!(ab("fig4b"), (FRAC_1_SQRT_2, FRAC_1_SQRT_2));
        for (n, regime) in [("fig5a", Regime::OffResonant), ("fig5b", Regime::OffResonant), ("fig6a", Regime::RamanResonant), ("fig6b", Regime::RamanResonant)] {
            let p = preset(n).unwrap();
            assert_eq!(p.interaction.regime, regime);
            assert_eq!((p.beam.sigma_x, p.beam.sigma_y), (0.3, 0.3));
            assert_eq!(p.measurement, MeasurementConfig::Phase { phi1: 0.0, phi2: 0.0 });
        }
        let p5 = preset("fig5a").unwrap().interaction;
        assert_ne!(p5.delta1, p5.delta2);
        assert_eq!(ab("fig5a"), (1.0, 0.0));
        assert_eq!(ab("fig6b"), (FRAC_1_SQRT_2, FRAC_1_SQRT_2));
    }

    #[test]
    fn validation_catches_bad_configs() {
        let base = preset("fig2f").unwrap();

        let mut c = base.clone();
        c.outputs.push(OutputKind::FarField);
        assert!(matches!(c.resolve(), Err(DeflectionError::Config(_))));

        let mut c = base.clone();
        c.truncation.n_max = 10;
        assert!(matches!(c.resolve(), Err(DeflectionError::Config(_))));

        let mut c = base.clone();
        c.grid.x_max = 0.3;
        assert!(matches!(c.resolve(), Err(DeflectionError::Config(_))));

        let mut c = base.clone();
        c.interaction.delta = Some(0.0);
        assert!(matches!(c.resolve(), Err(DeflectionError::Config(_))));

        let mut c = base.clone();
        c.interaction.delta1 = Some(1.0);
        assert!(matches!(c.resolve(), Err(DeflectionError::Config(_))));

        let mut c = base.clone();
        c.atom.a = [0.0, 0.0];
        c.atom.b = [0.0, 0.0];
        assert!(matches!(c.resolve(), Err(DeflectionError::Config(_))));

        let mut c = base;
        c.outputs.clear();
        assert!(matches!(c.resolve(), Err(DeflectionError::Config(_))));
    }

    #[test]
    fn lowering_n_max_relaxes_the_tolerance() {
        let c = preset("fig2e").unwrap().with_n_max(12);
        assert_eq!(c.truncation.n_max, 12);
        c.resolve().unwrap();
        let c = preset("fig2e").unwrap().with_n_max(40);
        assert_eq!(c.truncation.tail_tolerance, 1e-16);
    }

    #[test]
    fn ratio_weights_are_normalised_on_resolve() {
        let s = preset("fig2c").unwrap().resolve().unwrap();
        let n = s.model.atom.a.norm_sqr() + s.model.atom.b.norm_sqr();
        assert!((n - 1.0).abs() < 1e-14);
        assert!(s.model.atom.a.re < 0.0);
    }
}
