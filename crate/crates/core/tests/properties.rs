//! Invariants of the amplitudes and conditioned distributions under random
//! parameters.

use std::f64::consts::PI;

use deflection::*;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn atom_from(ar: f64, ai: f64, br: f64, bi: f64) -> AtomSuperposition {
    AtomSuperposition::normalized(c(ar, ai), c(br, bi)).unwrap()
}

fn quad(theta: f64, chi: f64) -> QuadratureOutcome {
    QuadratureOutcome::new(theta, chi).unwrap()
}

fn phase(phi: f64) -> PhaseOutcome {
    PhaseOutcome::new(phi).unwrap()
}

/// Largest pointwise gap between `w` and `w` remapped through `map`,
/// relative to the peak.
fn asymmetry(w: &DistributionGrid, map: impl Fn(usize, usize) -> (usize, usize)) -> f64 {
    let peak = w.values.iter().cloned().fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for iy in 0..w.ny() {
        for ix in 0..w.nx() {
            let (jx, jy) = map(ix, iy);
            worst = worst.max((w.at(ix, iy) - w.at(jx, jy)).abs());
        }
    }
    worst / peak
}

fn model(
    atom: AtomSuperposition,
    alpha: (f64, f64),
    coupling: CouplingField,
    params: InteractionParams,
    beam: GaussianBeam,
    grid: SpatialGrid,
) -> InteractionModel {
    let field = TwoModeCoherent::real(alpha.0, alpha.1).unwrap();
    let trunc = field.truncation(1e-20).unwrap();
    InteractionModel::new(atom, field, coupling, params, beam, grid, trunc).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn amplitudes_are_pointwise_unitary(
        ar in -1.0f64..1.0, ai in -1.0f64..1.0, br in -1.0f64..1.0, bi in -1.0f64..1.0,
        a1 in 0.2f64..2.5, a2 in 0.2f64..2.5,
        g1 in 0.2f64..1.5, g2 in 0.2f64..1.5,
        d1 in 0.3f64..2.0, d2 in 0.3f64..2.0, tau in 0.05f64..3.0,
        raman in any::<bool>(),
        sx in 0.1f64..0.4, sy in 0.1f64..0.4,
    ) {
        prop_assume!(ar.hypot(ai).hypot(br.hypot(bi)) > 0.1);
        let params = if raman {
            InteractionParams::raman(d1, tau).unwrap()
        } else {
            InteractionParams::off_resonant(d1, -d2, tau).unwrap()
        };
        let coupling = CouplingField::new(g1, g2, 2.0 * PI, 2.0 * PI).unwrap();
        let beam = GaussianBeam::centered(sx, sy).unwrap();
        let grid = SpatialGrid::square(9, 0.7).unwrap();
        let amps = model(atom_from(ar, ai, br, bi), (a1, a2), coupling, params, beam, grid).materialize();
        for (p, norm) in amps.local_norms().iter().enumerate() {
            let want = beam.density(grid.x(p % 9), grid.y(p / 9));
            prop_assert!((norm - want).abs() <= 1e-8 * want, "{} vs {}", norm, want);
        }
    }

    #[test]
    fn off_resonant_patterns_are_mirror_symmetric(
        ar in -1.0f64..1.0, ai in -1.0f64..1.0, br in -1.0f64..1.0, bi in -1.0f64..1.0,
        d1 in 0.5f64..2.0, d2 in 0.5f64..2.0, tau in 0.1f64..2.0,
        t1 in 0.0f64..6.28, t2 in 0.0f64..6.28, chi1 in -3.0f64..3.0, chi2 in -3.0f64..3.0,
        use_phase in any::<bool>(),
    ) {
        prop_assume!(ar.hypot(ai).hypot(br.hypot(bi)) > 0.1);
        let params = InteractionParams::off_resonant(d1, d2, tau).unwrap();
        let grid = SpatialGrid::square(21, 1.2).unwrap();
        let m = model(atom_from(ar, ai, br, bi), (1.5, 1.2), CouplingField::symmetric(1.0).unwrap(),
            params, GaussianBeam::centered(0.2, 0.2).unwrap(), grid);
        let w = if use_phase {
            position_distribution_phase(&m, phase(t1), phase(t2)).unwrap()
        } else {
            position_distribution_quadrature(&m, quad(t1, chi1), quad(t2, chi2)).unwrap()
        };
        prop_assert!(asymmetry(&w, |ix, iy| (20 - ix, iy)) < 1e-10);
        prop_assert!(asymmetry(&w, |ix, iy| (ix, 20 - iy)) < 1e-10);
    }

    #[test]
    fn raman_patterns_are_point_symmetric(
        ar in -1.0f64..1.0, ai in -1.0f64..1.0, br in -1.0f64..1.0, bi in -1.0f64..1.0,
        delta in 0.5f64..2.0, tau in 0.1f64..2.0, g1 in 0.5f64..1.5, g2 in 0.5f64..1.5,
        t1 in 0.0f64..6.28, t2 in 0.0f64..6.28, chi1 in -3.0f64..3.0, chi2 in -3.0f64..3.0,
        use_phase in any::<bool>(),
    ) {
        prop_assume!(ar.hypot(ai).hypot(br.hypot(bi)) > 0.1);
        let params = InteractionParams::raman(delta, tau).unwrap();
        let coupling = CouplingField::new(g1, g2, 2.0 * PI, 2.0 * PI).unwrap();
        let grid = SpatialGrid::square(21, 1.2).unwrap();
        let m = model(atom_from(ar, ai, br, bi), (1.5, 1.2), coupling, params,
            GaussianBeam::centered(0.2, 0.25).unwrap(), grid);
        let w = if use_phase {
            position_distribution_phase(&m, phase(t1), phase(t2)).unwrap()
        } else {
            position_distribution_quadrature(&m, quad(t1, chi1), quad(t2, chi2)).unwrap()
        };
        prop_assert!(asymmetry(&w, |ix, iy| (20 - ix, 20 - iy)) < 1e-10);
    }

    #[test]
    fn equal_weights_give_swap_symmetry(
        ar in -1.0f64..1.0, ai in -1.0f64..1.0,
        delta in 0.5f64..2.0, tau in 0.1f64..2.0, alpha in 0.5f64..2.0,
        theta in 0.0f64..6.28, chi in -3.0f64..3.0,
        raman in any::<bool>(), use_phase in any::<bool>(),
    ) {
        prop_assume!(ar.hypot(ai) > 0.1);
        let a = c(ar, ai);
        let params = if raman {
            InteractionParams::raman(delta, tau).unwrap()
        } else {
            InteractionParams::off_resonant(delta, delta, tau).unwrap()
        };
        let grid = SpatialGrid::square(21, 1.2).unwrap();
        let m = model(atom_from(ar, ai, a.re, a.im), (alpha, alpha), CouplingField::symmetric(1.0).unwrap(),
            params, GaussianBeam::centered(0.2, 0.2).unwrap(), grid);
        let w = if use_phase {
            position_distribution_phase(&m, phase(theta), phase(theta)).unwrap()
        } else {
            position_distribution_quadrature(&m, quad(theta, chi), quad(theta, chi)).unwrap()
        };
        prop_assert!(asymmetry(&w, |ix, iy| (iy, ix)) < 1e-10);
    }

    #[test]
    fn distributions_are_finite_and_non_negative(
        ar in -1.0f64..1.0, br in -1.0f64..1.0, tau in 0.1f64..3.0,
        chi1 in -5.0f64..5.0, chi2 in -5.0f64..5.0, raman in any::<bool>(),
    ) {
        prop_assume!(ar.hypot(br) > 0.1);
        let params = if raman {
            InteractionParams::raman(1.0, tau).unwrap()
        } else {
            InteractionParams::off_resonant(1.0, 1.3, tau).unwrap()
        };
        let grid = SpatialGrid::square(33, 1.2).unwrap();
        let m = model(atom_from(ar, 0.0, br, 0.0), (2.0, 2.0), CouplingField::symmetric(1.0).unwrap(),
            params, GaussianBeam::centered(0.2, 0.2).unwrap(), grid);
        let w = position_distribution_quadrature(&m, quad(0.0, chi1), quad(0.0, chi2)).unwrap();
        prop_assert!(w.values.iter().all(|v| v.is_finite() && *v >= 0.0));
        let unit = w.normalized(Normalization::UnitMass).unwrap();
        prop_assert!((unit.mass() - 1.0).abs() < 1e-6);
    }
}
