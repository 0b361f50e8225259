use deflection::orientation_angle;
use deflection::scenario::OutputKind;
use deflection_web::{compute, rgba, Controls};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

fn controls(a: f64, b: f64) -> Controls {
    Controls { a_re: a, a_im: 0.0, b, eta: 1.0, chi: 4.0, points: 61 }
}

#[test]
fn equal_weights_tilt_the_position_pattern() {
    let d = compute(controls(FRAC_1_SQRT_2, FRAC_1_SQRT_2), OutputKind::Position).unwrap();
    assert!((d.mass() - 1.0).abs() < 1e-12);
    let o = orientation_angle(&d).unwrap();
    assert!((o.angle.abs() - FRAC_PI_4).abs() < 1e-6, "{}", o.angle);
}

#[test]
fn momentum_pattern_is_normalised() {
    let mut c = controls(-FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    c.points = 101;
    let d = compute(c, OutputKind::Momentum).unwrap();
    assert!((d.mass() - 1.0).abs() < 1e-12);
}

#[test]
fn rgba_has_four_bytes_per_node() {
    let d = compute(controls(1.0, 0.0), OutputKind::Position).unwrap();
    let img = rgba(&d);
    assert_eq!(img.len(), 4 * 61 * 61);
    assert!(img.chunks(4).any(|p| p[0] == 255));
    assert!(img.chunks(4).all(|p| p[3] == 255));
}

#[test]
fn coarse_grid_cannot_hold_the_momentum_pattern() {
    let err = compute(controls(1.0, 0.0), OutputKind::Momentum).unwrap_err();
    assert!(err.contains("grid edge"), "{err}");
}

#[test]
fn bad_grid_is_reported() {
    let mut c = controls(1.0, 0.0);
    c.points = 3;
    assert!(compute(c, OutputKind::Position).is_err());
}
