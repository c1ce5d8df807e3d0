//! Limit-oracle suite: every closed-form degenerate limit of the
//! construction, validated as a decreasing-error regression.

mod common;

use num_complex::Complex64;

use periodforge::limits::{
    check_circle_w_asymptotics, check_i2_i4_limits, check_residue_limit,
    check_weierstrass_convergence, check_x1_limits, f_of_lambda, i7_by_substitution, zeta_chart,
};
use periodforge::params::SurfaceParams;
use periodforge::period_solver::{sweep_x, SolveConfig};
use periodforge::quadrature::{integrate_path, Integrand, PathKind, PathSpec};

#[test]
fn x1_oracle() {
    let y = Complex64::new(0.0, 0.5);
    let (i6, i7) = check_x1_limits(y, &[0.9, 0.99, 0.999], 1e-11).unwrap();
    // 2 I7 -> pi / |2 - Y| = pi / 2.5 with Y = -1.5i.
    let target = std::f64::consts::PI / 2.5;
    assert!((i7.rows[0].target - target).abs() < 1e-12);
    assert!(
        i7.errors_decreasing() && i7.final_error() < 2e-2,
        "2 I7 oracle"
    );
    assert!(
        i6.errors_decreasing() && i6.final_error() < 1e-2,
        "2 I6 -> 0"
    );
}

#[test]
fn x0_oracle() {
    let (i2, i4) = check_i2_i4_limits(0.0, 2.0, &[1e-2, 1e-3, 1e-4], 1e-11).unwrap();
    let target = 2.0 * std::f64::consts::PI / 10.0f64.sqrt();
    assert!((i4.rows[0].target - target).abs() < 1e-12);
    assert!(
        i4.errors_decreasing() && i4.final_error() < 5e-2 * target,
        "scaled I4 oracle: final {}",
        i4.final_error()
    );
    // The scaled I2 measurements themselves march down to zero.
    assert!(i2.errors_decreasing(), "scaled I2 not decreasing");
}

#[test]
fn circle_w_asymptotics() {
    let rep = check_circle_w_asymptotics(
        0.0,
        2.0,
        std::f64::consts::FRAC_PI_4,
        &[1e-2, 1e-3, 1e-4],
        1e-11,
    )
    .unwrap();
    assert!(rep.errors_decreasing(), "sqrt(x)|w| on the circle");
    let last = rep.rows.last().unwrap();
    assert!(
        last.abs_error < 1e-2 * last.target.abs(),
        "final error {}",
        last.abs_error
    );
}

#[test]
fn weierstrass_convergence_surrogate() {
    let test_set: Vec<Complex64> = (0..10)
        .map(|k| Complex64::from_polar(1.5, 0.3 + 0.25 * k as f64))
        .collect();
    let rep = check_weierstrass_convergence(0.0, 2.0, 1.0, &[1e-2, 1e-3, 1e-4], &test_set, 1e-11)
        .unwrap();
    assert!(rep.errors_decreasing(), "sup error not strictly decreasing");

    // A test point at an excluded location is rejected.
    assert!(check_weierstrass_convergence(
        0.0,
        2.0,
        1.0,
        &[1e-3],
        &[Complex64::new(1.0, 0.0)],
        1e-11
    )
    .is_err());
}

#[test]
fn zeta_chart_maps_into_disk() {
    let z = zeta_chart(1e-3, 2.0, Complex64::new(1.0, 0.0));
    assert!((z - Complex64::new(1e-3, 0.0) / Complex64::new(1.0, 2.0)).norm() < 1e-18);
}

#[test]
fn substitution_matches_direct_quadrature() {
    // The degenerate-limit change of variables reproduces I7 to 1e-8 at
    // several x.
    let y = Complex64::new(0.0, 0.5);
    for &x in &[0.5, 0.9, 0.99] {
        let p = SurfaceParams::from_curve_data(x, y, std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        let spec = PathSpec {
            kind: PathKind::RealSegment,
            a: x,
            b: 1.0,
            integrand: Integrand::AbsWDh,
        };
        let (direct, _) = integrate_path(&p, &spec, 1e-11).unwrap();
        let sub = i7_by_substitution(&p, 1e-11).unwrap();
        assert!((direct - sub).abs() < 1e-8, "x = {x}: {direct} vs {sub}");
    }
}

#[test]
fn residue_limit_along_solved_curve() {
    let cfg = SolveConfig::new(-0.2, 1e-3);
    let curve = sweep_x(-0.2, &[4e-3, 2e-3, 1e-3], &cfg).unwrap();
    let rep = check_residue_limit(-0.2, &curve.solutions);
    let target = 0.5 / (-0.2f64).cos();
    assert!((rep.rows[0].target - target).abs() < 1e-14);
    assert!(rep.errors_decreasing() && rep.final_error() < 5e-2);
}

#[test]
fn f_lambda_reference_values() {
    assert!((f_of_lambda(2.0, 0.0) - 10.0f64.sqrt()).abs() < 1e-14);
    let t = 2.0 * std::f64::consts::PI / f_of_lambda(2.0, 0.0);
    assert!((t - 1.986918).abs() < 1e-6);
    // sec(-pi/3)/2 = 1: the residue-growth target at rho = -pi/3.
    assert!((0.5 / (-std::f64::consts::FRAC_PI_3).cos() - 1.0).abs() < 1e-14);
}
