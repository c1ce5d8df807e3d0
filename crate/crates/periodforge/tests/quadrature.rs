//! Quadrature suite: brute-force midpoint oracle, tolerance contract,
//! positivity, convergence order, and circle-parametrization invariance.

mod common;

use num_complex::Complex64;

use periodforge::params::SurfaceParams;
use periodforge::quadrature::{
    adaptive_gk, integral_set, integrate_path, integrate_path_with, Integrand, PathKind, PathSpec,
    QuadMethod,
};

/// Scalar density of a modulus integrand, written directly from the defining
/// expressions (independent of the library's cancelled forms).
fn naive_density(p: &SurfaceParams, spec: &PathSpec, t: f64) -> f64 {
    let z = match spec.kind {
        PathKind::RealSegment => Complex64::new(t, 0.0),
        PathKind::UnitCircleArc => Complex64::from_polar(1.0, t),
    };
    let big_z = z + 1.0 / z;
    let big_y = p.big_y();
    let w2 = (big_z * big_z - 2.0 * big_y.re * big_z + big_y.norm_sqr())
        / ((big_z - p.big_x()) * (big_z - 2.0 * p.alpha.cos()).powi(2));
    let w_abs = w2.norm().sqrt();
    let dh = (big_z - 2.0 * p.alpha.cos())
        / (z * (big_z * big_z - 2.0 * big_y.re * big_z + big_y.norm_sqr()));
    let dh_abs = dh.norm();
    match spec.integrand {
        Integrand::AbsDhOverW => dh_abs / w_abs,
        Integrand::AbsWDh => w_abs * dh_abs,
        _ => unreachable!("oracle only covers the modulus densities"),
    }
}

/// Committed brute-force oracle: 10^6 midpoint panels with the first panels
/// at an inverse-square-root endpoint replaced by the analytic tail of the
/// fitted power law.
fn midpoint_oracle(p: &SurfaceParams, spec: &PathSpec) -> f64 {
    let n = 1_000_000usize;
    let h = (spec.b - spec.a) / n as f64;
    let skip = 64usize;
    let sing_a = spec.singular_exponent(p, spec.a) < 0.0;
    let sing_b = spec.singular_exponent(p, spec.b) < 0.0;
    let (k0, k1) = (
        if sing_a { skip } else { 0 },
        if sing_b { n - skip } else { n },
    );
    let mut acc = 0.0;
    for k in k0..k1 {
        acc += naive_density(p, spec, spec.a + (k as f64 + 0.5) * h);
    }
    acc *= h;
    // Tail of C t^{-1/2} over the skipped width d, with C fitted at t = d:
    // integral = 2 C sqrt(d) = 2 f(d) d.
    if sing_a {
        let d = skip as f64 * h;
        acc += 2.0 * naive_density(p, spec, spec.a + d) * d;
    }
    if sing_b {
        let d = skip as f64 * h;
        acc += 2.0 * naive_density(p, spec, spec.b - d) * d;
    }
    acc
}

#[test]
fn oracle_agreement_on_random_tuples() {
    let mut rng = common::rng(42);
    for case in 0..10 {
        let p = common::random_params(&mut rng);
        let set = integral_set(&p, 1e-10).unwrap();
        let specs = periodforge::quadrature::integral_specs(&p);
        let values = set.values();
        for (k, spec) in specs.iter().enumerate().take(8) {
            let oracle = midpoint_oracle(&p, spec);
            let rel = (values[k] - oracle).abs() / oracle.abs();
            assert!(
                rel < 5e-4,
                "case {case} I{}: {} vs oracle {} (rel {rel:.2e})",
                k + 1,
                values[k],
                oracle
            );
        }
    }
}

#[test]
fn tolerance_contract() {
    let p = SurfaceParams::from_curve_data(0.3, Complex64::new(0.05, 0.2), 1.4, 1.0).unwrap();
    let spec = PathSpec {
        kind: PathKind::RealSegment,
        a: p.x,
        b: 1.0,
        integrand: Integrand::AbsWDh,
    };
    let mut tol = 1e-6;
    let (mut value, mut err) = integrate_path(&p, &spec, tol).unwrap();
    for _ in 0..12 {
        tol *= 0.5;
        let (v, e) = integrate_path(&p, &spec, tol).unwrap();
        assert!(
            (v - value).abs() <= err.max(1e-15),
            "halving tol moved the value by {} > previous err {err}",
            (v - value).abs()
        );
        value = v;
        err = e;
    }
}

#[test]
fn positivity_and_finiteness() {
    let mut rng = common::rng(5);
    for _ in 0..5 {
        let p = common::random_params(&mut rng);
        let set = integral_set(&p, 1e-10).unwrap();
        for (k, v) in set.values().iter().enumerate().take(8) {
            assert!(v.is_finite() && *v > 0.0, "I{} = {v} not positive", k + 1);
        }
    }
}

#[test]
fn zero_length_path() {
    let p = SurfaceParams::from_curve_data(0.3, Complex64::new(0.05, 0.2), 1.4, 1.0).unwrap();
    let spec = PathSpec {
        kind: PathKind::RealSegment,
        a: 0.5,
        b: 0.5,
        integrand: Integrand::AbsWDh,
    };
    assert_eq!(integrate_path(&p, &spec, 1e-10).unwrap(), (0.0, 0.0));
}

#[test]
fn circle_parametrization_invariance() {
    // I2 and I4 computed on z(t) = e^{-it} instead of e^{it}: identical,
    // checked against a direct midpoint evaluation of both parametrizations.
    let p = SurfaceParams::from_curve_data(0.3, Complex64::new(0.05, 0.2), 1.4, 1.0).unwrap();
    for integrand in [Integrand::AbsDhOverW, Integrand::AbsWDh] {
        let spec = PathSpec {
            kind: PathKind::UnitCircleArc,
            a: 0.0,
            b: std::f64::consts::PI,
            integrand,
        };
        let (lib, _) = integrate_path(&p, &spec, 1e-11).unwrap();
        let n = 400_000;
        let h = std::f64::consts::PI / n as f64;
        let mut plus = 0.0;
        let mut minus = 0.0;
        for k in 0..n {
            let t = (k as f64 + 0.5) * h;
            plus += naive_density(&p, &spec, t);
            // e^{-it} with positive speed |dz/dt| = 1.
            let z = Complex64::from_polar(1.0, -t);
            let big_z = z + 1.0 / z;
            let big_y = p.big_y();
            let nn = big_z * big_z - 2.0 * big_y.re * big_z + big_y.norm_sqr();
            let w_abs = ((nn / ((big_z - p.big_x()) * (big_z - 2.0 * p.alpha.cos()).powi(2)))
                .norm())
            .sqrt();
            let dh_abs = ((big_z - 2.0 * p.alpha.cos()) / (z * nn)).norm();
            minus += match integrand {
                Integrand::AbsDhOverW => dh_abs / w_abs,
                _ => w_abs * dh_abs,
            };
        }
        plus *= h;
        minus *= h;
        assert!((plus - minus).abs() < 1e-12 * plus, "parametrization flip");
        assert!((plus - lib).abs() < 1e-5 * lib, "midpoint vs library");
    }
}

#[test]
fn convergence_order_superlinear() {
    // Composite Simpson on a desingularized smooth integrand: doubling the
    // panel count must shrink the error by more than 4x.
    let f = |u: f64| (1.0 + u * u).sqrt() * (2.0 * u).cos();
    let (reference, _) = adaptive_gk(&f, 0.0, 1.0, 1e-14).unwrap();
    let simpson = |n: usize| {
        let h = 1.0 / n as f64;
        let mut acc = f(0.0) + f(1.0);
        for k in 1..n {
            acc += if k % 2 == 0 { 2.0 } else { 4.0 } * f(k as f64 * h);
        }
        acc * h / 3.0
    };
    let e1 = (simpson(64) - reference).abs();
    let e2 = (simpson(128) - reference).abs();
    assert!(e1 / e2 > 4.0, "error ratio {} not superlinear", e1 / e2);
}

#[test]
fn two_method_agreement() {
    let p = SurfaceParams::from_curve_data(0.3, Complex64::new(0.05, 0.2), 1.4, 1.0).unwrap();
    for (kind, a, b) in [
        (PathKind::RealSegment, p.x, 1.0),
        (PathKind::UnitCircleArc, 0.0, std::f64::consts::PI),
    ] {
        for integrand in [Integrand::AbsDhOverW, Integrand::AbsWDh] {
            let spec = PathSpec {
                kind,
                a,
                b,
                integrand,
            };
            let (gk, _) = integrate_path_with(&p, &spec, 1e-11, QuadMethod::GaussKronrod).unwrap();
            let (ts, _) = integrate_path_with(&p, &spec, 1e-10, QuadMethod::TanhSinh).unwrap();
            assert!((gk - ts).abs() < 1e-8 * gk.abs().max(1.0), "{gk} vs {ts}");
        }
    }
}

#[test]
fn malformed_specs_rejected() {
    let p = SurfaceParams::from_curve_data(0.3, Complex64::new(0.05, 0.2), 1.4, 1.0).unwrap();
    let bad = PathSpec {
        kind: PathKind::RealSegment,
        a: -0.5,
        b: 0.5,
        integrand: Integrand::AbsWDh,
    };
    assert!(integrate_path(&p, &bad, 1e-10).is_err(), "crossing t = 0");
    let reversed = PathSpec {
        kind: PathKind::RealSegment,
        a: 0.9,
        b: 0.5,
        integrand: Integrand::AbsWDh,
    };
    assert!(integrate_path(&p, &reversed, 1e-10).is_err());
    let arc = PathSpec {
        kind: PathKind::UnitCircleArc,
        a: 0.0,
        b: 4.0,
        integrand: Integrand::DhPlain,
    };
    assert!(integrate_path(&p, &arc, 1e-10).is_err(), "angle beyond pi");
}
