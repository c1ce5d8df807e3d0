//! Period-solver suite: transversality, root quality, closure, sensitivity,
//! continuation along x, and the residue-growth trend.

mod common;

use num_complex::Complex64;

use periodforge::period_solver::{
    candidate_params, compute_c1_c2, solve_lambda, sweep_x, verify_periods, ybar_of, SolveConfig,
};
use periodforge::Error;

#[test]
fn transversality_sign_change_exists() {
    // A sign change of c1 - c2 over a geometric lambda scan at x = 1e-3.
    for rho in [-0.2, -0.4] {
        let mut prev: Option<f64> = None;
        let mut found = false;
        for k in 0..48 {
            let lam = 1.05 * (20.0f64 / 1.05).powf(k as f64 / 47.0);
            let Ok(p) = candidate_params(1e-3, rho, lam, 1e-11) else {
                continue;
            };
            let Ok((c1, c2)) = compute_c1_c2(&p, 1e-11) else {
                continue;
            };
            let h = c1 - c2;
            if let Some(ph) = prev {
                if ph.signum() != h.signum() {
                    found = true;
                    break;
                }
            }
            prev = Some(h);
        }
        assert!(found, "no sign change of c1 - c2 for rho = {rho}");
    }
}

#[test]
fn root_quality_and_closure() {
    let p = common::solved_params();
    let (c1, c2) = compute_c1_c2(&p, 1e-11).unwrap();
    assert!(c1 > 0.0 && c2 > 0.0, "c1 = {c1}, c2 = {c2}");
    assert!(
        (c1 - c2).abs() < 1e-8 * c1.max(1.0),
        "|c1 - c2| = {}",
        (c1 - c2).abs()
    );
    assert!(
        (p.c - c1.sqrt()).abs() < 1e-6 * p.c,
        "c mismatches sqrt(c1)"
    );

    let rep = verify_periods(&p, 1e-11).unwrap();
    for (k, r) in rep.period_residuals.iter().enumerate() {
        assert!(*r < 1e-7, "period residual {} = {r}", k + 1);
    }
    assert!(
        rep.residue_reality < 1e-8,
        "residue reality {}",
        rep.residue_reality
    );
    assert!(
        rep.alpha_consistency < 1e-6,
        "alpha consistency {}",
        rep.alpha_consistency
    );
}

#[test]
fn sensitivity_to_c_perturbation() {
    let p = common::solved_params();
    let base = verify_periods(&p, 1e-11).unwrap();
    let mut bad = p;
    bad.c *= 1.1;
    let pert = verify_periods(&bad, 1e-11).unwrap();
    assert!(
        pert.period_residuals[0] > 1e3 * base.period_residuals[0].max(1e-15),
        "phi1 residual only moved from {} to {}",
        base.period_residuals[0],
        pert.period_residuals[0]
    );
    // The vertical period does not involve c at all.
    assert!(
        pert.period_residuals[2] < 1e-7,
        "phi3 residual {}",
        pert.period_residuals[2]
    );
}

#[test]
fn lambda_curve_is_cauchy_in_x() {
    // lambda(x) converges as x -> 0; consecutive decades stay within 1e-2.
    let cfg = SolveConfig::new(-0.2, 1e-2);
    let l2 = solve_lambda(&cfg).unwrap().lambda;
    let l3 = solve_lambda(&SolveConfig::new(-0.2, 1e-3)).unwrap().lambda;
    let l4 = solve_lambda(&SolveConfig::new(-0.2, 1e-4)).unwrap().lambda;
    assert!((l2 - l3).abs() < 1e-2, "lambda jump {}", (l2 - l3).abs());
    assert!((l3 - l4).abs() < (l2 - l3).abs(), "not settling");
}

#[test]
fn scaled_c_candidates_converge_together() {
    // x lambda c1 and x lambda c2 approach a common finite positive limit.
    let mut prev_gap = f64::INFINITY;
    let mut prev_val = None;
    for &x in &[1e-2, 1e-3, 1e-4] {
        let p = solve_lambda(&SolveConfig::new(-0.2, x)).unwrap();
        let (c1, c2) = compute_c1_c2(&p, 1e-11).unwrap();
        let (s1, s2) = (x * p.lambda * c1, x * p.lambda * c2);
        assert!(s1 > 0.0 && s1.is_finite());
        let gap = (s1 - s2).abs();
        assert!(gap <= prev_gap.max(1e-12), "scaled candidates diverging");
        prev_gap = gap;
        if let Some(v) = prev_val {
            let step: f64 = s1 - v;
            assert!(
                step.abs() < 5e-2 * s1,
                "scaled limit not Cauchy: step {step}"
            );
        }
        prev_val = Some(s1);
    }
}

#[test]
fn reparametrization_invariance_of_residuals() {
    // The verification loop integrals are unchanged (to quadrature accuracy)
    // under tolerance refinement.
    let p = common::solved_params();
    let coarse = verify_periods(&p, 1e-8).unwrap();
    let fine = verify_periods(&p, 1e-12).unwrap();
    for k in 0..3 {
        assert!(
            (coarse.period_residuals[k] - fine.period_residuals[k]).abs() < 1e-7,
            "residual {} moved under refinement",
            k + 1
        );
    }
}

#[test]
fn ybar_domain_checks() {
    let yb = ybar_of(0.1, 0.0, 2.0).unwrap();
    assert!((yb - Complex64::new(0.02, -0.04)).norm() < 1e-15);
    assert!(
        yb.im < 0.0 && yb.norm() < 0.1,
        "ybar inside the lower half disk"
    );
    assert!(ybar_of(0.0, 0.0, 2.0).is_err());
    assert!(ybar_of(0.5, 0.0, 1.0).is_err());
}

#[test]
fn sweep_warm_start_and_truncation() {
    let cfg = SolveConfig::new(-0.2, 1e-3);
    // Empty grid: empty result.
    let empty = sweep_x(-0.2, &[], &cfg).unwrap();
    assert!(empty.solutions.is_empty() && empty.truncated.is_none());

    // A well-behaved grid solves fully with bounded lambda variation.
    let grid = [1e-3, 2e-3, 4e-3];
    let curve = sweep_x(-0.2, &grid, &cfg).unwrap();
    assert_eq!(curve.solutions.len(), 3);
    assert!(curve.truncated.is_none());
    for w in curve.solutions.windows(2) {
        let rel = (w[1].lambda - w[0].lambda).abs() / w[0].lambda;
        assert!(rel < 0.1, "lambda moved {rel:.3} between grid neighbours");
    }

    // A grid whose later roots leave the configured bracket truncates with
    // a report instead of erroring: lambda(1e-3) = 3.37 sits inside
    // (3, 4) but lambda(0.6) = 2.88 does not.
    let narrow = SolveConfig {
        lambda_bracket: (3.0, 4.0),
        ..cfg
    };
    let broken = sweep_x(-0.2, &[1e-3, 0.6], &narrow).unwrap();
    assert_eq!(broken.solutions.len(), 1);
    assert!(broken.truncated.is_some());

    // A first-point failure aborts outright.
    assert!(matches!(
        sweep_x(-0.2, &[0.6], &narrow),
        Err(Error::Bracket { .. })
    ));
}

#[test]
fn residue_growth_trend_along_sweep() {
    let cfg = SolveConfig::new(-0.2, 1e-3);
    let curve = sweep_x(-0.2, &[4e-3, 2e-3, 1e-3], &cfg).unwrap();
    let rep = periodforge::limits::check_residue_limit(-0.2, &curve.solutions);
    assert!(
        rep.errors_decreasing(),
        "scaled residue errors not decreasing"
    );
    assert!(
        rep.final_error() < 5e-2,
        "final error {}",
        rep.final_error()
    );
}
