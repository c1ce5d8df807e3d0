//! Shared helpers for the integration test suites.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use periodforge::params::SurfaceParams;
use periodforge::period_solver::{solve_lambda, SolveConfig};

/// Deterministic RNG for reproducible random sweeps.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random valid parameter tuple with a comfortable margin from the domain
/// boundaries so contour and quadrature helpers have room to work.
pub fn random_params(rng: &mut ChaCha8Rng) -> SurfaceParams {
    loop {
        let x = rng.gen_range(0.1..0.7);
        let r = rng.gen_range(0.15..0.6);
        let t = rng.gen_range(0.3..std::f64::consts::PI - 0.3);
        let y = Complex64::from_polar(r, t);
        let alpha = rng.gen_range(0.4..std::f64::consts::PI - 0.4);
        let c = rng.gen_range(0.5..2.0);
        if let Ok(p) = SurfaceParams::from_curve_data(x, y, alpha, c) {
            // Keep the branch points well separated.
            if p.branch_scale() > 0.05 {
                return p;
            }
        }
    }
}

/// A closed polyline tracing a circle counterclockwise, first node repeated
/// at the end.
pub fn circle_loop(center: Complex64, radius: f64, n: usize) -> Vec<Complex64> {
    (0..=n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            center + Complex64::from_polar(radius, t)
        })
        .collect()
}

/// The reference solved tuple used by the mesh and solver suites
/// (rho = -0.2, x = 1e-3).
pub fn solved_params() -> SurfaceParams {
    let cfg = SolveConfig::new(-0.2, 1e-3);
    solve_lambda(&cfg).expect("reference tuple solves")
}
