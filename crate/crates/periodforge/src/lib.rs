//! periodforge: doubly periodic minimal surfaces with catenoidal ends.
//!
//! The crate builds a two-parameter family of doubly periodic minimal
//! surfaces from explicit Weierstrass data on a genus-3 hyperelliptic curve,
//! solves the associated period problem numerically, validates the
//! closed-form degenerate limits of the construction, and exports triangle
//! meshes of the fundamental piece and its periodic tiling.
//!
//! Module tour:
//!
//! - [`params`]: the parameter tuple `(x, rho, lambda, y, alpha, c)`.
//! - [`curve`]: the algebraic curve `w^2(z)`, the Weierstrass data
//!   `(g, dh)`, branch management, residues, and the degenerate limits.
//! - [`quadrature`]: the modulus integrals `I1..I8` with singular-endpoint
//!   desingularization (adaptive Gauss-Kronrod, tanh-sinh cross-check).
//! - [`period_solver`]: root-finding `lambda` so that both horizontal
//!   period conditions agree, plus boundary-loop closure verification.
//! - [`limits`]: regression oracles for every closed-form limit of the
//!   construction (`x -> 0`, `x -> 1`, residues, Weierstrass convergence).
//! - [`mesh`]: surface integration over the fundamental domain, symmetry
//!   assembly, periodic tiling, OBJ/PLY export, and discrete
//!   differential-geometry checks.
//! - [`cli`]: the `periodforge` command-line tool (solve, sweep, limits,
//!   mesh, verify) with stable JSON/CSV output schemas.
//!
//! ```
//! use num_complex::Complex64;
//! use periodforge::params::SurfaceParams;
//! use periodforge::curve::{eval_w2, eval_forms, continue_w};
//!
//! let p = SurfaceParams::from_curve_data(
//!     0.5, Complex64::new(0.0, 0.5), std::f64::consts::FRAC_PI_2, 1.0).unwrap();
//! let z = Complex64::new(0.25, 0.0);
//! let w = eval_w2(&p, z).unwrap().sqrt();
//! let sheet = continue_w(&p, &[z], w).unwrap()[0];
//! let forms = eval_forms(&p, &sheet).unwrap();
//! let null = forms.phi1 * forms.phi1 + forms.phi2 * forms.phi2 + forms.phi3 * forms.phi3;
//! assert!(null.norm() < 1e-12);
//! ```

// Domain validation negates comparisons on purpose so NaN fails closed, the
// quadrature node tables keep their published digits, and the grid code
// indexes parallel arrays by position.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::needless_range_loop,
    clippy::type_complexity
)]

pub mod cli;
pub mod curve;
pub mod error;
pub mod limits;
pub mod mesh;
pub mod params;
pub mod period_solver;
pub mod quadrature;

pub use error::{Error, Result};
pub use params::SurfaceParams;
