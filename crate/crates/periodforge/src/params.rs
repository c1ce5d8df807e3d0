//! Parameter tuple defining one member of the surface family.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The parameter tuple `(x, rho, lambda, y, alpha, c)` defining one member of
/// the family.
///
/// `x` locates the branch point on `(0, 1)`, `rho` and `lambda` parametrize
/// the end position `ybar = x e^{i rho} / (e^{i rho} + i lambda)`, `y` is the
/// end branch point in the upper half disk, `alpha` fixes the zero of the
/// height differential on the unit circle, and `c > 0` is the Lopez-Ros-type
/// scale factor in `g = i c w`.
///
/// Derived quantities `X = x + 1/x` and `Y = y + 1/y` are computed on demand
/// and never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceParams {
    /// Branch point location in `(0, 1)`.
    pub x: f64,
    /// Angle parameter in `(-pi/2, 0]`.
    pub rho: f64,
    /// Scale parameter, `> 1`.
    pub lambda: f64,
    /// End branch point, `Im y > 0`, `|y| < 1`.
    pub y: Complex64,
    /// Zero of the height differential at `e^{i alpha}`, in `(0, pi)`.
    pub alpha: f64,
    /// Positive scale factor in `g = i c w`.
    pub c: f64,
}

impl SurfaceParams {
    /// Validate and build a parameter tuple.
    ///
    /// # Errors
    /// Returns a domain error when any invariant fails: `0 < x < 1`,
    /// `-pi/2 < rho <= 0`, `lambda > 1`, `Im y > 0`, `|y| < 1`,
    /// `0 < alpha < pi`, `c > 0`.
    pub fn new(x: f64, rho: f64, lambda: f64, y: Complex64, alpha: f64, c: f64) -> Result<Self> {
        if !(0.0 < x && x < 1.0) {
            return Err(Error::Domain(format!("x = {x} not in (0, 1)")));
        }
        if !(-std::f64::consts::FRAC_PI_2 < rho && rho <= 0.0) {
            return Err(Error::Domain(format!("rho = {rho} not in (-pi/2, 0]")));
        }
        if !(lambda > 1.0) {
            return Err(Error::Domain(format!("lambda = {lambda} not > 1")));
        }
        if !(y.im > 0.0) {
            return Err(Error::Domain(format!("Im y = {} not > 0", y.im)));
        }
        if !(y.norm() < 1.0) {
            return Err(Error::Domain(format!("|y| = {} not < 1", y.norm())));
        }
        if !(0.0 < alpha && alpha < std::f64::consts::PI) {
            return Err(Error::Domain(format!("alpha = {alpha} not in (0, pi)")));
        }
        if !(c > 0.0) {
            return Err(Error::Domain(format!("c = {c} not > 0")));
        }
        Ok(SurfaceParams {
            x,
            rho,
            lambda,
            y,
            alpha,
            c,
        })
    }

    /// Build a tuple from curve data `(x, y, alpha, c)` alone, filling `rho`
    /// and `lambda` with neutral placeholders.
    ///
    /// Convenient for curve and quadrature work where the `(rho, lambda)`
    /// parametrization of the end position plays no role.
    pub fn from_curve_data(x: f64, y: Complex64, alpha: f64, c: f64) -> Result<Self> {
        SurfaceParams::new(x, 0.0, 2.0, y, alpha, c)
    }

    /// `X = x + 1/x`.
    pub fn big_x(&self) -> f64 {
        self.x + 1.0 / self.x
    }

    /// `Y = y + 1/y`.
    pub fn big_y(&self) -> Complex64 {
        self.y + 1.0 / self.y
    }

    /// The conjugate end branch point `ybar` in the lower half disk.
    pub fn ybar(&self) -> Complex64 {
        self.y.conj()
    }

    /// The seven finite branch points `{0, x, 1/x, y, 1/y, ybar, 1/ybar}`.
    ///
    /// The eighth branch point is at infinity.
    pub fn finite_branch_points(&self) -> [Complex64; 7] {
        let y = self.y;
        let yb = self.y.conj();
        [
            Complex64::new(0.0, 0.0),
            Complex64::new(self.x, 0.0),
            Complex64::new(1.0 / self.x, 0.0),
            y,
            1.0 / y,
            yb,
            1.0 / yb,
        ]
    }

    /// Minimum pairwise distance between the finite branch points.
    ///
    /// Sets the characteristic scale for continuation clearances.
    pub fn branch_scale(&self) -> f64 {
        let pts = self.finite_branch_points();
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                best = best.min((pts[i] - pts[j]).norm());
            }
        }
        best
    }
}

/// `ybar(x) = x e^{i rho} / (e^{i rho} + i lambda)`: the end position in the
/// lower half disk as a function of the family parameters.
pub fn ybar_of(x: f64, rho: f64, lambda: f64) -> Complex64 {
    let e = Complex64::from_polar(1.0, rho);
    x * e / (e + Complex64::new(0.0, lambda))
}
