//! The hyperelliptic curve, the Weierstrass data `(g, dh)`, and their limits.
//!
//! The surface family is built from the genus-3 curve
//!
//! ```text
//! w^2 = (Z^2 - 2 Re{Y} Z + |Y|^2) / ((Z - X) (Z - 2 cos alpha)^2)
//! ```
//!
//! where `X = x + 1/x`, `Y = y + 1/y`, `Z = z + 1/z`, together with the
//! Gauss map `g = i c w` and the height differential
//!
//! ```text
//! dh = -i (Z - 2 cos alpha) dz / (z (Z^2 - 2 Re{Y} Z + |Y|^2)).
//! ```
//!
//! The double cover branches over the eight points
//! `{0, infinity, x, 1/x, y, 1/y, ybar, 1/ybar}`. The principal sheet is the
//! one with `w > 0` on the open segment `(0, x)`; the mirror choice produces
//! a congruent surface (a 180 degree rotation about the vertical axis), so
//! nothing is lost by fixing it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::SurfaceParams;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `Z = z + 1/z`.
///
/// # Errors
/// `z = 0` is a pole of `Z`.
///
/// ```
/// use num_complex::Complex64;
/// let z = Complex64::new(0.0, 1.0);
/// assert!(periodforge::curve::eval_big_z(z).unwrap().norm() < 1e-15);
/// ```
pub fn eval_big_z(z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(Error::Pole { expr: "Z", z });
    }
    Ok(z + 1.0 / z)
}

/// Numerator polynomial `N(Z) = Z^2 - 2 Re{Y} Z + |Y|^2 = (Z - Y)(Z - conj(Y))`.
pub(crate) fn num_poly(big_y: Complex64, big_z: Complex64) -> Complex64 {
    big_z * big_z - 2.0 * big_y.re * big_z + big_y.norm_sqr()
}

/// `w^2` at `z` per the defining equation of the curve.
///
/// On `(0, x)` the value is real and positive; on `(x, 1)`, `(-1, 0)` and the
/// unit circle it is real and negative, so `w` there is purely imaginary.
///
/// # Errors
/// Poles at `z = 0`, at `Z = X` (`z = x, 1/x`) and at `Z = 2 cos alpha`
/// (`z = e^{+-i alpha}`) are reported with the offending factor.
///
/// ```
/// use num_complex::Complex64;
/// use periodforge::params::SurfaceParams;
/// use periodforge::curve::eval_w2;
///
/// let p = SurfaceParams::from_curve_data(
///     0.5, Complex64::new(0.0, 0.5), std::f64::consts::FRAC_PI_2, 1.0).unwrap();
/// let w2 = eval_w2(&p, Complex64::new(0.25, 0.0)).unwrap();
/// assert!((w2.re - 1300.0 / 2023.0).abs() < 1e-14 && w2.im == 0.0);
/// ```
pub fn eval_w2(params: &SurfaceParams, z: Complex64) -> Result<Complex64> {
    let big_z = eval_big_z(z)?;
    let d1 = big_z - params.big_x();
    let d2 = big_z - 2.0 * params.alpha.cos();
    if d1.norm() == 0.0 {
        return Err(Error::Pole { expr: "Z - X", z });
    }
    if d2.norm() == 0.0 {
        return Err(Error::Pole {
            expr: "Z - 2 cos alpha",
            z,
        });
    }
    Ok(num_poly(params.big_y(), big_z) / (d1 * d2 * d2))
}

/// `v^2` where `v = w (Z - 2 cos alpha)`.
///
/// `v` has the same branch points as `w` but no poles at `z = e^{+-i alpha}`,
/// which makes it the right quantity to continue analytically across the unit
/// circle. Internally `w dh = -i v dz / (z N)` and
/// `dh / w = -i (Z - 2 cos alpha)^2 dz / (z N v)`.
pub(crate) fn eval_v2(params: &SurfaceParams, z: Complex64) -> Result<Complex64> {
    let big_z = eval_big_z(z)?;
    let d1 = big_z - params.big_x();
    if d1.norm() == 0.0 {
        return Err(Error::Pole { expr: "Z - X", z });
    }
    Ok(num_poly(params.big_y(), big_z) / d1)
}

/// Coefficient `h'(z)` of the height differential, `dh = h'(z) dz`:
///
/// ```text
/// h'(z) = -i (Z - 2 cos alpha) / (z (Z^2 - 2 Re{Y} Z + |Y|^2)).
/// ```
///
/// Against the circle tangent `i z dt` the value is real; against `dt` on the
/// real intervals it is purely imaginary. As `z -> 0` the coefficient tends
/// to `-i` (the apparent pole cancels).
///
/// # Errors
/// Poles at `z = 0` and the four zeros of the denominator
/// (`z = y, 1/y, ybar, 1/ybar`).
pub fn eval_dh(params: &SurfaceParams, z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(Error::Pole { expr: "dh", z });
    }
    let big_z = eval_big_z(z)?;
    let n = num_poly(params.big_y(), big_z);
    if n.norm() == 0.0 {
        return Err(Error::Pole { expr: "dh", z });
    }
    Ok(-I * (big_z - 2.0 * params.alpha.cos()) / (z * n))
}

/// Residue of `dh` at `z = ybar`:
///
/// ```text
/// Res(dh, ybar) = (conj(Y) - 2 cos alpha) / (2 (ybar - 1/ybar) Im{Y}).
/// ```
///
/// An independent contour-integral oracle in the test suite pins this closed
/// form. Note that substituting `cos alpha = 2 Re{y} / (1 + |y|^2)` reduces
/// it to `|y|^2 / (2 Im{y} (1 + |y|^2))`, which is real.
pub fn residue_dh(params: &SurfaceParams) -> Complex64 {
    let yb = params.ybar();
    let big_y = params.big_y();
    (big_y.conj() - 2.0 * params.alpha.cos()) / (2.0 * (yb - 1.0 / yb) * big_y.im)
}

/// A point `(z, w)` on the double cover with an explicit sheet tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SheetPoint {
    /// Base point.
    pub z: Complex64,
    /// Value of `w` on this sheet; `w^2` matches [`eval_w2`] at `z`.
    pub w: Complex64,
    /// Which of the two square roots `w` is.
    pub branch: Branch,
}

/// Sheet tag: `Plus` means `w` equals the principal square root of `w^2`
/// (nonnegative real part, ties broken toward nonnegative imaginary part),
/// `Minus` means its negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Principal square root.
    Plus,
    /// Negated principal square root.
    Minus,
}

impl SheetPoint {
    /// Classify `w` against the principal square root of `w2`.
    fn tag(z: Complex64, w: Complex64, w2: Complex64) -> SheetPoint {
        let s = w2.sqrt();
        let branch = if (w - s).norm() <= (w + s).norm() {
            Branch::Plus
        } else {
            Branch::Minus
        };
        SheetPoint { z, w, branch }
    }

    /// The same base point on the other sheet (`w` negated).
    pub fn other(&self) -> SheetPoint {
        SheetPoint {
            z: self.z,
            w: -self.w,
            branch: match self.branch {
                Branch::Plus => Branch::Minus,
                Branch::Minus => Branch::Plus,
            },
        }
    }
}

/// Distance from point `p` to the segment `[a, b]`.
pub(crate) fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + t * ab)).norm()
}

/// One adaptive continuation step of a square root of `f2` from `(z0, f0)`
/// to `z1`. Bisects the step whenever the two candidate roots cannot be told
/// apart reliably.
pub(crate) fn continue_sqrt_step<F>(
    f2: &F,
    z0: Complex64,
    f0: Complex64,
    z1: Complex64,
    depth: u32,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let s = f2(z1)?.sqrt();
    let d_plus = (s - f0).norm();
    let d_minus = (-s - f0).norm();
    let (best, d_best, d_other) = if d_plus <= d_minus {
        (s, d_plus, d_minus)
    } else {
        (-s, d_minus, d_plus)
    };
    let scale = f0.norm().max(best.norm());
    // Accept only when the winner is clearly closer and the step is a small
    // relative move; otherwise refine.
    let clear = (d_other - d_best) > 1e-6 * scale.max(1e-300);
    let small = d_best <= 0.5 * scale;
    if clear && small {
        return Ok(best);
    }
    if depth == 0 {
        return Err(Error::AmbiguousStep { z: z1 });
    }
    let zm = 0.5 * (z0 + z1);
    let fm = continue_sqrt_step(f2, z0, f0, zm, depth - 1)?;
    continue_sqrt_step(f2, zm, fm, z1, depth - 1)
}

/// Analytic continuation of `w` along a polyline.
///
/// Starts from `w_start` at `path[0]` (which must square to [`eval_w2`]
/// there within `1e-8` relative) and returns one [`SheetPoint`] per polyline
/// node, choosing at every internal step the square root closest to the
/// previous value. The result depends only on the homotopy class of the path
/// in the plane punctured at the branch points.
///
/// Uses the default clearance `1e-6 *` (minimum branch-point separation);
/// see [`continue_w_with`] to override it.
///
/// # Errors
/// Fails when the path passes within the clearance of a branch point or a
/// pole of `w^2`, or when a step stays ambiguous under maximal refinement.
pub fn continue_w(
    params: &SurfaceParams,
    path: &[Complex64],
    w_start: Complex64,
) -> Result<Vec<SheetPoint>> {
    continue_w_with(params, path, w_start, 1e-6 * params.branch_scale())
}

/// [`continue_w`] with an explicit clearance `delta`.
pub fn continue_w_with(
    params: &SurfaceParams,
    path: &[Complex64],
    w_start: Complex64,
    delta: f64,
) -> Result<Vec<SheetPoint>> {
    let first = *path
        .first()
        .ok_or_else(|| Error::Domain("empty continuation path".into()))?;
    let w2_first = eval_w2(params, first)?;
    let mismatch = (w_start * w_start - w2_first).norm() / w2_first.norm().max(1.0);
    if mismatch > 1e-8 {
        return Err(Error::Domain(format!(
            "w_start^2 mismatches w^2 at path start by {mismatch:.3e} relative"
        )));
    }

    // Points the path must stay clear of: branch points and poles of w^2.
    let mut avoid: Vec<Complex64> = params.finite_branch_points().to_vec();
    avoid.push(Complex64::from_polar(1.0, params.alpha));
    avoid.push(Complex64::from_polar(1.0, -params.alpha));

    for seg in path.windows(2) {
        for &p in &avoid {
            let d = segment_distance(p, seg[0], seg[1]);
            if d < delta {
                return Err(Error::Continuation {
                    near: p,
                    clearance: delta,
                });
            }
        }
    }

    let f2 = |z: Complex64| eval_w2(params, z);
    let mut out = Vec::with_capacity(path.len());
    out.push(SheetPoint::tag(first, w_start, w2_first));
    let mut w = w_start;
    for seg in path.windows(2) {
        w = continue_sqrt_step(&f2, seg[0], w, seg[1], 48)?;
        out.push(SheetPoint::tag(seg[1], w, eval_w2(params, seg[1])?));
    }
    Ok(out)
}

/// The Weierstrass forms at a regular sheet point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormSample {
    /// Height differential coefficient against `dz`.
    pub dh: Complex64,
    /// Gauss map `g = i c w`.
    pub g: Complex64,
    /// `phi1 = (1/2)(g^{-1} - g) dh`, coefficient against `dz`.
    pub phi1: Complex64,
    /// `phi2 = (i/2)(g^{-1} + g) dh`, coefficient against `dz`.
    pub phi2: Complex64,
    /// `phi3 = dh`, coefficient against `dz`.
    pub phi3: Complex64,
}

/// Evaluate `g` and the three form coefficients at a regular sheet point.
///
/// The null condition `phi1^2 + phi2^2 + phi3^2 = 0` holds identically.
///
/// # Errors
/// `w = 0` at a point where `dh` is nonzero signals corrupted parameters;
/// poles of `dh` are propagated.
pub fn eval_forms(params: &SurfaceParams, p: &SheetPoint) -> Result<FormSample> {
    let dh = eval_dh(params, p.z)?;
    if p.w.norm() == 0.0 {
        return Err(Error::Domain(format!(
            "g vanishes at z = {} where dh = {} is nonzero",
            p.z, dh
        )));
    }
    let g = I * params.c * p.w;
    let ginv = 1.0 / g;
    Ok(FormSample {
        dh,
        g,
        phi1: 0.5 * (ginv - g) * dh,
        phi2: 0.5 * I * (ginv + g) * dh,
        phi3: dh,
    })
}

/// Limit Weierstrass data of the building-block surface reached as `x -> 0`,
/// in the `zeta`-chart:
///
/// ```text
/// G^2 = i C^2 zeta (zeta - e^{i rho}) (zeta + e^{-i rho}) / (zeta + i lambda)^2,
/// dH  = d zeta / ((zeta - e^{i rho}) (zeta + e^{-i rho})).
/// ```
///
/// Returns `(G^2, dH coefficient)`.
///
/// # Errors
/// Poles at `zeta = -i lambda` (for `G^2`) and
/// `zeta = e^{i rho}, -e^{-i rho}` (for `dH`).
pub fn eval_limit_data_x0(
    lambda: f64,
    rho: f64,
    c_scale: f64,
    zeta: Complex64,
) -> Result<(Complex64, Complex64)> {
    let e = Complex64::from_polar(1.0, rho);
    let p1 = zeta - e;
    let p2 = zeta + e.conj();
    let q = zeta + I * lambda;
    if q.norm() == 0.0 {
        return Err(Error::Pole {
            expr: "G^2",
            z: zeta,
        });
    }
    if p1.norm() == 0.0 || p2.norm() == 0.0 {
        return Err(Error::Pole {
            expr: "dH",
            z: zeta,
        });
    }
    let g2 = I * c_scale * c_scale * zeta * p1 * p2 / (q * q);
    let dh = 1.0 / (p1 * p2);
    Ok((g2, dh))
}

/// Limit Weierstrass data reached as `x -> 1`: the defining equations with
/// `X` replaced by `2`. Returns `(g^2, dh coefficient)`.
///
/// # Errors
/// Poles of the stated expressions (`z` with `Z = 2`, `Z = 2 cos alpha`,
/// `z = 0`, and the zeros of the denominator polynomial).
pub fn eval_limit_data_x1(
    y: Complex64,
    alpha: f64,
    c: f64,
    z: Complex64,
) -> Result<(Complex64, Complex64)> {
    let big_z = eval_big_z(z)?;
    let big_y = y + 1.0 / y;
    let n = num_poly(big_y, big_z);
    let d1 = big_z - 2.0;
    let d2 = big_z - 2.0 * alpha.cos();
    if d1.norm() == 0.0 || d2.norm() == 0.0 {
        return Err(Error::Pole { expr: "g^2", z });
    }
    if n.norm() == 0.0 {
        return Err(Error::Pole { expr: "dh", z });
    }
    let g2 = -c * c * n / (d1 * d2 * d2);
    let dh = -I * d2 / (z * n);
    Ok((g2, dh))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_params() -> SurfaceParams {
        SurfaceParams::from_curve_data(
            0.5,
            Complex64::new(0.0, 0.5),
            std::f64::consts::FRAC_PI_2,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn big_z_values() {
        assert!((eval_big_z(Complex64::new(1.0, 0.0)).unwrap() - 2.0).norm() < 1e-15);
        assert!(eval_big_z(Complex64::new(0.0, 1.0)).unwrap().norm() < 1e-15);
        assert!(eval_big_z(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn w2_reference_value() {
        let p = demo_params();
        let w2 = eval_w2(&p, Complex64::new(0.25, 0.0)).unwrap();
        assert!((w2 - Complex64::new(1300.0 / 2023.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn w2_vanishes_at_y() {
        let p = demo_params();
        assert!(eval_w2(&p, p.y).unwrap().norm() < 1e-14);
    }

    #[test]
    fn dh_small_z_limit() {
        let p = demo_params();
        let a = eval_dh(&p, Complex64::new(1e-6, 0.0)).unwrap();
        let b = eval_dh(&p, Complex64::new(1e-8, 0.0)).unwrap();
        assert!((a - (-I)).norm() < 1e-4);
        assert!((b - (-I)).norm() < 1e-6);
        assert!((b - (-I)).norm() < (a - (-I)).norm());
    }

    #[test]
    fn constant_path_is_identity() {
        let p = demo_params();
        let z = Complex64::new(0.25, 0.0);
        let w = eval_w2(&p, z).unwrap().sqrt();
        let pts = continue_w(&p, &[z, z, z], w).unwrap();
        assert!(pts.iter().all(|s| (s.w - w).norm() < 1e-15));
    }

    #[test]
    fn residue_closed_form_is_real_under_alpha_identity() {
        // cos alpha = 2 Re y / (1 + |y|^2) makes the residue real.
        let y = Complex64::new(0.3, 0.4);
        let ca: f64 = 2.0 * y.re / (1.0 + y.norm_sqr());
        let p = SurfaceParams::from_curve_data(0.2, y, ca.acos(), 1.0).unwrap();
        let r = residue_dh(&p);
        assert!(r.im.abs() < 1e-14);
        let simplified = y.norm_sqr() / (2.0 * y.im * (1.0 + y.norm_sqr()));
        assert!((r.re - simplified).abs() < 1e-14);
    }
}
